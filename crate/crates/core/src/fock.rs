//! Truncated Fock-basis states and density matrices.
//!
//! A state with cutoff `n_max` lives in the span of |0⟩..|n_max⟩. Factories
//! refuse to build a state whose probability mass beyond the cutoff would be
//! at least [`TAIL_TOLERANCE`]; below that the residue is renormalized away.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::math::ln_factorial_table;

pub type C64 = Complex64;

/// Dense complex operator on the truncated Fock space.
pub type Matrix = DMatrix<C64>;

/// Largest probability mass a factory may drop beyond the cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Tolerance for the Hermiticity and unit-trace checks on [`DensityMatrix`].
pub const MATRIX_TOLERANCE: f64 = 1e-12;

/// Default eigenvalue floor for [`DensityMatrix::check_psd`].
pub const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, rescaling to unit norm.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !norm_sqr.is_finite() || norm_sqr <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "amplitude vector has norm² {norm_sqr}"
            )));
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|c| c * scale).collect(),
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Occupation probabilities p_n = |c_n|².
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Σ p_n², the inverse participation ratio of the number distribution.
    pub fn inverse_participation_ratio(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr().powi(2)).sum()
    }

    /// Re-expresses the state with a larger cutoff by zero padding.
    pub fn padded(&self, n_max: usize) -> Result<Self> {
        if n_max < self.n_max() {
            return Err(Error::InvalidCutoff {
                index: self.n_max(),
                n_max,
            });
        }
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(n_max + 1, C64::new(0.0, 0.0));
        Ok(Self { amplitudes })
    }

    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let entries = Matrix::from_fn(dim, dim, |m, n| self.amplitudes[m] * self.amplitudes[n].conj());
        DensityMatrix { entries }
    }
}

/// ρ = |ψ⟩⟨ψ|.
pub fn to_density(psi: &PureState) -> DensityMatrix {
    psi.to_density()
}

/// Cutoff used when none is given: `max(30, ceil(|α|² + 8|α|))`, raised
/// further if needed until the Poisson tail is a decade under
/// [`TAIL_TOLERANCE`].
pub fn default_cutoff(alpha: C64) -> usize {
    let a = alpha.norm();
    let mut n_max = 30usize.max((a * a + 8.0 * a).ceil() as usize);
    while coherent_log_magnitudes(alpha, n_max).1 >= 0.1 * TAIL_TOLERANCE {
        n_max += 1;
    }
    n_max
}

/// Cutoff used for a phase state of width `r` when none is given.
pub fn default_phase_cutoff(r: usize) -> usize {
    r + 2
}

/// ln |c_n| and the Poisson tail beyond `n_max` for a coherent amplitude.
fn coherent_log_magnitudes(alpha: C64, n_max: usize) -> (Vec<f64>, f64) {
    let a2 = alpha.norm_sqr();
    if a2 == 0.0 {
        let mut logs = vec![f64::NEG_INFINITY; n_max + 1];
        logs[0] = 0.0;
        return (logs, 0.0);
    }
    let ln_a = alpha.norm().ln();
    let horizon = (n_max + 1).max((a2 + 12.0 * alpha.norm() + 60.0).ceil() as usize);
    let ln_fact = ln_factorial_table(horizon);
    let log_mag = |n: usize| -0.5 * a2 + n as f64 * ln_a - 0.5 * ln_fact[n];
    let logs = (0..=n_max).map(log_mag).collect();
    let tail = (n_max + 1..=horizon).map(|n| (2.0 * log_mag(n)).exp()).sum();
    (logs, tail)
}

/// Coherent state |α⟩ with c_n = e^{−|α|²/2} αⁿ/√(n!).
pub fn coherent_state(alpha: C64, n_max: usize) -> Result<PureState> {
    check_finite(alpha)?;
    let (logs, tail) = coherent_log_magnitudes(alpha, n_max);
    if tail >= TAIL_TOLERANCE {
        return Err(Error::TruncationTooSmall { n_max, tail });
    }
    let phase = alpha.arg();
    let amplitudes = logs
        .iter()
        .enumerate()
        .map(|(n, &l)| C64::from_polar(l.exp(), n as f64 * phase))
        .collect();
    PureState::from_amplitudes(amplitudes)
}

/// Pegg-Barnett phase state (r+1)^{-1/2} Σ_{k≤r} |k⟩.
pub fn phase_state(r: usize, n_max: usize) -> Result<PureState> {
    if r > n_max {
        return Err(Error::InvalidCutoff { index: r, n_max });
    }
    let c = C64::new(((r + 1) as f64).sqrt().recip(), 0.0);
    let amplitudes = (0..=n_max)
        .map(|k| if k <= r { c } else { C64::new(0.0, 0.0) })
        .collect();
    Ok(PureState { amplitudes })
}

pub fn fock_state(n: usize, n_max: usize) -> Result<PureState> {
    if n > n_max {
        return Err(Error::InvalidCutoff { index: n, n_max });
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); n_max + 1];
    amplitudes[n] = C64::new(1.0, 0.0);
    Ok(PureState { amplitudes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatSign {
    /// |α⟩ + |−α⟩, even photon numbers only.
    Plus,
    /// |α⟩ − |−α⟩, odd photon numbers only.
    Minus,
}

impl CatSign {
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(CatSign::Plus),
            -1 => Ok(CatSign::Minus),
            other => Err(Error::InvalidParams(format!("cat sign must be ±1, got {other}"))),
        }
    }
}

/// Normalized superposition |α⟩ ± |−α⟩.
pub fn cat_state(alpha: C64, sign: CatSign, n_max: usize) -> Result<PureState> {
    check_finite(alpha)?;
    let (logs, tail) = coherent_log_magnitudes(alpha, n_max);
    if tail >= TAIL_TOLERANCE {
        return Err(Error::TruncationTooSmall { n_max, tail });
    }
    let keep_even = sign == CatSign::Plus;
    let phase = alpha.arg();
    let amplitudes: Vec<C64> = logs
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            if (n % 2 == 0) == keep_even {
                C64::from_polar(2.0 * l.exp(), n as f64 * phase)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    if amplitudes.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::InvalidParams(
            "odd cat state with α = 0 is the zero vector".into(),
        ));
    }
    PureState::from_amplitudes(amplitudes)
}

/// Haar-random pure state: i.i.d. standard complex Gaussians, normalized.
/// Deterministic for a given seed.
pub fn random_pure_state(n_max: usize, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let amplitudes: Vec<C64> = (0..=n_max)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            })
            .collect();
        // an all-zero draw has probability zero but would not normalize
        if let Ok(state) = PureState::from_amplitudes(amplitudes) {
            return state;
        }
    }
}

fn check_finite(alpha: C64) -> Result<()> {
    if alpha.re.is_finite() && alpha.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("non-finite amplitude {alpha}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumberStats {
    pub mean: f64,
    pub variance: f64,
    /// Effective Hilbert-space size sqrt(1 + 12 σ_N²).
    pub hs: f64,
}

impl NumberStats {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: Matrix,
}

impl DensityMatrix {
    /// Validates squareness, Hermiticity and unit trace.
    pub fn new(entries: Matrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        let deviation = hermitian_deviation(&entries);
        if deviation > MATRIX_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > MATRIX_TOLERANCE || trace.im.abs() > MATRIX_TOLERANCE {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        Ok(Self { entries })
    }

    /// Diagonal (incoherent) mixture of Fock states with the given weights.
    pub fn from_populations(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParams("populations must be finite and ≥ 0".into()));
        }
        let dim = weights.len();
        let entries = Matrix::from_fn(dim, dim, |m, n| {
            if m == n {
                C64::new(weights[m], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::new(entries)
    }

    /// Identity / d on a d-dimensional truncated space.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_populations(&vec![1.0 / dim as f64; dim])
    }

    /// Wraps a matrix produced by a norm-preserving map of a valid density
    /// matrix, skipping validation.
    pub(crate) fn from_trusted(entries: Matrix) -> Self {
        Self { entries }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.entries[(n, n)].re).collect()
    }

    /// Tr(ρ²), computed as Σ |A_mn|² (valid for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn number_stats(&self) -> NumberStats {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (n, p) in self.populations().into_iter().enumerate() {
            let n = n as f64;
            m1 += n * p;
            m2 += n * n * p;
        }
        let variance = (m2 - m1 * m1).max(0.0);
        NumberStats {
            mean: m1,
            variance,
            hs: (1.0 + 12.0 * variance).sqrt(),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Opt-in positivity check; fails if the smallest eigenvalue is below `-tolerance`.
    pub fn check_psd(&self, tolerance: f64) -> Result<()> {
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -tolerance {
            Err(Error::NotPsd { min_eigenvalue })
        } else {
            Ok(())
        }
    }

    pub fn split_diagonal(&self) -> (Matrix, Matrix) {
        split_diagonal(&self.entries)
    }
}

pub fn number_stats(rho: &DensityMatrix) -> NumberStats {
    rho.number_stats()
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Splits an operator into its diagonal and off-diagonal parts; the two
/// always sum back to the input exactly.
pub fn split_diagonal(op: &Matrix) -> (Matrix, Matrix) {
    let zero = C64::new(0.0, 0.0);
    let diagonal = Matrix::from_fn(op.nrows(), op.ncols(), |m, n| if m == n { op[(m, n)] } else { zero });
    let off_diagonal = Matrix::from_fn(op.nrows(), op.ncols(), |m, n| if m == n { zero } else { op[(m, n)] });
    (diagonal, off_diagonal)
}

/// max |A_mn − conj(A_nm)|.
pub fn hermitian_deviation(op: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for m in 0..op.nrows() {
        for n in m..op.ncols() {
            worst = worst.max((op[(m, n)] - op[(n, m)].conj()).norm());
        }
    }
    worst
}
