//! Spectrum and exact evolution under H = ℏωN + λℏ^{2γ}(N² + ε)^γ.
//!
//! The Hamiltonian is diagonal in the number basis, so evolving a density
//! matrix only multiplies A_mn by e^{−it(E_m − E_n)/ℏ}. Phases are always
//! formed directly from the spectrum at the requested time.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, Matrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaParams {
    pub omega: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub hbar: f64,
    /// (λ1 − λ2)ℏ^{2γ}: the strength of the perturbation ΔH, acts as a time scale.
    pub delta_scale: f64,
}

impl Default for GammaParams {
    fn default() -> Self {
        Self {
            omega: 0.0,
            lambda: 1.0,
            gamma: 1.0,
            epsilon: 1.0,
            hbar: 1.0,
            delta_scale: 1.0,
        }
    }
}

impl GammaParams {
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega,
            self.lambda,
            self.gamma,
            self.epsilon,
            self.hbar,
            self.delta_scale,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("model parameters must be finite".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidParams(format!("hbar must be > 0, got {}", self.hbar)));
        }
        Ok(())
    }

    /// The ΔH part of the model (same γ and ε, strength `delta_scale`).
    pub fn delta(&self) -> DeltaParams {
        DeltaParams {
            gamma: self.gamma,
            epsilon: self.epsilon,
            delta_scale: self.delta_scale,
        }
    }
}

/// Parameters of the perturbation ΔH = (λ1 − λ2)ℏ^{2γ}(N² + ε)^γ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaParams {
    pub gamma: f64,
    pub epsilon: f64,
    pub delta_scale: f64,
}

impl DeltaParams {
    pub fn new(gamma: f64, epsilon: f64, delta_scale: f64) -> Result<Self> {
        let params = Self {
            gamma,
            epsilon,
            delta_scale,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.epsilon.is_finite() && self.delta_scale.is_finite()) {
            return Err(Error::InvalidParams("ΔH parameters must be finite".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn period(&self) -> Option<f64> {
        fundamental_period(self.gamma, self.epsilon, self.delta_scale)
    }

    /// t reduced modulo the period when the dynamics is periodic; the
    /// reduction is exact and keeps phase arguments small on long horizons.
    pub fn reduced_time(&self, t: f64) -> f64 {
        match self.period() {
            Some(period) if t.is_finite() => t.rem_euclid(period),
            _ => t,
        }
    }

    /// θ_n = delta_scale · (n² + ε)^γ for n = 0..=n_max.
    pub fn thetas(&self, n_max: usize) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((0..=n_max)
            .map(|n| self.delta_scale * nonlinear_term(n, self.gamma, self.epsilon))
            .collect())
    }
}

/// (n² + ε)^γ on the principal real branch; n² + ε > 0 for ε > 0.
fn nonlinear_term(n: usize, gamma: f64, epsilon: f64) -> f64 {
    let base = (n as f64).powi(2) + epsilon;
    if gamma.fract() == 0.0 && gamma.abs() <= i32::MAX as f64 {
        base.powi(gamma as i32)
    } else {
        base.powf(gamma)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpectrum {
    energies: Vec<f64>,
    hbar: f64,
}

impl PhaseSpectrum {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn n_max(&self) -> usize {
        self.energies.len() - 1
    }

    /// e^{−i t E_n / ℏ} for every level.
    pub fn phases(&self, t: f64) -> Vec<C64> {
        self.energies
            .iter()
            .map(|e| C64::from_polar(1.0, -t * e / self.hbar))
            .collect()
    }
}

/// E_n = ℏωn + λℏ^{2γ}(n² + ε)^γ.
pub fn spectrum(params: &GammaParams, n_max: usize) -> Result<PhaseSpectrum> {
    params.validate()?;
    let coupling = params.lambda * params.hbar.powf(2.0 * params.gamma);
    let energies = (0..=n_max)
        .map(|n| {
            params.hbar * params.omega * n as f64
                + coupling * nonlinear_term(n, params.gamma, params.epsilon)
        })
        .collect();
    Ok(PhaseSpectrum {
        energies,
        hbar: params.hbar,
    })
}

/// A_mn → u_m A_mn conj(u_n).
fn conjugate_by_phases(op: &Matrix, phases: &[C64]) -> Matrix {
    Matrix::from_fn(op.nrows(), op.ncols(), |m, n| {
        if m == n {
            op[(m, n)]
        } else {
            phases[m] * op[(m, n)] * phases[n].conj()
        }
    })
}

/// A_mn → e^{−i t (f_m − f_n)} A_mn, with the frequency difference formed
/// before the phase so integer gaps stay exact.
fn evolve_by_frequencies(op: &Matrix, freqs: &[f64], t: f64) -> Matrix {
    Matrix::from_fn(op.nrows(), op.ncols(), |m, n| {
        if m == n {
            op[(m, n)]
        } else {
            op[(m, n)] * C64::from_polar(1.0, -t * (freqs[m] - freqs[n]))
        }
    })
}

/// Applies the diagonal unitary built from `phases` to any Fock operator.
pub fn rotate_operator(op: &Matrix, phases: &[C64]) -> Result<Matrix> {
    if phases.len() != op.nrows() || op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch {
            left: op.nrows(),
            right: phases.len(),
        });
    }
    Ok(conjugate_by_phases(op, phases))
}

/// ρ(t) under the full Hamiltonian.
pub fn evolve(rho0: &DensityMatrix, params: &GammaParams, t: f64) -> Result<DensityMatrix> {
    let spec = spectrum(params, rho0.n_max())?;
    let freqs: Vec<f64> = spec.energies().iter().map(|e| e / params.hbar).collect();
    Ok(DensityMatrix::from_trusted(evolve_by_frequencies(rho0.matrix(), &freqs, t)))
}

/// e^{−itθ_n} for the ΔH spectrum.
pub fn delta_phases(delta: &DeltaParams, n_max: usize, t: f64) -> Result<Vec<C64>> {
    let t = delta.reduced_time(t);
    Ok(delta
        .thetas(n_max)?
        .into_iter()
        .map(|theta| C64::from_polar(1.0, -t * theta))
        .collect())
}

/// Interaction-picture state ρ_Δ(t) = U_ΔH ρ0 U_ΔH†.
pub fn evolve_delta(
    rho0: &DensityMatrix,
    gamma: f64,
    epsilon: f64,
    delta_scale: f64,
    t: f64,
) -> Result<DensityMatrix> {
    let delta = DeltaParams::new(gamma, epsilon, delta_scale)?;
    evolve_delta_with(rho0, &delta, t)
}

/// Uses the same per-level phases e^{−itθ_n} as the pure-state echo, so
/// Tr ρ0 ρ_Δ(t) and the population sum round identically at large t·θ.
pub fn evolve_delta_with(rho0: &DensityMatrix, delta: &DeltaParams, t: f64) -> Result<DensityMatrix> {
    let phases = delta_phases(delta, rho0.n_max(), t)?;
    Ok(DensityMatrix::from_trusted(conjugate_by_phases(rho0.matrix(), &phases)))
}

/// Period of the ΔH dynamics when every θ_m − θ_n is an integer multiple of
/// `delta_scale`, i.e. positive integer γ and positive integer ε.
pub fn fundamental_period(gamma: f64, epsilon: f64, delta_scale: f64) -> Option<f64> {
    let integral = |x: f64| x.is_finite() && x.fract() == 0.0 && x >= 1.0;
    if integral(gamma) && integral(epsilon) && delta_scale != 0.0 && delta_scale.is_finite() {
        Some(2.0 * PI / delta_scale.abs())
    } else {
        None
    }
}
