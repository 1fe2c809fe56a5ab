//! Loschmidt echo O(t) = Tr[ρ(0) ρ_Δ(t)] and its time statistics.
//!
//! For a pure initial state the echo collapses to |Σ p_n e^{−itθ_n}|² with
//! p_n = |c_n|², so only populations enter. The dense Uhlmann fidelity is kept
//! for mixed inputs and as an independent cross-check.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::dynamics::DeltaParams;
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, Matrix, PureState, C64};

/// Absolute gap below which two θ values count as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// Eigenvalues more negative than this make a density matrix unusable for
/// the fidelity; anything between this and zero is clipped.
pub const FIDELITY_PSD_TOLERANCE: f64 = 1e-8;

/// Precomputed populations and ΔH frequencies for repeated echo evaluation.
#[derive(Clone, Debug)]
pub struct EchoModel {
    populations: Vec<f64>,
    thetas: Vec<f64>,
    delta: DeltaParams,
}

impl EchoModel {
    pub fn new(psi0: &PureState, delta: &DeltaParams) -> Result<Self> {
        let populations = psi0.populations();
        let thetas = delta.thetas(psi0.n_max())?;
        // levels with zero weight never contribute
        let (populations, thetas) = populations
            .into_iter()
            .zip(thetas)
            .filter(|(p, _)| *p > 0.0)
            .unzip();
        Ok(Self {
            populations,
            thetas,
            delta: *delta,
        })
    }

    pub fn echo(&self, t: f64) -> f64 {
        let t = self.delta.reduced_time(t);
        let amp: C64 = self
            .populations
            .iter()
            .zip(&self.thetas)
            .map(|(p, theta)| C64::from_polar(*p, -t * theta))
            .sum();
        amp.norm_sqr()
    }

    /// Σ p_n p_m over pairs with |θ_n − θ_m| < [`RESONANCE_TOLERANCE`].
    pub fn resonant_mean(&self) -> f64 {
        let mut total = 0.0;
        for (pn, tn) in self.populations.iter().zip(&self.thetas) {
            for (pm, tm) in self.populations.iter().zip(&self.thetas) {
                if (tn - tm).abs() < RESONANCE_TOLERANCE {
                    total += pn * pm;
                }
            }
        }
        total
    }
}

/// Pure-state echo |Σ p_n e^{−itθ_n}|².
pub fn echo_pure(psi0: &PureState, gamma: f64, epsilon: f64, delta_scale: f64, t: f64) -> Result<f64> {
    let delta = DeltaParams::new(gamma, epsilon, delta_scale)?;
    Ok(EchoModel::new(psi0, &delta)?.echo(t))
}

/// Tr[A B] for square operators of equal size.
pub fn trace_product(a: &Matrix, b: &Matrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    // Tr(AB) = Σ_mn A_mn B_nm
    Ok(a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum())
}

/// Eigen square root of a density matrix. Eigenvalues inside the numerical
/// noise floor are set to zero so pure states give exact rank-one roots.
fn psd_sqrt(rho: &Matrix) -> Result<Matrix> {
    let dim = rho.nrows();
    let eig = rho.clone().symmetric_eigen();
    let floor = 8.0 * dim as f64 * f64::EPSILON;
    let mut roots = DVector::<C64>::zeros(dim);
    for (k, &value) in eig.eigenvalues.iter().enumerate() {
        if value < -FIDELITY_PSD_TOLERANCE {
            return Err(Error::NotPsd { min_eigenvalue: value });
        }
        let value = if value < floor { 0.0 } else { value };
        roots[k] = C64::new(value.sqrt(), 0.0);
    }
    let v = &eig.eigenvectors;
    Ok(v * Matrix::from_diagonal(&roots) * v.adjoint())
}

/// Uhlmann fidelity (Tr √(√ρ1 ρ2 √ρ1))², evaluated as the squared trace norm
/// of √ρ1 √ρ2.
pub fn echo_general(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            left: rho1.dim(),
            right: rho2.dim(),
        });
    }
    let product = psd_sqrt(rho1.matrix())? * psd_sqrt(rho2.matrix())?;
    let nuclear: f64 = product.singular_values().iter().sum();
    Ok((nuclear * nuclear).clamp(0.0, 1.0))
}

/// Echo samples on t_i = i·dt with cumulative statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct EchoSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub cum_mean: Vec<f64>,
    /// Population variance of values[0..=i].
    pub cum_var: Vec<f64>,
}

/// Mean and population variance of a window of samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowStats {
    pub mean: f64,
    pub variance: f64,
    pub samples: usize,
}

impl EchoSeries {
    pub fn from_samples(times: Vec<f64>, values: Vec<f64>) -> Self {
        let (cum_mean, cum_var) = cumulative_stats(&values);
        Self {
            times,
            values,
            cum_mean,
            cum_var,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn final_mean(&self) -> f64 {
        self.cum_mean.last().copied().unwrap_or(f64::NAN)
    }

    pub fn final_variance(&self) -> f64 {
        self.cum_var.last().copied().unwrap_or(f64::NAN)
    }

    /// Statistics over the trailing `fraction` of the samples, a convergence
    /// diagnostic next to the cumulative track.
    pub fn windowed(&self, fraction: f64) -> WindowStats {
        let n = self.values.len();
        let take = ((n as f64 * fraction.clamp(0.0, 1.0)).round() as usize).clamp(1.min(n), n);
        window_stats(&self.values[n - take..])
    }

    /// Decay-rate diagnostic: least-squares slope of ln O(t) over samples with
    /// t ≤ `window`, returned as Γ in O ≈ e^{−Γt}. None with fewer than two
    /// usable points.
    pub fn fit_decay_rate(&self, window: f64) -> Option<f64> {
        let points: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, v)| **t <= window && **v > 0.0)
            .map(|(t, v)| (*t, v.ln()))
            .collect();
        if points.len() < 2 {
            return None;
        }
        // fit through ln O(0) = 0
        let sxy: f64 = points.iter().map(|(t, y)| t * y).sum();
        let sxx: f64 = points.iter().map(|(t, _)| t * t).sum();
        (sxx > 0.0).then(|| -sxy / sxx)
    }
}

fn window_stats(values: &[f64]) -> WindowStats {
    let (mean, var) = cumulative_stats(values);
    WindowStats {
        mean: mean.last().copied().unwrap_or(f64::NAN),
        variance: var.last().copied().unwrap_or(f64::NAN),
        samples: values.len(),
    }
}

/// Running mean and population variance (Welford), in sample order.
pub fn cumulative_stats(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut means = Vec::with_capacity(values.len());
    let mut vars = Vec::with_capacity(values.len());
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &x) in values.iter().enumerate() {
        let k = (i + 1) as f64;
        let d = x - mean;
        mean += d / k;
        m2 += d * (x - mean);
        means.push(mean);
        vars.push((m2 / k).max(0.0));
    }
    (means, vars)
}

/// Sample times i·dt for i = 1..=floor(t_max/dt).
pub fn sample_times(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidGrid(format!("dt must be > 0, got {dt}")));
    }
    if !(t_max >= dt && t_max.is_finite()) {
        return Err(Error::InvalidGrid(format!("t_max must be ≥ dt, got t_max = {t_max}, dt = {dt}")));
    }
    // tolerate t_max landing a rounding error below a whole number of steps
    let steps = (t_max / dt * (1.0 + 4.0 * f64::EPSILON)).floor() as usize;
    Ok((1..=steps).map(|i| i as f64 * dt).collect())
}

pub fn echo_series(
    psi0: &PureState,
    gamma: f64,
    epsilon: f64,
    delta_scale: f64,
    t_max: f64,
    dt: f64,
) -> Result<EchoSeries> {
    let delta = DeltaParams::new(gamma, epsilon, delta_scale)?;
    echo_series_with(&EchoModel::new(psi0, &delta)?, t_max, dt)
}

pub fn echo_series_with(model: &EchoModel, t_max: f64, dt: f64) -> Result<EchoSeries> {
    let times = sample_times(t_max, dt)?;
    let values = times.par_iter().map(|&t| model.echo(t)).collect();
    Ok(EchoSeries::from_samples(times, values))
}

/// Long-time average of the pure-state echo by exact resonance enumeration.
/// Equals Σ p_n² when all θ_n are distinct.
pub fn asymptotic_mean_oracle(psi0: &PureState, gamma: f64, epsilon: f64) -> Result<f64> {
    // resonances do not depend on a non-zero delta_scale
    let delta = DeltaParams::new(gamma, epsilon, 1.0)?;
    Ok(EchoModel::new(psi0, &delta)?.resonant_mean())
}

/// Mean and variance of the echo over `samples_per_period` equally spaced
/// times in one period 2π/delta_scale, for positive integer γ and ε.
///
/// With integer frequencies k_n = (n² + ε)^γ, the mean is the exact count
/// Σ p_n p_m over pairs with k_n ≡ k_m (mod samples_per_period); the
/// variance comes from the same integer bookkeeping on four-index sums.
/// This is the long-time limit of a uniform time grid with
/// dt = period / samples_per_period.
pub fn sampled_period_stats(
    psi0: &PureState,
    gamma: u32,
    epsilon: u64,
    samples_per_period: u64,
) -> Result<WindowStats> {
    if gamma == 0 || epsilon == 0 || samples_per_period == 0 {
        return Err(Error::InvalidParams(
            "γ, ε and samples per period must be positive integers".into(),
        ));
    }
    let q = samples_per_period as i128;
    let mut residues = Vec::new();
    let mut weights = Vec::new();
    for (n, p) in psi0.populations().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let base = (n as i128) * (n as i128) + epsilon as i128;
        let mut k: i128 = 1;
        for _ in 0..gamma {
            k = (k * base).rem_euclid(q);
        }
        residues.push(k);
        weights.push(p);
    }
    // distribution of frequency differences mod q, weighted by p_n p_m
    let mut diff = vec![0.0; q as usize];
    for (kn, pn) in residues.iter().zip(&weights) {
        for (km, pm) in residues.iter().zip(&weights) {
            diff[(kn - km).rem_euclid(q) as usize] += pn * pm;
        }
    }
    let mean = diff[0];
    // over the sampled period, O = Σ_d diff[d] e^{-i 2π d j/q}; the mean of O²
    // pairs d with −d (mod q)
    let second: f64 = (0..q as usize)
        .map(|d| diff[d] * diff[(q as usize - d) % q as usize])
        .sum();
    Ok(WindowStats {
        mean,
        variance: (second - mean * mean).max(0.0),
        samples: samples_per_period as usize,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaturationPoint {
    pub sigma_n: f64,
    pub mean_infty: f64,
    pub state_label: String,
}

/// Least-squares μ for mean_∞ ≈ μ/(π σ_N).
pub fn fit_saturation(points: &[SaturationPoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = points.iter().find(|p| !(p.sigma_n > 0.0 && p.sigma_n.is_finite())) {
        return Err(Error::InvalidParams(format!(
            "σ_N must be > 0 (state {}: {})",
            bad.state_label, bad.sigma_n
        )));
    }
    // one σ value cannot distinguish the 1/σ law from a constant
    let first = points[0].sigma_n;
    if points.iter().all(|p| p.sigma_n == first) {
        return Err(Error::DegenerateSweep(format!(
            "{} state(s) with a single σ_N = {first}",
            points.len()
        )));
    }
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), p| {
        let x = 1.0 / (PI * p.sigma_n);
        (sxy + x * p.mean_infty, sxx + x * x)
    });
    Ok(sxy / sxx)
}

/// Z(σ) = μ/(πσ).
pub fn saturation_curve(mu: f64, sigma_n: f64) -> f64 {
    mu / (PI * sigma_n)
}
