//! Wigner and Husimi fields on a (q, p) lattice, and the roughness measure.
//!
//! Conventions: ℏ = 1, coherent amplitude β = (q + ip)/√2, and every field is
//! normalized so that ∫ W{A} dq dp = Tr A and ∫ H dq dp = 1. Under these
//! conventions Tr(AB) = 2π ∫ W{A} W{B} dq dp.
//!
//! The kernel Π_mn = W{|m⟩⟨n|} for n = m + d is
//!
//! ```text
//! Π_{m,m+d}(β) = (−1)^m / π · sqrt(m!/(m+d)!) (2β)^d e^{−2|β|²} L_m^d(4|β|²)
//! ```
//!
//! with Π_{n,m} = conj(Π_{m,n}). It is evaluated through the normalized
//! Laguerre recurrence so no factorial is ever formed.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, Matrix, C64};
use crate::math::ln_factorial_table;

/// Allowed mismatch between a field's integral and the operator trace before
/// the grid is declared too coarse.
pub const TRACE_CHECK_TOLERANCE: f64 = 1e-3;

pub const DEFAULT_GRID_POINTS: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_q: usize,
    pub n_p: usize,
}

impl PhaseSpaceGrid {
    pub fn new(q_min: f64, q_max: f64, p_min: f64, p_max: f64, n_q: usize, n_p: usize) -> Result<Self> {
        let bounds = [q_min, q_max, p_min, p_max];
        if bounds.iter().any(|x| !x.is_finite()) || q_max <= q_min || p_max <= p_min {
            return Err(Error::InvalidGrid(format!(
                "need q_min < q_max and p_min < p_max, got q ∈ [{q_min}, {q_max}], p ∈ [{p_min}, {p_max}]"
            )));
        }
        for n in [n_q, n_p] {
            if n < 3 || n % 2 == 0 {
                return Err(Error::InvalidGrid(format!("points per axis must be odd and ≥ 3, got {n}")));
            }
        }
        Ok(Self {
            q_min,
            q_max,
            p_min,
            p_max,
            n_q,
            n_p,
        })
    }

    /// Square grid [−L, L]² centred on the origin.
    pub fn symmetric(half_width: f64, points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, points, points)
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_q - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_p - 1) as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn len(&self) -> usize {
        self.n_q * self.n_p
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coherent amplitude of lattice point (i, j).
    pub fn beta(&self, i: usize, j: usize) -> C64 {
        C64::new(self.q(i), self.p(j)) / std::f64::consts::SQRT_2
    }

    /// 2-D trapezoidal rule over row-major samples.
    pub fn integrate<T>(&self, values: &[T]) -> T
    where
        T: Copy + std::iter::Sum + std::ops::Mul<f64, Output = T>,
    {
        let edge = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        let cell = self.dq() * self.dp();
        values
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let (i, j) = (idx / self.n_p, idx % self.n_p);
                *v * (edge(i, self.n_q) * edge(j, self.n_p) * cell)
            })
            .sum()
    }

    fn sample<F>(&self, f: F) -> Vec<C64>
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let mut values = vec![C64::new(0.0, 0.0); self.len()];
        values
            .par_chunks_mut(self.n_p)
            .enumerate()
            .for_each(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(self.beta(i, j));
                }
            });
        values
    }
}

/// A complex field sampled row-major: index i·n_p + j holds (q_i, p_j).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceField {
    pub grid: PhaseSpaceGrid,
    pub values: Vec<C64>,
}

impl PhaseSpaceField {
    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.grid.n_p + j]
    }

    pub fn integral(&self) -> C64 {
        self.grid.integrate(&self.values)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_real(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// 2π ∫ F G dq dp, which equals Tr(AB) for Wigner fields of A and B.
    pub fn overlap(&self, other: &PhaseSpaceField) -> Result<C64> {
        self.check_same_grid(other)?;
        let product: Vec<C64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(self.grid.integrate(&product) * (2.0 * PI))
    }

    pub fn add(&self, other: &PhaseSpaceField) -> Result<PhaseSpaceField> {
        self.check_same_grid(other)?;
        Ok(PhaseSpaceField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest pointwise |F − G|.
    pub fn max_difference(&self, other: &PhaseSpaceField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_same_grid(&self, other: &PhaseSpaceField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                left: self.grid.len(),
                right: other.grid.len(),
            });
        }
        Ok(())
    }
}

/// Wigner kernel Π_mn(β) = W{|m⟩⟨n|}(β).
pub fn pi_mn(beta: C64, m: usize, n: usize) -> C64 {
    let (low, high) = (m.min(n), m.max(n));
    let ln_fact = ln_factorial_table(high);
    let mut out = C64::new(0.0, 0.0);
    for_kernel_offset(beta, high - low, low + 1, &ln_fact, |k, value| {
        if k == low {
            out = value;
        }
    });
    if m > n {
        out.conj()
    } else {
        out
    }
}

/// Calls `sink(m, Π_{m,m+d}(β))` for m = 0..count.
fn for_kernel_offset<F>(beta: C64, d: usize, count: usize, ln_fact: &[f64], mut sink: F)
where
    F: FnMut(usize, C64),
{
    let x = 4.0 * beta.norm_sqr();
    if d > 0 && x == 0.0 {
        for m in 0..count {
            sink(m, C64::new(0.0, 0.0));
        }
        return;
    }
    const RESCALE: f64 = 1e100;
    let df = d as f64;
    let log_pref = if d == 0 {
        -0.5 * x
    } else {
        0.5 * df * x.ln() - 0.5 * ln_fact[d] - 0.5 * x
    };
    let rotation = if d == 0 {
        C64::new(1.0, 0.0)
    } else {
        C64::from_polar(1.0, df * beta.arg())
    };
    let mut scale = rotation * (log_pref.exp() / PI);
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    for m in 0..count {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sink(m, scale * (sign * cur));
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + df - x) * cur - (mf * (mf + df)).sqrt() * prev)
            / ((mf + 1.0) * (mf + 1.0 + df)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            scale *= RESCALE;
        }
    }
}

/// W{A}(β) = Σ_mn A_mn Π_mn(β).
fn wigner_point(op: &Matrix, beta: C64, ln_fact: &[f64]) -> C64 {
    let dim = op.nrows();
    let mut total = C64::new(0.0, 0.0);
    for d in 0..dim {
        for_kernel_offset(beta, d, dim - d, ln_fact, |m, kernel| {
            total += op[(m, m + d)] * kernel;
            if d > 0 {
                total += op[(m + d, m)] * kernel.conj();
            }
        });
    }
    total
}

/// ⟨β|A|β⟩ / (2π).
fn husimi_point(op: &Matrix, beta: C64) -> C64 {
    let dim = op.nrows();
    let mut v = Vec::with_capacity(dim);
    let mut cur = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for m in 0..dim {
        v.push(cur);
        cur = cur * beta / ((m + 1) as f64).sqrt();
    }
    let mut total = C64::new(0.0, 0.0);
    for m in 0..dim {
        let row: C64 = (0..dim).map(|n| op[(m, n)] * v[n]).sum();
        total += v[m].conj() * row;
    }
    total / (2.0 * PI)
}

/// Wigner transform of any Fock-basis operator, without the trace check.
pub fn wigner_unchecked(op: &Matrix, grid: &PhaseSpaceGrid) -> PhaseSpaceField {
    let ln_fact = ln_factorial_table(op.nrows());
    PhaseSpaceField {
        grid: *grid,
        values: grid.sample(|beta| wigner_point(op, beta, &ln_fact)),
    }
}

fn check_trace(field: &PhaseSpaceField, expected: f64) -> Result<()> {
    let integral = field.integral().re;
    if (integral - expected).abs() > TRACE_CHECK_TOLERANCE {
        Err(Error::GridTooCoarse { integral, expected })
    } else {
        Ok(())
    }
}

/// Wigner transform; fails if the field integral misses Re Tr(op) by more
/// than [`TRACE_CHECK_TOLERANCE`].
pub fn wigner(op: &Matrix, grid: &PhaseSpaceGrid) -> Result<PhaseSpaceField> {
    if op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch {
            left: op.nrows(),
            right: op.ncols(),
        });
    }
    let field = wigner_unchecked(op, grid);
    check_trace(&field, op.trace().re)?;
    Ok(field)
}

/// Husimi function H = ⟨β|ρ|β⟩/(2π), from coherent-state overlaps.
pub fn husimi(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> Result<PhaseSpaceField> {
    let op = rho.matrix();
    let field = PhaseSpaceField {
        grid: *grid,
        values: grid.sample(|beta| husimi_point(op, beta)),
    };
    check_trace(&field, 1.0)?;
    Ok(field)
}

/// R with R² = 2π ∫ |W − H|² dq dp.
pub fn roughness(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> Result<f64> {
    let w = wigner(rho.matrix(), grid)?;
    let h = husimi(rho, grid)?;
    Ok(roughness_from_fields(&w, &h))
}

pub(crate) fn roughness_from_fields(w: &PhaseSpaceField, h: &PhaseSpaceField) -> f64 {
    let diff: Vec<f64> = w
        .values
        .iter()
        .zip(&h.values)
        .map(|(a, b)| (a - b).norm_sqr())
        .collect();
    (2.0 * PI * w.grid.integrate(&diff)).max(0.0).sqrt()
}

/// Half-width sqrt(2(n_eff + 1)) + 4 with n_eff = ⟨N⟩ + 3σ_N.
pub fn auto_half_width(rho: &DensityMatrix) -> f64 {
    let stats = rho.number_stats();
    let n_eff = stats.mean + 3.0 * stats.std_dev();
    (2.0 * (n_eff + 1.0)).sqrt() + 4.0
}

/// Symmetric square grid covering the state; an even `points` is bumped to
/// the next odd count so the origin stays on the lattice.
pub fn grid_auto(rho: &DensityMatrix, points: usize) -> PhaseSpaceGrid {
    let points = points.max(3) | 1;
    PhaseSpaceGrid::symmetric(auto_half_width(rho), points).expect("auto grid is always valid")
}
