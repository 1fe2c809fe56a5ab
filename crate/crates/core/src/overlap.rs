//! Symmetrized overlap operator R(t) = [ρ(0)ρ_t + ρ_tρ(0)] / K.
//!
//! K is fixed once from the reference state by requiring tr R(0) = 1, so
//! K = 2 Tr ρ(0)². For a pure reference, tr R(t) is the Loschmidt echo.

use crate::dynamics::{evolve_delta_with, DeltaParams};
use crate::error::{Error, Result};
use crate::fock::{split_diagonal, DensityMatrix, Matrix, PureState, C64};
use crate::phase_space::{wigner, PhaseSpaceField, PhaseSpaceGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapOperator {
    pub entries: Matrix,
    pub k_norm: f64,
}

impl OverlapOperator {
    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn split(&self) -> (Matrix, Matrix) {
        split_overlap_operator(self)
    }
}

/// Dense construction from two density matrices.
pub fn overlap_operator(rho0: &DensityMatrix, rho_t: &DensityMatrix) -> Result<OverlapOperator> {
    if rho0.dim() != rho_t.dim() {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: rho_t.dim(),
        });
    }
    let k_norm = 2.0 * rho0.purity();
    let (a, b) = (rho0.matrix(), rho_t.matrix());
    let entries = (a * b + b * a).unscale(k_norm);
    Ok(OverlapOperator { entries, k_norm })
}

/// Rank-one shortcut for a pure reference: R = (|ψ⟩⟨φ| + |φ⟩⟨ψ|)/2 with φ = ρ_t ψ.
pub fn overlap_operator_pure(psi0: &PureState, rho_t: &DensityMatrix) -> Result<OverlapOperator> {
    if psi0.dim() != rho_t.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: rho_t.dim(),
        });
    }
    let psi = nalgebra::DVector::from_column_slice(psi0.amplitudes());
    let phi = rho_t.matrix() * &psi;
    let half = C64::new(0.5, 0.0);
    let entries = (&psi * phi.adjoint() + &phi * psi.adjoint()) * half;
    Ok(OverlapOperator { entries, k_norm: 2.0 })
}

/// (diagonal part, off-diagonal part); the diagonal part carries the trace.
pub fn split_overlap_operator(op: &OverlapOperator) -> (Matrix, Matrix) {
    split_diagonal(&op.entries)
}

/// Wigner fields of R(t) built with the interaction-picture state ρ_Δ(t).
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapFields {
    pub operator: OverlapOperator,
    pub total: PhaseSpaceField,
    pub diagonal: PhaseSpaceField,
    pub non_diagonal: PhaseSpaceField,
}

pub fn wigner_overlap_components(
    rho0: &DensityMatrix,
    delta: &DeltaParams,
    t: f64,
    grid: &PhaseSpaceGrid,
) -> Result<OverlapFields> {
    let rho_t = evolve_delta_with(rho0, delta, t)?;
    let operator = overlap_operator(rho0, &rho_t)?;
    overlap_fields(operator, grid)
}

/// Wigner fields of an already-formed overlap operator (e.g. one built from
/// the lab-frame ρ(t) instead of ρ_Δ(t)).
pub fn overlap_fields(operator: OverlapOperator, grid: &PhaseSpaceGrid) -> Result<OverlapFields> {
    let (d, nd) = operator.split();
    let total = wigner(&operator.entries, grid)?;
    let diagonal = wigner(&d, grid)?;
    let non_diagonal = wigner(&nd, grid)?;
    Ok(OverlapFields {
        operator,
        total,
        diagonal,
        non_diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_delta;
    use crate::echo::echo_pure;
    use crate::fock::{coherent_state, hermitian_deviation, random_pure_state};

    #[test]
    fn reference_time_normalization() {
        let psi = random_pure_state(8, 3);
        let rho = psi.to_density();
        let r = overlap_operator(&rho, &rho).unwrap();
        assert!((r.k_norm - 2.0).abs() < 1e-12);
        assert!((r.trace() - 1.0).abs() < 1e-12);
        let squared = rho.matrix() * rho.matrix();
        assert!((&r.entries - squared).iter().all(|x| x.norm() < 1e-12));

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let r = overlap_operator(&mixed, &mixed).unwrap();
        assert!((r.k_norm - 1.0).abs() < 1e-15);
        assert!((r.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_is_echo() {
        let psi = coherent_state(C64::new(2.0, 0.0), 40).unwrap();
        let rho = psi.to_density();
        for &t in &[0.4, 3.0, 15.7] {
            let rt = evolve_delta(&rho, 1.7, 1.0, 1.0, t).unwrap();
            let r = overlap_operator(&rho, &rt).unwrap();
            let echo = echo_pure(&psi, 1.7, 1.0, 1.0, t).unwrap();
            assert!((r.trace() - echo).abs() < 1e-12);
            assert!(hermitian_deviation(&r.entries) < 1e-12);
        }
    }

    #[test]
    fn rank_one_matches_dense() {
        let psi = random_pure_state(12, 9);
        let rho = psi.to_density();
        let rt = evolve_delta(&rho, 2.6, 1.0, 1.0, 1.9).unwrap();
        let dense = overlap_operator(&rho, &rt).unwrap();
        let fast = overlap_operator_pure(&psi, &rt).unwrap();
        assert!((&dense.entries - &fast.entries).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn split_parts() {
        let psi = random_pure_state(6, 1);
        let rho = psi.to_density();
        let rt = evolve_delta(&rho, 1.5, 1.0, 1.0, 0.8).unwrap();
        let r = overlap_operator(&rho, &rt).unwrap();
        let (d, nd) = r.split();
        assert_eq!(&d + &nd, r.entries);
        assert_eq!(nd.trace(), C64::new(0.0, 0.0));
        assert_eq!(d.trace(), r.entries.trace());

        let diag = OverlapOperator {
            entries: Matrix::from_diagonal(&nalgebra::DVector::from_element(3, C64::new(1.0 / 3.0, 0.0))),
            k_norm: 1.0,
        };
        let (d, nd) = split_overlap_operator(&diag);
        assert_eq!(d, diag.entries);
        assert!(nd.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(overlap_operator(&a, &b), Err(Error::DimensionMismatch { .. })));
        let psi = random_pure_state(3, 0);
        assert!(overlap_operator_pure(&psi, &a).is_err());
    }
}
