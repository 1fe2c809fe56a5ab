//! Numerical engine for the gamma oscillator H = ℏωN + λℏ^{2γ}(N² + ε)^γ.
//!
//! - [`fock`]: truncated Fock-basis states and density matrices
//! - [`dynamics`]: spectrum and exact phase evolution
//! - [`echo`]: Loschmidt echo, its time statistics and long-time oracles
//! - [`phase_space`]: Wigner and Husimi fields, roughness
//! - [`overlap`]: the symmetrized overlap operator and its Wigner components

pub mod dynamics;
pub mod echo;
pub mod error;
pub mod fock;
mod math;
pub mod overlap;
pub mod phase_space;

pub use dynamics::{
    delta_phases, evolve, evolve_delta, evolve_delta_with, fundamental_period, spectrum, DeltaParams,
    GammaParams, PhaseSpectrum,
};
pub use echo::{
    asymptotic_mean_oracle, echo_general, echo_pure, echo_series, echo_series_with, fit_saturation,
    sampled_period_stats, EchoModel, EchoSeries, SaturationPoint, WindowStats,
};
pub use error::{Error, Result};
pub use fock::{
    cat_state, coherent_state, fock_state, phase_state, random_pure_state, split_diagonal, to_density,
    CatSign, DensityMatrix, Matrix, NumberStats, PureState, C64,
};
pub use overlap::{
    overlap_operator, overlap_operator_pure, split_overlap_operator, wigner_overlap_components,
    OverlapFields, OverlapOperator,
};
pub use phase_space::{grid_auto, husimi, pi_mn, roughness, wigner, PhaseSpaceField, PhaseSpaceGrid};
