//! The perturbed half-plane system H̃ = H̃₀ + W̃ on a truncated grid:
//! random bump impurities, split-step evolution, energy filtering, and the
//! edge transport experiment.

mod grid;
mod impurity;
mod propagate;
mod state;
mod transport;

pub use grid::SimGrid;
pub use impurity::{generate_impurity, ImpurityField, ImpurityParams};
pub use propagate::{
    energy_filter, evolve, FilterReport, Hamiltonian, Propagator, DEFAULT_DT, FILTER_EMPTY, FILTER_RESIDUAL,
    NORM_DRIFT_PER_STEP,
};
pub use state::{commutator_expectation, embed_packet, velocity_from_modes, FieldState, RowFft};
pub use transport::{
    transport_experiment, Amplitude, TransportConfig, TransportReport, TransportSample, COMMUTATOR_TOL, EHRENFEST_TOL,
    SEAM_CELLS, SEAM_LIMIT,
};

#[cfg(test)]
mod tests;
