//! Dispersion branches of the half-line fiber operator.

pub mod conjecture;
pub mod fiber;
pub mod lemma;
pub mod scan;
pub mod tridiag;
pub mod unscale;

pub use conjecture::{conjecture_report, BranchCurvature, ConjectureReport};
pub use fiber::{
    berry_term, discrete_eigenpairs, fiber_matrix, group_velocity_fh, solve_fiber, EigenSolution, FiberGrid,
};
pub use lemma::{
    approach_exponent_fit, edge_velocity_at_zero, envelope_solutions, linear_fit, verify_lemma, LemmaRecord,
    LemmaReport, LemmaTolerances,
};
pub use scan::{
    dispersion_scan, dispersion_scan_with, group_velocity_fd, min_band_gap, BranchSample, DispersionBranch,
};
pub use unscale::{unscale, UnscaledSample};
