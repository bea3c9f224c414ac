//! The fiber operator -½ d²/dx² + ½(x - κ)² on (0, x_max) with Dirichlet
//! conditions, discretized by three-point finite differences.

use super::tridiag::SymTridiag;
use crate::error::{EdgeError, Result};

/// Largest band index the solver accepts.
pub const MAX_BAND: usize = 12;
/// Truncation margin beyond max(κ, 0).
pub const WALL_MARGIN: f64 = 12.0;
/// Base grid spacing of the default grid.
pub const DEFAULT_SPACING: f64 = 0.005;
/// Allowed disagreement between the two Richardson estimates.
pub const EXTRAPOLATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberGrid {
    pub x_max: f64,
    /// Number of intervals; always even so the grid can be coarsened once.
    pub num_points: usize,
}

impl FiberGrid {
    pub fn new(x_max: f64, num_points: usize) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(EdgeError::Domain(format!("x_max must be positive, got {x_max}")));
        }
        if num_points < 100 {
            return Err(EdgeError::Domain(format!(
                "num_points must be at least 100, got {num_points}"
            )));
        }
        Ok(FiberGrid {
            x_max,
            num_points: num_points + num_points % 2,
        })
    }

    /// x_max = max(κ, 0) + 12 at the default spacing.
    pub fn for_kappa(kappa: f64) -> Self {
        Self::with_spacing(kappa, DEFAULT_SPACING)
    }

    pub fn with_spacing(kappa: f64, h: f64) -> Self {
        let x_max = kappa.max(0.0) + WALL_MARGIN;
        let n = ((x_max / h).ceil() as usize).max(100);
        FiberGrid {
            x_max,
            num_points: n + n % 2,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.x_max / self.num_points as f64
    }

    pub fn refined(&self, factor: usize) -> Self {
        FiberGrid {
            x_max: self.x_max,
            num_points: self.num_points * factor,
        }
    }

    pub fn covers(&self, kappa: f64) -> bool {
        self.x_max >= kappa.max(0.0) + WALL_MARGIN - 1e-12
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_max * j as f64 / self.num_points as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub kappa: f64,
    pub n: usize,
    /// Richardson-extrapolated eigenvalue.
    pub alpha: f64,
    /// Eigenvalue of the finest discretization.
    pub grid_alpha: f64,
    /// Finest grid the eigenfunction lives on.
    pub grid: FiberGrid,
    /// φ at x_j = j·h for j = 0..=num_points, endpoints exactly zero.
    pub values: Vec<f64>,
    /// Extrapolated φ'(0), positive in the chosen gauge.
    pub boundary_derivative: f64,
    /// Extrapolated ∫(x - κ)φ² dx.
    pub x_moment: f64,
    /// ‖Tφ - α_grid φ‖ / ‖φ‖ on the interior.
    pub norm_residual: f64,
}

impl EigenSolution {
    pub fn norm(&self) -> f64 {
        let h = self.grid.spacing();
        h * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// Inner product with another solution on the same grid.
    pub fn overlap(&self, other: &EigenSolution) -> f64 {
        assert_eq!(self.grid, other.grid);
        let h = self.grid.spacing();
        h * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    /// φ at an arbitrary x by cubic interpolation on the grid; zero outside.
    pub fn value_at(&self, x: f64) -> f64 {
        let h = self.grid.spacing();
        if x <= 0.0 || x >= self.grid.x_max {
            return 0.0;
        }
        let n = self.grid.num_points;
        let t = x / h;
        let j = (t.floor() as usize).clamp(1, n - 2);
        let s = t - j as f64;
        let (p0, p1, p2, p3) = (
            self.values[j - 1],
            self.values[j],
            self.values[j + 1],
            self.values[j + 2],
        );
        // Lagrange through j-1..j+2
        let w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        p0 * w0 + p1 * w1 + p2 * w2 + p3 * w3
    }
}

/// Interior finite-difference matrix for num_points intervals.
pub fn fiber_matrix(kappa: f64, x_max: f64, num_points: usize) -> SymTridiag {
    let h = x_max / num_points as f64;
    let m = num_points - 1;
    let kin = 1.0 / (h * h);
    let diag = (1..=m)
        .map(|j| {
            let x = x_max * j as f64 / num_points as f64;
            kin + 0.5 * (x - kappa) * (x - kappa)
        })
        .collect();
    SymTridiag::new(diag, vec![-0.5 * kin; m - 1])
}

/// Lowest n_max + 1 eigenpairs of the discretization itself (no
/// extrapolation), eigenvectors including the zero endpoints, normalized
/// to h·Σφ² = 1 and gauged so φ_1 > 0.
pub fn discrete_eigenpairs(kappa: f64, x_max: f64, num_points: usize, n_max: usize) -> Vec<(f64, Vec<f64>)> {
    let t = fiber_matrix(kappa, x_max, num_points);
    let h = x_max / num_points as f64;
    (0..=n_max)
        .map(|k| {
            let lam = t.eigenvalue(k);
            let v = t.eigenvector(lam);
            let norm = (h * v.iter().map(|a| a * a).sum::<f64>()).sqrt();
            let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
            let mut full = Vec::with_capacity(num_points + 1);
            full.push(0.0);
            full.extend(v.iter().map(|a| sign * a / norm));
            full.push(0.0);
            (lam, full)
        })
        .collect()
}

struct GridResult {
    alpha: f64,
    derivative: f64,
    moment: f64,
    values: Vec<f64>,
    residual: f64,
}

fn solve_on(kappa: f64, x_max: f64, num_points: usize, n_max: usize, keep: bool) -> Vec<GridResult> {
    let t = fiber_matrix(kappa, x_max, num_points);
    let h = x_max / num_points as f64;
    let mut scratch = vec![0.0; num_points - 1];
    discrete_eigenpairs(kappa, x_max, num_points, n_max)
        .into_iter()
        .map(|(lam, phi)| {
            let derivative = (48.0 * phi[1] - 36.0 * phi[2] + 16.0 * phi[3] - 3.0 * phi[4]) / (12.0 * h);
            let moment = h * phi
                .iter()
                .enumerate()
                .map(|(j, p)| (x_max * j as f64 / num_points as f64 - kappa) * p * p)
                .sum::<f64>();
            let interior = &phi[1..num_points];
            t.apply(interior, &mut scratch);
            let r = scratch
                .iter()
                .zip(interior)
                .map(|(a, b)| (a - lam * b).powi(2))
                .sum::<f64>()
                .sqrt();
            let nrm = interior.iter().map(|a| a * a).sum::<f64>().sqrt();
            GridResult {
                alpha: lam,
                derivative,
                moment,
                values: if keep { phi } else { Vec::new() },
                residual: r / nrm,
            }
        })
        .collect()
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Lowest n_max + 1 eigenpairs of H̃(κ), each Richardson-extrapolated from
/// spacings h and h/2, with a third spacing 2h used to check that the
/// extrapolation has converged.
pub fn solve_fiber(kappa: f64, n_max: usize, grid: &FiberGrid) -> Result<Vec<EigenSolution>> {
    if !kappa.is_finite() {
        return Err(EdgeError::Domain(format!("κ must be finite, got {kappa}")));
    }
    if n_max > MAX_BAND {
        return Err(EdgeError::Domain(format!("n_max ≤ {MAX_BAND} required, got {n_max}")));
    }
    if !grid.covers(kappa) {
        return Err(EdgeError::Domain(format!(
            "x_max = {} too short for κ = {kappa}; need ≥ {}",
            grid.x_max,
            kappa.max(0.0) + WALL_MARGIN
        )));
    }
    let n = grid.num_points;
    let coarse = solve_on(kappa, grid.x_max, n / 2, n_max, false);
    let base = solve_on(kappa, grid.x_max, n, n_max, false);
    let fine = solve_on(kappa, grid.x_max, 2 * n, n_max, true);
    let fine_grid = grid.refined(2);

    let mut out = Vec::with_capacity(n_max + 1);
    for (k, ((c, b), f)) in coarse.iter().zip(&base).zip(fine).enumerate() {
        let r1 = richardson(c.alpha, b.alpha);
        let r2 = richardson(b.alpha, f.alpha);
        let gap = (r1 - r2).abs();
        if gap > EXTRAPOLATION_TOL {
            let factor = (2.0 * gap / EXTRAPOLATION_TOL).powf(0.25);
            let suggested = ((n as f64 * factor).ceil() as usize).next_multiple_of(2);
            return Err(EdgeError::Accuracy {
                message: format!("band {k} at κ={kappa}: extrapolated eigenvalues differ by {gap:e}"),
                suggested_points: suggested,
            });
        }
        out.push(EigenSolution {
            kappa,
            n: k,
            alpha: r2,
            grid_alpha: f.alpha,
            grid: fine_grid,
            values: f.values,
            boundary_derivative: richardson(b.derivative, f.derivative),
            x_moment: richardson(b.moment, f.moment),
            norm_residual: f.residual,
        });
    }
    Ok(out)
}

/// α'_n(κ) = -½ φ'_n(0, κ)².
pub fn group_velocity_fh(sol: &EigenSolution) -> f64 {
    -0.5 * sol.boundary_derivative * sol.boundary_derivative
}

/// ∫ φ_n ∂_κ φ_n dx by central differences in κ on a common grid. Vanishes
/// for real normalized eigenfunctions.
pub fn berry_term(kappa: f64, n: usize, dk: f64, grid: &FiberGrid) -> f64 {
    let at = |k: f64| discrete_eigenpairs(k, grid.x_max, grid.num_points, n).pop().unwrap().1;
    let mid = at(kappa);
    let up = at(kappa + dk);
    let down = at(kappa - dk);
    let h = grid.spacing();
    h * mid
        .iter()
        .zip(up.iter().zip(&down))
        .map(|(m, (u, d))| m * (u - d) / (2.0 * dk))
        .sum::<f64>()
}
