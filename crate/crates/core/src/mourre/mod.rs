//! Constants of the positive-commutator argument between Landau levels:
//! band gaps θ_n and δ_n, the velocity bounds ν_±(Δ) and ν(n, λ), the
//! admissible perturbation size, and the edge/bulk split of band spaces.

mod budget;
mod gap;
mod window;

pub use budget::{mourre_budget, threshold_conditions, MourreBudget, ThresholdCheck};
pub use gap::{compact_range, delta_n, theta};
pub use window::{nu_n_lambda, nu_window, Preimage, SpectralWindow};

use crate::band::{dispersion_scan, DispersionBranch};
use crate::error::{EdgeError, Result};
use serde::Serialize;

/// One of L_n = (n+½, n+3/2], L_n^λ = (n+½+λ, n+3/2] or
/// L_n^{λ,λ′} = (n+½+λ, n+3/2-λ′).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauBandWindow {
    pub n: usize,
    pub lambda: f64,
    pub lambda_prime: f64,
}

impl LandauBandWindow {
    pub fn new(n: usize, lambda: f64, lambda_prime: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda_prime >= 0.0 && lambda + lambda_prime < 1.0) {
            return Err(EdgeError::Domain(format!(
                "need λ, λ′ ≥ 0 and λ + λ′ < 1, got λ={lambda}, λ′={lambda_prime}"
            )));
        }
        Ok(LandauBandWindow {
            n,
            lambda,
            lambda_prime,
        })
    }

    pub fn full(n: usize) -> Self {
        LandauBandWindow {
            n,
            lambda: 0.0,
            lambda_prime: 0.0,
        }
    }

    pub fn lower(&self) -> f64 {
        self.n as f64 + 0.5 + self.lambda
    }

    pub fn upper(&self) -> f64 {
        self.n as f64 + 1.5 - self.lambda_prime
    }

    /// The upper end is included only when λ′ = 0.
    pub fn contains(&self, alpha: f64) -> bool {
        alpha > self.lower() && (alpha < self.upper() || (self.lambda_prime == 0.0 && alpha == self.upper()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceKind {
    Edge,
    Bulk,
}

/// Band space ℋ_{n,e}(σ, γ) ≅ L²((-∞, σB^γ]) or its bulk complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubspaceClass {
    pub n: usize,
    pub gamma: f64,
    pub sigma_e: f64,
    pub b_field: f64,
    pub kind: SubspaceKind,
    /// σ_e B^γ in the unscaled momentum k
    pub k_threshold: f64,
    /// σ_e B^{γ-½} in the scaled momentum κ = k / √B
    pub kappa_threshold: f64,
}

/// Edge for γ ≤ ½, bulk otherwise. All of σ_e, γ, B must be positive.
pub fn classify_subspace(n: usize, sigma_e: f64, gamma: f64, b_field: f64) -> SubspaceClass {
    assert!(
        sigma_e > 0.0 && gamma > 0.0 && b_field > 0.0,
        "σ_e, γ and B must be positive (got {sigma_e}, {gamma}, {b_field})"
    );
    SubspaceClass {
        n,
        gamma,
        sigma_e,
        b_field,
        kind: if gamma <= 0.5 {
            SubspaceKind::Edge
        } else {
            SubspaceKind::Bulk
        },
        k_threshold: sigma_e * b_field.powf(gamma),
        kappa_threshold: sigma_e * b_field.powf(gamma - 0.5),
    }
}

/// Branches 0..=n over [min(κ_n - 1, -4.5), max(κ′_n + 1, 8)], wide enough
/// for δ_n, every window inside L_n and the edge/bulk bounds.
pub fn band_scan(n: usize, spacing: f64) -> Result<Vec<DispersionBranch>> {
    let (lo, hi) = compact_range(n)?;
    dispersion_scan(n, (lo - 1.0).min(-4.5), (hi + 1.0).max(8.0), spacing)
}

pub(crate) fn branch(branches: &[DispersionBranch], n: usize) -> Result<&DispersionBranch> {
    branches
        .iter()
        .find(|b| b.n == n)
        .ok_or_else(|| EdgeError::Coverage(format!("branch {n} is missing")))
}

/// α_{n′} ∈ L_n. A branch at or above n sits above n+½ by construction, so
/// only its upper end is tested; this keeps the answer right after α has
/// rounded onto its Landau level.
pub(crate) fn in_band(n: usize, n_prime: usize, alpha: f64) -> bool {
    let upper = n as f64 + 1.5;
    let above = n_prime >= n || alpha > n as f64 + 0.5;
    above && alpha <= upper
}

/// κ in [lo, hi] where the interpolated, decreasing α crosses `level`,
/// given α(lo) ≥ level ≥ α(hi).
pub(crate) fn crossing(branch: &DispersionBranch, mut lo: f64, mut hi: f64, level: f64) -> Result<f64> {
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if branch.alpha_at(mid)? >= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Crossing of α_n = level located over the whole branch, or None if the
/// branch stays on one side of it.
pub(crate) fn locate_crossing(branch: &DispersionBranch, level: f64) -> Result<Option<f64>> {
    let s = &branch.samples;
    for w in s.windows(2) {
        if w[0].alpha >= level && w[1].alpha < level {
            return crossing(branch, w[0].kappa, w[1].kappa, level).map(Some);
        }
    }
    Ok(None)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_endpoints() {
        let w = LandauBandWindow::new(1, 0.2, 0.3).unwrap();
        assert_eq!((w.lower(), w.upper()), (1.7, 2.2));
        assert!(w.contains(2.0) && !w.contains(2.2) && !w.contains(1.7));
        let full = LandauBandWindow::full(0);
        assert!(full.contains(1.5) && !full.contains(0.5));
        assert!(LandauBandWindow::new(0, 0.6, 0.4).is_err());
        assert!(LandauBandWindow::new(0, -0.1, 0.4).is_err());
    }

    #[test]
    fn subspace_classification() {
        let c = classify_subspace(0, 1.0, 0.5, 100.0);
        assert_eq!(c.kind, SubspaceKind::Edge);
        assert!((c.kappa_threshold - 1.0).abs() < 1e-15);
        assert!((c.k_threshold - 10.0).abs() < 1e-12);
        let c = classify_subspace(0, 1.0, 0.6, 100.0);
        assert_eq!(c.kind, SubspaceKind::Bulk);
        assert!((c.kappa_threshold - 100f64.powf(0.1)).abs() < 1e-12);
        assert!((c.kappa_threshold - 1.585).abs() < 1e-3);
        assert_eq!(classify_subspace(2, 0.3, 0.4, 9.0).kind, SubspaceKind::Edge);
    }

    #[test]
    fn membership_survives_rounding_onto_the_level() {
        assert!(in_band(0, 0, 0.5));
        assert!(!in_band(1, 0, 1.5));
        assert!(in_band(1, 0, 1.5000001));
        assert!(!in_band(1, 2, 2.6));
    }
}
