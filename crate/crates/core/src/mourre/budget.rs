use super::{delta_n, nu_n_lambda};
use crate::band::DispersionBranch;
use crate::error::{EdgeError, Result};
use serde::Serialize;

/// Constants of the commutator estimate on L_n^{λ,λ′}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MourreBudget {
    pub n: usize,
    pub lambda: f64,
    pub lambda_prime: f64,
    /// min(λ, λ′, δ_n) / 4
    pub sigma: f64,
    pub delta_n: f64,
    /// ν(n, λ/2)
    pub nu: f64,
    /// min(σν²/(2⁹(n+2)), σ/4, ½)
    pub delta_admissible: f64,
    /// ν/2
    pub commutator_lower_bound: f64,
}

impl MourreBudget {
    /// 1 - ((ε+A)²/σ² + 4√(n+2) √(ε+A) / (√σ ν)) for a spectral half-width
    /// ε and perturbation size A.
    pub fn bracket(&self, eps: f64, a: f64) -> f64 {
        let s = eps + a;
        let n2 = self.n as f64 + 2.0;
        1.0 - (s * s / (self.sigma * self.sigma) + 4.0 * n2.sqrt() * s.sqrt() / (self.sigma.sqrt() * self.nu))
    }

    /// ν · bracket(ε, A), the lower bound on P(Δ) i[Y, H] P(Δ).
    pub fn commutator_bound(&self, eps: f64, a: f64) -> f64 {
        self.nu * self.bracket(eps, a)
    }

    pub fn admits(&self, amplitude: f64) -> bool {
        amplitude.abs() < self.delta_admissible
    }
}

pub fn mourre_budget(n: usize, lambda: f64, lambda_prime: f64, branches: &[DispersionBranch]) -> Result<MourreBudget> {
    if !(lambda > 0.0 && lambda_prime > 0.0 && lambda + lambda_prime < 1.0) {
        return Err(EdgeError::Domain(format!(
            "need λ, λ′ > 0 and λ + λ′ < 1, got λ={lambda}, λ′={lambda_prime}"
        )));
    }
    let dn = delta_n(n, branches)?;
    let sigma = lambda.min(lambda_prime).min(dn) / 4.0;
    let nu = nu_n_lambda(n, lambda / 2.0, branches)?;
    let delta_admissible = (sigma * nu * nu / (512.0 * (n as f64 + 2.0))).min(sigma / 4.0).min(0.5);
    Ok(MourreBudget {
        n,
        lambda,
        lambda_prime,
        sigma,
        delta_n: dn,
        nu,
        delta_admissible,
        commutator_lower_bound: nu / 2.0,
    })
}

/// The two inequalities that, for ‖W̃‖ < δ < ½, give absolutely
/// continuous spectrum on L_n^{λ_n, λ′_n}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdCheck {
    pub n: usize,
    pub delta: f64,
    pub lambda_n: f64,
    pub lambda_n_prime: f64,
    pub delta_n: f64,
    /// min(λ_n, δ_n) ν(n, λ_n/2)²
    pub lower_side: f64,
    /// min(λ′_n, δ_n) ν(n, ¼)²
    pub upper_side: f64,
    /// 2⁹(n+2)δ
    pub threshold: f64,
    /// largest δ for which both inequalities hold
    pub delta_bound: f64,
    pub holds: bool,
}

pub fn threshold_conditions(
    n: usize,
    delta: f64,
    lambda_n: f64,
    lambda_n_prime: f64,
    branches: &[DispersionBranch],
) -> Result<ThresholdCheck> {
    let open_half = |x: f64| x > 0.0 && x < 0.5;
    if !open_half(lambda_n) || !open_half(lambda_n_prime) {
        return Err(EdgeError::Domain(format!(
            "λ_n, λ′_n must lie in (0, ½), got {lambda_n}, {lambda_n_prime}"
        )));
    }
    if !(delta > 0.0) {
        return Err(EdgeError::Domain(format!("δ must be positive, got {delta}")));
    }
    let dn = delta_n(n, branches)?;
    let lower_side = lambda_n.min(dn) * nu_n_lambda(n, lambda_n / 2.0, branches)?.powi(2);
    let upper_side = lambda_n_prime.min(dn) * nu_n_lambda(n, 0.25, branches)?.powi(2);
    let scale = 512.0 * (n as f64 + 2.0);
    let threshold = scale * delta;
    Ok(ThresholdCheck {
        n,
        delta,
        lambda_n,
        lambda_n_prime,
        delta_n: dn,
        lower_side,
        upper_side,
        threshold,
        delta_bound: (lower_side.min(upper_side) / scale).min(0.5),
        holds: delta < 0.5 && lower_side > threshold && upper_side > threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mourre::fixture::branches;

    #[test]
    fn ground_band_budget() {
        let b = mourre_budget(0, 0.2, 0.2, branches()).unwrap();
        assert_eq!(b.delta_n, 1.0);
        assert!((b.sigma - 0.05).abs() < 1e-15);
        let want = (0.05 * b.nu * b.nu / 1024.0).min(0.0125);
        assert_eq!(b.delta_admissible, want);
        assert_eq!(b.commutator_lower_bound, b.nu / 2.0);
        assert!(b.nu > 0.0 && b.delta_admissible <= 0.5);
    }

    #[test]
    fn bracket_limits() {
        let b = mourre_budget(1, 0.3, 0.2, branches()).unwrap();
        assert_eq!(b.bracket(0.0, 0.0), 1.0);
        assert_eq!(b.commutator_bound(0.0, 0.0), b.nu);
        let d = b.delta_admissible;
        assert!(b.bracket(d, d) >= 0.5);
        assert!(b.commutator_bound(d, d) >= b.commutator_lower_bound);
        assert!(b.bracket(b.sigma, b.sigma) < 0.5);
    }

    #[test]
    fn admissible_size_grows_with_the_margins() {
        let br = branches();
        let grid = [0.1, 0.2, 0.3, 0.4];
        for &l in &grid {
            let mut prev = 0.0;
            for &lp in &grid {
                let d = mourre_budget(0, l, lp, br).unwrap().delta_admissible;
                assert!(d >= prev);
                prev = d;
            }
        }
        for &lp in &grid {
            let mut prev = 0.0;
            for &l in &grid {
                let d = mourre_budget(0, l, lp, br).unwrap().delta_admissible;
                assert!(d >= prev);
                prev = d;
            }
        }
    }

    #[test]
    fn domain_violations() {
        let br = branches();
        assert!(matches!(mourre_budget(0, 0.0, 0.2, br), Err(EdgeError::Domain(_))));
        assert!(matches!(mourre_budget(0, 0.6, 0.4, br), Err(EdgeError::Domain(_))));
        assert!(threshold_conditions(0, 1e-3, 0.5, 0.2, br).is_err());
    }

    #[test]
    fn threshold_conditions_switch_at_the_bound() {
        let br = branches();
        let c = threshold_conditions(0, 1e-9, 0.3, 0.3, br).unwrap();
        assert!(c.holds);
        let just_over = threshold_conditions(0, c.delta_bound * 1.01, 0.3, 0.3, br).unwrap();
        assert!(!just_over.holds);
        let just_under = threshold_conditions(0, c.delta_bound * 0.99, 0.3, 0.3, br).unwrap();
        assert!(just_under.holds);
    }
}
