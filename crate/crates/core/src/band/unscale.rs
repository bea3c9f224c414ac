use super::scan::DispersionBranch;
use crate::error::{EdgeError, Result};
use serde::Serialize;

/// One branch sample in physical units for field strength B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnscaledSample {
    pub n: usize,
    pub b_field: f64,
    /// k = √B κ
    pub k: f64,
    /// E = B α
    pub energy: f64,
    /// v = √B |α'|
    pub speed: f64,
}

impl UnscaledSample {
    /// Back to (κ, α).
    pub fn rescale(&self) -> (f64, f64) {
        (self.k / self.b_field.sqrt(), self.energy / self.b_field)
    }
}

pub fn unscale(branch: &DispersionBranch, b_field: f64) -> Result<Vec<UnscaledSample>> {
    if !(b_field > 0.0) || !b_field.is_finite() {
        return Err(EdgeError::Domain(format!("B must be positive, got {b_field}")));
    }
    let rb = b_field.sqrt();
    Ok(branch
        .samples
        .iter()
        .map(|s| UnscaledSample {
            n: branch.n,
            b_field,
            k: rb * s.kappa,
            energy: b_field * s.alpha,
            speed: rb * s.alpha_prime_fh.abs(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::dispersion_scan;

    #[test]
    fn scaling_identities() {
        let br = dispersion_scan(0, -0.2, 0.2, 0.1).unwrap();
        let one = unscale(&br[0], 1.0).unwrap();
        for (u, s) in one.iter().zip(&br[0].samples) {
            assert_eq!((u.k, u.energy), (s.kappa, s.alpha));
        }
        let hundred = unscale(&br[0], 100.0).unwrap();
        let at0 = hundred.iter().find(|u| u.k.abs() < 1e-12).unwrap();
        assert!((at0.energy - 150.0).abs() < 1e-6);
        assert!((at0.speed - 11.28379).abs() < 1e-4);
        for (u, s) in unscale(&br[0], 7.0).unwrap().iter().zip(&br[0].samples) {
            let (k, a) = u.rescale();
            assert!((k - s.kappa).abs() < 1e-14 && (a - s.alpha).abs() < 1e-14);
        }
        assert!(matches!(unscale(&br[0], 0.0), Err(EdgeError::Domain(_))));
    }
}
