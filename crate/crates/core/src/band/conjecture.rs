//! Unproven shape properties of the branches, measured and reported but
//! never asserted: convexity of each α_n and a band gap above one.

use super::scan::{min_band_gap, DispersionBranch};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchCurvature {
    pub n: usize,
    /// min (α_{i+1} - 2α_i + α_{i-1}) / s²
    pub min_second_difference: f64,
    pub kappa_at_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub curvature: Vec<BranchCurvature>,
    pub min_gap: Option<f64>,
    /// min (α_{n+1} - α_n - 1), resolved through the excesses
    pub min_gap_excess: Option<f64>,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub convex_on_samples: bool,
    pub gap_exceeds_one: bool,
}

pub fn conjecture_report(branches: &[DispersionBranch]) -> ConjectureReport {
    let curvature: Vec<BranchCurvature> = branches
        .iter()
        .filter_map(|b| {
            let s2 = b.spacing * b.spacing;
            b.samples
                .windows(3)
                .map(|w| ((w[2].excess - 2.0 * w[1].excess + w[0].excess) / s2, w[1].kappa))
                .reduce(|a, c| if c.0 < a.0 { c } else { a })
                .map(|(d, k)| BranchCurvature {
                    n: b.n,
                    min_second_difference: d,
                    kappa_at_min: k,
                })
        })
        .collect();
    let min_gap = min_band_gap(branches);
    let min_gap_excess = branches
        .windows(2)
        .flat_map(|w| w[0].samples.iter().zip(&w[1].samples).map(|(a, b)| b.excess - a.excess))
        .reduce(f64::min);
    ConjectureReport {
        convex_on_samples: curvature.iter().all(|c| c.min_second_difference >= 0.0),
        gap_exceeds_one: min_gap_excess.is_some_and(|g| g > 0.0),
        curvature,
        min_gap,
        min_gap_excess,
        kappa_min: branches.first().map_or(f64::NAN, |b| b.kappa_min),
        kappa_max: branches.first().map_or(f64::NAN, |b| b.kappa_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::dispersion_scan;

    #[test]
    fn figure_range_report() {
        let br = dispersion_scan(3, -2.0, 5.0, 0.05).unwrap();
        let r = conjecture_report(&br);
        assert_eq!(r.curvature.len(), 4);
        for (c, b) in r.curvature.iter().zip(&br) {
            assert_eq!(Some(c.min_second_difference), b.min_second_difference());
        }
        let g = r.min_gap.unwrap();
        assert!(g > 0.0);
        assert_eq!(r.gap_exceeds_one, r.min_gap_excess.unwrap() > 0.0);
        assert!((1.0 + r.min_gap_excess.unwrap() - g).abs() < 1e-12);
    }

    #[test]
    fn single_column_has_no_curvature() {
        let br = dispersion_scan(1, 0.0, 0.0, 1.0).unwrap();
        let r = conjecture_report(&br);
        assert!(r.curvature.is_empty());
        assert!((r.min_gap.unwrap() - 2.0).abs() < 1e-8);
    }
}
