use super::fiber::{group_velocity_fh, solve_fiber, FiberGrid, DEFAULT_SPACING};
use crate::error::{EdgeError, Result};
use crate::specfun::{quantization_excess, quantization_excess_slope};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSample {
    pub kappa: f64,
    pub alpha: f64,
    /// α - (n + 1/2) with full relative precision
    pub excess: f64,
    /// -½ φ'(0)²
    pub alpha_prime_fh: f64,
    /// five-point central difference of α over neighbouring samples
    pub alpha_prime_fd: f64,
    pub phi_prime_0: f64,
    /// ∫(x - κ)φ² dx, which equals -α'
    pub x_moment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionBranch {
    pub n: usize,
    pub samples: Vec<BranchSample>,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub spacing: f64,
    /// base spacing of the fiber grids used
    pub fiber_spacing: f64,
}

impl DispersionBranch {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn covers(&self, kappa: f64) -> bool {
        kappa >= self.kappa_min - 1e-12 && kappa <= self.kappa_max + 1e-12
    }

    fn locate(&self, kappa: f64) -> Result<(usize, f64)> {
        if !self.covers(kappa) {
            return Err(EdgeError::Coverage(format!(
                "κ={kappa} outside branch {} range [{}, {}]",
                self.n, self.kappa_min, self.kappa_max
            )));
        }
        if self.samples.len() == 1 {
            return Ok((0, 0.0));
        }
        let t = ((kappa - self.kappa_min) / self.spacing).clamp(0.0, (self.samples.len() - 1) as f64);
        let i = (t.floor() as usize).min(self.samples.len() - 2);
        Ok((i, t - i as f64))
    }

    /// (α, α') at κ by cubic Hermite interpolation of the samples, using
    /// the boundary-formula derivative.
    pub fn interpolate(&self, kappa: f64) -> Result<(f64, f64)> {
        let (i, s) = self.locate(kappa)?;
        if self.samples.len() == 1 {
            let p = self.samples[0];
            return Ok((p.alpha, p.alpha_prime_fh));
        }
        let (a, b) = (self.samples[i], self.samples[i + 1]);
        let h = b.kappa - a.kappa;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let alpha = h00 * a.alpha + h10 * h * a.alpha_prime_fh + h01 * b.alpha + h11 * h * b.alpha_prime_fh;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let deriv = (d00 * a.alpha + d01 * b.alpha) / h + d10 * a.alpha_prime_fh + d11 * b.alpha_prime_fh;
        Ok((alpha, deriv))
    }

    pub fn alpha_at(&self, kappa: f64) -> Result<f64> {
        Ok(self.interpolate(kappa)?.0)
    }

    pub fn velocity_at(&self, kappa: f64) -> Result<f64> {
        Ok(self.interpolate(kappa)?.1)
    }

    /// α′ at κ, taken from the excess where the interpolated α sits within
    /// [`RESOLVED_EXCESS`] of its level and the boundary formula has lost
    /// its relative accuracy.
    pub fn velocity_resolved(&self, kappa: f64) -> Result<f64> {
        let (alpha, deriv) = self.interpolate(kappa)?;
        if kappa > 0.0 && alpha - (self.n as f64 + 0.5) < RESOLVED_EXCESS {
            return quantization_excess_slope(self.n, kappa);
        }
        Ok(deriv)
    }

    /// Smallest second difference (α_{i+1} - 2α_i + α_{i-1}) / s², taken on
    /// the excess so it stays resolved where α has rounded to n + 1/2.
    pub fn min_second_difference(&self) -> Option<f64> {
        self.samples
            .windows(3)
            .map(|w| (w[2].excess - 2.0 * w[1].excess + w[0].excess) / (self.spacing * self.spacing))
            .reduce(f64::min)
    }

    /// Judged on the excess, which stays representable after α itself has
    /// rounded to n + 1/2.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].excess < w[0].excess)
    }
}

/// Below this the finite-difference excess α - n - 1/2 is replaced by the
/// quantization-condition value.
pub const RESOLVED_EXCESS: f64 = 1e-6;

fn refine_excess(n: usize, kappa: f64, alpha: f64) -> Result<(f64, f64)> {
    let level = n as f64 + 0.5;
    let fd = alpha - level;
    if fd >= RESOLVED_EXCESS || kappa <= 0.0 {
        return Ok((alpha, fd));
    }
    let e = quantization_excess(n, kappa)?;
    Ok((level + e, e))
}

/// Central difference of α at κ over neighbouring samples, linearly
/// interpolated between sample points. κ must lie strictly inside.
pub fn group_velocity_fd(branch: &DispersionBranch, kappa: f64) -> Result<f64> {
    let m = branch.samples.len();
    let tol = 1e-9 * branch.spacing.max(1e-300);
    if m < 3 || kappa <= branch.kappa_min + tol || kappa >= branch.kappa_max - tol {
        return Err(EdgeError::Range(format!(
            "κ={kappa} not strictly inside branch range [{}, {}]",
            branch.kappa_min, branch.kappa_max
        )));
    }
    let fd = |i: usize| {
        let (a, b) = (branch.samples[i - 1], branch.samples[i + 1]);
        (b.alpha - a.alpha) / (b.kappa - a.kappa)
    };
    let t = (kappa - branch.kappa_min) / branch.spacing;
    let j = t.round();
    if (t - j).abs() < 1e-9 {
        return Ok(fd(j as usize));
    }
    let i = t.floor() as usize;
    let s = t - i as f64;
    let lo = if i == 0 { None } else { Some(fd(i)) };
    let hi = if i + 1 >= m - 1 { None } else { Some(fd(i + 1)) };
    match (lo, hi) {
        (Some(a), Some(b)) => Ok(a + s * (b - a)),
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => unreachable!(),
    }
}

fn kappa_grid(kappa_min: f64, kappa_max: f64, spacing: f64) -> Result<(Vec<f64>, f64)> {
    if !(kappa_min <= kappa_max) || !kappa_min.is_finite() || !kappa_max.is_finite() {
        return Err(EdgeError::Domain(format!(
            "need κ_min ≤ κ_max, got [{kappa_min}, {kappa_max}]"
        )));
    }
    if !(spacing > 0.0) {
        return Err(EdgeError::Domain(format!("spacing must be positive, got {spacing}")));
    }
    if kappa_min == kappa_max {
        return Ok((vec![kappa_min], spacing));
    }
    if spacing > 0.1 {
        return Err(EdgeError::Domain(format!("spacing must be ≤ 0.1, got {spacing}")));
    }
    let m = ((kappa_max - kappa_min) / spacing).round().max(1.0) as usize;
    let s = (kappa_max - kappa_min) / m as f64;
    Ok((
        (0..=m)
            .map(|i| if i == m { kappa_max } else { kappa_min + s * i as f64 })
            .collect(),
        s,
    ))
}

/// Branches 0..=n_max on a uniform κ grid, solved in parallel over κ with
/// the default fiber spacing.
pub fn dispersion_scan(n_max: usize, kappa_min: f64, kappa_max: f64, spacing: f64) -> Result<Vec<DispersionBranch>> {
    dispersion_scan_with(n_max, kappa_min, kappa_max, spacing, DEFAULT_SPACING)
}

pub fn dispersion_scan_with(
    n_max: usize,
    kappa_min: f64,
    kappa_max: f64,
    spacing: f64,
    fiber_spacing: f64,
) -> Result<Vec<DispersionBranch>> {
    let (grid, s) = kappa_grid(kappa_min, kappa_max, spacing)?;
    // two padding samples at each end give central differences everywhere
    let mut padded = Vec::with_capacity(grid.len() + 4);
    padded.push(kappa_min - 2.0 * s);
    padded.push(kappa_min - s);
    padded.extend_from_slice(&grid);
    padded.push(kappa_max + s);
    padded.push(kappa_max + 2.0 * s);

    let solved: Vec<Vec<(f64, f64, f64, f64)>> = padded
        .par_iter()
        .map(|&k| {
            let sols = solve_fiber(k, n_max, &FiberGrid::with_spacing(k, fiber_spacing))?;
            Ok(sols
                .iter()
                .map(|e| (e.alpha, group_velocity_fh(e), e.boundary_derivative, e.x_moment))
                .collect())
        })
        .collect::<Result<_>>()?;

    let branches = (0..=n_max)
        .map(|n| {
            let samples = (2..padded.len() - 2)
                .map(|i| {
                    let (alpha, fh, dphi, moment) = solved[i][n];
                    let a = |j: usize| solved[j][n].0;
                    let fd = (a(i - 2) - 8.0 * a(i - 1) + 8.0 * a(i + 1) - a(i + 2)) / (12.0 * s);
                    let (alpha, excess) = refine_excess(n, padded[i], alpha)?;
                    Ok(BranchSample {
                        kappa: padded[i],
                        alpha,
                        excess,
                        alpha_prime_fh: fh,
                        alpha_prime_fd: fd,
                        phi_prime_0: dphi,
                        x_moment: moment,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(DispersionBranch {
                n,
                samples,
                kappa_min,
                kappa_max,
                spacing: s,
                fiber_spacing,
            })
        })
        .collect::<Result<_>>()?;
    Ok(branches)
}

/// Smallest α_{n+1} - α_n = 1 + (excess difference) over all shared samples
/// of consecutive branches.
pub fn min_band_gap(branches: &[DispersionBranch]) -> Option<f64> {
    branches
        .windows(2)
        .flat_map(|w| {
            w[0].samples
                .iter()
                .zip(&w[1].samples)
                .map(|(a, b)| 1.0 + (b.excess - a.excess))
        })
        .reduce(f64::min)
}
