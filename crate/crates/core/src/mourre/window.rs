use super::{branch, locate_crossing};
use crate::band::{group_velocity_fh, solve_fiber, DispersionBranch, FiberGrid};
use crate::error::{EdgeError, Result};
use serde::Serialize;

/// Fewest evaluation points per preimage.
pub const MIN_PREIMAGE_POINTS: usize = 8;

/// The part of Δ's preimage lying on one branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preimage {
    pub n: usize,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub points: usize,
}

/// Δ = [lower, upper] with ν_±(Δ), the inf and sup of |α′_{n′}(κ)| over
/// all (n′, κ) with α_{n′}(κ) ∈ Δ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralWindow {
    pub lower: f64,
    pub upper: f64,
    /// n with Δ ⊂ L_n, if there is one
    pub band: Option<usize>,
    pub nu_minus: f64,
    pub nu_plus: f64,
    /// size of the largest excursion of |α′| between evaluation points
    /// suggested by its second differences
    pub error_bar: f64,
    pub preimages: Vec<Preimage>,
}

impl SpectralWindow {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contributing(&self) -> Vec<usize> {
        self.preimages.iter().map(|p| p.n).collect()
    }

    /// |Δ| < δ_n, the width condition of the drift sandwich.
    pub fn narrower_than(&self, delta_n: f64) -> bool {
        self.width() < delta_n
    }
}

fn exact_speed(branch: &DispersionBranch, kappa: f64) -> Result<f64> {
    let sols = solve_fiber(kappa, branch.n, &FiberGrid::with_spacing(kappa, branch.fiber_spacing))?;
    Ok(group_velocity_fh(&sols[branch.n]).abs())
}

fn preimage(branch: &DispersionBranch, lower: f64, upper: f64) -> Result<(Preimage, f64)> {
    let n = branch.n;
    let (first, last) = (branch.samples[0], branch.samples[branch.samples.len() - 1]);
    if first.alpha < upper {
        return Err(EdgeError::Coverage(format!(
            "α_{n}({}) = {} is below {upper}; extend branch {n} to lower κ",
            first.kappa, first.alpha
        )));
    }
    if lower <= n as f64 + 0.5 {
        return Err(EdgeError::Coverage(format!(
            "α_{n} stays above {lower} for all κ; the preimage of [{lower}, {upper}] is unbounded"
        )));
    }
    if last.alpha > lower {
        return Err(EdgeError::Coverage(format!(
            "α_{n}({}) = {} is above {lower}; extend branch {n} to higher κ",
            last.kappa, last.alpha
        )));
    }
    let k_lo = if first.alpha == upper {
        first.kappa
    } else {
        locate_crossing(branch, upper)?.unwrap_or(first.kappa)
    };
    let k_hi = if lower == upper {
        k_lo
    } else {
        locate_crossing(branch, lower)?.unwrap_or(last.kappa)
    };

    let mut pts: Vec<(f64, f64)> = vec![(k_lo, exact_speed(branch, k_lo)?)];
    pts.extend(
        branch
            .samples
            .iter()
            .filter(|s| s.kappa > k_lo && s.kappa < k_hi)
            .map(|s| (s.kappa, s.alpha_prime_fh.abs())),
    );
    if k_hi > k_lo {
        pts.push((k_hi, exact_speed(branch, k_hi)?));
    }
    if pts.len() < MIN_PREIMAGE_POINTS && k_hi > k_lo {
        let m = 2 * MIN_PREIMAGE_POINTS;
        for j in 1..m {
            let k = k_lo + (k_hi - k_lo) * j as f64 / m as f64;
            pts.push((k, branch.velocity_at(k)?.abs()));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let speeds: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let nu_minus = speeds.iter().copied().fold(f64::INFINITY, f64::min);
    let nu_plus = speeds.iter().copied().fold(0.0, f64::max);
    let bar = speeds
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs() / 8.0)
        .fold(0.0, f64::max);
    Ok((
        Preimage {
            n,
            kappa_lo: k_lo,
            kappa_hi: k_hi,
            nu_minus,
            nu_plus,
            points: pts.len(),
        },
        bar,
    ))
}

/// ν_±(Δ) for the closed window Δ = [lower, upper].
///
/// Every branch n′ with n′ + ½ < upper can reach Δ and must be present,
/// spanning the whole preimage. Preimage ends are bisected on the
/// interpolated branch and their speeds re-solved on the fiber grid; inner
/// points are the branch samples, padded with interpolated ones up to
/// [`MIN_PREIMAGE_POINTS`].
pub fn nu_window(lower: f64, upper: f64, branches: &[DispersionBranch]) -> Result<SpectralWindow> {
    if !(lower.is_finite() && upper.is_finite() && lower <= upper) {
        return Err(EdgeError::Domain(format!("bad window [{lower}, {upper}]")));
    }
    if upper <= 0.5 {
        return Err(EdgeError::EmptyWindow(format!(
            "[{lower}, {upper}] lies below every branch"
        )));
    }
    let mut preimages = Vec::new();
    let mut error_bar: f64 = 0.0;
    let mut n = 0;
    while (n as f64) + 0.5 < upper {
        let (p, bar) = preimage(branch(branches, n)?, lower, upper)?;
        preimages.push(p);
        error_bar = error_bar.max(bar);
        n += 1;
    }
    if preimages.is_empty() {
        return Err(EdgeError::EmptyWindow(format!("no branch reaches [{lower}, {upper}]")));
    }
    let top = (upper - 1.5).ceil().max(0.0);
    let band = (lower > top + 0.5 && upper <= top + 1.5).then_some(top as usize);
    Ok(SpectralWindow {
        lower,
        upper,
        band,
        nu_minus: preimages.iter().map(|p| p.nu_minus).fold(f64::INFINITY, f64::min),
        nu_plus: preimages.iter().map(|p| p.nu_plus).fold(0.0, f64::max),
        error_bar,
        preimages,
    })
}

/// ν(n, λ) = ν_-(L_n^λ), L_n^λ = (n+½+λ, n+3/2].
pub fn nu_n_lambda(n: usize, lambda: f64, branches: &[DispersionBranch]) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(EdgeError::Domain(format!("λ must lie in (0, 1), got {lambda}")));
    }
    Ok(nu_window(n as f64 + 0.5 + lambda, n as f64 + 1.5, branches)?.nu_minus)
}
