use super::{branch, crossing, in_band};
use crate::band::fiber::DEFAULT_SPACING;
use crate::band::{solve_fiber, DispersionBranch, FiberGrid};
use crate::error::{EdgeError, Result};

/// Interpolation points per branch sample in the δ_n scan.
const SUBSAMPLE: usize = 4;
const MARCH_STEP: f64 = 0.5;
const MARCH_LIMIT: f64 = 60.0;

/// θ_n(κ, n′, n″) = |α_{n′}(κ) - α_{n″}(κ)| when both lie in L_n, else 1.
pub fn theta(n: usize, kappa: f64, n1: usize, n2: usize, branches: &[DispersionBranch]) -> Result<f64> {
    if n1 == n2 {
        return Err(EdgeError::Domain(format!("θ needs two distinct bands, got {n1} twice")));
    }
    let a1 = branch(branches, n1)?.alpha_at(kappa)?;
    let a2 = branch(branches, n2)?.alpha_at(kappa)?;
    Ok(if in_band(n, n1, a1) && in_band(n, n2, a2) {
        (a1 - a2).abs()
    } else {
        1.0
    })
}

/// [κ_n, κ′_n] outside of which θ_n = 1 for every pair: all α_{n′≤n} exceed
/// n+3/2 left of it and all α_{n′<n} lie below n+½ right of it. Found by
/// marching outward from κ = 0 with the fiber solver.
pub fn compact_range(n: usize) -> Result<(f64, f64)> {
    let top = n as f64 + 1.5;
    let mut lo = 0.0;
    loop {
        let sols = solve_fiber(lo, n, &FiberGrid::with_spacing(lo, DEFAULT_SPACING))?;
        if sols.iter().all(|s| s.alpha > top) {
            break;
        }
        lo -= MARCH_STEP;
        if lo < -MARCH_LIMIT {
            return Err(EdgeError::Range(format!("no left end of the compact range for n={n}")));
        }
    }
    let bottom = n as f64 + 0.5;
    let mut hi = 0.0;
    if n > 0 {
        loop {
            let sols = solve_fiber(hi, n - 1, &FiberGrid::with_spacing(hi, DEFAULT_SPACING))?;
            if sols.iter().all(|s| s.alpha < bottom) {
                break;
            }
            hi += MARCH_STEP;
            if hi > MARCH_LIMIT {
                return Err(EdgeError::Range(format!("no right end of the compact range for n={n}")));
            }
        }
    }
    Ok((lo, hi))
}

/// δ_n = inf over pairs n′ ≠ n″ ≤ n and over κ of θ_n(κ, n′, n″), capped at 1.
///
/// The branches must span a range whose ends satisfy the exit conditions of
/// [`compact_range`]; otherwise a coverage error names the failing end.
/// The infimum is taken over the interpolated branches at a quarter of the
/// sample spacing, plus the points where a branch enters or leaves L_n.
pub fn delta_n(n: usize, branches: &[DispersionBranch]) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let bands: Vec<&DispersionBranch> = (0..=n).map(|k| branch(branches, k)).collect::<Result<_>>()?;
    let lo = bands.iter().map(|b| b.kappa_min).fold(f64::NEG_INFINITY, f64::max);
    let hi = bands.iter().map(|b| b.kappa_max).fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(EdgeError::Coverage("branches share no κ range".into()));
    }
    let top = n as f64 + 1.5;
    let bottom = n as f64 + 0.5;
    for b in &bands {
        let a = b.alpha_at(lo)?;
        if a <= top {
            return Err(EdgeError::Coverage(format!(
                "left end κ={lo}: α_{} = {a} is not above {top}; extend the scan to lower κ",
                b.n
            )));
        }
    }
    for b in &bands[..n] {
        let a = b.alpha_at(hi)?;
        if a >= bottom {
            return Err(EdgeError::Coverage(format!(
                "right end κ={hi}: α_{} = {a} is not below {bottom}; extend the scan to higher κ",
                b.n
            )));
        }
    }

    let spacing = bands.iter().map(|b| b.spacing).fold(f64::INFINITY, f64::min);
    let steps = (((hi - lo) / spacing).round() as usize).max(1) * SUBSAMPLE;
    let kappas: Vec<f64> = (0..=steps).map(|j| lo + (hi - lo) * j as f64 / steps as f64).collect();
    let alphas: Vec<Vec<f64>> = bands
        .iter()
        .map(|b| kappas.iter().map(|&k| b.alpha_at(k)).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    let mut best: f64 = 1.0;
    for (j, _) in kappas.iter().enumerate() {
        for p in 0..=n {
            for q in 0..p {
                let (ap, aq) = (alphas[p][j], alphas[q][j]);
                if in_band(n, p, ap) && in_band(n, q, aq) {
                    best = best.min((ap - aq).abs());
                }
            }
        }
    }

    // entry and exit points of each branch
    for p in 0..=n {
        let mut levels = vec![top];
        if p < n {
            levels.push(bottom);
        }
        for &level in &levels {
            for j in 0..steps {
                let (a0, a1) = (alphas[p][j], alphas[p][j + 1]);
                if !(a0 >= level && a1 < level) {
                    continue;
                }
                let k = crossing(bands[p], kappas[j], kappas[j + 1], level)?;
                for q in (0..=n).filter(|&q| q != p) {
                    let aq = bands[q].alpha_at(k)?;
                    if in_band(n, q, aq) {
                        best = best.min((aq - level).abs());
                    }
                }
            }
        }
    }
    Ok(best.min(1.0))
}
