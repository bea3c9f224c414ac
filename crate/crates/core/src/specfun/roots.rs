//! Roots in α of the edge quantization condition D_{α-1/2}(-√2 κ) = 0.

use super::pcf::{pcf_d, pcf_d_split, SERIES_Z_NEG};
use crate::error::{EdgeError, Result};

/// Relative residual accepted for a refined root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-12;
pub const DEFAULT_BRACKET_RESOLUTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationRootSet {
    pub kappa: f64,
    /// Ascending roots α, all above 1/2.
    pub roots: Vec<f64>,
    /// |D| at each root relative to the larger bracket-end magnitude.
    pub residuals: Vec<f64>,
    pub bracket_resolution: f64,
}

impl QuantizationRootSet {
    /// Fails with a resolution error when fewer roots were found than an
    /// independent count says exist (two roots shared one bracket).
    pub fn expect_count(&self, expected: usize) -> Result<()> {
        if self.roots.len() != expected {
            return Err(EdgeError::Resolution(format!(
                "found {} roots at κ={} but expected {expected}; use a bracket finer than {}",
                self.roots.len(),
                self.kappa,
                self.bracket_resolution
            )));
        }
        Ok(())
    }
}

fn condition(kappa: f64, alpha: f64) -> Result<f64> {
    Ok(pcf_d(alpha - 0.5, -std::f64::consts::SQRT_2 * kappa)?.value)
}

/// All roots of α ↦ D_{α-1/2}(-√2κ) in (1/2, α_max], bracketed on a grid of
/// the given resolution and refined by bisection plus one secant step.
pub fn quantization_roots(kappa: f64, alpha_max: f64, bracket_resolution: f64) -> Result<QuantizationRootSet> {
    if !(alpha_max > 0.5) {
        return Err(EdgeError::Domain(format!("α_max must exceed 1/2, got {alpha_max}")));
    }
    if !(bracket_resolution > 0.0) || !bracket_resolution.is_finite() {
        return Err(EdgeError::Domain(format!(
            "bracket resolution must be positive, got {bracket_resolution}"
        )));
    }
    let steps = ((alpha_max - 0.5) / bracket_resolution).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|j| {
            if j == steps {
                alpha_max
            } else {
                0.5 + j as f64 * bracket_resolution
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&a| condition(kappa, a)).collect::<Result<_>>()?;

    let mut roots = Vec::new();
    let mut residuals = Vec::new();
    for j in 0..steps {
        let (a, b) = (grid[j], grid[j + 1]);
        let (fa, fb) = (values[j], values[j + 1]);
        if fb == 0.0 && b > 0.5 {
            roots.push(b);
            residuals.push(0.0);
            continue;
        }
        if fa == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        let scale = fa.abs().max(fb.abs());
        let (root, resid) = refine(kappa, a, b, fa, scale)?;
        roots.push(root);
        residuals.push(resid);
    }
    Ok(QuantizationRootSet {
        kappa,
        roots,
        residuals,
        bracket_resolution,
    })
}

fn refine(kappa: f64, mut lo: f64, mut hi: f64, mut flo: f64, scale: f64) -> Result<(f64, f64)> {
    let mut fhi = condition(kappa, hi)?;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = condition(kappa, mid)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if hi - lo <= BISECTION_WIDTH {
            let resid = fm.abs() / scale;
            if resid <= ROOT_RESIDUAL_TOL {
                break;
            }
        }
    }
    // one secant polish inside the final bracket
    let mut root = 0.5 * (lo + hi);
    if fhi != flo {
        let s = lo - flo * (hi - lo) / (fhi - flo);
        if s > lo && s < hi {
            root = s;
        }
    }
    let fr = condition(kappa, root)?;
    let (root, fr) = if fr.abs() <= flo.abs().min(fhi.abs()) {
        (root, fr)
    } else if flo.abs() < fhi.abs() {
        (lo, flo)
    } else {
        (hi, fhi)
    };
    Ok((root, fr.abs() / scale))
}

/// α_n(κ) - (n + 1/2), computed with full relative precision even when it
/// is far below the float spacing at n + 1/2.
///
/// For √2κ within the power-series range this solves D_{n+ε}(-√2κ) = 0 for
/// ε ∈ (0, 1/2) by bisection in log ε, with the order offset carried
/// separately from n. Beyond it, the two large-|z| expansions balanced at
/// first order in ε give ε = x^{2n+1} e^{-x²/2} / (√(2π) n!) · S_r / S_d
/// with x = √2κ.
pub fn quantization_excess(n: usize, kappa: f64) -> Result<f64> {
    let z = -std::f64::consts::SQRT_2 * kappa;
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(EdgeError::Range(format!("excess needs κ > 0, got {kappa}")));
    }
    if z < -SERIES_Z_NEG {
        return asymptotic_excess(n, -z);
    }
    let n = n as i64;
    let g = |ln_eps: f64| -> Result<f64> { Ok(pcf_d_split(n, ln_eps.exp(), z)?.value) };

    let mut lo = (1e-300f64).ln();
    let glo = g(lo)?;
    if glo == 0.0 {
        return Err(EdgeError::Precision("quantization function vanished at ε → 0".into()));
    }
    let top = (0.5f64).ln();
    let step = std::f64::consts::LN_10;
    let mut hi = lo;
    loop {
        hi += step;
        if hi >= top {
            hi = top;
        }
        let ghi = g(hi)?;
        if ghi.signum() != glo.signum() {
            break;
        }
        if hi >= top {
            return Err(EdgeError::Range(format!("excess of band {n} at κ={kappa} exceeds 1/2")));
        }
        lo = hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-14 {
            break;
        }
        let gm = g(mid)?;
        if gm.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// α_n'(κ) from the excess, for κ where α itself has rounded onto its
/// level. Central difference of ln ε, which is smooth, times ε.
pub fn quantization_excess_slope(n: usize, kappa: f64) -> Result<f64> {
    let h = 1e-3 * kappa.max(1.0);
    if kappa - h <= 0.0 {
        return Err(EdgeError::Range(format!("excess slope needs κ > {h}, got {kappa}")));
    }
    let e = quantization_excess(n, kappa)?;
    let up = quantization_excess(n, kappa + h)?.ln();
    let down = quantization_excess(n, kappa - h)?.ln();
    Ok(e * (up - down) / (2.0 * h))
}

fn asymptotic_excess(n: usize, x: f64) -> Result<f64> {
    let w = 2.0 * x * x;
    let nf = n as f64;
    // terminating series of the recessive solution at integer order
    let mut sr = 0.0;
    let mut t = 1.0;
    let mut s = 0.0;
    loop {
        sr += t;
        let c = (nf - 2.0 * s) * (nf - 2.0 * s - 1.0);
        if c == 0.0 {
            break;
        }
        t *= -c / ((s + 1.0) * w);
        s += 1.0;
    }
    // asymptotic series of the dominant solution, summed to its smallest term
    let mut sd = 0.0;
    let mut t: f64 = 1.0;
    let mut s = 0.0;
    loop {
        sd += t;
        let next = t * (nf + 2.0 * s + 1.0) * (nf + 2.0 * s + 2.0) / ((s + 1.0) * w);
        if next.abs() >= t.abs() || next.abs() < 1e-18 * sd.abs() {
            if next.abs() >= t.abs() && t.abs() > 1e-15 * sd.abs() {
                return Err(EdgeError::Precision(format!(
                    "asymptotic excess of band {n} not converged at x = {x}"
                )));
            }
            break;
        }
        t = next;
        s += 1.0;
    }
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let ln_eps =
        (2.0 * nf + 1.0) * x.ln() - 0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln() - ln_fact + (sr / sd).ln();
    let eps = ln_eps.exp();
    if eps == 0.0 {
        return Err(EdgeError::Range(format!("excess of band {n} underflows at x = {x}")));
    }
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_oscillator_levels_at_zero_momentum() {
        let set = quantization_roots(0.0, 8.0, 0.05).unwrap();
        assert_eq!(set.roots.len(), 4);
        for (r, want) in set.roots.iter().zip([1.5, 3.5, 5.5, 7.5]) {
            assert!((r - want).abs() < 1e-11, "{r} vs {want}");
        }
        for r in &set.residuals {
            assert!(*r <= ROOT_RESIDUAL_TOL);
        }
    }

    #[test]
    fn deep_bulk_root_hugs_landau_level() {
        let set = quantization_roots(6.0, 1.0, 0.01).unwrap();
        assert_eq!(set.roots.len(), 1);
        let r = set.roots[0];
        assert!(r >= 0.5, "{r}");
        assert!(r - 0.5 < 1e-3);
    }

    #[test]
    fn negative_momentum_pushes_roots_up() {
        let at_zero = quantization_roots(0.0, 8.0, 0.05).unwrap();
        let at_neg = quantization_roots(-2.0, 12.0, 0.05).unwrap();
        for (a, b) in at_zero.roots.iter().zip(&at_neg.roots) {
            assert!(b > a);
        }
    }

    #[test]
    fn roots_strictly_increasing_above_half() {
        for &k in &[-1.5, 0.3, 1.0, 2.5, 4.0] {
            let set = quantization_roots(k, 10.0, 0.02).unwrap();
            assert!(set.roots.windows(2).all(|w| w[0] < w[1]));
            assert!(set.roots.iter().all(|&r| r > 0.5));
        }
    }

    #[test]
    fn count_mismatch_is_a_resolution_error() {
        let set = quantization_roots(0.0, 4.0, 0.05).unwrap();
        assert!(matches!(set.expect_count(3), Err(EdgeError::Resolution(_))));
        assert!(set.expect_count(2).is_ok());
    }

    #[test]
    fn excess_matches_plain_root_where_resolvable() {
        let plain = quantization_roots(3.0, 1.0, 0.01).unwrap().roots[0] - 0.5;
        let split = quantization_excess(0, 3.0).unwrap();
        assert!((plain - split).abs() < 1e-12, "{plain} vs {split}");
    }

    #[test]
    fn excess_beyond_the_series_range() {
        // 40-digit references
        for &(n, k, want) in &[
            (0usize, 10.0, 2.088_226_308_169_248e-43),
            (1, 10.0, 4.134_038_544_079_932e-41),
            (3, 12.0, 7.452_491_526_059_553e-56),
            (12, 11.0, 7.419_951_774_578_734e-33),
        ] {
            let e = quantization_excess(n, k).unwrap();
            assert!(((e - want) / want).abs() < 1e-12, "n={n} κ={k}: {e:e}");
        }
        // the two routes meet at the series edge
        let k = 10.6;
        let a = quantization_excess(2, k).unwrap();
        let b = asymptotic_excess(2, std::f64::consts::SQRT_2 * k).unwrap();
        assert!(((a - b) / a).abs() < 1e-10);
    }

    #[test]
    fn excess_slope_matches_root_differences() {
        let k = 2.5;
        let d = 1e-4;
        let root = |k: f64| quantization_roots(k, 1.0, 0.01).unwrap().roots[0];
        let fd = (root(k + d) - root(k - d)) / (2.0 * d);
        let s = quantization_excess_slope(0, k).unwrap();
        assert!(((s - fd) / fd).abs() < 1e-6, "{s} vs {fd}");
        // α' ≈ -2κ ε deep in the bulk
        let k = 9.0;
        let s = quantization_excess_slope(1, k).unwrap();
        let e = quantization_excess(1, k).unwrap();
        assert!(s < 0.0 && (s / (-2.0 * k * e) - 1.0).abs() < 0.1);
    }

    #[test]
    fn excess_deep_in_the_bulk() {
        // 40-digit reference: α₀(8) - 1/2 = 7.181353527e-28
        let e = quantization_excess(0, 8.0).unwrap();
        assert!(((e - 7.181_353_527e-28) / 7.181_353_527e-28).abs() < 1e-8, "{e:e}");
    }
}
