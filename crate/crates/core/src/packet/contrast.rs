use super::WavePacket;
use crate::band::{solve_fiber, DispersionBranch, EigenSolution, FiberGrid};
use crate::error::{EdgeError, Result};
use serde::Serialize;

/// Edge and bulk speed bounds for band n at field strength B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeBulkContrast {
    pub n: usize,
    pub sigma_e: f64,
    pub b_field: f64,
    pub epsilon: f64,
    /// √B inf_{κ ≤ σ_e} |α′_n(κ)|
    pub edge_bound: f64,
    pub edge_argmin: f64,
    /// σ_e B^ε
    pub bulk_threshold: f64,
    /// √B sup_{κ ≥ σ_e B^ε} |α′_n(κ)|
    pub bulk_bound: f64,
    pub bulk_argmax: f64,
    /// √B exp(-½(1-ε)σ_e² B^{2ε})
    pub bulk_envelope: f64,
}

impl EdgeBulkContrast {
    /// edge_bound ≥ c √B
    pub fn edge_at_least(&self, c: f64) -> bool {
        self.edge_bound >= c * self.b_field.sqrt()
    }

    /// bulk_bound ≤ c √B exp(-rate σ_e² B^{2ε})
    pub fn bulk_at_most(&self, c: f64, rate: f64) -> bool {
        let e = -rate * self.sigma_e * self.sigma_e * self.b_field.powf(2.0 * self.epsilon);
        self.bulk_bound <= c * self.b_field.sqrt() * e.exp()
    }
}

fn speed(b: &DispersionBranch, kappa: f64) -> Result<f64> {
    Ok(b.velocity_resolved(kappa)?.abs())
}

/// Edge and bulk speed bounds from branch data. Below the branch range
/// |α′_n(κ)| > |κ| is used to close the edge infimum; beyond it the bulk
/// speed must already be decaying at the last sample.
pub fn edge_bulk_contrast(
    n: usize,
    sigma_e: f64,
    b_field: f64,
    epsilon: f64,
    branches: &[DispersionBranch],
) -> Result<EdgeBulkContrast> {
    if !(b_field >= 1.0) || !(epsilon > 0.0 && epsilon < 0.5) || !(sigma_e > 0.0) {
        return Err(EdgeError::Domain(format!(
            "need B ≥ 1, ε ∈ (0, ½), σ_e > 0; got B={b_field}, ε={epsilon}, σ_e={sigma_e}"
        )));
    }
    let b = crate::mourre::branch(branches, n)?;
    let root_b = b_field.sqrt();

    if !b.covers(sigma_e) {
        return Err(EdgeError::Coverage(format!("σ_e={sigma_e} outside branch {n}")));
    }
    let mut edge = (speed(b, sigma_e)?, sigma_e);
    for s in b.samples.iter().filter(|s| s.kappa <= sigma_e) {
        let v = speed(b, s.kappa)?;
        if v < edge.0 {
            edge = (v, s.kappa);
        }
    }
    if b.kappa_min < 0.0 && edge.0 > -b.kappa_min {
        return Err(EdgeError::Coverage(format!(
            "edge infimum {} exceeds |κ_min| = {}; extend branch {n} to lower κ",
            edge.0, -b.kappa_min
        )));
    }

    let threshold = sigma_e * b_field.powf(epsilon);
    if !b.covers(threshold) {
        return Err(EdgeError::Coverage(format!(
            "bulk threshold κ={threshold} outside branch {n}"
        )));
    }
    let mut bulk = (speed(b, threshold)?, threshold);
    let mut last = bulk.0;
    for s in b.samples.iter().filter(|s| s.kappa >= threshold) {
        let v = speed(b, s.kappa)?;
        last = v;
        if v > bulk.0 {
            bulk = (v, s.kappa);
        }
    }
    if last > bulk.0 * (1.0 - 1e-12) && bulk.1 != b.kappa_max && threshold < b.kappa_max {
        return Err(EdgeError::Coverage(format!(
            "bulk speed of branch {n} not decaying at κ={}",
            b.kappa_max
        )));
    }

    Ok(EdgeBulkContrast {
        n,
        sigma_e,
        b_field,
        epsilon,
        edge_bound: root_b * edge.0,
        edge_argmin: edge.1,
        bulk_threshold: threshold,
        bulk_bound: root_b * bulk.0,
        bulk_argmax: bulk.1,
        bulk_envelope: root_b * (-0.5 * (1.0 - epsilon) * sigma_e * sigma_e * b_field.powf(2.0 * epsilon)).exp(),
    })
}

/// Nodes at which the fiber tails are solved and then interpolated.
const MASS_NODES: usize = 33;

fn tail_mass(sol: &EigenSolution, x_lo: f64, x_hi: f64) -> f64 {
    let g = sol.grid;
    let h = g.spacing();
    let norm = sol.norm();
    let mut s = 0.0;
    for j in 0..g.num_points {
        let (a, b) = (g.x(j), g.x(j + 1));
        let (lo, hi) = (a.max(x_lo), b.min(x_hi));
        if hi <= lo {
            continue;
        }
        let avg = 0.5 * (sol.values[j] * sol.values[j] + sol.values[j + 1] * sol.values[j + 1]);
        s += avg * (hi - lo) / h * h;
    }
    s / norm
}

/// ∫_{x_lo}^{x_hi} ∫ |f(κ) φ_n(x̃, κ)|² dκ dx̃.
pub fn mass_in(p: &WavePacket, x_lo: f64, x_hi: f64) -> Result<f64> {
    if !(x_lo >= 0.0) || !(x_hi >= x_lo) {
        return Err(EdgeError::Range(format!("bad x̃ interval [{x_lo}, {x_hi}]")));
    }
    let mut total = 0.0;
    for c in &p.components {
        let first = c.envelope.iter().position(|f| f.norm_sqr() > 0.0).unwrap_or(0);
        let last = c.envelope.iter().rposition(|f| f.norm_sqr() > 0.0).unwrap_or(0);
        let (ka, kb) = (c.kappa(first), c.kappa(last));
        let x_max = ka.max(0.0) + crate::band::fiber::WALL_MARGIN;
        if x_lo > x_max {
            return Err(EdgeError::Range(format!(
                "x̃ = {x_lo} beyond the fiber grid end {x_max}"
            )));
        }
        let nodes: Vec<f64> = if kb > ka {
            (0..MASS_NODES)
                .map(|i| ka + (kb - ka) * i as f64 / (MASS_NODES - 1) as f64)
                .collect()
        } else {
            vec![ka]
        };
        let tails: Vec<f64> = nodes
            .iter()
            .map(|&k| {
                let sols = solve_fiber(k, c.n, &FiberGrid::for_kappa(k))?;
                Ok(tail_mass(&sols[c.n], x_lo, x_hi))
            })
            .collect::<Result<_>>()?;
        for j in first..=last {
            let w = c.envelope[j].norm_sqr();
            if w == 0.0 {
                continue;
            }
            total += c.dk * w * interpolate_tail(&nodes, &tails, c.kappa(j));
        }
    }
    Ok(total)
}

/// Linear in ln(tail) when both neighbours are positive.
fn interpolate_tail(nodes: &[f64], tails: &[f64], k: f64) -> f64 {
    if nodes.len() == 1 {
        return tails[0];
    }
    let step = (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64;
    let t = ((k - nodes[0]) / step).clamp(0.0, (nodes.len() - 1) as f64);
    let i = (t.floor() as usize).min(nodes.len() - 2);
    let s = t - i as f64;
    let (a, b) = (tails[i], tails[i + 1]);
    if a > 0.0 && b > 0.0 {
        (a.ln() * (1.0 - s) + b.ln() * s).exp()
    } else {
        a * (1.0 - s) + b * s
    }
}

/// Probability mass beyond x̃ = X.
pub fn edge_mass_profile(p: &WavePacket, x: f64) -> Result<f64> {
    mass_in(p, x, f64::INFINITY)
}
