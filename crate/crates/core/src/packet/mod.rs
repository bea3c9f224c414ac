//! Wave packets f(κ)φ_n(x̃, κ) inside band spaces, their exact free
//! evolution, and the drift of ⟨Ỹ⟩ along the edge.

mod contrast;
mod drift;

pub use contrast::{edge_bulk_contrast, edge_mass_profile, mass_in, EdgeBulkContrast};
pub use drift::{drift_experiment, DriftRecord};

use crate::band::{berry_term, DispersionBranch, FiberGrid};
use crate::error::{EdgeError, Result};
use crate::mourre::nu_window;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

/// Envelope grid points per branch sample interval.
pub const CELLS_PER_SAMPLE: usize = 10;
/// Zero cells kept on either side of a window envelope.
const WINDOW_PAD: usize = 6;
/// Gaussian envelopes are laid out to this many widths where coverage allows.
const GAUSSIAN_REACH: f64 = 10.0;
/// ... and must reach at least this many.
const GAUSSIAN_MIN_REACH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum PacketShape {
    /// |f|² a normal density with mean `center` and standard deviation `width`.
    Gaussian { center: f64, width: f64 },
    /// Indicator of the preimage of [lower, upper], rolled off over one cell.
    Window { lower: f64, upper: f64 },
}

/// The part of a packet carried by one branch, on a uniform κ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEnvelope {
    pub n: usize,
    pub kappa_start: f64,
    pub dk: f64,
    pub envelope: Vec<Complex64>,
    /// α_n and α′_n on the grid
    pub alpha: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl BandEnvelope {
    pub fn kappa(&self, j: usize) -> f64 {
        self.kappa_start + j as f64 * self.dk
    }

    pub fn len(&self) -> usize {
        self.envelope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envelope.is_empty()
    }

    fn mass(&self) -> f64 {
        self.dk * self.envelope.iter().map(|f| f.norm_sqr()).sum::<f64>()
    }

    fn on_grid(branch: &DispersionBranch, lo: f64, hi: f64, dk: f64, shape: impl Fn(f64) -> f64) -> Result<Self> {
        let cells = ((hi - lo) / dk).ceil() as usize;
        let kappas: Vec<f64> = (0..=cells)
            .map(|j| lo + j as f64 * dk)
            .map(|k| k.min(branch.kappa_max))
            .collect();
        let (alpha, velocity): (Vec<f64>, Vec<f64>) = kappas
            .iter()
            .map(|&k| branch.interpolate(k))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(BandEnvelope {
            n: branch.n,
            kappa_start: lo,
            dk,
            envelope: kappas.iter().map(|&k| Complex64::new(shape(k), 0.0)).collect(),
            alpha,
            velocity,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    pub band: usize,
    pub shape: PacketShape,
    pub time: f64,
    pub components: Vec<BandEnvelope>,
}

impl WavePacket {
    /// ∫|f|² dκ summed over components.
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(BandEnvelope::mass).sum()
    }

    pub fn kappa_mean(&self) -> f64 {
        self.weighted(|c, j| c.kappa(j))
    }

    /// ∫ α′ |f|² dκ, the rate of change of ⟨Ỹ⟩.
    pub fn drift_rate(&self) -> f64 {
        self.weighted(|c, j| c.velocity[j])
    }

    /// ∫ α |f|² dκ
    pub fn energy(&self) -> f64 {
        self.weighted(|c, j| c.alpha[j])
    }

    fn weighted(&self, g: impl Fn(&BandEnvelope, usize) -> f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                c.dk * c
                    .envelope
                    .iter()
                    .enumerate()
                    .map(|(j, f)| f.norm_sqr() * g(c, j))
                    .sum::<f64>()
            })
            .sum()
    }

    fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        for c in &mut self.components {
            c.envelope.iter_mut().for_each(|f| *f /= s);
        }
    }
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// A normalized packet on band n. Window packets draw one component from
/// every branch whose preimage of the window is non-empty.
pub fn make_packet(n: usize, shape: PacketShape, branches: &[DispersionBranch]) -> Result<WavePacket> {
    let mut components = Vec::new();
    match shape {
        PacketShape::Gaussian { center, width } => {
            if !(width > 0.0) || !center.is_finite() {
                return Err(EdgeError::Domain(format!(
                    "bad gaussian: center {center}, width {width}"
                )));
            }
            let b = crate::mourre::branch(branches, n)?;
            let need = GAUSSIAN_MIN_REACH * width;
            if center - need < b.kappa_min || center + need > b.kappa_max {
                return Err(EdgeError::Coverage(format!(
                    "[{}, {}] not inside branch {n} range [{}, {}]",
                    center - need,
                    center + need,
                    b.kappa_min,
                    b.kappa_max
                )));
            }
            let reach = (GAUSSIAN_REACH * width)
                .min(center - b.kappa_min)
                .min(b.kappa_max - center);
            let dk = b.spacing / CELLS_PER_SAMPLE as f64;
            let cells = (reach / dk).floor();
            let lo = center - cells * dk;
            let hi = center + cells * dk;
            let g = |k: f64| (-(k - center) * (k - center) / (4.0 * width * width)).exp();
            components.push(BandEnvelope::on_grid(b, lo, hi, dk, g)?);
        }
        PacketShape::Window { lower, upper } => {
            let w = nu_window(lower, upper, branches)?;
            if w.band != Some(n) {
                return Err(EdgeError::Domain(format!("[{lower}, {upper}] is not inside L_{n}")));
            }
            for p in &w.preimages {
                let b = crate::mourre::branch(branches, p.n)?;
                let dk = b.spacing / CELLS_PER_SAMPLE as f64;
                let pad = WINDOW_PAD as f64 * dk;
                let lo = (p.kappa_lo - pad).max(b.kappa_min);
                let hi = (p.kappa_hi + pad).min(b.kappa_max);
                let (a, c) = (p.kappa_lo, p.kappa_hi);
                let ramp = |k: f64| smoothstep((k - a) / dk + 0.5) * smoothstep((c - k) / dk + 0.5);
                components.push(BandEnvelope::on_grid(b, lo, hi, dk, ramp)?);
            }
        }
    }
    let mut p = WavePacket {
        band: n,
        shape,
        time: 0.0,
        components,
    };
    if !(p.norm_sqr() > 0.0) {
        return Err(EdgeError::EmptyWindow("packet envelope vanishes on its grid".into()));
    }
    p.normalize();
    Ok(p)
}

/// Multiplies each envelope by exp(-i α_n(κ) t).
pub fn evolve_free(p: &WavePacket, t: f64) -> WavePacket {
    let mut out = p.clone();
    for c in &mut out.components {
        for (f, a) in c.envelope.iter_mut().zip(&c.alpha) {
            *f *= Complex64::from_polar(1.0, -a * t);
        }
    }
    out.time += t;
    out
}

/// ⟨Ỹ⟩ = ∫ f̄ (i d/dκ) f dκ with a Fourier derivative on each component.
pub fn y_expectation(p: &WavePacket) -> f64 {
    let mut planner = FftPlanner::<f64>::new();
    let mut total = 0.0;
    for c in &p.components {
        let m = c.len();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let mut buf = c.envelope.clone();
        fwd.process(&mut buf);
        let period = m as f64 * c.dk;
        for (j, v) in buf.iter_mut().enumerate() {
            let freq = if 2 * j < m {
                j as f64
            } else if 2 * j == m {
                0.0
            } else {
                j as f64 - m as f64
            };
            *v *= Complex64::new(0.0, 2.0 * std::f64::consts::PI * freq / period);
        }
        inv.process(&mut buf);
        let scale = 1.0 / m as f64;
        total += c.dk
            * c.envelope
                .iter()
                .zip(&buf)
                .map(|(f, d)| (f.conj() * Complex64::i() * d * scale).re)
                .sum::<f64>();
    }
    total
}

/// ⟨x̃ - p_ỹ⟩ = ∫ |f|² ∫(x̃ - κ)φ_n² dx̃ dκ, with the fiber moment
/// interpolated from the branch samples by four-point Lagrange.
pub fn commutator_expectation(p: &WavePacket, branches: &[DispersionBranch]) -> Result<f64> {
    let mut total = 0.0;
    for c in &p.components {
        let b = crate::mourre::branch(branches, c.n)?;
        for (j, f) in c.envelope.iter().enumerate() {
            let w = f.norm_sqr();
            if w == 0.0 {
                continue;
            }
            total += c.dk * w * moment_at(b, c.kappa(j))?;
        }
    }
    Ok(total)
}

fn moment_at(b: &DispersionBranch, kappa: f64) -> Result<f64> {
    let m = b.samples.len();
    if !b.covers(kappa) || m < 4 {
        return Err(EdgeError::Coverage(format!("κ={kappa} outside branch {} samples", b.n)));
    }
    let t = (kappa - b.kappa_min) / b.spacing;
    let i = (t.floor() as isize - 1).clamp(0, m as isize - 4) as usize;
    let xs: Vec<f64> = (i..i + 4).map(|k| b.samples[k].kappa).collect();
    let mut v = 0.0;
    for a in 0..4 {
        let mut w = 1.0;
        for c in 0..4 {
            if c != a {
                w *= (kappa - xs[c]) / (xs[a] - xs[c]);
            }
        }
        v += w * b.samples[i + a].x_moment;
    }
    Ok(v)
}

/// Largest |∫φ_n ∂_κ φ_n dx̃| over `count` points spread across the
/// packet's support; the band part of ⟨Ỹ⟩ assumes it vanishes.
pub fn berry_residual(p: &WavePacket, count: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for c in &p.components {
        let first = c.envelope.iter().position(|f| f.norm_sqr() > 1e-20).unwrap_or(0);
        let last = c.envelope.iter().rposition(|f| f.norm_sqr() > 1e-20).unwrap_or(0);
        let (a, b) = (c.kappa(first), c.kappa(last));
        for i in 0..count.max(1) {
            let k = if count <= 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * i as f64 / (count - 1) as f64
            };
            let g = FiberGrid::with_spacing(k + 1e-3, 0.01);
            worst = worst.max(berry_term(k, c.n, 1e-4, &g).abs());
        }
    }
    worst
}


#[cfg(test)]
mod tests {
    use super::*;
    use fixture::branches;

    fn gaussian(n: usize, center: f64, width: f64) -> WavePacket {
        make_packet(n, PacketShape::Gaussian { center, width }, branches()).unwrap()
    }

    #[test]
    fn gaussian_is_normalized_and_centered() {
        let p = gaussian(0, 0.0, 0.3);
        assert!((p.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(p.kappa_mean().abs() < 1e-12);
        assert!(y_expectation(&p).abs() < 1e-12);
    }

    #[test]
    fn window_support_matches_preimage() {
        let p = make_packet(0, PacketShape::Window { lower: 0.9, upper: 1.0 }, branches()).unwrap();
        assert_eq!(p.components.len(), 1);
        let c = &p.components[0];
        let w = nu_window(0.9, 1.0, branches()).unwrap();
        let (a, b) = (w.preimages[0].kappa_lo, w.preimages[0].kappa_hi);
        for j in 0..c.len() {
            let k = c.kappa(j);
            let f = c.envelope[j].norm();
            if k < a - c.dk || k > b + c.dk {
                assert_eq!(f, 0.0, "κ={k}");
            }
        }
        assert!((p.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_is_unitary_and_additive() {
        let p = gaussian(1, 0.5, 0.2);
        assert_eq!(evolve_free(&p, 0.0), p);
        let q = evolve_free(&p, 10.0);
        assert!((q.norm_sqr() - 1.0).abs() < 1e-12);
        let two = evolve_free(&evolve_free(&p, 1.3), 2.2);
        let one = evolve_free(&p, 3.5);
        for (a, b) in two.components[0].envelope.iter().zip(&one.components[0].envelope) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn drift_matches_the_stationary_phase_identity() {
        let p = gaussian(0, 0.4, 0.25);
        let y0 = y_expectation(&p);
        let rate = p.drift_rate();
        for t in [0.5, 1.0, 3.0] {
            let y = y_expectation(&evolve_free(&p, t));
            assert!((y - y0 - t * rate).abs() < 1e-8, "t={t}: {} vs {}", y - y0, t * rate);
        }
    }

    #[test]
    fn narrow_packet_moves_at_edge_speed() {
        let p = gaussian(0, 0.0, 0.02);
        let y = y_expectation(&evolve_free(&p, 1.0));
        assert!((y + 1.128379).abs() < 2e-3, "{y}");
    }

    #[test]
    fn ehrenfest_rate_equals_commutator() {
        let br = branches();
        for (n, k) in [(0, 0.0), (1, 1.0), (2, -0.5)] {
            let p = gaussian(n, k, 0.2);
            let dt = 1e-3;
            let rate = (y_expectation(&evolve_free(&p, dt)) - y_expectation(&evolve_free(&p, -dt))) / (2.0 * dt);
            let comm = commutator_expectation(&p, br).unwrap();
            assert!(comm > 0.0);
            assert!((rate + comm).abs() < 1e-6, "n={n}: {rate} vs {comm}");
        }
    }

    #[test]
    fn real_gauge_has_no_berry_term() {
        assert!(berry_residual(&gaussian(0, 0.5, 0.2), 3) < 1e-8);
    }

    #[test]
    fn coverage_is_checked() {
        let r = make_packet(
            0,
            PacketShape::Gaussian {
                center: 7.5,
                width: 0.3,
            },
            branches(),
        );
        assert!(matches!(r, Err(EdgeError::Coverage(_))));
        let r = make_packet(1, PacketShape::Window { lower: 0.9, upper: 1.0 }, branches());
        assert!(matches!(r, Err(EdgeError::Domain(_))));
    }
}
