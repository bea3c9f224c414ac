use super::state::{velocity_from_modes, RowFft};
use super::{FieldState, ImpurityField, SimGrid};
use crate::error::{EdgeError, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Largest tolerated norm drift per step.
pub const NORM_DRIFT_PER_STEP: f64 = 1e-6;
/// Default time step in scaled units.
pub const DEFAULT_DT: f64 = 0.005;
/// Residual allowed in the Chebyshev expansion of the energy filter.
pub const FILTER_RESIDUAL: f64 = 1e-6;
/// Retained norm below which the filter reports an empty window.
pub const FILTER_EMPTY: f64 = 1e-8;

/// H̃ = -½∂²_x̃ + ½(p_ỹ - x̃)² + W̃ on the grid, applied to ỹ-mode data.
pub struct Hamiltonian {
    pub grid: SimGrid,
    fft: RowFft,
    potential: Option<Vec<f64>>,
}

impl Hamiltonian {
    pub fn new(grid: SimGrid, impurity: &ImpurityField) -> Result<Self> {
        if impurity.grid != grid {
            return Err(EdgeError::Domain("impurity sampled on a different grid".into()));
        }
        Ok(Hamiltonian {
            grid,
            fft: RowFft::new(grid.ny),
            potential: (!impurity.is_zero()).then(|| impurity.values.clone()),
        })
    }

    pub fn fft(&self) -> &RowFft {
        &self.fft
    }

    fn kinetic(&self) -> f64 {
        1.0 / (self.grid.dx() * self.grid.dx())
    }

    /// Fiber diagonal at stored row r and mode m.
    fn diag(&self, r: usize, m: usize) -> f64 {
        let d = self.grid.x(r) - self.grid.kappa(m);
        self.kinetic() + 0.5 * d * d
    }

    /// out = H̃ modes
    pub fn apply(&self, modes: &[Complex64], out: &mut [Complex64]) {
        let ny = self.grid.ny;
        let rows = self.grid.rows();
        let off = -0.5 * self.kinetic();
        for r in 0..rows {
            for m in 0..ny {
                let mut v = modes[r * ny + m] * self.diag(r, m);
                if r > 0 {
                    v += modes[(r - 1) * ny + m] * off;
                }
                if r + 1 < rows {
                    v += modes[(r + 1) * ny + m] * off;
                }
                out[r * ny + m] = v;
            }
        }
        if let Some(w) = &self.potential {
            let mut pos = modes.to_vec();
            self.fft.inverse(&mut pos);
            for (p, w) in pos.iter_mut().zip(w) {
                *p *= *w;
            }
            self.fft.forward(&mut pos);
            for (o, p) in out.iter_mut().zip(&pos) {
                *o += p;
            }
        }
    }

    /// Gershgorin enclosure of the discrete spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let wmax = self
            .potential
            .as_ref()
            .map_or(0.0, |w| w.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
        let mut hi: f64 = 0.0;
        for m in 0..self.grid.ny {
            for r in [0, self.grid.rows() - 1] {
                hi = hi.max(self.diag(r, m));
            }
        }
        (-wmax, hi + self.kinetic() + wmax)
    }

    /// (⟨H̃⟩, Var H̃) of normalized mode data.
    pub fn energy_moments(&self, modes: &[Complex64]) -> (f64, f64) {
        let mut h = vec![Complex64::new(0.0, 0.0); modes.len()];
        self.apply(modes, &mut h);
        let cell = self.grid.cell();
        let norm: f64 = cell * modes.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let mean = cell * modes.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / norm;
        let h2 = cell * h.iter().map(|b| b.norm_sqr()).sum::<f64>() / norm;
        (mean, (h2 - mean * mean).max(0.0))
    }
}

/// Crank–Nicolson half steps of the fiber operators, factored once per
/// mode, with the impurity phase exp(-iW̃ dt) between them.
pub struct Propagator {
    pub dt: f64,
    ham: Hamiltonian,
    /// per mode: modified super-diagonal and inverse pivots of I + iτH_m
    sup: Vec<Vec<Complex64>>,
    inv_pivot: Vec<Vec<Complex64>>,
    phase: Option<Vec<Complex64>>,
    column: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: SimGrid, impurity: &ImpurityField, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(EdgeError::Domain(format!("dt must be positive, got {dt}")));
        }
        let ham = Hamiltonian::new(grid, impurity)?;
        let tau = 0.25 * dt;
        let rows = grid.rows();
        let off = Complex64::new(0.0, tau * -0.5 * ham.kinetic());
        let mut sup = Vec::with_capacity(grid.ny);
        let mut inv_pivot = Vec::with_capacity(grid.ny);
        for m in 0..grid.ny {
            let mut s = vec![Complex64::new(0.0, 0.0); rows];
            let mut p = vec![Complex64::new(0.0, 0.0); rows];
            let mut prev = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                let b = Complex64::new(1.0, tau * ham.diag(r, m));
                let denom = b - off * prev;
                p[r] = 1.0 / denom;
                s[r] = off * p[r];
                prev = s[r];
            }
            sup.push(s);
            inv_pivot.push(p);
        }
        let phase = ham
            .potential
            .as_ref()
            .map(|w| w.iter().map(|v| Complex64::from_polar(1.0, -v * dt)).collect());
        Ok(Propagator {
            dt,
            ham,
            sup,
            inv_pivot,
            phase,
            column: vec![Complex64::new(0.0, 0.0); rows],
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.ham
    }

    fn fiber_half_step(&mut self, modes: &mut [Complex64]) {
        let grid = self.ham.grid;
        let ny = grid.ny;
        let rows = grid.rows();
        let tau = 0.25 * self.dt;
        let off = Complex64::new(0.0, tau * -0.5 * self.ham.kinetic());
        for m in 0..ny {
            // right side (I - iτH)ψ
            for r in 0..rows {
                let b = Complex64::new(1.0, -tau * self.ham.diag(r, m));
                let mut v = modes[r * ny + m] * b;
                if r > 0 {
                    v -= off * modes[(r - 1) * ny + m];
                }
                if r + 1 < rows {
                    v -= off * modes[(r + 1) * ny + m];
                }
                self.column[r] = v;
            }
            let (s, p) = (&self.sup[m], &self.inv_pivot[m]);
            let mut prev = Complex64::new(0.0, 0.0);
            for (c, &pr) in self.column.iter_mut().zip(p.iter()) {
                let v = (*c - off * prev) * pr;
                *c = v;
                prev = v;
            }
            for r in (0..rows.saturating_sub(1)).rev() {
                let next = self.column[r + 1];
                self.column[r] -= s[r] * next;
            }
            for r in 0..rows {
                modes[r * ny + m] = self.column[r];
            }
        }
    }

    /// One Strang step on ỹ-mode data.
    pub fn step(&mut self, modes: &mut [Complex64]) {
        self.fiber_half_step(modes);
        if let Some(phase) = &self.phase {
            self.ham.fft.inverse(modes);
            for (v, ph) in modes.iter_mut().zip(phase) {
                *v *= ph;
            }
            self.ham.fft.forward(modes);
        }
        self.fiber_half_step(modes);
    }

    /// Advance `steps` steps, calling `observe(step, modes)` after each.
    pub fn run(
        &mut self,
        modes: &mut [Complex64],
        steps: usize,
        mut observe: impl FnMut(usize, &[Complex64]),
    ) -> Result<()> {
        let cell = self.ham.grid.cell();
        let norm = |m: &[Complex64]| cell * m.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let start = norm(modes);
        for s in 1..=steps {
            self.step(modes);
            observe(s, modes);
        }
        let drift = (norm(modes) - start).abs() / start.max(f64::MIN_POSITIVE);
        if steps > 0 && drift / steps as f64 > NORM_DRIFT_PER_STEP {
            return Err(EdgeError::Stability {
                message: format!("norm drifted by {drift:e} over {steps} steps"),
                suggested_dt: 0.5 * self.dt,
            });
        }
        Ok(())
    }
}

/// State after `steps` steps of size dt under H̃₀ + W̃.
pub fn evolve(state: &FieldState, impurity: &ImpurityField, dt: f64, steps: usize) -> Result<FieldState> {
    let mut prop = Propagator::new(state.grid, impurity, dt)?;
    let fft = prop.hamiltonian().fft().clone();
    let mut modes = state.to_modes(&fft);
    prop.run(&mut modes, steps, |_, _| {})?;
    let mut out = FieldState::from_modes(state.grid, state.time + dt * steps as f64, &modes, &fft);
    out.b_field = state.b_field;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterReport {
    pub center: f64,
    pub width: f64,
    pub degree: usize,
    /// ‖Fψ‖² / ‖ψ‖² before renormalization
    pub retained: f64,
    pub energy_mean: f64,
    pub energy_var: f64,
    pub velocity_mean: f64,
}

/// Chebyshev coefficients of g on [-1, 1] from a DCT on 2N Lobatto
/// samples, cut where the dropped tail falls below `tol`.
fn chebyshev_coefficients(g: impl Fn(f64) -> f64, tol: f64) -> Vec<f64> {
    let mut n = 64;
    loop {
        let samples: Vec<f64> = (0..=n)
            .map(|j| g((std::f64::consts::PI * j as f64 / n as f64).cos()))
            .collect();
        let mut ext: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        ext.extend(samples[1..n].iter().rev().map(|&v| Complex64::new(v, 0.0)));
        let fft = rustfft::FftPlanner::new().plan_fft_forward(2 * n);
        fft.process(&mut ext);
        let mut c: Vec<f64> = (0..=n).map(|k| ext[k].re / n as f64).collect();
        c[0] *= 0.5;
        c[n] *= 0.5;
        let tail_start = n * 3 / 4;
        let tail: f64 = c[tail_start..].iter().map(|v| v.abs()).sum();
        if tail < 0.01 * tol || n >= 1 << 22 {
            let mut keep = c.len();
            let mut dropped = 0.0;
            while keep > 1 && dropped + c[keep - 1].abs() < tol {
                dropped += c[keep - 1].abs();
                keep -= 1;
            }
            c.truncate(keep);
            return c;
        }
        n *= 2;
    }
}

/// exp(-(H̃ - α)²/(2w²)) ψ by a Chebyshev expansion over the Gershgorin
/// range of H̃, renormalized.
pub fn energy_filter(
    state: &FieldState,
    impurity: &ImpurityField,
    center: f64,
    width: f64,
) -> Result<(FieldState, FilterReport)> {
    if !(width > 0.0) {
        return Err(EdgeError::Domain(format!("filter width must be positive, got {width}")));
    }
    let ham = Hamiltonian::new(state.grid, impurity)?;
    let fft = ham.fft().clone();
    let (lo, hi) = ham.spectral_bounds();
    let (mid, half) = (0.5 * (hi + lo), 0.5 * (hi - lo));
    let coeffs = chebyshev_coefficients(
        |u| {
            let e = mid + half * u;
            (-(e - center) * (e - center) / (2.0 * width * width)).exp()
        },
        FILTER_RESIDUAL,
    );

    let modes = state.to_modes(&fft);
    let len = modes.len();
    let mut prev = modes.clone();
    let mut cur = vec![Complex64::new(0.0, 0.0); len];
    let mut tmp = vec![Complex64::new(0.0, 0.0); len];
    let mut acc: Vec<Complex64> = modes.iter().map(|v| v * coeffs[0]).collect();
    if coeffs.len() > 1 {
        ham.apply(&prev, &mut cur);
        for (c, p) in cur.iter_mut().zip(&prev) {
            *c = (*c - p * mid) / half;
        }
        for (a, c) in acc.iter_mut().zip(&cur) {
            *a += c * coeffs[1];
        }
    }
    for &ck in coeffs.iter().skip(2) {
        ham.apply(&cur, &mut tmp);
        for ((t, c), p) in tmp.iter_mut().zip(&cur).zip(&prev) {
            *t = 2.0 * (*t - c * mid) / half - p;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut tmp);
        for (a, c) in acc.iter_mut().zip(&cur) {
            *a += c * ck;
        }
    }

    let cell = state.grid.cell();
    let before = state.norm_sqr();
    let after = cell * acc.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let retained = after / before;
    if !(retained > FILTER_EMPTY) {
        return Err(EdgeError::EmptyFilter(retained));
    }
    let s = after.sqrt();
    acc.iter_mut().for_each(|v| *v /= s);
    let (energy_mean, energy_var) = ham.energy_moments(&acc);
    let velocity_mean = velocity_from_modes(&state.grid, &acc);
    let mut out = FieldState::from_modes(state.grid, state.time, &acc, &fft);
    out.b_field = state.b_field;
    Ok((
        out,
        FilterReport {
            center,
            width,
            degree: coeffs.len() - 1,
            retained,
            energy_mean,
            energy_var,
            velocity_mean,
        },
    ))
}
