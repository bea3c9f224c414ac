use super::SimGrid;
use crate::band::discrete_eigenpairs;
use crate::error::{EdgeError, Result};
use crate::packet::{BandEnvelope, WavePacket};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Unitary DFT along ỹ for every stored row at once.
#[derive(Clone)]
pub struct RowFft {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl RowFft {
    pub fn new(ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        RowFft {
            fwd: planner.plan_fft_forward(ny),
            inv: planner.plan_fft_inverse(ny),
            scale: 1.0 / (ny as f64).sqrt(),
        }
    }

    /// position → ỹ-modes
    pub fn forward(&self, data: &mut [Complex64]) {
        self.fwd.process(data);
        data.iter_mut().for_each(|v| *v *= self.scale);
    }

    /// ỹ-modes → position
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inv.process(data);
        data.iter_mut().for_each(|v| *v *= self.scale);
    }
}

/// ψ(x̃, ỹ) on the interior rows of the grid; the x̃ = 0 and x̃ = X_max
/// rows are not stored and are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: SimGrid,
    pub time: f64,
    pub b_field: f64,
    /// row-major: values[r·ny + k] = ψ(x̃_{r+1}, ỹ_k)
    pub values: Vec<Complex64>,
}

impl FieldState {
    pub fn zeros(grid: SimGrid) -> Self {
        FieldState {
            grid,
            time: 0.0,
            b_field: 1.0,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// ψ at grid node (j, k) with j counted from the wall.
    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        if j == 0 || j >= self.grid.nx {
            return Complex64::new(0.0, 0.0);
        }
        self.values[(j - 1) * self.grid.ny + k]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.cell() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        self.values.iter_mut().for_each(|v| *v /= s);
    }

    pub fn distance(&self, other: &FieldState) -> f64 {
        (self.grid.cell()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>())
        .sqrt()
    }

    /// |⟨self, other⟩| / (‖self‖‖other‖)
    pub fn overlap(&self, other: &FieldState) -> f64 {
        let ip: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        ip.norm() * self.grid.cell() / (self.norm_sqr() * other.norm_sqr()).sqrt()
    }

    /// Marginal density along ỹ, ∫|ψ|² dx̃ at each column.
    pub fn y_density(&self) -> Vec<f64> {
        let ny = self.grid.ny;
        let mut rho = vec![0.0; ny];
        for row in self.values.chunks(ny) {
            for (r, v) in rho.iter_mut().zip(row) {
                *r += v.norm_sqr() * self.grid.dx();
            }
        }
        rho
    }

    /// Circular mean of ỹ in [0, L_y).
    pub fn y_circular_mean(&self) -> f64 {
        let ly = self.grid.ly;
        let z: Complex64 = self
            .y_density()
            .iter()
            .enumerate()
            .map(|(k, r)| Complex64::from_polar(*r, 2.0 * PI * self.grid.y(k) / ly))
            .sum();
        (z.arg() / (2.0 * PI) * ly).rem_euclid(ly)
    }

    /// Mass in the first and last `cells` columns.
    pub fn seam_mass(&self, cells: usize) -> f64 {
        let rho = self.y_density();
        let ny = rho.len();
        let c = cells.min(ny / 2);
        self.grid.dy() * (rho[..c].iter().sum::<f64>() + rho[ny - c..].iter().sum::<f64>())
    }

    pub fn to_modes(&self, fft: &RowFft) -> Vec<Complex64> {
        let mut m = self.values.clone();
        fft.forward(&mut m);
        m
    }

    pub fn from_modes(grid: SimGrid, time: f64, modes: &[Complex64], fft: &RowFft) -> Self {
        let mut values = modes.to_vec();
        fft.inverse(&mut values);
        FieldState {
            grid,
            time,
            b_field: 1.0,
            values,
        }
    }
}

/// ⟨x̃ - p_ỹ⟩ from ỹ-mode data: Σ |c_m(x̃)|² (x̃ - κ_m).
pub fn velocity_from_modes(grid: &SimGrid, modes: &[Complex64]) -> f64 {
    let ny = grid.ny;
    let mut s = 0.0;
    for (r, row) in modes.chunks(ny).enumerate() {
        let x = grid.x(r);
        for (m, c) in row.iter().enumerate() {
            s += c.norm_sqr() * (x - grid.kappa(m));
        }
    }
    s * grid.cell()
}

/// ⟨x̃ - p_ỹ⟩, the expectation of i[Ỹ, H̃].
pub fn commutator_expectation(state: &FieldState, fft: &RowFft) -> f64 {
    velocity_from_modes(&state.grid, &state.to_modes(fft)) / state.norm_sqr()
}

fn lagrange4(xs: &[f64; 4], ys: &[Complex64; 4], x: f64) -> Complex64 {
    let mut v = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        let mut w = 1.0;
        for c in 0..4 {
            if c != a {
                w *= (x - xs[c]) / (xs[a] - xs[c]);
            }
        }
        v += ys[a] * w;
    }
    v
}

fn envelope_at(c: &BandEnvelope, kappa: f64) -> Complex64 {
    let m = c.len();
    let t = (kappa - c.kappa_start) / c.dk;
    if m < 4 || t < 0.0 || t > (m - 1) as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let i = (t.floor() as isize - 1).clamp(0, m as isize - 4) as usize;
    let xs = [c.kappa(i), c.kappa(i + 1), c.kappa(i + 2), c.kappa(i + 3)];
    let ys = [c.envelope[i], c.envelope[i + 1], c.envelope[i + 2], c.envelope[i + 3]];
    lagrange4(&xs, &ys, kappa)
}

/// The band packet Σ_m f(κ_m) φ_n(x̃; κ_m) e^{iκ_m(ỹ - y₀)} √Δκ on the
/// grid, with φ_n the eigenvectors of the grid's own fiber matrix. The
/// envelope is interpolated at the mode momenta.
pub fn embed_packet(p: &WavePacket, grid: SimGrid, y0: f64, fft: &RowFft) -> Result<FieldState> {
    let ny = grid.ny;
    let rows = grid.rows();
    let n_max = p.components.iter().map(|c| c.n).max().unwrap_or(0);
    let weight = (grid.mode_spacing() / grid.dy()).sqrt();
    let mut modes = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut touched = false;
    for m in 0..ny {
        let kappa = grid.kappa(m);
        let amps: Vec<(usize, Complex64)> = p
            .components
            .iter()
            .map(|c| (c.n, envelope_at(c, kappa)))
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .collect();
        if amps.is_empty() {
            continue;
        }
        touched = true;
        let pairs = discrete_eigenpairs(kappa, grid.x_max, grid.nx, n_max);
        let shift = Complex64::from_polar(weight, -kappa * y0);
        for (n, a) in amps {
            let phi = &pairs[n].1;
            for r in 0..rows {
                modes[r * ny + m] += a * shift * phi[r + 1];
            }
        }
    }
    if !touched {
        return Err(EdgeError::Coverage("no ỹ-mode falls inside the packet envelope".into()));
    }
    let mut s = FieldState::from_modes(grid, p.time, &modes, fft);
    s.time = p.time;
    Ok(s)
}
