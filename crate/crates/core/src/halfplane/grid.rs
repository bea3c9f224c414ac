use crate::error::{EdgeError, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Uniform (x̃, ỹ) grid: x̃_j = j·dx for j = 0..=nx with Dirichlet rows at
/// both ends, ỹ_k = k·dy for k = 0..ny on a circle of length L_y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimGrid {
    pub nx: usize,
    pub ny: usize,
    pub x_max: f64,
    pub ly: f64,
}

impl SimGrid {
    pub fn new(nx: usize, ny: usize, x_max: f64, ly: f64) -> Result<Self> {
        if nx < 8 || ny < 4 || !ny.is_multiple_of(2) {
            return Err(EdgeError::Domain(format!(
                "need nx ≥ 8 and even ny ≥ 4, got nx={nx}, ny={ny}"
            )));
        }
        if !(x_max > 0.0 && ly > 0.0) || !x_max.is_finite() || !ly.is_finite() {
            return Err(EdgeError::Domain(format!("bad extents X_max={x_max}, L_y={ly}")));
        }
        Ok(SimGrid { nx, ny, x_max, ly })
    }

    pub fn dx(&self) -> f64 {
        self.x_max / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Interior rows j = 1..nx-1 stored as 0..rows.
    pub fn rows(&self) -> usize {
        self.nx - 1
    }

    pub fn len(&self) -> usize {
        self.rows() * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// x̃ of stored row r.
    pub fn x(&self, r: usize) -> f64 {
        (r + 1) as f64 * self.dx()
    }

    pub fn y(&self, k: usize) -> f64 {
        k as f64 * self.dy()
    }

    /// ỹ-momentum of Fourier mode m, with m ≥ ny/2 folded to negative.
    pub fn kappa(&self, m: usize) -> f64 {
        let signed = if m < self.ny / 2 {
            m as f64
        } else {
            m as f64 - self.ny as f64
        };
        2.0 * PI * signed / self.ly
    }

    pub fn mode_spacing(&self) -> f64 {
        2.0 * PI / self.ly
    }

    pub fn cell(&self) -> f64 {
        self.dx() * self.dy()
    }
}
