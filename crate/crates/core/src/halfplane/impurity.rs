use super::SimGrid;
use crate::error::{EdgeError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Lattice parameters of W̃ = Σ_i c_i u(B^a(x - i/B^b)) in scaled units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpurityParams {
    /// δ_W, so that ‖W̃‖∞ ≤ δ_W
    pub amplitude: f64,
    /// a: site potentials shrink like B^{-a}
    pub fluctuation: f64,
    /// b ≥ ½: sites sit B^{-b} apart
    pub density: f64,
    pub b_field: f64,
}

impl ImpurityParams {
    pub fn scaled(amplitude: f64) -> Self {
        ImpurityParams {
            amplitude,
            fluctuation: 0.0,
            density: 0.5,
            b_field: 1.0,
        }
    }

    /// Site spacing in scaled length, √B·B^{-b}.
    pub fn spacing(&self) -> f64 {
        self.b_field.sqrt() * self.b_field.powf(-self.density)
    }

    /// Bump radius: half the spacing, or less if the sites are sharper.
    pub fn radius(&self) -> f64 {
        let site = 0.5 * self.b_field.sqrt() * self.b_field.powf(-self.fluctuation);
        site.min(0.5 * self.spacing())
    }
}

/// Sampled impurity potential with the parameters and seed that made it.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpurityField {
    pub params: ImpurityParams,
    pub seed: u64,
    pub grid: SimGrid,
    /// site amplitudes in [-δ_W, δ_W]
    pub sites: Vec<(f64, f64, f64)>,
    /// values in the layout of the field state
    pub values: Vec<f64>,
}

impl ImpurityField {
    pub fn zero(grid: SimGrid) -> Self {
        ImpurityField {
            params: ImpurityParams::scaled(0.0),
            seed: 0,
            grid,
            sites: Vec::new(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: SimGrid, c: f64) -> Self {
        ImpurityField {
            params: ImpurityParams::scaled(c.abs()),
            seed: 0,
            grid,
            sites: Vec::new(),
            values: vec![c; grid.len()],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

fn bump(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        let s = 1.0 - r2;
        s * s * s
    }
}

/// A lattice of (1 - r²/R²)³ bumps with independent uniform amplitudes,
/// periodic in ỹ. Along ỹ the spacing is stretched slightly so that a whole
/// number of sites fits the circle.
pub fn generate_impurity(params: ImpurityParams, seed: u64, grid: SimGrid) -> Result<ImpurityField> {
    if !(params.amplitude >= 0.0) || !(params.b_field > 0.0) || !(params.density >= 0.5) || !(params.fluctuation >= 0.0)
    {
        return Err(EdgeError::Domain(format!("bad impurity parameters {params:?}")));
    }
    let spacing = params.spacing();
    let cell = grid.dx().max(grid.dy());
    if spacing < 2.0 * cell {
        return Err(EdgeError::Resolution(format!(
            "site spacing {spacing} is below two grid cells ({})",
            2.0 * cell
        )));
    }
    if params.amplitude == 0.0 {
        let mut f = ImpurityField::zero(grid);
        f.params = params;
        f.seed = seed;
        return Ok(f);
    }
    let nyl = ((grid.ly / spacing).round() as usize).max(1);
    let sy = grid.ly / nyl as f64;
    let nxl = (grid.x_max / spacing).floor() as usize + 1;
    let radius = params.radius().min(0.5 * sy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = Vec::with_capacity(nxl * nyl);
    for ix in 0..nxl {
        for iy in 0..nyl {
            let a = rng.gen_range(-params.amplitude..=params.amplitude);
            sites.push((ix as f64 * spacing, iy as f64 * sy, a));
        }
    }
    let mut values = vec![0.0; grid.len()];
    let reach_x = (radius / grid.dx()).ceil() as isize;
    let reach_y = (radius / grid.dy()).ceil() as isize;
    let ny = grid.ny as isize;
    for &(sx, sy_, a) in &sites {
        let jc = (sx / grid.dx()).round() as isize;
        let kc = (sy_ / grid.dy()).round() as isize;
        for j in (jc - reach_x).max(1)..=(jc + reach_x).min(grid.nx as isize - 1) {
            let ddx = j as f64 * grid.dx() - sx;
            for k in kc - reach_y..=kc + reach_y {
                let ddy = k as f64 * grid.dy() - sy_;
                let r2 = (ddx * ddx + ddy * ddy) / (radius * radius);
                let v = a * bump(r2);
                if v != 0.0 {
                    let kk = k.rem_euclid(ny) as usize;
                    values[(j as usize - 1) * grid.ny + kk] += v;
                }
            }
        }
    }
    for v in &mut values {
        *v = v.clamp(-params.amplitude, params.amplitude);
    }
    Ok(ImpurityField {
        params,
        seed,
        grid,
        sites,
        values,
    })
}
