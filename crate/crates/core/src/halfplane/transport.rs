use super::propagate::{energy_filter, FilterReport, Hamiltonian, Propagator};
use super::state::{embed_packet, velocity_from_modes, FieldState};
use super::{generate_impurity, ImpurityParams, SimGrid};
use crate::band::DispersionBranch;
use crate::error::{EdgeError, Result};
use crate::mourre::{mourre_budget, LandauBandWindow, MourreBudget};
use crate::packet::{make_packet, PacketShape};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write;

/// Allowance subtracted from ½ν·(filtered fraction) in the pass test.
pub const COMMUTATOR_TOL: f64 = 0.05;
/// Columns on either side of the ỹ seam watched for wrap-around.
pub const SEAM_CELLS: usize = 5;
pub const SEAM_LIMIT: f64 = 0.1;
/// Allowed |d⟨Ỹ⟩/dt + ⟨x̃ - p_ỹ⟩| between recorded samples.
pub const EHRENFEST_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Amplitude {
    Absolute(f64),
    /// multiple of δ_admissible(n, λ, λ′)
    Admissible(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportConfig {
    pub n: usize,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub amplitude: Amplitude,
    pub seed: u64,
    pub dt: f64,
    pub t_final: f64,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub x_max: f64,
    pub ly: f64,
    pub filter_width: f64,
    /// run even when the amplitude breaks the admissibility bound
    pub allow_violation: bool,
    /// steps between recorded samples
    pub record_every: usize,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            n: 0,
            lambda: 0.2,
            lambda_prime: 0.2,
            amplitude: Amplitude::Admissible(0.5),
            seed: 0,
            dt: super::propagate::DEFAULT_DT,
            t_final: 10.0,
            grid_nx: 140,
            grid_ny: 256,
            x_max: 14.0,
            ly: 64.0,
            filter_width: 0.1,
            allow_violation: false,
            record_every: 20,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| EdgeError::Config(format!("cannot read `{key}` value `{v}`")))
}

fn parse_amplitude(v: &str) -> Result<Amplitude> {
    let v = v.replace(' ', "");
    if v == "delta_admissible" {
        return Ok(Amplitude::Admissible(1.0));
    }
    if let Some(f) = v.strip_suffix("*delta_admissible") {
        return Ok(Amplitude::Admissible(parse_num("amplitude", f)?));
    }
    Ok(Amplitude::Absolute(parse_num("amplitude", &v)?))
}

impl TransportConfig {
    /// Flat `key = value` text; `#` starts a comment. Unset keys keep their
    /// defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = TransportConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| EdgeError::Config(format!("line {}: expected key=value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "n" => c.n = parse_num(k, v)?,
                "lambda" => c.lambda = parse_num(k, v)?,
                "lambda_prime" => c.lambda_prime = parse_num(k, v)?,
                "amplitude" => c.amplitude = parse_amplitude(v)?,
                "seed" => c.seed = parse_num(k, v)?,
                "dt" => c.dt = parse_num(k, v)?,
                "T" => c.t_final = parse_num(k, v)?,
                "grid_nx" => c.grid_nx = parse_num(k, v)?,
                "grid_ny" => c.grid_ny = parse_num(k, v)?,
                "Xmax" => c.x_max = parse_num(k, v)?,
                "Ly" => c.ly = parse_num(k, v)?,
                "filter_width" => c.filter_width = parse_num(k, v)?,
                "allow_violation" => c.allow_violation = parse_num(k, v)?,
                "record_every" => c.record_every = parse_num(k, v)?,
                _ => return Err(EdgeError::Config(format!("line {}: unknown key `{k}`", i + 1))),
            }
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let amp = match self.amplitude {
            Amplitude::Absolute(a) => format!("{a:e}"),
            Amplitude::Admissible(f) => format!("{f}*delta_admissible"),
        };
        format!(
            "n = {}\nlambda = {}\nlambda_prime = {}\namplitude = {amp}\nseed = {}\ndt = {}\nT = {}\n\
             grid_nx = {}\ngrid_ny = {}\nXmax = {}\nLy = {}\nfilter_width = {}\nallow_violation = {}\n\
             record_every = {}\n",
            self.n,
            self.lambda,
            self.lambda_prime,
            self.seed,
            self.dt,
            self.t_final,
            self.grid_nx,
            self.grid_ny,
            self.x_max,
            self.ly,
            self.filter_width,
            self.allow_violation,
            self.record_every
        )
    }

    pub fn grid(&self) -> Result<SimGrid> {
        SimGrid::new(self.grid_nx, self.grid_ny, self.x_max, self.ly)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportSample {
    pub t: f64,
    /// unwrapped circular mean of ỹ
    pub y_mean: f64,
    /// ⟨x̃ - p_ỹ⟩
    pub velocity_mean: f64,
    pub energy_mean: f64,
    pub energy_var: f64,
    pub norm: f64,
    pub seam_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportReport {
    pub config: TransportConfig,
    pub window: LandauBandWindow,
    pub budget: MourreBudget,
    pub amplitude: f64,
    pub sup_norm: f64,
    pub filter: FilterReport,
    pub samples: Vec<TransportSample>,
    /// time average of ⟨x̃ - p_ỹ⟩ over [0, T]
    pub commutator_average: f64,
    /// ½ν(n, λ/2)·retained - tolerance
    pub commutator_threshold: f64,
    /// largest |d⟨Ỹ⟩/dt + ⟨x̃ - p_ỹ⟩| between samples
    pub ehrenfest_residual: f64,
    pub ehrenfest_ok: bool,
    pub max_seam_mass: f64,
    pub max_norm_drift: f64,
    pub commutator_pass: bool,
    pub monotone_pass: bool,
    /// false when the packet reached the ỹ seam
    pub seam_ok: bool,
    pub pass: bool,
}

impl TransportReport {
    /// `t,y_mean,velocity_mean,energy_mean,energy_var,norm`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,y_mean,velocity_mean,energy_mean,energy_var,norm\n");
        for p in &self.samples {
            writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.t, p.y_mean, p.velocity_mean, p.energy_mean, p.energy_var, p.norm
            )
            .unwrap();
        }
        s
    }

    pub fn verdict(&self) -> serde_json::Value {
        serde_json::json!({
            "pass": self.pass,
            "commutator_pass": self.commutator_pass,
            "monotone_pass": self.monotone_pass,
            "seam_ok": self.seam_ok,
            "commutator_average": self.commutator_average,
            "commutator_threshold": self.commutator_threshold,
            "filtered_fraction": self.filter.retained,
            "amplitude": self.amplitude,
            "sup_norm": self.sup_norm,
            "ehrenfest_residual": self.ehrenfest_residual,
            "ehrenfest_ok": self.ehrenfest_ok,
            "max_seam_mass": self.max_seam_mass,
            "max_norm_drift": self.max_norm_drift,
            "seed": self.config.seed,
            "budget": self.budget,
        })
    }
}

fn unwrap_near(raw: f64, previous: f64, ly: f64) -> f64 {
    raw + ly * ((previous - raw) / ly).round()
}

/// Window packet on L_n^{λ,λ′}, filtered around the window centre,
/// evolved under H̃₀ + W̃ with a seeded impurity field of the configured
/// amplitude; records ⟨Ỹ⟩ and ⟨x̃ - p_ỹ⟩ along the way.
pub fn transport_experiment(config: &TransportConfig, branches: &[DispersionBranch]) -> Result<TransportReport> {
    let window = LandauBandWindow::new(config.n, config.lambda, config.lambda_prime)?;
    let budget = mourre_budget(config.n, config.lambda, config.lambda_prime, branches)?;
    let amplitude = match config.amplitude {
        Amplitude::Absolute(a) => a,
        Amplitude::Admissible(f) => f * budget.delta_admissible,
    };
    if !(amplitude >= 0.0) {
        return Err(EdgeError::Config(format!(
            "amplitude must be non-negative, got {amplitude}"
        )));
    }
    if amplitude >= budget.delta_admissible && !config.allow_violation {
        return Err(EdgeError::Rejected(format!(
            "amplitude {amplitude:e} is not below δ_admissible = {:e}; set allow_violation = true to run anyway",
            budget.delta_admissible
        )));
    }
    if !(config.t_final > 0.0) || config.record_every == 0 {
        return Err(EdgeError::Config(
            "T must be positive and record_every at least 1".into(),
        ));
    }
    let grid = config.grid()?;
    let impurity = generate_impurity(ImpurityParams::scaled(amplitude), config.seed, grid)?;

    let packet = make_packet(
        config.n,
        PacketShape::Window {
            lower: window.lower(),
            upper: window.upper(),
        },
        branches,
    )?;
    let mut prop = Propagator::new(grid, &impurity, config.dt)?;
    let fft = prop.hamiltonian().fft().clone();
    let y0 = 0.75 * grid.ly;
    let embedded = embed_packet(&packet, grid, y0, &fft)?;
    let center = 0.5 * (window.lower() + window.upper());
    let (state, filter) = energy_filter(&embedded, &impurity, center, config.filter_width)?;

    let steps = (config.t_final / config.dt).round() as usize;
    let ham = Hamiltonian::new(grid, &impurity)?;
    let observe = |t: f64, modes: &[Complex64], prev: f64| -> TransportSample {
        let s = FieldState::from_modes(grid, t, modes, &fft);
        let (energy_mean, energy_var) = ham.energy_moments(modes);
        TransportSample {
            t,
            y_mean: unwrap_near(s.y_circular_mean(), prev, grid.ly),
            velocity_mean: velocity_from_modes(&grid, modes),
            energy_mean,
            energy_var,
            norm: s.norm_sqr(),
            seam_mass: s.seam_mass(SEAM_CELLS),
        }
    };
    let mut modes = state.to_modes(&fft);
    let mut samples = vec![observe(0.0, &modes, y0)];
    prop.run(&mut modes, steps, |s, m| {
        if s % config.record_every == 0 || s == steps {
            let prev = samples.last().unwrap().y_mean;
            samples.push(observe(s as f64 * config.dt, m, prev));
        }
    })?;

    let t_end = samples.last().unwrap().t;
    let commutator_average = samples
        .windows(2)
        .map(|w| 0.5 * (w[0].velocity_mean + w[1].velocity_mean) * (w[1].t - w[0].t))
        .sum::<f64>()
        / t_end;
    let commutator_threshold = 0.5 * budget.nu * filter.retained - COMMUTATOR_TOL;
    let ehrenfest_residual = samples
        .windows(2)
        .map(|w| {
            let rate = (w[1].y_mean - w[0].y_mean) / (w[1].t - w[0].t);
            (rate + 0.5 * (w[0].velocity_mean + w[1].velocity_mean)).abs()
        })
        .fold(0.0, f64::max);
    let max_seam_mass = samples.iter().map(|s| s.seam_mass).fold(0.0, f64::max);
    let n0 = samples[0].norm;
    let max_norm_drift = samples.iter().map(|s| (s.norm - n0).abs()).fold(0.0, f64::max);
    let commutator_pass = commutator_average >= commutator_threshold;
    let monotone_pass = samples.windows(2).all(|w| w[1].y_mean < w[0].y_mean);
    let seam_ok = max_seam_mass < SEAM_LIMIT;
    Ok(TransportReport {
        config: config.clone(),
        window,
        budget,
        amplitude,
        sup_norm: impurity.sup_norm(),
        filter,
        samples,
        commutator_average,
        commutator_threshold,
        ehrenfest_residual,
        ehrenfest_ok: ehrenfest_residual <= EHRENFEST_TOL,
        max_seam_mass,
        max_norm_drift,
        commutator_pass,
        monotone_pass,
        seam_ok,
        pass: commutator_pass && monotone_pass,
    })
}
