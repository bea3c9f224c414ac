use super::{evolve_free, y_expectation, WavePacket};
use crate::band::lemma::linear_fit;
use crate::error::{EdgeError, Result};
use crate::mourre::SpectralWindow;
use serde::Serialize;
use std::fmt::Write;

/// Fewest time samples accepted for the slope fit.
pub const MIN_TIMES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftRecord {
    pub times: Vec<f64>,
    pub y_expectation: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub tol: f64,
    /// ⟨Ỹ⟩ strictly decreasing over the samples
    pub monotone: bool,
    /// slope ∈ [-ν₊(1+tol), -ν₋(1-tol)]
    pub pass: bool,
}

impl DriftRecord {
    pub fn lower_bound(&self) -> f64 {
        -self.nu_plus * (1.0 + self.tol)
    }

    pub fn upper_bound(&self) -> f64 {
        -self.nu_minus * (1.0 - self.tol)
    }

    /// `t,y_expectation` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,y_expectation\n");
        for (t, y) in self.times.iter().zip(&self.y_expectation) {
            writeln!(s, "{t:.16e},{y:.16e}").unwrap();
        }
        s
    }

    /// `{slope, nu_minus, nu_plus, pass}`
    pub fn report(&self) -> serde_json::Value {
        serde_json::json!({
            "slope": self.slope,
            "nu_minus": self.nu_minus,
            "nu_plus": self.nu_plus,
            "pass": self.pass,
        })
    }
}

/// ⟨Ỹ⟩ at each time and the least-squares slope, checked against the
/// sandwich -ν₊ t ≤ ⟨Ỹ⟩_t - ⟨Ỹ⟩_0 ≤ -ν₋ t of the window.
pub fn drift_experiment(p: &WavePacket, window: &SpectralWindow, times: &[f64], tol: f64) -> Result<DriftRecord> {
    if times.len() < MIN_TIMES {
        return Err(EdgeError::Domain(format!(
            "need at least {MIN_TIMES} times, got {}",
            times.len()
        )));
    }
    if !(0.0..1.0).contains(&tol) {
        return Err(EdgeError::Domain(format!("tolerance must lie in [0, 1), got {tol}")));
    }
    let y: Vec<f64> = times.iter().map(|&t| y_expectation(&evolve_free(p, t))).collect();
    let (slope, intercept) = linear_fit(times, &y);
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let monotone = order.windows(2).all(|w| y[w[1]] < y[w[0]]);
    let mut rec = DriftRecord {
        times: times.to_vec(),
        y_expectation: y,
        slope,
        intercept,
        nu_minus: window.nu_minus,
        nu_plus: window.nu_plus,
        tol,
        monotone,
        pass: false,
    };
    rec.pass = slope >= rec.lower_bound() && slope <= rec.upper_bound();
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mourre::nu_window;
    use crate::packet::fixture::branches;
    use crate::packet::{make_packet, PacketShape};

    fn times(t_max: f64, m: usize) -> Vec<f64> {
        (0..m).map(|j| t_max * j as f64 / (m - 1) as f64).collect()
    }

    #[test]
    fn window_packet_respects_the_sandwich() {
        let br = branches();
        let w = nu_window(0.9, 1.0, br).unwrap();
        let p = make_packet(0, PacketShape::Window { lower: 0.9, upper: 1.0 }, br).unwrap();
        let rec = drift_experiment(&p, &w, &times(5.0, 21), 1e-3).unwrap();
        assert!(
            rec.pass,
            "{} not in [{}, {}]",
            rec.slope,
            rec.lower_bound(),
            rec.upper_bound()
        );
        assert!(rec.monotone && rec.slope < 0.0);
        assert!(rec.to_csv().lines().count() == 22);
    }

    #[test]
    fn two_branch_window() {
        let br = branches();
        let w = nu_window(1.9, 2.1, br).unwrap();
        let p = make_packet(1, PacketShape::Window { lower: 1.9, upper: 2.1 }, br).unwrap();
        assert_eq!(p.components.len(), 2);
        let rec = drift_experiment(&p, &w, &times(2.0, 25), 1e-3).unwrap();
        assert!(rec.pass && rec.monotone);
    }

    #[test]
    fn point_window_drifts_at_the_local_speed() {
        let br = branches();
        let (lo, hi) = (0.95 - 5e-3, 0.95 + 5e-3);
        let w = nu_window(lo, hi, br).unwrap();
        let p = make_packet(0, PacketShape::Window { lower: lo, upper: hi }, br).unwrap();
        let rec = drift_experiment(&p, &w, &times(1.0, 20), 1e-2).unwrap();
        let speed = br[0].velocity_at(w.preimages[0].kappa_lo).unwrap().abs();
        assert!(rec.pass);
        assert!((rec.slope + speed).abs() < 0.05 * speed, "{} vs {speed}", rec.slope);
    }

    #[test]
    fn too_few_times() {
        let br = branches();
        let w = nu_window(0.9, 1.0, br).unwrap();
        let p = make_packet(0, PacketShape::Window { lower: 0.9, upper: 1.0 }, br).unwrap();
        assert!(drift_experiment(&p, &w, &times(1.0, 5), 1e-3).is_err());
    }
}
