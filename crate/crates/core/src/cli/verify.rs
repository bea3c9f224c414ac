//! Aggregated check suite behind `edgelab verify`.

use crate::band::{conjecture_report, envelope_solutions, verify_lemma, LemmaTolerances};
use crate::band::{dispersion_scan, edge_velocity_at_zero};
use crate::error::Result;
use crate::mourre::{band_scan, delta_n, mourre_budget, nu_window};
use crate::packet::{drift_experiment, edge_bulk_contrast, evolve_free, make_packet, y_expectation, PacketShape};
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Lemma,
    Mourre,
    Packet,
    Conjecture,
}

impl Section {
    pub const ALL: [Section; 4] = [Section::Lemma, Section::Mourre, Section::Packet, Section::Conjecture];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Informational,
}

fn finite_or_tag<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub section: Section,
    pub check: String,
    pub n: Option<usize>,
    #[serde(serialize_with = "finite_or_tag")]
    pub value: f64,
    #[serde(serialize_with = "finite_or_tag")]
    pub reference: f64,
    #[serde(serialize_with = "finite_or_tag")]
    pub tolerance: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub sections: Vec<Section>,
    pub records: Vec<CheckRecord>,
    pub hard_failures: usize,
    pub pass: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == CheckStatus::Fail)
    }
}

struct Sink {
    section: Section,
    records: Vec<CheckRecord>,
}

impl Sink {
    fn hard(&mut self, check: &str, n: Option<usize>, value: f64, reference: f64, tolerance: f64, pass: bool) {
        let status = if pass && value.is_finite() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        self.push(check, n, value, reference, tolerance, status);
    }

    fn info(&mut self, check: &str, n: Option<usize>, value: f64, reference: f64) {
        self.push(check, n, value, reference, 0.0, CheckStatus::Informational);
    }

    fn push(&mut self, check: &str, n: Option<usize>, value: f64, reference: f64, tolerance: f64, status: CheckStatus) {
        self.records.push(CheckRecord {
            section: self.section,
            check: check.to_string(),
            n,
            value,
            reference,
            tolerance,
            status,
        });
    }
}

/// Runs the requested sections in a fixed order. `tol` overrides every
/// numeric tolerance of the hard checks.
pub fn run_verify(sections: &[Section], tol: Option<f64>) -> Result<VerifyReport> {
    let mut chosen: Vec<Section> = Section::ALL.iter().copied().filter(|s| sections.contains(s)).collect();
    if sections.is_empty() {
        chosen = Section::ALL.to_vec();
    }
    let needs_scan = chosen.iter().any(|s| matches!(s, Section::Lemma | Section::Conjecture));
    let scan = if needs_scan {
        Some(dispersion_scan(3, -4.0, 8.0, 0.05)?)
    } else {
        None
    };

    let mut records = Vec::new();
    for &section in &chosen {
        let mut sink = Sink {
            section,
            records: Vec::new(),
        };
        match section {
            Section::Lemma => lemma(&mut sink, scan.as_deref().unwrap(), tol)?,
            Section::Mourre => mourre(&mut sink, tol)?,
            Section::Packet => packet(&mut sink, tol)?,
            Section::Conjecture => conjecture(&mut sink, scan.as_deref().unwrap()),
        }
        records.extend(sink.records);
    }
    let hard_failures = records.iter().filter(|r| r.status == CheckStatus::Fail).count();
    Ok(VerifyReport {
        sections: chosen,
        records,
        hard_failures,
        pass: hard_failures == 0,
    })
}

fn lemma(sink: &mut Sink, branches: &[crate::band::DispersionBranch], tol: Option<f64>) -> Result<()> {
    let tolerances = tol.map_or_else(LemmaTolerances::default, LemmaTolerances::with_tol);
    let report = verify_lemma(branches, &envelope_solutions(3)?, &tolerances)?;
    for r in &report.records {
        sink.hard(
            &format!("({}) {}", r.claim, r.check),
            Some(r.n),
            r.value,
            r.reference,
            r.tolerance,
            r.pass,
        );
    }
    Ok(())
}

fn mourre(sink: &mut Sink, tol: Option<f64>) -> Result<()> {
    let coarse = band_scan(2, 0.05)?;
    let fine = band_scan(2, 0.025)?;
    for n in 0..2 {
        let d = delta_n(n, &coarse)?;
        sink.hard("delta_n = 1", Some(n), d, 1.0, 0.0, d == 1.0);
    }
    let (a, b) = (delta_n(2, &coarse)?, delta_n(2, &fine)?);
    let t = tol.unwrap_or(1e-4);
    sink.hard(
        "delta_2 change between spacings 0.05 and 0.025",
        Some(2),
        (a - b).abs(),
        0.0,
        t,
        (a - b).abs() <= t,
    );
    sink.info("delta_2", Some(2), b, 1.0);

    let ground = band_scan(0, 0.05)?;
    let budget = mourre_budget(0, 0.2, 0.2, &ground)?;
    sink.hard(
        "delta_admissible(0, 0.2, 0.2) > 0",
        Some(0),
        budget.delta_admissible,
        0.0,
        0.0,
        budget.delta_admissible > 0.0,
    );
    sink.info("nu(0, 0.1)", Some(0), budget.nu, 0.0);
    Ok(())
}

fn packet(sink: &mut Sink, tol: Option<f64>) -> Result<()> {
    let branches = band_scan(0, 0.05)?;
    let window = nu_window(0.9, 1.0, &branches)?;
    let p = make_packet(0, PacketShape::Window { lower: 0.9, upper: 1.0 }, &branches)?;
    let times: Vec<f64> = (0..=40).map(|i| 5.0 * i as f64 / 40.0).collect();
    let t = tol.unwrap_or(5e-3);
    let rec = drift_experiment(&p, &window, &times, t)?;
    sink.hard(
        "drift slope >= -nu_plus on [0.9, 1.0]",
        Some(0),
        rec.slope,
        rec.lower_bound(),
        t,
        rec.slope >= rec.lower_bound(),
    );
    sink.hard(
        "drift slope <= -nu_minus on [0.9, 1.0]",
        Some(0),
        rec.slope,
        rec.upper_bound(),
        t,
        rec.slope <= rec.upper_bound(),
    );
    sink.hard(
        "y_expectation decreasing",
        Some(0),
        rec.monotone as u8 as f64,
        1.0,
        0.0,
        rec.monotone,
    );

    let narrow = make_packet(
        0,
        PacketShape::Gaussian {
            center: 0.0,
            width: 0.02,
        },
        &branches,
    )?;
    let y = y_expectation(&evolve_free(&narrow, 1.0)) - y_expectation(&narrow);
    let want = edge_velocity_at_zero(0);
    let t = tol.unwrap_or(2e-3);
    sink.hard(
        "narrow packet displacement at t=1 vs alpha'_0(0)",
        Some(0),
        y,
        want,
        t,
        (y - want).abs() <= t,
    );

    let c = edge_bulk_contrast(0, 1.0, 16.0, 0.25, &branches)?;
    let edge_ref = 0.5 * c.b_field.sqrt();
    sink.hard(
        "edge speed bound >= 0.5 sqrt(B), B=16",
        Some(0),
        c.edge_bound,
        edge_ref,
        0.0,
        c.edge_at_least(0.5),
    );
    let bulk_ref = c.b_field.sqrt() * (-0.4 * c.b_field.sqrt()).exp();
    sink.hard(
        "bulk speed bound <= sqrt(B) exp(-0.4 sqrt(B)), B=16",
        Some(0),
        c.bulk_bound,
        bulk_ref,
        0.0,
        c.bulk_at_most(1.0, 0.4),
    );
    Ok(())
}

fn conjecture(sink: &mut Sink, branches: &[crate::band::DispersionBranch]) {
    let r = conjecture_report(branches);
    for c in &r.curvature {
        sink.info(
            "min second difference of alpha_n",
            Some(c.n),
            c.min_second_difference,
            0.0,
        );
    }
    if let (Some(g), Some(e)) = (r.min_gap, r.min_gap_excess) {
        sink.info("min alpha_{n+1} - alpha_n", None, g, 1.0);
        sink.info("min alpha_{n+1} - alpha_n - 1", None, e, 0.0);
    }
}
