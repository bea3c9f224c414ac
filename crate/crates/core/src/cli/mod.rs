//! Command-line front end: dispersion scans, Mourre constants, band drift,
//! half-plane transport and the aggregated check suite.
//!
//! Exit codes: 0 success, 1 failed scientific check or solver failure,
//! 2 usage error.

mod manifest;
mod verify;

pub use manifest::{sha256_hex, OutputFile, OutputSet, RunManifest};
pub use verify::{run_verify, CheckRecord, CheckStatus, Section, VerifyReport};

use crate::band::{dispersion_scan, unscale};
use crate::error::{EdgeError, Result};
use crate::halfplane::{transport_experiment, TransportConfig};
use crate::mourre::{band_scan, mourre_budget, nu_window, threshold_conditions, LandauBandWindow};
use crate::packet::{drift_experiment, make_packet, PacketShape};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::fmt::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Spacing of the κ scans behind mourre, propagate and simulate.
const SCAN_SPACING: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "edgelab",
    version,
    about = "Edge states of a magnetic half-plane with a hard wall"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Directory receiving CSV, JSON and manifest files
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Impurity seed; overrides the seed in a simulate config
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel scans (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Override for the numeric tolerances of checks
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispersion branches α_n(κ) as CSV
    Bands {
        #[arg(long)]
        nmax: usize,
        #[arg(long, allow_negative_numbers = true)]
        kmin: f64,
        #[arg(long, allow_negative_numbers = true)]
        kmax: f64,
        #[arg(long)]
        dk: f64,
        /// Field strength for an additional physical-units CSV
        #[arg(long = "B")]
        b_field: Option<f64>,
    },
    /// Positive-commutator constants for L_n^{λ,λ′}
    Mourre {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        lambda_prime: f64,
    },
    /// Free band evolution of a window packet and its drift sandwich
    Propagate {
        #[arg(long)]
        n: usize,
        /// Energy window as lower:upper
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
        #[arg(long = "T", default_value_t = 5.0)]
        t_final: f64,
        #[arg(long, default_value_t = 41)]
        samples: usize,
    },
    /// Half-plane transport run from a key=value config file
    Simulate { config: PathBuf },
    /// Run the check suite and write a JSON report
    Verify {
        #[arg(long, value_enum, value_delimiter = ',')]
        sections: Vec<Section>,
    },
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lower:upper")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("lower: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("upper: {e}"))?;
    if !(lo < hi) {
        return Err(format!("need lower < upper, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Messages go to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.messages {
                eprintln!("{line}");
            }
            if outcome.pass {
                EXIT_OK
            } else {
                EXIT_CHECK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &EdgeError) -> i32 {
    match e {
        EdgeError::Domain(_) | EdgeError::Config(_) | EdgeError::Rejected(_) => EXIT_USAGE,
        _ => EXIT_CHECK,
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub manifest: RunManifest,
    pub pass: bool,
    pub messages: Vec<String>,
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let dir = g.out_dir.as_path();
    match &cli.command {
        &Command::Bands {
            nmax,
            kmin,
            kmax,
            dk,
            b_field,
        } => cmd_bands(dir, nmax, kmin, kmax, dk, b_field),
        &Command::Mourre {
            n,
            lambda,
            lambda_prime,
        } => cmd_mourre(dir, n, lambda, lambda_prime),
        &Command::Propagate {
            n,
            window,
            t_final,
            samples,
        } => cmd_propagate(dir, n, window, t_final, samples, g.tol),
        Command::Simulate { config } => cmd_simulate(dir, config, g.seed),
        Command::Verify { sections } => cmd_verify(dir, sections, g.tol),
    }
}

fn cmd_bands(dir: &Path, nmax: usize, kmin: f64, kmax: f64, dk: f64, b_field: Option<f64>) -> Result<Outcome> {
    if nmax > crate::band::fiber::MAX_BAND {
        return Err(EdgeError::Domain(format!(
            "--nmax at most {}",
            crate::band::fiber::MAX_BAND
        )));
    }
    if let Some(b) = b_field {
        if !(b > 0.0) {
            return Err(EdgeError::Domain(format!("--B must be positive, got {b}")));
        }
    }
    let params = serde_json::json!({"nmax": nmax, "kmin": kmin, "kmax": kmax, "dk": dk, "B": b_field});
    let mut out = OutputSet::new(dir, "bands", params, None)?;
    let branches = dispersion_scan(nmax, kmin, kmax, dk)?;
    let mut csv = String::from("n,kappa,alpha,alpha_prime_fh,alpha_prime_fd,phi_prime_0\n");
    for b in &branches {
        for s in &b.samples {
            writeln!(
                csv,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                b.n, s.kappa, s.alpha, s.alpha_prime_fh, s.alpha_prime_fd, s.phi_prime_0
            )
            .unwrap();
        }
    }
    out.write("bands.csv", &csv)?;
    if let Some(b) = b_field {
        let mut csv = String::from("n,B,k,energy,speed\n");
        for br in &branches {
            for u in unscale(br, b)? {
                writeln!(
                    csv,
                    "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                    u.n, u.b_field, u.k, u.energy, u.speed
                )
                .unwrap();
            }
        }
        out.write("bands_unscaled.csv", &csv)?;
    }
    let rows = branches.iter().map(|b| b.len()).sum::<usize>();
    Ok(Outcome {
        manifest: out.finish()?,
        pass: true,
        messages: vec![format!("bands: {} branches, {rows} rows", branches.len())],
    })
}

fn cmd_mourre(dir: &Path, n: usize, lambda: f64, lambda_prime: f64) -> Result<Outcome> {
    LandauBandWindow::new(n, lambda, lambda_prime)?;
    let params = serde_json::json!({"n": n, "lambda": lambda, "lambda_prime": lambda_prime});
    let mut out = OutputSet::new(dir, "mourre", params, None)?;
    let branches = band_scan(n, SCAN_SPACING)?;
    let budget = mourre_budget(n, lambda, lambda_prime, &branches)?;
    out.write_json("mourre.json", &budget)?;
    let mut messages = vec![format!(
        "mourre: sigma={:.6e} nu={:.6e} delta_admissible={:.6e}",
        budget.sigma, budget.nu, budget.delta_admissible
    )];
    if lambda < 0.5 && lambda_prime < 0.5 {
        let check = threshold_conditions(n, budget.delta_admissible, lambda, lambda_prime, &branches)?;
        out.write_json("threshold.json", &check)?;
        messages.push(format!("threshold: largest delta {:.6e}", check.delta_bound));
    }
    Ok(Outcome {
        manifest: out.finish()?,
        pass: true,
        messages,
    })
}

fn cmd_propagate(
    dir: &Path,
    n: usize,
    window: (f64, f64),
    t_final: f64,
    samples: usize,
    tol: Option<f64>,
) -> Result<Outcome> {
    if !(t_final > 0.0) {
        return Err(EdgeError::Domain(format!("--T must be positive, got {t_final}")));
    }
    let tol = tol.unwrap_or(5e-3);
    let params = serde_json::json!({
        "n": n, "window": [window.0, window.1], "T": t_final, "samples": samples, "tol": tol,
    });
    let mut out = OutputSet::new(dir, "propagate", params, None)?;
    let branches = band_scan(n, SCAN_SPACING)?;
    let w = nu_window(window.0, window.1, &branches)?;
    let p = make_packet(
        n,
        PacketShape::Window {
            lower: window.0,
            upper: window.1,
        },
        &branches,
    )?;
    let times: Vec<f64> = (0..samples)
        .map(|i| t_final * i as f64 / (samples.max(2) - 1) as f64)
        .collect();
    let rec = drift_experiment(&p, &w, &times, tol)?;
    out.write("drift.csv", &rec.to_csv())?;
    out.write_json("drift.json", &rec.report())?;
    Ok(Outcome {
        manifest: out.finish()?,
        pass: rec.pass,
        messages: vec![format!(
            "propagate: slope={:.6e} in [{:.6e}, {:.6e}]: {}",
            rec.slope,
            -rec.nu_plus,
            -rec.nu_minus,
            if rec.pass { "pass" } else { "fail" }
        )],
    })
}

fn cmd_simulate(dir: &Path, path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let bytes = std::fs::read(path).map_err(|e| EdgeError::Config(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| EdgeError::Config(e.to_string()))?;
    let mut config = TransportConfig::parse(&text)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let params = serde_json::json!({"config": config.to_text(), "path": path.display().to_string()});
    let mut out = OutputSet::new(dir, "simulate", params, Some(&bytes))?;
    let branches = band_scan(config.n, SCAN_SPACING)?;
    let report = transport_experiment(&config, &branches)?;
    out.write("transport.csv", &report.to_csv())?;
    out.write_json("transport.json", &report.verdict())?;
    Ok(Outcome {
        manifest: out.finish()?,
        pass: report.pass,
        messages: vec![format!(
            "simulate: commutator {:.6e} vs threshold {:.6e}, monotone {}: {}",
            report.commutator_average,
            report.commutator_threshold,
            report.monotone_pass,
            if report.pass { "pass" } else { "fail" }
        )],
    })
}

fn cmd_verify(dir: &Path, sections: &[Section], tol: Option<f64>) -> Result<Outcome> {
    let params = serde_json::json!({"sections": sections, "tol": tol});
    let mut out = OutputSet::new(dir, "verify", params, None)?;
    let report = run_verify(sections, tol)?;
    out.write_json("verify.json", &report)?;
    let messages = report
        .failures()
        .map(|r| {
            format!(
                "FAIL [{:?}] {} n={:?}: value {:e} reference {:e}",
                r.section, r.check, r.n, r.value, r.reference
            )
        })
        .chain(std::iter::once(format!(
            "verify: {} checks, {} hard failures",
            report.records.len(),
            report.hard_failures
        )))
        .collect();
    Ok(Outcome {
        manifest: out.finish()?,
        pass: report.pass,
        messages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("edgelab").chain(args.iter().copied()))
    }

    #[test]
    fn negative_kappa_and_globals() {
        let c = parse(&[
            "bands", "--nmax", "3", "--kmin", "-2", "--kmax", "5", "--dk", "0.05", "--seed", "4",
        ])
        .unwrap();
        assert_eq!(c.global.seed, Some(4));
        assert!(matches!(c.command, Command::Bands { kmin, .. } if kmin == -2.0));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_from(["edgelab", "bands", "--nmax", "1"]), EXIT_USAGE);
        assert_eq!(
            run_from(["edgelab", "propagate", "--n", "0", "--window", "1.0:0.9"]),
            EXIT_USAGE
        );
        assert_eq!(run_from(["edgelab", "frobnicate"]), EXIT_USAGE);
    }

    #[test]
    fn window_and_sections_parse() {
        assert_eq!(parse_window("0.9:1.0"), Ok((0.9, 1.0)));
        assert!(parse_window("0.9").is_err());
        let c = parse(&["verify", "--sections", "lemma,conjecture"]).unwrap();
        assert!(
            matches!(c.command, Command::Verify { ref sections } if sections == &[Section::Lemma, Section::Conjecture])
        );
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&EdgeError::Config("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&EdgeError::Accuracy {
                message: "x".into(),
                suggested_points: 3
            }),
            EXIT_CHECK
        );
    }
}
