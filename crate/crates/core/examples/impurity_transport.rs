//! Filtered edge packet under admissible impurities, a few seeds.
//! Pass a config file path to override the defaults.

use hall_edge::halfplane::{transport_experiment, TransportConfig};
use hall_edge::mourre::band_scan;

fn main() -> hall_edge::Result<()> {
    let mut config = match std::env::args().nth(1) {
        Some(path) => TransportConfig::parse(&std::fs::read_to_string(path)?)?,
        None => TransportConfig::default(),
    };
    let branches = band_scan(config.n, 0.05)?;
    for seed in 0..4 {
        config.seed = seed;
        let r = transport_experiment(&config, &branches)?;
        println!(
            "seed {seed}: <i[Y,H]> {:.4} (threshold {:.4}), filtered {:.3}, monotone {}, seam {:.1e}, pass {}",
            r.commutator_average, r.commutator_threshold, r.filter.retained, r.monotone_pass, r.max_seam_mass, r.pass
        );
    }
    Ok(())
}
