//! ⟨Ỹ⟩(t) of window packets against -ν₊ t ≤ Δ⟨Ỹ⟩ ≤ -ν₋ t.

use hall_edge::mourre::{band_scan, nu_window};
use hall_edge::packet::{drift_experiment, make_packet, PacketShape};

fn main() -> hall_edge::Result<()> {
    let times: Vec<f64> = (0..=40).map(|i| 0.125 * i as f64).collect();
    for &(n, lo, hi) in &[(0, 0.9, 1.0), (0, 0.6, 1.4), (1, 1.9, 2.1), (1, 2.3, 2.45)] {
        let branches = band_scan(n, 0.05)?;
        let window = nu_window(lo, hi, &branches)?;
        let p = make_packet(n, PacketShape::Window { lower: lo, upper: hi }, &branches)?;
        let r = drift_experiment(&p, &window, &times, 5e-3)?;
        println!(
            "n={n} [{lo}, {hi}]: slope {:.6} in [{:.6}, {:.6}] branches {:?} pass {}",
            r.slope,
            -r.nu_plus,
            -r.nu_minus,
            window.contributing(),
            r.pass
        );
    }
    Ok(())
}
