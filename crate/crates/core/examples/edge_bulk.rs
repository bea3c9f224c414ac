//! Edge and bulk speed bounds as the field grows, and where the mass sits.

use hall_edge::mourre::band_scan;
use hall_edge::packet::{edge_bulk_contrast, edge_mass_profile, make_packet, mass_in, PacketShape};

fn main() -> hall_edge::Result<()> {
    let branches = band_scan(0, 0.05)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "B", "edge", "bulk", "envelope");
    for &b in &[1.0, 4.0, 16.0, 64.0, 100.0] {
        let c = edge_bulk_contrast(0, 1.0, b, 0.25, &branches)?;
        println!(
            "{b:>6} {:>12.5} {:>12.4e} {:>12.4e}",
            c.edge_bound, c.bulk_bound, c.bulk_envelope
        );
    }
    let edge = make_packet(
        0,
        PacketShape::Gaussian {
            center: 0.0,
            width: 0.2,
        },
        &branches,
    )?;
    let bulk = make_packet(
        0,
        PacketShape::Gaussian {
            center: 5.5,
            width: 0.2,
        },
        &branches,
    )?;
    println!("edge packet mass beyond x=6: {:e}", edge_mass_profile(&edge, 6.0)?);
    println!("bulk packet mass in [0, 1]:   {:e}", mass_in(&bulk, 0.0, 1.0)?);
    Ok(())
}
