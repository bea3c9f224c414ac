//! Split-step simulator at W = 0 against exact band evolution.

use hall_edge::halfplane::{embed_packet, evolve, ImpurityField, RowFft, SimGrid};
use hall_edge::mourre::band_scan;
use hall_edge::packet::{evolve_free, make_packet, PacketShape};

fn main() -> hall_edge::Result<()> {
    let branches = band_scan(0, 0.05)?;
    let p = make_packet(
        0,
        PacketShape::Gaussian {
            center: 0.5,
            width: 0.3,
        },
        &branches,
    )?;
    for &(nx, dt) in &[(175, 0.02), (350, 0.01), (700, 0.005)] {
        let grid = SimGrid::new(nx, 128, 14.0, 40.0)?;
        let fft = RowFft::new(grid.ny);
        let s0 = embed_packet(&p, grid, 20.0, &fft)?;
        let s1 = evolve(&s0, &ImpurityField::zero(grid), dt, (1.0 / dt).round() as usize)?;
        let exact = embed_packet(&evolve_free(&p, 1.0), grid, 20.0, &fft)?;
        println!(
            "nx={nx:>4} dt={dt}: distance {:.3e}, <Y> {:.6} vs {:.6}, norm change {:.1e}",
            s1.distance(&exact),
            s1.y_circular_mean(),
            exact.y_circular_mean(),
            s1.norm_sqr() - s0.norm_sqr()
        );
    }
    Ok(())
}
