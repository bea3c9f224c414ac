//! Fiber eigenvalues against zeros of α ↦ D_{α-1/2}(-√2κ).

use hall_edge::band::{solve_fiber, FiberGrid};
use hall_edge::specfun::{pcf_d, quantization_excess, quantization_roots};

fn main() -> hall_edge::Result<()> {
    println!(
        "{:>6} {:>3} {:>20} {:>20} {:>10}",
        "kappa", "n", "fiber", "pcf root", "diff"
    );
    for &k in &[-2.0, -0.5, 0.0, 1.0, 3.0, 6.0] {
        let sols = solve_fiber(k, 2, &FiberGrid::for_kappa(k))?;
        let roots = quantization_roots(k, sols[2].alpha + 0.25, 0.01)?;
        for (s, r) in sols.iter().zip(&roots.roots) {
            println!(
                "{k:>6.2} {:>3} {:>20.14} {:>20.14} {:>10.2e}",
                s.n,
                s.alpha,
                r,
                s.alpha - r
            );
        }
    }
    let d = pcf_d(1.0, 0.0)?;
    println!("\nD_1(0) = {:e} via {:?}", d.value, d.method);
    for &k in &[4.0, 6.0, 8.0] {
        println!("alpha_0({k}) - 1/2 = {:e}", quantization_excess(0, k)?);
    }
    Ok(())
}
