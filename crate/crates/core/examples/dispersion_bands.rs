//! Branches α_0..α_3 on κ ∈ [-2, 5] printed as CSV on stdout.

use hall_edge::band::dispersion_scan;

fn main() -> hall_edge::Result<()> {
    let branches = dispersion_scan(3, -2.0, 5.0, 0.05)?;
    println!("kappa,alpha_0,alpha_1,alpha_2,alpha_3");
    for i in 0..branches[0].len() {
        let k = branches[0].samples[i].kappa;
        let row: Vec<String> = branches.iter().map(|b| format!("{:.10}", b.samples[i].alpha)).collect();
        println!("{k:.2},{}", row.join(","));
    }
    Ok(())
}
