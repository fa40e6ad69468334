//! Vasyunin sums and the shifted sums `V_k`, `V_k*` against their main terms.

use sudler::cotangent::{vasyunin, VkKernel};
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    println!("Σ (n/5) cot(2πn/5) = {:.9}", vasyunin(2, 5, 0.0, 1)?);

    let t = ConvergentTable::build(&parse_alpha("[0;(15)]")?, 6, PrecisionConfig::default())?;
    let kernel = VkKernel::new(&t, 4)?;
    println!("\n[0;(15)], k = 4, q = {}", kernel.q());
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "x", "V/δ", "main", "V*/δ", "main*");
    let d = kernel.delta();
    for i in -9..=9 {
        let x = i as f64 / 10.0;
        println!(
            "{x:>6.2} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            kernel.v(x)? / d,
            kernel.main_term(x, false)? / d,
            kernel.v_star(x)? / d,
            kernel.main_term(x, true)? / d,
        );
    }
    Ok(())
}
