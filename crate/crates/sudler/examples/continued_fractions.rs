//! Convergents of a few quadratic irrationals and the determinant identity.

use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    for spec in ["golden", "sqrt2", "[0;(2,50)]", "[0;2,(1,4)]"] {
        let t = ConvergentTable::build(&parse_alpha(spec)?, 8, PrecisionConfig::default())?;
        println!("{spec}  α = {:.15}", sudler::real::to_f64(t.alpha_value()));
        println!("{:>3} {:>4} {:>10} {:>10} {:>10} {:>10}  det", "k", "a_k", "p_k", "q_k", "δ_k", "η_k");
        for k in 0..8 {
            let a = if k == 0 { t.alpha().integer_part.to_string() } else { t.a(k).to_string() };
            println!(
                "{k:>3} {a:>4} {:>10} {:>10} {:>10.6} {:>10.6}  {}",
                t.p(k).to_string(),
                t.q(k).to_string(),
                t.delta_f64(k),
                t.eta_f64(k),
                t.determinant(k)
            );
        }
        println!();
    }
    Ok(())
}
