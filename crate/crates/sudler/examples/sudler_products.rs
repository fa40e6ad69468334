//! Direct Sudler products at rational and irrational arguments.

use sudler::sudler::{log_last_term, log_sudler, log_sudler_rational};
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    // P_2(1/5) = √5.
    println!("P_2(1/5) = {:.12}", log_sudler_rational(1, 5, 2, 0.0)?.value());

    // Reflection: P_N(p/q, x) · P_{q−N−1}(p/q, −x) = |sin πqx| / |sin πx|.
    let (p, q, n, x) = (3, 17, 6, 0.21);
    let lhs = log_sudler_rational(p, q, n, x)?.log_value + log_sudler_rational(p, q, q - n - 1, -x)?.log_value;
    println!("reflection at 3/17: {lhs:.12} vs {:.12}", log_last_term(q, x).log_value);

    let t = ConvergentTable::build(&parse_alpha("golden")?, 30, PrecisionConfig::default())?;
    for k in [5, 10, 15, 20, 25] {
        let q = t.q_u64(k).unwrap();
        println!("golden: log P_{{q_{k}}} = log P_{q:<7} = {:.9}", log_sudler(&t, q)?.log_value);
    }
    Ok(())
}
