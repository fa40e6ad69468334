//! Exhaustive scan of `P_N` below `q_K`: maximiser and `ℓ^c` norms.

use sudler::sudler::{scan, ScanConfig};
use sudler::theorems::{lcnorm_prediction, log_p_n_star};
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    let t = ConvergentTable::build(&parse_alpha("[0;(12)]")?, 6, PrecisionConfig::default())?;
    let cs = [0.5, 1.0, 2.0, 8.0, 64.0];
    let r = scan(&t, 4, &cs, &ScanConfig { keep_values: false, ..ScanConfig::default() })?;
    println!("q_4 = {}, argmax N = {} digits {:?}, log P = {:.6}", r.q_k, r.argmax_n, r.argmax_digits, r.max_log);
    let star = log_p_n_star(&t, 4)?;
    println!("log P_N* = {star:.6}");
    for c in cs {
        let p = lcnorm_prediction(&t, &r, c, star, 1.0)?;
        println!(
            "c = {c:>4}: (1/c) log Σ P_N^c = {:>10.6}  prediction {:>10.6}  shape {:.3}",
            p.observed, p.prediction, p.error_budget
        );
    }
    Ok(())
}
