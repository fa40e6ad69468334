//! The product decomposition along Ostrowski digits, next to the direct sum.

use dashu_int::UBig;
use sudler::ostrowski::encode;
use sudler::sudler::{decompose, log_sudler};
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    let t = ConvergentTable::build(&parse_alpha("[0;(5)]")?, 8, PrecisionConfig::default())?;
    let n = 2_718u64;
    let digits = encode(&t, &UBig::from(n))?;
    let dec = decompose(&t, &digits)?;
    println!("N = {n}, digits {:?}", digits.digits());
    for f in &dec.factors {
        println!("  k={} b={} shift={:+.6} log P_q_k(α, ·) = {:+.9}", f.k, f.b, f.shift, f.product.log_value);
    }
    println!("per-k sums: {:?}", dec.per_k.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>());
    println!("decomposed {:.12}", dec.total);
    println!("direct     {:.12}", log_sudler(&t, n)?.log_value);
    Ok(())
}
