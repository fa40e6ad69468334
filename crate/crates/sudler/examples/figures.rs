//! Writes the comparison-figure CSV (empirical curve, closed form, residual) to stdout.

use sudler::verify::fig3_rows;
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    let t = ConvergentTable::build(&parse_alpha("[0;(15)]")?, 6, PrecisionConfig::default())?;
    println!("x,empirical,closed_form,residual");
    for [x, emp, closed, residual] in fig3_rows(&t, 4)? {
        println!("{x:.3},{emp:.9},{closed:.9},{residual:.3e}");
    }
    Ok(())
}
