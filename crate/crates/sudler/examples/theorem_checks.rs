//! Digit penalties, the value at `N*`, and the quadratic law near `5/6`.

use sudler::theorems::{self, QUADRATIC_SLOPE};
use sudler::verify::{self, Suite, SuiteContext};
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    let cfg = PrecisionConfig::default();
    let t = ConvergentTable::build(&parse_alpha("[0;(20)]")?, 5, cfg)?;
    let star = theorems::pnstar_prediction(&t, 3, 1.0)?;
    println!("log P_N*: observed {:.6}, main term {:.6}", star.observed, star.prediction);

    let samples = theorems::theorem1_samples(&t, 3, 0, &[0, 1_000, 4_321, 7_000])?;
    for s in samples {
        println!("N = {:>5}: log P_N − log P_N* = {:>9.4}, −Σ d_k = {:>9.4}", s.n, s.observed, s.prediction);
    }

    let wide = ConvergentTable::build(&parse_alpha("[0;(50)]")?, 5, cfg)?;
    let slope = theorems::quadratic_slope(&wide, 3, 1, 5)?;
    println!("quadratic slope {slope:.4} vs {QUADRATIC_SLOPE:.4}");

    let report = verify::run_suite(Suite::Constants, &SuiteContext::default(), &Default::default())?;
    for note in report.notes {
        println!("{note}");
    }
    Ok(())
}
