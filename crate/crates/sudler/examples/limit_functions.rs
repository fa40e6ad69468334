//! Empirical limit curves next to their closed forms.
//!
//! Run with `cargo run --release --example limit_functions`.

use std::f64::consts::PI;

use sudler::limitfn::{self, find_crossing, g_alpha, g_closed, limit_constants, sup_distance};
use sudler::sudler::DEFAULT_BUDGET;
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    let cfg = PrecisionConfig::default();
    let grid: Vec<f64> = (0..=38).map(|i| -0.95 + 0.05 * i as f64).collect();

    let t15 = ConvergentTable::build(&parse_alpha("[0;(15)]")?, 8, cfg)?;
    let k4 = limitfn::empirical_limit(&t15, 4, &grid, DEFAULT_BUDGET)?;
    let k6 = limitfn::empirical_limit(&t15, 6, &grid, 2 * DEFAULT_BUDGET)?;
    let closed: Vec<f64> = grid.iter().map(|&x| g_alpha(15, x)).collect::<Result<_, _>>()?;
    println!("[0;(15)]  sup|k=4 − k=6| = {:.3e}", sup_distance(&k4, &k6));
    println!("[0;(15)]  sup|k=4 − G|   = {:.3e}", sup_distance(&k4, &closed));

    println!("\n{:>6} {:>12} {:>12} {:>12}", "x", "k=4", "G_α", "|2sin πx|");
    for (i, &x) in grid.iter().enumerate().step_by(4) {
        println!("{x:>6.2} {:>12.6} {:>12.6} {:>12.6}", k4[i], closed[i], 2.0 * (PI * x).sin().abs());
    }

    let alpha = parse_alpha("[0;(2,50)]")?;
    let t = ConvergentTable::build(&alpha, 8, cfg)?;
    println!();
    for k in [4usize, 5] {
        let q = t.q_u64(k).expect("small denominator");
        let curve = |x: f64| -> sudler::Result<f64> {
            Ok(limitfn::empirical_limit(&t, k, &[x], q)?[0])
        };
        let cross = find_crossing(curve, 0.5, 0.999, 1.0, 200)?;
        let r = if t.a(k) == 50 { 2 } else { 1 };
        let lc = limit_constants(&alpha, r, 128)?;
        let closed = find_crossing(|x| g_closed(&lc, x), 0.5, 0.999, 1.0, 200)?;
        println!(
            "[0;(2,50)] k={k} (a_k={:>2}): P crosses 1 at {:.4}, closed form at {:.4}",
            t.a(k),
            cross.unwrap_or(f64::NAN),
            closed.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
