//! Ostrowski digits: encode, decode, the near-maximiser `N*` and `ε_k` tails.

use dashu_int::UBig;
use sudler::ostrowski::{self, decode, encode, epsilon_profile, n_star};
use sudler::{parse_alpha, ConvergentTable, PrecisionConfig};

fn main() -> sudler::Result<()> {
    let t = ConvergentTable::build(&parse_alpha("[0;(6)]")?, 8, PrecisionConfig::default())?;
    for n in [0u64, 5, 36, 37, 200, 1000, 8000] {
        let d = encode(&t, &UBig::from(n))?;
        assert_eq!(decode(&t, &d)?, UBig::from(n));
        let eps = epsilon_profile(&t, &d)?;
        let tails: Vec<String> = (0..d.len())
            .map(|k| eps.get_f64(k).map_or("·".into(), |e| format!("{e:+.4}")))
            .collect();
        println!("N = {n:>5}  digits {:?}  ε = [{}]", d.digits(), tails.join(", "));
    }

    let star = n_star(&t, 4)?;
    println!("\nN* for K = 4: {} with digits {:?}", decode(&t, &star)?, star.digits());

    let count = ostrowski::enumerate_digits(&t, 3).len();
    println!("digit vectors of length 3: {count} (q_3 = {})", t.q(3));
    Ok(())
}
