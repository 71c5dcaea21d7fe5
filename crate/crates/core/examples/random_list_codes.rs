//! How often random [[10,2]] codes fail to be 2-list decodable at t = 1.

use qlistcode::listcode::{build_table, union_bound};
use qlistcode::stabilizer::random_code;
use qlistcode::stats::{trial_rng, Proportion};

fn main() -> qlistcode::Result<()> {
    let codes = 500;
    let mut histogram = [0u64; 6];
    for i in 0..codes {
        let code = random_code(10, 2, &mut trial_rng(2024, i))?;
        let l = build_table(&code, 1)?.report().l_min;
        histogram[l.min(5)] += 1;
    }
    println!("L_min histogram: {histogram:?}");
    let bad = histogram[3..].iter().sum();
    let p = Proportion::new(bad, codes);
    println!(
        "not 2-list: {:.4} [{:.4}, {:.4}], union bound {:.5}",
        p.rate,
        p.lo,
        p.hi,
        union_bound(10, 2, 1, 2)
    );
    Ok(())
}
