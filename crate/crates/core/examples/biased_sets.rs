//! Small-bias sets from the powering construction.

use qlistcode::biased::{aghp, for_target, measure_bias};

fn main() -> qlistcode::Result<()> {
    for (m, ell) in [(8, 4), (8, 6), (12, 6), (16, 8)] {
        let set = aghp(m, ell)?;
        println!(
            "m={m:>2} ell={ell}: {:>6} elements, {:>2} key bits, bound {:.4}, measured {:.4}",
            set.size(),
            set.key_bits(),
            set.bias_bound(),
            measure_bias(&set)?
        );
    }
    let set = for_target(20, 0.25)?;
    println!(
        "target 0.25 at m=20: {} ({} key bits, effective bias {:.4})",
        set.construction().name(),
        set.key_bits(),
        set.effective_bias()
    );
    Ok(())
}
