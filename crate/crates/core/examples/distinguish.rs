//! Random secret generators separate a list of logical errors.

use qlistcode::bounds::k_of;
use qlistcode::protocol::distinguish_experiment;

fn main() -> qlistcode::Result<()> {
    let k = k_of(2, 0.1)?;
    let r = distinguish_experiment(20, 2, k, 0.5, 20_000, 3)?;
    println!(
        "K = {k}: {} collisions in {} trials (bound {:.4}), {} key bits",
        r.collisions.hits, r.collisions.trials, r.bound, r.key_bits
    );
    for (j, s) in r.steps.iter().enumerate() {
        if let Some(c) = s.conditional() {
            println!(
                "step {:>2}: {:>6} alive, Pr(commute) = {:.4} <= {:.4}",
                j + 1,
                s.alive,
                c.rate,
                s.limit()
            );
        }
    }
    Ok(())
}
