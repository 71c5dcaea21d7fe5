//! Spending logical qubits on secret generators drawn with a key.

use qlistcode::adversary::worst_pair_strategy;
use qlistcode::bounds::failure_bound;
use qlistcode::listcode::build_table;
use qlistcode::protocol::{run_trial, sweep_keys, KeySchedule};
use qlistcode::stabilizer::random_code;
use qlistcode::stats::trial_rng;

fn main() -> qlistcode::Result<()> {
    let base = random_code(8, 4, &mut trial_rng(5, 0))?;
    let table = build_table(&base, 1)?;
    let l = table.report().l_min;
    let schedule = KeySchedule::new(4, 2, 0.5)?;
    println!(
        "[[8,4]] with L_min = {l}; K = 2 uses {} key bits, eta_eff {:.3}",
        schedule.key_len(),
        schedule.eta_eff()
    );

    let key = schedule.random_key(&mut trial_rng(5, 1));
    let kc = schedule.augment(&base, &key)?;
    println!("key {}", key.to_hex());
    for g in kc.extra() {
        println!("  secret generator {g}");
    }

    // Two errors Eve cannot tell apart from the public syndrome alone.
    let pair = worst_pair_strategy(&table)?;
    for e in pair.pair() {
        let out = run_trial(&kc, &table, e)?;
        let sweep = sweep_keys(&schedule, &base, &table, e)?;
        println!(
            "error {e}: {} under this key; over all {} keys failure {:.4}, decode failure {:.4}",
            out.label(),
            sweep.keys,
            sweep.failure_rate(),
            sweep.decode_failure_rate()
        );
    }
    println!("bound {:.4}", failure_bound(l, schedule.eta_eff(), 2));
    Ok(())
}
