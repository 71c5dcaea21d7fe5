//! Failure rates of several adversaries as the key grows.

use qlistcode::adversary::{
    estimate_failure, exhaustive_worst, uniform_strategy, worst_pair_strategy, KeyedCodeFactory,
    Strategy,
};
use qlistcode::pauli::DEFAULT_ENUMERATION_CAP;
use qlistcode::stabilizer::four_qubit_detection_code;

fn main() -> qlistcode::Result<()> {
    for k_extra in 0..=1 {
        let f = KeyedCodeFactory::new(
            four_qubit_detection_code(),
            1,
            k_extra,
            0.5,
            DEFAULT_ENUMERATION_CAP,
        )?;
        let strategies: Vec<Box<dyn Strategy>> = vec![
            Box::new(uniform_strategy(4, 1)?),
            Box::new(worst_pair_strategy(&f.table)?),
            Box::new(exhaustive_worst(&f)?.strategy()),
        ];
        for s in &strategies {
            let est = estimate_failure(&f, s.as_ref(), 5000, 1)?;
            println!(
                "K={k_extra} {:>16}: failure {:.4}, decode failure {:.4} [{:.4}, {:.4}]",
                s.name(),
                est.failures.rate,
                est.decode_failures.rate,
                est.decode_failures.lo,
                est.decode_failures.hi
            );
        }
    }
    Ok(())
}
