//! A coherent superposition of errors, measured and corrected.

use qlistcode::coherent::{expected_fidelity, Encoder, KrausSet, StateVec};
use qlistcode::gf2::BitVec;
use qlistcode::listcode::build_table;
use qlistcode::protocol::{augment, KeySchedule};
use qlistcode::stabilizer::{five_qubit_code, four_qubit_detection_code};
use qlistcode::stats::trial_rng;

fn main() -> qlistcode::Result<()> {
    let mut rng = trial_rng(8, 0);

    let five = five_qubit_code();
    let attack = KrausSet::parse("0.5 0 XIIII\n0.5 0 IXIII\n\n0.5 0 XIIII\n-0.5 0 IXIII\n")?;
    let kc = augment(&five, 0, &BitVec::zeros(0), 0.5)?;
    let enc = Encoder::new(kc.augmented())?;
    let psi = StateVec::random(1, &mut rng);
    let f = expected_fidelity(&kc, &build_table(&five, 1)?, &enc, &attack, &psi)?;
    println!("[[5,1]] under (X1 +- X2)/2: fidelity {f:.12}");

    let four = four_qubit_detection_code();
    let table = build_table(&four, 1)?;
    let attack = KrausSet::parse("0.5 0 XIII\n0.5 0 IXII\n\n0.5 0 XIII\n-0.5 0 IXII\n")?;
    for k_extra in 0..=1 {
        let psi = StateVec::random(2 - k_extra, &mut rng);
        let schedule = KeySchedule::new(2, k_extra, 0.5)?;
        let bits = schedule.key_len();
        let keys = 1u64 << bits;
        let mut total = 0.0;
        for key in 0..keys {
            let kc = schedule.augment(&four, &BitVec::from_u64(bits, key))?;
            let enc = Encoder::new(kc.augmented())?;
            total += expected_fidelity(&kc, &table, &enc, &attack, &psi)?;
        }
        println!(
            "[[4,2]] K={k_extra}: key-averaged fidelity {:.6}",
            total / keys as f64
        );
    }
    Ok(())
}
