//! The five-qubit code: every single-qubit error has its own syndrome.

use qlistcode::gf2::BitVec;
use qlistcode::listcode::build_table;
use qlistcode::pauli::enumerate_errors;
use qlistcode::protocol::{augment, run_trial};
use qlistcode::stabilizer::five_qubit_code;

fn main() -> qlistcode::Result<()> {
    let code = five_qubit_code();
    print!("{}", code.to_code_file(true));
    let table = build_table(&code, 1)?;
    let report = table.report();
    println!("syndromes: {}, L_min: {}", report.entry_count, report.l_min);

    let kc = augment(&code, 0, &BitVec::zeros(0), 0.5)?;
    for e in enumerate_errors(5, 1)?.iter() {
        let out = run_trial(&kc, &table, e)?;
        println!("{e}  syndrome {}  {}", out.syndrome_public.0, out.label());
    }
    Ok(())
}
