//! The [[4,2]] detection code cannot correct, but it can list-decode.

use qlistcode::listcode::build_table;
use qlistcode::stabilizer::four_qubit_detection_code;

fn main() -> qlistcode::Result<()> {
    let code = four_qubit_detection_code();
    let table = build_table(&code, 1)?;
    for (s, entry) in table.entries() {
        println!(
            "syndrome {}: {} errors, rep {}, list rank {}",
            s.0,
            entry.members,
            entry.rep,
            entry.rank()
        );
        for v in entry.span_vectors(4) {
            println!("    {}", code.lift_class(&v));
        }
    }
    println!("L_min = {}", table.report().l_min);
    print!("{}", table.export());
    Ok(())
}
