//! Pauli products, phases and commutation.

use qlistcode::pauli::{enumerate_errors, error_count, PauliOp};

fn main() -> qlistcode::Result<()> {
    let x: PauliOp = "XI".parse()?;
    let z: PauliOp = "ZI".parse()?;
    println!("X*Z = {}", x.mul(&z));
    println!("Z*X = {}", z.mul(&x));
    println!("omega(X, Z) = {}", u8::from(x.omega(&z)));

    let a: PauliOp = "XZZXI".parse()?;
    let b: PauliOp = "IXZZX".parse()?;
    println!("{a} and {b} commute: {}", a.commutes_with(&b));
    println!("weight of {} = {}", a.mul(&b), a.mul(&b).weight());

    let errors = enumerate_errors(3, 1)?;
    println!(
        "N_E(3, 1) = {} (formula {})",
        errors.len(),
        error_count(3, 1)
    );
    for e in errors.iter().take(5) {
        println!("  {e}");
    }
    Ok(())
}
