//! List-code rates against the Gilbert-Varshamov rate.

use qlistcode::bounds::{gv_rate, list_rate, list_rate_zero_crossing, rains_threshold, ListLength};

fn main() -> qlistcode::Result<()> {
    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>9}",
        "p", "L=inf", "L=1", "L=4", "GV"
    );
    for i in 0..=10 {
        let p = 0.025 * i as f64;
        let row = [
            list_rate(p, ListLength::Infinite)?.value,
            list_rate(p, ListLength::Finite(1))?.value,
            list_rate(p, ListLength::Finite(4))?.value,
            gv_rate(p)?.value,
        ];
        println!(
            "{p:>6.3} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            row[0], row[1], row[2], row[3]
        );
    }
    println!(
        "list rate reaches 0 at p = {:.5}",
        list_rate_zero_crossing(ListLength::Infinite)?
    );
    println!("Rains threshold        = {:.5}", rains_threshold());
    Ok(())
}
