//! Which lower bound is stronger when there are no type I eavesdroppers.

use mdcsr::bounds::{dominance, Dominance};

fn main() -> mdcsr::Result<()> {
    for d in 2..=12 {
        let row: Vec<&str> = (1..d)
            .map(|l| match dominance(d, l).map(|r| r.verdict) {
                Ok(Dominance::GeneralStronger) => "G",
                Ok(Dominance::Tie) => "=",
                Ok(Dominance::PriorStronger) => "P",
                Err(_) => "?",
            })
            .collect();
        println!("d = {d:>2}: {}", row.join(" "));
    }
    println!("G: new bound stronger, =: tie, P: earlier bound stronger (columns l = 1..d-1)");
    Ok(())
}
