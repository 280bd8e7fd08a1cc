//! Stored content and full inbound repair data of a node span the same space,
//! so a type I and a type II eavesdropper on that node learn the same amount.

use std::collections::BTreeMap;

use mdcsr::secrecy::type_ranks;
use mdcsr::system::{System, SystemParams};
use mdcsr::FieldModulus;

fn main() -> mdcsr::Result<()> {
    let system = System::new(SystemParams {
        n: 5,
        d: 4,
        l1: 1,
        l2: 1,
        p: FieldModulus::default(),
        file_sizes: BTreeMap::from([(3, 2), (4, 3)]),
    })?;
    for node in 1..=system.n() {
        let (stored, inbound) = type_ranks(&system, node)?;
        println!("node {node}: type I rank {stored}, type II rank {inbound}, alpha {}", system.alpha());
    }
    Ok(())
}
