//! Runs every converse inequality on an instantiated n = d + 1 code and
//! prints a one-line tally per suite, then the bound chains in full.

use std::collections::BTreeMap;

use mdcsr::entropy::{EntropyLab, Suite};
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
    let lab = EntropyLab::new(system)?;
    for (name, suite) in [
        ("lemma1", Suite::Lemma1),
        ("exchange1", Suite::Exchange1),
        ("coro", Suite::Coro),
        ("exchange2", Suite::Exchange2),
        ("symmetry", Suite::Symmetry),
    ] {
        let results = lab.run_suite(suite)?;
        let tight = results.iter().filter(|c| c.is_tight()).count();
        let failed = results.iter().filter(|c| !c.satisfied).count();
        println!("{name:>10}: {} checks, {tight} tight, {failed} failed", results.len());
    }
    for c in lab.run_suite(Suite::Props)? {
        println!("{c}");
    }
    Ok(())
}
