//! Tradeoff bounds for n = 4, d = 3, no eavesdroppers, rates (0, 1/3, 2/3).
//!
//! Prints the beta floor, the general bound, the earlier type II bound and
//! the MBR point where they all meet.

use mdcsr::bounds::{bound_beta, bound_general, bound_prior, intersection_check, mbr_point, NormalizedRates};
use mdcsr::Rational;

fn main() -> mdcsr::Result<()> {
    let rates = NormalizedRates::new(
        3,
        0,
        0,
        vec![Rational::ZERO, Rational::new(1, 3), Rational::new(2, 3)],
    )?;
    let mbr = mbr_point(&rates);
    println!("beta  >= {}", bound_beta(&rates));
    println!("{}", bound_general(&rates)?);
    println!("{}", bound_prior(&rates));
    println!("MBR point: alpha = {}, beta = {}", mbr.alpha, mbr.beta);

    let report = intersection_check(&rates)?;
    println!(
        "bounds intersect at ({}, {}); matches MBR: {}",
        report.intersection.alpha, report.intersection.beta, report.matches_mbr
    );
    Ok(())
}
