//! Writes the bound region on a beta grid as CSV to stdout.

use mdcsr::bounds::{mbr_point, region_csv, region_export, NormalizedRates};
use mdcsr::Rational;

fn main() -> mdcsr::Result<()> {
    let rates = NormalizedRates::new(3, 0, 0, vec![Rational::ZERO, Rational::new(1, 3), Rational::new(2, 3)])?;
    let beta = mbr_point(&rates).beta;
    let grid: Vec<Rational> = (0..=12).map(|k| beta * Rational::new(k, 4)).collect();
    print!("{}", region_csv(&region_export(&rates, &grid)));
    Ok(())
}
