//! Physical constants (Gaussian-CGS).

/// Speed of light in vacuum, cm/s.
pub const C: f64 = 2.997_924_58e10;

/// Charge normalisation used for every field and intensity.
pub const Q: f64 = 1.0;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Spacing between `x` and the next representable `f64` above it.
pub fn ulp(x: f64) -> f64 {
    let x = x.abs();
    f64::from_bits(x.to_bits() + 1) - x
}
