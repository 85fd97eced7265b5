//! Exact-rational display and truncation helpers.
//!
//! Vote weights are [`BigRational`] throughout; these helpers render them
//! as fixed-point decimal strings and implement the 5-decimal-place
//! truncation used by the Scottish STV counting rules.

use num::bigint::BigInt;
use num::{BigRational, One, Signed};

/// Renders a non-negative rational as a decimal string with exactly
/// `places` fractional digits, rounding half up.
pub fn decimal_string(value: &BigRational, places: u32) -> String {
    debug_assert!(!value.is_negative());
    let scale = BigInt::from(10u32).pow(places);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let scaled = value * BigRational::from_integer(scale) + half;
    let units = scaled.floor().to_integer().to_string();
    if places == 0 {
        return units;
    }
    let width = places as usize + 1;
    let padded = format!("{units:0>width$}");
    let (int_part, frac_part) = padded.split_at(padded.len() - places as usize);
    format!("{int_part}.{frac_part}")
}

/// Renders a vote total for a human-readable table: integers stay bare,
/// fractional totals are rounded half up to two decimal places.
pub fn display_votes(value: &BigRational) -> String {
    if value.is_integer() {
        value.to_integer().to_string()
    } else {
        decimal_string(value, 2)
    }
}

/// Truncates a non-negative rational toward zero at `places` decimal
/// places. This is the rounding rule the Scottish STV legislation applies
/// to each per-ballot transfer value.
pub fn truncate_places(value: &BigRational, places: u32) -> BigRational {
    debug_assert!(!value.is_negative());
    let scale = BigRational::from_integer(BigInt::from(10u32).pow(places));
    (value * &scale).floor() / scale
}

/// Converts an unsigned count into a rational weight.
pub fn rational(value: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// `(numerator, denominator)` of a rational in lowest terms, as decimal
/// strings. Used for the exactness fields in JSON output.
pub fn num_den_strings(value: &BigRational) -> (String, String) {
    (value.numer().to_string(), value.denom().to_string())
}

/// Percentage `100 * count / total` as an exact rational.
pub fn percentage(count: u64, total: u64) -> BigRational {
    debug_assert!(total > 0);
    BigRational::new(
        BigInt::from(count) * BigInt::from(100u32),
        BigInt::from(total),
    )
}
