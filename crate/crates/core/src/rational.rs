//! Exact rational probabilities: parsing from decimal literals and
//! rendering back to fixed-precision decimals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact probability value.
pub type Prob = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid probability literal `{0}`")]
pub struct ParseProbError(pub String);

/// Parses a decimal literal (`0.5`, `1`, `.25`) or a fraction (`3/7`).
pub fn parse_prob(text: &str) -> Result<Prob, ParseProbError> {
    let err = || ParseProbError(text.to_string());
    let t = text.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    if negative {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(num, den))
}

pub fn prob(num: i64, den: i64) -> Prob {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `a/b` in lowest terms, or just `a` for integers.
pub fn format_exact(p: &Prob) -> String {
    if p.denom().is_one() {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

/// Decimal rendering with `digits` fractional digits, round-half-even.
pub fn format_decimal(p: &Prob, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = p.abs() * BigRational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let rem = scaled - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2u32));
    let rounded = match rem.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if p.is_negative() && !rounded_is_zero(&int_part, &frac_part) { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    let frac = frac_part.to_string();
    format!("{sign}{int_part}.{}{frac}", "0".repeat(digits - frac.len()))
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.sign() == Sign::NoSign && b.sign() == Sign::NoSign
}

pub fn to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_prob("0.5").unwrap(), prob(1, 2));
        assert_eq!(parse_prob("0.9").unwrap(), prob(9, 10));
        assert_eq!(parse_prob("1").unwrap(), prob(1, 1));
        assert_eq!(parse_prob(".25").unwrap(), prob(1, 4));
        assert_eq!(parse_prob("3/7").unwrap(), prob(3, 7));
        assert_eq!(parse_prob("0.5976").unwrap(), prob(747, 1250));
        assert!(parse_prob("").is_err());
        assert!(parse_prob("1/0").is_err());
        assert!(parse_prob("0.5x").is_err());
        assert!(parse_prob(".").is_err());
    }

    #[test]
    fn decimal_rendering_rounds_half_even() {
        assert_eq!(format_decimal(&prob(801, 1250), 6), "0.640800");
        assert_eq!(format_decimal(&prob(459, 610), 6), "0.752459");
        assert_eq!(format_decimal(&prob(747, 1250), 3), "0.598");
        assert_eq!(format_decimal(&prob(1, 8), 2), "0.12");
        assert_eq!(format_decimal(&prob(3, 8), 2), "0.38");
        assert_eq!(format_decimal(&prob(1, 1), 0), "1");
        assert_eq!(format_decimal(&prob(1, 2), 0), "0");
        assert_eq!(format_decimal(&prob(-1, 3), 2), "-0.33");
    }

    #[test]
    fn exact_rendering() {
        assert_eq!(format_exact(&prob(6, 14)), "3/7");
        assert_eq!(format_exact(&prob(2, 2)), "1");
    }
}
