//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact edge weight / length value.
pub type Rational = Ratio<i64>;

/// Exact probability; counts can exceed 64 bits once mixtures are formed.
pub type Probability = BigRational;

/// Parses `p/q`, an integer, or a finite decimal such as `1.25` or `-0.5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("invalid rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::parse(0, format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() && int_digits.is_empty() {
            return Err(bad());
        }
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let denom = 10i64.pow(frac.len() as u32);
        let whole: i64 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let part: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let numer = whole
            .checked_mul(denom)
            .and_then(|w| w.checked_add(part))
            .ok_or_else(bad)?;
        let r = Rational::new(numer, denom);
        return Ok(if negative { -r } else { r });
    }
    s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

/// Formats in lowest terms: `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses a probability written as `p/q` or an integer (arbitrary size).
pub fn parse_probability(s: &str) -> Result<Probability> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("invalid probability `{s}`"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Probability::new(p, q))
}

pub fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Least common multiple of the denominators, at least one.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values.into_iter().fold(1i64, |acc, r| acc.lcm(r.denom()))
}

/// `r * scale` as an integer; `scale` must be a multiple of the denominator.
pub(crate) fn scaled(r: &Rational, scale: i64) -> i64 {
    debug_assert_eq!(scale % r.denom(), 0);
    r.numer() * (scale / r.denom())
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i as u128 + 1);
    }
    acc
}

pub(crate) fn big_ratio(p: u128, q: u128) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parses_every_supported_form() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("6/4").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("7").unwrap(), Rational::from_integer(7));
        assert_eq!(parse_rational("1.25").unwrap(), Rational::new(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn format_is_lowest_terms() {
        assert_eq!(format_rational(&Rational::new(4, 2)), "2");
        assert_eq!(format_rational(&Rational::new(2, 6)), "1/3");
        let r = Rational::new(-7, 3);
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn small_combinatorics() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(6), 720);
        assert_eq!(binomial(25, 2), 300);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(common_denominator(&[Rational::new(1, 4), Rational::new(5, 6)]), 12);
    }

    #[test]
    fn probabilities_parse_big() {
        let p = parse_probability("1/3628800").unwrap();
        assert_eq!(p, big_ratio(1, 3_628_800));
        assert!(parse_probability("5/5").unwrap().is_one());
    }
}
