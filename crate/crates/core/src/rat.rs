//! Rational literal syntax: `5`, `-3`, `5/4`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Parses a literal chunk. Returns `None` for anything that is not a
/// numeral, and `Some(Err(()))` for a zero denominator.
pub fn parse(text: &str) -> Option<Result<BigRational, ()>> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    if !is_integer(num) {
        return None;
    }
    if let Some(d) = den {
        if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = match den {
        Some(d) => d.parse().ok()?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Some(Err(()));
    }
    Some(Ok(BigRational::new(n, d)))
}

fn is_integer(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

pub fn format(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_in_lowest_terms() {
        let r = parse("10/4").unwrap().unwrap();
        assert_eq!(format(&r), "5/2");
    }

    #[test]
    fn negative_and_plain() {
        assert_eq!(format(&parse("-3").unwrap().unwrap()), "-3");
        assert_eq!(format(&parse("7").unwrap().unwrap()), "7");
        assert!(parse("c-tick").is_none());
        assert!(parse("-").is_none());
        assert!(parse("1/0").unwrap().is_err());
    }
}
