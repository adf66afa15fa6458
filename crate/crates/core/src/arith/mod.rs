//! Exact arithmetic: arbitrary-precision rationals, real quadratic
//! irrationals and continued fractions.

mod cf;
mod quadratic;

pub use cf::{
    cf_expand, cf_terms, cf_value, convergent_pairs, convergents, periodic_cf_value, CfExpansion,
    CfStatus, CfTerms,
};
pub use quadratic::QuadraticReal;

use crate::error::{Error, Result};

/// Reduced fraction with positive denominator.
pub type Rational = num_rational::BigRational;

/// Parses `p`, `p/q` or a plain decimal such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("bad rational `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p = p.parse().map_err(|_| err())?;
        let q: num_bigint::BigInt = q.parse().map_err(|_| err())?;
        if num_traits::Zero::is_zero(&q) {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let digits: num_bigint::BigInt = format!("{int}{frac}").parse().map_err(|_| err())?;
        let scale = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
        return Ok(Rational::new(digits, scale));
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| err())?))
}

/// `p/q` as a string, `p` when integral.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(
            parse_rational("6/4").unwrap(),
            Rational::new(3.into(), 2.into())
        );
        assert_eq!(
            parse_rational("-0.25").unwrap(),
            Rational::new((-1).into(), 4.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&Rational::new(4.into(), 2.into())), "2");
    }
}
