//! Exact rational scalars and extended values.
//!
//! Every quantity in the toolkit is an arbitrary-precision rational; there
//! are no floating-point tolerances anywhere. `BigRational` keeps values in
//! lowest terms with a positive denominator by construction.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Scalar = BigRational;

/// Integer scalar.
pub fn rat(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational scalar `p/q`. Panics if `q == 0`.
pub fn frac(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Parses `"p"` or `"p/q"` (optionally signed, no whitespace).
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let bad = || Error::Schema(format!("invalid rational literal {text:?}"));
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// A rational extended with the two infinities. Convention: the optimal
/// value of an infeasible minimization problem is `PosInf`, of an unbounded
/// one `NegInf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtValue {
    NegInf,
    Finite(Scalar),
    PosInf,
}

impl ExtValue {
    pub fn finite(s: Scalar) -> Self {
        ExtValue::Finite(s)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Scalar> {
        match self {
            ExtValue::Finite(s) => Some(s),
            _ => None,
        }
    }

    /// Unwraps a finite value or reports `what` in the error.
    pub fn expect_finite(&self, what: &str) -> Result<Scalar> {
        self.as_finite()
            .cloned()
            .ok_or_else(|| Error::Domain(format!("{what} is not finite: {self}")))
    }
}

impl From<Scalar> for ExtValue {
    fn from(s: Scalar) -> Self {
        ExtValue::Finite(s)
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtValue::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInf => write!(f, "-inf"),
            ExtValue::PosInf => write!(f, "+inf"),
            ExtValue::Finite(s) => write!(f, "{}", format_scalar(s)),
        }
    }
}

/// |s|
pub fn abs(s: &Scalar) -> Scalar {
    s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["0", "5", "-7", "3/2", "-3/2", "10/4"] {
            let s = parse_scalar(text).unwrap();
            let back = parse_scalar(&format_scalar(&s)).unwrap();
            assert_eq!(s, back);
        }
        assert_eq!(format_scalar(&parse_scalar("10/4").unwrap()), "5/2");
        assert_eq!(parse_scalar("-3/2").unwrap(), frac(-3, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1.5").is_err());
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(1), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn ext_value_order() {
        let vals = [
            ExtValue::NegInf,
            ExtValue::finite(rat(-1)),
            ExtValue::finite(rat(3)),
            ExtValue::PosInf,
        ];
        for (i, a) in vals.iter().enumerate() {
            for (j, b) in vals.iter().enumerate() {
                assert_eq!(a.cmp(b), i.cmp(&j));
            }
        }
    }
}
