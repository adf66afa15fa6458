use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};

use super::{parse_rational, Rational};
use crate::error::{Error, Result};

/// Exact element `a + b·√d` of a real quadratic field, or a rational when
/// `d = 0`.
///
/// Canonical form: `d` is square-free, and `b = 0` iff `d = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticReal {
    a: Rational,
    b: Rational,
    d: BigInt,
}

impl Hash for QuadraticReal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.numer().hash(state);
        self.a.denom().hash(state);
        self.b.numer().hash(state);
        self.b.denom().hash(state);
        self.d.hash(state);
    }
}

/// Splits `n > 0` as `s²·f` with `f` square-free; returns `(s, f)`.
fn square_free_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            square *= &p;
        }
        p += 1;
    }
    (square, rest)
}

impl QuadraticReal {
    /// Builds `a + b√d`; `d` must be non-negative.
    pub fn new(a: Rational, b: Rational, d: impl Into<BigInt>) -> Result<Self> {
        let d = d.into();
        if d.is_negative() {
            return Err(Error::InvalidArguments(format!("sqrt({d}) is not real")));
        }
        if d.is_zero() || b.is_zero() {
            return Ok(Self::rational(a));
        }
        let (s, f) = square_free_part(&d);
        let b = b * Rational::from_integer(s);
        if f.is_one() {
            return Ok(Self::rational(a + b));
        }
        Ok(QuadraticReal { a, b, d: f })
    }

    pub fn rational(a: Rational) -> Self {
        QuadraticReal {
            a,
            b: Rational::zero(),
            d: BigInt::zero(),
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational::from_integer(n.into()))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::rational(Rational::new(p.into(), q.into()))
    }

    /// `√n`.
    pub fn sqrt(n: i64) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), n)
    }

    /// The golden ratio `(1 + √5) / 2`.
    pub fn golden() -> Self {
        Self::new(
            Rational::new(1.into(), 2.into()),
            Rational::new(1.into(), 2.into()),
            5,
        )
        .expect("5 is positive")
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// The square-free radicand, or 0 for rationals.
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.a.is_zero()
    }

    fn field(&self, other: &Self) -> Result<BigInt> {
        match (self.d.is_zero(), other.d.is_zero()) {
            (true, _) => Ok(other.d.clone()),
            (_, true) => Ok(self.d.clone()),
            _ if self.d == other.d => Ok(self.d.clone()),
            _ => Err(Error::UnsupportedField(
                self.d.to_string(),
                other.d.to_string(),
            )),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        Self::new(&self.a + &o.a, &self.b + &o.b, d)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        Self::new(&self.a - &o.a, &self.b - &o.b, d)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        let dr = Rational::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * &dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Self::new(a, b, d)
    }

    /// `1 / x`; errors on zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArguments("division by zero".into()));
        }
        let dr = Rational::from_integer(self.d.clone());
        let norm = &self.a * &self.a - &self.b * &self.b * &dr;
        Self::new(&self.a / &norm, -&self.b / &norm, self.d.clone())
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        self.field(o)?;
        self.checked_mul(&o.recip()?)
    }

    /// Sign of the represented real, by exact squaring.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.numer().sign();
        let sb = self.b.numer().sign();
        let cmp0 = |s: Sign| match s {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        };
        if sb == Sign::NoSign {
            return cmp0(sa);
        }
        if sa == Sign::NoSign || sa == sb {
            return cmp0(sb);
        }
        // Opposite signs: compare a² with b²d.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(self.d.clone());
        match a2.cmp(&b2d) {
            Ordering::Greater => cmp0(sa),
            Ordering::Less => cmp0(sb),
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Exact comparison; errors when both sides are irrational in different fields.
    pub fn compare(&self, o: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(o)?.signum())
    }

    /// `⌊x⌋`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        // m ≈ b√d via an integer square root of p²d, off by at most one.
        let (p, q) = (self.b.numer(), self.b.denom());
        let r: BigInt = Roots::sqrt(&(p * p * &self.d));
        let down: BigInt = Integer::div_floor(&r, q);
        let m = if p.is_negative() {
            -(down + 1u32)
        } else {
            down
        };
        let mut base = (&self.a + Rational::from_integer(m)).floor().to_integer() - 1;
        loop {
            let next = Self::rational(Rational::from_integer(&base + 1));
            if self.compare(&next).expect("rational candidate") == Ordering::Less {
                return base;
            }
            base += 1;
        }
    }

    pub fn fract(&self) -> Self {
        self.checked_sub(&Self::rational(Rational::from_integer(self.floor())))
            .expect("rational offset")
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &Rational| {
            use num_traits::ToPrimitive;
            r.to_f64().unwrap_or(f64::NAN)
        };
        let d = {
            use num_traits::ToPrimitive;
            self.d.to_f64().unwrap_or(f64::NAN)
        };
        f(&self.a) + f(&self.b) * d.sqrt()
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr for &QuadraticReal {
            type Output = QuadraticReal;
            /// # Panics
            /// When the operands live in different quadratic fields.
            fn $m(self, o: &QuadraticReal) -> QuadraticReal {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr for QuadraticReal {
            type Output = QuadraticReal;
            fn $m(self, o: QuadraticReal) -> QuadraticReal {
                (&self).$m(&o)
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

impl Neg for QuadraticReal {
    type Output = QuadraticReal;
    fn neg(self) -> QuadraticReal {
        QuadraticReal {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Neg for &QuadraticReal {
    type Output = QuadraticReal;
    fn neg(self) -> QuadraticReal {
        -self.clone()
    }
}

impl From<Rational> for QuadraticReal {
    fn from(r: Rational) -> Self {
        Self::rational(r)
    }
}

impl From<i64> for QuadraticReal {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl fmt::Display for QuadraticReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            write!(f, "{}", if self.b.is_negative() { "-" } else { "+" })?;
        } else if self.b.is_negative() {
            write!(f, "-")?;
        }
        let b = self.b.abs();
        if !b.is_one() {
            write!(f, "{b}*")?;
        }
        write!(f, "sqrt({})", self.d)
    }
}

impl FromStr for QuadraticReal {
    type Err = Error;

    /// Accepts sums of signed terms, each a rational (`p`, `p/q`, decimal)
    /// or `[c*]sqrt(D)`, e.g. `1/2+1/2*sqrt(5)` or `sqrt(2)-1`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse(format!("bad quadratic real `{s}`"));
        if s.is_empty() {
            return Err(err());
        }
        // Split before every '+'/'-' that is not a leading sign.
        let bytes = s.as_bytes();
        let mut cuts = vec![0];
        for k in 1..bytes.len() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'/' | b'*' | b'(')
            {
                cuts.push(k);
            }
        }
        cuts.push(bytes.len());
        let mut total = Self::integer(0);
        for w in cuts.windows(2) {
            let term = &s[w[0]..w[1]];
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            let value = match body.find("sqrt(") {
                None => Self::rational(parse_rational(body)?),
                Some(at) => {
                    let inner = body[at + 5..].strip_suffix(')').ok_or_else(err)?;
                    let d: BigInt = inner.parse().map_err(|_| err())?;
                    let coeff = match &body[..at] {
                        "" => Rational::one(),
                        c => parse_rational(c.strip_suffix('*').ok_or_else(err)?)?,
                    };
                    Self::new(Rational::zero(), coeff, d)?
                }
            };
            let value = if neg { -value } else { value };
            total = total.checked_add(&value)?;
        }
        Ok(total)
    }
}
