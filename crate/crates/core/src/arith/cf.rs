use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{QuadraticReal, Rational};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfStatus {
    Terminated,
    /// `terms[preperiod_len..]` is one full period.
    Periodic {
        preperiod_len: usize,
    },
    Truncated,
}

/// A continued fraction `[a0; a1, a2, …]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    terms: Vec<BigInt>,
    status: CfStatus,
}

impl CfExpansion {
    pub fn terminated(terms: Vec<BigInt>) -> Self {
        CfExpansion {
            terms,
            status: CfStatus::Terminated,
        }
    }

    pub fn periodic(pre: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if period.is_empty() {
            return Err(invalid("empty period"));
        }
        let preperiod_len = pre.len();
        let mut terms = pre;
        terms.extend(period);
        Ok(CfExpansion {
            terms,
            status: CfStatus::Periodic { preperiod_len },
        })
    }

    pub fn status(&self) -> CfStatus {
        self.status
    }

    /// Terms as stored: the whole expansion, or preperiod plus one period.
    pub fn stored_terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn preperiod(&self) -> &[BigInt] {
        match self.status {
            CfStatus::Periodic { preperiod_len } => &self.terms[..preperiod_len],
            _ => &self.terms,
        }
    }

    pub fn period(&self) -> Option<&[BigInt]> {
        match self.status {
            CfStatus::Periodic { preperiod_len } => Some(&self.terms[preperiod_len..]),
            _ => None,
        }
    }

    /// Number of terms available, `None` when infinite.
    pub fn available(&self) -> Option<usize> {
        match self.status {
            CfStatus::Periodic { .. } => None,
            _ => Some(self.terms.len()),
        }
    }

    /// The `k`-th partial quotient, unrolling the period when needed.
    pub fn term(&self, k: usize) -> Option<&BigInt> {
        match self.status {
            CfStatus::Periodic { preperiod_len } if k >= self.terms.len() => {
                let p = self.terms.len() - preperiod_len;
                Some(&self.terms[preperiod_len + (k - preperiod_len) % p])
            }
            _ => self.terms.get(k),
        }
    }

    /// First `k` terms; errors if fewer are available.
    pub fn terms(&self, k: usize) -> Result<Vec<BigInt>> {
        if self.available().is_some_and(|n| k > n) {
            return Err(invalid(format!(
                "requested {k} terms, only {} available",
                self.terms.len()
            )));
        }
        Ok((0..k)
            .map(|i| self.term(i).cloned().expect("checked"))
            .collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strs = |v: &[BigInt]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        serde_json::json!({
            "preperiod": strs(self.preperiod()),
            "period": self.period().map(strs),
            "terminated": self.status == CfStatus::Terminated,
        })
    }
}

impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = self.preperiod();
        write!(f, "[")?;
        let mut first = true;
        let sep = |f: &mut fmt::Formatter<'_>, first: &mut bool, k: usize| {
            let s = if *first {
                ""
            } else if k == 1 {
                "; "
            } else {
                ", "
            };
            *first = false;
            write!(f, "{s}")
        };
        for (k, t) in pre.iter().enumerate() {
            sep(f, &mut first, k)?;
            write!(f, "{t}")?;
        }
        if let Some(period) = self.period() {
            sep(f, &mut first, pre.len())?;
            let body: Vec<String> = period.iter().map(|t| t.to_string()).collect();
            write!(f, "period ({})", body.join(", "))?;
        }
        if self.status == CfStatus::Truncated {
            write!(f, ", …")?;
        }
        write!(f, "]")
    }
}

/// Lazy partial quotients of `x > 0`, one exact floor per step.
#[derive(Clone, Debug)]
pub struct CfTerms {
    x: Option<QuadraticReal>,
}

impl Iterator for CfTerms {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let x = self.x.take()?;
        let a = x.floor();
        let r = x.fract();
        if !r.is_zero() {
            self.x = Some(r.recip().expect("nonzero"));
        }
        Some(a)
    }
}

pub fn cf_terms(x: &QuadraticReal) -> Result<CfTerms> {
    if x.signum() != std::cmp::Ordering::Greater {
        return Err(invalid(format!("continued fraction needs x > 0, got {x}")));
    }
    Ok(CfTerms { x: Some(x.clone()) })
}

/// Continued fraction of `x > 0`: terminates for rationals, detects the
/// period for quadratic irrationals, truncates at `max_terms` otherwise.
pub fn cf_expand(x: &QuadraticReal, max_terms: usize) -> Result<CfExpansion> {
    cf_terms(x)?;
    if let Some(r) = x.as_rational() {
        return Ok(rational_cf(r, max_terms));
    }
    let mut seen: HashMap<QuadraticReal, usize> = HashMap::new();
    let mut terms = Vec::new();
    let mut cur = x.clone();
    while terms.len() < max_terms {
        if let Some(&start) = seen.get(&cur) {
            let period = terms.split_off(start);
            return CfExpansion::periodic(terms, period);
        }
        seen.insert(cur.clone(), terms.len());
        let a = cur.floor();
        cur = cur
            .fract()
            .recip()
            .expect("irrational remainder is nonzero");
        terms.push(a);
    }
    Ok(CfExpansion {
        terms,
        status: CfStatus::Truncated,
    })
}

fn rational_cf(r: &Rational, max_terms: usize) -> CfExpansion {
    let (mut p, mut q) = (r.numer().clone(), r.denom().clone());
    let mut terms = Vec::new();
    while !q.is_zero() {
        if terms.len() == max_terms {
            return CfExpansion {
                terms,
                status: CfStatus::Truncated,
            };
        }
        let (a, rem) = p.div_mod_floor(&q);
        terms.push(a);
        p = std::mem::replace(&mut q, rem);
    }
    CfExpansion::terminated(terms)
}

/// First `k` convergents `p_i / q_i`.
pub fn convergents(cf: &CfExpansion, k: usize) -> Result<Vec<Rational>> {
    let terms = cf.terms(k)?;
    Ok(convergent_pairs(&terms)
        .into_iter()
        .map(|(p, q)| Rational::new(p, q))
        .collect())
}

/// `(p_i, q_i)` for each prefix of `terms`.
pub fn convergent_pairs(terms: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    terms
        .iter()
        .map(|a| {
            let p = a * &p1 + &p0;
            let q = a * &q1 + &q0;
            p0 = std::mem::replace(&mut p1, p.clone());
            q0 = std::mem::replace(&mut q1, q.clone());
            (p, q)
        })
        .collect()
}

/// Value of a finite continued fraction.
pub fn cf_value(terms: &[BigInt]) -> Result<Rational> {
    let (p, q) = convergent_pairs(terms)
        .pop()
        .ok_or_else(|| invalid("empty continued fraction"))?;
    Ok(Rational::new(p, q))
}

/// Exact value of `[pre; period, period, …]`, a quadratic irrational.
pub fn periodic_cf_value(pre: &[BigInt], period: &[BigInt]) -> Result<QuadraticReal> {
    if period.is_empty() {
        return Err(invalid("empty period"));
    }
    if period.iter().any(|a| !a.is_positive()) || pre.iter().skip(1).any(|a| !a.is_positive()) {
        return Err(invalid("partial quotients after the first must be >= 1"));
    }
    // y = [period; y] ⇒ Q y² + (Q' − P) y − P' = 0 with P/Q, P'/Q' the last
    // two convergents of the period.
    let conv = convergent_pairs(period);
    let (p, q) = conv[conv.len() - 1].clone();
    let (pp, qp) = if conv.len() >= 2 {
        conv[conv.len() - 2].clone()
    } else {
        (BigInt::one(), BigInt::zero())
    };
    let b = &qp - &p;
    let disc = &b * &b + BigInt::from(4) * &q * &pp;
    let two_q = Rational::from_integer(BigInt::from(2) * &q);
    let y = QuadraticReal::new(
        Rational::from_integer(-b) / &two_q,
        Rational::one() / &two_q,
        disc,
    )?;
    if pre.is_empty() {
        return Ok(y);
    }
    let conv = convergent_pairs(pre);
    let (p, q) = conv[conv.len() - 1].clone();
    let (pp, qp) = if conv.len() >= 2 {
        conv[conv.len() - 2].clone()
    } else {
        (BigInt::one(), BigInt::zero())
    };
    let lift = |n: BigInt| QuadraticReal::rational(Rational::from_integer(n));
    let num = &(&lift(p) * &y) + &lift(pp);
    let den = &(&lift(q) * &y) + &lift(qp);
    num.checked_div(&den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn seventeen_sixths() {
        let cf = cf_expand(&QuadraticReal::ratio(17, 6), 100).unwrap();
        assert_eq!(cf.status(), CfStatus::Terminated);
        assert_eq!(cf.stored_terms(), ints(&[2, 1, 5]).as_slice());
        assert_eq!(cf.to_string(), "[2; 1, 5]");
        let c = convergents(&cf, 3).unwrap();
        let expect: Vec<Rational> = [(2, 1), (3, 1), (17, 6)]
            .iter()
            .map(|&(p, q)| Rational::new(p.into(), q.into()))
            .collect();
        assert_eq!(c, expect);
        assert!(convergents(&cf, 4).is_err());
    }

    #[test]
    fn golden_and_sqrt2() {
        let cf = cf_expand(&QuadraticReal::golden(), 100).unwrap();
        assert_eq!(cf.preperiod(), ints(&[]).as_slice());
        assert_eq!(cf.period().unwrap(), ints(&[1]).as_slice());
        let c = convergents(&cf, 5).unwrap();
        let fib: Vec<Rational> = [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]
            .iter()
            .map(|&(p, q)| Rational::new(p.into(), q.into()))
            .collect();
        assert_eq!(c, fib);

        let cf = cf_expand(&QuadraticReal::sqrt(2).unwrap(), 100).unwrap();
        assert_eq!(cf.preperiod(), ints(&[1]).as_slice());
        assert_eq!(cf.period().unwrap(), ints(&[2]).as_slice());
        assert_eq!(cf.to_string(), "[1; period (2)]");
        assert_eq!(
            cf.to_json(),
            serde_json::json!({"preperiod": ["1"], "period": ["2"], "terminated": false})
        );
    }

    #[test]
    fn single_term_and_errors() {
        let cf = cf_expand(&QuadraticReal::integer(7), 10).unwrap();
        assert_eq!(
            convergents(&cf, 1).unwrap(),
            vec![Rational::from_integer(7.into())]
        );
        assert!(cf_expand(&QuadraticReal::integer(0), 10).is_err());
        assert!(cf_expand(&QuadraticReal::ratio(-1, 3), 10).is_err());
        let t = cf_expand(&QuadraticReal::ratio(89, 55), 3).unwrap();
        assert_eq!(t.status(), CfStatus::Truncated);
    }

    #[test]
    fn periodic_values() {
        assert_eq!(
            periodic_cf_value(&[], &ints(&[1])).unwrap(),
            QuadraticReal::golden()
        );
        assert_eq!(
            periodic_cf_value(&ints(&[1]), &ints(&[2])).unwrap(),
            QuadraticReal::sqrt(2).unwrap()
        );
        let x: QuadraticReal = "3/2+1/2*sqrt(5)".parse().unwrap();
        assert_eq!(periodic_cf_value(&ints(&[2]), &ints(&[1])).unwrap(), x);
        // Round trip through the expander on a longer period.
        let v = periodic_cf_value(&ints(&[0, 3]), &ints(&[1, 4, 2])).unwrap();
        let cf = cf_expand(&v, 100).unwrap();
        assert_eq!(cf.preperiod(), ints(&[0, 3]).as_slice());
        assert_eq!(cf.period().unwrap(), ints(&[1, 4, 2]).as_slice());
    }
}
