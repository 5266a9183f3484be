//! Exact integer polynomials in one indeterminate, and the elements of
//! the nonnegative part of the ordered ring they form.
//!
//! The order is by leading coefficient: p is nonnegative when it is zero
//! or its leading coefficient is positive (equivalently, p eventually
//! dominates). All coefficient arithmetic is big-integer.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul};

/// A polynomial over the integers; `coeffs[i]` is the coefficient of X^i,
/// normalized with no trailing zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn zero() -> ZPoly {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> ZPoly {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn constant(c: BigInt) -> ZPoly {
        ZPoly::from_coeffs(vec![c])
    }

    pub fn var() -> ZPoly {
        ZPoly::from_coeffs(vec![BigInt::zero(), BigInt::from(1)])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            out.push(a + b);
        }
        ZPoly::from_coeffs(out)
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::from_coeffs(out)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Nonnegative in the leading-coefficient order.
    pub fn is_nonneg(&self) -> bool {
        match self.leading() {
            None => true,
            Some(c) => c.is_positive(),
        }
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: &ZPoly) -> ZPoly {
        ZPoly::add(self, rhs)
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, rhs: &ZPoly) -> ZPoly {
        ZPoly::mul(self, rhs)
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let show_coeff = d == 0 || mag != BigInt::from(1);
            if show_coeff {
                write!(f, "{mag}")?;
                if d > 0 {
                    write!(f, "*")?;
                }
            }
            if d == 1 {
                write!(f, "X")?;
            } else if d > 1 {
                write!(f, "X^{d}")?;
            }
        }
        Ok(())
    }
}

/// An element of the nonnegative part: zero, or positive leading
/// coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyElem(ZPoly);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("not an element of the nonnegative part: {0}")]
    NotNonnegative(String),
    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

impl PolyElem {
    pub fn new(p: ZPoly) -> Result<PolyElem, PolyError> {
        if p.is_nonneg() {
            Ok(PolyElem(p))
        } else {
            Err(PolyError::NotNonnegative(p.to_string()))
        }
    }

    pub fn zero() -> PolyElem {
        PolyElem(ZPoly::zero())
    }

    pub fn one() -> PolyElem {
        PolyElem(ZPoly::constant(BigInt::from(1)))
    }

    pub fn nat(n: u64) -> PolyElem {
        PolyElem(ZPoly::constant(BigInt::from(n)))
    }

    pub fn var() -> PolyElem {
        PolyElem(ZPoly::var())
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<PolyElem, PolyError> {
        PolyElem::new(ZPoly::from_coeffs(coeffs))
    }

    pub fn as_zpoly(&self) -> &ZPoly {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    /// Degree-0 elements are the standard naturals of the model.
    pub fn is_standard(&self) -> bool {
        self.0.coeffs().len() <= 1
    }

    pub fn standard_value(&self) -> Option<BigUint> {
        if self.is_standard() {
            let v = self
                .0
                .coeffs()
                .first()
                .cloned()
                .unwrap_or_else(BigInt::zero);
            v.to_biguint()
        } else {
            None
        }
    }
}

/// Closure of the nonnegative part under addition.
pub fn poly_add(a: &PolyElem, b: &PolyElem) -> PolyElem {
    PolyElem(a.0.add(&b.0))
}

/// Closure of the nonnegative part under multiplication.
pub fn poly_mul(a: &PolyElem, b: &PolyElem) -> PolyElem {
    PolyElem(a.0.mul(&b.0))
}

/// The leading-coefficient order: a <= b iff b - a is nonnegative.
pub fn poly_le(a: &PolyElem, b: &PolyElem) -> bool {
    b.0.sub(&a.0).is_nonneg()
}

pub fn poly_lt(a: &PolyElem, b: &PolyElem) -> bool {
    a != b && poly_le(a, b)
}

/// The constructive subtraction witness: `Some(z)` with a + z = b exactly
/// when a <= b.
pub fn poly_minus(a: &PolyElem, b: &PolyElem) -> Option<PolyElem> {
    let d = b.0.sub(&a.0);
    if d.is_nonneg() {
        Some(PolyElem(d))
    } else {
        None
    }
}

/// Standard evaluation at X = n; may be negative below the element's
/// nonnegativity threshold.
pub fn eval_at(p: &PolyElem, n: &BigUint) -> BigInt {
    p.0.eval(&BigInt::from(n.clone()))
}

/// A point N0 such that every element of `elems` evaluates nonnegatively
/// at every N >= N0, from the Cauchy-style root bound
/// 1 + max |c_i| / c_lead per element.
pub fn nonneg_threshold<'a>(elems: impl IntoIterator<Item = &'a PolyElem>) -> BigUint {
    let mut best = BigUint::zero();
    for p in elems {
        let b = element_threshold(p);
        if b > best {
            best = b;
        }
    }
    best
}

fn element_threshold(p: &PolyElem) -> BigUint {
    let coeffs = p.0.coeffs();
    if coeffs.iter().all(|c| !c.is_negative()) {
        // All coefficients nonnegative: nonnegative everywhere.
        return BigUint::zero();
    }
    let lead = coeffs.last().unwrap().magnitude().clone();
    let max_low = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.magnitude().clone())
        .max()
        .unwrap_or_else(BigUint::zero);
    // ceil(1 + max_low / lead)
    (BigUint::from(1u32) * &lead + max_low + &lead - BigUint::from(1u32)) / lead
}

/// Accepts either a JSON-style coefficient list `[c0,c1,...]` or the human
/// syntax `3*X^2+X+1` (terms joined by `+`/`-`, `X` case-insensitive).
pub fn parse_poly(text: &str) -> Result<PolyElem, PolyError> {
    let t = text.trim();
    let z = if t.starts_with('[') {
        parse_coeff_list(t)?
    } else {
        parse_human(t)?
    };
    PolyElem::new(z)
}

fn parse_coeff_list(t: &str) -> Result<ZPoly, PolyError> {
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| PolyError::Parse {
            text: t.to_string(),
            reason: "expected [c0,c1,...]".into(),
        })?;
    let mut coeffs = Vec::new();
    if !inner.trim().is_empty() {
        for part in inner.split(',') {
            let c: BigInt = part.trim().parse().map_err(|e| PolyError::Parse {
                text: t.to_string(),
                reason: format!("bad coefficient {part:?}: {e}"),
            })?;
            coeffs.push(c);
        }
    }
    Ok(ZPoly::from_coeffs(coeffs))
}

fn parse_human(t: &str) -> Result<ZPoly, PolyError> {
    let err = |reason: &str| PolyError::Parse {
        text: t.to_string(),
        reason: reason.to_string(),
    };
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty input"));
    }
    // Split into signed terms.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut chars = compact.chars().peekable();
    if chars.peek() == Some(&'-') {
        neg = true;
        chars.next();
    } else if chars.peek() == Some(&'+') {
        chars.next();
    }
    for ch in chars {
        if ch == '+' || ch == '-' {
            if cur.is_empty() {
                return Err(err("empty term"));
            }
            terms.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(err("empty term"));
    }
    terms.push((neg, cur));

    let mut acc = ZPoly::zero();
    for (is_neg, term) in terms {
        // Forms: c, X, c*X, X^k, c*X^k.
        let (coeff_str, var_part) = match term.find(['x', 'X']) {
            None => (term.as_str(), None),
            Some(i) => {
                let (c, v) = term.split_at(i);
                (c, Some(v))
            }
        };
        let coeff: BigInt = if coeff_str.is_empty() {
            BigInt::from(1)
        } else {
            let c = coeff_str.strip_suffix('*').unwrap_or(coeff_str);
            c.parse()
                .map_err(|e| err(&format!("bad coefficient {c:?}: {e}")))?
        };
        let deg: usize = match var_part {
            None => 0,
            Some(v) => {
                let rest = &v[1..];
                if rest.is_empty() {
                    1
                } else {
                    let e = rest
                        .strip_prefix('^')
                        .ok_or_else(|| err(&format!("bad term {term:?}")))?;
                    e.parse().map_err(|_| err(&format!("bad exponent {e:?}")))?
                }
            }
        };
        let signed = if is_neg { -coeff } else { coeff };
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = signed;
        acc = acc.add(&ZPoly::from_coeffs(coeffs));
    }
    Ok(acc)
}

impl fmt::Display for PolyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PolyElem {
        parse_poly(s).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(poly_add(&p("X+1"), &p("X")), p("2*X+1"));
        assert_eq!(poly_add(&PolyElem::zero(), &p("X^2")), p("X^2"));
        // X^2 - X is in the nonnegative part; adding X gives X^2.
        let q = poly_add(&p("X^2-X"), &p("X"));
        assert_eq!(q, p("X^2"));
        for n in [0u64, 1, 2, 5, 11] {
            let nn = BigUint::from(n);
            assert_eq!(
                eval_at(&q, &nn),
                eval_at(&p("X^2-X"), &nn) + eval_at(&p("X"), &nn)
            );
        }
    }

    #[test]
    fn order_is_by_leading_coefficient() {
        assert!(poly_le(&p("5*X"), &p("X^2")));
        assert!(!poly_le(&p("X^2"), &p("5*X")));
        assert!(poly_le(&p("3"), &p("X")));
    }

    #[test]
    fn minus_is_the_order_witness() {
        assert_eq!(poly_minus(&p("X"), &p("X+3")), Some(p("3")));
        assert_eq!(poly_minus(&p("X+3"), &p("X")), None);
        let z = poly_minus(&p("2*X"), &p("X^2")).unwrap();
        assert_eq!(poly_add(&p("2*X"), &z), p("X^2"));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(eval_at(&p("X^2-X"), &BigUint::from(1u32)), BigInt::from(0));
        assert_eq!(eval_at(&p("X^2-X"), &BigUint::from(0u32)), BigInt::from(0));
        assert_eq!(
            eval_at(&p("2*X+1"), &BigUint::from(10u32)),
            BigInt::from(21)
        );
    }

    #[test]
    fn threshold_is_a_cauchy_bound() {
        // X - 5: bound 1 + 5/1 = 6; nonneg from there on.
        let t = nonneg_threshold([&p("X-5")]);
        assert_eq!(t, BigUint::from(6u32));
        for extra in [0u32, 7] {
            let at = &t + BigUint::from(extra);
            assert!(eval_at(&p("X-5"), &at) >= BigInt::zero());
        }
        assert_eq!(
            nonneg_threshold([&p("0"), &p("1"), &p("X")]),
            BigUint::zero()
        );
        // X^2 - 3X: bound 1 + 3/1 = 4.
        let t = nonneg_threshold([&p("X^2-3*X")]);
        assert_eq!(t, BigUint::from(4u32));
        assert!(eval_at(&p("X^2-3*X"), &t) >= BigInt::zero());
    }

    #[test]
    fn invariant_rejects_negative_leading() {
        assert!(parse_poly("-X+2").is_err());
        assert!(parse_poly("[2,-1]").is_err());
        assert!(parse_poly("[0,-3,1]").is_ok()); // X^2 - 3X
    }

    #[test]
    fn coeff_list_and_human_forms_agree() {
        assert_eq!(p("[1,1]"), p("X+1"));
        assert_eq!(p("[0,0,3]"), p("3*X^2"));
        assert_eq!(p("[5]"), p("5"));
        assert_eq!(p("[]"), PolyElem::zero());
        assert_eq!(p("3*X^2+X+1"), p("[1,1,3]"));
    }

    #[test]
    fn display_roundtrips_through_parser() {
        for s in ["0", "1", "X", "X+1", "2*X", "X^2-3*X", "7*X^3+2*X-5"] {
            let e = p(s);
            assert_eq!(parse_poly(&e.to_string()).unwrap(), e);
        }
    }
}
