//! Ordinal notations below omega^omega in Cantor normal form, with
//! comparison, successor/limit classification, and the standard
//! fundamental sequences.
//!
//! Text grammar: `w^2*3+w*2+5` — `w` for omega, optional `^exp` and
//! `*coeff`, terms joined by `+` with strictly decreasing exponents.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Sum of terms omega^exp * coeff with strictly decreasing exponents and
/// positive coefficients; the empty sum is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    #[error("cannot parse ordinal {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("{0} is not a limit ordinal")]
    NotALimit(String),
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Ordinal {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(0, n)],
            }
        }
    }

    pub fn omega() -> Ordinal {
        Ordinal {
            terms: vec![(1, 1)],
        }
    }

    /// Builds from (exponent, coefficient) pairs; must be strictly
    /// decreasing in exponent with positive coefficients.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Ordinal, OrdinalError> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(OrdinalError::Parse {
                    text: format!("{terms:?}"),
                    reason: "exponents must be strictly decreasing".into(),
                });
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(OrdinalError::Parse {
                text: format!("{terms:?}"),
                reason: "coefficients must be positive".into(),
            });
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == 0)
    }

    pub fn as_finite(&self) -> Option<u64> {
        if self.terms.is_empty() {
            Some(0)
        } else if self.is_finite() {
            Some(self.terms[0].1)
        } else {
            None
        }
    }

    /// A nonzero ordinal is a successor exactly when its last term has
    /// exponent 0.
    pub fn is_successor(&self) -> bool {
        self.terms.last().map(|&(e, _)| e == 0).unwrap_or(false)
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    pub fn successor(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) => *c += 1,
            _ => terms.push((0, 1)),
        }
        Ordinal { terms }
    }

    /// Predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        if last.1 == 1 {
            terms.pop();
        } else {
            last.1 -= 1;
        }
        Some(Ordinal { terms })
    }

    /// The standard fundamental sequence: for a limit ordinal ending in
    /// omega^e * c, the i-th element replaces that term by
    /// omega^e * (c-1) + omega^(e-1) * (i+1).
    pub fn fundamental_sequence(&self, i: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotALimit(self.to_string()));
        }
        let mut terms = self.terms.clone();
        let (e, c) = terms.pop().unwrap();
        debug_assert!(e >= 1);
        if c > 1 {
            terms.push((e, c - 1));
        }
        terms.push((e - 1, i + 1));
        Ok(Ordinal { terms })
    }

    pub fn parse(text: &str) -> Result<Ordinal, OrdinalError> {
        let err = |reason: &str| OrdinalError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut terms: Vec<(u32, u64)> = Vec::new();
        for part in compact.split('+') {
            if part.is_empty() {
                return Err(err("empty term"));
            }
            let (exp, coeff) = if let Some(rest) = part.strip_prefix('w') {
                let (exp_str, coeff_str) = match rest.find('*') {
                    Some(i) => (&rest[..i], &rest[i + 1..]),
                    None => (rest, ""),
                };
                let exp: u32 = if exp_str.is_empty() {
                    1
                } else {
                    let e = exp_str
                        .strip_prefix('^')
                        .ok_or_else(|| err(&format!("bad term {part:?}")))?;
                    e.parse().map_err(|_| err(&format!("bad exponent {e:?}")))?
                };
                let coeff: u64 = if coeff_str.is_empty() {
                    1
                } else {
                    coeff_str
                        .parse()
                        .map_err(|_| err(&format!("bad coefficient {coeff_str:?}")))?
                };
                (exp, coeff)
            } else {
                let n: u64 = part
                    .parse()
                    .map_err(|_| err(&format!("bad finite part {part:?}")))?;
                (0, n)
            };
            if coeff == 0 {
                // A zero term is only the whole ordinal 0.
                if compact == "0" {
                    return Ok(Ordinal::zero());
                }
                return Err(err("zero coefficient"));
            }
            terms.push((exp, coeff));
        }
        Ordinal::from_terms(terms).map_err(|_| err("exponents must be strictly decreasing"))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        // Lexicographic on the (exponent, coefficient) term lists; a
        // missing term is smaller.
        let mut a = self.terms.iter();
        let mut b = other.terms.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(ea, ca)), Some(&(eb, cb))) => {
                    let ord = ea.cmp(&eb).then_with(|| ca.cmp(&cb));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(e, c) in &self.terms {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if e == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "w")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                if c > 1 {
                    write!(f, "*{c}")?;
                }
            }
        }
        Ok(())
    }
}
