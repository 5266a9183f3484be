//! Sequences of naturals modulo a filter, at prefix scale: the cofinite
//! filter and regular filters presented by a witnessing family {A_n}.
//!
//! A regular filter appears here only through a witnessing family: a
//! countable collection of members such that every point of the index
//! set lies in finitely many of them. Filter membership beyond the
//! family is not modeled; the family itself is the whole interface.
//!
//! Every judgment here is explicitly about a finite prefix; certificates
//! carry the prefix length and never claim anything about the infinite
//! sequences behind it.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// A finite prefix of a sequence of naturals, indices 0..L-1 with L >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqPrefix {
    values: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("sequence prefixes must be nonempty")]
    Empty,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sequences disagree at index {index}, at or beyond the claimed threshold {n0}")]
    NotEventuallyEqual { index: usize, n0: usize },
    #[error("custom family has no set with index {index} (only {len} declared)")]
    CustomIndex { index: usize, len: usize },
}

impl SeqPrefix {
    pub fn new(values: Vec<BigUint>) -> Result<SeqPrefix, FilterError> {
        if values.is_empty() {
            return Err(FilterError::Empty);
        }
        Ok(SeqPrefix { values })
    }

    pub fn from_u64(values: &[u64]) -> SeqPrefix {
        SeqPrefix {
            values: values.iter().map(|&v| BigUint::from(v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }
}

/// An equality certificate relative to a prefix of length `prefix_len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EqCertificate {
    /// The sequences agree at every index in [n0, prefix_len).
    CofiniteTail { n0: usize, prefix_len: usize },
    /// A_{n1} misses {0..n0} and the sequences agree on A_{n1} within the
    /// prefix.
    RegularFamily {
        n0: usize,
        n1: usize,
        prefix_len: usize,
    },
}

/// A witnessing family for a regular filter, as a decidable membership
/// predicate from a fixed catalog plus optional explicit custom sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum RegularFamily {
    /// A_n = [n, infinity).
    Tails,
    /// A_n = {n} union [2n, infinity).
    Diagonal,
    /// A_n = { m : m = residue mod p_n } with p_n the n-th prime. A
    /// demonstration family: the point `residue` lies in every member, so
    /// the point-finiteness check flags it.
    Arithmetic { residue: u64 },
    /// Explicit finite sets with an optional tail rule per set.
    Custom { sets: Vec<CustomSet> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomSet {
    #[serde(default)]
    pub finite: Vec<u64>,
    #[serde(default)]
    pub tail_from: Option<u64>,
}

impl RegularFamily {
    /// Is k a member of A_n?
    pub fn member(&self, n: usize, k: u64) -> Result<bool, FilterError> {
        match self {
            RegularFamily::Tails => Ok(k >= n as u64),
            RegularFamily::Diagonal => Ok(k == n as u64 || k >= 2 * n as u64),
            RegularFamily::Arithmetic { residue } => {
                let p = nth_prime(n);
                Ok(k % p == residue % p)
            }
            RegularFamily::Custom { sets } => {
                let set = sets.get(n).ok_or(FilterError::CustomIndex {
                    index: n,
                    len: sets.len(),
                })?;
                Ok(set.finite.contains(&k) || set.tail_from.map(|t| k >= t).unwrap_or(false))
            }
        }
    }

    pub fn parse(text: &str) -> Result<RegularFamily, String> {
        match text {
            "tails" => Ok(RegularFamily::Tails),
            "diagonal" => Ok(RegularFamily::Diagonal),
            other => {
                if let Some(r) = other.strip_prefix("arithmetic:") {
                    let residue = r.parse().map_err(|e| format!("bad residue {r:?}: {e}"))?;
                    Ok(RegularFamily::Arithmetic { residue })
                } else {
                    Err(format!(
                        "unknown family {other:?} (use tails, diagonal, arithmetic:<k>, or a custom JSON file)"
                    ))
                }
            }
        }
    }
}

fn nth_prime(n: usize) -> u64 {
    let mut found = 0usize;
    let mut candidate: u64 = 1;
    loop {
        candidate += 1;
        if is_prime(candidate) {
            if found == n {
                return candidate;
            }
            found += 1;
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Equality modulo the cofinite filter, judged on the prefix: the minimal
/// n0 from which the sequences agree through the end of the prefix, or
/// `None` when they differ at the last index.
pub fn eq_mod_cofinite(f: &SeqPrefix, g: &SeqPrefix) -> Result<Option<EqCertificate>, FilterError> {
    if f.len() != g.len() {
        return Err(FilterError::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let mut n0 = 0usize;
    for i in (0..f.len()).rev() {
        if f.values[i] != g.values[i] {
            n0 = i + 1;
            break;
        }
    }
    if n0 >= f.len() {
        Ok(None)
    } else {
        Ok(Some(EqCertificate::CofiniteTail {
            n0,
            prefix_len: f.len(),
        }))
    }
}

/// Minimal index from which f <= g pointwise through the prefix end.
pub fn le_mod_cofinite(f: &SeqPrefix, g: &SeqPrefix) -> Result<Option<usize>, FilterError> {
    if f.len() != g.len() {
        return Err(FilterError::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let mut n0 = 0usize;
    for i in (0..f.len()).rev() {
        if f.values[i] > g.values[i] {
            n0 = i + 1;
            break;
        }
    }
    if n0 >= f.len() {
        Ok(None)
    } else {
        Ok(Some(n0))
    }
}

/// Equality through a regular family: given that f and g agree at indices
/// >= n0 within the prefix, searches n1 in increasing order (up to
/// > `search_limit`) for a family member avoiding {0..n0} and checks the
/// > agreement on A_{n1} within the prefix. `Ok(None)` means the search
/// > limit was reached without finding a witness, which is reported
/// > distinctly from a refuted precondition.
pub fn eq_mod_regular(
    f: &SeqPrefix,
    g: &SeqPrefix,
    family: &RegularFamily,
    n0: usize,
    search_limit: usize,
) -> Result<Option<EqCertificate>, FilterError> {
    if f.len() != g.len() {
        return Err(FilterError::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    for i in n0..f.len() {
        if f.values[i] != g.values[i] {
            return Err(FilterError::NotEventuallyEqual { index: i, n0 });
        }
    }
    'candidates: for n1 in 0..=search_limit {
        for k in 0..=n0 as u64 {
            if family.member(n1, k)? {
                continue 'candidates;
            }
        }
        // A_{n1} avoids {0..n0}; agreement on A_{n1} within the prefix.
        for i in 0..f.len() {
            if family.member(n1, i as u64)? && f.values[i] != g.values[i] {
                continue 'candidates;
            }
        }
        return Ok(Some(EqCertificate::RegularFamily {
            n0,
            n1,
            prefix_len: f.len(),
        }));
    }
    Ok(None)
}

/// Point-finiteness evidence on the inspected prefix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointFinitenessReport {
    pub prefix_len: usize,
    pub n_max: usize,
    pub points: Vec<PointMembership>,
    /// Family indices n <= n_max whose member is empty on [0, prefix_len).
    pub empty_on_prefix: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointMembership {
    pub point: u64,
    /// All n <= n_max with point in A_n.
    pub member_of: Vec<usize>,
    /// The point still lies in A_{n_max}, so its membership list may keep
    /// growing beyond the inspected range.
    pub flagged: bool,
}

pub fn check_point_finiteness(
    family: &RegularFamily,
    prefix_len: usize,
    n_max: usize,
) -> Result<PointFinitenessReport, FilterError> {
    let mut points = Vec::with_capacity(prefix_len);
    for k in 0..prefix_len as u64 {
        let mut member_of = Vec::new();
        for n in 0..=n_max {
            if family.member(n, k)? {
                member_of.push(n);
            }
        }
        let flagged = member_of.last() == Some(&n_max);
        points.push(PointMembership {
            point: k,
            member_of,
            flagged,
        });
    }
    let mut empty_on_prefix = Vec::new();
    for n in 0..=n_max {
        let mut any = false;
        for k in 0..prefix_len as u64 {
            if family.member(n, k)? {
                any = true;
                break;
            }
        }
        if !any {
            empty_on_prefix.push(n);
        }
    }
    Ok(PointFinitenessReport {
        prefix_len,
        n_max,
        points,
        empty_on_prefix,
    })
}
