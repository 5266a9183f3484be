//! The coherent family of finite ordinal sets u(alpha, n).
//!
//! Construction, by recursion on the ordinal notation:
//!
//! - u(0, n) = {0} for every n;
//! - alpha = beta + 1: u(alpha, n) = {alpha} below the entry stage n0,
//!   and u(beta, n) + {alpha} from n0 on, where n0 is the least stage
//!   from which |u(beta, n)| / n stays below 1/2;
//! - alpha a limit: with fundamental sequence d_0 < d_1 < ... and chosen
//!   stages n_0 < n_1 < ..., u(alpha, n) = {alpha} below n_0 and
//!   u(d_i, n) + {alpha} on [n_i, n_{i+1}). The stages are the least
//!   values with d_i in u(d_{i+1}, n_i) and, for i >= 1, with
//!   n_{i-1} * |u(d_i, m)| < m for every m >= n_i.
//!
//! "For every m >= t" thresholds are computed exactly: a certified upper
//! bound is derived recursively from the construction, then lowered to
//! the true least value by walking the pieces on which the size function
//! is constant. The clause checker verifies the family's cardinality
//! bound, nesting, coherence, exhaustion thresholds, and vanishing
//! density on any requested window.

use crate::ordinal::Ordinal;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UFamilyError {
    #[error("stage horizon {cap} exceeded while computing {what}")]
    HorizonExceeded { cap: u64, what: String },
}

#[derive(Debug, Clone)]
enum Meta {
    Zero,
    Successor {
        base: Ordinal,
        entry: u64,
    },
    /// Materialized prefix of the limit data: (d_i, n_i) pairs.
    Limit {
        seq: Vec<(Ordinal, u64)>,
    },
}

/// Memoized builder for the family. All queries go through `&mut self`;
/// the per-ordinal thresholds are computed once and reused.
#[derive(Debug, Default)]
pub struct UFamily {
    meta: HashMap<Ordinal, Meta>,
    /// Hard cap on any stage value the builder will touch.
    pub stage_cap: u64,
}

impl UFamily {
    pub fn new() -> UFamily {
        UFamily {
            meta: HashMap::new(),
            stage_cap: 1 << 44,
        }
    }

    /// The set u(alpha, n).
    pub fn set(&mut self, alpha: &Ordinal, n: u64) -> Result<BTreeSet<Ordinal>, UFamilyError> {
        match self.base_at(alpha, n)? {
            None => Ok([alpha.clone()].into_iter().collect()),
            Some(base) => {
                let mut s = self.set(&base, n)?;
                s.insert(alpha.clone());
                Ok(s)
            }
        }
    }

    /// |u(alpha, n)| without materializing the set.
    pub fn size(&mut self, alpha: &Ordinal, n: u64) -> Result<u64, UFamilyError> {
        Ok(self.size_and_piece_start(alpha, n)?.0)
    }

    /// The size together with the start of the maximal piece [start, n]
    /// on which the size function is constant.
    fn size_and_piece_start(
        &mut self,
        alpha: &Ordinal,
        n: u64,
    ) -> Result<(u64, u64), UFamilyError> {
        match self.meta_for(alpha)? {
            Meta::Zero => Ok((1, 0)),
            Meta::Successor { base, entry } => {
                if n < entry {
                    Ok((1, 0))
                } else {
                    let (s, start) = self.size_and_piece_start(&base, n)?;
                    Ok((s + 1, start.max(entry)))
                }
            }
            Meta::Limit { .. } => {
                let seq = self.limit_seq_until(alpha, n)?;
                if seq.is_empty() || n < seq[0].1 {
                    return Ok((1, 0));
                }
                let mut idx = 0;
                for (i, entry) in seq.iter().enumerate() {
                    if entry.1 <= n {
                        idx = i;
                    } else {
                        break;
                    }
                }
                let (d, stage) = seq[idx].clone();
                let (s, start) = self.size_and_piece_start(&d, n)?;
                Ok((s + 1, start.max(stage)))
            }
        }
    }

    /// The ordinal whose set this one extends at stage n: the predecessor
    /// (successor case) or the fundamental-sequence element of the stage's
    /// interval (limit case); `None` when u(alpha, n) = {alpha}.
    fn base_at(&mut self, alpha: &Ordinal, n: u64) -> Result<Option<Ordinal>, UFamilyError> {
        match self.meta_for(alpha)? {
            Meta::Zero => Ok(None),
            Meta::Successor { base, entry } => {
                if n >= entry {
                    Ok(Some(base))
                } else {
                    Ok(None)
                }
            }
            Meta::Limit { .. } => {
                let seq = self.limit_seq_until(alpha, n)?;
                if seq.is_empty() || n < seq[0].1 {
                    return Ok(None);
                }
                let mut chosen = &seq[0];
                for entry in &seq {
                    if entry.1 <= n {
                        chosen = entry;
                    } else {
                        break;
                    }
                }
                Ok(Some(chosen.0.clone()))
            }
        }
    }

    fn meta_for(&mut self, alpha: &Ordinal) -> Result<Meta, UFamilyError> {
        if let Some(m) = self.meta.get(alpha) {
            return Ok(m.clone());
        }
        let m = if alpha.is_zero() {
            Meta::Zero
        } else if let Some(base) = alpha.predecessor() {
            let entry = self.entry_threshold(&base)?;
            Meta::Successor { base, entry }
        } else {
            Meta::Limit { seq: Vec::new() }
        };
        self.meta.insert(alpha.clone(), m.clone());
        Ok(m)
    }

    /// Successor entry stage for base beta: the least t with
    /// 2 * |u(beta, m)| < m for every m >= t.
    pub fn entry_threshold(&mut self, beta: &Ordinal) -> Result<u64, UFamilyError> {
        self.aff_threshold(beta, 2, 0)
    }

    /// Extends the limit sequence of `alpha` until the last stage exceeds
    /// `n`, returning the materialized prefix.
    fn limit_seq_until(
        &mut self,
        alpha: &Ordinal,
        n: u64,
    ) -> Result<Vec<(Ordinal, u64)>, UFamilyError> {
        loop {
            let seq = match self.meta.get(alpha) {
                Some(Meta::Limit { seq }) => seq.clone(),
                _ => unreachable!("limit_seq_until on non-limit"),
            };
            if let Some(&(_, last)) = seq.last() {
                if last > n {
                    return Ok(seq);
                }
            }
            let i = seq.len() as u64;
            let d_i = alpha
                .fundamental_sequence(i)
                .expect("limit ordinal has a fundamental sequence");
            let d_next = alpha.fundamental_sequence(i + 1).unwrap();
            let membership = self.membership_threshold(&d_i, &d_next)?;
            let n_i = if let Some(&(_, prev)) = seq.last() {
                let ratio = self.aff_threshold(&d_i, prev, 0)?;
                membership.max(ratio).max(prev + 1)
            } else {
                membership.max(1)
            };
            if n_i > self.stage_cap {
                return Err(UFamilyError::HorizonExceeded {
                    cap: self.stage_cap,
                    what: format!("limit stage {} of {}", i, alpha),
                });
            }
            match self.meta.get_mut(alpha) {
                Some(Meta::Limit { seq }) => seq.push((d_i, n_i)),
                _ => unreachable!(),
            }
        }
    }

    /// Least n with beta in u(target, n); exists for beta <= target by the
    /// exhaustion property, searched upward to the stage cap.
    pub fn membership_threshold(
        &mut self,
        beta: &Ordinal,
        target: &Ordinal,
    ) -> Result<u64, UFamilyError> {
        match self.membership_threshold_within(beta, target, self.stage_cap)? {
            Some(n) => Ok(n),
            None => Err(UFamilyError::HorizonExceeded {
                cap: self.stage_cap,
                what: format!("membership of {} in the family of {}", beta, target),
            }),
        }
    }

    /// As `membership_threshold`, but with a search horizon independent of
    /// the machinery's stage cap; `None` means not reached by the horizon.
    pub fn membership_threshold_within(
        &mut self,
        beta: &Ordinal,
        target: &Ordinal,
        horizon: u64,
    ) -> Result<Option<u64>, UFamilyError> {
        for n in 0..=horizon {
            if self.set(target, n)?.contains(beta) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// The least t >= 1 such that c * |u(beta, m)| + d < m for every
    /// m >= t. A certified upper bound is computed from the construction,
    /// then lowered exactly by walking the constant pieces of the size
    /// function downward.
    pub fn aff_threshold(&mut self, beta: &Ordinal, c: u64, d: i64) -> Result<u64, UFamilyError> {
        let upper = self.aff_upper_bound(beta, c, d)?;
        let mut m = upper - 1;
        while m >= 1 {
            let (s, start) = self.size_and_piece_start(beta, m)?;
            // The condition fails exactly at points <= c*s + d.
            let fail_top = (c as i128) * (s as i128) + (d as i128);
            if fail_top >= m as i128 {
                return Ok(m + 1);
            }
            if fail_top >= start as i128 && fail_top >= 1 {
                return Ok((fail_top + 1) as u64);
            }
            if start == 0 {
                break;
            }
            m = start - 1;
        }
        Ok(1)
    }

    /// Sound upper bound for `aff_threshold`: every m >= bound satisfies
    /// the condition.
    ///
    /// - beta = 0: the size is 1, so the condition is m > c + d.
    /// - beta = gamma + 1: from the entry stage on,
    ///   |u(beta, m)| = |u(gamma, m)| + 1, reducing to gamma with offset
    ///   d + c.
    /// - beta a limit: pick the least j >= 1 whose previous stage
    ///   satisfies n_{j-1} >= 2c. For m >= n_j the interval index i is
    ///   >= j, so c * |u(d_i, m)| < c * m / n_{i-1} <= m / 2 by the
    ///   > recorded ratio condition, and c * |u(beta, m)| + d
    ///   > < m/2 + c + d < m once also m > 2(c + d).
    fn aff_upper_bound(&mut self, beta: &Ordinal, c: u64, d: i64) -> Result<u64, UFamilyError> {
        fn check_cap(cap: u64, v: i128, what: &str) -> Result<u64, UFamilyError> {
            if v > cap as i128 {
                Err(UFamilyError::HorizonExceeded {
                    cap,
                    what: what.to_string(),
                })
            } else {
                Ok(v.max(1) as u64)
            }
        }
        let cap = self.stage_cap;
        match self.meta_for(beta)? {
            Meta::Zero => check_cap(
                cap,
                c as i128 + d as i128 + 1,
                "a threshold over the base family",
            ),
            Meta::Successor { base, entry } => {
                let inner = self.aff_upper_bound(&base, c, d + c as i64)?;
                Ok(entry.max(inner))
            }
            Meta::Limit { .. } => {
                let mut j = 1usize;
                loop {
                    // Materialize stages up to index j.
                    let seq = {
                        let mut needed = match self.meta.get(beta) {
                            Some(Meta::Limit { seq }) => seq.clone(),
                            _ => unreachable!(),
                        };
                        while needed.len() <= j {
                            let last_stage = needed.last().map(|&(_, s)| s).unwrap_or(0);
                            self.limit_seq_until(beta, last_stage)?;
                            needed = match self.meta.get(beta) {
                                Some(Meta::Limit { seq }) => seq.clone(),
                                _ => unreachable!(),
                            };
                        }
                        needed
                    };
                    if seq[j - 1].1 >= 2 * c {
                        let low = 2 * (c as i128 + d as i128) + 1;
                        let bound = (seq[j].1 as i128).max(low);
                        return check_cap(cap, bound, "a threshold over a limit family");
                    }
                    j += 1;
                }
            }
        }
    }
}

/// Per-clause outcomes of the family checks for one ordinal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaReport {
    pub alpha: String,
    pub n_max: u64,
    /// Cardinality bound |u(alpha, n)| < n + 1, checked for 1 <= n <= n_max
    /// (at n = 0 the bound is incompatible with self-membership for any
    /// family of this shape).
    pub cardinality_ok: bool,
    pub cardinality_failures: Vec<u64>,
    /// alpha in u(alpha, n) and u(alpha, n) within u(alpha, n+1),
    /// for 0 <= n <= n_max.
    pub nesting_ok: bool,
    pub nesting_failures: Vec<u64>,
    /// Coherence: beta in u(alpha, n) implies u(beta, n) equals the part
    /// of u(alpha, n) at or below beta; 0 <= n <= n_max.
    pub coherence_ok: bool,
    pub coherence_failures: Vec<String>,
    /// Exhaustion: per candidate beta <= alpha, the least stage at which
    /// beta enters the family, when found within the search horizon.
    pub exhaustion: Vec<ExhaustionEntry>,
    /// Vanishing density: per epsilon = 1/den, the exact stage from which
    /// |u(alpha, n)| / (n + 1) stays at or below epsilon.
    pub density: Vec<DensityEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExhaustionEntry {
    pub beta: String,
    pub threshold: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEntry {
    pub denominator: u64,
    pub threshold: u64,
    /// The ratio was re-verified pointwise on [threshold, verified_to].
    pub verified_to: u64,
}

impl LemmaReport {
    pub fn all_ok(&self) -> bool {
        self.cardinality_ok
            && self.nesting_ok
            && self.coherence_ok
            && self.exhaustion.iter().all(|e| e.threshold.is_some())
    }
}

/// Runs every clause check for `alpha` on stages up to `n_max`. The
/// exhaustion search runs up to `exhaustion_horizon`, which may exceed
/// `n_max`; candidate betas are filtered to those at most alpha.
pub fn check_lemma_clauses(
    fam: &mut UFamily,
    alpha: &Ordinal,
    n_max: u64,
    candidates: &[Ordinal],
    exhaustion_horizon: u64,
) -> Result<LemmaReport, UFamilyError> {
    let mut cardinality_failures = Vec::new();
    for n in 1..=n_max {
        let size = fam.size(alpha, n)?;
        if size > n {
            cardinality_failures.push(n);
        }
    }

    let mut nesting_failures = Vec::new();
    for n in 0..=n_max {
        let here = fam.set(alpha, n)?;
        let next = fam.set(alpha, n + 1)?;
        if !here.contains(alpha) || !here.is_subset(&next) {
            nesting_failures.push(n);
        }
    }

    let mut coherence_failures = Vec::new();
    for n in 0..=n_max {
        let here = fam.set(alpha, n)?;
        for beta in &here {
            let expected: BTreeSet<Ordinal> = here.iter().filter(|g| *g <= beta).cloned().collect();
            let actual = fam.set(beta, n)?;
            if actual != expected {
                coherence_failures.push(format!("beta={beta}, n={n}"));
            }
        }
    }

    let mut exhaustion = Vec::new();
    for beta in candidates {
        if beta > alpha {
            continue;
        }
        let threshold = fam.membership_threshold_within(beta, alpha, exhaustion_horizon)?;
        exhaustion.push(ExhaustionEntry {
            beta: beta.to_string(),
            threshold,
        });
    }

    let mut density = Vec::new();
    for den in [2u64, 4, 8] {
        // |u| / (n+1) <= 1/den  iff  den * |u| <= n + 1  iff  den * |u| - 2 < n.
        let threshold = fam.aff_threshold(alpha, den, -2)?;
        let verified_to = n_max.max(threshold + 32);
        for n in threshold..=verified_to {
            let s = fam.size(alpha, n)?;
            assert!(
                den as u128 * s as u128 <= n as u128 + 1,
                "certified density threshold violated at n={n} for {alpha}"
            );
        }
        density.push(DensityEntry {
            denominator: den,
            threshold,
            verified_to,
        });
    }

    Ok(LemmaReport {
        alpha: alpha.to_string(),
        n_max,
        cardinality_ok: cardinality_failures.is_empty(),
        cardinality_failures,
        nesting_ok: nesting_failures.is_empty(),
        nesting_failures,
        coherence_ok: coherence_failures.is_empty(),
        coherence_failures,
        exhaustion,
        density,
    })
}
