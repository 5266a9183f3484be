//! Diophantine formulas and their canonical forms.
//!
//! A canonical formula has: the part common to both sides cancelled, the
//! two sides oriented by the fixed total order on polynomial forms (smaller
//! side first), and bound variables renumbered so that the serialized body
//! is minimal over all permutations of the bound variables. Its length is
//! the token count of the canonical serialization.

use super::poly::PolyForm;
use super::{Term, Token};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// An existential block over an equation between two terms.
///
/// Variable indices below `bound_count` are bound; index `bound_count + j`
/// is the j-th free slot. `free_vars` lists the free indices occurring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DioFormula {
    pub bound_count: usize,
    pub lhs: Term,
    pub rhs: Term,
    pub free_vars: Vec<usize>,
}

impl DioFormula {
    pub fn new(bound_count: usize, lhs: Term, rhs: Term) -> DioFormula {
        let mut free: Vec<usize> = lhs
            .vars()
            .union(&rhs.vars())
            .copied()
            .filter(|&v| v >= bound_count)
            .collect();
        free.sort_unstable();
        DioFormula {
            bound_count,
            lhs,
            rhs,
            free_vars: free,
        }
    }

    /// Quantifier-free equation between two terms over free slots only.
    pub fn equation(lhs: Term, rhs: Term) -> DioFormula {
        DioFormula::new(0, lhs, rhs)
    }

    pub fn polys(&self) -> (PolyForm, PolyForm) {
        (PolyForm::from(&self.lhs), PolyForm::from(&self.rhs))
    }

    /// Free slot indices (free variable index minus `bound_count`).
    pub fn free_slots(&self) -> Vec<usize> {
        self.free_vars
            .iter()
            .map(|&v| v - self.bound_count)
            .collect()
    }

    pub fn tokens(&self) -> Vec<Token> {
        let mut out = Vec::new();
        for i in 0..self.bound_count {
            out.push(Token::Exists);
            out.push(Token::Var(i));
        }
        if self.bound_count > 0 {
            out.push(Token::LParen);
        }
        self.lhs.push_tokens(&mut out, super::TokenCtx::Top);
        out.push(Token::Eq);
        self.rhs.push_tokens(&mut out, super::TokenCtx::Top);
        if self.bound_count > 0 {
            out.push(Token::RParen);
        }
        out
    }

    /// Token count of this formula's serialization. For a canonical formula
    /// this is the length measure used by the counting functions.
    pub fn token_len(&self) -> usize {
        self.tokens().len()
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    /// Canonical form: cancel the common part, orient sides by the fixed
    /// order, and pick the bound-variable numbering with the minimal
    /// serialized body. Idempotent, and sound for every model where
    /// addition is cancellative.
    pub fn canonicalize(&self) -> DioFormula {
        let (lp, rp) = self.polys();
        let bound_used: Vec<usize> = lp
            .vars()
            .union(&rp.vars())
            .copied()
            .filter(|&v| v < self.bound_count)
            .collect();

        // The used bound variables are assigned the indices 0..k-1: a
        // monotone relabeling never increases the serialized body, so the
        // minimum over all renamings is attained on the lowest block.
        let targets: Vec<usize> = (0..bound_used.len()).collect();
        let mut best: Option<(PolyForm, PolyForm)> = None;
        for perm in permutations(&targets) {
            let rename = |v: usize| -> usize {
                if v < self.bound_count {
                    let pos = bound_used.iter().position(|&u| u == v).unwrap();
                    perm[pos]
                } else {
                    v
                }
            };
            let mut a = lp.rename(rename);
            let mut b = rp.rename(rename);
            PolyForm::cancel_common(&mut a, &mut b);
            if a.cmp_forms(&b) == Ordering::Greater {
                std::mem::swap(&mut a, &mut b);
            }
            let candidate = (a, b);
            best = Some(match best {
                None => candidate,
                Some(prev) => {
                    if cmp_pair(&candidate, &prev) == Ordering::Less {
                        candidate
                    } else {
                        prev
                    }
                }
            });
        }
        let (a, b) = best.unwrap();
        DioFormula::new(self.bound_count, a.to_term(), b.to_term())
    }

    /// Satisfaction over the naturals with free slots assigned by `slots`
    /// (slot j = variable `bound_count + j`). Existential witnesses are
    /// searched in the box `0..=exist_box` per bound variable; `true` is
    /// therefore always sound, while `false` for a quantified formula
    /// means no witness within the box.
    pub fn eval_nat(&self, slots: &dyn Fn(usize) -> BigUint, exist_box: u64) -> bool {
        let (lp, rp) = self.polys();
        let mut bound_vals = vec![BigUint::from(0u32); self.bound_count];
        eval_exists(&lp, &rp, self, slots, &mut bound_vals, 0, exist_box)
    }
}

fn eval_exists(
    lp: &PolyForm,
    rp: &PolyForm,
    f: &DioFormula,
    slots: &dyn Fn(usize) -> BigUint,
    bound_vals: &mut Vec<BigUint>,
    depth: usize,
    exist_box: u64,
) -> bool {
    if depth == f.bound_count {
        let assign = |v: usize| -> BigUint {
            if v < f.bound_count {
                bound_vals[v].clone()
            } else {
                slots(v - f.bound_count)
            }
        };
        return lp.eval_nat(&assign) == rp.eval_nat(&assign);
    }
    for k in 0..=exist_box {
        bound_vals[depth] = BigUint::from(k);
        if eval_exists(lp, rp, f, slots, bound_vals, depth + 1, exist_box) {
            return true;
        }
    }
    false
}

/// Evaluates a quantifier-free formula over the naturals with a total
/// assignment of its free slots.
pub fn eval_formula_nat(f: &DioFormula, slots: &dyn Fn(usize) -> BigUint) -> bool {
    debug_assert_eq!(f.bound_count, 0);
    f.eval_nat(slots, 0)
}

fn cmp_pair(a: &(PolyForm, PolyForm), b: &(PolyForm, PolyForm)) -> Ordering {
    a.0.cmp_forms(&b.0).then_with(|| a.1.cmp_forms(&b.1))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut work = items.to_vec();
    permute_rec(&mut work, 0, &mut out);
    out
}

fn permute_rec(work: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == work.len() {
        out.push(work.clone());
        return;
    }
    for i in k..work.len() {
        work.swap(k, i);
        permute_rec(work, k + 1, out);
        work.swap(k, i);
    }
}

impl fmt::Display for DioFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.tokens() {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term};

    fn canon(s: &str) -> String {
        parse_formula(s).unwrap().canonicalize().to_string()
    }

    #[test]
    fn shared_constant_cancels() {
        assert_eq!(canon("1=1"), "0=0");
    }

    #[test]
    fn commuted_sides_cancel_to_trivial() {
        assert_eq!(canon("x0+x1=x1+x0"), "0=0");
    }

    #[test]
    fn side_orientation_is_fixed() {
        let a = parse_formula("x1+1=x0").unwrap().canonicalize();
        let b = parse_formula("x0=x1+1").unwrap().canonicalize();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1+x1=x0");
    }

    #[test]
    fn canonicalize_is_idempotent_on_samples() {
        for s in [
            "1=1",
            "x0+x1=x1+x0",
            "(x0+1)*(x0+1)=x1",
            "Ex0(x0+x0=x1)",
            "Ex0Ex1(x1=x0*x0)",
            "Ex0Ex1(x1+x2=x0)",
        ] {
            let c = parse_formula(s).unwrap().canonicalize();
            assert_eq!(c, c.canonicalize(), "not idempotent for {s}");
        }
    }

    #[test]
    fn bound_variable_numbering_is_minimized() {
        // Ex0Ex1(x1=x2) and Ex0Ex1(x0=x2) differ only in which bound
        // variable occurs; the canonical form uses x0.
        let a = parse_formula("Ex0Ex1(x1=x2)").unwrap().canonicalize();
        let b = parse_formula("Ex0Ex1(x0=x2)").unwrap().canonicalize();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "Ex0Ex1(x0=x2)");
    }

    #[test]
    fn length_counts_tokens_of_canonical_serialization() {
        assert_eq!(parse_formula("0=0").unwrap().token_len(), 3);
        assert_eq!(parse_formula("x0=0").unwrap().canonicalize().token_len(), 3);
        // Quantifier and binder are one token each; the body parens count.
        let f = parse_formula("Ex0(x0+x0=x1)").unwrap().canonicalize();
        assert_eq!(f.to_string(), "Ex0(x0+x0=x1)");
        assert_eq!(f.token_len(), 9);
    }

    #[test]
    fn free_vars_listed_and_sorted() {
        let f = parse_formula("Ex0(x3+x0=x1)").unwrap();
        assert_eq!(f.bound_count, 1);
        assert_eq!(f.free_vars, vec![1, 3]);
        assert_eq!(f.free_slots(), vec![0, 2]);
    }

    #[test]
    fn eval_nat_checks_equation() {
        let f = parse_formula("x0+x1=x2").unwrap();
        let vals = [2u32, 3, 5];
        assert!(eval_formula_nat(&f, &|j| BigUint::from(vals[j])));
        let bad = [2u32, 3, 6];
        assert!(!eval_formula_nat(&f, &|j| BigUint::from(bad[j])));
    }

    #[test]
    fn eval_nat_searches_existential_box() {
        // Ex0(x0+x0=x1): slot 0 even.
        let f = parse_formula("Ex0(x0+x0=x1)").unwrap();
        assert!(f.eval_nat(&|_| BigUint::from(8u32), 10));
        assert!(!f.eval_nat(&|_| BigUint::from(7u32), 10));
    }

    #[test]
    fn semantic_soundness_of_cancellation() {
        let f = parse_formula("x0+x1+1=x1+x2").unwrap();
        let c = f.canonicalize();
        for a in 0u32..4 {
            for b in 0u32..4 {
                for d in 0u32..4 {
                    let vals = [a, b, d];
                    let assign = |j: usize| BigUint::from(vals[j]);
                    assert_eq!(eval_formula_nat(&f, &assign), eval_formula_nat(&c, &assign));
                }
            }
        }
    }

    #[test]
    fn parse_term_example_roundtrip() {
        let t = parse_term("x0*x0+1").unwrap();
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }
}
