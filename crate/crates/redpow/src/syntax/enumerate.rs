//! Bounded enumeration of canonical Diophantine formulas and the count
//! `h(n, m)`: canonical formulas of length <= n whose free variables lie
//! among the first m slots (occurrence not required).
//!
//! Two independent routes are provided. The grammar-directed route builds
//! side polynomials by token length and pairs them; the token-string route
//! walks every token string up to the length bound, parses it, and
//! canonicalizes. Both count the same set and are cross-checked in tests.

use super::formula::DioFormula;
use super::poly::{Monomial, PolyForm};
use super::{parse_formula_tokens, Token};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

/// Default hard limit on candidate forms considered by one enumeration.
pub const DEFAULT_ENUM_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone)]
pub struct EnumConfig {
    /// Exceeding this many candidate forms aborts with an error; the limit
    /// is a loud failure, never silent truncation.
    pub limit: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            limit: DEFAULT_ENUM_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error(
        "enumeration limit {limit} exceeded (length bound {max_len}, {free_slots} free slots)"
    )]
    BudgetExceeded {
        limit: u64,
        max_len: usize,
        free_slots: usize,
    },
}

/// A canonical formula together with its cached side polynomials.
#[derive(Debug, Clone)]
pub struct CanonForm {
    pub formula: DioFormula,
    pub lhs: PolyForm,
    pub rhs: PolyForm,
    pub len: usize,
}

struct Budget<'a> {
    cfg: &'a EnumConfig,
    used: u64,
    max_len: usize,
    free_slots: usize,
}

impl Budget<'_> {
    fn spend(&mut self, amount: u64) -> Result<(), EnumError> {
        self.used = self.used.saturating_add(amount);
        if self.used > self.cfg.limit {
            Err(EnumError::BudgetExceeded {
                limit: self.cfg.limit,
                max_len: self.max_len,
                free_slots: self.free_slots,
            })
        } else {
            Ok(())
        }
    }
}

/// Grammar-directed enumeration of every canonical formula of length
/// <= `max_len` with free variables among the first `free_slots` slots.
/// The result is sorted by (length, serialization).
pub fn enumerate_canonical(
    max_len: usize,
    free_slots: usize,
    cfg: &EnumConfig,
) -> Result<Vec<CanonForm>, EnumError> {
    let mut budget = Budget {
        cfg,
        used: 0,
        max_len,
        free_slots,
    };
    let mut seen: HashSet<DioFormula> = HashSet::new();
    let mut out: Vec<CanonForm> = Vec::new();

    let mut bound = 0usize;
    loop {
        let prefix = if bound == 0 { 0 } else { 2 * bound + 2 };
        if prefix + 3 > max_len {
            break;
        }
        let body_budget = max_len - prefix;
        let var_count = bound + free_slots;

        precheck_pairs(body_budget, var_count, &mut budget)?;

        let by_len = gen_polys(body_budget - 2, var_count, &mut budget)?;
        let lens: Vec<usize> = by_len.keys().copied().collect();
        for &l1 in &lens {
            for &l2 in &lens {
                if l2 < l1 || l1 + l2 + 1 > body_budget {
                    continue;
                }
                let ps = &by_len[&l1];
                let qs = &by_len[&l2];
                for (i, p) in ps.iter().enumerate() {
                    let j0 = if l1 == l2 { i } else { 0 };
                    for q in &qs[j0..] {
                        budget.spend(1)?;
                        if p.shares_monomial(q) {
                            continue;
                        }
                        let (a, b) = if p.cmp_forms(q) == Ordering::Greater {
                            (q, p)
                        } else {
                            (p, q)
                        };
                        let raw = DioFormula::new(bound, a.to_term(), b.to_term());
                        let canon = if bound == 0 { raw } else { raw.canonicalize() };
                        if seen.insert(canon.clone()) {
                            let (lp, rp) = canon.polys();
                            let len = canon.token_len();
                            debug_assert!(len <= max_len);
                            out.push(CanonForm {
                                formula: canon,
                                lhs: lp,
                                rhs: rp,
                                len,
                            });
                        }
                    }
                }
            }
        }
        bound += 1;
    }

    out.sort_by(|a, b| {
        a.len
            .cmp(&b.len)
            .then_with(|| a.formula.to_string().cmp(&b.formula.to_string()))
    });
    Ok(out)
}

/// The public enumeration operation: the set of canonical formulas, sorted.
pub fn enumerate_formulas(
    max_len: usize,
    free_slots: usize,
    cfg: &EnumConfig,
) -> Result<Vec<DioFormula>, EnumError> {
    Ok(enumerate_canonical(max_len, free_slots, cfg)?
        .into_iter()
        .map(|c| c.formula)
        .collect())
}

/// h(n, m) by the grammar-directed route.
///
/// Counts canonical syntactic forms. Semantic equivalence of such
/// formulas over the naturals is undecidable, and distinct canonical
/// forms can be equivalent, so this count dominates any count of
/// semantic equivalence classes; every budget derived from it is at
/// least as large as one derived from the semantic count.
pub fn count_h(max_len: usize, free_slots: usize, cfg: &EnumConfig) -> Result<u64, EnumError> {
    Ok(enumerate_canonical(max_len, free_slots, cfg)?.len() as u64)
}

/// h(n, m) by the independent token-string route: every token string of
/// length <= n is parsed; well-formed formulas with admissible free slots
/// are canonicalized, filtered to canonical length <= n, and deduplicated.
pub fn count_h_token_strings(
    max_len: usize,
    free_slots: usize,
    cfg: &EnumConfig,
) -> Result<u64, EnumError> {
    let mut budget = Budget {
        cfg,
        used: 0,
        max_len,
        free_slots,
    };
    let bound_max = if max_len >= 7 { (max_len - 5) / 2 } else { 0 };
    let mut alphabet: Vec<Token> = vec![
        Token::LParen,
        Token::RParen,
        Token::Plus,
        Token::Star,
        Token::Eq,
        Token::Zero,
        Token::One,
    ];
    if bound_max > 0 {
        alphabet.push(Token::Exists);
    }
    for i in 0..(bound_max + free_slots) {
        alphabet.push(Token::Var(i));
    }

    let mut seen: HashSet<DioFormula> = HashSet::new();
    let mut buf: Vec<Token> = Vec::new();
    dfs_strings(
        &alphabet,
        max_len,
        free_slots,
        &mut buf,
        &mut seen,
        &mut budget,
    )?;
    Ok(seen.len() as u64)
}

fn dfs_strings(
    alphabet: &[Token],
    max_len: usize,
    free_slots: usize,
    buf: &mut Vec<Token>,
    seen: &mut HashSet<DioFormula>,
    budget: &mut Budget<'_>,
) -> Result<(), EnumError> {
    if buf.len() >= 3 {
        if let Ok(f) = parse_formula_tokens(buf) {
            if f.free_slots().iter().all(|&s| s < free_slots) {
                let canon = f.canonicalize();
                if canon.token_len() <= max_len {
                    seen.insert(canon);
                }
            }
        }
    }
    if buf.len() == max_len {
        return Ok(());
    }
    for &t in alphabet {
        budget.spend(1)?;
        buf.push(t);
        dfs_strings(alphabet, max_len, free_slots, buf, seen, budget)?;
        buf.pop();
    }
    Ok(())
}

/// Aborts early when even the single-monomial equations alone exceed the
/// limit; a cheap combinatorial lower bound on the candidate count.
fn precheck_pairs(
    body_budget: usize,
    var_count: usize,
    budget: &mut Budget<'_>,
) -> Result<(), EnumError> {
    // Monomials of token cost c: c = 1 covers the unit and the variables;
    // c = 2d-1 with d >= 2 covers multisets of size d over var_count vars.
    let count_cost = |c: usize| -> u128 {
        if c == 1 {
            1 + var_count as u128
        } else if c % 2 == 1 {
            let d = c.div_ceil(2);
            multiset_count(var_count as u128, d)
        } else {
            0
        }
    };
    let mut total: u128 = 0;
    let mut c1 = 1usize;
    while c1 + c1 < body_budget {
        let n1 = count_cost(c1) + if c1 == 1 { 1 } else { 0 }; // zero poly has length 1
        let mut c2 = c1;
        while c1 + c2 < body_budget {
            let n2 = count_cost(c2) + if c2 == 1 { 1 } else { 0 };
            let pairs = if c1 == c2 {
                n1.saturating_mul(n1.saturating_sub(1)) / 2
            } else {
                n1.saturating_mul(n2)
            };
            total = total.saturating_add(pairs);
            if total > budget.cfg.limit as u128 {
                return Err(EnumError::BudgetExceeded {
                    limit: budget.cfg.limit,
                    max_len: budget.max_len,
                    free_slots: budget.free_slots,
                });
            }
            c2 += 2;
        }
        c1 += 2;
    }
    Ok(())
}

fn multiset_count(vars: u128, size: usize) -> u128 {
    // C(vars + size - 1, size), saturating.
    if vars == 0 {
        return 0;
    }
    let mut num: u128 = 1;
    for i in 0..size as u128 {
        num = num.saturating_mul(vars + i);
        num /= i + 1;
        if num > u64::MAX as u128 {
            return u128::MAX / 2;
        }
    }
    num
}

/// All nonzero polynomial forms over variables `0..var_count`, grouped by
/// token length <= max_len; length 1 additionally holds the zero form.
fn gen_polys(
    max_len: usize,
    var_count: usize,
    budget: &mut Budget<'_>,
) -> Result<BTreeMap<usize, Vec<PolyForm>>, EnumError> {
    let mut monos: Vec<Monomial> = Vec::new();
    monos.push(Monomial::unit());
    let max_deg = max_len.div_ceil(2);
    let mut stack: Vec<usize> = Vec::new();
    gen_monomials(var_count, max_deg, 0, &mut stack, &mut monos);
    monos.sort_by(|a, b| a.token_cost().cmp(&b.token_cost()).then_with(|| a.cmp(b)));

    let mut out: BTreeMap<usize, Vec<PolyForm>> = BTreeMap::new();
    if max_len >= 1 {
        out.entry(1).or_default().push(PolyForm::zero());
        budget.spend(1)?;
    }
    let mut acc: Vec<usize> = Vec::new();
    gen_poly_rec(&monos, 0, max_len, &mut acc, 0, &mut out, budget)?;
    Ok(out)
}

fn gen_monomials(
    var_count: usize,
    max_deg: usize,
    _depth: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<Monomial>,
) {
    if !stack.is_empty() {
        out.push(Monomial::from_vars(stack.clone()));
    }
    if stack.len() == max_deg {
        return;
    }
    let start = stack.last().copied().unwrap_or(0);
    for v in start..var_count {
        stack.push(v);
        gen_monomials(var_count, max_deg, 0, stack, out);
        stack.pop();
    }
}

fn gen_poly_rec(
    monos: &[Monomial],
    start: usize,
    max_len: usize,
    acc: &mut Vec<usize>,
    cur_len: usize,
    out: &mut BTreeMap<usize, Vec<PolyForm>>,
    budget: &mut Budget<'_>,
) -> Result<(), EnumError> {
    for idx in start..monos.len() {
        let sep = if acc.is_empty() { 0 } else { 1 };
        let add = monos[idx].token_cost() + sep;
        if cur_len + add > max_len {
            // Monomials are sorted by cost; nothing later fits either.
            break;
        }
        acc.push(idx);
        budget.spend(1)?;
        let mut poly = PolyForm::zero();
        for &i in acc.iter() {
            poly.add_assign(&PolyForm::from_monomial(
                monos[i].clone(),
                num_bigint::BigUint::from(1u32),
            ));
        }
        out.entry(cur_len + add).or_default().push(poly);
        gen_poly_rec(monos, idx, max_len, acc, cur_len + add, out, budget)?;
        acc.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EnumConfig {
        EnumConfig::default()
    }

    #[test]
    fn nothing_fits_in_two_tokens() {
        assert_eq!(count_h(2, 5, &cfg()).unwrap(), 0);
        assert_eq!(count_h(0, 0, &cfg()).unwrap(), 0);
    }

    #[test]
    fn three_tokens_no_variables() {
        let forms = enumerate_formulas(3, 0, &cfg()).unwrap();
        let strs: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
        assert_eq!(strs, vec!["0=0", "0=1"]);
    }

    #[test]
    fn three_tokens_one_variable() {
        let forms = enumerate_formulas(3, 1, &cfg()).unwrap();
        let strs: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
        assert_eq!(strs, vec!["0=0", "0=1", "0=x0", "1=x0"]);
    }

    #[test]
    fn members_respect_length_bound_and_are_unique() {
        let forms = enumerate_formulas(7, 2, &cfg()).unwrap();
        let mut seen = std::collections::HashSet::new();
        for f in &forms {
            assert!(f.token_len() <= 7);
            assert!(f.is_canonical());
            assert!(seen.insert(f.clone()), "duplicate: {f}");
        }
    }

    #[test]
    fn counts_are_monotone() {
        for m in 0..3 {
            for n in 0..6 {
                let a = count_h(n, m, &cfg()).unwrap();
                let b = count_h(n + 1, m, &cfg()).unwrap();
                let c = count_h(n, m + 1, &cfg()).unwrap();
                assert!(a <= b, "h({n},{m}) > h({},{m})", n + 1);
                assert!(a <= c, "h({n},{m}) > h({n},{})", m + 1);
            }
        }
    }

    #[test]
    fn strategies_agree_on_small_inputs() {
        for m in 0..=2 {
            for n in 0..=5 {
                let a = count_h(n, m, &cfg()).unwrap();
                let b = count_h_token_strings(n, m, &cfg()).unwrap();
                assert_eq!(a, b, "mismatch at n={n}, m={m}");
            }
        }
    }

    #[test]
    fn budget_limit_is_loud() {
        let tight = EnumConfig { limit: 10 };
        assert!(matches!(
            count_h(7, 2, &tight),
            Err(EnumError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn explosion_precheck_fires_quickly() {
        let err = count_h(134, 4, &cfg());
        assert!(matches!(err, Err(EnumError::BudgetExceeded { .. })));
    }

    #[test]
    fn quantified_formulas_appear_from_length_seven() {
        let forms = enumerate_formulas(7, 1, &cfg()).unwrap();
        assert!(forms.iter().any(|f| f.bound_count == 1));
        let six = enumerate_formulas(6, 1, &cfg()).unwrap();
        assert!(six.iter().all(|f| f.bound_count == 0));
    }
}
