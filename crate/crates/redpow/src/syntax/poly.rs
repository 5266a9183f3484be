//! Canonical polynomial forms of terms: finite maps from monomials to
//! positive integer coefficients. The empty map is the zero polynomial.
//!
//! Monomials are ordered degree-lexicographically and polynomial forms are
//! compared entrywise along that order; this is the fixed total order used
//! to orient the two sides of a canonical equation.

use super::Term;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// A monomial: a sorted multiset of variable indices. The empty monomial
/// is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Monomial {
        Monomial(vec![i])
    }

    pub fn from_vars(mut vars: Vec<usize>) -> Monomial {
        vars.sort_unstable();
        Monomial(vars)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Monomial(v)
    }

    /// Token cost of one occurrence: `2d - 1` for degree `d >= 1`
    /// (variables joined by `*`), and 1 for the constant monomial.
    pub fn token_cost(&self) -> usize {
        if self.0.is_empty() {
            1
        } else {
            2 * self.0.len() - 1
        }
    }

    pub fn rename(&self, map: impl Fn(usize) -> usize) -> Monomial {
        Monomial::from_vars(self.0.iter().map(|&v| map(v)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial form: monomial -> positive coefficient. All arithmetic is
/// exact big-integer arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyForm(BTreeMap<Monomial, BigUint>);

impl PolyForm {
    pub fn zero() -> PolyForm {
        PolyForm(BTreeMap::new())
    }

    pub fn one() -> PolyForm {
        let mut m = BTreeMap::new();
        m.insert(Monomial::unit(), BigUint::one());
        PolyForm(m)
    }

    pub fn var(i: usize) -> PolyForm {
        let mut m = BTreeMap::new();
        m.insert(Monomial::var(i), BigUint::one());
        PolyForm(m)
    }

    pub fn constant(c: &BigUint) -> PolyForm {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::unit(), c.clone());
        }
        PolyForm(m)
    }

    pub fn from_monomial(m: Monomial, coeff: BigUint) -> PolyForm {
        let mut map = BTreeMap::new();
        if !coeff.is_zero() {
            map.insert(m, coeff);
        }
        PolyForm(map)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Monomial, &BigUint)> {
        self.0.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.0.keys()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&BigUint> {
        self.0.get(m)
    }

    pub fn add_assign(&mut self, other: &PolyForm) {
        for (m, c) in other.0.iter() {
            let entry = self.0.entry(m.clone()).or_insert_with(BigUint::zero);
            *entry += c;
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn mul(&self, other: &PolyForm) -> PolyForm {
        let mut out = BTreeMap::new();
        for (m1, c1) in self.0.iter() {
            for (m2, c2) in other.0.iter() {
                let m = m1.mul(m2);
                let entry = out.entry(m).or_insert_with(BigUint::zero);
                *entry += c1 * c2;
            }
        }
        PolyForm(out)
    }

    /// Removes the part common to both forms: for every shared monomial the
    /// smaller coefficient is subtracted from both sides. Afterwards the two
    /// forms share no monomial.
    pub fn cancel_common(a: &mut PolyForm, b: &mut PolyForm) {
        let shared: Vec<Monomial> =
            a.0.keys()
                .filter(|m| b.0.contains_key(*m))
                .cloned()
                .collect();
        for m in shared {
            let ca = a.0.get(&m).unwrap().clone();
            let cb = b.0.get(&m).unwrap().clone();
            let min = ca.clone().min(cb.clone());
            let ra = ca - &min;
            let rb = cb - &min;
            if ra.is_zero() {
                a.0.remove(&m);
            } else {
                a.0.insert(m.clone(), ra);
            }
            if rb.is_zero() {
                b.0.remove(&m);
            } else {
                b.0.insert(m.clone(), rb);
            }
        }
    }

    pub fn shares_monomial(&self, other: &PolyForm) -> bool {
        // Iterate over the smaller map.
        let (small, large) = if self.0.len() <= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.0.keys().any(|m| large.0.contains_key(m))
    }

    /// The fixed total order on polynomial forms: entries compared in
    /// monomial order, then by coefficient; a strict prefix is smaller.
    pub fn cmp_forms(&self, other: &PolyForm) -> Ordering {
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let ord = ma.cmp(mb).then_with(|| ca.cmp(cb));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
    }

    /// Token count of the canonical serialization: each monomial occurrence
    /// is repeated coefficient-many times and occurrences are joined by `+`.
    /// The zero polynomial is the single token `0`.
    pub fn token_len(&self) -> usize {
        if self.0.is_empty() {
            return 1;
        }
        let mut total = 0usize;
        let mut occurrences = 0usize;
        for (m, c) in self.0.iter() {
            // Coefficients are enumeration-scale here; usize is ample.
            let c = usize::try_from(c.clone()).expect("coefficient exceeds usize in token_len");
            total += c * m.token_cost();
            occurrences += c;
        }
        total + (occurrences - 1)
    }

    /// Rebuilds the canonical term: monomials in ascending order, repeated
    /// by coefficient, left-associated sums of left-associated products.
    pub fn to_term(&self) -> Term {
        if self.0.is_empty() {
            return Term::Zero;
        }
        let mut acc: Option<Term> = None;
        for (m, c) in self.0.iter() {
            let count = usize::try_from(c.clone()).expect("coefficient exceeds usize in to_term");
            for _ in 0..count {
                let mono_term = if m.vars().is_empty() {
                    Term::One
                } else {
                    let mut it = m.vars().iter();
                    let mut t = Term::Var(*it.next().unwrap());
                    for &v in it {
                        t = Term::times(t, Term::Var(v));
                    }
                    t
                };
                acc = Some(match acc {
                    None => mono_term,
                    Some(prev) => Term::plus(prev, mono_term),
                });
            }
        }
        acc.unwrap()
    }

    /// Renames variables through `map`. Distinct variables must stay
    /// distinct for the coefficients to be preserved; merging is still
    /// handled correctly (coefficients add).
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> PolyForm {
        let mut out = BTreeMap::new();
        for (m, c) in self.0.iter() {
            let m2 = m.rename(&map);
            let entry = out.entry(m2).or_insert_with(BigUint::zero);
            *entry += c;
        }
        PolyForm(out)
    }

    pub fn vars(&self) -> std::collections::BTreeSet<usize> {
        let mut out = std::collections::BTreeSet::new();
        for m in self.0.keys() {
            out.extend(m.vars().iter().copied());
        }
        out
    }

    /// Evaluates over the naturals.
    pub fn eval_nat(&self, assign: &dyn Fn(usize) -> BigUint) -> BigUint {
        let mut total = BigUint::zero();
        for (m, c) in self.0.iter() {
            let mut prod = c.clone();
            for &v in m.vars() {
                prod *= assign(v);
            }
            total += prod;
        }
        total
    }
}

impl From<&Term> for PolyForm {
    fn from(t: &Term) -> PolyForm {
        match t {
            Term::Zero => PolyForm::zero(),
            Term::One => PolyForm::one(),
            Term::Var(i) => PolyForm::var(*i),
            Term::Plus(a, b) => PolyForm::from(a.as_ref()).add(&PolyForm::from(b.as_ref())),
            Term::Times(a, b) => PolyForm::from(a.as_ref()).mul(&PolyForm::from(b.as_ref())),
        }
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}
