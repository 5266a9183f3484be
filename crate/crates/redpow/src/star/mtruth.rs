//! Truth of Diophantine formulas in the polynomial model.
//!
//! Quantifier-free equations are decided by substitution. Existential
//! formulas are decided exactly when, after substituting the slot values,
//! at most one unknown occurs: a polynomial root in Z[X] has degree
//! bounded by the coefficient degrees, its values at sample points are
//! integer roots of integer polynomials, and interpolation recovers every
//! candidate. With two or more unknowns a witness search runs over a
//! small candidate grid (solving the last unknown exactly); failure to
//! find a witness there is reported as `Unknown`, never as falsity.

use crate::models::{PolyElem, ZPoly};
use crate::syntax::{Monomial, PolyForm};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MVerdict {
    True,
    False,
    /// The bounded procedure could neither witness nor refute.
    Unknown,
}

/// A polynomial in the bound variables with Z[X] coefficients.
type BoundPoly = BTreeMap<Monomial, ZPoly>;

fn substitute(form: &PolyForm, bound_count: usize, values: &[PolyElem]) -> BoundPoly {
    let mut out: BoundPoly = BTreeMap::new();
    for (mono, coeff) in form.entries() {
        let mut bound_part = Vec::new();
        let mut value_part = ZPoly::constant(BigInt::from(coeff.clone()));
        for &v in mono.vars() {
            if v < bound_count {
                bound_part.push(v);
            } else {
                value_part = value_part.mul(values[v - bound_count].as_zpoly());
            }
        }
        let key = Monomial::from_vars(bound_part);
        let entry = out.entry(key).or_insert_with(ZPoly::zero);
        *entry = entry.add(&value_part);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn diff(lhs: &BoundPoly, rhs: &BoundPoly) -> BoundPoly {
    let mut out = lhs.clone();
    for (m, c) in rhs {
        let entry = out.entry(m.clone()).or_insert_with(ZPoly::zero);
        *entry = entry.sub(c);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn unknowns(p: &BoundPoly) -> Vec<usize> {
    let mut vars = std::collections::BTreeSet::new();
    for m in p.keys() {
        vars.extend(m.vars().iter().copied());
    }
    vars.into_iter().collect()
}

/// Decides whether the polynomial model satisfies the existential closure
/// of lhs = rhs at the given slot values.
pub fn m_holds(
    bound_count: usize,
    lhs: &PolyForm,
    rhs: &PolyForm,
    values: &[PolyElem],
) -> MVerdict {
    let l = substitute(lhs, bound_count, values);
    let r = substitute(rhs, bound_count, values);
    let d = diff(&l, &r);
    decide(&d, values)
}

fn decide(d: &BoundPoly, values: &[PolyElem]) -> MVerdict {
    if d.is_empty() {
        return MVerdict::True;
    }
    let vars = unknowns(d);
    match vars.len() {
        0 => MVerdict::False,
        1 => single_unknown(d),
        _ => multi_unknown(d, &vars, values),
    }
}

/// Exact decision for one unknown: does c_k y^k + ... + c_0 = 0 have a
/// root y in the nonnegative part of Z[X]?
fn single_unknown(d: &BoundPoly) -> MVerdict {
    let deg_y = d.keys().map(|m| m.degree()).max().unwrap();
    let mut coeffs: Vec<ZPoly> = vec![ZPoly::zero(); deg_y + 1];
    for (m, c) in d {
        coeffs[m.degree()] = c.clone();
    }
    match zpoly_roots(&coeffs) {
        Some(roots) => {
            if roots.iter().any(|y| y.is_nonneg()) {
                MVerdict::True
            } else {
                MVerdict::False
            }
        }
        None => MVerdict::Unknown,
    }
}

/// All roots in Z[X] of a univariate polynomial with Z[X] coefficients,
/// or `None` when the search space exceeds the implementation bounds.
///
/// Every root's degree obeys deg(c_k) + k*d <= max_i (deg(c_i) + i*d),
/// so d is bounded by the coefficient degrees; the root's value at any
/// sample point is an integer root of the evaluated polynomial, and
/// d+1 samples determine the root by interpolation.
fn zpoly_roots(coeffs: &[ZPoly]) -> Option<Vec<ZPoly>> {
    let k = match coeffs.iter().rposition(|c| !c.is_zero()) {
        None => return Some(vec![ZPoly::zero()]), // identically zero
        Some(0) => return Some(Vec::new()),       // nonzero constant
        Some(k) => k,
    };
    let deg_k = coeffs[k].degree() as i64;
    let mut d_max: i64 = 0;
    for (i, c) in coeffs.iter().enumerate().take(k) {
        if c.is_zero() {
            continue;
        }
        let num = c.degree() as i64 - deg_k;
        let den = (k - i) as i64;
        let bound = if num <= 0 { 0 } else { (num + den - 1) / den };
        d_max = d_max.max(bound);
    }
    let points_needed = (d_max as usize) + 1;

    // Sample points where the evaluated polynomial is not identically zero.
    let mut samples: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    let mut n = BigInt::zero();
    let mut tries = 0;
    while samples.len() < points_needed {
        tries += 1;
        if tries > 10_000 {
            return None;
        }
        let evals: Vec<BigInt> = coeffs.iter().map(|c| c.eval(&n)).collect();
        if evals.iter().any(|e| !e.is_zero()) {
            samples.push((n.clone(), evals));
        }
        n += 1;
    }

    // Integer roots per sample point; an empty set anywhere refutes.
    let mut root_sets: Vec<Vec<BigInt>> = Vec::new();
    for (_, evals) in &samples {
        let roots = integer_roots(evals)?;
        if roots.is_empty() {
            return Some(Vec::new());
        }
        root_sets.push(roots);
    }

    // Interpolate every combination and keep true roots.
    let mut out = Vec::new();
    let mut choice = vec![0usize; root_sets.len()];
    loop {
        let pts: Vec<(BigInt, BigInt)> = samples
            .iter()
            .enumerate()
            .map(|(i, (x, _))| (x.clone(), root_sets[i][choice[i]].clone()))
            .collect();
        if let Some(candidate) = interpolate_integer(&pts) {
            if is_root(coeffs, &candidate) && !out.contains(&candidate) {
                out.push(candidate);
            }
        }
        // Advance the choice vector.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Some(out);
            }
            choice[i] += 1;
            if choice[i] < root_sets[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn is_root(coeffs: &[ZPoly], y: &ZPoly) -> bool {
    let mut acc = ZPoly::zero();
    let mut power = ZPoly::constant(BigInt::one());
    for c in coeffs {
        acc = acc.add(&c.mul(&power));
        power = power.mul(y);
    }
    acc.is_zero()
}

/// Integer roots of an integer polynomial given by its coefficients
/// (index = degree), or None if the divisor enumeration would be too
/// large.
fn integer_roots(coeffs: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut cs: Vec<BigInt> = coeffs.to_vec();
    while cs.last().map(|c| c.is_zero()).unwrap_or(false) {
        cs.pop();
    }
    if cs.is_empty() {
        // Identically zero: every integer is a root; the callers only
        // reach this through nonzero samples.
        return None;
    }
    let mut roots = Vec::new();
    // Factor out t^v.
    let v = cs.iter().position(|c| !c.is_zero()).unwrap();
    if v > 0 {
        roots.push(BigInt::zero());
        cs.drain(..v);
    }
    if cs.len() == 1 {
        return Some(roots);
    }
    let constant = cs[0].magnitude().clone();
    const DIVISOR_CAP: u64 = 10_000_000;
    if constant > BigUint::from(DIVISOR_CAP) * BigUint::from(DIVISOR_CAP) {
        return None;
    }
    let eval = |t: &BigInt| -> BigInt {
        let mut acc = BigInt::zero();
        for c in cs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    };
    let mut d = BigUint::one();
    loop {
        let dd = &d * &d;
        if dd > constant {
            break;
        }
        if constant.is_multiple_of(&d) {
            for cand in [&d, &(&constant / &d)] {
                for sign in [1i32, -1] {
                    let t = if sign > 0 {
                        BigInt::from(cand.clone())
                    } else {
                        -BigInt::from(cand.clone())
                    };
                    if eval(&t).is_zero() && !roots.contains(&t) {
                        roots.push(t);
                    }
                }
            }
        }
        d += BigUint::one();
        if d > BigUint::from(DIVISOR_CAP) {
            return None;
        }
    }
    Some(roots)
}

/// Lagrange interpolation through integer points, kept only when the
/// result has integer coefficients.
fn interpolate_integer(pts: &[(BigInt, BigInt)]) -> Option<ZPoly> {
    let n = pts.len();
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); n];
    for (i, (xi, yi)) in pts.iter().enumerate() {
        // Basis polynomial prod_{j != i} (t - x_j) / (x_i - x_j).
        let mut basis: Vec<BigRational> = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = poly_mul_linear(&basis, &BigRational::from(xj.clone()));
            denom *= BigRational::from(xi - xj);
        }
        let scale = BigRational::from(yi.clone()) / denom;
        for (k, b) in basis.iter().enumerate() {
            acc[k] += b * &scale;
        }
    }
    let mut coeffs = Vec::with_capacity(n);
    for c in acc {
        if !c.denom().is_one() && !c.denom().abs().is_one() {
            return None;
        }
        coeffs.push(c.to_integer());
    }
    Some(ZPoly::from_coeffs(coeffs))
}

/// Multiplies by (t - root).
fn poly_mul_linear(p: &[BigRational], root: &BigRational) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * root;
    }
    out
}

/// Two or more unknowns: search a candidate grid for all but the last
/// unknown and solve the last exactly. A found witness proves truth; an
/// exhausted grid proves nothing.
fn multi_unknown(d: &BoundPoly, vars: &[usize], values: &[PolyElem]) -> MVerdict {
    let mut candidates: Vec<ZPoly> = vec![
        ZPoly::zero(),
        ZPoly::constant(BigInt::one()),
        ZPoly::constant(BigInt::from(2)),
    ];
    for v in values {
        if !candidates.contains(v.as_zpoly()) {
            candidates.push(v.as_zpoly().clone());
        }
    }
    let free = &vars[..vars.len() - 1];
    let last = vars[vars.len() - 1];
    let mut grid = vec![0usize; free.len()];
    loop {
        // Substitute the grid values for all but the last unknown.
        let mut reduced: BoundPoly = BTreeMap::new();
        for (m, c) in d {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &v in m.vars() {
                if v == last {
                    rest.push(v);
                } else {
                    let idx = free.iter().position(|&w| w == v).unwrap();
                    coeff = coeff.mul(&candidates[grid[idx]]);
                }
            }
            let key = Monomial::from_vars(rest);
            let entry = reduced.entry(key).or_insert_with(ZPoly::zero);
            *entry = entry.add(&coeff);
        }
        reduced.retain(|_, c| !c.is_zero());
        // All grid members are in the nonnegative part, so a root for the
        // last unknown completes a witness.
        if decide(&reduced, values) == MVerdict::True {
            return MVerdict::True;
        }
        let mut i = 0;
        loop {
            if i == grid.len() {
                return MVerdict::Unknown;
            }
            grid[i] += 1;
            if grid[i] < candidates.len() {
                break;
            }
            grid[i] = 0;
            i += 1;
        }
    }
}
