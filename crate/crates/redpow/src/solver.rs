//! Solvers for finite systems of polynomial equations over the naturals:
//! a bounded lexicographic box search and an evaluation-based solver that
//! turns polynomial identities into numeric solutions.

use crate::models::{eval_at, nonneg_threshold, PolyElem};
use crate::syntax::{DioFormula, PolyForm};
use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A finite conjunction of quantifier-free equations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DioSystem {
    pub equations: Vec<DioFormula>,
    /// Sorted free variable indices occurring in the system.
    pub var_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("equation {index} is quantified; systems are quantifier-free")]
    Quantified { index: usize },
}

impl DioSystem {
    pub fn new(equations: Vec<DioFormula>) -> Result<DioSystem, SystemError> {
        let mut vars = std::collections::BTreeSet::new();
        for (index, eq) in equations.iter().enumerate() {
            if eq.bound_count != 0 {
                return Err(SystemError::Quantified { index });
            }
            vars.extend(eq.free_vars.iter().copied());
        }
        Ok(DioSystem {
            equations,
            var_map: vars.into_iter().collect(),
        })
    }
}

/// A finite assignment of naturals to variable indices.
pub type Assignment = BTreeMap<usize, BigUint>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("search exceeded the node limit {limit}")]
    Timeout { limit: u64 },
    #[error("equation {formula:?} does not hold identically under the provenance")]
    NotIdentical { formula: String },
    #[error("provenance missing for variable x{var}")]
    MissingProvenance { var: usize },
}

/// True exactly when every equation of the system holds under the
/// assignment; variables without a value never satisfy.
pub fn verify(system: &DioSystem, assignment: &Assignment) -> bool {
    if !system.var_map.iter().all(|v| assignment.contains_key(v)) {
        return false;
    }
    system.equations.iter().all(|eq| {
        let (lp, rp) = eq.polys();
        let assign = |v: usize| assignment.get(&v).cloned().unwrap();
        lp.eval_nat(&assign) == rp.eval_nat(&assign)
    })
}

/// Bounded box search: the lexicographically least solution with every
/// variable at most `bound`, or `None` when the box holds none. A `None`
/// is a statement about the box only, never about solvability at large.
pub fn solve_brute(
    system: &DioSystem,
    bound: u64,
    node_limit: u64,
) -> Result<Option<Assignment>, SolveError> {
    let vars = system.var_map.clone();
    // Equation index -> variables it mentions, to prune as soon as an
    // equation becomes fully assigned.
    let polys: Vec<(PolyForm, PolyForm)> = system.equations.iter().map(|eq| eq.polys()).collect();
    let ready_at: Vec<usize> = system
        .equations
        .iter()
        .map(|eq| {
            eq.free_vars
                .iter()
                .map(|v| vars.iter().position(|w| w == v).unwrap())
                .max()
                .map(|p| p + 1)
                .unwrap_or(0)
        })
        .collect();

    let mut nodes: u64 = 0;
    let mut values: Vec<BigUint> = Vec::with_capacity(vars.len());
    if search(
        &vars,
        &polys,
        &ready_at,
        bound,
        node_limit,
        &mut nodes,
        &mut values,
    )? {
        let assignment: Assignment = vars.iter().copied().zip(values).collect();
        Ok(Some(assignment))
    } else {
        Ok(None)
    }
}

fn search(
    vars: &[usize],
    polys: &[(PolyForm, PolyForm)],
    ready_at: &[usize],
    bound: u64,
    node_limit: u64,
    nodes: &mut u64,
    values: &mut Vec<BigUint>,
) -> Result<bool, SolveError> {
    let depth = values.len();
    // Check every equation whose variables are now all assigned.
    for (i, (lp, rp)) in polys.iter().enumerate() {
        if ready_at[i] == depth {
            let assign = |v: usize| {
                let pos = vars.iter().position(|w| *w == v).unwrap();
                values[pos].clone()
            };
            if lp.eval_nat(&assign) != rp.eval_nat(&assign) {
                return Ok(false);
            }
        }
    }
    if depth == vars.len() {
        return Ok(true);
    }
    for k in 0..=bound {
        *nodes += 1;
        if *nodes > node_limit {
            return Err(SolveError::Timeout { limit: node_limit });
        }
        values.push(BigUint::from(k));
        if search(vars, polys, ready_at, bound, node_limit, nodes, values)? {
            return Ok(true);
        }
        values.pop();
    }
    Ok(false)
}

/// Evaluation-based solving: the provenance maps each variable to a model
/// element; when every equation holds identically in the polynomial ring,
/// evaluating the provenance at N yields a genuine solution over the
/// naturals. Fails loudly (naming the equation) when an identity check
/// fails, and panics only on negative evaluation, which the caller rules
/// out by choosing N at or above the nonnegativity threshold.
pub fn solve_by_evaluation(
    system: &DioSystem,
    provenance: &BTreeMap<usize, PolyElem>,
    eval_point: &BigUint,
) -> Result<Assignment, SolveError> {
    for v in &system.var_map {
        if !provenance.contains_key(v) {
            return Err(SolveError::MissingProvenance { var: *v });
        }
    }
    // Identity check in the polynomial ring.
    for eq in &system.equations {
        let (lp, rp) = eq.polys();
        let l = eval_poly_form(&lp, provenance);
        let r = eval_poly_form(&rp, provenance);
        if l != r {
            return Err(SolveError::NotIdentical {
                formula: eq.to_string(),
            });
        }
    }
    let mut out = Assignment::new();
    for (v, p) in provenance {
        let value = eval_at(p, eval_point);
        let value = value
            .to_biguint()
            .unwrap_or_else(|| panic!("evaluation of {p} at {eval_point} is negative"));
        out.insert(*v, value);
    }
    Ok(out)
}

/// Substitutes model elements for the variables of a polynomial form.
pub fn eval_poly_form(form: &PolyForm, provenance: &BTreeMap<usize, PolyElem>) -> PolyElem {
    let mut acc = PolyElem::zero();
    for (mono, coeff) in form.entries() {
        let mut prod = coeff_elem(coeff);
        for v in mono.vars() {
            prod = crate::models::poly_mul(&prod, &provenance[v]);
        }
        acc = crate::models::poly_add(&acc, &prod);
    }
    acc
}

fn coeff_elem(c: &BigUint) -> PolyElem {
    if c.is_zero() {
        PolyElem::zero()
    } else {
        PolyElem::from_coeffs(vec![num_bigint::BigInt::from(c.clone())]).unwrap()
    }
}

/// The solver interface: any procedure producing an assignment over the
/// naturals for a system, or reporting that it found none. Implementations
/// target other structures by composing with an evaluation map.
pub trait SystemSolver {
    fn solve(&self, system: &DioSystem) -> Result<Option<Assignment>, SolveError>;
}

pub struct BruteForceSolver {
    pub bound: u64,
    pub node_limit: u64,
}

impl SystemSolver for BruteForceSolver {
    fn solve(&self, system: &DioSystem) -> Result<Option<Assignment>, SolveError> {
        solve_brute(system, self.bound, self.node_limit)
    }
}

pub struct EvaluationSolver {
    pub provenance: BTreeMap<usize, PolyElem>,
    pub eval_point: BigUint,
}

impl SystemSolver for EvaluationSolver {
    fn solve(&self, system: &DioSystem) -> Result<Option<Assignment>, SolveError> {
        solve_by_evaluation(system, &self.provenance, &self.eval_point).map(Some)
    }
}

/// Checks that the evaluation point clears the nonnegativity threshold of
/// the provenance range.
pub fn eval_point_ok(provenance: &BTreeMap<usize, PolyElem>, eval_point: &BigUint) -> bool {
    *eval_point >= nonneg_threshold(provenance.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::parse_poly;
    use crate::syntax::parse_formula;

    fn system(eqs: &[&str]) -> DioSystem {
        DioSystem::new(eqs.iter().map(|s| parse_formula(s).unwrap()).collect()).unwrap()
    }

    fn nat(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn brute_finds_lexicographic_first() {
        let s = system(&["x0+x1=1+1+1", "x0*x1=1+1"]);
        let sol = solve_brute(&s, 5, 10_000).unwrap().unwrap();
        assert_eq!(sol[&0], nat(1));
        assert_eq!(sol[&1], nat(2));
    }

    #[test]
    fn brute_tautology_smallest_point() {
        let s = system(&["x0=x0"]);
        let sol = solve_brute(&s, 0, 10_000).unwrap().unwrap();
        assert_eq!(sol[&0], nat(0));
    }

    #[test]
    fn brute_reports_empty_box() {
        let s = system(&["x0+1=0"]);
        assert_eq!(solve_brute(&s, 50, 1_000_000).unwrap(), None);
    }

    #[test]
    fn brute_node_limit_is_loud() {
        let s = system(&["x0*x0=1+1"]);
        assert!(matches!(
            solve_brute(&s, 1000, 10),
            Err(SolveError::Timeout { .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let s = system(&["x0+x1=1+1+1"]);
        let mut a = Assignment::new();
        a.insert(0, nat(1));
        a.insert(1, nat(2));
        assert!(verify(&s, &a));
        a.insert(0, nat(2));
        assert!(!verify(&s, &a));
        let empty = DioSystem::new(vec![]).unwrap();
        assert!(verify(&empty, &Assignment::new()));
    }

    #[test]
    fn evaluation_solver_follows_provenance() {
        let s = system(&["x0+x1=x2"]);
        let prov: BTreeMap<usize, PolyElem> = [
            (0, parse_poly("X").unwrap()),
            (1, parse_poly("1").unwrap()),
            (2, parse_poly("X+1").unwrap()),
        ]
        .into_iter()
        .collect();
        let sol = solve_by_evaluation(&s, &prov, &nat(10)).unwrap();
        assert_eq!(sol[&0], nat(10));
        assert_eq!(sol[&1], nat(1));
        assert_eq!(sol[&2], nat(11));
        assert!(verify(&s, &sol));

        let sol0 = solve_by_evaluation(&s, &prov, &nat(0)).unwrap();
        assert_eq!(sol0[&0], nat(0));
        assert_eq!(sol0[&2], nat(1));
    }

    #[test]
    fn evaluation_solver_on_nonmonotone_element() {
        let s = system(&["x0=x0"]);
        let prov: BTreeMap<usize, PolyElem> =
            [(0, parse_poly("X^2-X").unwrap())].into_iter().collect();
        let sol = solve_by_evaluation(&s, &prov, &nat(3)).unwrap();
        assert_eq!(sol[&0], nat(6));
    }

    #[test]
    fn evaluation_solver_rejects_non_identities() {
        let s = system(&["x0+x0=x1"]);
        let prov: BTreeMap<usize, PolyElem> = [
            (0, parse_poly("X").unwrap()),
            (1, parse_poly("X+1").unwrap()),
        ]
        .into_iter()
        .collect();
        let err = solve_by_evaluation(&s, &prov, &nat(10)).unwrap_err();
        assert!(matches!(err, SolveError::NotIdentical { .. }));
    }

    #[test]
    fn determinism_of_brute_solver() {
        let s = system(&["x0+x1=1+1+1+1"]);
        let a = solve_brute(&s, 10, 100_000).unwrap();
        let b = solve_brute(&s, 10, 100_000).unwrap();
        assert_eq!(a, b);
    }
}
