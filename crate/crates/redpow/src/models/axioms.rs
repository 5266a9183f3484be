//! Sampled checker for the fifteen axioms of the theory of nonnegative
//! parts of discretely ordered rings. Universally quantified axioms are
//! tested on seeded random instantiations; the one existential (axiom 13)
//! is checked constructively through the subtraction witness.

use super::model::Model;
use super::poly::{poly_minus, PolyElem};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomResult {
    pub index: usize,
    pub name: String,
    pub tested: u64,
    pub passed: u64,
    /// Instances where a conditional axiom's premise did not apply.
    pub vacuous: u64,
    /// Up to three counterexample descriptions.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomReport {
    pub model: String,
    pub samples: u64,
    pub seed: u64,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed == r.tested)
    }
}

/// An axiom instance check over a sampled triple: (pass, vacuous).
type AxiomCheck = dyn Fn(&Model, &PolyElem, &PolyElem, &PolyElem) -> (bool, bool);

struct Check {
    name: &'static str,
    run: Box<AxiomCheck>,
}

fn checks() -> Vec<Check> {
    let eq = |a: &PolyElem, b: &PolyElem| a == b;
    vec![
        Check {
            name: "(x+y)+z = x+(y+z)",
            run: Box::new(move |m, x, y, z| {
                (eq(&m.add(&m.add(x, y), z), &m.add(x, &m.add(y, z))), false)
            }),
        },
        Check {
            name: "x+y = y+x",
            run: Box::new(move |m, x, y, _| (eq(&m.add(x, y), &m.add(y, x)), false)),
        },
        Check {
            name: "(x*y)*z = x*(y*z)",
            run: Box::new(move |m, x, y, z| {
                (eq(&m.mul(&m.mul(x, y), z), &m.mul(x, &m.mul(y, z))), false)
            }),
        },
        Check {
            name: "x*y = y*x",
            run: Box::new(move |m, x, y, _| (eq(&m.mul(x, y), &m.mul(y, x)), false)),
        },
        Check {
            name: "x*(y+z) = x*y + x*z",
            run: Box::new(move |m, x, y, z| {
                (
                    eq(&m.mul(x, &m.add(y, z)), &m.add(&m.mul(x, y), &m.mul(x, z))),
                    false,
                )
            }),
        },
        Check {
            name: "x+0 = x and x*0 = 0",
            run: Box::new(move |m, x, _, _| {
                (
                    eq(&m.add(x, &m.zero()), x) && eq(&m.mul(x, &m.zero()), &m.zero()),
                    false,
                )
            }),
        },
        Check {
            name: "x*1 = x",
            run: Box::new(move |m, x, _, _| (eq(&m.mul(x, &m.one()), x), false)),
        },
        Check {
            name: "x<y and y<z imply x<z",
            run: Box::new(move |m, x, y, z| {
                if m.lt(x, y) && m.lt(y, z) {
                    (m.lt(x, z), false)
                } else {
                    (true, true)
                }
            }),
        },
        Check {
            name: "x <= x",
            run: Box::new(move |m, x, _, _| (m.le(x, x), false)),
        },
        Check {
            name: "exactly one of x<y, x=y, y<x",
            run: Box::new(move |m, x, y, _| {
                let lt = m.lt(x, y);
                let eq_ = x == y;
                let gt = m.lt(y, x);
                ((lt as u8 + eq_ as u8 + gt as u8) == 1, false)
            }),
        },
        Check {
            name: "x<y implies x+z < y+z",
            run: Box::new(move |m, x, y, z| {
                if m.lt(x, y) {
                    (m.lt(&m.add(x, z), &m.add(y, z)), false)
                } else {
                    (true, true)
                }
            }),
        },
        Check {
            name: "0<z and x<y imply x*z < y*z",
            run: Box::new(move |m, x, y, z| {
                if m.lt(&m.zero(), z) && m.lt(x, y) {
                    (m.lt(&m.mul(x, z), &m.mul(y, z)), false)
                } else {
                    (true, true)
                }
            }),
        },
        Check {
            name: "x<y implies some z has x+z = y",
            run: Box::new(move |m, x, y, _| {
                if m.lt(x, y) {
                    match poly_minus(x, y) {
                        Some(z) => (m.add(x, &z) == *y && m.contains(&z), false),
                        None => (false, false),
                    }
                } else {
                    (true, true)
                }
            }),
        },
        Check {
            name: "0<1 and x>0 implies x>=1",
            run: Box::new(move |m, x, _, _| {
                let base = m.lt(&m.zero(), &m.one());
                let discrete = if m.lt(&m.zero(), x) {
                    m.le(&m.one(), x)
                } else {
                    true
                };
                (base && discrete, false)
            }),
        },
        Check {
            name: "x >= 0",
            run: Box::new(move |m, x, _, _| (m.le(&m.zero(), x), false)),
        },
    ]
}

/// Runs the full 15-axiom suite on `samples` seeded instantiations per
/// axiom. Failures are reported, never thrown.
pub fn check_axioms(model: &Model, samples: u64, seed: u64) -> AxiomReport {
    let checks = checks();
    let mut results: Vec<AxiomResult> = checks
        .iter()
        .enumerate()
        .map(|(i, c)| AxiomResult {
            index: i + 1,
            name: c.name.to_string(),
            tested: 0,
            passed: 0,
            vacuous: 0,
            failures: Vec::new(),
        })
        .collect();

    let mut sampler = model.sampler(seed);
    for _ in 0..samples {
        let x = sampler.sample();
        let y = sampler.sample();
        let z = sampler.sample();
        for (i, c) in checks.iter().enumerate() {
            let (ok, vacuous) = (c.run)(model, &x, &y, &z);
            results[i].tested += 1;
            if ok {
                results[i].passed += 1;
            } else if results[i].failures.len() < 3 {
                results[i].failures.push(format!("x={x}, y={y}, z={z}"));
            }
            if vacuous {
                results[i].vacuous += 1;
            }
        }
    }

    AxiomReport {
        model: format!("{:?}", model.kind),
        samples,
        seed,
        results,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::model::ModelKind;
    use crate::models::poly::parse_poly;

    #[test]
    fn naturals_satisfy_all_axioms() {
        let m = Model::new(ModelKind::StandardNat);
        let report = check_axioms(&m, 300, 7);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn polynomials_satisfy_all_axioms() {
        let m = Model::new(ModelKind::PolySemiring);
        let report = check_axioms(&m, 300, 7);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn trichotomy_on_specific_pair() {
        let m = Model::new(ModelKind::PolySemiring);
        let x = parse_poly("X").unwrap();
        let three = parse_poly("3").unwrap();
        assert!(m.lt(&three, &x));
        assert!(!m.lt(&x, &three));
        assert_ne!(x, three);
    }

    #[test]
    fn no_element_strictly_between_zero_and_one() {
        let m = Model::new(ModelKind::PolySemiring);
        let mut s = m.sampler(99);
        for _ in 0..500 {
            let e = s.sample();
            assert!(!(m.lt(&m.zero(), &e) && m.lt(&e, &m.one())), "{e}");
        }
    }
}
