//! The two concrete structures: the standard naturals and the
//! integer-polynomial semiring (nonnegative part of Z[X]). Elements of
//! both are represented as `PolyElem`; the naturals are the degree-0
//! elements.

use super::poly::{poly_add, poly_le, poly_mul, PolyElem};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    StandardNat,
    PolySemiring,
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nat" | "standard-nat" => Ok(ModelKind::StandardNat),
            "poly" | "poly-semiring" => Ok(ModelKind::PolySemiring),
            other => Err(format!("unknown model {other:?} (use nat or poly)")),
        }
    }
}

/// A structure for the arithmetic language: a universe of `PolyElem`
/// values with +, *, <=, 0, 1 and a seeded sampler.
#[derive(Debug, Clone)]
pub struct Model {
    pub kind: ModelKind,
    /// Maximum degree of sampled polynomial elements.
    pub sample_degree: usize,
    /// Coefficients are sampled from [-sample_coeff, sample_coeff].
    pub sample_coeff: i64,
    /// Naturals are sampled from [0, sample_nat].
    pub sample_nat: u64,
}

impl Model {
    pub fn new(kind: ModelKind) -> Model {
        Model {
            kind,
            sample_degree: 4,
            sample_coeff: 20,
            sample_nat: 1000,
        }
    }

    pub fn zero(&self) -> PolyElem {
        PolyElem::zero()
    }

    pub fn one(&self) -> PolyElem {
        PolyElem::one()
    }

    pub fn add(&self, a: &PolyElem, b: &PolyElem) -> PolyElem {
        poly_add(a, b)
    }

    pub fn mul(&self, a: &PolyElem, b: &PolyElem) -> PolyElem {
        poly_mul(a, b)
    }

    pub fn le(&self, a: &PolyElem, b: &PolyElem) -> bool {
        poly_le(a, b)
    }

    pub fn lt(&self, a: &PolyElem, b: &PolyElem) -> bool {
        a != b && poly_le(a, b)
    }

    pub fn sampler(&self, seed: u64) -> Sampler {
        Sampler {
            model: self.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Membership in the universe. Every `PolyElem` is in the polynomial
    /// model; the naturals are the degree-0 elements.
    pub fn contains(&self, e: &PolyElem) -> bool {
        match self.kind {
            ModelKind::StandardNat => e.is_standard(),
            ModelKind::PolySemiring => true,
        }
    }

    /// A deterministic enumeration prefix of the universe: elements in
    /// shells by max(degree, coefficient magnitude), within a shell by
    /// degree then lexicographic coefficients.
    pub fn enumerate(&self, count: usize) -> Vec<PolyElem> {
        let mut out = Vec::with_capacity(count);
        match self.kind {
            ModelKind::StandardNat => {
                for i in 0..count {
                    out.push(PolyElem::nat(i as u64));
                }
            }
            ModelKind::PolySemiring => {
                let mut seen = std::collections::HashSet::new();
                let mut shell: i64 = 0;
                'outer: loop {
                    for deg in 0..=(shell as usize) {
                        let mut coeffs = vec![-shell; deg + 1];
                        'vectors: loop {
                            if let Ok(e) = PolyElem::from_coeffs(
                                coeffs.iter().map(|&c| BigInt::from(c)).collect(),
                            ) {
                                if seen.insert(e.clone()) {
                                    out.push(e);
                                    if out.len() == count {
                                        break 'outer;
                                    }
                                }
                            }
                            // Next vector in lexicographic order (last
                            // coefficient least significant).
                            let mut i = coeffs.len();
                            loop {
                                if i == 0 {
                                    break 'vectors;
                                }
                                i -= 1;
                                coeffs[i] += 1;
                                if coeffs[i] <= shell {
                                    break;
                                }
                                coeffs[i] = -shell;
                            }
                        }
                    }
                    shell += 1;
                }
            }
        }
        out
    }
}

/// Deterministic seeded sampler over a model's universe.
pub struct Sampler {
    model: Model,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn sample(&mut self) -> PolyElem {
        match self.model.kind {
            ModelKind::StandardNat => {
                let v = self.rng.gen_range(0..=self.model.sample_nat);
                PolyElem::nat(v)
            }
            ModelKind::PolySemiring => loop {
                let deg = self.rng.gen_range(0..=self.model.sample_degree);
                let coeffs: Vec<BigInt> = (0..=deg)
                    .map(|_| {
                        BigInt::from(
                            self.rng
                                .gen_range(-self.model.sample_coeff..=self.model.sample_coeff),
                        )
                    })
                    .collect();
                if let Ok(e) = PolyElem::from_coeffs(coeffs) {
                    return e;
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nat_enumeration_is_initial_segment() {
        let m = Model::new(ModelKind::StandardNat);
        let es = m.enumerate(4);
        assert_eq!(
            es,
            vec![
                PolyElem::nat(0),
                PolyElem::nat(1),
                PolyElem::nat(2),
                PolyElem::nat(3)
            ]
        );
    }

    #[test]
    fn poly_enumeration_is_distinct_and_deterministic() {
        let m = Model::new(ModelKind::PolySemiring);
        let es = m.enumerate(30);
        assert_eq!(es.len(), 30);
        for (i, a) in es.iter().enumerate() {
            for b in &es[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert_eq!(es, m.enumerate(30));
        // 0 and 1 come first, and X appears early.
        assert_eq!(es[0], PolyElem::zero());
        assert_eq!(es[1], PolyElem::one());
        assert!(es.contains(&PolyElem::var()));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let m = Model::new(ModelKind::PolySemiring);
        let a: Vec<PolyElem> = {
            let mut s = m.sampler(7);
            (0..20).map(|_| s.sample()).collect()
        };
        let b: Vec<PolyElem> = {
            let mut s = m.sampler(7);
            (0..20).map(|_| s.sample()).collect()
        };
        assert_eq!(a, b);
        for e in &a {
            assert!(m.contains(e));
        }
    }
}
