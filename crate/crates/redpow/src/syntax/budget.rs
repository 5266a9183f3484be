//! The formula-size budget g(n, m), computed by descending recurrence from
//! g(n, n) = h(n, 0) via g(n, m-1) = 2 + h(g(n, m), m) * (g(n, m) + 3).
//!
//! The budget explodes quickly; when an intermediate h evaluation exceeds
//! the enumeration limit the computation either returns the caller's cap
//! (flagged) or fails loudly.

use super::enumerate::{count_h, EnumConfig, EnumError};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// One step of the descending recurrence, kept for auditability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BudgetStep {
    /// The m whose g-value this step produced.
    pub m: usize,
    pub g: String,
    /// h(g(n, m+1), m+1) used to produce it; absent for the base step.
    pub h_used: Option<u64>,
}

/// The computed budget value for a pair (n, m).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormulaBudget {
    pub n: usize,
    pub m: usize,
    /// g(n, m) when computable, otherwise the configured cap.
    #[serde(with = "biguint_decimal")]
    pub value: BigUint,
    /// True when an intermediate h evaluation exceeded the enumeration
    /// limit and `value` is the cap rather than the recurrence value.
    pub capped: bool,
    pub steps: Vec<BudgetStep>,
}

mod biguint_decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BudgetError {
    #[error("invalid arguments: m = {m} exceeds n = {n}")]
    InvalidArguments { n: usize, m: usize },
    #[error("budget for (n = {n}, m = {m}) is not computable within the enumeration limit and no cap was given")]
    Uncomputable { n: usize, m: usize },
}

/// Computes g(n, m) for 0 <= m <= n. With `cap` given, an uncomputable
/// intermediate h turns the result into the cap, flagged as capped.
pub fn compute_g(
    n: usize,
    m: usize,
    cap: Option<u64>,
    cfg: &EnumConfig,
) -> Result<FormulaBudget, BudgetError> {
    if m > n {
        return Err(BudgetError::InvalidArguments { n, m });
    }
    let mut steps = Vec::new();

    let base = match count_h(n, 0, cfg) {
        Ok(h) => BigUint::from(h),
        Err(EnumError::BudgetExceeded { .. }) => {
            return capped_result(n, m, cap, steps);
        }
    };
    steps.push(BudgetStep {
        m: n,
        g: base.to_string(),
        h_used: None,
    });
    let mut g = base;

    let mut mm = n;
    while mm > m {
        // g(n, mm-1) = 2 + h(g(n, mm), mm) * (g(n, mm) + 3)
        let len = match usize::try_from(&g) {
            Ok(v) => v,
            Err(_) => return capped_result(n, m, cap, steps),
        };
        let h = match count_h(len, mm, cfg) {
            Ok(h) => h,
            Err(EnumError::BudgetExceeded { .. }) => {
                return capped_result(n, m, cap, steps);
            }
        };
        g = BigUint::from(2u32) + BigUint::from(h) * (&g + BigUint::from(3u32));
        mm -= 1;
        steps.push(BudgetStep {
            m: mm,
            g: g.to_string(),
            h_used: Some(h),
        });
    }

    Ok(FormulaBudget {
        n,
        m,
        value: g,
        capped: false,
        steps,
    })
}

fn capped_result(
    n: usize,
    m: usize,
    cap: Option<u64>,
    steps: Vec<BudgetStep>,
) -> Result<FormulaBudget, BudgetError> {
    match cap {
        Some(c) => Ok(FormulaBudget {
            n,
            m,
            value: BigUint::from(c),
            capped: true,
            steps,
        }),
        None => Err(BudgetError::Uncomputable { n, m }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EnumConfig {
        EnumConfig::default()
    }

    #[test]
    fn base_case_is_h_n_zero() {
        let b = compute_g(3, 3, None, &cfg()).unwrap();
        assert_eq!(b.value, BigUint::from(2u32));
        assert!(!b.capped);
    }

    #[test]
    fn chain_down_from_three() {
        // Every step multiplies by h(2, m) = 0, so the whole chain is 2.
        for m in 0..=3 {
            let b = compute_g(3, m, None, &cfg()).unwrap();
            assert_eq!(b.value, BigUint::from(2u32), "g(3,{m})");
            assert!(!b.capped);
        }
    }

    #[test]
    fn recurrence_audit_exact() {
        // Recompute each step from count_h and compare.
        for n in 0..=4 {
            let b = compute_g(n, 0, None, &cfg()).unwrap();
            let mut prev: Option<BigUint> = None;
            for (i, step) in b.steps.iter().enumerate() {
                let g: BigUint = step.g.parse().unwrap();
                if i == 0 {
                    assert_eq!(g, BigUint::from(count_h(n, 0, &cfg()).unwrap()));
                } else {
                    let p = prev.clone().unwrap();
                    let len = usize::try_from(&p).unwrap();
                    let h = count_h(len, step.m + 1, &cfg()).unwrap();
                    let expect =
                        BigUint::from(2u32) + BigUint::from(h) * (&p + BigUint::from(3u32));
                    assert_eq!(g, expect, "step m={} of g({n},0)", step.m);
                }
                prev = Some(g);
            }
        }
    }

    #[test]
    fn invalid_when_m_exceeds_n() {
        assert!(matches!(
            compute_g(2, 3, None, &cfg()),
            Err(BudgetError::InvalidArguments { .. })
        ));
    }

    #[test]
    fn capped_path_flags() {
        let b = compute_g(5, 0, Some(12), &cfg()).unwrap();
        assert!(b.capped);
        assert_eq!(b.value, BigUint::from(12u32));
        // Without a cap the same computation is a loud error.
        assert!(matches!(
            compute_g(5, 0, None, &cfg()),
            Err(BudgetError::Uncomputable { .. })
        ));
    }

    #[test]
    fn five_four_is_exact() {
        let b = compute_g(5, 4, None, &cfg()).unwrap();
        // g(5,5) = h(5,0) = 3; g(5,4) = 2 + h(3,5) * 6.
        let h35 = count_h(3, 5, &cfg()).unwrap();
        assert_eq!(
            b.value,
            BigUint::from(2u32) + BigUint::from(h35) * BigUint::from(6u32)
        );
        assert!(!b.capped);
    }
}
