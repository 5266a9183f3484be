//! The solution-table pipeline for countable embeddings.
//!
//! Given an enumeration of distinct polynomial-model elements, a stream of
//! equations true of them is produced in canonical order; row n of the
//! table is a genuine natural-number solution of the first n equations,
//! obtained by evaluating every element at a common point N_n at or above
//! the nonnegativity threshold. Columns then represent the elements inside
//! the reduced power, and the verifier extracts tail-agreement
//! certificates for every operation fact, order thresholds, injectivity
//! rows, and the divergence of nonstandard columns.

use crate::filter::{eq_mod_cofinite, le_mod_cofinite, EqCertificate, SeqPrefix};
use crate::models::{nonneg_threshold, poly_add, poly_le, poly_mul, PolyElem};
use crate::solver::{eval_poly_form, solve_by_evaluation, verify, DioSystem};
use crate::syntax::{enumerate_canonical, DioFormula, EnumConfig, EnumError};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A finite prefix of an enumeration of the model: pairwise distinct
/// elements, column i standing for the i-th element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementEnumeration {
    elems: Vec<PolyElem>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("elements must be pairwise distinct: {0} repeats")]
    DuplicateElement(String),
    #[error("element list is empty")]
    NoElements,
    #[error("equation budget {budget} cannot hold the required fact {fact} (it was cut off)")]
    BudgetTooSmall { budget: usize, fact: String },
    #[error("table depth {depth} exceeds the equation stream length {len}")]
    DepthExceedsStream { depth: usize, len: usize },
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error("row {row} failed verification against its equation system")]
    RowInvalid { row: usize },
}

impl ElementEnumeration {
    pub fn new(elems: Vec<PolyElem>) -> Result<ElementEnumeration, EmbedError> {
        if elems.is_empty() {
            return Err(EmbedError::NoElements);
        }
        for (i, e) in elems.iter().enumerate() {
            if elems[i + 1..].contains(e) {
                return Err(EmbedError::DuplicateElement(e.to_string()));
            }
        }
        Ok(ElementEnumeration { elems })
    }

    pub fn elems(&self) -> &[PolyElem] {
        &self.elems
    }

    pub fn width(&self) -> usize {
        self.elems.len()
    }
}

/// Equations over the element slots, true of the enumerated elements in
/// the polynomial model, in canonical (length, serialization) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrueEquationStream {
    pub equations: Vec<DioFormula>,
    pub width: usize,
}

/// An operation fact among enumerated elements: elems[i] op elems[j] =
/// elems[k].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpFact {
    pub op: OpKind,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    Add,
    Mul,
}

/// All addition and multiplication facts among the elements (i <= j).
pub fn operation_facts(elems: &ElementEnumeration) -> Vec<OpFact> {
    let es = elems.elems();
    let mut out = Vec::new();
    for i in 0..es.len() {
        for j in i..es.len() {
            let sum = poly_add(&es[i], &es[j]);
            if let Some(k) = es.iter().position(|e| *e == sum) {
                out.push(OpFact {
                    op: OpKind::Add,
                    i,
                    j,
                    k,
                });
            }
            let prod = poly_mul(&es[i], &es[j]);
            if let Some(k) = es.iter().position(|e| *e == prod) {
                out.push(OpFact {
                    op: OpKind::Mul,
                    i,
                    j,
                    k,
                });
            }
        }
    }
    out
}

/// The canonical formula expressing an operation fact over the slots.
pub fn fact_formula(fact: &OpFact) -> DioFormula {
    use crate::syntax::Term;
    let lhs = match fact.op {
        OpKind::Add => Term::plus(Term::Var(fact.i), Term::Var(fact.j)),
        OpKind::Mul => Term::times(Term::Var(fact.i), Term::Var(fact.j)),
    };
    DioFormula::equation(lhs, Term::Var(fact.k)).canonicalize()
}

/// True of the elements in the polynomial model?
fn holds_in_model(f: &DioFormula, elems: &[PolyElem]) -> bool {
    debug_assert_eq!(f.bound_count, 0);
    let (lp, rp) = f.polys();
    let prov: BTreeMap<usize, PolyElem> = elems.iter().cloned().enumerate().collect();
    eval_poly_form(&lp, &prov) == eval_poly_form(&rp, &prov)
}

/// Enumerates quantifier-free canonical equations over the element slots
/// in canonical order, keeps those true of the elements, and truncates at
/// `budget` equations. Fails loudly when the truncation would lose an
/// operation fact among the elements.
pub fn generate_true_equations(
    elems: &ElementEnumeration,
    budget: usize,
    cfg: &EnumConfig,
) -> Result<TrueEquationStream, EmbedError> {
    let width = elems.width();
    let mut max_len = 5usize;
    let mut collected: Vec<DioFormula>;
    loop {
        collected = enumerate_canonical(max_len, width, cfg)?
            .into_iter()
            .filter(|c| c.formula.bound_count == 0)
            .filter(|c| holds_in_model(&c.formula, elems.elems()))
            .map(|c| c.formula)
            .collect();
        if collected.len() >= budget {
            collected.truncate(budget);
            break;
        }
        max_len += 2;
    }

    for fact in operation_facts(elems) {
        let f = fact_formula(&fact);
        if !collected.contains(&f) {
            return Err(EmbedError::BudgetTooSmall {
                budget,
                fact: f.to_string(),
            });
        }
    }

    Ok(TrueEquationStream {
        equations: collected,
        width,
    })
}

/// The solution table: row n (1-based) solves the conjunction of the
/// first n stream equations over the naturals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionTable {
    pub depth: usize,
    pub width: usize,
    /// Elements in the polynomial text format `[c0,c1,...]`.
    pub elements: Vec<String>,
    /// The equation stream, canonical serializations.
    pub equations: Vec<String>,
    /// rows[n-1][i] = v_i(n), as decimal strings.
    pub rows: Vec<Vec<String>>,
    /// Evaluation point N_n per row, decimal strings.
    pub eval_points: Vec<String>,
    /// Common nonnegativity threshold of the elements.
    pub threshold: String,
}

/// The evaluation point for row n: at least the nonnegativity threshold,
/// and growing quadratically so that nonstandard columns clear any fixed
/// bound within a desk-scale table.
pub fn row_eval_point(threshold: &BigUint, n: usize) -> BigUint {
    let sq = BigUint::from(n as u64) * BigUint::from(n as u64);
    threshold.clone().max(sq)
}

pub fn build_table(
    elems: &ElementEnumeration,
    stream: &TrueEquationStream,
    depth: usize,
) -> Result<SolutionTable, EmbedError> {
    if depth > stream.equations.len() {
        return Err(EmbedError::DepthExceedsStream {
            depth,
            len: stream.equations.len(),
        });
    }
    let threshold = nonneg_threshold(elems.elems());
    let provenance: BTreeMap<usize, PolyElem> = elems.elems().iter().cloned().enumerate().collect();

    let mut rows = Vec::with_capacity(depth);
    let mut eval_points = Vec::with_capacity(depth);
    for n in 1..=depth {
        let system = DioSystem::new(stream.equations[..n].to_vec())
            .expect("stream equations are quantifier-free");
        let point = row_eval_point(&threshold, n);
        let assignment = solve_by_evaluation(&system, &provenance, &point)
            .map_err(|_| EmbedError::RowInvalid { row: n })?;
        if !verify(&system, &assignment) {
            return Err(EmbedError::RowInvalid { row: n });
        }
        let row: Vec<String> = (0..elems.width())
            .map(|i| assignment[&i].to_string())
            .collect();
        rows.push(row);
        eval_points.push(point.to_string());
    }

    Ok(SolutionTable {
        depth,
        width: elems.width(),
        elements: elems
            .elems()
            .iter()
            .map(|e| {
                let coeffs: Vec<String> = e
                    .as_zpoly()
                    .coeffs()
                    .iter()
                    .map(|c| c.to_string())
                    .collect();
                format!("[{}]", coeffs.join(","))
            })
            .collect(),
        equations: stream.equations.iter().map(|e| e.to_string()).collect(),
        rows,
        eval_points,
        threshold: threshold.to_string(),
    })
}

impl SolutionTable {
    /// Column i as a sequence prefix over the rows.
    pub fn column(&self, i: usize) -> SeqPrefix {
        let values: Vec<BigUint> = self
            .rows
            .iter()
            .map(|row| row[i].parse().expect("table entries are decimal"))
            .collect();
        SeqPrefix::new(values).expect("tables have at least one row")
    }

    pub fn parse_elements(&self) -> Result<ElementEnumeration, crate::models::PolyError> {
        let elems = self
            .elements
            .iter()
            .map(|s| crate::models::parse_poly(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ElementEnumeration::new(elems).expect("table elements are distinct"))
    }

    /// The text rendering: columns headed by the elements, row n labeled
    /// by the n-th equation of the stream.
    pub fn render(&self) -> String {
        let elems = self.parse_elements().expect("table elements parse");
        let headers: Vec<String> = elems.elems().iter().map(|e| e.to_string()).collect();
        let label_width = self
            .equations
            .iter()
            .take(self.depth)
            .map(|e| e.len())
            .max()
            .unwrap_or(1)
            .max(4);
        let col_widths: Vec<usize> = (0..self.width)
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].len())
                    .chain([headers[i].len()])
                    .max()
                    .unwrap()
            })
            .collect();
        let mut out = String::new();
        out.push_str(&format!("{:label_width$} |", ""));
        for (h, w) in headers.iter().zip(&col_widths) {
            out.push_str(&format!(" {h:>w$}"));
        }
        out.push('\n');
        out.push_str(&format!("{:-<label_width$}-+", ""));
        for w in &col_widths {
            out.push_str(&format!("-{:-<w$}", ""));
        }
        out.push('\n');
        for (idx, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("{:label_width$} |", self.equations[idx]));
            for (v, w) in row.iter().zip(&col_widths) {
                out.push_str(&format!(" {v:>w$}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Verification results for a built table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedReport {
    /// Per operation fact: the tail certificate for column_i op column_j
    /// against column_k.
    pub facts: Vec<FactCheck>,
    /// Per ordered pair with elems[i] <= elems[j]: the row index from
    /// which column i <= column j pointwise.
    pub order: Vec<OrderCheck>,
    /// Per distinct pair: the row index from which the columns differ at
    /// every later row of the table.
    pub injectivity: Vec<InjectivityCheck>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactCheck {
    pub fact: OpFact,
    pub formula: String,
    /// Position of the fact's formula in the stream, when present.
    pub stream_index: Option<usize>,
    pub certificate: Option<EqCertificate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderCheck {
    pub i: usize,
    pub j: usize,
    pub from_row: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InjectivityCheck {
    pub i: usize,
    pub j: usize,
    pub distinct_from_row: Option<usize>,
}

impl EmbedReport {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_embedding(table: &SolutionTable) -> Result<EmbedReport, EmbedError> {
    let elems = table
        .parse_elements()
        .map_err(|e| EmbedError::DuplicateElement(e.to_string()))?;
    let es = elems.elems();
    let mut failures = Vec::new();

    let mut facts = Vec::new();
    for fact in operation_facts(&elems) {
        let ci = table.column(fact.i);
        let cj = table.column(fact.j);
        let ck = table.column(fact.k);
        let combined: Vec<BigUint> = ci
            .values()
            .iter()
            .zip(cj.values())
            .map(|(a, b)| match fact.op {
                OpKind::Add => a + b,
                OpKind::Mul => a * b,
            })
            .collect();
        let combined = SeqPrefix::new(combined).unwrap();
        let certificate = eq_mod_cofinite(&combined, &ck).expect("equal lengths");
        let formula = fact_formula(&fact);
        let stream_index = table
            .equations
            .iter()
            .position(|e| *e == formula.to_string());
        if certificate.is_none() {
            failures.push(format!(
                "fact {:?} x{}∘x{}=x{} holds in the model but not on the table tail",
                fact.op, fact.i, fact.j, fact.k
            ));
        }
        // Rows from the fact's stream position onward satisfy it by
        // construction; the observed threshold may only be smaller.
        if let (Some(idx), Some(EqCertificate::CofiniteTail { n0, .. })) =
            (stream_index, &certificate)
        {
            if *n0 > idx + 1 {
                failures.push(format!(
                    "fact at stream index {idx} only holds from row {n0}"
                ));
            }
        }
        facts.push(FactCheck {
            fact,
            formula: formula.to_string(),
            stream_index,
            certificate,
        });
    }

    let mut order = Vec::new();
    for i in 0..es.len() {
        for j in 0..es.len() {
            if i != j && poly_le(&es[i], &es[j]) {
                let from_row = le_mod_cofinite(&table.column(i), &table.column(j)).unwrap();
                if from_row.is_none() {
                    failures.push(format!("order fact x{i} <= x{j} fails on the table tail"));
                }
                order.push(OrderCheck { i, j, from_row });
            }
        }
    }

    let mut injectivity = Vec::new();
    for i in 0..es.len() {
        for j in i + 1..es.len() {
            let ci = table.column(i);
            let cj = table.column(j);
            // Minimal row index from which the columns differ everywhere.
            let from = settles_from(table.depth, |idx| ci.values()[idx] == cj.values()[idx]);
            if from.is_none() {
                failures.push(format!("columns {i} and {j} agree at the last row"));
            }
            injectivity.push(InjectivityCheck {
                i,
                j,
                distinct_from_row: from,
            });
        }
    }

    Ok(EmbedReport {
        facts,
        order,
        injectivity,
        failures,
    })
}

/// Divergence check for the columns: nonstandard elements must exceed the
/// bound from some row onward; standard elements stabilize to their value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Remark1Report {
    pub bound: String,
    pub columns: Vec<ColumnBehavior>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnBehavior {
    pub column: usize,
    pub element: String,
    /// Degree >= 1: the first row index after which every entry exceeds
    /// the bound within the table.
    pub exceeds_from_row: Option<usize>,
    /// Degree 0: the constant value the column stabilizes to.
    pub stabilizes_to: Option<String>,
}

impl Remark1Report {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Minimal index from which `bad` never holds again within a prefix of
/// the given length; `None` when it holds at the final index.
fn settles_from(len: usize, bad: impl Fn(usize) -> bool) -> Option<usize> {
    let mut last_bad = None;
    for idx in 0..len {
        if bad(idx) {
            last_bad = Some(idx);
        }
    }
    match last_bad {
        None => Some(0),
        Some(i) if i + 1 < len => Some(i + 1),
        Some(_) => None,
    }
}

pub fn check_remark1(table: &SolutionTable, bound: &BigUint) -> Result<Remark1Report, EmbedError> {
    let elems = table
        .parse_elements()
        .map_err(|e| EmbedError::DuplicateElement(e.to_string()))?;
    let mut columns = Vec::new();
    let mut failures = Vec::new();
    for (i, e) in elems.elems().iter().enumerate() {
        let col = table.column(i);
        if e.degree() >= 1 && !e.is_zero() {
            // First index after which the column stays above the bound.
            let from = settles_from(table.depth, |idx| col.values()[idx] <= *bound);
            if from.is_none() {
                failures.push(format!(
                    "nonstandard column {i} ({e}) does not clear {bound} within the table"
                ));
            }
            columns.push(ColumnBehavior {
                column: i,
                element: e.to_string(),
                exceeds_from_row: from,
                stabilizes_to: None,
            });
        } else {
            let value = e.standard_value().unwrap();
            let stable = col.values().iter().all(|v| *v == value);
            if !stable {
                failures.push(format!(
                    "standard column {i} ({e}) does not sit at its value"
                ));
            }
            columns.push(ColumnBehavior {
                column: i,
                element: e.to_string(),
                exceeds_from_row: None,
                stabilizes_to: Some(value.to_string()),
            });
        }
    }
    Ok(Remark1Report {
        bound: bound.to_string(),
        columns,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::parse_poly;

    fn elems(list: &[&str]) -> ElementEnumeration {
        ElementEnumeration::new(list.iter().map(|s| parse_poly(s).unwrap()).collect()).unwrap()
    }

    fn cfg() -> EnumConfig {
        EnumConfig::default()
    }

    #[test]
    fn stream_contains_the_basic_facts() {
        let es = elems(&["0", "1", "X", "X+1"]);
        let stream = generate_true_equations(&es, 40, &cfg()).unwrap();
        let strs: Vec<String> = stream.equations.iter().map(|e| e.to_string()).collect();
        // The zero element's equation, the idempotence of 1, and the
        // addition fact X + 1 = X+1.
        assert!(strs.contains(&"0=x0".to_string()), "{strs:?}");
        assert!(strs.contains(&"x1=x1*x1".to_string()), "{strs:?}");
        assert!(strs.contains(&"x1+x2=x3".to_string()), "{strs:?}");
        // All equations are true of the elements.
        for eq in &stream.equations {
            assert!(holds_in_model(eq, es.elems()), "{eq}");
        }
    }

    #[test]
    fn tiny_budget_is_rejected_loudly() {
        let es = elems(&["0", "1", "X", "X+1"]);
        let err = generate_true_equations(&es, 3, &cfg()).unwrap_err();
        assert!(matches!(err, EmbedError::BudgetTooSmall { .. }));
    }

    #[test]
    fn rows_solve_their_systems() {
        let es = elems(&["0", "1", "X", "X+1"]);
        let stream = generate_true_equations(&es, 30, &cfg()).unwrap();
        let table = build_table(&es, &stream, 12).unwrap();
        for n in 1..=table.depth {
            let system = DioSystem::new(stream.equations[..n].to_vec()).unwrap();
            let assignment: crate::solver::Assignment = (0..table.width)
                .map(|i| (i, table.rows[n - 1][i].parse().unwrap()))
                .collect();
            assert!(verify(&system, &assignment), "row {n}");
        }
    }

    #[test]
    fn standard_columns_stabilize_and_x_grows() {
        let es = elems(&["0", "1", "X"]);
        let stream = generate_true_equations(&es, 25, &cfg()).unwrap();
        let table = build_table(&es, &stream, 10).unwrap();
        for row in &table.rows {
            assert_eq!(row[0], "0");
            assert_eq!(row[1], "1");
        }
        // The nonstandard column grows strictly.
        let col = table.column(2);
        for w in col.values().windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn verify_embedding_finds_certificates() {
        let es = elems(&["0", "1", "X", "X+1"]);
        let stream = generate_true_equations(&es, 40, &cfg()).unwrap();
        let table = build_table(&es, &stream, 15).unwrap();
        let report = verify_embedding(&table).unwrap();
        assert!(report.all_ok(), "{:?}", report.failures);
        // 0 + 1 = 1 as a fact: i=0, j=1, k=1.
        assert!(report.facts.iter().any(|f| f.fact.op == OpKind::Add
            && f.fact.i == 0
            && f.fact.j == 1
            && f.fact.k == 1
            && f.certificate.is_some()));
        // Every distinct pair separates.
        assert!(report
            .injectivity
            .iter()
            .all(|c| c.distinct_from_row.is_some()));
    }

    #[test]
    fn remark1_thresholds() {
        let es = elems(&["0", "1", "X", "X+1"]);
        let stream = generate_true_equations(&es, 40, &cfg()).unwrap();
        let table = build_table(&es, &stream, 15).unwrap();
        let report = check_remark1(&table, &BigUint::from(100u32)).unwrap();
        assert!(report.all_ok(), "{:?}", report.failures);
        let x_col = report.columns.iter().find(|c| c.element == "X").unwrap();
        // X evaluates to n^2; it clears 100 from row 11 (index 10).
        assert_eq!(x_col.exceeds_from_row, Some(10));
        let zero = &report.columns[0];
        assert_eq!(zero.stabilizes_to.as_deref(), Some("0"));
        let one = &report.columns[1];
        assert_eq!(one.stabilizes_to.as_deref(), Some("1"));
    }

    #[test]
    fn render_produces_grid() {
        let es = elems(&["0", "1"]);
        let stream = generate_true_equations(&es, 14, &cfg()).unwrap();
        let table = build_table(&es, &stream, 4).unwrap();
        let text = table.render();
        assert!(text.lines().count() >= 6);
        assert!(text.contains('|'));
    }
}
