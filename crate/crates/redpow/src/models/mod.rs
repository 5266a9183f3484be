//! Concrete structures for the arithmetic language and the sampled
//! checker for the axioms of nonnegative parts of discretely ordered
//! rings.

mod axioms;
mod model;
mod poly;

pub use axioms::{check_axioms, AxiomReport, AxiomResult};
pub use model::{Model, ModelKind, Sampler};
pub use poly::{
    eval_at, nonneg_threshold, parse_poly, poly_add, poly_le, poly_lt, poly_minus, poly_mul,
    PolyElem, PolyError, ZPoly,
};
