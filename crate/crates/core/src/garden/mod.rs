//! Symbolic polynomials over alternating node variables, the diagrams
//! ("gardens") that organise them, and the leading-term certificates for
//! uniform LSS Gram entries.

pub mod diagram;
pub mod leading;
pub mod lss;
pub mod poly;

pub use diagram::{Garden, GardenKind, GardenValue, Indexing, Label, Tree, DEFAULT_INDEX_BUDGET};
pub use leading::{leading_term, predicted_dominant, verify_unique_monomial, LeadingTerm, PredictedTerm, UniqueMonomialReport, DEFAULT_SEARCH_BUDGET};
pub use lss::{lss_scalar_garden, lss_vector_garden, symbolic_columns, symbolic_inner, DEFAULT_MONOMIAL_BUDGET};
pub use poly::{Family, Monomial, NodeVar, Poly, VariableValues};
