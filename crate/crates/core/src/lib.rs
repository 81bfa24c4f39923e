//! Algebraic power series over finite fields: section (Cartier) operators on
//! finite-dimensional representations, Newton-polytope state-space bounds,
//! coefficient automata, and linearized annihilators of diagonals.
//!
//! Conventions used throughout:
//! - polynomials live in F_q[t_1, ..., t_n, y]; exponent vectors have n + 1
//!   entries with the y-exponent last;
//! - series are truncated by total degree;
//! - digit expansions of indices are read least-significant digit first.

pub mod annihilator;
pub mod automaton;
pub mod cartier;
pub mod error;
pub mod ff;
pub mod io;
mod ntt;
pub mod poly;
pub mod polytope;
pub mod series;

pub use annihilator::{
    apply_linearized, diagonal_pipeline, diagonal_pipeline_with, find_linearized_annihilator,
    verify_annihilation, AnnihilatorCertificate, LinearizedPoly, PipelineOptions, PipelineResult,
};
pub use automaton::{build_dfao, dfao_query, export_dfao, parse_dfao, Dfao, DfaoState, ExportFormat};
pub use cartier::{
    apply_section_rep, coeff_query, embed_f, rep_constant_term, BranchSpace, Representation,
};
pub use error::{Error, Result};
pub use ff::{Field, FieldElem};
pub use poly::{ArithOp, DegreeProfile, Monomial, MultiPoly};
pub use polytope::{
    bound_closed_form, bound_report, bound_report_for, count_box_points, count_diagonal_classes,
    newton_polytope, BoundReport, BoundTask, Halfspace, NewtonPolytope,
};
pub use series::{hensel_solve, hensel_solve_interruptible, Branch, TruncatedSeries};
