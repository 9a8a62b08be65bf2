//! Order-theoretic common fixed points for weakly isotone single- and
//! multivalued maps on finite-dimensional cone-ordered spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`ordered_space`]: points, cones, seminorm families, order intervals.
//! - [`noncompactness`]: finite sets, box unions and the partition-budgeted
//!   measure of noncompactness `alpha_k`.
//! - [`setmaps`]: multimaps, set orders and isotonicity checks.
//! - [`fixpoint_engine`]: the alternating `S`/`T` iteration with order audits
//!   and residual certificates.
//! - [`game_solver`]: zero-sum games on finite grids, best responses, saddle
//!   certification and section intersections.
//! - [`payoff_expr`]: the small expression language used by the CLI inputs.
//! - [`cli`]: command-line surface, JSON reports, trace CSV and SVG heatmaps.

pub mod cli;
pub mod error;
pub mod fixpoint_engine;
pub mod game_solver;
pub mod noncompactness;
pub mod ordered_space;
pub mod payoff_expr;
pub mod setmaps;

pub use error::{Error, Result};
pub use fixpoint_engine::{
    FixpointCertificate, FixpointRun, IterationTrace, Selector, SolverOptions, TerminalStatus,
};
pub use game_solver::{BestResponseTables, Game, SaddleReport, SectionedSets};
pub use noncompactness::{BoxSet, FiniteSet, MeasureValue};
pub use ordered_space::{ConeSpec, OrderInterval, OrderedSpace, Point, SeminormKind, SeminormSpec};
pub use setmaps::{Direction, Domain, MultiMap, OrderViolation, SetRelation, SetValue};
