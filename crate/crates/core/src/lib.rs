//! Symbolic construction and verification of Lax pairs for scalar
//! (1+1)-dimensional evolution equations via linear invariant manifolds of
//! the linearized equation.
//!
//! The pipeline: exact rational-plus-exponential expression kernel
//! ([`normal`]), jet-space total derivatives and linearization ([`jet`]),
//! linear invariant manifolds and v-jet elimination ([`manifold`]),
//! determining-system generation ([`determining`]), verification checks
//! ([`verify`]), order-bound search and ansatz solving ([`search`]), and a
//! built-in corpus of classified manifolds ([`corpus`]).

pub mod atom;
pub mod corpus;
pub mod determining;
pub mod error;
pub mod eval;
pub mod expr;
pub mod jet;
pub mod manifold;
pub mod normal;
pub mod parse;
pub mod poly;
pub mod render;
pub mod search;
pub mod verify;

pub use atom::{Atom, Dir, Name, Partials, UnknownAtom, UnknownSig};
pub use error::{Error, Result};
pub use expr::Expr;
pub use eval::numeric_spotcheck;
pub use jet::EvolutionEquation;
pub use determining::{
    apply_assignment, generate, jet_key, split_over_jets, Assignment, DeterminingEquation,
    DeterminingSystem, SymbolicManifoldSpec,
};
pub use search::{
    obstruction_scan, search, top_quadratic_term, unknown_free_part, ConstraintExport,
    ExportedConstraint, Outcome, RationalTemplate, SearchConfig, SearchOutcome, Templates,
};
pub use manifold::{GeneralManifold, LinearManifold};
pub use verify::{CheckRegistry, Status, VerificationReport};
pub use normal::{normalize, NormalForm};
pub use parse::{parse_expr, ParseContext};
pub use poly::{Monomial, Poly};
