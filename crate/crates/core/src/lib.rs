//! A finite-scale engine for the bicategory of categories and profunctors.
//!
//! Everything here is table-driven and exhaustively checkable: categories are
//! explicit composition tables, profunctors are finite set-valued bimodules,
//! composition of profunctors is a coend computed as a disjoint union
//! quotiented by zig-zag identifications, and 2-cells are natural families of
//! functions between those quotients.
//!
//! On top of the raw calculus sit generators-and-relations presentations of
//! monoidal structure (pseudomonoids with adjoints, braidings, twists, traces,
//! Frobenius structure) together with an interpreter that evaluates them in
//! finite Prof and checks every equation pointwise on canonical coend
//! representatives. Concrete monoidal categories live in [`models`] and can be
//! externalized into interpretations, round-tripping trace data against the
//! classical axiom families.

pub mod cli;
pub mod fincat;
pub mod interpret;
pub mod limits;
pub mod models;
pub mod presentation;
pub mod prof;
pub mod report;

pub use fincat::FinCategory;
pub use interpret::Interpretation;
pub use models::MonoidalModel;
pub use presentation::Presentation;
pub use prof::{ProfCell, Profunctor};
