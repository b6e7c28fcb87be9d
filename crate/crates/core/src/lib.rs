//! Simulation engine and verification toolkit for turedos: Turing machines
//! on `Z^d` whose head only ever moves onto blank cells.

pub mod config;
pub mod engine;
pub mod error;
pub mod formats;
pub mod lattice;
pub mod leakage;
pub mod render;
pub mod rules;
pub mod simcheck;
pub mod zoo;

pub use config::{domain, pattern_at, Cell, Configuration, GlobalState, Letter, Pattern, StateId};
pub use engine::{run, step, OrbitTrace, StepEvent, StepOutcome};
pub use error::{Result, TuredoError};
pub use lattice::{ball, block_decompose, Ball, Dim, Position};
pub use rules::{validate_spec, Rule, Turedo, TuredoSpec, ValidationReport};
