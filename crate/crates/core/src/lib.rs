//! Exploration and model checking of multi-agent systems whose agents run
//! timed periodic tasks.
//!
//! Each agent walks a DAG of localities, firing interval-guarded transitions
//! on its own clock, and jumps back to its initial locality when the clock
//! reaches its reset period. Transitions update a shared vector of exact
//! rationals.
//!
//! * [`model`]: data model, JSON loading, liveness and acyclicity checks.
//! * [`semantics`]: original and accelerated successor relations.
//! * [`petri`]: translation to a three-place high-level Petri net.
//! * [`layers`]: periodic coherent cuts and border-to-border exploration.
//! * [`mc`]: CTL reachability queries, heuristics and indicator sweeps.

pub mod error;
pub mod layers;
pub mod mc;
pub mod model;
pub mod petri;
pub mod rational;
pub mod semantics;
pub mod syntax;

pub use error::{Error, Result};
pub use model::Model;
pub use rational::Rational;
pub use semantics::{Event, Semantics, State, System};
