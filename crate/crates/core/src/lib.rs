//! Random restrictions, canonical decision trees and grid restrictions of
//! Tseitin contradictions, with a Monte Carlo harness that compares measured
//! failure rates against the closed-form switching-lemma bounds.
//!
//! The modules build on each other in order: [`boolcore`] (terms, DNFs,
//! restrictions, trees), [`gridgraph`] (torus Tseitin instances, bridges,
//! closures), [`restrictions`] (uniform and grid restriction samplers),
//! [`treeops`] (restriction procedures for independent trees),
//! [`canonical`] (canonical and common decision trees), [`game`] (the
//! sampling game and the random-path algorithms), [`bounds`] and [`lab`].

pub mod boolcore;
pub mod bounds;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod game;
pub mod gridgraph;
pub mod lab;
pub mod restrictions;
pub mod treeops;

pub use error::{Error, Result};
