//! Rating inflation in generalized Elo systems.
//!
//! Given `n` players who start level and `k` games whose outcomes can be
//! arranged at will, how high can one player's rating be pushed? This crate
//! simulates the relevant strategies (repeated wins between two players and
//! the ladder strategy over many players), evaluates the matching upper and
//! lower bounds, rewrites arbitrary game sequences into upset-free ones, and
//! solves tiny instances exactly by branch and bound.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what every stated tolerance
//! assumes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod numeric;
pub mod path_engine;
pub mod potfn;
pub mod scalar;
pub mod search;
pub mod strategies;
pub mod tails;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PotFunction = potfn::PotFunction<f64>;
pub type TailFunctions = tails::TailFunctions<f64>;
pub type RatingState = dynamics::RatingState<f64>;
pub type Move = dynamics::Move<f64>;
pub type Transcript = dynamics::Transcript<f64>;
pub type Edge = dynamics::Edge<f64>;
pub type LadderRun = strategies::LadderRun<f64>;
pub type BoundReport = bounds::BoundReport<f64>;
pub type PhiValue = bounds::PhiValue<f64>;
pub type RewriteReport = path_engine::RewriteReport<f64>;

pub type PotFunctionF32 = potfn::PotFunction<f32>;
pub type TailFunctionsF32 = tails::TailFunctions<f32>;
pub type RatingStateF32 = dynamics::RatingState<f32>;
