//! Overlapping link communities found as well separated local minima of the
//! normalised node-cut Ψ, searched by a memetic algorithm.
//!
//! The crate is organised bottom up: [`graph`] and [`cost`] define the
//! landscape, [`search`] and [`memetic`] walk it, [`validity`] decides which
//! minima count, [`analysis`] turns them into a solution and [`pipeline`]
//! with [`report`] and [`io`] runs everything in batches.

pub mod analysis;
pub mod community;
pub mod cost;
pub mod graph;
pub mod io;
pub mod memetic;
pub mod pipeline;
pub mod report;
pub mod search;
pub mod synthetic;
pub mod validity;
