//! Fixed-radius all-pairs neighbor search with randomly shifted grids, and the
//! sampling-based motion planners that consume it.
//!
//! * [`geometry`]: points, distances, seeded sampling.
//! * [`rsg`]: the shifted-grid engine, pair stores, the shipped parameter table and the tuner.
//! * [`baseline`]: exact backends (brute force, fixed grid) behind the common [`baseline::NnBackend`] trait.
//! * [`world`]: box-obstacle environments, free-space volume, segment checks, built-in scenarios.
//! * [`planners`]: connection radii, PRM*, LazyB-PRM*, FMT*, RRT and batched-RRT*.

pub mod baseline;
pub mod error;
pub mod geometry;
pub mod planners;
pub mod rsg;
pub mod world;

pub use error::{Error, Result};
pub use geometry::{
    derive_seed, euclidean_dist, sample_unit_hypercube, seeded_rng, squared_dist, Point, PointSet, Rng,
};
