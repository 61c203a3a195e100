//! Sampling-based planners over any [`NnBackend`](crate::baseline::NnBackend).
//!
//! All planners root their roadmap or tree at vertex 0, the start.

mod fmt;
mod prm;
mod radius;
mod roadmap;
mod rrt;

pub use fmt::{fmt_star, FmtConfig};
pub use prm::{lazyb_prm_star, prm_query, prm_star, PrmConfig};
pub use radius::*;
pub use roadmap::{GoalRegion, PlanResult, PlanStats, Roadmap};
pub use rrt::{batched_rrt_star, rewire_rrt_star, rrt, steer, BatchedRrtConfig};
