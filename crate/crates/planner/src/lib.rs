//! Cooperative coverage mission planning for small UAV fleets.
//!
//! Given a region of interest with no-fly zones, a fleet size and a sensor
//! model, the planner:
//!
//! 1. projects the region into a local metric frame,
//! 2. optimizes the position/orientation of a square node grid over it,
//! 3. divides the free nodes into one connected region per UAV with
//!    configurable area shares,
//! 4. builds a minimum-spanning-tree coverage tour per region (picking the
//!    tree scheme with the fewest turns), and
//! 5. reports simulated photo coverage and an energy/time cost estimate.
//!
//! The top-level entry points are [`pipeline::plan_mission`] and
//! [`pipeline::evaluate_plan`]; the remaining modules expose the individual
//! stages for testing and direct use.

pub mod artifacts;
pub mod cost;
pub mod coverage;
pub mod darp;
pub mod error;
pub mod geo;
pub mod grid;
pub mod mission_file;
pub mod pipeline;
pub mod placement;
pub mod stc;

pub use error::{PlanError, Result};
