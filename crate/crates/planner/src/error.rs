use thiserror::Error;

/// Errors produced by the planning pipeline.
///
/// The variants are deliberately coarse: callers (notably the CLI) map them to
/// distinct exit codes, so each variant represents a different *kind* of
/// failure rather than a different site.
#[derive(Debug, Error)]
pub enum PlanError {
    /// Malformed or out-of-domain input: bad coordinates, invalid polygon
    /// rings, inconsistent parameters, unparsable mission files.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The chosen scanning density produced a grid with no usable nodes for
    /// one specific placement of the grid over the region.
    #[error("infeasible discretization: {0}")]
    InfeasibleDiscretization(String),

    /// No placement of the grid yields any usable node; the region cannot be
    /// planned at this scanning density at all.
    #[error("infeasible mission: {0}")]
    InfeasibleMission(String),

    /// The free space cannot be split into one connected region per UAV.
    #[error("infeasible partition: {0}")]
    InfeasiblePartition(String),

    /// Fleet setup problems: duplicate start nodes, share/position arity
    /// mismatches and similar.
    #[error("fleet configuration: {0}")]
    FleetConfiguration(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PlanError>;
