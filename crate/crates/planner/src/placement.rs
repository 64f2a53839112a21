//! Grid placement optimization.
//!
//! Shifting and rotating the region relative to the node lattice changes how
//! many usable nodes the discretization captures, how tight the bounding box
//! is and how centered the region sits in it. A placement is scored by
//!
//! ```text
//! score = w_fill * node_fill + w_box * box_fit - w_margin * margin_imbalance
//! ```
//!
//! where `node_fill` is the captured-node count over the region's theoretical
//! node capacity, `box_fit` is region area over augmented-box area, and
//! `margin_imbalance` penalizes off-center placements. A small simulated
//! annealing run over `(shift_x, shift_y, rotation)` maximizes the score;
//! the identity placement is always evaluated first so the result can never
//! be worse than not optimizing.

use crate::error::{PlanError, Result};
use crate::geo::{NedPoint, Polygon};
use crate::grid::{build_grid, node_spacing, AugmentedBox, LabelMode, NodeGrid, Placement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Relative weights of the three score terms. `fill + box_fit` must equal 1
/// and every weight must sit in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub fill: f64,
    pub box_fit: f64,
    pub margin: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self {
            fill: 0.9,
            box_fit: 0.1,
            margin: 0.05,
        }
    }
}

impl ScoreWeights {
    pub fn validate(&self) -> Result<()> {
        let in_range = |w: f64| (0.0..=1.0).contains(&w);
        if !in_range(self.fill) || !in_range(self.box_fit) || !in_range(self.margin) {
            return Err(PlanError::InvalidInput(
                "score weights must lie in [0, 1]".into(),
            ));
        }
        if (self.fill + self.box_fit - 1.0).abs() > 1.0e-9 {
            return Err(PlanError::InvalidInput(
                "fill and box-fit weights must sum to 1".into(),
            ));
        }
        Ok(())
    }
}

/// Annealing schedule. The defaults finish in roughly 4000 evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    pub cooling_rate: f64,
    pub proposals_per_temperature: usize,
    pub min_temperature: f64,
    pub max_evaluations: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            initial_temperature: 0.1,
            cooling_rate: 0.95,
            proposals_per_temperature: 30,
            min_temperature: 1.0e-4,
            max_evaluations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementParams {
    pub weights: ScoreWeights,
    pub schedule: AnnealSchedule,
    pub seed: u64,
}

impl Default for PlacementParams {
    fn default() -> Self {
        Self {
            weights: ScoreWeights::default(),
            schedule: AnnealSchedule::default(),
            seed: 0,
        }
    }
}

/// Score of one placement, with its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementScore {
    pub score: f64,
    pub node_fill: f64,
    pub box_fit: f64,
    pub margin_imbalance: f64,
    pub free_nodes: usize,
}

/// One row of the annealing trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealTraceRow {
    pub evaluation: usize,
    pub shift_x: f64,
    pub shift_y: f64,
    pub rotation_deg: f64,
    pub node_fill: f64,
    pub box_fit: f64,
    pub margin_imbalance: f64,
    pub score: f64,
    pub accepted: bool,
}

/// Result of the placement search.
#[derive(Debug, Clone)]
pub struct PlacementSolution {
    pub placement: Placement,
    pub score: PlacementScore,
    pub grid: NodeGrid,
    pub evaluations: usize,
    pub trace: Vec<AnnealTraceRow>,
}

/// Scores a single placement without optimizing.
///
/// Returns the score even when the placement captures zero nodes (the
/// annealer must be able to walk through such placements); only the final
/// chosen placement is required to be usable.
pub fn eval_placement(
    roi: &Polygon,
    placement: Placement,
    d_s: f64,
    mode: LabelMode,
    weights: &ScoreWeights,
) -> Result<PlacementScore> {
    weights.validate()?;
    let d_n = node_spacing(d_s);
    let placed = roi.placed(
        placement.shift_x,
        placement.shift_y,
        placement.rotation_deg,
        NedPoint::new(0.0, 0.0),
    )?;
    let standard = placed.bounding_box();
    let augmented = AugmentedBox::around(&standard, d_n)?;

    let free_nodes = match build_grid(roi, placement, d_s, mode, &[]) {
        Ok(grid) => grid.free_count(),
        Err(PlanError::InfeasibleDiscretization(_)) => 0,
        Err(e) => return Err(e),
    };

    let area = roi.area();
    let capacity = area / (d_n * d_n);
    // Boundary effects can push the captured count past the theoretical
    // capacity on thin shapes; cap the term so the score stays normalized.
    let node_fill = if capacity > 0.0 {
        (free_nodes as f64 / capacity).min(1.0)
    } else {
        0.0
    };
    let box_fit = area / augmented.bounds.area();
    let margin_x = ((augmented.bounds.x_max - standard.x_max)
        - (standard.x_min - augmented.bounds.x_min))
        .abs()
        / (2.0 * (augmented.bounds.x_max - augmented.bounds.x_min));
    let margin_y = ((augmented.bounds.y_max - standard.y_max)
        - (standard.y_min - augmented.bounds.y_min))
        .abs()
        / (2.0 * (augmented.bounds.y_max - augmented.bounds.y_min));
    let margin_imbalance = margin_x + margin_y;
    let score = weights.fill * node_fill + weights.box_fit * box_fit
        - weights.margin * margin_imbalance;
    Ok(PlacementScore {
        score,
        node_fill,
        box_fit,
        margin_imbalance,
        free_nodes,
    })
}

/// Reflects a proposed value back into `[lo, hi]`.
fn reflect(mut v: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(hi > lo);
    loop {
        if v < lo {
            v = lo + (lo - v);
        } else if v > hi {
            v = hi - (v - hi);
        } else {
            return v;
        }
    }
}

/// Simulated-annealing search for the best grid placement.
///
/// Deterministic for a given seed. Prefers placements that capture at least
/// one node; among those it returns the best score ever seen (not merely the
/// final chain state). Errors with `InfeasibleMission` when no evaluated
/// placement captures any node.
pub fn optimize_placement(
    roi: &Polygon,
    d_s: f64,
    mode: LabelMode,
    params: &PlacementParams,
) -> Result<PlacementSolution> {
    params.weights.validate()?;
    let sched = &params.schedule;
    if !(sched.initial_temperature > 0.0)
        || !(0.0..1.0).contains(&sched.cooling_rate)
        || sched.proposals_per_temperature == 0
        || sched.max_evaluations == 0
    {
        return Err(PlanError::InvalidInput("invalid annealing schedule".into()));
    }
    let d_n = node_spacing(d_s);
    let ranges = [(0.0, d_n), (0.0, d_n), (0.0, 90.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut trace = Vec::new();

    let mut evals = 0usize;
    let eval = |placement: Placement,
                    trace: &mut Vec<AnnealTraceRow>,
                    evals: &mut usize,
                    accepted_hint: bool|
     -> Result<PlacementScore> {
        let score = eval_placement(roi, placement, d_s, mode, &params.weights)?;
        *evals += 1;
        trace.push(AnnealTraceRow {
            evaluation: *evals,
            shift_x: placement.shift_x,
            shift_y: placement.shift_y,
            rotation_deg: placement.rotation_deg,
            node_fill: score.node_fill,
            box_fit: score.box_fit,
            margin_imbalance: score.margin_imbalance,
            score: score.score,
            accepted: accepted_hint,
        });
        Ok(score)
    };

    // The identity placement is always the first evaluation.
    let mut current = Placement::identity();
    let mut current_score = eval(current, &mut trace, &mut evals, true)?;
    // Best usable (captures nodes) and best overall, tracked separately so a
    // high-scoring but empty placement can never shadow a usable one.
    let mut best_usable: Option<(Placement, PlacementScore)> = None;
    let mut best_any = (current, current_score);
    if current_score.free_nodes > 0 {
        best_usable = Some((current, current_score));
    }

    let mut temperature = sched.initial_temperature;
    'cooling: while temperature >= sched.min_temperature {
        for _ in 0..sched.proposals_per_temperature {
            if evals >= sched.max_evaluations {
                break 'cooling;
            }
            let var = rng.gen_range(0..3usize);
            let (lo, hi) = ranges[var];
            let scale = (hi - lo) * (temperature / sched.initial_temperature);
            let step = rng.gen_range(-1.0..1.0) * scale;
            let mut proposal = current;
            let field = match var {
                0 => &mut proposal.shift_x,
                1 => &mut proposal.shift_y,
                _ => &mut proposal.rotation_deg,
            };
            *field = reflect(*field + step, lo, hi);

            let proposal_score = eval(proposal, &mut trace, &mut evals, false)?;
            let delta = current_score.score - proposal_score.score; // minimize -score
            let accept = delta < 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
            if accept {
                trace.last_mut().expect("just pushed").accepted = true;
                current = proposal;
                current_score = proposal_score;
            }
            if proposal_score.score > best_any.1.score {
                best_any = (proposal, proposal_score);
            }
            if proposal_score.free_nodes > 0
                && best_usable.map_or(true, |(_, s)| proposal_score.score > s.score)
            {
                best_usable = Some((proposal, proposal_score));
            }
        }
        temperature *= sched.cooling_rate;
    }

    let (placement, score) = best_usable.ok_or_else(|| {
        PlanError::InfeasibleMission(format!(
            "no grid placement captures any node at scanning density {d_s}"
        ))
    })?;
    let grid = build_grid(roi, placement, d_s, mode, &[])?;
    Ok(PlacementSolution {
        placement,
        score,
        grid,
        evaluations: evals,
        trace,
    })
}
