//! Proportional division of free nodes into per-UAV regions.
//!
//! Every UAV keeps an evaluation field over the free nodes, initialized to
//! obstacle-aware BFS distance from its start node (a geodesic Voronoi
//! split). Each cycle assigns every node to the UAV with the cheapest scaled
//! field value, then nudges per-UAV scalar multipliers up or down depending
//! on whether the UAV holds more or fewer nodes than its target share, and
//! repairs disconnected regions by making nodes far from a UAV's main
//! component progressively more expensive for it. A seeded noise kick breaks
//! limit cycles. The loop stops when every count is within tolerance of its
//! target and every region is connected, or at an iteration cap, in which
//! case the best connected assignment seen is returned instead.

use crate::error::{PlanError, Result};
use crate::grid::{NodeGrid, NodeState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::io::Write;

/// Target area fractions, one per UAV, summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareVector(Vec<f64>);

impl ShareVector {
    pub fn new(shares: Vec<f64>) -> Result<Self> {
        if shares.is_empty() {
            return Err(PlanError::InvalidInput("share vector is empty".into()));
        }
        if shares.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(PlanError::InvalidInput(
                "every share must be a positive finite fraction".into(),
            ));
        }
        let sum: f64 = shares.iter().sum();
        if (sum - 1.0).abs() > 1.0e-9 {
            return Err(PlanError::InvalidInput(format!(
                "shares sum to {sum}, expected 1"
            )));
        }
        Ok(Self(shares))
    }

    pub fn equal(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(PlanError::InvalidInput("share vector is empty".into()));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivideParams {
    /// Multiplier gain per cycle, relative to the count error as a fraction
    /// of all free nodes.
    pub balance_gain: f64,
    /// Strength of the connectivity repair factor; factors live in
    /// `[1 - repair_strength, 1 + repair_strength]`.
    pub repair_strength: f64,
    /// Multiplier clamp range.
    pub multiplier_min: f64,
    pub multiplier_max: f64,
    /// Cycles without cost improvement before the noise kick.
    pub stale_cycles_before_noise: usize,
    /// Absolute node-count tolerance; `None` means `max(1, ceil(0.005 L))`.
    pub tolerance: Option<usize>,
    pub seed: u64,
}

impl Default for DivideParams {
    fn default() -> Self {
        Self {
            balance_gain: 0.05,
            repair_strength: 0.3,
            multiplier_min: 1.0e-3,
            multiplier_max: 1.0e3,
            stale_cycles_before_noise: 50,
            tolerance: None,
            seed: 0,
        }
    }
}

/// One row of the division iteration trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivideTraceRow {
    pub cycle: usize,
    pub cost: f64,
    pub max_deviation: f64,
    pub disconnected_regions: usize,
}

/// Result of dividing a grid's free nodes among the fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionAssignment {
    pub nx: usize,
    pub ny: usize,
    /// Per node: owning UAV id, `None` for obstacles.
    pub owner: Vec<Option<u16>>,
    /// Nodes owned per UAV.
    pub counts: Vec<usize>,
    /// Target node counts (`share * L`).
    pub targets: Vec<f64>,
    /// Flat node index of each UAV's start node.
    pub start_cells: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<DivideTraceRow>,
}

impl RegionAssignment {
    pub fn total_free(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Writes the owner map as a binary portable pixmap, one color per UAV,
    /// obstacles black. Rows north-to-south.
    pub fn write_ppm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.nx, self.ny)?;
        let colors: Vec<[u8; 3]> = (0..self.counts.len())
            .map(|i| hue_color(i, self.counts.len()))
            .collect();
        for iy in (0..self.ny).rev() {
            for ix in 0..self.nx {
                let px = match self.owner[iy * self.nx + ix] {
                    Some(id) => colors[id as usize],
                    None => [0, 0, 0],
                };
                w.write_all(&px)?;
            }
        }
        Ok(())
    }
}

fn hue_color(i: usize, n: usize) -> [u8; 3] {
    let h = (i as f64 / n.max(1) as f64) * 360.0;
    let c = 1.0;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (h / 60.0) as usize {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    [
        (64.0 + 191.0 * r) as u8,
        (64.0 + 191.0 * g) as u8,
        (64.0 + 191.0 * b) as u8,
    ]
}

/// True when the UAV's cells form one 4-connected component containing its
/// start node.
pub fn region_connected(assignment: &RegionAssignment, uav_id: usize) -> Result<bool> {
    if uav_id >= assignment.counts.len() {
        return Err(PlanError::InvalidInput(format!(
            "unknown uav id {uav_id}"
        )));
    }
    Ok(component_size(
        &assignment.owner,
        assignment.nx,
        assignment.ny,
        assignment.start_cells[uav_id],
        uav_id as u16,
    ) == assignment.counts[uav_id])
}

fn component_size(
    owner: &[Option<u16>],
    nx: usize,
    ny: usize,
    start: usize,
    id: u16,
) -> usize {
    if owner[start] != Some(id) {
        return 0;
    }
    let mut seen = vec![false; owner.len()];
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    let mut size = 0;
    while let Some(flat) = queue.pop_front() {
        size += 1;
        for nb in neighbors(flat, nx, ny) {
            if !seen[nb] && owner[nb] == Some(id) {
                seen[nb] = true;
                queue.push_back(nb);
            }
        }
    }
    size
}

fn neighbors(flat: usize, nx: usize, ny: usize) -> impl Iterator<Item = usize> {
    let (ix, iy) = (flat % nx, flat / nx);
    let mut out = [usize::MAX; 4];
    let mut n = 0;
    if ix > 0 {
        out[n] = flat - 1;
        n += 1;
    }
    if ix + 1 < nx {
        out[n] = flat + 1;
        n += 1;
    }
    if iy > 0 {
        out[n] = flat - nx;
        n += 1;
    }
    if iy + 1 < ny {
        out[n] = flat + nx;
        n += 1;
    }
    out.into_iter().take(n)
}

/// BFS distances over traversable nodes from a set of sources. Unreachable
/// nodes get `usize::MAX`.
fn bfs_distances(
    traversable: &[bool],
    nx: usize,
    ny: usize,
    sources: &[usize],
) -> Vec<usize> {
    let mut dist = vec![usize::MAX; traversable.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(flat) = queue.pop_front() {
        for nb in neighbors(flat, nx, ny) {
            if traversable[nb] && dist[nb] == usize::MAX {
                dist[nb] = dist[flat] + 1;
                queue.push_back(nb);
            }
        }
    }
    dist
}

/// Divides the grid's free nodes into one connected region per UAV with node
/// counts close to `shares * L`.
pub fn divide(
    grid: &NodeGrid,
    shares: &ShareVector,
    params: &DivideParams,
) -> Result<RegionAssignment> {
    let v_n = shares.len();
    if grid.uav_cells.len() != v_n {
        return Err(PlanError::FleetConfiguration(format!(
            "{} shares for {} UAV start nodes",
            v_n,
            grid.uav_cells.len()
        )));
    }
    let traversable: Vec<bool> = grid
        .states
        .iter()
        .map(|s| !matches!(s, NodeState::Obstacle))
        .collect();
    let total_free = traversable.iter().filter(|t| **t).count();
    if total_free < v_n {
        return Err(PlanError::InfeasiblePartition(format!(
            "{total_free} free nodes cannot host {v_n} UAVs"
        )));
    }
    let starts: Vec<usize> = grid.uav_cells.iter().map(|(flat, _)| *flat).collect();

    // Evaluation fields: BFS distance from each start.
    let mut fields: Vec<Vec<f64>> = Vec::with_capacity(v_n);
    for (i, &start) in starts.iter().enumerate() {
        let dist = bfs_distances(&traversable, grid.nx, grid.ny, &[start]);
        if total_free > 1 && !neighbors(start, grid.nx, grid.ny).any(|nb| traversable[nb]) {
            return Err(PlanError::InfeasiblePartition(format!(
                "UAV {i} start node is disconnected from the rest of the free space"
            )));
        }
        fields.push(
            dist.iter()
                .map(|&d| {
                    if d == usize::MAX {
                        f64::INFINITY
                    } else {
                        d as f64
                    }
                })
                .collect(),
        );
    }
    // Every free node must be reachable by someone, or no connected
    // partition can cover it.
    for flat in 0..traversable.len() {
        if traversable[flat] && fields.iter().all(|f| f[flat].is_infinite()) {
            return Err(PlanError::InfeasiblePartition(
                "part of the free space is unreachable from every UAV start".into(),
            ));
        }
    }

    let l = total_free as f64;
    let targets: Vec<f64> = shares.as_slice().iter().map(|p| p * l).collect();
    let tolerance = params
        .tolerance
        .unwrap_or_else(|| ((0.005 * l).ceil() as usize).max(1)) as f64;
    let max_cycles = 100 * (grid.nx + grid.ny);

    let mut multipliers = vec![1.0f64; v_n];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut trace: Vec<DivideTraceRow> = Vec::new();
    let mut owner: Vec<Option<u16>> = vec![None; traversable.len()];
    let mut best_connected: Option<(f64, Vec<Option<u16>>, Vec<usize>)> = None;
    let mut best_cost_seen = f64::INFINITY;
    let mut stale = 0usize;

    let mut cycle = 0usize;
    while cycle < max_cycles {
        cycle += 1;
        // Assignment sweep.
        let mut counts = vec![0usize; v_n];
        for flat in 0..traversable.len() {
            owner[flat] = None;
            if !traversable[flat] {
                continue;
            }
            let mut best_id = u16::MAX;
            let mut best_cost = f64::INFINITY;
            for i in 0..v_n {
                let c = multipliers[i] * fields[i][flat];
                if c < best_cost {
                    best_cost = c;
                    best_id = i as u16;
                }
            }
            debug_assert!(best_id != u16::MAX);
            owner[flat] = Some(best_id);
            counts[best_id as usize] += 1;
        }

        let cost: f64 = counts
            .iter()
            .zip(&targets)
            .map(|(&k, &t)| (k as f64 - t).powi(2))
            .sum::<f64>()
            / 2.0;
        let max_dev = counts
            .iter()
            .zip(&targets)
            .map(|(&k, &t)| (k as f64 - t).abs())
            .fold(0.0f64, f64::max);
        let connected: Vec<bool> = (0..v_n)
            .map(|i| component_size(&owner, grid.nx, grid.ny, starts[i], i as u16) == counts[i])
            .collect();
        let disconnected = connected.iter().filter(|c| !**c).count();
        trace.push(DivideTraceRow {
            cycle,
            cost,
            max_deviation: max_dev,
            disconnected_regions: disconnected,
        });

        if disconnected == 0 {
            if max_dev <= tolerance {
                return Ok(RegionAssignment {
                    nx: grid.nx,
                    ny: grid.ny,
                    owner,
                    counts,
                    targets,
                    start_cells: starts,
                    iterations: cycle,
                    converged: true,
                    trace,
                });
            }
            if best_connected.as_ref().map_or(true, |(c, _, _)| cost < *c) {
                best_connected = Some((cost, owner.clone(), counts.clone()));
            }
        }

        if cost < best_cost_seen - 1.0e-12 {
            best_cost_seen = cost;
            stale = 0;
        } else {
            stale += 1;
        }

        // Share balancing: too many nodes makes a UAV more expensive.
        for i in 0..v_n {
            let err = (counts[i] as f64 - targets[i]) / l;
            multipliers[i] = (multipliers[i] * (1.0 + params.balance_gain * err))
                .clamp(params.multiplier_min, params.multiplier_max);
        }

        // Connectivity repair: nodes near the start component get cheaper,
        // orphaned fragments get more expensive until they dissolve.
        for i in 0..v_n {
            if connected[i] {
                continue;
            }
            let component = collect_component(&owner, grid.nx, grid.ny, starts[i], i as u16);
            let dist = bfs_distances(&traversable, grid.nx, grid.ny, &component);
            let max_d = dist
                .iter()
                .filter(|&&d| d != usize::MAX)
                .max()
                .copied()
                .unwrap_or(0);
            if max_d == 0 {
                continue;
            }
            let delta = params.repair_strength;
            for flat in 0..traversable.len() {
                if !traversable[flat] || fields[i][flat].is_infinite() {
                    continue;
                }
                let factor = match dist[flat] {
                    usize::MAX => 1.0 + delta,
                    d => (1.0 - delta) + 2.0 * delta * d as f64 / max_d as f64,
                };
                fields[i][flat] *= factor;
            }
        }

        // Limit-cycle escape: seeded zero-mean noise on the fields.
        if stale >= params.stale_cycles_before_noise {
            stale = 0;
            for i in 0..v_n {
                let finite: Vec<f64> = fields[i]
                    .iter()
                    .copied()
                    .filter(|v| v.is_finite())
                    .collect();
                let mean = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
                let sigma = 1.0e-4 * mean;
                for (flat, v) in fields[i].iter_mut().enumerate() {
                    if flat == starts[i] || !v.is_finite() {
                        continue;
                    }
                    let n: f64 = rng.sample(StandardNormal);
                    *v = (*v + sigma * n).max(1.0e-6);
                }
            }
        }
    }

    // Cap reached: fall back to the best connected assignment (the cycle-1
    // Voronoi split is always connected, so one exists).
    let (_, owner, counts) = best_connected.expect("initial Voronoi assignment is connected");
    Ok(RegionAssignment {
        nx: grid.nx,
        ny: grid.ny,
        owner,
        counts,
        targets,
        start_cells: starts,
        iterations: max_cycles,
        converged: false,
        trace,
    })
}

fn collect_component(
    owner: &[Option<u16>],
    nx: usize,
    ny: usize,
    start: usize,
    id: u16,
) -> Vec<usize> {
    let mut seen = vec![false; owner.len()];
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    if owner[start] != Some(id) {
        return out;
    }
    seen[start] = true;
    queue.push_back(start);
    while let Some(flat) = queue.pop_front() {
        out.push(flat);
        for nb in neighbors(flat, nx, ny) {
            if !seen[nb] && owner[nb] == Some(id) {
                seen[nb] = true;
                queue.push_back(nb);
            }
        }
    }
    out
}
