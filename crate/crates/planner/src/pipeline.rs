//! End-to-end mission planning.
//!
//! `plan_mission` runs the full chain: geodetic input → tangent frame →
//! placement optimization → node grid → proportional region division →
//! per-region spanning-tree tours → WGS84 waypoint paths → coverage
//! simulation → time/cost model. Every random choice derives from the single
//! mission seed, so identical specs yield bit-identical plans.
//!
//! Waypoints are rounded to 7 decimal degrees (about a centimeter) before
//! the coverage simulation runs, and the simulation consumes the tangent
//! coordinates re-derived from those rounded values. Re-evaluating the
//! emitted paths therefore reproduces the embedded coverage report exactly.

use crate::coverage::{simulate_coverage, CoverageReport, SensorSpec};
use crate::cost::{total_time_and_cost, CostParams, MissionCostReport};
use crate::darp::{divide, DivideParams, RegionAssignment, ShareVector};
use crate::error::{PlanError, Result};
use crate::geo::{ned_to_wgs84, ring_centroid, wgs84_to_ned, BoundingBox, GeoPoint, NedPoint, Polygon};
use crate::grid::{build_grid, node_spacing, LabelMode, NodeGrid, NodeState, Placement};
use crate::placement::{
    eval_placement, optimize_placement, AnnealSchedule, PlacementParams, PlacementSolution,
    ScoreWeights,
};
use crate::stc::{plan_region_path, RegionTour};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Which placement-score terms the optimizer uses. `IdentityOnly` skips
/// optimization entirely and plans on the unshifted, unrotated grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AblationMode {
    IdentityOnly,
    FillOnly,
    FillAndBox,
    Full,
}

impl AblationMode {
    /// Score weights for the optimizer, or `None` when optimization is off.
    fn weights(self, full: ScoreWeights) -> Option<ScoreWeights> {
        match self {
            AblationMode::IdentityOnly => None,
            AblationMode::FillOnly => Some(ScoreWeights {
                fill: 1.0,
                box_fit: 0.0,
                margin: 0.0,
            }),
            AblationMode::FillAndBox => Some(ScoreWeights {
                margin: 0.0,
                ..full
            }),
            AblationMode::Full => Some(full),
        }
    }
}

/// Cost-model knobs exposed to the mission author; the mission speed
/// completes them into [`CostParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostTuning {
    pub battery_endurance_min: f64,
    pub turn_delay_coeff: f64,
    pub turn_delay_shape: f64,
    pub cost_rate_per_min: f64,
}

impl Default for CostTuning {
    fn default() -> Self {
        let p = CostParams::default();
        Self {
            battery_endurance_min: p.battery_endurance_min,
            turn_delay_coeff: p.turn_delay_coeff,
            turn_delay_shape: p.turn_delay_shape,
            cost_rate_per_min: p.cost_rate_per_min,
        }
    }
}

impl CostTuning {
    pub fn to_params(self, speed_mps: f64) -> CostParams {
        CostParams {
            speed_mps,
            battery_endurance_min: self.battery_endurance_min,
            turn_delay_coeff: self.turn_delay_coeff,
            turn_delay_shape: self.turn_delay_shape,
            cost_rate_per_min: self.cost_rate_per_min,
        }
    }
}

/// Complete description of one mission to plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSpec {
    /// Survey region outer ring, geodetic vertices.
    pub roi: Vec<GeoPoint>,
    /// No-fly zones, as rings strictly inside the region.
    pub obstacles: Vec<Vec<GeoPoint>>,
    pub uav_count: usize,
    /// Launch positions; `None` draws them seeded-uniform over free nodes.
    pub initial_positions: Option<Vec<GeoPoint>>,
    /// Workload shares; `None` means equal shares.
    pub shares: Option<Vec<f64>>,
    pub sensor: Option<SensorSpec>,
    /// Direct sweep-spacing override. When both this and a sensor are given
    /// they must agree to within a micrometer.
    pub scanning_density_m: Option<f64>,
    pub mode: LabelMode,
    pub speed_mps: f64,
    /// Operational passthrough; planning ignores it.
    pub gimbal_pitch_deg: f64,
    pub placement_weights: ScoreWeights,
    pub placement_schedule: AnnealSchedule,
    pub cost: CostTuning,
    pub ablation: AblationMode,
    pub seed: u64,
}

impl MissionSpec {
    /// A spec with library defaults for everything beyond geometry, fleet
    /// size, and spacing.
    pub fn new(roi: Vec<GeoPoint>, uav_count: usize, scanning_density_m: f64) -> Self {
        Self {
            roi,
            obstacles: Vec::new(),
            uav_count,
            initial_positions: None,
            shares: None,
            sensor: None,
            scanning_density_m: Some(scanning_density_m),
            mode: LabelMode::BetterCoverage,
            speed_mps: 3.0,
            gimbal_pitch_deg: -90.0,
            placement_weights: ScoreWeights::default(),
            placement_schedule: AnnealSchedule::default(),
            cost: CostTuning::default(),
            ablation: AblationMode::Full,
            seed: 0,
        }
    }

    /// Effective sweep spacing, from the override or the sensor.
    pub fn resolved_scanning_density(&self) -> Result<f64> {
        match (self.scanning_density_m, &self.sensor) {
            (Some(ds), _) => Ok(ds),
            (None, Some(s)) => Ok(s.scanning_density_m()),
            (None, None) => Err(PlanError::InvalidInput(
                "mission needs a sensor or an explicit scanning density".into(),
            )),
        }
    }

    /// Footprint width the coverage simulation sweeps. Without a sensor the
    /// footprint is assumed to equal the sweep spacing (adjacent sweeps
    /// touch without overlapping).
    pub fn footprint_width_m(&self) -> Result<f64> {
        match &self.sensor {
            Some(s) => Ok(s.footprint_width_m()),
            None => self.resolved_scanning_density(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.roi.len() < 3 {
            return Err(PlanError::InvalidInput(format!(
                "region ring has {} vertices; need at least 3",
                self.roi.len()
            )));
        }
        if self.uav_count == 0 {
            return Err(PlanError::InvalidInput("mission needs at least one UAV".into()));
        }
        if self.uav_count >= u16::MAX as usize {
            return Err(PlanError::InvalidInput(format!(
                "{} UAVs exceeds the supported fleet size",
                self.uav_count
            )));
        }
        if let Some(positions) = &self.initial_positions {
            if positions.len() != self.uav_count {
                return Err(PlanError::InvalidInput(format!(
                    "{} initial positions for {} UAVs",
                    positions.len(),
                    self.uav_count
                )));
            }
        }
        if let Some(shares) = &self.shares {
            if shares.len() != self.uav_count {
                return Err(PlanError::InvalidInput(format!(
                    "{} shares for {} UAVs",
                    shares.len(),
                    self.uav_count
                )));
            }
            ShareVector::new(shares.clone())?;
        }
        if let Some(sensor) = &self.sensor {
            sensor.validate()?;
            if let Some(ds) = self.scanning_density_m {
                let derived = sensor.scanning_density_m();
                if (ds - derived).abs() > 1.0e-6 {
                    return Err(PlanError::InvalidInput(format!(
                        "scanning density {ds} disagrees with the sensor-derived {derived}"
                    )));
                }
            }
        }
        let ds = self.resolved_scanning_density()?;
        if !(ds.is_finite() && ds > 0.0) {
            return Err(PlanError::InvalidInput(format!(
                "scanning density must be positive, got {ds}"
            )));
        }
        if !(self.speed_mps.is_finite() && self.speed_mps > 0.0) {
            return Err(PlanError::InvalidInput(format!(
                "speed must be positive, got {}",
                self.speed_mps
            )));
        }
        if !self.gimbal_pitch_deg.is_finite() || self.gimbal_pitch_deg.abs() > 180.0 {
            return Err(PlanError::InvalidInput(format!(
                "gimbal pitch {} out of range",
                self.gimbal_pitch_deg
            )));
        }
        self.placement_weights.validate()?;
        self.cost.to_params(self.speed_mps).validate()?;
        Ok(())
    }
}

/// One UAV's planned path in every frame of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveragePath {
    /// Grid-frame tour (sub-cells, turn counts, exact length).
    pub tour: RegionTour,
    /// Grid nodes this UAV owns, sorted by flat index.
    pub region_cells: Vec<usize>,
    /// Flat index of the node the UAV starts from.
    pub start_cell: usize,
    /// Waypoints in geodetic coordinates, rounded to 7 decimals.
    pub waypoints_wgs84: Vec<GeoPoint>,
    /// Tangent-frame waypoints re-derived from the rounded geodetic ones;
    /// this is the geometry the coverage report describes.
    pub waypoints_ned: Vec<NedPoint>,
}

/// Where the plan's numbers came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    /// Tangent-frame anchor (area centroid of the region ring).
    pub reference: GeoPoint,
    pub scanning_density_m: f64,
    pub node_spacing_m: f64,
    pub mode: LabelMode,
    pub ablation: AblationMode,
}

/// Output of `plan_mission`.
#[derive(Debug, Clone)]
pub struct MissionPlan {
    pub solution: PlacementSolution,
    /// Node grid at the chosen placement, with UAV nodes labeled.
    pub grid: NodeGrid,
    pub assignment: RegionAssignment,
    pub paths: Vec<CoveragePath>,
    pub coverage: CoverageReport,
    pub cost: MissionCostReport,
    pub provenance: Provenance,
    /// Survey region in the tangent frame.
    pub roi_ned: Polygon,
}

fn round7(v: f64) -> f64 {
    (v * 1.0e7).round() / 1.0e7
}

/// Builds the tangent-frame region polygon and its anchor from the spec.
fn region_in_tangent_frame(spec: &MissionSpec) -> Result<(GeoPoint, Polygon)> {
    let reference = ring_centroid(&spec.roi)?;
    let outer = spec
        .roi
        .iter()
        .map(|&p| wgs84_to_ned(p, reference))
        .collect::<Result<Vec<_>>>()?;
    let holes = spec
        .obstacles
        .iter()
        .map(|ring| ring.iter().map(|&p| wgs84_to_ned(p, reference)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok((reference, Polygon::new(outer, holes)?))
}

/// Draws distinct free nodes for the fleet, seeded; returns tangent-frame
/// positions at the chosen node centers.
fn draw_auto_positions(grid: &NodeGrid, uav_count: usize, seed: u64) -> Result<Vec<NedPoint>> {
    let free: Vec<usize> = (0..grid.states.len())
        .filter(|&i| grid.states[i] != NodeState::Obstacle)
        .collect();
    if free.len() < uav_count {
        return Err(PlanError::FleetConfiguration(format!(
            "{} free nodes cannot host {} UAVs",
            free.len(),
            uav_count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, free.len(), uav_count);
    Ok(picks
        .iter()
        .map(|k| {
            let (ix, iy) = grid.coords(free[k]);
            grid.placement.to_tangent(grid.node_center(ix, iy))
        })
        .collect())
}

/// Plans the complete mission. See the module docs for the stage order.
pub fn plan_mission(spec: &MissionSpec) -> Result<MissionPlan> {
    spec.validate()?;
    let d_s = spec.resolved_scanning_density()?;
    let (reference, roi_ned) = region_in_tangent_frame(spec)?;

    // Stage 1: place the grid over the region.
    let solution = match spec.ablation.weights(spec.placement_weights) {
        None => {
            let grid = build_grid(&roi_ned, Placement::identity(), d_s, spec.mode, &[])?;
            let score = eval_placement(
                &roi_ned,
                Placement::identity(),
                d_s,
                spec.mode,
                &spec.placement_weights,
            )?;
            PlacementSolution {
                placement: Placement::identity(),
                score,
                grid,
                evaluations: 1,
                trace: Vec::new(),
            }
        }
        Some(weights) => {
            let params = PlacementParams {
                weights,
                schedule: spec.placement_schedule,
                seed: spec.seed,
            };
            optimize_placement(&roi_ned, d_s, spec.mode, &params)?
        }
    };

    // Stage 2: put the fleet on the grid.
    let tangent_positions = match &spec.initial_positions {
        Some(geodetic) => geodetic
            .iter()
            .map(|&p| wgs84_to_ned(p, reference))
            .collect::<Result<Vec<_>>>()?,
        None => draw_auto_positions(&solution.grid, spec.uav_count, spec.seed.wrapping_add(2))?,
    };
    let grid = solution.grid.with_uavs(&tangent_positions)?;

    // Stage 3: divide the free nodes among the fleet.
    let shares = match &spec.shares {
        Some(s) => ShareVector::new(s.clone())?,
        None => ShareVector::equal(spec.uav_count)?,
    };
    let divide_params = DivideParams {
        seed: spec.seed.wrapping_add(1),
        ..DivideParams::default()
    };
    let assignment = divide(&grid, &shares, &divide_params)?;

    // Stage 4: one spanning-tree tour per region, then back to WGS84.
    let mut paths = Vec::with_capacity(spec.uav_count);
    for uav_id in 0..spec.uav_count {
        let region_cells: Vec<usize> = assignment
            .owner
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Some(uav_id as u16))
            .map(|(i, _)| i)
            .collect();
        let start_cell = assignment.start_cells[uav_id];
        let start_in_grid = grid.placement.to_grid(tangent_positions[uav_id]);
        let tour = plan_region_path(&grid, &region_cells, start_cell, start_in_grid, uav_id)?;

        let mut waypoints_wgs84 = Vec::with_capacity(tour.waypoints.len());
        let mut waypoints_ned = Vec::with_capacity(tour.waypoints.len());
        for &w in &tour.waypoints {
            let tangent = grid.placement.to_tangent(w);
            let exact = ned_to_wgs84(tangent, reference)?;
            let rounded = GeoPoint::new(round7(exact.lat), round7(exact.lon))?;
            waypoints_ned.push(wgs84_to_ned(rounded, reference)?);
            waypoints_wgs84.push(rounded);
        }
        paths.push(CoveragePath {
            tour,
            region_cells,
            start_cell,
            waypoints_wgs84,
            waypoints_ned,
        });
    }

    // Stage 5: simulate coverage of the as-flown geometry and cost it.
    let ned_paths: Vec<Vec<NedPoint>> = paths.iter().map(|p| p.waypoints_ned.clone()).collect();
    let coverage = simulate_coverage(&roi_ned, &ned_paths, spec.footprint_width_m()?, d_s)?;
    let legs: Vec<(f64, usize)> = paths
        .iter()
        .map(|p| (p.tour.length_m, p.tour.turns))
        .collect();
    let cost = total_time_and_cost(&legs, roi_ned.area(), &spec.cost.to_params(spec.speed_mps))?;

    Ok(MissionPlan {
        grid,
        assignment,
        paths,
        coverage,
        cost,
        provenance: Provenance {
            seed: spec.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            reference,
            scanning_density_m: d_s,
            node_spacing_m: node_spacing(d_s),
            mode: spec.mode,
            ablation: spec.ablation,
        },
        roi_ned,
        solution,
    })
}

/// Re-runs the coverage simulation for externally supplied geodetic paths
/// against the spec's region and sensor. Rejects paths that clearly belong
/// to a different region (no waypoint anywhere near the survey area).
pub fn evaluate_paths(spec: &MissionSpec, paths: &[Vec<GeoPoint>]) -> Result<CoverageReport> {
    spec.validate()?;
    let d_s = spec.resolved_scanning_density()?;
    let (reference, roi_ned) = region_in_tangent_frame(spec)?;
    let ned_paths: Vec<Vec<NedPoint>> = paths
        .iter()
        .map(|path| path.iter().map(|&p| wgs84_to_ned(p, reference)).collect())
        .collect::<Result<_>>()?;
    let total_waypoints: usize = ned_paths.iter().map(|p| p.len()).sum();
    if total_waypoints > 0 {
        let near = BoundingBox::of_points(roi_ned.outer()).inflate(10.0 * d_s);
        let any_near = ned_paths
            .iter()
            .flatten()
            .any(|p| near.contains_point(*p));
        if !any_near {
            return Err(PlanError::InvalidInput(
                "no waypoint lies anywhere near the survey region; mismatched mission file?"
                    .into(),
            ));
        }
    }
    simulate_coverage(&roi_ned, &ned_paths, spec.footprint_width_m()?, d_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Geodetic rectangle of roughly `width x height` meters centered at a
    /// mid-latitude anchor.
    fn geo_rect(width_m: f64, height_m: f64) -> Vec<GeoPoint> {
        let anchor = GeoPoint::new(45.0, 7.0).unwrap();
        let m_per_deg_lat = 111_132.0;
        let m_per_deg_lon = 111_320.0 * 45.0f64.to_radians().cos();
        let dlat = height_m / 2.0 / m_per_deg_lat;
        let dlon = width_m / 2.0 / m_per_deg_lon;
        vec![
            GeoPoint::new(anchor.lat - dlat, anchor.lon - dlon).unwrap(),
            GeoPoint::new(anchor.lat - dlat, anchor.lon + dlon).unwrap(),
            GeoPoint::new(anchor.lat + dlat, anchor.lon + dlon).unwrap(),
            GeoPoint::new(anchor.lat + dlat, anchor.lon - dlon).unwrap(),
        ]
    }

    fn assert_plans_equal(a: &MissionPlan, b: &MissionPlan) {
        assert_eq!(a.paths, b.paths);
        assert_eq!(a.coverage, b.coverage);
        assert_eq!(a.cost, b.cost);
        assert_eq!(a.assignment.counts, b.assignment.counts);
        assert_eq!(a.solution.placement, b.solution.placement);
        assert_eq!(a.provenance, b.provenance);
    }

    #[test]
    fn single_uav_covers_an_obstacle_free_rectangle() {
        let spec = MissionSpec::new(geo_rect(400.0, 300.0), 1, 20.0);
        let plan = plan_mission(&spec).unwrap();
        assert_eq!(plan.paths.len(), 1);
        let path = &plan.paths[0];
        // The single region is the whole free space.
        assert_eq!(path.region_cells.len(), plan.grid.free_count());
        // Closed geodetic path.
        assert_eq!(path.waypoints_wgs84.first(), path.waypoints_wgs84.last());
        assert!(plan.coverage.poc_pct >= 95.0, "PoC {}", plan.coverage.poc_pct);
    }

    #[test]
    fn fleet_paths_are_disjoint_and_share_sized() {
        let mut spec = MissionSpec::new(geo_rect(600.0, 500.0), 3, 20.0);
        spec.shares = Some(vec![0.15, 0.40, 0.45]);
        let plan = plan_mission(&spec).unwrap();
        assert_eq!(plan.paths.len(), 3);

        let mut seen = std::collections::BTreeSet::new();
        let mut total = 0usize;
        for path in &plan.paths {
            for &c in &path.region_cells {
                assert!(seen.insert(c), "regions overlap at node {c}");
            }
            total += path.region_cells.len();
            // Tour stays inside the region's own sub-cells.
            for &(u, v) in &path.tour.subcells {
                let flat = plan.grid.index((u / 2) as usize, (v / 2) as usize);
                assert!(path.region_cells.contains(&flat));
            }
        }
        assert_eq!(total, plan.grid.free_count());

        let l = plan.assignment.total_free() as f64;
        let tol = (0.005 * l).ceil().max(1.0) as usize;
        for (i, share) in [0.15, 0.40, 0.45].iter().enumerate() {
            let target = share * l;
            let got = plan.assignment.counts[i] as f64;
            assert!(
                (got - target).abs() <= tol as f64,
                "region {i}: {got} vs target {target}"
            );
        }
    }

    #[test]
    fn fleet_length_conservation() {
        let spec = MissionSpec::new(geo_rect(500.0, 400.0), 4, 20.0);
        let plan = plan_mission(&spec).unwrap();
        let total: f64 = plan.paths.iter().map(|p| p.tour.length_m).sum();
        let expected = 4.0 * plan.grid.free_count() as f64 * 20.0;
        assert_abs_diff_eq!(total, expected, epsilon = 1.0e-9);
    }

    #[test]
    fn identical_seed_gives_identical_plans() {
        let mut spec = MissionSpec::new(geo_rect(400.0, 300.0), 2, 20.0);
        spec.seed = 9;
        let a = plan_mission(&spec).unwrap();
        let b = plan_mission(&spec).unwrap();
        assert_plans_equal(&a, &b);
    }

    #[test]
    fn different_seeds_move_auto_positions() {
        let mut spec = MissionSpec::new(geo_rect(400.0, 300.0), 2, 20.0);
        spec.seed = 1;
        let a = plan_mission(&spec).unwrap();
        spec.seed = 2;
        let b = plan_mission(&spec).unwrap();
        assert_ne!(
            a.grid.uav_cells, b.grid.uav_cells,
            "auto positions should depend on the seed"
        );
    }

    #[test]
    fn reevaluating_fresh_paths_reproduces_the_embedded_report() {
        let mut spec = MissionSpec::new(geo_rect(400.0, 300.0), 2, 20.0);
        spec.seed = 4;
        let plan = plan_mission(&spec).unwrap();
        let wgs_paths: Vec<Vec<GeoPoint>> =
            plan.paths.iter().map(|p| p.waypoints_wgs84.clone()).collect();
        let report = evaluate_paths(&spec, &wgs_paths).unwrap();
        assert_eq!(report, plan.coverage);
    }

    #[test]
    fn wider_footprint_never_reduces_coverage() {
        // Two sensors with the same sweep spacing but different overlap
        // fractions: the high-overlap one sweeps a wider footprint.
        let narrow = SensorSpec {
            altitude_m: 20.0,
            hfov_deg: 90.0,
            h_res_px: 4000,
            overlap: 0.0,
        };
        let wide = SensorSpec {
            altitude_m: 40.0,
            hfov_deg: 90.0,
            h_res_px: 4000,
            overlap: 1.0,
        };
        let ds = narrow.scanning_density_m();
        assert_abs_diff_eq!(ds, wide.scanning_density_m(), epsilon = 1.0e-9);

        let mut spec = MissionSpec::new(geo_rect(400.0, 300.0), 1, ds);
        spec.sensor = Some(narrow);
        let plan = plan_mission(&spec).unwrap();
        let wgs_paths: Vec<Vec<GeoPoint>> =
            plan.paths.iter().map(|p| p.waypoints_wgs84.clone()).collect();
        let narrow_report = evaluate_paths(&spec, &wgs_paths).unwrap();
        spec.sensor = Some(wide);
        let wide_report = evaluate_paths(&spec, &wgs_paths).unwrap();
        assert!(
            wide_report.poc_pct >= narrow_report.poc_pct - 1.0e-9,
            "wide {} vs narrow {}",
            wide_report.poc_pct,
            narrow_report.poc_pct
        );
    }

    #[test]
    fn strict_mode_keeps_waypoints_inside_the_region() {
        let mut spec = MissionSpec::new(geo_rect(500.0, 400.0), 2, 20.0);
        spec.mode = LabelMode::StrictInPoly;
        let plan = plan_mission(&spec).unwrap();
        for path in &plan.paths {
            for w in &path.tour.waypoints {
                let tangent = plan.grid.placement.to_tangent(*w);
                assert!(
                    plan.roi_ned.contains(tangent),
                    "waypoint {tangent:?} outside the region"
                );
            }
        }
    }

    #[test]
    fn explicit_positions_anchor_the_tours() {
        let roi = geo_rect(400.0, 300.0);
        // Launch near the south-west corner.
        let sw = GeoPoint::new(roi[0].lat + 1.0e-5, roi[0].lon + 1.0e-5).unwrap();
        let mut spec = MissionSpec::new(roi, 1, 20.0);
        spec.initial_positions = Some(vec![sw]);
        let plan = plan_mission(&spec).unwrap();
        let (flat, _) = plan.grid.uav_cells[0];
        let (ix, iy) = plan.grid.coords(flat);
        // The start node is in the south-west quadrant of the grid.
        assert!(ix < plan.grid.nx / 2 && iy < plan.grid.ny / 2);
        assert_eq!(plan.paths[0].start_cell, flat);
    }

    #[test]
    fn arity_mismatches_are_rejected() {
        let roi = geo_rect(400.0, 300.0);
        let mut spec = MissionSpec::new(roi.clone(), 2, 20.0);
        spec.initial_positions = Some(vec![GeoPoint::new(45.0, 7.0).unwrap()]);
        assert!(matches!(
            plan_mission(&spec),
            Err(PlanError::InvalidInput(_))
        ));

        let mut spec = MissionSpec::new(roi.clone(), 2, 20.0);
        spec.shares = Some(vec![0.5, 0.3, 0.2]);
        assert!(matches!(
            plan_mission(&spec),
            Err(PlanError::InvalidInput(_))
        ));

        let mut spec = MissionSpec::new(roi, 1, 20.0);
        spec.sensor = Some(SensorSpec {
            altitude_m: 20.0,
            hfov_deg: 90.0,
            h_res_px: 4000,
            overlap: 0.5,
        });
        // Sensor-derived spacing is 30 m, not 20 m.
        assert!(matches!(
            plan_mission(&spec),
            Err(PlanError::InvalidInput(_))
        ));
    }

    #[test]
    fn foreign_paths_are_rejected_as_mismatched() {
        let spec = MissionSpec::new(geo_rect(400.0, 300.0), 1, 20.0);
        // A path on another continent.
        let far = vec![vec![
            GeoPoint::new(-33.9, 18.4).unwrap(),
            GeoPoint::new(-33.9, 18.5).unwrap(),
        ]];
        assert!(matches!(
            evaluate_paths(&spec, &far),
            Err(PlanError::InvalidInput(_))
        ));
        // No paths at all is fine: zero coverage.
        let report = evaluate_paths(&spec, &[]).unwrap();
        assert_eq!(report.poc_pct, 0.0);
    }

    #[test]
    fn ablation_modes_change_the_search_but_all_plan() {
        let mut spec = MissionSpec::new(geo_rect(300.0, 200.0), 1, 20.0);
        spec.seed = 3;
        for ablation in [
            AblationMode::IdentityOnly,
            AblationMode::FillOnly,
            AblationMode::FillAndBox,
            AblationMode::Full,
        ] {
            spec.ablation = ablation;
            let plan = plan_mission(&spec).unwrap();
            assert!(!plan.paths.is_empty(), "{ablation:?}");
            if ablation == AblationMode::IdentityOnly {
                assert_eq!(plan.solution.placement, Placement::identity());
                assert_eq!(plan.solution.evaluations, 1);
            } else {
                assert!(plan.solution.evaluations > 1);
            }
        }
    }
}
