//! Node-grid discretization of a placed region.
//!
//! The planner covers a region with a square lattice of *nodes*. Each node
//! owns a `d_n x d_n` cell split into four `d_s x d_s` sub-cells; coverage
//! tours later visit sub-cell centers, so `d_s` is the scanning density and
//! `d_n = 2 d_s`. The lattice is anchored to absolute multiples of `d_n` in
//! the tangent frame and the *polygon* is shifted/rotated over it, which is
//! how the placement optimizer changes what the grid captures without ever
//! moving the grid itself.

use crate::error::{PlanError, Result};
use crate::geo::{place_point, BoundingBox, NedPoint, Polygon};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Upper bound on lattice size; a grid bigger than this means the scanning
/// density is far too fine for the region.
const MAX_GRID_NODES: usize = 16_000_000;

/// Node pitch for a given scanning density.
pub fn node_spacing(d_s: f64) -> f64 {
    2.0 * d_s
}

/// Grid placement: how far the region was shifted and rotated relative to the
/// fixed lattice. The identity placement leaves the region untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub shift_x: f64,
    pub shift_y: f64,
    pub rotation_deg: f64,
}

impl Placement {
    pub fn identity() -> Self {
        Self {
            shift_x: 0.0,
            shift_y: 0.0,
            rotation_deg: 0.0,
        }
    }

    /// Maps a tangent-frame point into the grid frame.
    pub fn to_grid(&self, p: NedPoint) -> NedPoint {
        place_point(
            p,
            self.shift_x,
            self.shift_y,
            self.rotation_deg,
            NedPoint::new(0.0, 0.0),
        )
    }

    /// Maps a grid-frame point back to the tangent frame.
    pub fn to_tangent(&self, p: NedPoint) -> NedPoint {
        crate::geo::unplace_point(
            p,
            self.shift_x,
            self.shift_y,
            self.rotation_deg,
            NedPoint::new(0.0, 0.0),
        )
    }
}

/// Node classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeState {
    /// Outside the region, inside a no-fly zone, or too close to either
    /// boundary for the active labeling mode.
    Obstacle,
    /// Usable free space.
    FreeSpace,
    /// Free space holding a UAV start position.
    Uav,
}

/// Node labeling policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelMode {
    /// A node is free only if its center and all four sub-cell centers lie
    /// inside the region: keeps every waypoint strictly inside (geo-fencing).
    StrictInPoly,
    /// A node is free if its center lies inside: maximizes captured area at
    /// the price of waypoints that may poke past the boundary.
    BetterCoverage,
}

/// The grid-aligned box the lattice spans: the placed polygon's bounding box
/// snapped outward to whole multiples of `d_n`, plus a one-cell margin ring,
/// so boundary nodes always have a complete neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentedBox {
    pub bounds: BoundingBox,
    pub spacing: f64,
}

impl AugmentedBox {
    pub fn around(standard: &BoundingBox, d_n: f64) -> Result<Self> {
        if !(d_n > 0.0) || !d_n.is_finite() {
            return Err(PlanError::InvalidInput(format!(
                "node spacing {d_n} must be positive and finite"
            )));
        }
        let bounds = BoundingBox {
            x_min: (standard.x_min / d_n).floor() * d_n - d_n,
            x_max: (standard.x_max / d_n).ceil() * d_n + d_n,
            y_min: (standard.y_min / d_n).floor() * d_n - d_n,
            y_max: (standard.y_max / d_n).ceil() * d_n + d_n,
        };
        Ok(Self {
            bounds,
            spacing: d_n,
        })
    }

    pub fn cols(&self) -> usize {
        ((self.bounds.x_max - self.bounds.x_min) / self.spacing).round() as usize
    }

    pub fn rows(&self) -> usize {
        ((self.bounds.y_max - self.bounds.y_min) / self.spacing).round() as usize
    }
}

/// A labeled node lattice for one placement of the region.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeGrid {
    /// Lattice columns/rows over the augmented box.
    pub nx: usize,
    pub ny: usize,
    /// Columns/rows of the standard (pre-augmentation) bounding box,
    /// `floor(width / d_n)` per axis.
    pub standard_dims: (usize, usize),
    /// Sub-cell pitch `d_s`.
    pub d_s: f64,
    pub augmented: AugmentedBox,
    pub placement: Placement,
    pub mode: LabelMode,
    /// Row-major, row 0 at the south edge.
    pub states: Vec<NodeState>,
    /// `(flat node index, uav id)` pairs, one per UAV, sorted by uav id.
    pub uav_cells: Vec<(usize, usize)>,
}

impl NodeGrid {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords(&self, flat: usize) -> (usize, usize) {
        (flat % self.nx, flat / self.nx)
    }

    pub fn state(&self, ix: usize, iy: usize) -> NodeState {
        self.states[self.index(ix, iy)]
    }

    /// Node center in the grid frame.
    pub fn node_center(&self, ix: usize, iy: usize) -> NedPoint {
        let d_n = self.augmented.spacing;
        NedPoint::new(
            self.augmented.bounds.x_min + (ix as f64 + 0.5) * d_n,
            self.augmented.bounds.y_min + (iy as f64 + 0.5) * d_n,
        )
    }

    /// Sub-cell center in the grid frame; sub-cell coordinates are the node
    /// coordinates doubled, plus 0/1 per axis.
    pub fn subcell_center(&self, sx: i64, sy: i64) -> NedPoint {
        NedPoint::new(
            self.augmented.bounds.x_min + (sx as f64 + 0.5) * self.d_s,
            self.augmented.bounds.y_min + (sy as f64 + 0.5) * self.d_s,
        )
    }

    /// Nodes labeled either free or UAV (both are traversable).
    pub fn free_count(&self) -> usize {
        self.states
            .iter()
            .filter(|s| !matches!(s, NodeState::Obstacle))
            .count()
    }

    pub fn is_traversable(&self, ix: usize, iy: usize) -> bool {
        !matches!(self.state(ix, iy), NodeState::Obstacle)
    }

    /// Re-labels the nearest free node to each UAV position (given in the
    /// tangent frame) as [`NodeState::Uav`]. Each UAV maps to its nearest
    /// free node independently (ties pick the lowest flat index); two UAVs
    /// resolving to the same node is a fleet-configuration error rather than
    /// something silently repaired.
    pub fn with_uavs(&self, positions: &[NedPoint]) -> Result<NodeGrid> {
        let mut grid = self.clone();
        grid.uav_cells.clear();
        for s in grid.states.iter_mut() {
            if *s == NodeState::Uav {
                *s = NodeState::FreeSpace;
            }
        }
        for (uav_id, pos) in positions.iter().enumerate() {
            let in_grid = grid.placement.to_grid(*pos);
            let mut best: Option<(f64, usize)> = None;
            for flat in 0..grid.states.len() {
                if grid.states[flat] == NodeState::Obstacle {
                    continue;
                }
                let (ix, iy) = grid.coords(flat);
                let d = grid.node_center(ix, iy).distance(&in_grid);
                let better = match best {
                    None => true,
                    Some((bd, _)) => d < bd - 1.0e-12,
                };
                if better {
                    best = Some((d, flat));
                }
            }
            let (_, flat) = best.ok_or_else(|| {
                PlanError::FleetConfiguration(format!("no free node to host UAV {uav_id}"))
            })?;
            if grid.states[flat] == NodeState::Uav {
                return Err(PlanError::FleetConfiguration(format!(
                    "UAVs {uav_id} and {} are nearest to the same grid node",
                    grid.uav_cells
                        .iter()
                        .find(|(f, _)| *f == flat)
                        .map(|(_, id)| *id)
                        .unwrap_or(usize::MAX)
                )));
            }
            grid.states[flat] = NodeState::Uav;
            grid.uav_cells.push((flat, uav_id));
        }
        Ok(grid)
    }

    /// Writes the grid as a binary portable graymap for visual inspection:
    /// obstacles black, free space mid-gray, UAV nodes white. Rows are
    /// emitted north-to-south so the image reads like a map.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.nx, self.ny)?;
        for iy in (0..self.ny).rev() {
            let row: Vec<u8> = (0..self.nx)
                .map(|ix| match self.state(ix, iy) {
                    NodeState::Obstacle => 0u8,
                    NodeState::FreeSpace => 128,
                    NodeState::Uav => 255,
                })
                .collect();
            w.write_all(&row)?;
        }
        Ok(())
    }
}

/// Labels the node lattice for one placement of the region.
///
/// `uav_positions` are tangent-frame coordinates; pass an empty slice to get
/// a grid without UAV markers (the placement optimizer does this).
pub fn build_grid(
    roi: &Polygon,
    placement: Placement,
    d_s: f64,
    mode: LabelMode,
    uav_positions: &[NedPoint],
) -> Result<NodeGrid> {
    if !(d_s > 0.0) || !d_s.is_finite() {
        return Err(PlanError::InvalidInput(format!(
            "scanning density {d_s} must be positive and finite"
        )));
    }
    let d_n = node_spacing(d_s);
    if placement.shift_x > d_n || placement.shift_y > d_n {
        return Err(PlanError::InvalidInput(format!(
            "placement shift ({}, {}) exceeds one node spacing {d_n}",
            placement.shift_x, placement.shift_y
        )));
    }
    let placed = roi.placed(
        placement.shift_x,
        placement.shift_y,
        placement.rotation_deg,
        NedPoint::new(0.0, 0.0),
    )?;
    let standard = placed.bounding_box();
    let augmented = AugmentedBox::around(&standard, d_n)?;
    let (nx, ny) = (augmented.cols(), augmented.rows());
    if nx * ny > MAX_GRID_NODES {
        return Err(PlanError::InvalidInput(format!(
            "grid of {nx} x {ny} nodes exceeds the supported size; increase the scanning density"
        )));
    }
    let standard_dims = (
        (standard.width() / d_n).floor() as usize,
        (standard.height() / d_n).floor() as usize,
    );

    let mut grid = NodeGrid {
        nx,
        ny,
        standard_dims,
        d_s,
        augmented,
        placement,
        mode,
        states: vec![NodeState::Obstacle; nx * ny],
        uav_cells: Vec::new(),
    };
    let half = d_s / 2.0;
    for iy in 0..ny {
        for ix in 0..nx {
            let c = grid.node_center(ix, iy);
            let free = match mode {
                LabelMode::BetterCoverage => placed.contains(c),
                LabelMode::StrictInPoly => {
                    // Every point the tour will visit (the four sub-cell
                    // centers) plus the node center itself must be inside;
                    // the center check also keeps the strict free set a
                    // subset of the relaxed one on concave boundaries.
                    placed.contains(c)
                        && placed.contains(NedPoint::new(c.x - half, c.y - half))
                        && placed.contains(NedPoint::new(c.x + half, c.y - half))
                        && placed.contains(NedPoint::new(c.x - half, c.y + half))
                        && placed.contains(NedPoint::new(c.x + half, c.y + half))
                }
            };
            if free {
                let flat = grid.index(ix, iy);
                grid.states[flat] = NodeState::FreeSpace;
            }
        }
    }
    if grid.free_count() == 0 {
        return Err(PlanError::InfeasibleDiscretization(format!(
            "no free nodes at scanning density {d_s} for this placement"
        )));
    }
    if !uav_positions.is_empty() {
        grid = grid.with_uavs(uav_positions)?;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Polygon;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square100() -> Polygon {
        Polygon::rectangle(0.0, 0.0, 100.0, 100.0).unwrap()
    }

    #[test]
    fn augmented_box_snaps_and_adds_margin() {
        let bb = square100().bounding_box();
        let aug = AugmentedBox::around(&bb, 20.0).unwrap();
        assert_relative_eq!(aug.bounds.x_min, -20.0);
        assert_relative_eq!(aug.bounds.x_max, 120.0);
        assert_relative_eq!(aug.bounds.y_min, -20.0);
        assert_relative_eq!(aug.bounds.y_max, 120.0);
        assert_eq!((aug.cols(), aug.rows()), (7, 7));
        // The margin is at least one full cell on every side.
        assert!(bb.x_min - aug.bounds.x_min >= 20.0);
        assert!(aug.bounds.x_max - bb.x_max >= 20.0);
    }

    #[test]
    fn augmented_box_margin_holds_for_unaligned_boxes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x0 = rng.gen::<f64>() * 50.0 - 25.0;
            let y0 = rng.gen::<f64>() * 50.0 - 25.0;
            let bb = BoundingBox {
                x_min: x0,
                x_max: x0 + rng.gen::<f64>() * 300.0 + 1.0,
                y_min: y0,
                y_max: y0 + rng.gen::<f64>() * 300.0 + 1.0,
            };
            let d_n = rng.gen::<f64>() * 30.0 + 5.0;
            let aug = AugmentedBox::around(&bb, d_n).unwrap();
            assert!(aug.bounds.contains(&bb));
            for side in [
                bb.x_min - aug.bounds.x_min,
                aug.bounds.x_max - bb.x_max,
                bb.y_min - aug.bounds.y_min,
                aug.bounds.y_max - bb.y_max,
            ] {
                assert!(side >= d_n - 1.0e-9 && side < 2.0 * d_n + 1.0e-9);
            }
            // Sides are whole multiples of the spacing.
            let w = (aug.bounds.x_max - aug.bounds.x_min) / d_n;
            assert!((w - w.round()).abs() < 1.0e-9);
        }
    }

    /// Brute-force rasterizer oracle: counts lattice points inside the placed
    /// polygon by direct per-point membership, reusing nothing from
    /// `build_grid` except the membership primitive.
    fn brute_force_free_count(
        roi: &Polygon,
        placement: Placement,
        d_s: f64,
        mode: LabelMode,
    ) -> usize {
        let placed = roi
            .placed(
                placement.shift_x,
                placement.shift_y,
                placement.rotation_deg,
                NedPoint::new(0.0, 0.0),
            )
            .unwrap();
        let d_n = 2.0 * d_s;
        let bb = placed.bounding_box();
        // Cover a generous range of absolute lattice cells.
        let i0 = (bb.x_min / d_n).floor() as i64 - 2;
        let i1 = (bb.x_max / d_n).ceil() as i64 + 2;
        let j0 = (bb.y_min / d_n).floor() as i64 - 2;
        let j1 = (bb.y_max / d_n).ceil() as i64 + 2;
        let mut count = 0;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = NedPoint::new((i as f64 + 0.5) * d_n, (j as f64 + 0.5) * d_n);
                let free = match mode {
                    LabelMode::BetterCoverage => placed.contains(c),
                    LabelMode::StrictInPoly => {
                        let h = d_s / 2.0;
                        placed.contains(c)
                            && placed.contains(NedPoint::new(c.x - h, c.y - h))
                            && placed.contains(NedPoint::new(c.x + h, c.y - h))
                            && placed.contains(NedPoint::new(c.x - h, c.y + h))
                            && placed.contains(NedPoint::new(c.x + h, c.y + h))
                    }
                };
                if free {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn aligned_square_captures_full_capacity() {
        let grid = build_grid(
            &square100(),
            Placement::identity(),
            10.0,
            LabelMode::BetterCoverage,
            &[],
        )
        .unwrap();
        // 100 m square at d_n = 20: capacity 10000 / 400 = 25 nodes, and the
        // aligned identity placement captures all of them.
        assert_eq!(grid.free_count(), 25);
        assert_eq!(grid.standard_dims, (5, 5));
        assert_eq!((grid.nx, grid.ny), (7, 7));
    }

    #[test]
    fn free_count_matches_brute_force_oracle() {
        let concave = Polygon::new(
            vec![
                NedPoint::new(0.0, 0.0),
                NedPoint::new(210.0, 10.0),
                NedPoint::new(260.0, 150.0),
                NedPoint::new(120.0, 90.0),
                NedPoint::new(40.0, 170.0),
            ],
            vec![vec![
                NedPoint::new(80.0, 40.0),
                NedPoint::new(130.0, 40.0),
                NedPoint::new(130.0, 70.0),
                NedPoint::new(80.0, 70.0),
            ]],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let placement = Placement {
                shift_x: rng.gen::<f64>() * 20.0,
                shift_y: rng.gen::<f64>() * 20.0,
                rotation_deg: rng.gen::<f64>() * 90.0,
            };
            for mode in [LabelMode::BetterCoverage, LabelMode::StrictInPoly] {
                let expected = brute_force_free_count(&concave, placement, 10.0, mode);
                match build_grid(&concave, placement, 10.0, mode, &[]) {
                    Ok(grid) => assert_eq!(grid.free_count(), expected, "{placement:?} {mode:?}"),
                    Err(_) => assert_eq!(expected, 0, "{placement:?} {mode:?}"),
                }
            }
        }
    }

    #[test]
    fn strict_free_set_is_subset_of_relaxed() {
        let concave = Polygon::new(
            vec![
                NedPoint::new(0.0, 0.0),
                NedPoint::new(200.0, 0.0),
                NedPoint::new(200.0, 80.0),
                NedPoint::new(100.0, 40.0),
                NedPoint::new(0.0, 80.0),
            ],
            vec![],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let placement = Placement {
                shift_x: rng.gen::<f64>() * 20.0,
                shift_y: rng.gen::<f64>() * 20.0,
                rotation_deg: rng.gen::<f64>() * 90.0,
            };
            let strict = build_grid(&concave, placement, 10.0, LabelMode::StrictInPoly, &[]);
            let relaxed = build_grid(&concave, placement, 10.0, LabelMode::BetterCoverage, &[]);
            let (Ok(strict), Ok(relaxed)) = (strict, relaxed) else {
                continue;
            };
            for flat in 0..strict.states.len() {
                if strict.states[flat] != NodeState::Obstacle {
                    assert_ne!(relaxed.states[flat], NodeState::Obstacle);
                }
            }
        }
    }

    #[test]
    fn strict_mode_bounds_node_capacity_on_test_shapes() {
        for (poly, d_s) in [
            (square100(), 10.0),
            (Polygon::rectangle(-35.0, -18.0, 181.0, 93.0).unwrap(), 12.5),
        ] {
            let placement = Placement {
                shift_x: 3.0,
                shift_y: 7.0,
                rotation_deg: 20.0,
            };
            let grid = build_grid(&poly, placement, d_s, LabelMode::StrictInPoly, &[]).unwrap();
            let d_n = 2.0 * d_s;
            assert!(grid.free_count() as f64 * d_n * d_n <= poly.area() + 1.0e-9);
        }
    }

    #[test]
    fn labeling_is_deterministic() {
        let placement = Placement {
            shift_x: 4.2,
            shift_y: 1.1,
            rotation_deg: 33.0,
        };
        let a = build_grid(&square100(), placement, 10.0, LabelMode::StrictInPoly, &[]).unwrap();
        let b = build_grid(&square100(), placement, 10.0, LabelMode::StrictInPoly, &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn obstacle_carves_nodes_out() {
        let with_hole = Polygon::new(
            vec![
                NedPoint::new(0.0, 0.0),
                NedPoint::new(100.0, 0.0),
                NedPoint::new(100.0, 100.0),
                NedPoint::new(0.0, 100.0),
            ],
            vec![vec![
                NedPoint::new(25.0, 25.0),
                NedPoint::new(75.0, 25.0),
                NedPoint::new(75.0, 75.0),
                NedPoint::new(25.0, 75.0),
            ]],
        )
        .unwrap();
        let grid = build_grid(
            &with_hole,
            Placement::identity(),
            10.0,
            LabelMode::BetterCoverage,
            &[],
        )
        .unwrap();
        // The hole swallows the central 3x3 block of node centers (30/50/70).
        assert_eq!(grid.free_count(), 25 - 9);
    }

    #[test]
    fn uav_positions_snap_to_nearest_free_node() {
        let positions = [NedPoint::new(12.0, 9.0), NedPoint::new(88.0, 91.0)];
        let grid = build_grid(
            &square100(),
            Placement::identity(),
            10.0,
            LabelMode::BetterCoverage,
            &positions,
        )
        .unwrap();
        assert_eq!(grid.uav_cells.len(), 2);
        let (flat0, id0) = grid.uav_cells[0];
        let (ix, iy) = grid.coords(flat0);
        assert_eq!(id0, 0);
        // (12, 9) snaps to the node centered at (10, 10).
        let c = grid.node_center(ix, iy);
        assert_relative_eq!(c.x, 10.0);
        assert_relative_eq!(c.y, 10.0);
        // A position outside the region still snaps to the nearest free node.
        let outside = [NedPoint::new(-40.0, 50.0)];
        let grid = build_grid(
            &square100(),
            Placement::identity(),
            10.0,
            LabelMode::BetterCoverage,
            &outside,
        )
        .unwrap();
        let (flat, _) = grid.uav_cells[0];
        let (ix, iy) = grid.coords(flat);
        let c = grid.node_center(ix, iy);
        assert_relative_eq!(c.x, 10.0);
        assert_relative_eq!(c.y, 50.0);
    }

    #[test]
    fn colliding_uavs_are_rejected() {
        let positions = [NedPoint::new(11.0, 11.0), NedPoint::new(9.0, 9.0)];
        let err = build_grid(
            &square100(),
            Placement::identity(),
            10.0,
            LabelMode::BetterCoverage,
            &positions,
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::FleetConfiguration(_)), "{err}");
    }

    #[test]
    fn tiny_polygon_at_coarse_density_is_infeasible() {
        let sliver = Polygon::rectangle(2.0, 2.0, 6.0, 6.0).unwrap();
        let err = build_grid(
            &sliver,
            Placement::identity(),
            20.0,
            LabelMode::BetterCoverage,
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::InfeasibleDiscretization(_)), "{err}");
    }

    #[test]
    fn pgm_dump_encodes_states() {
        let grid = build_grid(
            &square100(),
            Placement::identity(),
            10.0,
            LabelMode::BetterCoverage,
            &[NedPoint::new(50.0, 50.0)],
        )
        .unwrap();
        let mut buf = Vec::new();
        grid.write_pgm(&mut buf).unwrap();
        let header = b"P5\n7 7\n255\n";
        assert_eq!(&buf[..header.len()], header);
        let body = &buf[header.len()..];
        assert_eq!(body.len(), 49);
        assert_eq!(body.iter().filter(|&&b| b == 255).count(), 1);
        assert_eq!(body.iter().filter(|&&b| b == 128).count(), 24);
        assert_eq!(body.iter().filter(|&&b| b == 0).count(), 24);
    }
}
