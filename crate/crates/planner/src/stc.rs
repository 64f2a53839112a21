//! Spanning-tree coverage tours.
//!
//! Each UAV region (a 4-connected set of grid nodes) is spanned by a tree,
//! and the tour walks once around that tree through the nodes' sub-cells,
//! visiting every sub-cell exactly once and returning to its start. Tree
//! shape controls turn count, so four comb-shaped candidates are built —
//! teeth hanging from the top row, the bottom row, the rightmost column or
//! the leftmost column — by tiering edge weights, and the tour with the
//! fewest turns wins.

use crate::error::{PlanError, Result};
use crate::geo::NedPoint;
use crate::grid::NodeGrid;
use serde::{Deserialize, Serialize};

/// Weight step separating same-tier edges by row/column preference. Small
/// enough that tiers never cross for any supported grid size.
const TIER_EPS: f64 = 1.0e-3;

/// The four spanning-tree comb orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CombScheme {
    /// Columns joined along the top row.
    Upper,
    /// Columns joined along the bottom row.
    Lower,
    /// Rows joined along the rightmost column.
    Right,
    /// Rows joined along the leftmost column.
    Left,
}

impl CombScheme {
    pub const ALL: [CombScheme; 4] = [
        CombScheme::Upper,
        CombScheme::Lower,
        CombScheme::Right,
        CombScheme::Left,
    ];
}

/// A spanning tree over region nodes, stored as flat-index edge pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    pub scheme: CombScheme,
    pub edges: Vec<(usize, usize)>,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Builds the comb-scheme minimum spanning tree over the region's nodes.
///
/// `cells` are flat grid indices of one region; the region must be
/// 4-connected. Ties resolve by edge enumeration order (row-major, east
/// edge before north edge), making the tree deterministic.
pub fn build_mst(grid: &NodeGrid, cells: &[usize], scheme: CombScheme) -> Result<SpanningTree> {
    if cells.is_empty() {
        return Err(PlanError::InvalidInput("empty region".into()));
    }
    let mut member = vec![false; grid.nx * grid.ny];
    for &c in cells {
        member[c] = true;
    }
    let (mut ix_min, mut ix_max, mut iy_min, mut iy_max) = (usize::MAX, 0, usize::MAX, 0);
    for &c in cells {
        let (ix, iy) = grid.coords(c);
        ix_min = ix_min.min(ix);
        ix_max = ix_max.max(ix);
        iy_min = iy_min.min(iy);
        iy_max = iy_max.max(iy);
    }

    // Horizontal edges join east-west neighbors (their tier is a row
    // preference); vertical edges join north-south neighbors (column
    // preference).
    let horizontal_w = |row: usize| -> f64 {
        match scheme {
            CombScheme::Upper => 2.0 + (iy_max - row) as f64 * TIER_EPS,
            CombScheme::Lower => 2.0 + (row - iy_min) as f64 * TIER_EPS,
            CombScheme::Right | CombScheme::Left => 1.0,
        }
    };
    let vertical_w = |col: usize| -> f64 {
        match scheme {
            CombScheme::Upper | CombScheme::Lower => 1.0,
            CombScheme::Right => 2.0 + (ix_max - col) as f64 * TIER_EPS,
            CombScheme::Left => 2.0 + (col - ix_min) as f64 * TIER_EPS,
        }
    };

    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let flat = grid.index(ix, iy);
            if !member[flat] {
                continue;
            }
            if ix + 1 < grid.nx && member[flat + 1] {
                edges.push((horizontal_w(iy), flat, flat + 1));
            }
            if iy + 1 < grid.ny && member[flat + grid.nx] {
                edges.push((vertical_w(ix), flat, flat + grid.nx));
            }
        }
    }
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| {
        edges[a]
            .0
            .partial_cmp(&edges[b].0)
            .expect("finite weights")
            .then(a.cmp(&b))
    });

    let mut remap = vec![usize::MAX; grid.nx * grid.ny];
    for (i, &c) in cells.iter().enumerate() {
        remap[c] = i;
    }
    let mut uf = UnionFind::new(cells.len());
    let mut tree = Vec::with_capacity(cells.len() - 1);
    for &ei in &order {
        let (_, a, b) = edges[ei];
        if uf.union(remap[a], remap[b]) {
            tree.push((a, b));
            if tree.len() == cells.len() - 1 {
                break;
            }
        }
    }
    if tree.len() != cells.len() - 1 {
        return Err(PlanError::InfeasiblePartition(
            "region is not 4-connected; cannot span it with one tree".into(),
        ));
    }
    Ok(SpanningTree {
        scheme,
        edges: tree,
    })
}

/// Direction bitmasks for incident tree edges.
const EAST: u8 = 1;
const NORTH: u8 = 2;
const WEST: u8 = 4;
const SOUTH: u8 = 8;

/// Walks once around the spanning tree, keeping it on the right-hand side
/// (a clockwise circuit), starting at `start_subcell` (sub-cell lattice
/// coordinates, i.e. doubled node coordinates plus 0/1).
///
/// Movement rules per sub-cell: a move within a node is blocked when a tree
/// edge leaves the node through the crossed half of its center lines, and a
/// move to the neighboring node is allowed only across a tree edge. Each
/// sub-cell then has exactly two usable neighbors, so the rules trace a
/// single closed tour through all `4n` sub-cells.
pub fn circumnavigate(
    grid: &NodeGrid,
    cells: &[usize],
    tree: &SpanningTree,
    start_subcell: (i64, i64),
) -> Result<Vec<(i64, i64)>> {
    let nx = grid.nx as i64;
    let ny = grid.ny as i64;
    let mut member = vec![false; grid.nx * grid.ny];
    for &c in cells {
        member[c] = true;
    }
    let mut incident = vec![0u8; grid.nx * grid.ny];
    for &(a, b) in &tree.edges {
        if b == a + 1 {
            incident[a] |= EAST;
            incident[b] |= WEST;
        } else {
            incident[a] |= NORTH;
            incident[b] |= SOUTH;
        }
    }

    let node_of = |u: i64, v: i64| -> usize { (v / 2) as usize * grid.nx + (u / 2) as usize };
    let in_bounds = |u: i64, v: i64| u >= 0 && v >= 0 && u < 2 * nx && v < 2 * ny;
    let allowed_moves = |u: i64, v: i64| -> Vec<(i64, i64)> {
        let n = node_of(u, v);
        let (qx, qy) = (u & 1, v & 1);
        let mut out = Vec::with_capacity(2);
        for (du, dv) in [(1i64, 0i64), (0, 1), (-1, 0), (0, -1)] {
            let (tu, tv) = (u + du, v + dv);
            if !in_bounds(tu, tv) {
                continue;
            }
            let tn = node_of(tu, tv);
            if tn == n {
                // Crossing the node's center line: blocked if a tree edge
                // runs through that half.
                let block = if dv == 0 {
                    if qy == 1 {
                        NORTH
                    } else {
                        SOUTH
                    }
                } else if qx == 1 {
                    EAST
                } else {
                    WEST
                };
                if incident[n] & block == 0 {
                    out.push((tu, tv));
                }
            } else {
                let cross = if du == 1 {
                    EAST
                } else if du == -1 {
                    WEST
                } else if dv == 1 {
                    NORTH
                } else {
                    SOUTH
                };
                if incident[n] & cross != 0 && member[tn] {
                    out.push((tu, tv));
                }
            }
        }
        out
    };

    let (su, sv) = start_subcell;
    if !in_bounds(su, sv) || !member[node_of(su, sv)] {
        return Err(PlanError::InvalidInput(
            "tour start sub-cell is outside the region".into(),
        ));
    }

    let total = cells.len() * 4;
    let mut tour = Vec::with_capacity(total);
    let mut visited = vec![false; (2 * nx * 2 * ny) as usize];
    let mark = |visited: &mut Vec<bool>, u: i64, v: i64| {
        let idx = (v * 2 * nx + u) as usize;
        let seen = visited[idx];
        visited[idx] = true;
        seen
    };
    let cur = start_subcell;
    let first_moves = allowed_moves(cur.0, cur.1);
    debug_assert_eq!(first_moves.len(), 2, "sub-cell degree must be 2");
    let mut prev = cur;
    mark(&mut visited, cur.0, cur.1);
    tour.push(cur);
    let mut next = first_moves[0];
    loop {
        let moves = allowed_moves(next.0, next.1);
        debug_assert_eq!(moves.len(), 2, "sub-cell degree must be 2");
        if next == start_subcell {
            break;
        }
        if mark(&mut visited, next.0, next.1) {
            return Err(PlanError::InvalidInput(
                "tour revisited a sub-cell; tree is malformed".into(),
            ));
        }
        tour.push(next);
        let follow = if moves[0] == prev { moves[1] } else { moves[0] };
        prev = next;
        next = follow;
    }
    if tour.len() != total {
        return Err(PlanError::InvalidInput(format!(
            "tour covers {} of {} sub-cells; tree is disconnected",
            tour.len(),
            total
        )));
    }

    // Orient clockwise so the tree sits on the walker's right-hand side.
    let mut twice_area = 0i64;
    for i in 0..tour.len() {
        let (x0, y0) = tour[i];
        let (x1, y1) = tour[(i + 1) % tour.len()];
        twice_area += x0 * y1 - x1 * y0;
    }
    if twice_area > 0 {
        tour[1..].reverse();
    }
    Ok(tour)
}

/// Counts heading changes over the cyclic tour.
pub fn count_turns(tour: &[(i64, i64)]) -> usize {
    let m = tour.len();
    if m < 3 {
        return 0;
    }
    let dir = |i: usize| -> (i64, i64) {
        let (x0, y0) = tour[i];
        let (x1, y1) = tour[(i + 1) % m];
        (x1 - x0, y1 - y0)
    };
    (0..m).filter(|&i| dir(i) != dir((i + m - 1) % m)).count()
}

/// A region's chosen tour, in the grid frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTour {
    pub uav_id: usize,
    pub scheme: CombScheme,
    /// Cyclic sub-cell tour beginning at the start sub-cell.
    pub subcells: Vec<(i64, i64)>,
    /// Turn-point waypoints. The list opens at the start sub-cell (kept even
    /// when collinear, since the mission starts there) and repeats it at the
    /// end to close the loop.
    pub waypoints: Vec<NedPoint>,
    pub turns: usize,
    pub length_m: f64,
    /// Turn count per scheme, in [`CombScheme::ALL`] order.
    pub scheme_turns: [usize; 4],
}

/// Plans the tour for one region: builds all four comb trees, keeps the one
/// whose circumnavigation has the fewest turns (ties pick the earlier scheme
/// in [`CombScheme::ALL`]), and reduces the tour to turn-point waypoints.
///
/// `start_position` is the UAV position in the grid frame; the tour starts
/// at the start node's sub-cell nearest to it (ties pick the lowest sub-cell
/// index).
pub fn plan_region_path(
    grid: &NodeGrid,
    cells: &[usize],
    start_cell: usize,
    start_position: NedPoint,
    uav_id: usize,
) -> Result<RegionTour> {
    if !cells.contains(&start_cell) {
        return Err(PlanError::InvalidInput(
            "start node is not part of the region".into(),
        ));
    }
    let (ix, iy) = grid.coords(start_cell);
    let (u0, v0) = (2 * ix as i64, 2 * iy as i64);
    let mut start_subcell = (u0, v0);
    let mut best_d = f64::INFINITY;
    for (du, dv) in [(0i64, 0i64), (1, 0), (0, 1), (1, 1)] {
        let (u, v) = (u0 + du, v0 + dv);
        let d = grid.subcell_center(u, v).distance(&start_position);
        // Strict improvement keeps the lowest (v, u) on ties.
        let better = d < best_d - 1.0e-9
            || (d < best_d + 1.0e-9 && (v, u) < (start_subcell.1, start_subcell.0));
        if better {
            best_d = d;
            start_subcell = (u, v);
        }
    }

    let mut chosen: Option<(usize, CombScheme, Vec<(i64, i64)>)> = None;
    let mut scheme_turns = [0usize; 4];
    for (i, scheme) in CombScheme::ALL.into_iter().enumerate() {
        let tree = build_mst(grid, cells, scheme)?;
        let tour = circumnavigate(grid, cells, &tree, start_subcell)?;
        let turns = count_turns(&tour);
        scheme_turns[i] = turns;
        if chosen.as_ref().map_or(true, |(t, _, _)| turns < *t) {
            chosen = Some((turns, scheme, tour));
        }
    }
    let (turns, scheme, subcells) = chosen.expect("at least one scheme");

    // Collapse collinear runs to turn points; keep the start sub-cell as the
    // opening waypoint regardless, and close the loop on it.
    let m = subcells.len();
    let dir = |i: usize| {
        let (x0, y0) = subcells[i];
        let (x1, y1) = subcells[(i + 1) % m];
        (x1 - x0, y1 - y0)
    };
    let mut waypoints = Vec::with_capacity(turns + 2);
    for i in 0..m {
        if i == 0 || dir(i) != dir((i + m - 1) % m) {
            let (u, v) = subcells[i];
            waypoints.push(grid.subcell_center(u, v));
        }
    }
    waypoints.push(waypoints[0]);

    let length_m = 4.0 * cells.len() as f64 * grid.d_s;
    Ok(RegionTour {
        uav_id,
        scheme,
        subcells,
        waypoints,
        turns,
        length_m,
        scheme_turns,
    })
}
