//! Photogrammetric footprint model and coverage simulation.
//!
//! The camera footprint on flat ground is a square of side `d = 2 h
//! tan(hfov/2)`. Sweeping it along a flight leg paints a swath of width `d`,
//! and the sweep spacing that yields a given forward/side overlap fraction
//! `p_o` is `d_s = (2 - p_o) h tan(hfov/2)`. The simulation rasterizes the
//! survey area, counts how many straight flight legs scan each cell, and
//! reports covered and multiply-covered percentages plus the full scan-count
//! histogram.

use crate::error::{PlanError, Result};
use crate::geo::{NedPoint, Polygon};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;

/// Camera and flight parameters that define the ground footprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub altitude_m: f64,
    pub hfov_deg: f64,
    pub h_res_px: u32,
    /// Desired overlap fraction between successive sweeps, in `[0, 2)`.
    pub overlap: f64,
}

impl SensorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_m.is_finite() && self.altitude_m > 0.0) {
            return Err(PlanError::InvalidInput(format!(
                "sensor altitude must be positive, got {}",
                self.altitude_m
            )));
        }
        if !(self.hfov_deg.is_finite() && self.hfov_deg > 0.0 && self.hfov_deg < 180.0) {
            return Err(PlanError::InvalidInput(format!(
                "horizontal field of view must lie in (0, 180) degrees, got {}",
                self.hfov_deg
            )));
        }
        if self.h_res_px == 0 {
            return Err(PlanError::InvalidInput(
                "sensor horizontal resolution must be at least 1 px".into(),
            ));
        }
        if !(self.overlap.is_finite() && (0.0..2.0).contains(&self.overlap)) {
            return Err(PlanError::InvalidInput(format!(
                "overlap fraction must lie in [0, 2), got {}",
                self.overlap
            )));
        }
        Ok(())
    }

    fn half_width_m(&self) -> f64 {
        self.altitude_m * (self.hfov_deg.to_radians() / 2.0).tan()
    }

    /// Ground footprint side length `d`.
    pub fn footprint_width_m(&self) -> f64 {
        2.0 * self.half_width_m()
    }

    /// Sweep spacing `d_s` that realizes the requested overlap.
    pub fn scanning_density_m(&self) -> f64 {
        (2.0 - self.overlap) * self.half_width_m()
    }

    /// Ground sample distance in centimeters per pixel.
    pub fn ground_sample_distance_cm(&self) -> f64 {
        100.0 * self.footprint_width_m() / self.h_res_px as f64
    }
}

/// Raster cell budget; resolution is coarsened until the grid fits.
const MAX_RASTER_CELLS: usize = 4_000_000;

/// Scan-count raster over the survey area and the statistics drawn from it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub cell_size_m: f64,
    pub cols: usize,
    pub rows: usize,
    /// South-west corner of cell (0, 0).
    pub origin: NedPoint,
    /// Scan counts, row-major with row 0 at the south edge.
    pub counts: Vec<u32>,
    /// True where the cell center lies inside the survey area.
    pub roi_mask: Vec<bool>,
    pub roi_cells: usize,
    /// Percentage of survey cells scanned at least once.
    pub poc_pct: f64,
    /// Percentage of survey cells scanned at least twice.
    pub pooc_pct: f64,
    /// `histogram[k]` = fraction of survey cells scanned exactly `k` times;
    /// sums to 1.
    pub histogram: Vec<f64>,
}

/// A maximal straight flight run after merging collinear legs.
#[derive(Debug, Clone, Copy)]
struct Run {
    start: NedPoint,
    end: NedPoint,
}

/// Merges consecutive collinear legs of a polyline into maximal straight
/// runs. A closed polyline (last point equal to first) is treated
/// cyclically, so runs meeting at the start point also merge; this keeps a
/// straight pass counted once no matter where the tour nominally begins.
fn straight_runs(path: &[NedPoint]) -> Vec<Run> {
    let mut pts: Vec<NedPoint> = Vec::with_capacity(path.len());
    for &p in path {
        if pts.last().map_or(true, |l: &NedPoint| l.distance(&p) > 1.0e-9) {
            pts.push(p);
        }
    }
    if pts.len() < 2 {
        return Vec::new();
    }
    let closed = path.len() >= 2 && path[0].distance(path.last().unwrap()) <= 1.0e-9;
    if closed && pts.len() >= 2 {
        // `pts` already dropped the duplicated closing point.
        if pts[0].distance(pts.last().unwrap()) <= 1.0e-9 {
            pts.pop();
        }
    }
    let n = pts.len();
    if n < 2 {
        return Vec::new();
    }

    let seg_count = if closed { n } else { n - 1 };
    let dir = |i: usize| {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let len = a.distance(&b);
        ((b.x - a.x) / len, (b.y - a.y) / len)
    };
    // Heading tolerance absorbs coordinate rounding on nominally straight
    // legs (about 0.1 degrees).
    let same_heading = |a: (f64, f64), b: (f64, f64)| {
        let cross = a.0 * b.1 - a.1 * b.0;
        let dot = a.0 * b.0 + a.1 * b.1;
        dot > 0.0 && cross.abs() < 2.0e-3
    };

    let first = if closed {
        // Start grouping at a genuine turn; a closed tour around any area
        // has one. All-collinear closed input degenerates to one run.
        (0..seg_count)
            .find(|&i| !same_heading(dir((i + seg_count - 1) % seg_count), dir(i)))
            .unwrap_or(0)
    } else {
        0
    };

    let mut runs: Vec<Run> = Vec::new();
    for k in 0..seg_count {
        let i = (first + k) % seg_count;
        let prev = (i + seg_count - 1) % seg_count;
        let extend = k > 0 && same_heading(dir(prev), dir(i));
        let end = pts[(i + 1) % n];
        if extend {
            runs.last_mut().unwrap().end = end;
        } else {
            runs.push(Run { start: pts[i], end });
        }
    }
    runs
}

/// Rasterizes the survey area and counts, per cell, how many straight
/// flight runs scan it. A run from `A` to `B` with footprint width `d`
/// scans the rectangle `|across| <= d/2`, `-d/2 <= along <= |AB| + d/2`
/// (square end caps). `paths` are waypoint polylines; a polyline whose last
/// point equals its first is treated as a closed tour. `d_s` sets the
/// raster resolution.
pub fn simulate_coverage(
    roi: &Polygon,
    paths: &[Vec<NedPoint>],
    footprint_width_m: f64,
    d_s: f64,
) -> Result<CoverageReport> {
    if !(footprint_width_m.is_finite() && footprint_width_m > 0.0) {
        return Err(PlanError::InvalidInput(format!(
            "footprint width must be positive, got {footprint_width_m}"
        )));
    }
    if !(d_s.is_finite() && d_s > 0.0) {
        return Err(PlanError::InvalidInput(format!(
            "scanning density must be positive, got {d_s}"
        )));
    }
    let runs: Vec<Run> = paths.iter().flat_map(|p| straight_runs(p)).collect();
    let bbox = crate::geo::BoundingBox::of_points(roi.outer());

    let mut cell = (d_s / 8.0).clamp(0.5, 2.0);
    loop {
        let report = rasterize(roi, &bbox, &runs, footprint_width_m, cell)?;
        if report.roi_cells > 0 {
            return Ok(report);
        }
        // A sliver thinner than the cell pitch can miss every center; refine.
        cell /= 2.0;
        if cell < 0.05 {
            return Err(PlanError::InvalidInput(
                "survey area contains no raster cells even at 5 cm resolution".into(),
            ));
        }
    }
}

fn rasterize(
    roi: &Polygon,
    bbox: &crate::geo::BoundingBox,
    runs: &[Run],
    d: f64,
    mut cell: f64,
) -> Result<CoverageReport> {
    let cells_at = |c: f64| {
        let cols = (bbox.width() / c).ceil().max(1.0) as usize;
        let rows = (bbox.height() / c).ceil().max(1.0) as usize;
        (cols, rows)
    };
    while {
        let (c, r) = cells_at(cell);
        c.saturating_mul(r) > MAX_RASTER_CELLS
    } {
        cell *= 1.25;
    }
    let (cols, rows) = cells_at(cell);
    let origin = NedPoint::new(bbox.x_min, bbox.y_min);

    let half = d / 2.0;
    let mut counts = vec![0u32; cols * rows];
    let mut roi_mask = vec![false; cols * rows];
    counts
        .par_chunks_mut(cols)
        .zip(roi_mask.par_chunks_mut(cols))
        .enumerate()
        .for_each(|(r, (count_row, mask_row))| {
            let y = origin.y + (r as f64 + 0.5) * cell;
            for c in 0..cols {
                let x = origin.x + (c as f64 + 0.5) * cell;
                mask_row[c] = roi.contains(NedPoint::new(x, y));
                let mut n = 0u32;
                for run in runs {
                    let (dx, dy) = (run.end.x - run.start.x, run.end.y - run.start.y);
                    let len = (dx * dx + dy * dy).sqrt();
                    let (tx, ty) = (dx / len, dy / len);
                    let (rx, ry) = (x - run.start.x, y - run.start.y);
                    let along = rx * tx + ry * ty;
                    let across = -rx * ty + ry * tx;
                    if across.abs() <= half && along >= -half && along <= len + half {
                        n += 1;
                    }
                }
                count_row[c] = n;
            }
        });

    let roi_cells = roi_mask.iter().filter(|&&m| m).count();
    let mut covered = 0usize;
    let mut overlapped = 0usize;
    let mut max_count = 0u32;
    for (i, &m) in roi_mask.iter().enumerate() {
        if !m {
            continue;
        }
        let n = counts[i];
        max_count = max_count.max(n);
        if n >= 1 {
            covered += 1;
        }
        if n >= 2 {
            overlapped += 1;
        }
    }
    let mut histogram = vec![0.0; max_count as usize + 1];
    if roi_cells > 0 {
        for (i, &m) in roi_mask.iter().enumerate() {
            if m {
                histogram[counts[i] as usize] += 1.0;
            }
        }
        for h in histogram.iter_mut() {
            *h /= roi_cells as f64;
        }
    }
    let (poc_pct, pooc_pct) = if roi_cells > 0 {
        (
            100.0 * covered as f64 / roi_cells as f64,
            100.0 * overlapped as f64 / roi_cells as f64,
        )
    } else {
        (0.0, 0.0)
    };
    Ok(CoverageReport {
        cell_size_m: cell,
        cols,
        rows,
        origin,
        counts,
        roi_mask,
        roi_cells,
        poc_pct,
        pooc_pct,
        histogram,
    })
}

impl CoverageReport {
    /// Writes the scan-count raster as a binary PGM. Cells outside the
    /// survey area are black; survey cells ramp from dark gray (0 scans) to
    /// white (maximum scans). Rows run north to south.
    pub fn write_heatmap_pgm(&self, path: &Path) -> Result<()> {
        let max = self
            .counts
            .iter()
            .zip(&self.roi_mask)
            .filter(|(_, &m)| m)
            .map(|(&c, _)| c)
            .max()
            .unwrap_or(0);
        let mut buf = Vec::with_capacity(self.cols * self.rows + 32);
        write!(buf, "P5\n{} {}\n255\n", self.cols, self.rows)?;
        for r in (0..self.rows).rev() {
            for c in 0..self.cols {
                let i = r * self.cols + c;
                let v = if !self.roi_mask[i] {
                    0u8
                } else if max == 0 {
                    30
                } else {
                    30 + (self.counts[i] as f64 / max as f64 * 225.0).round() as u8
                };
                buf.push(v);
            }
        }
        std::fs::write(path, buf)?;
        Ok(())
    }

    /// Writes the scan-count histogram as `scans,fraction` CSV rows.
    pub fn write_histogram_csv(&self, path: &Path) -> Result<()> {
        let mut buf = String::from("scans,fraction\n");
        for (k, f) in self.histogram.iter().enumerate() {
            buf.push_str(&format!("{k},{f:.9}\n"));
        }
        std::fs::write(path, buf)?;
        Ok(())
    }
}
