//! Plan artifact emission and ingestion.
//!
//! A planned mission is persisted as a small set of files: `paths.geojson`
//! (one LineString per UAV, WGS84 lon/lat, 7 decimal places), `metrics.json`
//! (placement score, partition counts, per-path stats, coverage and cost
//! reports, in a fixed field order so identical plans serialize to identical
//! bytes), `heatmap.pgm` and `histogram.csv` from the coverage report, plus
//! optional debug dumps of the grid, the annealing trace, the partition
//! trace, and the region map.

use crate::coverage::CoverageReport;
use crate::cost::MissionCostReport;
use crate::error::{PlanError, Result};
use crate::geo::GeoPoint;
use crate::pipeline::{MissionPlan, Provenance};
use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct PlacementMetrics {
    shift_x: f64,
    shift_y: f64,
    rotation_deg: f64,
    score: f64,
    node_fill: f64,
    box_fit: f64,
    margin_imbalance: f64,
    free_nodes: usize,
    evaluations: usize,
}

#[derive(Serialize)]
struct PartitionMetrics {
    counts: Vec<usize>,
    targets: Vec<f64>,
    iterations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct PathMetrics {
    uav_id: usize,
    nodes: usize,
    turns: usize,
    length_m: f64,
    scheme: String,
}

#[derive(Serialize)]
struct CoverageMetrics {
    poc_pct: f64,
    pooc_pct: f64,
    roi_cells: usize,
    cell_size_m: f64,
    histogram: Vec<f64>,
}

#[derive(Serialize)]
struct Metrics<'a> {
    provenance: &'a Provenance,
    placement: PlacementMetrics,
    partition: PartitionMetrics,
    paths: Vec<PathMetrics>,
    coverage: CoverageMetrics,
    cost: &'a MissionCostReport,
}

fn metrics_json(plan: &MissionPlan) -> Result<Vec<u8>> {
    let metrics = Metrics {
        provenance: &plan.provenance,
        placement: PlacementMetrics {
            shift_x: plan.solution.placement.shift_x,
            shift_y: plan.solution.placement.shift_y,
            rotation_deg: plan.solution.placement.rotation_deg,
            score: plan.solution.score.score,
            node_fill: plan.solution.score.node_fill,
            box_fit: plan.solution.score.box_fit,
            margin_imbalance: plan.solution.score.margin_imbalance,
            free_nodes: plan.solution.score.free_nodes,
            evaluations: plan.solution.evaluations,
        },
        partition: PartitionMetrics {
            counts: plan.assignment.counts.clone(),
            targets: plan.assignment.targets.clone(),
            iterations: plan.assignment.iterations,
            converged: plan.assignment.converged,
        },
        paths: plan
            .paths
            .iter()
            .map(|p| PathMetrics {
                uav_id: p.tour.uav_id,
                nodes: p.region_cells.len(),
                turns: p.tour.turns,
                length_m: p.tour.length_m,
                scheme: format!("{:?}", p.tour.scheme),
            })
            .collect(),
        coverage: CoverageMetrics {
            poc_pct: plan.coverage.poc_pct,
            pooc_pct: plan.coverage.pooc_pct,
            roi_cells: plan.coverage.roi_cells,
            cell_size_m: plan.coverage.cell_size_m,
            histogram: plan.coverage.histogram.clone(),
        },
        cost: &plan.cost,
    };
    let mut bytes = serde_json::to_vec_pretty(&metrics)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn paths_geojson(plan: &MissionPlan) -> String {
    let mut out = String::from("{\n  \"type\": \"FeatureCollection\",\n  \"features\": [\n");
    for (i, path) in plan.paths.iter().enumerate() {
        let coords: Vec<String> = path
            .waypoints_wgs84
            .iter()
            .map(|p| format!("[{:.7}, {:.7}]", p.lon, p.lat))
            .collect();
        write!(
            out,
            "    {{\n      \"type\": \"Feature\",\n      \"properties\": {{\"uav_id\": {}, \"turns\": {}, \"length_m\": {}, \"scheme\": \"{:?}\"}},\n      \"geometry\": {{\"type\": \"LineString\", \"coordinates\": [{}]}}\n    }}{}\n",
            path.tour.uav_id,
            path.tour.turns,
            path.tour.length_m,
            path.tour.scheme,
            coords.join(", "),
            if i + 1 < plan.paths.len() { "," } else { "" }
        )
        .expect("string write");
    }
    out.push_str("  ]\n}\n");
    out
}

/// Writes the artifact set for one plan; returns the files written.
pub fn write_plan_artifacts(
    plan: &MissionPlan,
    out_dir: &Path,
    debug: bool,
) -> Result<Vec<PathBuf>> {
    fn emit(out_dir: &Path, written: &mut Vec<PathBuf>, name: &str, bytes: &[u8]) -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    }

    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    emit(out_dir, &mut written, "paths.geojson", paths_geojson(plan).as_bytes())?;
    emit(out_dir, &mut written, "metrics.json", &metrics_json(plan)?)?;
    plan.coverage.write_heatmap_pgm(&out_dir.join("heatmap.pgm"))?;
    written.push(out_dir.join("heatmap.pgm"));
    plan.coverage
        .write_histogram_csv(&out_dir.join("histogram.csv"))?;
    written.push(out_dir.join("histogram.csv"));

    if debug {
        let grid_path = out_dir.join("grid.pgm");
        plan.grid.write_pgm(BufWriter::new(File::create(&grid_path)?))?;
        written.push(grid_path);

        let regions_path = out_dir.join("regions.ppm");
        plan.assignment
            .write_ppm(BufWriter::new(File::create(&regions_path)?))?;
        written.push(regions_path);

        let mut sa = String::from(
            "evaluation,shift_x,shift_y,rotation_deg,node_fill,box_fit,margin_imbalance,score,accepted\n",
        );
        for row in &plan.solution.trace {
            writeln!(
                sa,
                "{},{},{},{},{},{},{},{},{}",
                row.evaluation,
                row.shift_x,
                row.shift_y,
                row.rotation_deg,
                row.node_fill,
                row.box_fit,
                row.margin_imbalance,
                row.score,
                row.accepted
            )
            .expect("string write");
        }
        emit(out_dir, &mut written, "sa_trace.csv", sa.as_bytes())?;

        let mut dt = String::from("cycle,cost,max_deviation,disconnected_regions\n");
        for row in &plan.assignment.trace {
            writeln!(
                dt,
                "{},{},{},{}",
                row.cycle, row.cost, row.max_deviation, row.disconnected_regions
            )
            .expect("string write");
        }
        emit(out_dir, &mut written, "darp_trace.csv", dt.as_bytes())?;
    }
    Ok(written)
}

/// Summary of a standalone path evaluation, serialized to
/// `evaluation.json` in a fixed field order.
#[derive(Serialize)]
struct EvaluationMetrics<'a> {
    poc_pct: f64,
    pooc_pct: f64,
    roi_cells: usize,
    cell_size_m: f64,
    histogram: &'a [f64],
}

/// Writes the artifact set for a standalone evaluation run.
pub fn write_evaluation_artifacts(report: &CoverageReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let metrics = EvaluationMetrics {
        poc_pct: report.poc_pct,
        pooc_pct: report.pooc_pct,
        roi_cells: report.roi_cells,
        cell_size_m: report.cell_size_m,
        histogram: &report.histogram,
    };
    let mut bytes = serde_json::to_vec_pretty(&metrics)?;
    bytes.push(b'\n');
    let files = vec![
        out_dir.join("evaluation.json"),
        out_dir.join("heatmap.pgm"),
        out_dir.join("histogram.csv"),
    ];
    std::fs::write(&files[0], bytes)?;
    report.write_heatmap_pgm(&files[1])?;
    report.write_histogram_csv(&files[2])?;
    Ok(files)
}

/// Reads waypoint paths back from a GeoJSON FeatureCollection.
///
/// Accepts LineString features (and MultiLineString parts, flattened in
/// order); features carrying a numeric `uav_id` property are sorted by it,
/// otherwise file order is kept, so foreign hand-written files work too.
pub fn read_paths_geojson(path: &Path) -> Result<Vec<Vec<GeoPoint>>> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| PlanError::InvalidInput(format!("paths file is not valid JSON: {e}")))?;
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            PlanError::InvalidInput("paths file is not a GeoJSON FeatureCollection".into())
        })?;

    let parse_line = |coords: &Value| -> Result<Vec<GeoPoint>> {
        let arr = coords.as_array().ok_or_else(|| {
            PlanError::InvalidInput("LineString coordinates must be an array".into())
        })?;
        arr.iter()
            .map(|pair| {
                let xy = pair.as_array().filter(|a| a.len() >= 2).ok_or_else(|| {
                    PlanError::InvalidInput("coordinate must be a [lon, lat] pair".into())
                })?;
                let lon = xy[0].as_f64().ok_or_else(|| {
                    PlanError::InvalidInput("coordinate longitude is not a number".into())
                })?;
                let lat = xy[1].as_f64().ok_or_else(|| {
                    PlanError::InvalidInput("coordinate latitude is not a number".into())
                })?;
                GeoPoint::new(lat, lon)
            })
            .collect()
    };

    let mut keyed: Vec<(Option<u64>, Vec<Vec<GeoPoint>>)> = Vec::new();
    for feature in features {
        let uav_id = feature
            .get("properties")
            .and_then(|p| p.get("uav_id"))
            .and_then(Value::as_u64);
        let geometry = feature.get("geometry").ok_or_else(|| {
            PlanError::InvalidInput("feature has no geometry".into())
        })?;
        let kind = geometry.get("type").and_then(Value::as_str).unwrap_or("");
        let coords = geometry.get("coordinates").ok_or_else(|| {
            PlanError::InvalidInput("geometry has no coordinates".into())
        })?;
        let lines = match kind {
            "LineString" => vec![parse_line(coords)?],
            "MultiLineString" => coords
                .as_array()
                .ok_or_else(|| {
                    PlanError::InvalidInput("MultiLineString coordinates must be an array".into())
                })?
                .iter()
                .map(parse_line)
                .collect::<Result<Vec<_>>>()?,
            other => {
                return Err(PlanError::InvalidInput(format!(
                    "unsupported geometry type {other:?}; expected LineString"
                )));
            }
        };
        keyed.push((uav_id, lines));
    }
    if keyed.iter().all(|(id, _)| id.is_some()) {
        keyed.sort_by_key(|(id, _)| id.unwrap());
    }
    Ok(keyed.into_iter().flat_map(|(_, lines)| lines).collect())
}
