//! Mission-file parsing.
//!
//! Missions are JSON documents mirroring [`MissionSpec`]. The region may be
//! given inline as `[[lat, lon], ...]` or as a GeoJSON Polygon (coordinates
//! in `[lon, lat]` order; inner rings become no-fly zones). Unknown fields
//! anywhere in the document are rejected, listing every offender, so typos
//! fail loudly instead of silently falling back to defaults.

use crate::coverage::SensorSpec;
use crate::error::{PlanError, Result};
use crate::geo::GeoPoint;
use crate::grid::LabelMode;
use crate::pipeline::{AblationMode, CostTuning, MissionSpec};
use crate::placement::{AnnealSchedule, ScoreWeights};
use serde::Deserialize;
use serde_json::Value;
use std::path::Path;

#[derive(Deserialize)]
#[serde(untagged)]
enum RoiField {
    Inline(Vec<[f64; 2]>),
    GeoJson {
        #[serde(rename = "type")]
        kind: String,
        coordinates: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PositionsField {
    Keyword(String),
    List(Vec<[f64; 2]>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SharesField {
    Keyword(String),
    List(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMission {
    roi: RoiField,
    #[serde(default)]
    obstacles: Vec<Vec<[f64; 2]>>,
    uav_count: usize,
    #[serde(default)]
    initial_positions: Option<PositionsField>,
    #[serde(default)]
    shares: Option<SharesField>,
    #[serde(default)]
    sensor: Option<SensorSpec>,
    #[serde(default)]
    scanning_density_m: Option<f64>,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    speed_mps: Option<f64>,
    #[serde(default)]
    gimbal_pitch_deg: Option<f64>,
    #[serde(default)]
    placement_weights: Option<ScoreWeights>,
    #[serde(default)]
    placement_schedule: Option<AnnealSchedule>,
    #[serde(default)]
    cost: Option<CostTuning>,
    #[serde(default)]
    seed: Option<u64>,
}

/// Known keys per object, for the unknown-field sweep.
const TOP_KEYS: &[&str] = &[
    "roi",
    "obstacles",
    "uav_count",
    "initial_positions",
    "shares",
    "sensor",
    "scanning_density_m",
    "mode",
    "speed_mps",
    "gimbal_pitch_deg",
    "placement_weights",
    "placement_schedule",
    "cost",
    "seed",
];
const ROI_GEOJSON_KEYS: &[&str] = &["type", "coordinates"];
const SENSOR_KEYS: &[&str] = &["altitude_m", "hfov_deg", "h_res_px", "overlap"];
const WEIGHT_KEYS: &[&str] = &["fill", "box_fit", "margin"];
const SCHEDULE_KEYS: &[&str] = &[
    "initial_temperature",
    "cooling_rate",
    "proposals_per_temperature",
    "min_temperature",
    "max_evaluations",
];
const COST_KEYS: &[&str] = &[
    "battery_endurance_min",
    "turn_delay_coeff",
    "turn_delay_shape",
    "cost_rate_per_min",
];

fn sweep_object(value: &Value, known: &[&str], prefix: &str, unknown: &mut Vec<String>) {
    if let Value::Object(map) = value {
        for key in map.keys() {
            if !known.contains(&key.as_str()) {
                unknown.push(format!("{prefix}{key}"));
            }
        }
    }
}

/// Collects every unknown field in the document.
fn unknown_fields(doc: &Value) -> Vec<String> {
    let mut unknown = Vec::new();
    sweep_object(doc, TOP_KEYS, "", &mut unknown);
    if let Some(obj) = doc.get("roi") {
        sweep_object(obj, ROI_GEOJSON_KEYS, "roi.", &mut unknown);
    }
    if let Some(obj) = doc.get("sensor") {
        sweep_object(obj, SENSOR_KEYS, "sensor.", &mut unknown);
    }
    if let Some(obj) = doc.get("placement_weights") {
        sweep_object(obj, WEIGHT_KEYS, "placement_weights.", &mut unknown);
    }
    if let Some(obj) = doc.get("placement_schedule") {
        sweep_object(obj, SCHEDULE_KEYS, "placement_schedule.", &mut unknown);
    }
    if let Some(obj) = doc.get("cost") {
        sweep_object(obj, COST_KEYS, "cost.", &mut unknown);
    }
    unknown
}

fn latlon_ring(pairs: &[[f64; 2]], what: &str) -> Result<Vec<GeoPoint>> {
    pairs
        .iter()
        .map(|&[lat, lon]| {
            GeoPoint::new(lat, lon).map_err(|e| {
                PlanError::InvalidInput(format!("{what}: bad vertex [{lat}, {lon}]: {e}"))
            })
        })
        .collect()
}

/// Drops a duplicated closing vertex (GeoJSON writes rings closed).
fn open_ring(mut ring: Vec<GeoPoint>) -> Vec<GeoPoint> {
    if ring.len() >= 2 && ring.first() == ring.last() {
        ring.pop();
    }
    ring
}

/// Parses a mission document. The optional `seed_override` (from a CLI
/// flag) wins over the file's seed; with neither, the seed is 0.
pub fn parse_mission(text: &str, seed_override: Option<u64>) -> Result<MissionSpec> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| PlanError::InvalidInput(format!("mission file is not valid JSON: {e}")))?;
    let unknown = unknown_fields(&doc);
    if !unknown.is_empty() {
        return Err(PlanError::InvalidInput(format!(
            "unknown mission fields: {}",
            unknown.join(", ")
        )));
    }
    let raw: RawMission = serde_json::from_value(doc)
        .map_err(|e| PlanError::InvalidInput(format!("mission file: {e}")))?;

    let (roi, mut obstacles) = match raw.roi {
        RoiField::Inline(pairs) => (open_ring(latlon_ring(&pairs, "roi")?), Vec::new()),
        RoiField::GeoJson { kind, coordinates } => {
            if kind != "Polygon" {
                return Err(PlanError::InvalidInput(format!(
                    "roi GeoJSON must be a Polygon, got {kind}"
                )));
            }
            let mut rings = coordinates.into_iter();
            let outer = rings.next().ok_or_else(|| {
                PlanError::InvalidInput("roi GeoJSON Polygon has no rings".into())
            })?;
            // GeoJSON coordinates are [lon, lat].
            let to_geo = |pairs: Vec<[f64; 2]>, what: &str| -> Result<Vec<GeoPoint>> {
                let swapped: Vec<[f64; 2]> =
                    pairs.into_iter().map(|[lon, lat]| [lat, lon]).collect();
                Ok(open_ring(latlon_ring(&swapped, what)?))
            };
            let outer = to_geo(outer, "roi")?;
            let holes = rings
                .map(|r| to_geo(r, "roi inner ring"))
                .collect::<Result<Vec<_>>>()?;
            (outer, holes)
        }
    };
    for (i, ring) in raw.obstacles.iter().enumerate() {
        obstacles.push(open_ring(latlon_ring(ring, &format!("obstacles[{i}]"))?));
    }

    let initial_positions = match raw.initial_positions {
        None => None,
        Some(PositionsField::Keyword(word)) if word == "auto" => None,
        Some(PositionsField::Keyword(word)) => {
            return Err(PlanError::InvalidInput(format!(
                "initial_positions must be \"auto\" or a coordinate list, got \"{word}\""
            )));
        }
        Some(PositionsField::List(pairs)) => Some(latlon_ring(&pairs, "initial_positions")?),
    };
    let shares = match raw.shares {
        None => None,
        Some(SharesField::Keyword(word)) if word == "equal" => None,
        Some(SharesField::Keyword(word)) => {
            return Err(PlanError::InvalidInput(format!(
                "shares must be \"equal\" or a number list, got \"{word}\""
            )));
        }
        Some(SharesField::List(list)) => Some(list),
    };
    let mode = match raw.mode.as_deref() {
        None | Some("better") => LabelMode::BetterCoverage,
        Some("strict") => LabelMode::StrictInPoly,
        Some(other) => {
            return Err(PlanError::InvalidInput(format!(
                "mode must be \"strict\" or \"better\", got \"{other}\""
            )));
        }
    };

    let spec = MissionSpec {
        roi,
        obstacles,
        uav_count: raw.uav_count,
        initial_positions,
        shares,
        sensor: raw.sensor,
        scanning_density_m: raw.scanning_density_m,
        mode,
        speed_mps: raw.speed_mps.unwrap_or(3.0),
        gimbal_pitch_deg: raw.gimbal_pitch_deg.unwrap_or(-90.0),
        placement_weights: raw.placement_weights.unwrap_or_default(),
        placement_schedule: raw.placement_schedule.unwrap_or_default(),
        cost: raw.cost.unwrap_or_default(),
        ablation: AblationMode::Full,
        seed: seed_override.or(raw.seed).unwrap_or(0),
    };
    spec.validate()?;
    Ok(spec)
}

/// Reads and parses a mission file from disk.
pub fn load_mission(path: &Path, seed_override: Option<u64>) -> Result<MissionSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_mission(&text, seed_override)
}
