//! Mission time, battery, and monetary cost estimation.
//!
//! Flight duration combines cruise time with a per-turn delay that saturates
//! at high speed: `seconds = length/speed + turns * g1*speed/(g2 + |speed|)`.
//! From the per-UAV durations the model derives battery count, fleet flight
//! time (the slowest UAV), crew deployment time, battery-change downtime and
//! an indicative monetary cost at a fixed rate per flight minute.

use crate::error::{PlanError, Result};
use serde::{Deserialize, Serialize};

/// Minutes to deploy ground gear before any UAV-specific setup.
const DEPLOY_BASE_MIN: f64 = 5.0;
/// Additional deployment minutes per participating UAV.
const DEPLOY_PER_UAV_MIN: f64 = 3.0;
/// Minutes to physically swap one battery set.
const BATTERY_SWAP_MIN: f64 = 3.0;

/// Tunable cost-model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub speed_mps: f64,
    /// Flight minutes one battery provides.
    pub battery_endurance_min: f64,
    /// Saturating per-turn delay, in seconds at the high-speed limit.
    pub turn_delay_coeff: f64,
    /// Softens the per-turn delay at low speed (added to `|speed|` in the
    /// denominator).
    pub turn_delay_shape: f64,
    /// Currency per flight minute per UAV.
    pub cost_rate_per_min: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            speed_mps: 3.0,
            battery_endurance_min: 25.0,
            turn_delay_coeff: 6.0,
            turn_delay_shape: 2.0,
            cost_rate_per_min: 0.017228,
        }
    }
}

impl CostParams {
    pub fn with_speed(speed_mps: f64) -> Self {
        Self {
            speed_mps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed_mps.is_finite() && self.speed_mps > 0.0) {
            return Err(PlanError::InvalidInput(format!(
                "speed must be positive, got {}",
                self.speed_mps
            )));
        }
        if !(self.battery_endurance_min.is_finite() && self.battery_endurance_min > 0.0) {
            return Err(PlanError::InvalidInput(format!(
                "battery endurance must be positive, got {}",
                self.battery_endurance_min
            )));
        }
        if !(self.turn_delay_shape + self.speed_mps.abs() > 0.0) {
            return Err(PlanError::InvalidInput(
                "turn-delay denominator must be positive".into(),
            ));
        }
        if !(self.cost_rate_per_min.is_finite() && self.cost_rate_per_min >= 0.0) {
            return Err(PlanError::InvalidInput(format!(
                "cost rate must be non-negative, got {}",
                self.cost_rate_per_min
            )));
        }
        Ok(())
    }
}

/// Flight duration in minutes for one path.
pub fn flight_duration_min(length_m: f64, turns: usize, params: &CostParams) -> f64 {
    let delay = params.turn_delay_coeff * params.speed_mps
        / (params.turn_delay_shape + params.speed_mps.abs());
    let seconds = length_m / params.speed_mps + turns as f64 * delay;
    seconds / 60.0
}

/// Batteries needed to cover a flight duration; at least one.
pub fn batteries_needed(duration_min: f64, endurance_min: f64) -> u32 {
    ((duration_min / endurance_min).ceil() as u32).max(1)
}

/// Gear deployment time in minutes for a fleet of `v_n` UAVs.
pub fn deployment_time_min(v_n: usize) -> f64 {
    DEPLOY_BASE_MIN + DEPLOY_PER_UAV_MIN * v_n as f64
}

/// Downtime in minutes for mid-mission battery changes: per change, fly
/// twice an indicative transit distance derived from the survey area, plus
/// the swap itself for every UAV.
pub fn change_battery_delay_min(batteries: u32, area_roi_m2: f64, speed_mps: f64, v_n: usize) -> f64 {
    if batteries <= 1 {
        return 0.0;
    }
    let transit_min = 2.0 * area_roi_m2.sqrt() / (3.0 * speed_mps * 60.0);
    (batteries - 1) as f64 * (transit_min + BATTERY_SWAP_MIN * v_n as f64)
}

/// Per-UAV slice of the cost report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavCostBreakdown {
    pub uav_id: usize,
    pub length_m: f64,
    pub turns: usize,
    pub flight_duration_min: f64,
    pub batteries: u32,
}

/// Fleet-level mission cost summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionCostReport {
    pub per_uav: Vec<UavCostBreakdown>,
    /// Maximum per-UAV flight duration.
    pub flight_time_min: f64,
    pub deployment_time_min: f64,
    pub change_battery_delay_min: f64,
    /// Flight time + deployment + battery delay.
    pub total_time_min: f64,
    /// Batteries each UAV must carry (fleet maximum).
    pub batteries_per_uav: u32,
    pub flight_cost: f64,
}

/// Evaluates the full cost chain for one mission. `legs` holds `(length_m,
/// turns)` per UAV, in UAV order.
pub fn total_time_and_cost(
    legs: &[(f64, usize)],
    area_roi_m2: f64,
    params: &CostParams,
) -> Result<MissionCostReport> {
    params.validate()?;
    if legs.is_empty() {
        return Err(PlanError::InvalidInput(
            "cost model needs at least one UAV".into(),
        ));
    }
    if !(area_roi_m2.is_finite() && area_roi_m2 >= 0.0) {
        return Err(PlanError::InvalidInput(format!(
            "survey area must be non-negative, got {area_roi_m2}"
        )));
    }
    for &(len, _) in legs {
        if !(len.is_finite() && len >= 0.0) {
            return Err(PlanError::InvalidInput(format!(
                "path length must be non-negative, got {len}"
            )));
        }
    }

    let v_n = legs.len();
    let per_uav: Vec<UavCostBreakdown> = legs
        .iter()
        .enumerate()
        .map(|(uav_id, &(length_m, turns))| {
            let fd = flight_duration_min(length_m, turns, params);
            UavCostBreakdown {
                uav_id,
                length_m,
                turns,
                flight_duration_min: fd,
                batteries: batteries_needed(fd, params.battery_endurance_min),
            }
        })
        .collect();
    let flight_time_min = per_uav
        .iter()
        .map(|u| u.flight_duration_min)
        .fold(0.0, f64::max);
    let batteries_per_uav = per_uav.iter().map(|u| u.batteries).max().unwrap_or(1);
    let deployment_time_min = deployment_time_min(v_n);
    let change_battery_delay_min =
        change_battery_delay_min(batteries_per_uav, area_roi_m2, params.speed_mps, v_n);
    let total_time_min = flight_time_min + deployment_time_min + change_battery_delay_min;
    let flight_cost = (total_time_min
        - deployment_time_min
        - (batteries_per_uav - 1) as f64 * BATTERY_SWAP_MIN)
        * v_n as f64
        * params.cost_rate_per_min;
    Ok(MissionCostReport {
        per_uav,
        flight_time_min,
        deployment_time_min,
        change_battery_delay_min,
        total_time_min,
        batteries_per_uav,
        flight_cost,
    })
}

/// Builds the fleet report directly from an already-known flight time,
/// bypassing per-UAV path data (used by the standalone cost command).
/// `batteries` defaults to the count the endurance dictates.
pub fn report_from_flight_time(
    flight_time_min: f64,
    v_n: usize,
    area_roi_m2: f64,
    batteries: Option<u32>,
    params: &CostParams,
) -> Result<MissionCostReport> {
    params.validate()?;
    if v_n == 0 {
        return Err(PlanError::InvalidInput(
            "cost model needs at least one UAV".into(),
        ));
    }
    if !(flight_time_min.is_finite() && flight_time_min >= 0.0) {
        return Err(PlanError::InvalidInput(format!(
            "flight time must be non-negative, got {flight_time_min}"
        )));
    }
    if !(area_roi_m2.is_finite() && area_roi_m2 >= 0.0) {
        return Err(PlanError::InvalidInput(format!(
            "survey area must be non-negative, got {area_roi_m2}"
        )));
    }
    let batteries_per_uav = batteries
        .unwrap_or_else(|| batteries_needed(flight_time_min, params.battery_endurance_min))
        .max(1);
    let deployment_time_min = deployment_time_min(v_n);
    let change_battery_delay_min =
        change_battery_delay_min(batteries_per_uav, area_roi_m2, params.speed_mps, v_n);
    let total_time_min = flight_time_min + deployment_time_min + change_battery_delay_min;
    let flight_cost = (total_time_min
        - deployment_time_min
        - (batteries_per_uav - 1) as f64 * BATTERY_SWAP_MIN)
        * v_n as f64
        * params.cost_rate_per_min;
    Ok(MissionCostReport {
        per_uav: Vec::new(),
        flight_time_min,
        deployment_time_min,
        change_battery_delay_min,
        total_time_min,
        batteries_per_uav,
        flight_cost,
    })
}
