//! On-disk formats: JSON scenario and controller documents with explicit
//! unit-suffixed keys, RFC-4180 CSV trajectory and campaign exports.
//!
//! Scenario files reject unknown keys and fill missing ones from the nominal
//! parameter table. Controller files round-trip every parameter bit-exactly.

use std::fs;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::dynamics::Quaternion;
use crate::error::{Error, Result};
use crate::fuzzy::FisParams;
use crate::ga::{Chromosome, GaConfig};
use crate::guidance::{AttitudeGains, Controller, PointingMode};
use crate::sim::{EpisodeConfig, EpisodeResult, McSummary};

pub const CONTROLLER_FILE_VERSION: u32 = 1;

/// Scenario document. Every key carries its unit; unknown keys are rejected
/// and missing keys fall back to the nominal table defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFile {
    pub duration_s: f64,
    pub control_interval_s: f64,
    pub integrator_substeps: usize,
    pub mean_motion_rad_per_s: f64,
    pub deputy_mass_kg: f64,
    pub deputy_inertia_kg_m2: [[f64; 3]; 3],
    pub chief_inertia_kg_m2: [[f64; 3]; 3],
    pub max_force_n: f64,
    pub max_torque_nm: f64,
    pub initial_position_m: [f64; 3],
    pub initial_velocity_m_per_s: [f64; 3],
    /// Deputy attitude relative to the chief, vector part first, scalar last.
    pub initial_quaternion_xyzw: [f64; 4],
    /// Defaults to the chief rate `[0, 0, n]` when omitted.
    pub initial_angular_velocity_rad_per_s: Option<[f64; 3]>,
    pub chief_quaternion_xyzw: [f64; 4],
    /// Defaults to `[0, 0, n]` when omitted.
    pub chief_angular_velocity_rad_per_s: Option<[f64; 3]>,
    pub fov_half_angle_deg: f64,
    pub boresight_deputy_frame: [f64; 3],
    pub inspection_point_count: usize,
    pub inspection_radius_m: f64,
    pub sun_initial_angle_rad: f64,
    pub sun_distance_m: f64,
    pub min_distance_m: f64,
    pub max_distance_m: f64,
    pub inspection_threshold_pct: f64,
    pub early_stop: bool,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        ScenarioFile::from_config(&EpisodeConfig::default())
    }
}

fn mat_to_rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = m[(r, c)];
        }
    }
    out
}

fn rows_to_mat(rows: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| rows[r][c])
}

impl ScenarioFile {
    pub fn from_config(cfg: &EpisodeConfig) -> Self {
        ScenarioFile {
            duration_s: cfg.duration,
            control_interval_s: cfg.control_dt,
            integrator_substeps: cfg.substeps,
            mean_motion_rad_per_s: cfg.body.mean_motion,
            deputy_mass_kg: cfg.body.mass,
            deputy_inertia_kg_m2: mat_to_rows(&cfg.body.inertia),
            chief_inertia_kg_m2: mat_to_rows(&cfg.chief.inertia),
            max_force_n: cfg.body.max_force,
            max_torque_nm: cfg.body.max_torque,
            initial_position_m: cfg.initial.r.into(),
            initial_velocity_m_per_s: cfg.initial.v.into(),
            initial_quaternion_xyzw: [
                cfg.initial.q.v.x,
                cfg.initial.q.v.y,
                cfg.initial.q.v.z,
                cfg.initial.q.s,
            ],
            initial_angular_velocity_rad_per_s: Some(cfg.initial.w.into()),
            chief_quaternion_xyzw: [cfg.chief.q.v.x, cfg.chief.q.v.y, cfg.chief.q.v.z, cfg.chief.q.s],
            chief_angular_velocity_rad_per_s: Some(cfg.chief.w.into()),
            fov_half_angle_deg: cfg.sensor.half_angle.to_degrees(),
            boresight_deputy_frame: cfg.sensor.boresight.into(),
            inspection_point_count: cfg.grid.points,
            inspection_radius_m: cfg.grid.radius,
            sun_initial_angle_rad: cfg.sun.initial_angle,
            sun_distance_m: cfg.sun.distance,
            min_distance_m: cfg.constraints.min_distance,
            max_distance_m: cfg.constraints.max_distance,
            inspection_threshold_pct: cfg.constraints.inspection_threshold,
            early_stop: cfg.early_stop,
        }
    }

    pub fn to_config(&self) -> Result<EpisodeConfig> {
        let n = self.mean_motion_rad_per_s;
        let spin_default = [0.0, 0.0, n];
        let cfg = EpisodeConfig {
            duration: self.duration_s,
            control_dt: self.control_interval_s,
            substeps: self.integrator_substeps,
            initial: crate::dynamics::RelativeState {
                r: Vector3::from(self.initial_position_m),
                v: Vector3::from(self.initial_velocity_m_per_s),
                q: Quaternion::new(
                    Vector3::new(
                        self.initial_quaternion_xyzw[0],
                        self.initial_quaternion_xyzw[1],
                        self.initial_quaternion_xyzw[2],
                    ),
                    self.initial_quaternion_xyzw[3],
                ),
                w: Vector3::from(self.initial_angular_velocity_rad_per_s.unwrap_or(spin_default)),
            },
            chief: crate::dynamics::ChiefState {
                q: Quaternion::new(
                    Vector3::new(
                        self.chief_quaternion_xyzw[0],
                        self.chief_quaternion_xyzw[1],
                        self.chief_quaternion_xyzw[2],
                    ),
                    self.chief_quaternion_xyzw[3],
                ),
                w: Vector3::from(self.chief_angular_velocity_rad_per_s.unwrap_or(spin_default)),
                inertia: rows_to_mat(&self.chief_inertia_kg_m2),
            },
            body: crate::dynamics::BodyParams {
                mass: self.deputy_mass_kg,
                inertia: rows_to_mat(&self.deputy_inertia_kg_m2),
                mean_motion: n,
                max_force: self.max_force_n,
                max_torque: self.max_torque_nm,
            },
            sensor: crate::geometry::SensorModel {
                boresight: Vector3::from(self.boresight_deputy_frame),
                half_angle: self.fov_half_angle_deg.to_radians(),
            },
            grid: crate::sim::GridSpec {
                points: self.inspection_point_count,
                radius: self.inspection_radius_m,
            },
            sun: crate::sim::SunSpec {
                initial_angle: self.sun_initial_angle_rad,
                distance: self.sun_distance_m,
            },
            constraints: crate::sim::Constraints {
                min_distance: self.min_distance_m,
                max_distance: self.max_distance_m,
                inspection_threshold: self.inspection_threshold_pct,
            },
            early_stop: self.early_stop,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// A set of training scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSetFile {
    pub scenarios: Vec<ScenarioFile>,
}

impl ScenarioSetFile {
    /// The eight canonical octant training scenarios.
    pub fn training_default() -> Self {
        ScenarioSetFile {
            scenarios: crate::sim::training_scenarios()
                .iter()
                .map(ScenarioFile::from_config)
                .collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let set: ScenarioSetFile = serde_json::from_str(&text)?;
        if set.scenarios.is_empty() {
            return Err(Error::config("scenario set is empty"));
        }
        Ok(set)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn to_configs(&self) -> Result<Vec<EpisodeConfig>> {
        self.scenarios.iter().map(|s| s.to_config()).collect()
    }
}

/// Training provenance stored alongside a tuned controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub ga: GaConfig,
    pub seed: u64,
    pub fitness: f64,
    pub scenario_count: usize,
    pub warm_started: bool,
}

/// Versioned controller document: the three axis FISs, attitude gains and
/// optional training provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerFile {
    pub version: u32,
    pub fis_x: FisParams,
    pub fis_y: FisParams,
    pub fis_z: FisParams,
    pub gains_kp_nm: [[f64; 3]; 3],
    pub gains_kd_nms: [[f64; 3]; 3],
    pub pointing: PointingKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointingKind {
    BoresightAtChief,
    ChiefFrameAlignment,
}

impl From<PointingMode> for PointingKind {
    fn from(mode: PointingMode) -> Self {
        match mode {
            PointingMode::BoresightAtChief => PointingKind::BoresightAtChief,
            PointingMode::ChiefFrameAlignment => PointingKind::ChiefFrameAlignment,
        }
    }
}

impl From<PointingKind> for PointingMode {
    fn from(kind: PointingKind) -> Self {
        match kind {
            PointingKind::BoresightAtChief => PointingMode::BoresightAtChief,
            PointingKind::ChiefFrameAlignment => PointingMode::ChiefFrameAlignment,
        }
    }
}

impl ControllerFile {
    pub fn from_controller(ctl: &Controller, provenance: Option<Provenance>) -> Self {
        ControllerFile {
            version: CONTROLLER_FILE_VERSION,
            fis_x: ctl.fis_x.clone(),
            fis_y: ctl.fis_y.clone(),
            fis_z: ctl.fis_z.clone(),
            gains_kp_nm: mat_to_rows(&ctl.gains.kp),
            gains_kd_nms: mat_to_rows(&ctl.gains.kd),
            pointing: ctl.pointing.into(),
            provenance,
        }
    }

    pub fn to_controller(&self) -> Result<Controller> {
        if self.version != CONTROLLER_FILE_VERSION {
            return Err(Error::ControllerVersion {
                found: self.version,
                expected: CONTROLLER_FILE_VERSION,
            });
        }
        let mut ctl = Controller::new(self.fis_x.clone(), self.fis_y.clone(), self.fis_z.clone())?
            .with_gains(AttitudeGains {
                kp: rows_to_mat(&self.gains_kp_nm),
                kd: rows_to_mat(&self.gains_kd_nms),
            });
        ctl.pointing = self.pointing.into();
        Ok(ctl)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Per-generation checkpoint written during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointFile {
    pub generation: usize,
    pub best_fitness: f64,
    pub ga: GaConfig,
    pub chromosome: Chromosome,
}

const TRAJECTORY_HEADER: [&str; 21] = [
    "t", "x", "y", "z", "vx", "vy", "vz", "q1", "q2", "q3", "q4", "wx", "wy", "wz", "fx", "fy",
    "fz", "tx", "ty", "tz", "newly_inspected",
];

/// Writes the trajectory log as tidy CSV, one row per control step. Floats
/// use the shortest round-trippable representation.
pub fn write_trajectory_csv(path: impl AsRef<Path>, result: &EpisodeResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = TRAJECTORY_HEADER.to_vec();
    header.push("cum_rate");
    w.write_record(&header)?;
    for s in &result.trajectory {
        let mut rec: Vec<String> = Vec::with_capacity(22);
        for v in [
            s.t, s.r.x, s.r.y, s.r.z, s.v.x, s.v.y, s.v.z, s.q.v.x, s.q.v.y, s.q.v.z, s.q.s,
            s.w.x, s.w.y, s.w.z, s.force.x, s.force.y, s.force.z, s.torque.x, s.torque.y,
            s.torque.z,
        ] {
            rec.push(format_float(v));
        }
        rec.push(s.newly_inspected.to_string());
        rec.push(format_float(s.cumulative_rate));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn format_float(v: f64) -> String {
    let mut buf = ryu_format(v);
    // Trim the ".0" suffix ryu adds to integral values for tidier files;
    // parsing is unaffected.
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(v: f64) -> String {
    // serde_json uses ryu internally; going through Value keeps the exact
    // shortest round-trip representation without an extra dependency.
    serde_json::to_string(&v).expect("finite float")
}

/// Minimal parsed trajectory row: time, Hill force, newly inspected count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub force: Vector3<f64>,
    pub newly_inspected: usize,
    pub cumulative_rate: f64,
}

/// Reads back a trajectory CSV written by [`write_trajectory_csv`].
pub fn read_trajectory_csv(path: impl AsRef<Path>) -> Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in r.records() {
        let rec = record?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::config(format!("trajectory row missing column {i}")))?
                .parse::<f64>()
                .map_err(|e| Error::config(format!("bad float in trajectory csv: {e}")))
        };
        rows.push(TrajectoryRow {
            t: get(0)?,
            force: Vector3::new(get(14)?, get(15)?, get(16)?),
            newly_inspected: get(20)? as usize,
            cumulative_rate: get(21)?,
        });
    }
    Ok(rows)
}

/// Writes per-run campaign results, one row per episode.
pub fn write_mc_runs_csv(path: impl AsRef<Path>, results: &[EpisodeResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "run",
        "x0",
        "y0",
        "z0",
        "radius0",
        "delta_v_m_per_s",
        "inspection_rate_pct",
        "mean_distance_m",
        "min_distance_m",
        "max_distance_m",
        "collision",
        "corridor",
        "actuation",
    ])?;
    for (i, res) in results.iter().enumerate() {
        let r0 = res.trajectory.first().map(|s| s.r).unwrap_or_else(Vector3::zeros);
        w.write_record(&[
            i.to_string(),
            format_float(r0.x),
            format_float(r0.y),
            format_float(r0.z),
            format_float(r0.norm()),
            format_float(res.delta_v),
            format_float(res.inspection_rate),
            format_float(res.mean_distance),
            format_float(res.min_distance),
            format_float(res.max_distance),
            res.violations.collision.to_string(),
            res.violations.corridor.to_string(),
            res.violations.actuation.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the campaign summary in the familiar statistics layout: one row of
/// means, one of standard deviations.
pub fn write_mc_summary_csv(path: impl AsRef<Path>, summary: &McSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["statistic", "delta_v_m_per_s", "inspection_rate_pct", "mean_distance_m"])?;
    w.write_record(&[
        "Mean".to_string(),
        format_float(summary.delta_v_mean),
        format_float(summary.inspection_rate_mean),
        format_float(summary.mean_distance_mean),
    ])?;
    w.write_record(&[
        "Standard deviation".to_string(),
        format_float(summary.delta_v_std),
        format_float(summary.inspection_rate_std),
        format_float(summary.mean_distance_std),
    ])?;
    w.flush()?;
    Ok(())
}

/// Writes the per-generation best-fitness history.
pub fn write_fitness_csv(path: impl AsRef<Path>, history: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["generation", "best_fitness"])?;
    for (gen, fit) in history.iter().enumerate() {
        w.write_record(&[gen.to_string(), format_float(*fit)])?;
    }
    w.flush()?;
    Ok(())
}
