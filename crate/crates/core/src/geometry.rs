//! Inspection-sphere geometry: point lattice generation, illumination and
//! field-of-view predicates, and coverage bookkeeping.

use nalgebra::Vector3;

use crate::dynamics::Quaternion;
use crate::error::{Error, Result};

/// Spherical lattice of inspection points around the chief with per-point
/// inspected flags.
#[derive(Debug, Clone, PartialEq)]
pub struct InspectionGrid {
    points: Vec<Vector3<f64>>,
    inspected: Vec<bool>,
    radius: f64,
}

/// Sun direction state in the Hill frame. The sun angle decays at the mean
/// motion rate: `theta(t) = theta(0) - n t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SunState {
    /// Angle from the radial axis in the orbital plane [rad].
    pub theta: f64,
    /// Earth-sun distance [m].
    pub distance: f64,
}

impl SunState {
    /// Sun position vector in the Hill frame.
    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.theta.cos(), self.theta.sin(), 0.0) * self.distance
    }

    /// Sun state after `dt` seconds at mean motion `n`.
    pub fn advanced(&self, dt: f64, n: f64) -> SunState {
        SunState { theta: self.theta - n * dt, distance: self.distance }
    }
}

/// Optical sensor: boresight direction in the deputy frame and half-angle
/// field of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    pub boresight: Vector3<f64>,
    pub half_angle: f64,
}

impl SensorModel {
    pub fn new(boresight: Vector3<f64>, half_angle: f64) -> Result<Self> {
        if (boresight.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::config("sensor boresight must be a unit vector"));
        }
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::config("sensor half angle must lie in (0, pi/2)"));
        }
        Ok(SensorModel { boresight, half_angle })
    }
}

impl InspectionGrid {
    /// Deterministic quasi-uniform lattice of `n_total` points on the sphere
    /// of radius `radius` (Fibonacci spiral), all flagged uninspected.
    pub fn generate(n_total: usize, radius: f64) -> Result<Self> {
        if n_total < 4 {
            return Err(Error::config("inspection grid needs at least 4 points"));
        }
        if !(radius > 0.0) {
            return Err(Error::config("inspection sphere radius must be positive"));
        }
        let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
        let points = (0..n_total)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n_total as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden_angle * i as f64;
                Vector3::new(rho * phi.cos(), rho * phi.sin(), z) * radius
            })
            .collect();
        Ok(InspectionGrid { points, inspected: vec![false; n_total], radius })
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn inspected(&self) -> &[bool] {
        &self.inspected
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn total(&self) -> usize {
        self.points.len()
    }

    pub fn inspected_count(&self) -> usize {
        self.inspected.iter().filter(|&&b| b).count()
    }

    /// Coverage percentage.
    pub fn inspection_rate(&self) -> f64 {
        self.inspected_count() as f64 / self.total() as f64 * 100.0
    }

    /// Flags every point that is illuminated and inside the sensor FOV at the
    /// given deputy pose; returns how many flags were newly set. Flags are
    /// monotone. A deputy inside the inspection sphere sees nothing.
    pub fn update_inspected(
        &mut self,
        r: Vector3<f64>,
        q: &Quaternion,
        sensor: &SensorModel,
        sun_pos: Vector3<f64>,
    ) -> usize {
        let dist = r.norm();
        if dist <= self.radius {
            return 0;
        }
        let boresight_hill = q.dcm().transpose() * sensor.boresight;
        let cos_beta = sensor.half_angle.cos();
        let mut newly = 0;
        for (i, p) in self.points.iter().enumerate() {
            if self.inspected[i] {
                continue;
            }
            if is_illuminated(*p, sun_pos)
                && fov_conditions(*p, r, boresight_hill, cos_beta, self.radius)
            {
                self.inspected[i] = true;
                newly += 1;
            }
        }
        newly
    }

    /// Mean of the illuminated-but-uninspected points, or `None` when that
    /// set is empty.
    pub fn uninspected_centroid(&self, sun_pos: Vector3<f64>) -> Option<Vector3<f64>> {
        let mut sum = Vector3::zeros();
        let mut count = 0usize;
        for (i, p) in self.points.iter().enumerate() {
            if !self.inspected[i] && is_illuminated(*p, sun_pos) {
                sum += *p;
                count += 1;
            }
        }
        (count > 0).then(|| sum / count as f64)
    }
}

/// Illumination predicate: the point faces the sun but is not on the
/// terminator. The cosine ratio is clamped into [-1, 1] before the strict
/// upper test so the exactly-subsolar direction counts as illuminated.
pub fn is_illuminated(p: Vector3<f64>, sun_pos: Vector3<f64>) -> bool {
    let to_point = p - sun_pos;
    let denom = p.norm() * to_point.norm();
    if denom == 0.0 {
        return false;
    }
    let ratio = (p.dot(&to_point) / denom).clamp(-1.0, 1.0);
    ratio < 0.0
}

/// Both FOV conditions in cosine form: the point lies on the spherical cap
/// facing the deputy, and the line of sight falls inside the boresight cone.
fn fov_conditions(
    p: Vector3<f64>,
    r: Vector3<f64>,
    boresight_hill: Vector3<f64>,
    cos_beta: f64,
    sphere_radius: f64,
) -> bool {
    let r_norm = r.norm();
    let p_norm = p.norm();
    if p_norm == 0.0 {
        return false;
    }
    // Cap test: angle(p, r) <= acos(ds / |r|).
    if p.dot(&r) / (p_norm * r_norm) < sphere_radius / r_norm {
        return false;
    }
    // Cone test: cos(beta) <= (p - r) . b / |p - r|.
    let los = p - r;
    los.dot(&boresight_hill) / los.norm() >= cos_beta
}

/// Checked single-point FOV predicate. `boresight_hill` must already be
/// rotated into the Hill frame; the deputy must sit outside the inspection
/// sphere.
pub fn in_fov(
    p: Vector3<f64>,
    r: Vector3<f64>,
    boresight_hill: Vector3<f64>,
    half_angle: f64,
    sphere_radius: f64,
) -> Result<bool> {
    let dist = r.norm();
    if dist <= sphere_radius {
        return Err(Error::InsideInspectionSphere { dist, radius: sphere_radius });
    }
    Ok(fov_conditions(p, r, boresight_hill, half_angle.cos(), sphere_radius))
}
