//! Guidance and control: projection angles toward the uninspected-point
//! centroid, per-axis fuzzy force evaluation in the deputy frame, the Hill
//! transform, and the PD attitude law.

use nalgebra::{Matrix3, Vector3};

use crate::dynamics::Quaternion;
use crate::error::{Error, Result};
use crate::fuzzy::{CompiledFis, FisParams};

/// Inputs consumed by the force FISs at one control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceInputs {
    /// Range to the chief [m].
    pub dist: f64,
    /// Relative velocity expressed in the deputy frame [m/s].
    pub vel: Vector3<f64>,
    /// Signed bearing of the target centroid in the orbital (i-j) plane [rad].
    pub lambda_u: f64,
    /// Signed bearing of the target centroid in the radial/normal (i-k) plane [rad].
    pub eta_u: f64,
    /// Centroid of illuminated, uninspected points (held value when the live
    /// set is empty) [m].
    pub p_u: Vector3<f64>,
}

/// PD attitude gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeGains {
    pub kp: Matrix3<f64>,
    pub kd: Matrix3<f64>,
}

impl Default for AttitudeGains {
    /// Tuned for the 10 s zero-order-hold control interval with unit deputy
    /// inertia: natural frequency 0.032 rad/s at near-critical damping, which
    /// keeps the sampled loop well inside its stability disc (Kd*T/J = 0.6)
    /// and the slew rate gentle enough for tight quaternion-norm budgets.
    fn default() -> Self {
        AttitudeGains { kp: Matrix3::identity() * 0.002, kd: Matrix3::identity() * 0.06 }
    }
}

/// Which attitude the PD loop drives toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointingMode {
    /// Slew so the sensor boresight points at the chief's center.
    #[default]
    BoresightAtChief,
    /// Keep the deputy frame aligned with the chief/Hill frame.
    ChiefFrameAlignment,
}

/// Signed projection angles of the centroid direction relative to the deputy
/// position, with degeneracy flags for vanishing in-plane projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionAngles {
    pub lambda_u: f64,
    pub eta_u: f64,
    pub lambda_degenerate: bool,
    pub eta_degenerate: bool,
}

const DEGENERATE_NORM: f64 = 1e-9;

/// Signed angle from the 2-D projection of `r` to the projection of `p_u` in
/// the i-j plane (`lambda_u`) and the i-k plane (`eta_u`). Degenerate
/// projections report angle 0 with the corresponding flag set.
pub fn projection_angles(r: Vector3<f64>, p_u: Vector3<f64>) -> ProjectionAngles {
    let plane_angle = |ax: f64, ay: f64, bx: f64, by: f64| -> (f64, bool) {
        let na = (ax * ax + ay * ay).sqrt();
        let nb = (bx * bx + by * by).sqrt();
        if na < DEGENERATE_NORM || nb < DEGENERATE_NORM {
            (0.0, true)
        } else {
            ((ax * by - ay * bx).atan2(ax * bx + ay * by), false)
        }
    };
    let (lambda_u, lambda_degenerate) = plane_angle(r.x, r.y, p_u.x, p_u.y);
    let (eta_u, eta_degenerate) = plane_angle(r.x, r.z, p_u.x, p_u.z);
    ProjectionAngles { lambda_u, eta_u, lambda_degenerate, eta_degenerate }
}

fn clamp_axes(v: Vector3<f64>, limit: f64) -> Vector3<f64> {
    v.map(|x| x.clamp(-limit, limit))
}

/// Per-axis deputy-frame force from the three axis FISs, clamped to the
/// thrust limit. Input layout: x and y take (dist, vel_axis, lambda_u), z
/// takes (dist, vel_z, eta_u).
pub fn fis_force(
    fis_x: &FisParams,
    fis_y: &FisParams,
    fis_z: &FisParams,
    g: &GuidanceInputs,
    max_force: f64,
) -> Vector3<f64> {
    let raw = Vector3::new(
        fis_x.evaluate(&[g.dist, g.vel.x, g.lambda_u]),
        fis_y.evaluate(&[g.dist, g.vel.y, g.lambda_u]),
        fis_z.evaluate(&[g.dist, g.vel.z, g.eta_u]),
    );
    clamp_axes(raw, max_force)
}

/// Deputy-frame force rotated into the Hill frame.
pub fn force_to_hill(f_deputy: Vector3<f64>, q: &Quaternion) -> Vector3<f64> {
    q.dcm().transpose() * f_deputy
}

/// Attitude (relative to the Hill frame) that points the boresight at the
/// chief's center with the smallest rotation from identity.
pub fn target_attitude(r: Vector3<f64>, boresight: Vector3<f64>) -> Quaternion {
    let want = -r.normalize();
    let b = boresight.normalize();
    let cos_angle = b.dot(&want).clamp(-1.0, 1.0);
    let axis = b.cross(&want);
    if axis.norm() < 1e-12 {
        if cos_angle > 0.0 {
            return Quaternion::identity();
        }
        // Anti-parallel: rotate about any axis orthogonal to the boresight.
        let ortho = if b.x.abs() < 0.9 {
            b.cross(&Vector3::x())
        } else {
            b.cross(&Vector3::y())
        };
        return Quaternion::from_axis_angle(ortho, std::f64::consts::PI);
    }
    Quaternion::from_axis_angle(axis, cos_angle.acos())
}

/// Error quaternion of the current attitude relative to the target:
/// `dcm(err) = dcm(current) * dcm(target)^T`. With this convention the PD
/// law `-Kp qe - Kd w` rotates the deputy toward the target (for an identity
/// target it reduces to feedback on the relative quaternion itself).
pub fn attitude_error(current: &Quaternion, target: &Quaternion) -> Quaternion {
    current.compose(&target.conjugate())
}

/// Boresight pointing error as an error quaternion in the deputy frame,
/// relative to the current attitude. Only the two pointing axes are
/// commanded; the roll about the boresight is left to rate damping (the
/// sensor cone is symmetric about the boresight, so roll carries no
/// coverage information and commanding it would have the deputy chase the
/// twist of a moving minimal-rotation target).
pub fn pointing_error(q: &Quaternion, r: Vector3<f64>, boresight: Vector3<f64>) -> Quaternion {
    let dcm = q.dcm();
    let b_hill = dcm.transpose() * boresight.normalize();
    let want = -r.normalize();
    let cos_angle = b_hill.dot(&want).clamp(-1.0, 1.0);
    let axis_hill = b_hill.cross(&want);
    if axis_hill.norm() < 1e-12 {
        if cos_angle > 0.0 {
            return Quaternion::identity();
        }
        let ortho = if b_hill.x.abs() < 0.9 {
            b_hill.cross(&Vector3::x()).normalize()
        } else {
            b_hill.cross(&Vector3::y()).normalize()
        };
        let half = std::f64::consts::FRAC_PI_2;
        return Quaternion::new(-(dcm * ortho) * half.sin(), half.cos());
    }
    let axis_dep = dcm * axis_hill.normalize();
    let half = 0.5 * cos_angle.acos();
    Quaternion::new(-axis_dep * half.sin(), half.cos())
}

/// PD attitude torque with the shortest-rotation sign convention and
/// per-axis clamping.
pub fn pd_torque(
    q_err: &Quaternion,
    w: Vector3<f64>,
    gains: &AttitudeGains,
    max_torque: f64,
) -> Vector3<f64> {
    let qe = if q_err.s < 0.0 { -q_err.v } else { q_err.v };
    clamp_axes(-(gains.kp * qe) - gains.kd * w, max_torque)
}

/// Bundled controller: the three tuned axis FISs plus attitude gains.
#[derive(Debug, Clone)]
pub struct Controller {
    pub fis_x: FisParams,
    pub fis_y: FisParams,
    pub fis_z: FisParams,
    pub gains: AttitudeGains,
    pub pointing: PointingMode,
}

impl Controller {
    pub fn new(fis_x: FisParams, fis_y: FisParams, fis_z: FisParams) -> Result<Self> {
        for fis in [&fis_x, &fis_y, &fis_z] {
            fis.validate()?;
            if fis.inputs.len() != 3 {
                return Err(Error::config("axis FIS must take three inputs"));
            }
        }
        Ok(Controller {
            fis_x,
            fis_y,
            fis_z,
            gains: AttitudeGains::default(),
            pointing: PointingMode::default(),
        })
    }

    pub fn with_gains(mut self, gains: AttitudeGains) -> Self {
        self.gains = gains;
        self
    }

    /// Compiles the three FISs for repeated evaluation.
    pub fn compile(&self) -> Result<CompiledController> {
        Ok(CompiledController {
            fis: [
                CompiledFis::new(&self.fis_x)?,
                CompiledFis::new(&self.fis_y)?,
                CompiledFis::new(&self.fis_z)?,
            ],
            gains: self.gains,
            pointing: self.pointing,
        })
    }
}

/// Episode-ready controller with precomputed defuzzification grids.
#[derive(Debug, Clone)]
pub struct CompiledController {
    fis: [CompiledFis; 3],
    pub gains: AttitudeGains,
    pub pointing: PointingMode,
}

impl CompiledController {
    /// Raw (pre-clamp) deputy-frame force command.
    pub fn force_raw(&self, g: &GuidanceInputs) -> Vector3<f64> {
        Vector3::new(
            self.fis[0].evaluate(&[g.dist, g.vel.x, g.lambda_u]),
            self.fis[1].evaluate(&[g.dist, g.vel.y, g.lambda_u]),
            self.fis[2].evaluate(&[g.dist, g.vel.z, g.eta_u]),
        )
    }
}

/// Default hand-designed controller: distance regulation about 75 m on the
/// radial channel, centroid chasing on the transverse channels, velocity
/// damping everywhere. Serves as the training warm start and as a sane
/// out-of-the-box policy.
pub fn default_controller() -> Controller {
    use crate::fuzzy::{GaussianMf, RuleTable, VariableSpec, MF_COUNT};

    let dist = VariableSpec::new(
        0.0,
        200.0,
        [
            GaussianMf::new(0.0, 30.0),
            GaussianMf::new(40.0, 25.0),
            GaussianMf::new(70.0, 25.0),
            GaussianMf::new(120.0, 35.0),
            GaussianMf::new(200.0, 45.0),
        ],
    )
    .unwrap();
    let vel = VariableSpec::new(
        -1.0,
        1.0,
        [
            GaussianMf::new(-1.0, 0.35),
            GaussianMf::new(-0.2, 0.1),
            GaussianMf::new(0.0, 0.1),
            GaussianMf::new(0.2, 0.1),
            GaussianMf::new(1.0, 0.35),
        ],
    )
    .unwrap();
    let angle = VariableSpec::new(
        -std::f64::consts::PI,
        std::f64::consts::PI,
        [
            GaussianMf::new(-std::f64::consts::PI, 1.0),
            GaussianMf::new(-std::f64::consts::FRAC_PI_2, 0.7),
            GaussianMf::new(0.0, 0.5),
            GaussianMf::new(std::f64::consts::FRAC_PI_2, 0.7),
            GaussianMf::new(std::f64::consts::PI, 1.0),
        ],
    )
    .unwrap();
    let out = VariableSpec::new(
        -1.0,
        1.0,
        [
            GaussianMf::new(-1.0, 0.08),
            GaussianMf::new(-0.03, 0.04),
            GaussianMf::new(0.0, 0.04),
            GaussianMf::new(0.03, 0.04),
            GaussianMf::new(1.0, 0.08),
        ],
    )
    .unwrap();

    // Demand sums map to output levels with the full-thrust extremes held
    // back for genuine emergencies (|sum| >= 3): the extreme output MFs are
    // pinned at +-f_max, so letting routine two-level demands reach them
    // would slam the thrusters during ordinary cruising.
    let level = |sum: i32| -> u8 {
        match sum {
            i32::MIN..=-3 => 0,
            -2..=-1 => 1,
            0 => 2,
            1..=2 => 3,
            _ => 4,
        }
    };
    let mut entries_x = vec![0u8; MF_COUNT.pow(3)];
    let mut entries_y = vec![0u8; MF_COUNT.pow(3)];
    let mut entries_z = vec![0u8; MF_COUNT.pow(3)];
    // Bearing response favors counterclockwise circulation: the sun sweeps
    // the lit hemisphere clockwise at the orbit rate, so a deputy circling
    // the same way never meets freshly lit points. Counterclockwise targets
    // get full pursuit, behind-the-back targets are chased counterclockwise
    // too, and only nearby clockwise targets get a gentle reverse.
    let ang_gain = [2, -1, 0, 2, 2];
    for i in 0..MF_COUNT {
        for j in 0..MF_COUNT {
            for k in 0..MF_COUNT {
                let flat = i * MF_COUNT * MF_COUNT + j * MF_COUNT + k;
                // Distance: close -> push out, far -> pull in.
                let c_dist = 2 - i as i32;
                // Velocity damping opposes the axis rate.
                let c_vel = 2 - j as i32;
                let c_ang = ang_gain[k];
                entries_x[flat] = level(c_dist + c_vel);
                entries_y[flat] = level(c_ang + c_vel);
                entries_z[flat] = level(c_ang + c_vel);
            }
        }
    }

    let table = |entries: Vec<u8>| RuleTable::new(vec![MF_COUNT; 3], entries).unwrap();
    let fis = |entries: Vec<u8>| {
        FisParams::new(vec![dist.clone(), vel.clone(), angle.clone()], out.clone(), table(entries))
            .unwrap()
    };
    Controller::new(fis(entries_x), fis(entries_y), fis(entries_z)).unwrap()
}
