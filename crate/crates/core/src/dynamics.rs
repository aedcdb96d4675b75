//! Relative translational and rotational dynamics of the deputy/chief pair.
//!
//! Translational motion follows the Clohessy-Wiltshire equations in the Hill
//! frame (chief on a circular orbit, close proximity). Attitude is tracked as
//! the deputy quaternion relative to the chief plus the chief's own inertial
//! attitude, with torque-free Euler rotation for the chief. All states advance
//! together through a classical fourth-order Runge-Kutta step with zero-order
//! hold on force and torque.

use nalgebra::{Matrix3, SVector, Vector3};

use crate::error::{Error, Result};

/// Unit quaternion with scalar-last layout: `v` holds the vector part
/// (q1, q2, q3) and `s` the scalar q4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub v: Vector3<f64>,
    pub s: f64,
}

impl Quaternion {
    pub fn new(v: Vector3<f64>, s: f64) -> Self {
        Quaternion { v, s }
    }

    pub fn identity() -> Self {
        Quaternion { v: Vector3::zeros(), s: 1.0 }
    }

    /// Builds the quaternion for a rotation of `angle` about `axis`
    /// (axis is normalized internally).
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        let half = 0.5 * angle;
        let n = axis.norm();
        if n < 1e-15 {
            return Quaternion::identity();
        }
        Quaternion { v: axis * (half.sin() / n), s: half.cos() }
    }

    pub fn norm(&self) -> f64 {
        (self.v.norm_squared() + self.s * self.s).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Quaternion { v: self.v / n, s: self.s / n }
    }

    pub fn conjugate(&self) -> Self {
        Quaternion { v: -self.v, s: self.s }
    }

    /// Quaternion composition chosen so that
    /// `dcm(a.compose(b)) == dcm(a) * dcm(b)`.
    pub fn compose(&self, other: &Quaternion) -> Quaternion {
        Quaternion {
            v: self.s * other.v + other.s * self.v - self.v.cross(&other.v),
            s: self.s * other.s - self.v.dot(&other.v),
        }
    }

    /// Direction cosine matrix mapping Hill/chief-frame coordinates into the
    /// deputy frame. Assumes a unit quaternion; see [`dcm_from_quat`] for the
    /// checked variant.
    pub fn dcm(&self) -> Matrix3<f64> {
        let (q1, q2, q3, q4) = (self.v.x, self.v.y, self.v.z, self.s);
        Matrix3::new(
            q1 * q1 - q2 * q2 - q3 * q3 + q4 * q4,
            2.0 * (q1 * q2 + q3 * q4),
            2.0 * (q1 * q3 - q2 * q4),
            2.0 * (q1 * q2 - q3 * q4),
            -q1 * q1 + q2 * q2 - q3 * q3 + q4 * q4,
            2.0 * (q2 * q3 + q1 * q4),
            2.0 * (q1 * q3 + q2 * q4),
            2.0 * (q2 * q3 - q1 * q4),
            -q1 * q1 - q2 * q2 + q3 * q3 + q4 * q4,
        )
    }
}

/// Deputy state relative to the chief: position/velocity in the Hill frame,
/// attitude quaternion of the deputy relative to the chief, and relative
/// angular velocity in the deputy frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeState {
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
    pub q: Quaternion,
    pub w: Vector3<f64>,
}

impl RelativeState {
    pub fn is_finite(&self) -> bool {
        self.r.iter().all(|x| x.is_finite())
            && self.v.iter().all(|x| x.is_finite())
            && self.q.v.iter().all(|x| x.is_finite())
            && self.q.s.is_finite()
            && self.w.iter().all(|x| x.is_finite())
    }
}

/// Chief attitude state: inertial attitude quaternion, angular velocity and
/// inertia. The chief carries no translational state (it is the Hill-frame
/// origin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiefState {
    pub q: Quaternion,
    pub w: Vector3<f64>,
    pub inertia: Matrix3<f64>,
}

impl ChiefState {
    pub fn new(q: Quaternion, w: Vector3<f64>, inertia: Matrix3<f64>) -> Result<Self> {
        if !is_spd(&inertia) {
            return Err(Error::InvalidInertia);
        }
        Ok(ChiefState { q, w, inertia })
    }
}

/// Deputy physical parameters and actuator limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyParams {
    /// Deputy mass [kg].
    pub mass: f64,
    /// Deputy inertia [kg m^2].
    pub inertia: Matrix3<f64>,
    /// Chief mean motion [rad/s].
    pub mean_motion: f64,
    /// Per-axis thrust limit [N].
    pub max_force: f64,
    /// Per-axis torque limit [N m].
    pub max_torque: f64,
}

impl BodyParams {
    pub fn new(
        mass: f64,
        inertia: Matrix3<f64>,
        mean_motion: f64,
        max_force: f64,
        max_torque: f64,
    ) -> Result<Self> {
        if !(mass > 0.0) || !(mean_motion > 0.0) || !(max_force > 0.0) || !(max_torque > 0.0) {
            return Err(Error::config(
                "body parameters require mass, mean motion and actuator limits > 0",
            ));
        }
        if !is_spd(&inertia) {
            return Err(Error::InvalidInertia);
        }
        Ok(BodyParams { mass, inertia, mean_motion, max_force, max_torque })
    }
}

fn is_spd(m: &Matrix3<f64>) -> bool {
    let sym = (m - m.transpose()).abs().max() <= 1e-9 * m.abs().max().max(1.0);
    sym && nalgebra::Cholesky::new(*m).is_some()
}

/// Skew-symmetric cross-product matrix of `rho`: `skew(rho) * x == rho x x`.
pub fn skew(rho: Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -rho.z, rho.y, rho.z, 0.0, -rho.x, -rho.y, rho.x, 0.0)
}

/// Checked direction cosine matrix from a quaternion. Rejects quaternions
/// whose norm deviates from one by more than 1e-6.
pub fn dcm_from_quat(q: &Quaternion) -> Result<Matrix3<f64>> {
    let dev = (q.norm() - 1.0).abs();
    if dev > 1e-6 {
        return Err(Error::InvalidQuaternion(dev));
    }
    Ok(q.dcm())
}

/// Clohessy-Wiltshire relative acceleration under a Hill-frame control force.
/// Disturbance forces are fixed at zero.
pub fn cw_accel(
    r: Vector3<f64>,
    v: Vector3<f64>,
    f_hill: Vector3<f64>,
    p: &BodyParams,
) -> Vector3<f64> {
    let n = p.mean_motion;
    Vector3::new(
        3.0 * n * n * r.x + 2.0 * n * v.y + f_hill.x / p.mass,
        -2.0 * n * v.x + f_hill.y / p.mass,
        -n * n * r.z + f_hill.z / p.mass,
    )
}

/// Quaternion kinematics for angular velocity `w` expressed in the rotating
/// (deputy) frame. Returns the raw derivative, not a unit quaternion.
pub fn quat_rate(q: &Quaternion, w: Vector3<f64>) -> Quaternion {
    Quaternion {
        v: -0.5 * w.cross(&q.v) + 0.5 * q.s * w,
        s: -0.5 * w.dot(&q.v),
    }
}

/// Relative angular acceleration of the deputy with respect to the chief.
/// `chief_wdot` comes from [`chief_euler_rate`]; disturbance torque is zero.
pub fn relative_att_accel(
    state: &RelativeState,
    chief: &ChiefState,
    chief_wdot: Vector3<f64>,
    tau: Vector3<f64>,
    p: &BodyParams,
) -> Result<Vector3<f64>> {
    let jd_inv = p
        .inertia
        .try_inverse()
        .ok_or(Error::InvalidInertia)?;
    Ok(relative_att_accel_with_inv(state, chief, chief_wdot, tau, &p.inertia, &jd_inv))
}

fn relative_att_accel_with_inv(
    state: &RelativeState,
    chief: &ChiefState,
    chief_wdot: Vector3<f64>,
    tau: Vector3<f64>,
    jd: &Matrix3<f64>,
    jd_inv: &Matrix3<f64>,
) -> Vector3<f64> {
    let c = state.q.normalized().dcm();
    let wc_d = c * chief.w;
    let wc_skew = skew(wc_d);
    let a = -jd * wc_skew - wc_skew * jd + skew(jd * (state.w + wc_d));
    let h = -wc_skew * (jd * wc_d) - jd * (c * chief_wdot);
    jd_inv * (a * state.w + h + tau)
}

/// Torque-free Euler rotation rate of the chief.
pub fn chief_euler_rate(chief: &ChiefState) -> Vector3<f64> {
    let jc_inv = chief
        .inertia
        .try_inverse()
        .expect("chief inertia invertible by construction");
    -(jc_inv * chief.w.cross(&(chief.inertia * chief.w)))
}

/// Per-step integrator diagnostics: quaternion norm deviation accumulated
/// before renormalization.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepDiagnostics {
    pub quat_drift: f64,
    pub chief_quat_drift: f64,
}

const STATE_DIM: usize = 20;
type PackedState = SVector<f64, STATE_DIM>;

fn pack(state: &RelativeState, chief: &ChiefState) -> PackedState {
    let mut x = PackedState::zeros();
    x.fixed_rows_mut::<3>(0).copy_from(&state.r);
    x.fixed_rows_mut::<3>(3).copy_from(&state.v);
    x.fixed_rows_mut::<3>(6).copy_from(&state.q.v);
    x[9] = state.q.s;
    x.fixed_rows_mut::<3>(10).copy_from(&state.w);
    x.fixed_rows_mut::<3>(13).copy_from(&chief.q.v);
    x[16] = chief.q.s;
    x.fixed_rows_mut::<3>(17).copy_from(&chief.w);
    x
}

fn unpack(x: &PackedState, inertia: Matrix3<f64>) -> (RelativeState, ChiefState) {
    (
        RelativeState {
            r: x.fixed_rows::<3>(0).into(),
            v: x.fixed_rows::<3>(3).into(),
            q: Quaternion::new(x.fixed_rows::<3>(6).into(), x[9]),
            w: x.fixed_rows::<3>(10).into(),
        },
        ChiefState {
            q: Quaternion::new(x.fixed_rows::<3>(13).into(), x[16]),
            w: x.fixed_rows::<3>(17).into(),
            inertia,
        },
    )
}

/// Classical RK4 step of the joint deputy/chief state under zero-order-hold
/// force (Hill frame) and torque (deputy frame). Quaternions are renormalized
/// after the step; the pre-renormalization drift is reported in the
/// diagnostics.
pub fn rk4_step(
    state: &RelativeState,
    chief: &ChiefState,
    f_hill: Vector3<f64>,
    tau: Vector3<f64>,
    p: &BodyParams,
    h: f64,
) -> Result<(RelativeState, ChiefState)> {
    rk4_step_diag(state, chief, f_hill, tau, p, h).map(|(s, c, _)| (s, c))
}

/// [`rk4_step`] variant that also returns integrator diagnostics.
pub fn rk4_step_diag(
    state: &RelativeState,
    chief: &ChiefState,
    f_hill: Vector3<f64>,
    tau: Vector3<f64>,
    p: &BodyParams,
    h: f64,
) -> Result<(RelativeState, ChiefState, StepDiagnostics)> {
    if !(h > 0.0) {
        return Err(Error::config("integration step must be positive"));
    }
    let jd_inv = p.inertia.try_inverse().ok_or(Error::InvalidInertia)?;
    let jc = chief.inertia;

    let deriv = |x: &PackedState| -> PackedState {
        let (s, c) = unpack(x, jc);
        let mut dx = PackedState::zeros();
        dx.fixed_rows_mut::<3>(0).copy_from(&s.v);
        dx.fixed_rows_mut::<3>(3)
            .copy_from(&cw_accel(s.r, s.v, f_hill, p));
        let qdot = quat_rate(&s.q, s.w);
        dx.fixed_rows_mut::<3>(6).copy_from(&qdot.v);
        dx[9] = qdot.s;
        let wc_dot = chief_euler_rate(&c);
        dx.fixed_rows_mut::<3>(10).copy_from(&relative_att_accel_with_inv(
            &s, &c, wc_dot, tau, &p.inertia, &jd_inv,
        ));
        let qc_dot = quat_rate(&c.q, c.w);
        dx.fixed_rows_mut::<3>(13).copy_from(&qc_dot.v);
        dx[16] = qc_dot.s;
        dx.fixed_rows_mut::<3>(17).copy_from(&wc_dot);
        dx
    };

    let x0 = pack(state, chief);
    let k1 = deriv(&x0);
    let k2 = deriv(&(x0 + 0.5 * h * k1));
    let k3 = deriv(&(x0 + 0.5 * h * k2));
    let k4 = deriv(&(x0 + h * k3));
    let x1 = x0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    let (mut s1, mut c1) = unpack(&x1, jc);
    let diag = StepDiagnostics {
        quat_drift: (s1.q.norm() - 1.0).abs(),
        chief_quat_drift: (c1.q.norm() - 1.0).abs(),
    };
    s1.q = s1.q.normalized();
    c1.q = c1.q.normalized();

    if !s1.is_finite() || !c1.w.iter().all(|x| x.is_finite()) {
        return Err(Error::PropagationDiverged);
    }
    Ok((s1, c1, diag))
}
