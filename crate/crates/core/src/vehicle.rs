//! Vehicle dynamics: the kinematic bicycle used by the high-level MPC and the
//! detailed planar two-track model with Pacejka tire forces used by the
//! low-level monitor.
//!
//! All operations are pure functions over value types. The discrete step for
//! both models is a forward-Euler integration at `dt`, with speed clamped at
//! zero (no reverse gear) and heading normalized to (-pi, pi] after every
//! step.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Wrap an angle to (-pi, pi]. In-range values pass through bit-exact.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let r = (a + PI).rem_euclid(TAU);
    let r = if r == 0.0 { TAU } else { r };
    r - PI
}

/// Shortest signed angular difference `a - b`, wrapped to (-pi, pi].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// State of the simplified kinematic bicycle: world position, heading, and
/// speed magnitude (never negative).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpleState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub v: f64,
}

impl SimpleState {
    pub fn new(x: f64, y: f64, psi: f64, v: f64) -> Self {
        Self { x, y, psi: wrap_angle(psi), v: v.max(0.0) }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.psi, self.v]
    }
}

/// State of the detailed model: world position, body-frame velocity
/// components, heading, and yaw rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetailedState {
    pub x: f64,
    pub y: f64,
    /// Longitudinal speed in the body frame.
    pub vx_body: f64,
    /// Lateral speed in the body frame.
    pub vy_body: f64,
    pub psi: f64,
    pub psi_dot: f64,
}

impl DetailedState {
    /// Detailed state matching a simple state: body velocity aligned with the
    /// heading, zero lateral speed and yaw rate.
    pub fn from_simple(s: &SimpleState) -> Self {
        Self { x: s.x, y: s.y, vx_body: s.v, vy_body: 0.0, psi: s.psi, psi_dot: 0.0 }
    }

    /// Simple-model view of this state: position, heading, speed magnitude.
    pub fn to_simple(&self) -> SimpleState {
        SimpleState {
            x: self.x,
            y: self.y,
            psi: self.psi,
            v: self.vx_body.hypot(self.vy_body),
        }
    }

    pub fn speed(&self) -> f64 {
        self.vx_body.hypot(self.vy_body)
    }
}

/// Steering angle and throttle/brake pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    /// Steering angle, rad.
    pub delta: f64,
    /// Throttle (> 0) or brake (< 0), dimensionless in [-1, 1].
    pub gamma: f64,
}

impl ControlInput {
    pub const ZERO: ControlInput = ControlInput { delta: 0.0, gamma: 0.0 };

    pub fn new(delta: f64, gamma: f64) -> Self {
        Self { delta, gamma }
    }

    /// Clamp both components to the admissible box.
    pub fn clamped(self, p: &VehicleParams) -> Self {
        Self {
            delta: self.delta.clamp(p.delta_min, p.delta_max),
            gamma: self.gamma.clamp(-1.0, 1.0),
        }
    }
}

/// Physical parameters shared by both models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleParams {
    /// Distance from the center of mass to the front axle, m.
    pub lf: f64,
    /// Distance from the center of mass to the rear axle, m.
    pub lr: f64,
    pub mass: f64,
    pub yaw_inertia: f64,
    /// Acceleration at full throttle, m/s^2.
    pub a_max: f64,
    /// Deceleration at full braking, m/s^2 (positive number).
    pub b_max: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Pacejka stiffness factor per axle.
    pub pacejka_b: f64,
    /// Pacejka shape factor per axle.
    pub pacejka_c: f64,
    /// Pacejka peak lateral force per axle, N.
    pub pacejka_d: f64,
    pub bbox_length: f64,
    pub bbox_width: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        let mass = 1500.0;
        Self {
            lf: 2.11,
            lr: 1.59,
            mass,
            yaw_inertia: 2500.0,
            a_max: 3.0,
            b_max: 8.0,
            delta_min: -0.61,
            delta_max: 0.61,
            pacejka_b: 10.0,
            pacejka_c: 1.9,
            pacejka_d: 0.9 * mass * 9.81 / 2.0,
            bbox_length: 4.22,
            bbox_width: 1.8,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("lf", self.lf),
            ("lr", self.lr),
            ("mass", self.mass),
            ("yaw_inertia", self.yaw_inertia),
            ("a_max", self.a_max),
            ("b_max", self.b_max),
            ("bbox_length", self.bbox_length),
            ("bbox_width", self.bbox_width),
        ];
        for (name, v) in pos {
            if !(v > 0.0) {
                return Err(Error::scenario(format!("vehicle_params.{name} must be > 0, got {v}")));
            }
        }
        if !(self.delta_min < 0.0 && self.delta_max > 0.0) {
            return Err(Error::scenario(format!(
                "vehicle_params steering bounds must satisfy delta_min < 0 < delta_max, got [{}, {}]",
                self.delta_min, self.delta_max
            )));
        }
        Ok(())
    }
}

/// Map throttle/brake input to acceleration: piecewise affine with slopes
/// `a_max` above zero and `b_max` below.
pub fn throttle_to_accel(gamma: f64, params: &VehicleParams) -> Result<f64> {
    if !(-1.0..=1.0).contains(&gamma) || gamma.is_nan() {
        return Err(Error::domain(format!("gamma must lie in [-1, 1], got {gamma}")));
    }
    Ok(accel_unchecked(gamma, params))
}

fn accel_unchecked(gamma: f64, params: &VehicleParams) -> f64 {
    if gamma >= 0.0 {
        gamma * params.a_max
    } else {
        gamma * params.b_max
    }
}

/// Slope of the throttle map at `gamma` (used by the linearization).
fn accel_slope(gamma: f64, params: &VehicleParams) -> f64 {
    if gamma >= 0.0 {
        params.a_max
    } else {
        params.b_max
    }
}

/// One forward-Euler step of the kinematic bicycle. Inputs are clamped to
/// their bounds, the resulting speed is clamped at zero, the heading is
/// wrapped.
pub fn simple_step(state: &SimpleState, u: ControlInput, dt: f64, params: &VehicleParams) -> SimpleState {
    debug_assert!(dt > 0.0);
    let u = u.clamped(params);
    let a = accel_unchecked(u.gamma, params);
    SimpleState {
        x: state.x + dt * state.v * state.psi.cos(),
        y: state.y + dt * state.v * state.psi.sin(),
        psi: wrap_angle(state.psi + dt * (state.v / params.lf) * u.delta.tan()),
        v: (state.v + dt * a).max(0.0),
    }
}

/// Affine approximation of [`simple_step`] around a nominal state/input pair:
/// `next ≈ a_mat * state + b_mat * u + c_vec`. Exact at the nominal by
/// construction of `c_vec`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedDynamics {
    pub a_mat: [[f64; 4]; 4],
    pub b_mat: [[f64; 2]; 4],
    pub c_vec: [f64; 4],
    pub dt: f64,
}

impl LinearizedDynamics {
    /// Evaluate the affine model.
    pub fn apply(&self, state: &[f64; 4], u: &[f64; 2]) -> [f64; 4] {
        let mut out = self.c_vec;
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.a_mat[i][j] * state[j];
            }
            for j in 0..2 {
                out[i] += self.b_mat[i][j] * u[j];
            }
        }
        out
    }
}

/// Jacobians of the (smooth, unclamped) discrete bicycle step at the nominal,
/// with the affine offset chosen so the model reproduces the true clamped and
/// wrapped [`simple_step`] at the nominal exactly.
pub fn linearize_simple(
    nominal_state: &SimpleState,
    nominal_u: ControlInput,
    dt: f64,
    params: &VehicleParams,
) -> LinearizedDynamics {
    debug_assert!(dt > 0.0);
    let u = nominal_u.clamped(params);
    let (sin_psi, cos_psi) = nominal_state.psi.sin_cos();
    let v = nominal_state.v;
    let tan_d = u.delta.tan();
    let cos_d = u.delta.cos();

    let a_mat = [
        [1.0, 0.0, -dt * v * sin_psi, dt * cos_psi],
        [0.0, 1.0, dt * v * cos_psi, dt * sin_psi],
        [0.0, 0.0, 1.0, dt * tan_d / params.lf],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let b_mat = [
        [0.0, 0.0],
        [0.0, 0.0],
        [dt * v / (params.lf * cos_d * cos_d), 0.0],
        [0.0, dt * accel_slope(u.gamma, params)],
    ];

    let next = simple_step(nominal_state, nominal_u, dt, params).as_array();
    let s = nominal_state.as_array();
    let uv = [u.delta, u.gamma];
    let mut c_vec = next;
    for i in 0..4 {
        for j in 0..4 {
            c_vec[i] -= a_mat[i][j] * s[j];
        }
        for j in 0..2 {
            c_vec[i] -= b_mat[i][j] * uv[j];
        }
    }

    LinearizedDynamics { a_mat, b_mat, c_vec, dt }
}

/// Pacejka magic-formula lateral tire force: `F = d * sin(c * atan(b * alpha))`.
/// Odd in the slip angle and bounded by `d` in magnitude.
pub fn pacejka_lateral_force(slip_angle: f64, b: f64, c: f64, d: f64) -> f64 {
    d * (c * (b * slip_angle).atan()).sin()
}

// Body speeds below this are treated as standstill when forming slip angles,
// which keeps the model well-defined at rest.
const SLIP_SPEED_FLOOR: f64 = 0.8;

/// One forward-Euler step of the planar two-track model. Per-axle slip angles
/// feed the Pacejka lateral forces; the throttle map supplies a longitudinal
/// force split evenly between the axles. Braking force vanishes at standstill
/// and the longitudinal body speed is clamped at zero (no reverse).
pub fn detailed_step(
    state: &DetailedState,
    u: ControlInput,
    dt: f64,
    params: &VehicleParams,
) -> DetailedState {
    debug_assert!(dt > 0.0);
    let u = u.clamped(params);
    let p = params;

    let vx = state.vx_body;
    let vy = state.vy_body;
    let r = state.psi_dot;

    let denom = vx.max(SLIP_SPEED_FLOOR);
    let alpha_f = u.delta - ((vy + p.lf * r) / denom).atan();
    let alpha_r = -((vy - p.lr * r) / denom).atan();

    let fy_f = pacejka_lateral_force(alpha_f, p.pacejka_b, p.pacejka_c, p.pacejka_d);
    let fy_r = pacejka_lateral_force(alpha_r, p.pacejka_b, p.pacejka_c, p.pacejka_d);

    // Drive/brake force from the throttle map, split 50/50 front/rear.
    // Brakes cannot push the car backwards from rest.
    let mut fx_total = p.mass * accel_unchecked(u.gamma, p);
    if u.gamma < 0.0 && vx <= 0.0 {
        fx_total = 0.0;
    }
    let fx_axle = fx_total / 2.0;

    let (sin_d, cos_d) = u.delta.sin_cos();
    let ax = (fx_axle + fx_axle * cos_d - fy_f * sin_d) / p.mass + vy * r;
    let ay = (fy_r + fy_f * cos_d + fx_axle * sin_d) / p.mass - vx * r;
    let r_dot = (p.lf * (fy_f * cos_d + fx_axle * sin_d) - p.lr * fy_r) / p.yaw_inertia;

    let (sin_psi, cos_psi) = state.psi.sin_cos();
    DetailedState {
        x: state.x + dt * (vx * cos_psi - vy * sin_psi),
        y: state.y + dt * (vx * sin_psi + vy * cos_psi),
        vx_body: (vx + dt * ax).max(0.0),
        vy_body: vy + dt * ay,
        psi: wrap_angle(state.psi + dt * r),
        psi_dot: r + dt * r_dot,
    }
}

/// Roll the kinematic model forward under a control sequence. Returns
/// `controls.len() + 1` states including the initial one.
pub fn simulate_simple(
    initial: &SimpleState,
    controls: &[ControlInput],
    dt: f64,
    params: &VehicleParams,
) -> Vec<SimpleState> {
    let mut out = Vec::with_capacity(controls.len() + 1);
    out.push(*initial);
    let mut s = *initial;
    for &u in controls {
        s = simple_step(&s, u, dt, params);
        out.push(s);
    }
    out
}

/// Roll the detailed model forward under a control sequence. Returns
/// `controls.len() + 1` states including the initial one.
pub fn simulate_detailed(
    initial: &DetailedState,
    controls: &[ControlInput],
    dt: f64,
    params: &VehicleParams,
) -> Vec<DetailedState> {
    let mut out = Vec::with_capacity(controls.len() + 1);
    out.push(*initial);
    let mut s = *initial;
    for &u in controls {
        s = detailed_step(&s, u, dt, params);
        out.push(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn throttle_map_values() {
        let p = params();
        assert_eq!(throttle_to_accel(0.0, &p).unwrap(), 0.0);
        assert_eq!(throttle_to_accel(1.0, &p).unwrap(), 3.0);
        assert_eq!(throttle_to_accel(-0.5, &p).unwrap(), -4.0);
        assert!(throttle_to_accel(1.5, &p).is_err());
        assert!(throttle_to_accel(-1.0001, &p).is_err());
        assert!(throttle_to_accel(f64::NAN, &p).is_err());
    }

    #[test]
    fn throttle_map_monotone() {
        let p = params();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=200 {
            let g = -1.0 + 2.0 * i as f64 / 200.0;
            let a = throttle_to_accel(g, &p).unwrap();
            assert!(a >= prev);
            prev = a;
        }
    }

    #[test]
    fn simple_step_straight_coasting() {
        let p = params();
        let s = SimpleState::new(0.0, 0.0, 0.0, 10.0);
        let n = simple_step(&s, ControlInput::ZERO, 0.1, &p);
        assert_relative_eq!(n.x, 1.0, max_relative = 1e-12);
        assert_eq!(n.y, 0.0);
        assert_eq!(n.psi, 0.0);
        assert_eq!(n.v, 10.0);
    }

    #[test]
    fn simple_step_heading_along_y() {
        let p = params();
        let s = SimpleState::new(0.0, 0.0, PI / 2.0, 5.0);
        let n = simple_step(&s, ControlInput::ZERO, 0.1, &p);
        assert_relative_eq!(n.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(n.y, 0.5, max_relative = 1e-12);
        assert_eq!(n.v, 5.0);
    }

    #[test]
    fn simple_step_yaw_from_steering() {
        // Direct evaluation of the continuous-time yaw equation:
        // psi_next = dt * (v / lf) * tan(delta).
        let p = params();
        let s = SimpleState::new(0.0, 0.0, 0.0, 10.0);
        let n = simple_step(&s, ControlInput::new(0.1, 0.0), 0.1, &p);
        let expected = 0.1 * (10.0 / 2.11) * 0.1f64.tan();
        assert_relative_eq!(n.psi, expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 0.04757, max_relative = 1e-3);
    }

    #[test]
    fn simple_step_never_reverses() {
        let p = params();
        let s = SimpleState::new(0.0, 0.0, 0.0, 0.3);
        let n = simple_step(&s, ControlInput::new(0.0, -1.0), 0.1, &p);
        assert_eq!(n.v, 0.0);
    }

    #[test]
    fn linearization_exact_at_nominal() {
        let p = params();
        let cases = [
            (SimpleState::new(3.0, -2.0, 0.4, 7.0), ControlInput::new(0.1, 0.5)),
            (SimpleState::new(0.0, 0.0, 0.0, 0.0), ControlInput::new(-0.2, -0.3)),
            (SimpleState::new(-5.0, 9.0, 3.0, 0.05), ControlInput::new(0.0, -1.0)),
        ];
        for (s, u) in cases {
            let lin = linearize_simple(&s, u, 0.1, &p);
            let exact = simple_step(&s, u, 0.1, &p).as_array();
            let approx = lin.apply(&s.as_array(), &[u.delta, u.gamma]);
            for i in 0..4 {
                assert!((exact[i] - approx[i]).abs() <= 1e-12, "component {i}");
            }
        }
    }

    #[test]
    fn linearization_analytic_entry() {
        // At v = 0, psi = 0 the position/speed sensitivity is dt * cos(psi) = dt.
        let p = params();
        let lin = linearize_simple(&SimpleState::new(0.0, 0.0, 0.0, 0.0), ControlInput::ZERO, 0.1, &p);
        assert_eq!(lin.a_mat[0][3], 0.1);
    }

    /// Central finite differences of the smooth step map (no clamp active at
    /// the sampled nominals).
    fn fd_jacobians(s: &SimpleState, u: ControlInput, dt: f64, p: &VehicleParams) -> ([[f64; 4]; 4], [[f64; 2]; 4]) {
        let h = 1e-6;
        let mut a = [[0.0; 4]; 4];
        let mut b = [[0.0; 2]; 4];
        for j in 0..4 {
            let mut sp = s.as_array();
            let mut sm = s.as_array();
            sp[j] += h;
            sm[j] -= h;
            let fp = simple_step(&SimpleState { x: sp[0], y: sp[1], psi: sp[2], v: sp[3] }, u, dt, p).as_array();
            let fm = simple_step(&SimpleState { x: sm[0], y: sm[1], psi: sm[2], v: sm[3] }, u, dt, p).as_array();
            for i in 0..4 {
                a[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        for j in 0..2 {
            let mut up = [u.delta, u.gamma];
            let mut um = up;
            up[j] += h;
            um[j] -= h;
            let fp = simple_step(s, ControlInput::new(up[0], up[1]), dt, p).as_array();
            let fm = simple_step(s, ControlInput::new(um[0], um[1]), dt, p).as_array();
            for i in 0..4 {
                b[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        (a, b)
    }

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(1.0)
    }

    #[test]
    fn linearization_matches_finite_differences() {
        // 100 random nominals, sampled away from the clamp/wrap kinks.
        let p = params();
        let dt = 0.1;
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            // xorshift64*, plenty for test sampling
            rng_state ^= rng_state >> 12;
            rng_state ^= rng_state << 25;
            rng_state ^= rng_state >> 27;
            (rng_state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let s = SimpleState::new(
                -50.0 + 100.0 * next(),
                -50.0 + 100.0 * next(),
                -2.4 + 4.8 * next(),
                1.5 + 18.0 * next(),
            );
            let gamma = {
                let g = -0.95 + 1.9 * next();
                if g.abs() < 0.05 { 0.1 } else { g }
            };
            let u = ControlInput::new(-0.55 + 1.1 * next(), gamma);
            let lin = linearize_simple(&s, u, dt, &p);
            let (fa, fb) = fd_jacobians(&s, u, dt, &p);
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        rel_err(lin.a_mat[i][j], fa[i][j]) <= 1e-4,
                        "A[{i}][{j}]: {} vs fd {}", lin.a_mat[i][j], fa[i][j]
                    );
                }
                for j in 0..2 {
                    assert!(
                        rel_err(lin.b_mat[i][j], fb[i][j]) <= 1e-4,
                        "B[{i}][{j}]: {} vs fd {}", lin.b_mat[i][j], fb[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn pacejka_zero_and_peak() {
        let p = params();
        assert_eq!(pacejka_lateral_force(0.0, p.pacejka_b, p.pacejka_c, p.pacejka_d), 0.0);
        // Dense grid search for the peak; the magic formula attains |F| = d
        // where c * atan(b * alpha) = pi/2.
        let mut max_abs: f64 = 0.0;
        for i in 0..=200_000 {
            let alpha = -1.0 + 2.0 * i as f64 / 200_000.0;
            let f = pacejka_lateral_force(alpha, p.pacejka_b, p.pacejka_c, p.pacejka_d).abs();
            assert!(f <= p.pacejka_d + 1e-9);
            max_abs = max_abs.max(f);
        }
        assert_relative_eq!(max_abs, p.pacejka_d, max_relative = 1e-6);
    }

    #[test]
    fn detailed_rest_is_fixed_point() {
        let p = params();
        let s = DetailedState { x: 1.0, y: 2.0, vx_body: 0.0, vy_body: 0.0, psi: 0.3, psi_dot: 0.0 };
        let n = detailed_step(&s, ControlInput::ZERO, 0.1, &p);
        assert_eq!(s, n);
    }

    #[test]
    fn detailed_straight_driving_stays_straight() {
        let p = params();
        let mut s = DetailedState { x: 0.0, y: 0.0, vx_body: 8.0, vy_body: 0.0, psi: 0.0, psi_dot: 0.0 };
        for _ in 0..100 {
            s = detailed_step(&s, ControlInput::new(0.0, 0.2), 0.1, &p);
            assert_eq!(s.vy_body, 0.0);
            assert_eq!(s.psi_dot, 0.0);
            assert_eq!(s.y, 0.0);
        }
    }

    #[test]
    fn detailed_steady_state_yaw_matches_kinematic() {
        // Long-horizon simulation at v = 5 m/s, delta = 0.05: the settled yaw
        // rate should agree with v * tan(delta) / (lf + lr) within 10%.
        let p = params();
        let dt = 0.01;
        let delta = 0.05;
        let target_v = 5.0;
        let mut s = DetailedState { x: 0.0, y: 0.0, vx_body: target_v, vy_body: 0.0, psi: 0.0, psi_dot: 0.0 };
        for _ in 0..6000 {
            // small proportional speed hold so the steady state is at v = 5
            let gamma = (0.5 * (target_v - s.vx_body)).clamp(-1.0, 1.0);
            s = detailed_step(&s, ControlInput::new(delta, gamma), dt, &p);
        }
        let kinematic = target_v * delta.tan() / (p.lf + p.lr);
        assert!(
            (s.psi_dot - kinematic).abs() <= 0.1 * kinematic.abs(),
            "steady yaw {} vs kinematic {}", s.psi_dot, kinematic
        );
    }

    #[test]
    fn detailed_full_braking_stops_without_reversing() {
        let p = params();
        let mut s = DetailedState { x: 0.0, y: 0.0, vx_body: 10.0, vy_body: 0.0, psi: 0.0, psi_dot: 0.0 };
        let mut prev_v = s.vx_body;
        for _ in 0..50 {
            s = detailed_step(&s, ControlInput::new(0.0, -1.0), 0.1, &p);
            assert!(s.vx_body <= prev_v);
            assert!(s.vx_body >= 0.0);
            prev_v = s.vx_body;
        }
        assert_eq!(s.vx_body, 0.0);
    }

    #[test]
    fn simulate_length_and_composition() {
        let p = params();
        let s0 = SimpleState::new(0.0, 0.0, 0.0, 3.0);
        let us = [ControlInput::new(0.05, 0.2), ControlInput::new(-0.05, -0.1)];
        let traj = simulate_simple(&s0, &us, 0.1, &p);
        assert_eq!(traj.len(), 3);
        let step1 = simple_step(&s0, us[0], 0.1, &p);
        let step2 = simple_step(&step1, us[1], 0.1, &p);
        assert_eq!(traj[1], step1);
        assert_eq!(traj[2], step2);

        let d0 = DetailedState::from_simple(&s0);
        let dtraj = simulate_detailed(&d0, &us, 0.1, &p);
        assert_eq!(dtraj.len(), 3);
        assert_eq!(dtraj[2], detailed_step(&detailed_step(&d0, us[0], 0.1, &p), us[1], 0.1, &p));
    }

    #[test]
    fn simulate_empty_motion() {
        let p = params();
        let s0 = SimpleState::new(2.0, -1.0, 1.0, 0.0);
        let traj = simulate_simple(&s0, &[ControlInput::ZERO; 5], 0.1, &p);
        for s in &traj {
            assert_eq!(*s, s0);
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(-2.5 * PI), -0.5 * PI, epsilon = 1e-12);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    proptest! {
        #[test]
        fn speed_never_negative(v in 0.0..30.0f64, gamma in -1.0..1.0f64, delta in -0.61..0.61f64, steps in 1usize..50) {
            let p = params();
            let mut s = SimpleState::new(0.0, 0.0, 0.0, v);
            for _ in 0..steps {
                s = simple_step(&s, ControlInput::new(delta, gamma), 0.1, &p);
                prop_assert!(s.v >= 0.0);
            }
        }

        #[test]
        fn pacejka_odd_and_bounded(alpha in -1.0..1.0f64) {
            let p = params();
            let f = pacejka_lateral_force(alpha, p.pacejka_b, p.pacejka_c, p.pacejka_d);
            let g = pacejka_lateral_force(-alpha, p.pacejka_b, p.pacejka_c, p.pacejka_d);
            prop_assert!((f + g).abs() <= 1e-9 * p.pacejka_d.max(1.0));
            prop_assert!(f.abs() <= p.pacejka_d + 1e-9);
        }

        #[test]
        fn wrapped_angle_in_range(a in -100.0..100.0f64) {
            let w = wrap_angle(a);
            prop_assert!(w > -PI && w <= PI);
        }

        #[test]
        fn steps_are_deterministic(x in -10.0..10.0f64, v in 0.0..20.0f64, delta in -0.6..0.6f64, gamma in -1.0..1.0f64) {
            let p = params();
            let s = SimpleState::new(x, -x, 0.7, v);
            let u = ControlInput::new(delta, gamma);
            prop_assert_eq!(simple_step(&s, u, 0.1, &p), simple_step(&s, u, 0.1, &p));
            let d = DetailedState::from_simple(&s);
            prop_assert_eq!(detailed_step(&d, u, 0.1, &p), detailed_step(&d, u, 0.1, &p));
        }
    }
}
