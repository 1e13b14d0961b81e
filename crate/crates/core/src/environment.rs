//! The world as the controller sees it: the reference path and desired
//! trajectory, traffic participants with constant-velocity prediction, road
//! features, and the two collision predicates (1-norm point-mass for the high
//! level, axis-aligned bounding boxes for the low level).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::vehicle::{simple_step, wrap_angle, ControlInput, SimpleState, VehicleParams};
use crate::Result;

/// One point of the reference path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

/// Untimed sequence of equally spaced points in the middle of the lane.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    points: Vec<PathPoint>,
    spacing: f64,
}

impl ReferencePath {
    /// Build from pre-densified points; validates the uniform-spacing
    /// invariant (within 1%).
    pub fn new(points: Vec<PathPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::scenario("reference path needs at least 2 points"));
        }
        let spacing = dist(points[0].x, points[0].y, points[1].x, points[1].y);
        if spacing <= 0.0 {
            return Err(Error::scenario("reference path spacing must be positive"));
        }
        for w in points.windows(2) {
            let d = dist(w[0].x, w[0].y, w[1].x, w[1].y);
            if (d - spacing).abs() > 0.01 * spacing {
                return Err(Error::scenario(format!(
                    "reference path spacing not uniform: {d} vs {spacing}"
                )));
            }
        }
        Ok(Self { points, spacing })
    }

    /// Densify a waypoint polyline to uniform spacing. Headings follow the
    /// segment directions.
    pub fn from_polyline(vertices: &[(f64, f64)], spacing: f64) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::scenario("path polyline needs at least 2 vertices"));
        }
        if spacing <= 0.0 {
            return Err(Error::scenario("path spacing must be > 0"));
        }
        // total length, then walk it in equal arc increments
        let mut cum = vec![0.0];
        for w in vertices.windows(2) {
            let d = dist(w[0].0, w[0].1, w[1].0, w[1].1);
            cum.push(cum.last().unwrap() + d);
        }
        let total = *cum.last().unwrap();
        if total <= spacing {
            return Err(Error::scenario("path polyline shorter than one spacing"));
        }
        let n = (total / spacing).floor() as usize;
        let mut points = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let s = i as f64 * spacing;
            let seg = match cum.windows(2).position(|w| s <= w[1]) {
                Some(j) => j,
                None => vertices.len() - 2,
            };
            let seg_len = cum[seg + 1] - cum[seg];
            let t = if seg_len > 0.0 { (s - cum[seg]) / seg_len } else { 0.0 };
            let (x0, y0) = vertices[seg];
            let (x1, y1) = vertices[seg + 1];
            points.push(PathPoint {
                x: x0 + t * (x1 - x0),
                y: y0 + t * (y1 - y0),
                psi: (y1 - y0).atan2(x1 - x0),
            });
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[PathPoint] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total_length(&self) -> f64 {
        (self.points.len() - 1) as f64 * self.spacing
    }

    pub fn last_point(&self) -> PathPoint {
        *self.points.last().unwrap()
    }

    /// Index of the path point nearest to a position.
    pub fn nearest_index(&self, x: f64, y: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = dist(x, y, p.x, p.y);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Arc-length coordinate of the nearest path point.
    pub fn progress_of(&self, x: f64, y: f64) -> f64 {
        self.nearest_index(x, y) as f64 * self.spacing
    }

    /// Interpolate position and heading at an arc-length coordinate
    /// (clamped to the path extent).
    pub fn sample_at(&self, s: f64) -> PathPoint {
        let s = s.clamp(0.0, self.total_length());
        let i = ((s / self.spacing).floor() as usize).min(self.points.len() - 2);
        let t = (s - i as f64 * self.spacing) / self.spacing;
        let a = self.points[i];
        let b = self.points[i + 1];
        PathPoint {
            x: a.x + t * (b.x - a.x),
            y: a.y + t * (b.y - a.y),
            psi: wrap_angle(a.psi + t * wrap_angle(b.psi - a.psi)),
        }
    }
}

fn dist(x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    (x1 - x0).hypot(y1 - y0)
}

/// Desired state at one step of the extracted trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub x_des: f64,
    pub y_des: f64,
    pub psi_des: f64,
    pub v_des: f64,
}

/// How a traffic participant moves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Behavior {
    /// Holds its current speed and heading.
    ConstantVelocity,
    /// Speed/heading setpoints applied at given simulation steps; constant
    /// velocity in between.
    Scripted { schedule: Vec<ScheduleEntry> },
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub at_step: usize,
    pub v: f64,
    pub psi: f64,
}

/// A non-ego vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficVehicle {
    pub id: u64,
    pub state: SimpleState,
    pub bbox_length: f64,
    pub bbox_width: f64,
    pub behavior: Behavior,
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Aabb {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if x_min > x_max || y_min > y_max {
            return Err(Error::domain(format!(
                "invalid aabb [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// Closed-box intersection: boxes that merely touch count as
    /// intersecting.
    pub fn intersects(&self, other: &Aabb) -> bool {
        self.x_min <= other.x_max
            && other.x_min <= self.x_max
            && self.y_min <= other.y_max
            && other.y_min <= self.y_max
    }

    /// Largest per-axis gap between two boxes. Non-positive iff the closed
    /// boxes intersect; negative values measure penetration depth.
    pub fn separation_gap(&self, other: &Aabb) -> f64 {
        let gx = (self.x_min - other.x_max).max(other.x_min - self.x_max);
        let gy = (self.y_min - other.y_max).max(other.y_min - self.y_max);
        gx.max(gy)
    }
}

/// Axis-aligned envelope of a heading-rotated `length x width` rectangle
/// centered at `(x, y)`.
pub fn aabb_of(x: f64, y: f64, psi: f64, length: f64, width: f64) -> Aabb {
    debug_assert!(length > 0.0 && width > 0.0);
    let (s, c) = psi.sin_cos();
    let hx = 0.5 * (length * c.abs() + width * s.abs());
    let hy = 0.5 * (length * s.abs() + width * c.abs());
    Aabb { x_min: x - hx, x_max: x + hx, y_min: y - hy, y_max: y + hy }
}

/// `true` iff the closed boxes overlap in both axes.
pub fn aabb_intersects(a: &Aabb, b: &Aabb) -> bool {
    a.intersects(b)
}

/// Traffic-light color. The rule library constrains ego only on red.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightColor {
    Red,
    Green,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightPhase {
    pub color: LightColor,
    pub duration: f64,
}

/// A static road feature with an activation zone.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadFeature {
    pub kind: FeatureKind,
    pub zone: Aabb,
    /// Stop-line position; required for StopSign and TrafficLight.
    pub stop_line: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureKind {
    SpeedLimit { v_max: f64 },
    StopSign,
    TrafficLight { schedule: Vec<LightPhase>, initial_offset: f64 },
}

impl RoadFeature {
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            FeatureKind::SpeedLimit { v_max } => {
                if !(*v_max > 0.0) {
                    return Err(Error::scenario(format!("speed_limit.v_max must be > 0, got {v_max}")));
                }
            }
            FeatureKind::StopSign => {
                if self.stop_line.is_none() {
                    return Err(Error::scenario("stop_sign.stop_line is required"));
                }
            }
            FeatureKind::TrafficLight { schedule, .. } => {
                if self.stop_line.is_none() {
                    return Err(Error::scenario("traffic_light.stop_line is required"));
                }
                if schedule.is_empty() {
                    return Err(Error::scenario("traffic_light.schedule must not be empty"));
                }
                for p in schedule {
                    if !(p.duration > 0.0) {
                        return Err(Error::scenario(format!(
                            "traffic_light phase duration must be > 0, got {}",
                            p.duration
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Phase color at absolute simulation time (cyclic schedule).
    pub fn light_color_at(&self, time: f64) -> Option<LightColor> {
        match &self.kind {
            FeatureKind::TrafficLight { schedule, initial_offset } => {
                let cycle: f64 = schedule.iter().map(|p| p.duration).sum();
                let mut t = (time + initial_offset).rem_euclid(cycle);
                for p in schedule {
                    if t < p.duration {
                        return Some(p.color);
                    }
                    t -= p.duration;
                }
                Some(schedule.last().unwrap().color)
            }
            _ => None,
        }
    }
}

/// Arc-length geometry of a feature relative to a path: where the path first
/// enters the zone and where the stop line sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureGeometry {
    /// Arc of the first path point inside the zone.
    pub s_enter: f64,
    /// Arc of the path point nearest to the stop line (or zone exit for
    /// speed limits, unused).
    pub s_line: f64,
    /// Path heading at the stop line.
    pub line_heading: f64,
}

/// Compute the path-relative geometry of a feature.
pub fn feature_geometry(path: &ReferencePath, feature: &RoadFeature) -> FeatureGeometry {
    let spacing = path.spacing();
    let s_enter = path
        .points()
        .iter()
        .position(|p| feature.zone.contains_point(p.x, p.y))
        .map(|i| i as f64 * spacing)
        .unwrap_or(0.0);
    let (s_line, line_heading) = match feature.stop_line {
        Some((lx, ly)) => {
            let i = path.nearest_index(lx, ly);
            (i as f64 * spacing, path.points()[i].psi)
        }
        None => (path.total_length(), path.last_point().psi),
    };
    FeatureGeometry { s_enter, s_line, line_heading }
}

/// Euclidean distance from ego's position to the nearest path point.
pub fn tracking_error(path: &ReferencePath, state: &SimpleState) -> f64 {
    path.points()
        .iter()
        .map(|p| dist(state.x, state.y, p.x, p.y))
        .fold(f64::INFINITY, f64::min)
}

/// An active speed restriction zone, as seen by the trajectory extractor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedZone {
    pub v_max: f64,
    pub zone: Aabb,
}

/// An active stop obligation: desired speed ramps linearly to zero between
/// `s_enter` and `s_line` along the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopTarget {
    pub s_enter: f64,
    pub s_line: f64,
}

/// Extract the desired trajectory: `h + 1` waypoints advancing along the path
/// from the nearest path point, each by its own desired speed times `dt`.
/// Desired speed honors every speed zone containing the waypoint and ramps to
/// zero at active stop lines. Waypoints never move backwards.
pub fn extract_desired_trajectory(
    path: &ReferencePath,
    state: &SimpleState,
    speed_zones: &[SpeedZone],
    stop_targets: &[StopTarget],
    h: usize,
    dt: f64,
    v_cruise: f64,
) -> Result<Vec<Waypoint>> {
    if h == 0 {
        return Err(Error::domain("horizon must be >= 1"));
    }
    let mut s = path.progress_of(state.x, state.y);
    let mut out = Vec::with_capacity(h + 1);
    for _ in 0..=h {
        let p = path.sample_at(s);
        let mut v = v_cruise;
        for z in speed_zones {
            if z.zone.contains_point(p.x, p.y) {
                v = v.min(z.v_max);
            }
        }
        for t in stop_targets {
            if s >= t.s_line {
                v = 0.0;
            } else if s >= t.s_enter {
                let span = t.s_line - t.s_enter;
                if span > 0.0 {
                    v = v.min(v * (t.s_line - s) / span);
                } else {
                    v = 0.0;
                }
            }
        }
        out.push(Waypoint { x_des: p.x, y_des: p.y, psi_des: p.psi, v_des: v });
        s += v * dt;
    }
    Ok(out)
}

/// Ids of vehicles with center distance <= `r_near` from ego, ascending.
pub fn nearby_vehicles(ego_pos: (f64, f64), vehicles: &[TrafficVehicle], r_near: f64) -> Vec<u64> {
    debug_assert!(r_near > 0.0);
    let mut ids: Vec<u64> = vehicles
        .iter()
        .filter(|v| dist(ego_pos.0, ego_pos.1, v.state.x, v.state.y) <= r_near)
        .map(|v| v.id)
        .collect();
    ids.sort_unstable();
    ids
}

/// Constant-velocity prediction: `h + 1` states per requested vehicle,
/// produced by the zero-input kinematic step.
pub fn predict_trajectories(
    vehicles: &[TrafficVehicle],
    ids: &[u64],
    h: usize,
    dt: f64,
) -> Result<BTreeMap<u64, Vec<SimpleState>>> {
    let params = VehicleParams::default();
    let mut out = BTreeMap::new();
    for &id in ids {
        let v = vehicles
            .iter()
            .find(|v| v.id == id)
            .ok_or(Error::UnknownVehicle(id))?;
        let mut traj = Vec::with_capacity(h + 1);
        let mut s = v.state;
        traj.push(s);
        for _ in 0..h {
            s = simple_step(&s, ControlInput::ZERO, dt, &params);
            traj.push(s);
        }
        out.insert(id, traj);
    }
    Ok(out)
}

/// 1-norm distance between two positions. Upper-bounds the Euclidean
/// distance, so clearance in the 1-norm implies Euclidean clearance.
pub fn one_norm_clearance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs() + (a.1 - b.1).abs()
}
