//! Signal temporal logic over finite state traces: formula AST, discrete-time
//! boolean semantics with truncated (weak) windows, a trace monitor, and the
//! traffic-rule library.
//!
//! Truncation rule: a temporal window is clipped to the available samples.
//! Always over an empty clipped window is true; Eventually and Until over an
//! empty clipped window are false (the vacuous conjunction/disjunction).

use crate::environment::{aabb_of, Aabb};
use crate::error::Error;
use crate::Result;

/// One sample of the monitored signal: position, heading, speed magnitude.
/// Both ego models project onto this view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub v: f64,
}

impl TracePoint {
    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.psi, self.v]
    }
}

/// Direction of an affine comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

/// Atomic proposition over one trace sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// `coeffs . [x, y, psi, v] (<=|>=) bound`.
    Affine { coeffs: [f64; 4], bound: f64, sense: Sense },
    /// 1-norm clearance from a predicted trajectory:
    /// `|x - ox_k| + |y - oy_k| >= d_safe` at step `k`.
    Collision1Norm { other: Vec<(f64, f64)>, d_safe: f64 },
    /// Bounding-box clearance: ego's AABB intersects none of the step's
    /// boxes.
    CollisionAabb { ego_length: f64, ego_width: f64, others: Vec<Vec<Aabb>> },
}

impl Predicate {
    /// Truth value at step `t` of the trace.
    pub fn holds(&self, trace: &[TracePoint], t: usize) -> bool {
        let s = &trace[t];
        match self {
            Predicate::Affine { coeffs, bound, sense } => {
                let val: f64 = coeffs.iter().zip(s.as_array()).map(|(c, x)| c * x).sum();
                match sense {
                    Sense::Le => val <= *bound,
                    Sense::Ge => val >= *bound,
                }
            }
            Predicate::Collision1Norm { other, d_safe } => match other.get(t) {
                Some(&(ox, oy)) => (s.x - ox).abs() + (s.y - oy).abs() >= *d_safe,
                None => true,
            },
            Predicate::CollisionAabb { ego_length, ego_width, others } => {
                let ego = aabb_of(s.x, s.y, s.psi, *ego_length, *ego_width);
                others.iter().all(|boxes| match boxes.get(t) {
                    Some(b) => !ego.intersects(b),
                    None => true,
                })
            }
        }
    }
}

/// STL formula in negation normal form: negation appears only directly above
/// predicates.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Pred(Predicate),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Always { lo: usize, hi: usize, inner: Box<Formula> },
    Eventually { lo: usize, hi: usize, inner: Box<Formula> },
    Until { lo: usize, hi: usize, lhs: Box<Formula>, rhs: Box<Formula> },
}

impl Formula {
    pub fn pred(p: Predicate) -> Self {
        Formula::Pred(p)
    }

    /// Affine comparison shortcut.
    pub fn affine(coeffs: [f64; 4], sense: Sense, bound: f64) -> Self {
        Formula::Pred(Predicate::Affine { coeffs, bound, sense })
    }

    pub fn always(lo: usize, hi: usize, inner: Formula) -> Self {
        debug_assert!(lo <= hi);
        Formula::Always { lo, hi, inner: Box::new(inner) }
    }

    pub fn eventually(lo: usize, hi: usize, inner: Formula) -> Self {
        debug_assert!(lo <= hi);
        Formula::Eventually { lo, hi, inner: Box::new(inner) }
    }

    pub fn until(lo: usize, hi: usize, lhs: Formula, rhs: Formula) -> Self {
        debug_assert!(lo <= hi);
        Formula::Until { lo, hi, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    /// NNF check: `Not` only directly above `Pred`.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Pred(_) => true,
            Formula::Not(f) => matches!(**f, Formula::Pred(_)),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_nnf),
            Formula::Always { inner, .. } | Formula::Eventually { inner, .. } => inner.is_nnf(),
            Formula::Until { lhs, rhs, .. } => lhs.is_nnf() && rhs.is_nnf(),
        }
    }
}

/// Discrete-time boolean STL semantics at step `t` of a finite trace, with
/// windows clipped to the trace (see module docs for the truncation rule).
pub fn eval(formula: &Formula, trace: &[TracePoint], t: usize) -> bool {
    if t >= trace.len() {
        // beyond the trace: Always-style obligations hold vacuously
        return matches!(formula, Formula::Always { .. })
            || matches!(formula, Formula::And(fs) if fs.is_empty());
    }
    match formula {
        Formula::Pred(p) => p.holds(trace, t),
        Formula::Not(f) => match &**f {
            Formula::Pred(p) => !p.holds(trace, t),
            other => !eval(other, trace, t),
        },
        Formula::And(fs) => fs.iter().all(|f| eval(f, trace, t)),
        Formula::Or(fs) => fs.iter().any(|f| eval(f, trace, t)),
        Formula::Always { lo, hi, inner } => {
            clipped_window(trace.len(), t, *lo, *hi).all(|k| eval(inner, trace, k))
        }
        Formula::Eventually { lo, hi, inner } => {
            clipped_window(trace.len(), t, *lo, *hi).any(|k| eval(inner, trace, k))
        }
        Formula::Until { lo, hi, lhs, rhs } => {
            clipped_window(trace.len(), t, *lo, *hi)
                .any(|k| eval(rhs, trace, k) && (t..k).all(|j| eval(lhs, trace, j)))
        }
    }
}

fn clipped_window(len: usize, t: usize, lo: usize, hi: usize) -> std::ops::RangeInclusive<usize> {
    let start = t + lo;
    let end = (t + hi).min(len.saturating_sub(1));
    if start > end {
        // empty range
        1..=0
    } else {
        start..=end
    }
}

/// A named set of formulas that must all hold at the current step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActiveRuleSet {
    pub rules: Vec<(String, Formula)>,
}

impl ActiveRuleSet {
    pub fn new(rules: Vec<(String, Formula)>) -> Self {
        Self { rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Per-rule verdicts of a monitored trace.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorVerdict {
    pub verdicts: Vec<(String, bool)>,
}

impl MonitorVerdict {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }

    pub fn failed_rules(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name.as_str())
            .collect()
    }
}

/// Evaluate every active rule at step 0 of the trace.
pub fn monitor_trace(rules: &ActiveRuleSet, trace: &[TracePoint]) -> MonitorVerdict {
    MonitorVerdict {
        verdicts: rules
            .rules
            .iter()
            .map(|(name, f)| (name.clone(), eval(f, trace, 0)))
            .collect(),
    }
}

/// Speed at which ego counts as stopped for stop-sign purposes, m/s.
pub const EPS_STOP: f64 = 0.1;

/// Rule constructors used by the controller and scenarios.
#[derive(Debug, Clone)]
pub enum RuleKind {
    /// `always [lo, H] (v <= v_max)`. `lo` is normally 0; the controller
    /// relaxes it to the earliest step reachable under full braking so the
    /// rule stays feasible at activation.
    SpeedLimit { v_max: f64, lo: usize },
    /// Stop before crossing: `eventually [0, H] (v <= eps)` or
    /// `always [0, H] (progress <= line)`.
    StopSign { line_heading: f64, line_pos: (f64, f64) },
    /// `always [0, H] (progress <= line)`: never cross the stop line.
    RedLight { line_heading: f64, line_pos: (f64, f64) },
    /// `always [0, H] (|dx| + |dy| >= d_safe)` against one predicted
    /// trajectory.
    CollisionAvoidance1Norm { other: Vec<(f64, f64)>, d_safe: f64 },
    /// Bounding-box variant of collision avoidance.
    CollisionAvoidanceAabb { ego_length: f64, ego_width: f64, others: Vec<Vec<Aabb>> },
}

/// Half-plane `progress <= line` expressed over [x, y]: the path tangent at
/// the stop line is the progress direction.
fn progress_predicate(line_heading: f64, line_pos: (f64, f64)) -> Predicate {
    let (s, c) = line_heading.sin_cos();
    Predicate::Affine {
        coeffs: [c, s, 0.0, 0.0],
        bound: c * line_pos.0 + s * line_pos.1,
        sense: Sense::Le,
    }
}

/// Build a rule formula over the MPC horizon.
pub fn make_rule(kind: RuleKind, horizon: usize) -> Result<Formula> {
    Ok(match kind {
        RuleKind::SpeedLimit { v_max, lo } => {
            if !(v_max > 0.0) {
                return Err(Error::domain(format!("speed limit must be > 0, got {v_max}")));
            }
            Formula::always(
                lo.min(horizon),
                horizon,
                Formula::affine([0.0, 0.0, 0.0, 1.0], Sense::Le, v_max),
            )
        }
        RuleKind::StopSign { line_heading, line_pos } => Formula::Or(vec![
            Formula::eventually(
                0,
                horizon,
                Formula::affine([0.0, 0.0, 0.0, 1.0], Sense::Le, EPS_STOP),
            ),
            Formula::always(0, horizon, Formula::Pred(progress_predicate(line_heading, line_pos))),
        ]),
        RuleKind::RedLight { line_heading, line_pos } => {
            Formula::always(0, horizon, Formula::Pred(progress_predicate(line_heading, line_pos)))
        }
        RuleKind::CollisionAvoidance1Norm { other, d_safe } => {
            Formula::always(0, horizon, Formula::Pred(Predicate::Collision1Norm { other, d_safe }))
        }
        RuleKind::CollisionAvoidanceAabb { ego_length, ego_width, others } => Formula::always(
            0,
            horizon,
            Formula::Pred(Predicate::CollisionAabb { ego_length, ego_width, others }),
        ),
    })
}
