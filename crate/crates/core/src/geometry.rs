//! Planar trajectories and their differential (polar) representation.
//!
//! A trajectory is a sequence of positions. Differencing consecutive
//! positions gives motion steps, which are re-expressed as a direction
//! `phi`, a turn `alpha` relative to the previous direction and a length
//! `m`. The turn/length series does not depend on the world frame; going
//! back to positions needs a start position and a start heading.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A planar position (x east, y north) in meters. Also used as a 2-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `heading` (radians, counter-clockwise from +x).
    pub fn from_heading(heading: f64) -> Self {
        let (s, c) = heading.sin_cos();
        Self { x: c, y: s }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, rhs: Point2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Difference between two consecutive trajectory points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionStep {
    pub dx: f64,
    pub dy: f64,
}

/// One differential epoch in polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarStep {
    /// Absolute motion direction, in (-pi, pi].
    pub phi: f64,
    /// Turn relative to the previous direction, wrapped.
    pub alpha: f64,
    /// Step length, >= 0.
    pub m: f64,
}

/// Start position and start motion direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    pub p0: Point2,
    pub heading0: f64,
}

impl InitialConditions {
    pub fn new(p0: Point2, heading0: f64) -> Result<Self> {
        if !p0.is_finite() {
            return Err(Error::NonFinite("initial position"));
        }
        Ok(Self {
            p0,
            heading0: wrap_angle(heading0)?,
        })
    }

    /// First point and direction of the first non-zero step.
    pub fn from_trajectory(traj: &Trajectory) -> Result<Self> {
        let steps = differentiate(traj)?;
        let heading0 = steps
            .iter()
            .map(|s| to_polar(*s))
            .find(|&(_, m)| m > 0.0)
            .map_or(0.0, |(phi, _)| phi);
        Ok(Self {
            p0: traj.points[0],
            heading0,
        })
    }
}

/// Ordered planar positions with optional strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<Point2>,
    timestamps: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("trajectory point"));
        }
        Ok(Self {
            points,
            timestamps: None,
        })
    }

    pub fn with_timestamps(points: Vec<Point2>, timestamps: Vec<f64>) -> Result<Self> {
        let mut traj = Self::new(points)?;
        if timestamps.len() != traj.points.len() {
            return Err(Error::LengthMismatch(timestamps.len(), traj.points.len()));
        }
        if timestamps.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("timestamp"));
        }
        if timestamps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "timestamps must be strictly increasing".into(),
            ));
        }
        traj.timestamps = Some(timestamps);
        Ok(traj)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn timestamps(&self) -> Option<&[f64]> {
        self.timestamps.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Point2 {
        self.points[0]
    }

    pub fn last(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    /// Path length along the polyline.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Applies `tf` to every point; timestamps are kept.
    pub fn transformed(&self, tf: &Rigid2) -> Trajectory {
        Trajectory {
            points: self.points.iter().map(|&p| tf.apply(p)).collect(),
            timestamps: self.timestamps.clone(),
        }
    }
}

/// Planar rigid motion: rotate by `angle`, then translate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rigid2 {
    pub angle: f64,
    pub translation: Point2,
}

impl Rigid2 {
    pub const IDENTITY: Rigid2 = Rigid2 {
        angle: 0.0,
        translation: Point2::ORIGIN,
    };

    pub fn new(angle: f64, translation: Point2) -> Self {
        Self { angle, translation }
    }

    pub fn rotate(&self, v: Point2) -> Point2 {
        let (s, c) = self.angle.sin_cos();
        Point2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        self.rotate(p) + self.translation
    }

    pub fn inverse(&self) -> Rigid2 {
        let inv = Rigid2::new(-self.angle, Point2::ORIGIN);
        Rigid2::new(-self.angle, -inv.rotate(self.translation))
    }

    /// Heading after rotation, wrapped.
    pub fn apply_heading(&self, heading: f64) -> f64 {
        wrap(heading + self.angle)
    }
}

/// Wraps into (-pi, pi]. NaN and infinities pass through as NaN.
pub(crate) fn wrap(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Maps an angle to its representative in (-pi, pi]; both -pi and pi map to pi.
pub fn wrap_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(wrap(theta))
}

/// First differences of consecutive points.
pub fn differentiate(traj: &Trajectory) -> Result<Vec<MotionStep>> {
    if traj.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: traj.len(),
        });
    }
    Ok(traj
        .points
        .windows(2)
        .map(|w| MotionStep {
            dx: w[1].x - w[0].x,
            dy: w[1].y - w[0].y,
        })
        .collect())
}

/// Direction and length of a step. The zero vector has direction 0.
pub fn to_polar(step: MotionStep) -> (f64, f64) {
    let m = step.dx.hypot(step.dy);
    if m == 0.0 {
        (0.0, 0.0)
    } else {
        (wrap(step.dy.atan2(step.dx)), m)
    }
}

/// Polar series with the first turn measured against heading 0.
pub fn angular_series(traj: &Trajectory) -> Result<Vec<PolarStep>> {
    angular_series_from(traj, 0.0)
}

/// Polar series with the first turn measured against `reference_heading`.
///
/// A zero-length step keeps the previous direction and reports a zero turn,
/// so the series still integrates back to the input.
pub fn angular_series_from(traj: &Trajectory, reference_heading: f64) -> Result<Vec<PolarStep>> {
    if traj.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: traj.len(),
        });
    }
    let mut prev_phi = wrap_angle(reference_heading)?;
    let steps = differentiate(traj)?;
    Ok(steps
        .into_iter()
        .map(|s| {
            let (phi, m) = to_polar(s);
            let phi = if m == 0.0 { prev_phi } else { phi };
            let alpha = wrap(phi - prev_phi);
            prev_phi = phi;
            PolarStep { phi, alpha, m }
        })
        .collect())
}

/// Dead-reckons a polar series from initial conditions.
pub fn integrate(init: InitialConditions, steps: &[PolarStep]) -> Trajectory {
    let mut points = Vec::with_capacity(steps.len() + 1);
    let mut p = init.p0;
    let mut heading = init.heading0;
    points.push(p);
    for s in steps {
        heading = wrap(heading + s.alpha);
        p += Point2::from_heading(heading) * s.m;
        points.push(p);
    }
    Trajectory {
        points,
        timestamps: None,
    }
}

/// Distance between the final points of two trajectories.
pub fn closing_distance(estimate: &Trajectory, reference: &Trajectory) -> Result<f64> {
    if estimate.is_empty() || reference.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(estimate.last().distance(reference.last()))
}
