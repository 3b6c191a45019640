//! Synthetic road scenarios, SLAM-like drift injection and evaluation.

mod rng;
pub mod store;

pub use rng::{NoiseSource, NOISE_STREAM};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    angular_series_from, closing_distance, integrate, InitialConditions, Point2, Trajectory,
};
use crate::worldmap::PolylineMap;

/// Drift applied to every epoch of a true trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftModel {
    /// Added to every turn, radians per epoch.
    pub heading_rate_bias: f64,
    /// Multiplies every step length.
    pub scale_bias: f64,
    pub angle_noise_std: f64,
    pub magnitude_noise_std: f64,
    pub seed: u64,
}

impl DriftModel {
    pub const IDENTITY: DriftModel = DriftModel {
        heading_rate_bias: 0.0,
        scale_bias: 1.0,
        angle_noise_std: 0.0,
        magnitude_noise_std: 0.0,
        seed: 0,
    };

    pub fn heading_bias(bias: f64) -> Self {
        Self {
            heading_rate_bias: bias,
            ..Self::IDENTITY
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_bias > 0.0 && self.scale_bias.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale_bias must be positive, got {}",
                self.scale_bias
            )));
        }
        if !(self.angle_noise_std >= 0.0 && self.magnitude_noise_std >= 0.0) {
            return Err(Error::InvalidParameter(
                "noise standard deviations must be non-negative".into(),
            ));
        }
        if !self.heading_rate_bias.is_finite() {
            return Err(Error::NonFinite("heading_rate_bias"));
        }
        Ok(())
    }
}

impl Default for DriftModel {
    fn default() -> Self {
        Self::IDENTITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// One long straight traverse.
    Straight,
    /// Staircase of straight segments joined by alternating 90 degree turns.
    LTurns,
    /// Square loop that returns to its start.
    Loop,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Straight => "straight",
            ScenarioKind::LTurns => "l_turns",
            ScenarioKind::Loop => "loop",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "straight" => Ok(ScenarioKind::Straight),
            "l_turns" | "l-turns" => Ok(ScenarioKind::LTurns),
            "loop" => Ok(ScenarioKind::Loop),
            other => Err(Error::InvalidParameter(format!(
                "unknown scenario kind {other:?} (straight, l_turns, loop)"
            ))),
        }
    }
}

/// Geometry knobs beyond kind, length and step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOptions {
    /// Leg length of the `l_turns` staircase.
    pub segment_length: f64,
    /// Translation of the map relative to the true path.
    pub map_shift: Point2,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            segment_length: 50.0,
            map_shift: Point2::ORIGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub length: f64,
    pub step: f64,
    pub options: ScenarioOptions,
    pub map: PolylineMap,
    pub truth: Trajectory,
    pub drift: DriftModel,
}

impl Scenario {
    pub fn init(&self) -> Result<InitialConditions> {
        InitialConditions::from_trajectory(&self.truth)
    }

    /// The drifted trajectory a SLAM front end would report.
    pub fn slam(&self) -> Result<Trajectory> {
        inject_drift(&self.truth, &self.drift)
    }
}

fn path_vertices(kind: ScenarioKind, length: f64, segment: f64) -> Vec<Point2> {
    match kind {
        ScenarioKind::Straight => vec![Point2::ORIGIN, Point2::new(length, 0.0)],
        ScenarioKind::Loop => {
            let side = length / 4.0;
            vec![
                Point2::ORIGIN,
                Point2::new(side, 0.0),
                Point2::new(side, side),
                Point2::new(0.0, side),
                Point2::ORIGIN,
            ]
        }
        ScenarioKind::LTurns => {
            let mut v = vec![Point2::ORIGIN];
            let mut p = Point2::ORIGIN;
            let mut travelled = 0.0;
            let mut east = true;
            while travelled < length {
                let leg = segment.min(length - travelled);
                p += if east {
                    Point2::new(leg, 0.0)
                } else {
                    Point2::new(0.0, leg)
                };
                v.push(p);
                travelled += leg;
                east = !east;
            }
            v
        }
    }
}

/// Samples a polyline every `step` meters of arclength, starting at its
/// first vertex.
fn sample_polyline(vertices: &[Point2], step: f64) -> Vec<Point2> {
    let total: f64 = vertices.windows(2).map(|w| w[0].distance(w[1])).sum();
    let n = (total / step + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for k in 0..=n {
        let s = (k as f64 * step).min(total);
        loop {
            let len = vertices[seg].distance(vertices[seg + 1]);
            if s <= seg_start + len || seg + 2 == vertices.len() {
                let t = if len > 0.0 {
                    ((s - seg_start) / len).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let (a, b) = (vertices[seg], vertices[seg + 1]);
                out.push(if t == 1.0 { b } else { a + (b - a) * t });
                break;
            }
            seg_start += len;
            seg += 1;
        }
    }
    out
}

pub fn make_scenario(
    kind: ScenarioKind,
    length: f64,
    step: f64,
    drift: DriftModel,
) -> Result<Scenario> {
    make_scenario_with(kind, length, step, drift, ScenarioOptions::default())
}

/// Builds a true path, its map and the drift model. The map centerline
/// coincides with the truth unless `options.map_shift` moves it.
pub fn make_scenario_with(
    kind: ScenarioKind,
    length: f64,
    step: f64,
    drift: DriftModel,
    options: ScenarioOptions,
) -> Result<Scenario> {
    if !(length > 0.0 && length.is_finite()) || !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "length and step must be positive, got {length} and {step}"
        )));
    }
    if kind == ScenarioKind::LTurns && !(options.segment_length > 0.0) {
        return Err(Error::InvalidParameter(
            "segment_length must be positive".into(),
        ));
    }
    drift.validate()?;
    let vertices = path_vertices(kind, length, options.segment_length);
    let points = sample_polyline(&vertices, step);
    let stamps = (0..points.len()).map(|k| k as f64).collect();
    let truth = Trajectory::with_timestamps(points, stamps)?;
    let map = PolylineMap::new(vec![vertices
        .iter()
        .map(|&v| v + options.map_shift)
        .collect()])?;
    Ok(Scenario {
        name: format!("{kind}_{length}m"),
        kind,
        length,
        step,
        options,
        map,
        truth,
        drift,
    })
}

/// Perturbs each epoch's turn and step length and re-integrates from the
/// true initial conditions. Noise draws happen in epoch order, turn first.
pub fn inject_drift(truth: &Trajectory, drift: &DriftModel) -> Result<Trajectory> {
    drift.validate()?;
    let init = InitialConditions::from_trajectory(truth)?;
    let mut series = angular_series_from(truth, init.heading0)?;
    let mut noise = NoiseSource::new(drift.seed);
    for s in series.iter_mut() {
        let dn = noise.normal(drift.angle_noise_std);
        let mn = noise.normal(drift.magnitude_noise_std);
        s.alpha += drift.heading_rate_bias + dn;
        s.m = (s.m * drift.scale_bias + mn).max(0.0);
    }
    let out = integrate(init, &series);
    match truth.timestamps() {
        Some(ts) => Trajectory::with_timestamps(out.points().to_vec(), ts.to_vec()),
        None => Ok(out),
    }
}

/// Table-style comparison of a corrected and an uncorrected trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub closing_corrected: f64,
    pub closing_slam: f64,
    pub rmse_corrected: f64,
    pub rmse_slam: f64,
    pub max_err_corrected: f64,
    pub max_err_slam: f64,
    pub improvement_factor: f64,
}

fn errors(est: &Trajectory, reference: &Trajectory) -> (f64, f64) {
    let (sum2, max) = est
        .points()
        .iter()
        .zip(reference.points())
        .map(|(a, b)| a.distance(*b))
        .fold((0.0, 0.0f64), |(s, m), e| (s + e * e, m.max(e)));
    ((sum2 / est.len() as f64).sqrt(), max)
}

pub fn evaluate(
    corrected: &Trajectory,
    slam_only: &Trajectory,
    reference: &Trajectory,
) -> Result<EvalReport> {
    if corrected.len() != reference.len() {
        return Err(Error::LengthMismatch(corrected.len(), reference.len()));
    }
    if slam_only.len() != reference.len() {
        return Err(Error::LengthMismatch(slam_only.len(), reference.len()));
    }
    let closing_corrected = closing_distance(corrected, reference)?;
    let closing_slam = closing_distance(slam_only, reference)?;
    let (rmse_corrected, max_err_corrected) = errors(corrected, reference);
    let (rmse_slam, max_err_slam) = errors(slam_only, reference);
    Ok(EvalReport {
        closing_corrected,
        closing_slam,
        rmse_corrected,
        rmse_slam,
        max_err_corrected,
        max_err_slam,
        improvement_factor: closing_slam / closing_corrected.max(1e-9),
    })
}

/// Fixed-width table of closing distances at decimeter resolution.
pub fn format_table(rows: &[(String, EvalReport)]) -> String {
    let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(8);
    let mut out = format!(
        "{:<label_w$}  {:>14}  {:>14}  {:>10}  {:>8}\n",
        "scenario", "corrected (m)", "SLAM only (m)", "RMSE (m)", "factor"
    );
    for (label, r) in rows {
        out.push_str(&format!(
            "{:<label_w$}  {:>14.1}  {:>14.1}  {:>10.1}  {:>7.1}x\n",
            label, r.closing_corrected, r.closing_slam, r.rmse_corrected, r.improvement_factor
        ));
    }
    out
}
