//! Per-epoch mode seeking and recursive trajectory correction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angular_series_from, wrap, InitialConditions, Point2, Trajectory};
use crate::objective::{joint_nll, EpochContext, EpochObservation, MIN_STEP};
use crate::priors::PriorParams;
use crate::worldmap::DistancePrior;

/// Which heading a candidate's turn is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadingAnchor {
    /// Direction of the previous corrected step.
    #[default]
    Corrected,
    /// The SLAM's own dead-reckoned heading, started from the initial heading.
    Slam,
}

/// Gradient descent settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    #[serde(rename = "lr")]
    pub learning_rate: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_tol: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Learning-rate multiplier after an accepted step; 1 keeps it fixed.
    pub lr_growth: f64,
    /// Armijo constant: a step must lower the objective by at least
    /// `sufficient_decrease * lr * |grad|^2`. 0 accepts any strict decrease.
    pub sufficient_decrease: f64,
    pub heading_anchor: HeadingAnchor,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            max_iters: 500,
            grad_tol: 1e-6,
            step_tol: 1e-6,
            backtrack_factor: 0.5,
            max_backtracks: 20,
            lr_growth: 2.0,
            sufficient_decrease: 0.5,
            heading_anchor: HeadingAnchor::Corrected,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("lr", self.learning_rate)?;
        positive("grad_tol", self.grad_tol)?;
        positive("step_tol", self.step_tol)?;
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "backtrack_factor must be in (0, 1), got {}",
                self.backtrack_factor
            )));
        }
        if !(0.0..1.0).contains(&self.sufficient_decrease) {
            return Err(Error::InvalidParameter(format!(
                "sufficient_decrease must be in [0, 1), got {}",
                self.sufficient_decrease
            )));
        }
        if !(self.lr_growth >= 1.0 && self.lr_growth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lr_growth must be >= 1, got {}",
                self.lr_growth
            )));
        }
        Ok(())
    }
}

/// Why the descent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    StepTolerance,
    MaxIterations,
    BacktrackExhausted,
}

/// Record of one epoch's optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochSolve {
    pub p_star: Point2,
    pub nll_initial: f64,
    pub nll_final: f64,
    pub iterations: usize,
    pub converged: bool,
    pub backtrack_exhausted: bool,
    pub termination: Termination,
    pub grad_norm: f64,
    /// Objective after each accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

/// Gradient descent from `init_guess`, accepting only strictly decreasing steps.
///
/// A step is taken only when it lowers the objective strictly and by the
/// Armijo margin. A rejected step shrinks the learning rate by
/// `backtrack_factor`; an accepted one grows it by `lr_growth`. A proposed
/// step shorter than `step_tol` counts as convergence.
pub fn solve_epoch<F: DistancePrior + ?Sized>(
    init_guess: Point2,
    ctx: &EpochContext,
    obs: &EpochObservation,
    prior: &F,
    params: &PriorParams,
    cfg: &SolverConfig,
) -> Result<EpochSolve> {
    cfg.validate()?;
    let mut p = init_guess;
    let mut cur = joint_nll(p, ctx, obs, prior, params)?;
    if !p.is_finite() || !cur.is_finite() {
        return Err(Error::ObjectiveUndefined);
    }
    let nll_initial = cur.nll;
    let mut trace = vec![cur.nll];
    let mut iterations = 0;
    let mut termination = Termination::MaxIterations;
    let mut lr = cfg.learning_rate;

    'descent: while iterations < cfg.max_iters {
        let gnorm = cur.grad.norm();
        if gnorm <= cfg.grad_tol {
            termination = Termination::GradientTolerance;
            break;
        }
        let mut backtracks = 0;
        loop {
            if lr * gnorm <= cfg.step_tol {
                termination = Termination::StepTolerance;
                break 'descent;
            }
            let trial = p - cur.grad * lr;
            let ev = joint_nll(trial, ctx, obs, prior, params)?;
            let required = cfg.sufficient_decrease * lr * gnorm * gnorm;
            if ev.is_finite() && ev.nll < cur.nll && cur.nll - ev.nll >= required {
                p = trial;
                cur = ev;
                iterations += 1;
                trace.push(cur.nll);
                lr *= cfg.lr_growth;
                break;
            }
            if backtracks == cfg.max_backtracks {
                termination = Termination::BacktrackExhausted;
                break 'descent;
            }
            lr *= cfg.backtrack_factor;
            backtracks += 1;
        }
    }

    Ok(EpochSolve {
        p_star: p,
        nll_initial,
        nll_final: cur.nll,
        iterations,
        converged: matches!(
            termination,
            Termination::GradientTolerance | Termination::StepTolerance
        ),
        backtrack_exhausted: termination == Termination::BacktrackExhausted,
        termination,
        grad_norm: cur.grad.norm(),
        trace,
    })
}

/// Output of [`correct_trajectory`].
#[derive(Debug, Clone)]
pub struct Correction {
    pub trajectory: Trajectory,
    pub epochs: Vec<EpochSolve>,
}

impl Correction {
    pub fn converged_fraction(&self) -> f64 {
        if self.epochs.is_empty() {
            return 1.0;
        }
        self.epochs.iter().filter(|e| e.converged).count() as f64 / self.epochs.len() as f64
    }
}

/// Corrects every epoch of a SLAM trajectory in sequence.
///
/// The SLAM turns and step lengths are the observations. Each epoch starts
/// from the dead-reckoned prediction in the corrected frame and the
/// corrected step direction becomes the next epoch's heading.
pub fn correct_trajectory<F: DistancePrior + ?Sized>(
    slam: &Trajectory,
    init: InitialConditions,
    prior: &F,
    params: &PriorParams,
    cfg: &SolverConfig,
) -> Result<Correction> {
    params.validate()?;
    cfg.validate()?;
    let series = angular_series_from(slam, init.heading0)?;
    let mut points = Vec::with_capacity(series.len() + 1);
    let mut epochs = Vec::with_capacity(series.len());
    let mut p_prev = init.p0;
    let mut heading = init.heading0;
    let mut slam_heading = init.heading0;
    points.push(p_prev);

    for (t, step) in series.iter().enumerate() {
        let obs = EpochObservation {
            alpha_obs: step.alpha,
            m_obs: step.m,
        };
        let anchor = match cfg.heading_anchor {
            HeadingAnchor::Corrected => heading,
            HeadingAnchor::Slam => slam_heading,
        };
        let ctx = EpochContext {
            p_prev,
            heading_prev: anchor,
        };
        let guess = ctx.predict(&obs);
        let solve =
            solve_epoch(guess, &ctx, &obs, prior, params, cfg).map_err(|e| Error::Epoch {
                epoch: t + 1,
                source: Box::new(e),
            })?;
        let p = solve.p_star;
        let d = p - p_prev;
        if d.norm() >= MIN_STEP {
            heading = wrap(d.y.atan2(d.x));
        }
        slam_heading = wrap(slam_heading + step.alpha);
        points.push(p);
        epochs.push(solve);
        p_prev = p;
    }

    let trajectory = match slam.timestamps() {
        Some(ts) => Trajectory::with_timestamps(points, ts.to_vec())?,
        None => Trajectory::new(points)?,
    };
    Ok(Correction { trajectory, epochs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::integrate;
    use crate::worldmap::{DistanceField, PolylineMap, RasterSpec};

    fn straight_road() -> DistanceField {
        let map = PolylineMap::new(vec![vec![Point2::new(-10.0, 0.0), Point2::new(60.0, 0.0)]]).unwrap();
        let spec = RasterSpec::covering(&map, 1.0, 20.0).unwrap();
        DistanceField::from_map(&map, spec, 15.0).unwrap()
    }

    #[test]
    fn already_at_mode() {
        let field = straight_road();
        let params = PriorParams::default().without(&[2, 3]);
        let ctx = EpochContext {
            p_prev: Point2::new(1.0, 2.0),
            heading_prev: 0.4,
        };
        let obs = EpochObservation {
            alpha_obs: -0.1,
            m_obs: 1.2,
        };
        let guess = ctx.predict(&obs);
        let cfg = SolverConfig::default();
        let s = solve_epoch(guess, &ctx, &obs, &field, &params, &cfg).unwrap();
        assert!(s.converged);
        assert!(s.iterations <= 1);
        assert!(s.p_star.distance(guess) <= cfg.step_tol);
    }

    #[test]
    fn map_only_pulls_to_center_line() {
        let field = straight_road();
        let params = PriorParams::default().without(&[0, 1, 3]);
        let ctx = EpochContext {
            p_prev: Point2::new(9.0, 2.0),
            heading_prev: 0.0,
        };
        let obs = EpochObservation {
            alpha_obs: 0.0,
            m_obs: 1.0,
        };
        let guess = Point2::new(10.3, 2.0);
        let s = solve_epoch(guess, &ctx, &obs, &field, &params, &SolverConfig::default()).unwrap();
        // oracle: 1 cm grid search over a 6 m box
        let mut best = (f64::INFINITY, Point2::ORIGIN);
        for i in -300..=300 {
            for j in -300..=300 {
                let q = guess + Point2::new(i as f64 * 0.01, j as f64 * 0.01);
                let v = joint_nll(q, &ctx, &obs, &field, &params).unwrap().nll;
                if v < best.0 {
                    best = (v, q);
                }
            }
        }
        assert!(best.1.y.abs() < 1e-9);
        assert!(s.p_star.y.abs() < 0.05, "{:?}", s.p_star);
        assert!(s.nll_final <= s.nll_initial);
    }

    #[test]
    fn undefined_start_is_an_error() {
        let field = straight_road();
        let ctx = EpochContext {
            p_prev: Point2::ORIGIN,
            heading_prev: 0.0,
        };
        let obs = EpochObservation {
            alpha_obs: 0.0,
            m_obs: 1.0,
        };
        let err = solve_epoch(
            Point2::new(f64::NAN, 0.0),
            &ctx,
            &obs,
            &field,
            &PriorParams::default(),
            &SolverConfig::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("objective undefined"));
    }

    #[test]
    fn observations_only_reproduce_dead_reckoning() {
        let field = straight_road();
        let pts: Vec<Point2> = (0..40)
            .map(|k| {
                let t = k as f64;
                Point2::new(t, 3.0 * (t * 0.2).sin())
            })
            .collect();
        let slam = Trajectory::new(pts).unwrap();
        let init = InitialConditions::new(Point2::new(0.0, 0.0), 0.1).unwrap();
        let params = PriorParams::default().without(&[2, 3]);
        let out = correct_trajectory(&slam, init, &field, &params, &SolverConfig::default()).unwrap();
        let dr = integrate(init, &angular_series_from(&slam, init.heading0).unwrap());
        assert_eq!(out.trajectory.len(), slam.len());
        assert_eq!(out.trajectory.first(), init.p0);
        for (a, b) in out.trajectory.points().iter().zip(dr.points()) {
            assert!(a.distance(*b) < 1e-6, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn on_road_input_stays_put() {
        let field = straight_road();
        let pts: Vec<Point2> = (0..50).map(|k| Point2::new(k as f64, 0.0)).collect();
        let slam = Trajectory::new(pts).unwrap();
        let init = InitialConditions::from_trajectory(&slam).unwrap();
        let out = correct_trajectory(&slam, init, &field, &PriorParams::default(), &SolverConfig::default()).unwrap();
        for (a, b) in out.trajectory.points().iter().zip(slam.points()) {
            assert!(a.distance(*b) < 0.1);
        }
        for e in &out.epochs {
            assert!(e.nll_final <= e.nll_initial);
        }
    }

    #[test]
    fn deterministic() {
        let field = straight_road();
        let pts: Vec<Point2> = (0..30)
            .map(|k| Point2::new(k as f64, 0.02 * (k * k) as f64))
            .collect();
        let slam = Trajectory::new(pts).unwrap();
        let init = InitialConditions::from_trajectory(&slam).unwrap();
        let run = || correct_trajectory(&slam, init, &field, &PriorParams::default(), &SolverConfig::default()).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.epochs, b.epochs);
    }

    #[test]
    fn config_json() {
        let cfg: SolverConfig = serde_json::from_str(r#"{"lr":0.02,"max_iters":50,"heading_anchor":"slam"}"#).unwrap();
        assert_eq!(cfg.learning_rate, 0.02);
        assert_eq!(cfg.max_iters, 50);
        assert_eq!(cfg.heading_anchor, HeadingAnchor::Slam);
        assert_eq!(cfg.grad_tol, 1e-6);
        let bad = SolverConfig {
            backtrack_factor: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            sufficient_decrease: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn plain_decrease_rule_also_converges() {
        let field = straight_road();
        let cfg = SolverConfig {
            sufficient_decrease: 0.0,
            max_iters: 5000,
            ..Default::default()
        };
        let ctx = EpochContext {
            p_prev: Point2::new(0.0, 2.0),
            heading_prev: 0.0,
        };
        let obs = EpochObservation {
            alpha_obs: 0.0,
            m_obs: 1.0,
        };
        let strict = solve_epoch(ctx.predict(&obs), &ctx, &obs, &field, &PriorParams::default(), &cfg).unwrap();
        let armijo = solve_epoch(ctx.predict(&obs), &ctx, &obs, &field, &PriorParams::default(), &SolverConfig::default()).unwrap();
        assert!(strict.converged && armijo.converged);
        assert!(strict.p_star.distance(armijo.p_star) < 1e-3);
    }
}
