//! Joint weighted negative log-likelihood of a candidate epoch position.
//!
//! For a candidate `p` following the corrected state `(p_prev, heading_prev)`
//! the step `p - p_prev` has length `m` and turn `alpha`. The objective is
//!
//! ```text
//! w1 NLL(alpha; alpha_obs, s1) + w2 NLL(m; m_obs, s2)
//!   + w3 NLL(D(p); 0, s3) + w4 NLL(alpha; 0, s4)
//! ```
//!
//! with angular residuals wrapped and `D` the distance-to-path prior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wrap, Point2};
use crate::priors::{angle_residual, GaussianTerm, PriorParams};
use crate::worldmap::DistancePrior;

/// Steps shorter than this have no defined direction.
pub const MIN_STEP: f64 = 1e-6;

/// Turn and length of one SLAM epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochObservation {
    pub alpha_obs: f64,
    pub m_obs: f64,
}

/// Corrected state the candidate step starts from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochContext {
    pub p_prev: Point2,
    pub heading_prev: f64,
}

impl EpochContext {
    /// Dead-reckoned position for an observation, the mode of X1 x X2.
    pub fn predict(&self, obs: &EpochObservation) -> Point2 {
        self.p_prev + Point2::from_heading(self.heading_prev + obs.alpha_obs) * obs.m_obs
    }
}

/// Polar form of a candidate step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidatePolar {
    /// Turn relative to `heading_prev`; `None` for steps below [`MIN_STEP`].
    pub alpha: Option<f64>,
    pub m: f64,
    /// Absolute direction of the step (0 when undefined).
    pub theta: f64,
}

pub fn candidate_polar(p: Point2, ctx: &EpochContext) -> CandidatePolar {
    let d = p - ctx.p_prev;
    let m = d.norm();
    if m < MIN_STEP {
        return CandidatePolar {
            alpha: None,
            m,
            theta: 0.0,
        };
    }
    let theta = wrap(d.y.atan2(d.x));
    CandidatePolar {
        alpha: Some(angle_residual(theta, ctx.heading_prev)),
        m,
        theta,
    }
}

/// Objective value, gradient and per-term breakdown at one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEval {
    pub nll: f64,
    pub grad: Point2,
    /// Unweighted X1..X4 NLLs; `nll` is their weighted sum.
    pub term_values: [f64; 4],
    pub alpha_defined: bool,
}

impl CandidateEval {
    pub fn is_finite(&self) -> bool {
        self.nll.is_finite() && self.grad.is_finite()
    }
}

/// Evaluates the joint objective and its analytic gradient at `p`.
pub fn joint_nll<F: DistancePrior + ?Sized>(
    p: Point2,
    ctx: &EpochContext,
    obs: &EpochObservation,
    prior: &F,
    params: &PriorParams,
) -> Result<CandidateEval> {
    params.validate()?;
    if !obs.m_obs.is_finite() || !obs.alpha_obs.is_finite() {
        return Err(Error::NonFinite("epoch observation"));
    }
    let w = params.weight;
    let turn = GaussianTerm::new(obs.alpha_obs, params.sigma[0], w[0])?;
    let length = GaussianTerm::new(obs.m_obs, params.sigma_magnitude(obs.m_obs), w[1])?;
    let path = GaussianTerm::new(0.0, params.sigma[2], w[2])?;
    let hold = GaussianTerm::new(0.0, params.sigma[3], w[3])?;

    let polar = candidate_polar(p, ctx);
    let radial = if polar.m > 0.0 {
        (p - ctx.p_prev) * (1.0 / polar.m)
    } else {
        Point2::ORIGIN
    };
    let mut grad = Point2::ORIGIN;
    let mut terms = [0.0; 4];

    match polar.alpha {
        Some(alpha) => {
            // residual against alpha_obs, so X1 is evaluated at mu + r
            let r1 = angle_residual(alpha, obs.alpha_obs);
            terms[0] = turn.nll(turn.mu + r1);
            terms[3] = hold.nll(alpha);
            let tangential = Point2::new(-radial.y, radial.x) * (1.0 / polar.m.max(MIN_STEP));
            let dalpha = w[0] * turn.grad(turn.mu + r1) + w[3] * hold.grad(alpha);
            if dalpha != 0.0 {
                grad += tangential * dalpha;
            }
        }
        None => {
            terms[0] = turn.nll(turn.mu);
            terms[3] = hold.nll(hold.mu);
        }
    }

    terms[1] = length.nll(polar.m);
    if w[1] != 0.0 {
        grad += radial * (w[1] * length.grad(polar.m));
    }

    let d = prior.distance(p);
    terms[2] = path.nll(d);
    if w[2] != 0.0 {
        let g = path.grad(d);
        if g != 0.0 {
            grad += prior.distance_gradient(p) * (w[2] * g);
        }
    }

    let nll = terms
        .iter()
        .zip(&w)
        .filter(|(_, &wi)| wi != 0.0)
        .map(|(t, wi)| wi * t)
        .sum();
    Ok(CandidateEval {
        nll,
        grad,
        term_values: terms,
        alpha_defined: polar.alpha.is_some(),
    })
}
