//! Map-aided drift correction for planar SLAM/VIO trajectories.
//!
//! Each epoch of an estimated trajectory is reduced to a turn and a step
//! length. The corrected position at that epoch is the mode of a product
//! of Gaussian beliefs: the observed turn, the observed step length, a
//! distance-to-path prior from a rasterized road map, and a heading-hold
//! prior. The mode is found by safeguarded gradient descent on the weighted
//! negative log-likelihood, starting from the dead-reckoned prediction.
//!
//! ```
//! use driftcorr::prelude::*;
//!
//! let scenario = make_scenario(ScenarioKind::Straight, 200.0, 1.0, DriftModel::heading_bias(0.002))?;
//! let slam = scenario.slam()?;
//! let spec = RasterSpec::covering(&scenario.map, 1.0, 30.0)?;
//! let field = DistanceField::from_map(&scenario.map, spec, 15.0)?;
//! let out = correct_trajectory(&slam, scenario.init()?, &field, &PriorParams::default(), &SolverConfig::default())?;
//! let report = evaluate(&out.trajectory, &slam, &scenario.truth)?;
//! assert!(report.closing_corrected < report.closing_slam);
//! # Ok::<(), driftcorr::Error>(())
//! ```

pub mod corrector;
mod error;
pub mod geometry;
pub mod io;
pub mod objective;
pub mod plot;
pub mod priors;
pub mod simulator;
pub mod worldmap;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::corrector::{correct_trajectory, solve_epoch, Correction, EpochSolve, SolverConfig};
    pub use crate::geometry::{InitialConditions, Point2, Rigid2, Trajectory};
    pub use crate::objective::{joint_nll, EpochContext, EpochObservation};
    pub use crate::priors::PriorParams;
    pub use crate::simulator::{evaluate, make_scenario, DriftModel, EvalReport, ScenarioKind};
    pub use crate::worldmap::{DistanceField, DistancePrior, PolylineMap, RasterSpec};
    pub use crate::{Error, Result};
}
