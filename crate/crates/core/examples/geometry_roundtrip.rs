// Angular decomposition of a trajectory and its exact reintegration.

use driftcorr::geometry::{angular_series, integrate};
use driftcorr::prelude::*;

pub fn run_example() -> driftcorr::Result<()> {
    let points: Vec<Point2> = (0..=40)
        .map(|k| {
            let s = k as f64 * 0.25;
            Point2::new(10.0 * s.cos(), 6.0 * (2.0 * s).sin())
        })
        .collect();
    let traj = Trajectory::new(points)?;
    let steps = angular_series(&traj)?;
    for s in steps.iter().take(4) {
        println!("phi {:+.4}  alpha {:+.4}  m {:.4}", s.phi, s.alpha, s.m);
    }

    let back = integrate(InitialConditions::new(traj.first(), 0.0)?, &steps);
    let worst = traj
        .points()
        .iter()
        .zip(back.points())
        .map(|(a, b)| a.distance(*b))
        .fold(0.0, f64::max);
    println!("max reintegration error {worst:.2e} m over {} points", traj.len());
    assert!(worst < 1e-9);

    // Turn angles do not depend on where the trajectory sits in the plane.
    let moved = traj.transformed(&Rigid2::new(1.1, Point2::new(-300.0, 42.0)));
    let moved_steps = angular_series(&moved)?;
    let max_turn_diff = steps[1..]
        .iter()
        .zip(&moved_steps[1..])
        .map(|(a, b)| (a.alpha - b.alpha).abs())
        .fold(0.0, f64::max);
    println!("max turn difference after a rigid move {max_turn_diff:.2e} rad");
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
