// Print the joint objective around one epoch's prediction and solve it.

use driftcorr::objective::{EpochContext, EpochObservation};
use driftcorr::prelude::*;

pub fn run_example() -> driftcorr::Result<()> {
    // Road along y = 0; the vehicle sits on it but SLAM reports a 0.1 rad left turn.
    let map = PolylineMap::new(vec![vec![Point2::new(-50.0, 0.0), Point2::new(50.0, 0.0)]])?;
    let field = DistanceField::from_map(&map, RasterSpec::covering(&map, 0.5, 20.0)?, 15.0)?;
    let ctx = EpochContext {
        p_prev: Point2::ORIGIN,
        heading_prev: 0.0,
    };
    let obs = EpochObservation {
        alpha_obs: 0.1,
        m_obs: 1.0,
    };
    let params = PriorParams::default();

    println!("nll on a 0.05 m grid around the prediction (rows: y, cols: x)");
    let pred = ctx.predict(&obs);
    for j in (-4..=4).rev() {
        let y = pred.y + 0.05 * j as f64;
        let row: Vec<String> = (-4..=4)
            .map(|i| {
                let p = Point2::new(pred.x + 0.05 * i as f64, y);
                joint_nll(p, &ctx, &obs, &field, &params).map(|e| format!("{:7.2}", e.nll))
            })
            .collect::<driftcorr::Result<_>>()?;
        println!("{y:+.2} {}", row.join(" "));
    }

    let solve = solve_epoch(pred, &ctx, &obs, &field, &params, &SolverConfig::default())?;
    println!(
        "prediction ({:.4}, {:.4}) -> mode ({:.4}, {:.4})",
        pred.x, pred.y, solve.p_star.x, solve.p_star.y
    );
    println!(
        "nll {:.4} -> {:.4} in {} iterations ({:?})",
        solve.nll_initial, solve.nll_final, solve.iterations, solve.termination
    );
    assert!(solve.nll_final <= solve.nll_initial);
    assert!(solve.p_star.y.abs() < pred.y.abs());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
