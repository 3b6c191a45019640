// Closing distances for the three built-in scenario shapes.

use driftcorr::prelude::*;
use driftcorr::simulator::format_table;

pub fn run_example() -> driftcorr::Result<()> {
    let cases = [
        (ScenarioKind::Straight, 500.0, DriftModel::heading_bias(0.002)),
        (ScenarioKind::LTurns, 400.0, DriftModel::heading_bias(0.002)),
        (
            ScenarioKind::Loop,
            400.0,
            DriftModel {
                heading_rate_bias: 0.001,
                angle_noise_std: 0.005,
                magnitude_noise_std: 0.01,
                seed: 7,
                ..DriftModel::IDENTITY
            },
        ),
    ];
    let mut rows = Vec::new();
    for (kind, length, drift) in cases {
        let scenario = make_scenario(kind, length, 1.0, drift)?;
        let slam = scenario.slam()?;
        let spec = RasterSpec::covering(&scenario.map, 1.0, 30.0)?;
        let field = DistanceField::from_map(&scenario.map, spec, 15.0)?;
        let out = correct_trajectory(
            &slam,
            scenario.init()?,
            &field,
            &PriorParams::default(),
            &SolverConfig::default(),
        )?;
        rows.push((
            scenario.name.clone(),
            evaluate(&out.trajectory, &slam, &scenario.truth)?,
        ));
    }
    print!("{}", format_table(&rows));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
