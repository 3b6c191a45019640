// Correct a 500 m straight run whose heading drifts by 2 mrad per epoch.

use driftcorr::prelude::*;

pub fn run_example() -> driftcorr::Result<()> {
    let scenario = make_scenario(
        ScenarioKind::Straight,
        500.0,
        1.0,
        DriftModel::heading_bias(0.002),
    )?;
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
    let report = evaluate(&out.trajectory, &slam, &scenario.truth)?;

    println!("epochs        {}", out.epochs.len());
    println!("converged     {:.1}%", 100.0 * out.converged_fraction());
    println!("closing slam  {:.2} m", report.closing_slam);
    println!("closing corr  {:.2} m", report.closing_corrected);
    println!("improvement   {:.1}x", report.improvement_factor);
    assert!(report.closing_corrected * 10.0 <= report.closing_slam);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
