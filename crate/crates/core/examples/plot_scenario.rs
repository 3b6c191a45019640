// Simulate an L-turn run, store it, correct it and draw an SVG.

use driftcorr::plot::{render_svg, Layer, Role};
use driftcorr::prelude::*;
use driftcorr::simulator::store::{load_scenario, save_scenario};

pub fn run_example() -> driftcorr::Result<()> {
    let scenario = make_scenario(
        ScenarioKind::LTurns,
        300.0,
        1.0,
        DriftModel {
            heading_rate_bias: 0.002,
            angle_noise_std: 0.005,
            seed: 11,
            ..DriftModel::IDENTITY
        },
    )?;
    let dir = std::env::temp_dir().join(format!("driftcorr-plot-{}", std::process::id()));
    save_scenario(&dir, &scenario)?;
    let stored = load_scenario(&dir)?;

    let spec = RasterSpec::covering(&stored.map, 1.0, 30.0)?;
    let field = DistanceField::from_map(&stored.map, spec, 15.0)?;
    let out = correct_trajectory(
        &stored.slam,
        stored.manifest.init,
        &field,
        &PriorParams::default(),
        &SolverConfig::default(),
    )?;

    let svg = render_svg(
        &[
            Layer::new("truth", Role::Reference, &stored.truth),
            Layer::new("slam", Role::Slam, &stored.slam),
            Layer::new("corrected", Role::Corrected, &out.trajectory),
        ],
        Some(&field),
    )?;
    let path = dir.join("plot.svg");
    std::fs::write(&path, &svg).map_err(|e| driftcorr::Error::Io {
        path: path.clone(),
        source: e,
    })?;
    println!("wrote {} ({} bytes)", path.display(), svg.len());
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
