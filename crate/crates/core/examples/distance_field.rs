// Rasterize a small road map, build its distance field and query it.

use driftcorr::geometry::Point2;
use driftcorr::worldmap::io::{read_field, write_field};
use driftcorr::worldmap::{rasterize, DistanceField, DistancePrior, PolylineMap, RasterSpec};

pub fn run_example() -> driftcorr::Result<()> {
    let map = PolylineMap::new(vec![vec![
        Point2::new(0.0, 0.0),
        Point2::new(40.0, 0.0),
        Point2::new(40.0, 30.0),
    ]])?;
    let spec = RasterSpec::covering(&map, 0.5, 10.0)?;
    let occupancy = rasterize(&map, &spec)?;
    println!(
        "grid {}x{}, {} occupied cells",
        spec.width,
        spec.height,
        occupancy.count()
    );

    let field = DistanceField::from_map(&map, spec, 8.0)?;
    for p in [
        Point2::new(20.0, 0.0),
        Point2::new(20.0, 3.2),
        Point2::new(35.0, 10.0),
        Point2::new(-20.0, -20.0),
    ] {
        let g = field.distance_gradient(p);
        println!(
            "D({:6.1}, {:6.1}) = {:6.3}  grad = ({:+.3}, {:+.3})",
            p.x,
            p.y,
            field.distance(p),
            g.x,
            g.y
        );
    }
    assert!(field.distance(Point2::new(20.0, 0.0)) < 0.5);
    assert_eq!(field.distance(Point2::new(-20.0, -20.0)), field.d_max());

    let path = std::env::temp_dir().join(format!("driftcorr-field-{}.dfld", std::process::id()));
    write_field(&path, &field)?;
    let back = read_field(&path)?;
    std::fs::remove_file(&path).ok();
    assert_eq!(back.values(), field.values());
    println!("round trip through {} ok", path.display());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
