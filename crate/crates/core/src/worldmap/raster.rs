use super::{OccupancyGrid, PolylineMap, RasterSpec};
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Shortest distance from `p` to the closed segment `a`-`b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Marks every cell whose center lies within half a cell of some segment.
pub fn rasterize(map: &PolylineMap, spec: &RasterSpec) -> Result<OccupancyGrid> {
    let mut grid = OccupancyGrid::empty(spec.width, spec.height);
    let half = 0.5 * spec.cell_size;
    let wmax = (spec.width - 1) as f64;
    let hmax = (spec.height - 1) as f64;
    for (a, b) in map.segments() {
        let (ua, va) = spec.to_grid(a);
        let (ub, vb) = spec.to_grid(b);
        // candidate window, one cell of slack around the segment box
        let c0 = (ua.min(ub) - 1.0).floor().clamp(0.0, wmax) as usize;
        let c1 = (ua.max(ub) + 1.0).ceil().clamp(0.0, wmax) as usize;
        let r0 = (va.min(vb) - 1.0).floor().clamp(0.0, hmax) as usize;
        let r1 = (va.max(vb) + 1.0).ceil().clamp(0.0, hmax) as usize;
        for row in r0..=r1 {
            for col in c0..=c1 {
                if point_segment_distance(spec.cell_center(col, row), a, b) <= half {
                    grid.set(col, row, true);
                }
            }
        }
    }
    if grid.count() == 0 {
        return Err(Error::EmptyRasterization);
    }
    Ok(grid)
}
