//! Exact Euclidean distance transform by lower envelopes of parabolas,
//! one pass over columns and one over rows.

use super::{DistanceField, OccupancyGrid, RasterSpec};
use crate::error::{Error, Result};

/// Squared distance transform of a 1-D sampled function. Infinite entries
/// contribute no parabola.
fn envelope_1d(f: &[f64], out: &mut [f64], sites: &mut Vec<usize>, bounds: &mut Vec<f64>) {
    sites.clear();
    bounds.clear();
    for (q, &fq) in f.iter().enumerate() {
        if fq.is_infinite() {
            continue;
        }
        let qf = q as f64;
        loop {
            let Some(&v) = sites.last() else {
                sites.push(q);
                bounds.push(f64::NEG_INFINITY);
                break;
            };
            let vf = v as f64;
            let s = ((fq + qf * qf) - (f[v] + vf * vf)) / (2.0 * (qf - vf));
            if s <= *bounds.last().unwrap() {
                sites.pop();
                bounds.pop();
            } else {
                sites.push(q);
                bounds.push(s);
                break;
            }
        }
    }
    if sites.is_empty() {
        out.fill(f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (x, o) in out.iter_mut().enumerate() {
        let xf = x as f64;
        while k + 1 < sites.len() && bounds[k + 1] < xf {
            k += 1;
        }
        let d = xf - sites[k] as f64;
        *o = d * d + f[sites[k]];
    }
}

/// Squared distances, in cells, from every cell center to the nearest
/// occupied center.
pub(crate) fn squared_cell_distances(occ: &OccupancyGrid) -> Vec<f64> {
    let (w, h) = (occ.width, occ.height);
    let mut grid: Vec<f64> = occ
        .cells
        .iter()
        .map(|&c| if c { 0.0 } else { f64::INFINITY })
        .collect();
    let mut sites = Vec::new();
    let mut bounds = Vec::new();

    let mut col_in = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for c in 0..w {
        for r in 0..h {
            col_in[r] = grid[r * w + c];
        }
        envelope_1d(&col_in, &mut col_out, &mut sites, &mut bounds);
        for r in 0..h {
            grid[r * w + c] = col_out[r];
        }
    }

    let mut row_out = vec![0.0; w];
    for r in 0..h {
        let row = &grid[r * w..(r + 1) * w];
        envelope_1d(row, &mut row_out, &mut sites, &mut bounds);
        grid[r * w..(r + 1) * w].copy_from_slice(&row_out);
    }
    grid
}

/// Truncated distance field in meters, measured between cell centers.
pub fn distance_transform(
    occupancy: &OccupancyGrid,
    spec: &RasterSpec,
    d_max: f64,
) -> Result<DistanceField> {
    if occupancy.width != spec.width || occupancy.height != spec.height {
        return Err(Error::LengthMismatch(occupancy.cells.len(), spec.len()));
    }
    if !(d_max > 0.0 && d_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "d_max must be positive, got {d_max}"
        )));
    }
    if occupancy.count() == 0 {
        return Err(Error::NoOccupiedCell);
    }
    let values = squared_cell_distances(occupancy)
        .into_iter()
        .map(|d2| (d2.sqrt() * spec.cell_size).min(d_max))
        .collect();
    DistanceField::from_values(*spec, values, d_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use proptest::prelude::*;

    fn brute_force(occ: &OccupancyGrid, cell: f64, d_max: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(occ.cells.len());
        for r in 0..occ.height {
            for c in 0..occ.width {
                let mut best = f64::INFINITY;
                for rr in 0..occ.height {
                    for cc in 0..occ.width {
                        if occ.get(cc, rr) {
                            let dx = c as f64 - cc as f64;
                            let dy = r as f64 - rr as f64;
                            best = best.min((dx * dx + dy * dy).sqrt());
                        }
                    }
                }
                out.push((best * cell).min(d_max));
            }
        }
        out
    }

    #[test]
    fn all_occupied_is_zero() {
        let spec = RasterSpec::new(Point2::ORIGIN, 1.0, 5, 4).unwrap();
        let occ = OccupancyGrid {
            width: 5,
            height: 4,
            cells: vec![true; 20],
        };
        let f = distance_transform(&occ, &spec, 3.0).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_center_cell() {
        let spec = RasterSpec::new(Point2::ORIGIN, 1.0, 3, 3).unwrap();
        let mut occ = OccupancyGrid::empty(3, 3);
        occ.set(1, 1, true);
        let f = distance_transform(&occ, &spec, 10.0).unwrap();
        assert_eq!(f.value(1, 1), 0.0);
        for (c, r) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
            assert_eq!(f.value(c, r), 2f64.sqrt());
        }
        for (c, r) in [(1, 0), (0, 1), (2, 1), (1, 2)] {
            assert_eq!(f.value(c, r), 1.0);
        }
    }

    #[test]
    fn truncation_and_empty_grid() {
        let spec = RasterSpec::new(Point2::ORIGIN, 2.0, 10, 2).unwrap();
        let mut occ = OccupancyGrid::empty(10, 2);
        occ.set(0, 0, true);
        let f = distance_transform(&occ, &spec, 5.0).unwrap();
        assert_eq!(f.value(2, 0), 4.0);
        assert_eq!(f.value(9, 1), 5.0);
        let empty = OccupancyGrid::empty(10, 2);
        assert!(distance_transform(&empty, &spec, 5.0).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(w in 2usize..24, h in 2usize..24, density in 0.01..0.5f64, seed in any::<u64>()) {
            let mut s = seed | 1;
            let mut occ = OccupancyGrid::empty(w, h);
            for cell in occ.cells.iter_mut() {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                *cell = ((s >> 11) as f64 / (1u64 << 53) as f64) < density;
            }
            occ.cells[(seed as usize) % (w * h)] = true;
            let spec = RasterSpec::new(Point2::ORIGIN, 0.5, w, h).unwrap();
            let f = distance_transform(&occ, &spec, 1e9).unwrap();
            let expected = brute_force(&occ, 0.5, 1e9);
            prop_assert_eq!(f.values(), &expected[..]);
            // zero exactly on path cells, positive elsewhere
            for (v, &c) in f.values().iter().zip(&occ.cells) {
                prop_assert_eq!(*v == 0.0, c);
            }
            // 1-Lipschitz between cell centers
            for r in 0..h {
                for c in 0..w - 1 {
                    prop_assert!((f.value(c + 1, r) - f.value(c, r)).abs() <= 0.5 + 1e-12);
                }
            }
        }
    }
}
