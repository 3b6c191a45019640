//! Traversable-path map prior.
//!
//! Vector paths are rasterized onto a georeferenced grid, turned into a
//! truncated Euclidean distance field and then sampled continuously with
//! bilinear interpolation. The field value at a position is its distance
//! to the nearest path centerline, clamped at `d_max`.

mod edt;
pub mod io;
mod raster;

pub use edt::distance_transform;
pub use raster::{point_segment_distance, rasterize};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Rigid2};

/// Traversable paths as polylines in world meters.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolylineMap {
    pub polylines: Vec<Vec<Point2>>,
}

impl PolylineMap {
    pub fn new(polylines: Vec<Vec<Point2>>) -> Result<Self> {
        for line in &polylines {
            if line.len() < 2 {
                return Err(Error::InvalidParameter(
                    "polyline needs at least 2 vertices".into(),
                ));
            }
            if line.iter().any(|p| !p.is_finite()) {
                return Err(Error::NonFinite("polyline vertex"));
            }
        }
        Ok(Self { polylines })
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.polylines
            .iter()
            .flat_map(|l| l.windows(2).map(|w| (w[0], w[1])))
    }

    /// Axis-aligned bounds `(min, max)` of all vertices.
    pub fn bounds(&self) -> Option<(Point2, Point2)> {
        let mut it = self.polylines.iter().flatten();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }

    pub fn transformed(&self, tf: &Rigid2) -> PolylineMap {
        PolylineMap {
            polylines: self
                .polylines
                .iter()
                .map(|l| l.iter().map(|&p| tf.apply(p)).collect())
                .collect(),
        }
    }
}

/// Grid georeferencing. Cell `(col, row)` has its center at
/// `origin + cell_size * (col, row)`; rows grow northwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterSpec {
    pub origin: Point2,
    pub cell_size: f64,
    pub width: usize,
    pub height: usize,
}

impl RasterSpec {
    pub fn new(origin: Point2, cell_size: f64, width: usize, height: usize) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::NonFinite("raster origin"));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cell_size must be positive, got {cell_size}"
            )));
        }
        if width < 2 || height < 2 {
            return Err(Error::InvalidParameter(format!(
                "raster must be at least 2x2, got {width}x{height}"
            )));
        }
        Ok(Self {
            origin,
            cell_size,
            width,
            height,
        })
    }

    /// Smallest grid, with origin on a multiple of `cell_size`, that covers
    /// the map bounds grown by `margin` on every side.
    pub fn covering(map: &PolylineMap, cell_size: f64, margin: f64) -> Result<Self> {
        let (lo, hi) = map.bounds().ok_or(Error::EmptyRasterization)?;
        if !(cell_size > 0.0) || !(margin >= 0.0) {
            return Err(Error::InvalidParameter(
                "cell_size must be positive and margin non-negative".into(),
            ));
        }
        let ox = ((lo.x - margin) / cell_size).floor() * cell_size;
        let oy = ((lo.y - margin) / cell_size).floor() * cell_size;
        let width = ((hi.x + margin - ox) / cell_size).ceil() as usize + 1;
        let height = ((hi.y + margin - oy) / cell_size).ceil() as usize + 1;
        Self::new(Point2::new(ox, oy), cell_size, width.max(2), height.max(2))
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2 {
        Point2::new(
            self.origin.x + col as f64 * self.cell_size,
            self.origin.y + row as f64 * self.cell_size,
        )
    }

    /// Continuous grid coordinates (column, row) of a world position.
    pub fn to_grid(&self, p: Point2) -> (f64, f64) {
        (
            (p.x - self.origin.x) / self.cell_size,
            (p.y - self.origin.y) / self.cell_size,
        )
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }
}

/// Binary grid of path cells, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: bool) {
        self.cells[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Anything that can report distance-to-path and its spatial gradient.
pub trait DistancePrior {
    fn distance(&self, p: Point2) -> f64;
    fn distance_gradient(&self, p: Point2) -> Point2;
}

impl<T: DistancePrior + ?Sized> DistancePrior for &T {
    fn distance(&self, p: Point2) -> f64 {
        (**self).distance(p)
    }
    fn distance_gradient(&self, p: Point2) -> Point2 {
        (**self).distance_gradient(p)
    }
}

/// Truncated Euclidean distance-to-path raster.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    spec: RasterSpec,
    values: Vec<f64>,
    d_max: f64,
}

impl DistanceField {
    /// Wraps raw values, checking the field invariants.
    pub fn from_values(spec: RasterSpec, values: Vec<f64>, d_max: f64) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::LengthMismatch(values.len(), spec.len()));
        }
        if !(d_max > 0.0 && d_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "d_max must be positive, got {d_max}"
            )));
        }
        if values.iter().any(|v| !(0.0..=d_max).contains(v)) {
            return Err(Error::InvalidParameter(
                "distance values must lie in [0, d_max]".into(),
            ));
        }
        if !values.contains(&0.0) {
            return Err(Error::NoOccupiedCell);
        }
        Ok(Self {
            spec,
            values,
            d_max,
        })
    }

    /// Rasterizes the map onto `spec` and transforms it.
    pub fn from_map(map: &PolylineMap, spec: RasterSpec, d_max: f64) -> Result<Self> {
        let occ = rasterize(map, &spec)?;
        distance_transform(&occ, &spec, d_max)
    }

    pub fn spec(&self) -> &RasterSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.values[self.spec.index(col, row)]
    }

    /// Locates the interpolation quad: lower-left cell and fractional offsets.
    /// Positions outside the extent are clamped to the border.
    fn quad(&self, p: Point2) -> (usize, usize, f64, f64, bool) {
        let (u, v) = self.spec.to_grid(p);
        let wmax = (self.spec.width - 1) as f64;
        let hmax = (self.spec.height - 1) as f64;
        let inside = (0.0..=wmax).contains(&u) && (0.0..=hmax).contains(&v);
        let u = u.clamp(0.0, wmax);
        let v = v.clamp(0.0, hmax);
        let col = (u.floor() as usize).min(self.spec.width - 2);
        let row = (v.floor() as usize).min(self.spec.height - 2);
        (col, row, u - col as f64, v - row as f64, inside)
    }

    fn corners(&self, col: usize, row: usize) -> [f64; 4] {
        [
            self.value(col, row),
            self.value(col + 1, row),
            self.value(col, row + 1),
            self.value(col + 1, row + 1),
        ]
    }

    fn interp(&self, col: usize, row: usize, fx: f64, fy: f64) -> f64 {
        let [v00, v10, v01, v11] = self.corners(col, row);
        let bottom = v00 + fx * (v10 - v00);
        let top = v01 + fx * (v11 - v01);
        bottom + fy * (top - bottom)
    }

    /// Bilinear interpolation of the cell-center values (clamp-to-edge).
    pub fn sample_bilinear(&self, p: Point2) -> f64 {
        let (col, row, fx, fy, _) = self.quad(p);
        self.interp(col, row, fx, fy)
    }

    /// Gradient of the bilinear surface, per meter. Zero outside the grid
    /// extent. On a saturated quad all corners equal `d_max` and the
    /// differences vanish. Discontinuous across cell edges.
    pub fn gradient_bilinear(&self, p: Point2) -> Point2 {
        let (col, row, fx, fy, inside) = self.quad(p);
        if !inside || !p.is_finite() {
            return Point2::ORIGIN;
        }
        let [v00, v10, v01, v11] = self.corners(col, row);
        let gx = (1.0 - fy) * (v10 - v00) + fy * (v11 - v01);
        let gy = (1.0 - fx) * (v01 - v00) + fx * (v11 - v10);
        Point2::new(gx, gy) * (1.0 / self.spec.cell_size)
    }
}

impl DistancePrior for DistanceField {
    fn distance(&self, p: Point2) -> f64 {
        self.sample_bilinear(p)
    }
    fn distance_gradient(&self, p: Point2) -> Point2 {
        self.gradient_bilinear(p)
    }
}

/// A distance prior placed in the world by a rigid transform, for rasters
/// that are not axis-aligned with the world frame.
#[derive(Debug, Clone)]
pub struct PosedPrior<F> {
    inner: F,
    world_from_field: Rigid2,
    field_from_world: Rigid2,
}

impl<F: DistancePrior> PosedPrior<F> {
    pub fn new(inner: F, world_from_field: Rigid2) -> Self {
        Self {
            inner,
            world_from_field,
            field_from_world: world_from_field.inverse(),
        }
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: DistancePrior> DistancePrior for PosedPrior<F> {
    fn distance(&self, p: Point2) -> f64 {
        self.inner.distance(self.field_from_world.apply(p))
    }
    fn distance_gradient(&self, p: Point2) -> Point2 {
        let g = self
            .inner
            .distance_gradient(self.field_from_world.apply(p));
        self.world_from_field.rotate(g)
    }
}
