//! Standalone SVG overlay of trajectories, optionally over the distance field.
//!
//! Colors follow the usual convention for these comparisons: reference in
//! blue, corrected in red, SLAM in green, start markers orange and end
//! markers black.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{Point2, Trajectory};
use crate::worldmap::DistanceField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Reference,
    Corrected,
    Slam,
    Other,
}

impl Role {
    pub fn color(&self) -> &'static str {
        match self {
            Role::Reference => "blue",
            Role::Corrected => "red",
            Role::Slam => "green",
            Role::Other => "purple",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Layer<'a> {
    pub label: String,
    pub role: Role,
    pub trajectory: &'a Trajectory,
}

impl<'a> Layer<'a> {
    pub fn new(label: impl Into<String>, role: Role, trajectory: &'a Trajectory) -> Self {
        Self {
            label: label.into(),
            role,
            trajectory,
        }
    }
}

const WIDTH: f64 = 800.0;
const PAD: f64 = 20.0;
/// Cap on shaded cells per axis; larger fields are subsampled.
const MAX_SHADE_CELLS: usize = 160;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the layers (and field shading, if given) as an SVG document.
pub fn render_svg(layers: &[Layer<'_>], field: Option<&DistanceField>) -> Result<String> {
    if layers.is_empty() {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in layers.iter().flat_map(|l| l.trajectory.points()) {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-6);
    let scale = (WIDTH - 2.0 * PAD) / span;
    let height = ((hi.y - lo.y) * scale + 2.0 * PAD).ceil().max(2.0 * PAD);
    let to_px = |p: Point2| ((p.x - lo.x) * scale + PAD, height - ((p.y - lo.y) * scale + PAD));

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    if let Some(f) = field {
        let spec = f.spec();
        let stride = spec.width.max(spec.height).div_ceil(MAX_SHADE_CELLS).max(1);
        let cell_px = spec.cell_size * stride as f64 * scale;
        svg.push_str("<g id=\"field\" stroke=\"none\">\n");
        for row in (0..spec.height).step_by(stride) {
            for col in (0..spec.width).step_by(stride) {
                // closeness to a path, 1 on the centerline
                let closeness = 1.0 - f.value(col, row) / f.d_max();
                if closeness <= 0.0 {
                    continue;
                }
                let (x, y) = to_px(spec.cell_center(col, row));
                writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="orange" fill-opacity="{:.3}"/>"#,
                    x - cell_px / 2.0,
                    y - cell_px / 2.0,
                    cell_px,
                    cell_px,
                    0.35 * closeness
                )
                .unwrap();
            }
        }
        svg.push_str("</g>\n");
    }

    for layer in layers {
        let pts: Vec<String> = layer
            .trajectory
            .points()
            .iter()
            .map(|&p| {
                let (x, y) = to_px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            layer.role.color(),
            pts.join(" "),
            escape(&layer.label)
        )
        .unwrap();
    }
    for layer in layers {
        let (sx, sy) = to_px(layer.trajectory.first());
        let (ex, ey) = to_px(layer.trajectory.last());
        writeln!(svg, r#"<circle cx="{sx:.2}" cy="{sy:.2}" r="4" fill="orange"/>"#).unwrap();
        writeln!(svg, r#"<circle cx="{ex:.2}" cy="{ey:.2}" r="4" fill="black"/>"#).unwrap();
    }

    for (i, layer) in layers.iter().enumerate() {
        let y = PAD + 14.0 * i as f64;
        writeln!(
            svg,
            r#"<text x="{:.0}" y="{y:.0}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
            PAD,
            layer.role.color(),
            escape(&layer.label)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
