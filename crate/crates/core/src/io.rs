//! Trajectory CSV (`t,x,y`) and the JSON run configuration.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corrector::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Trajectory};
use crate::priors::PriorParams;
use crate::worldmap::{DistanceField, PolylineMap, RasterSpec};

pub const CONFIG_VERSION: u32 = 1;

/// Parses a `t,x,y` CSV. Errors carry the 1-based line number.
pub fn trajectory_from_csv(text: &str, path: &Path) -> Result<Trajectory> {
    let parse_err = |line: u64, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["t", "x", "y"] {
        return Err(parse_err(1, format!("expected header t,x,y, found {}", cols.join(","))));
    }
    let mut stamps = Vec::new();
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, found {}", rec.len())));
        }
        let mut vals = [0.0; 3];
        for (i, field) in rec.iter().enumerate() {
            vals[i] = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("invalid number {field:?}")))?;
        }
        stamps.push(vals[0]);
        points.push(Point2::new(vals[1], vals[2]));
    }
    if points.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    Trajectory::with_timestamps(points, stamps).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Writes `t,x,y` rows; missing timestamps become epoch indices.
pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,x,y\n");
    for (i, p) in traj.points().iter().enumerate() {
        let t = traj.timestamps().map_or(i as f64, |ts| ts[i]);
        out.push_str(&format!("{t},{},{}\n", p.x, p.y));
    }
    out
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    trajectory_from_csv(&text, path)
}

pub fn write_trajectory(path: impl AsRef<Path>, traj: &Trajectory) -> Result<()> {
    write_text(path, &trajectory_to_csv(traj))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    write_text(path, &(text + "\n"))
}

/// Rasterization settings for building a distance field from a map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RasterOptions {
    pub cell_size: f64,
    pub d_max: f64,
    /// Extra border around the map bounds, meters.
    pub margin: f64,
}

impl Default for RasterOptions {
    fn default() -> Self {
        Self {
            cell_size: 1.0,
            d_max: 15.0,
            margin: 30.0,
        }
    }
}

impl RasterOptions {
    pub fn build_field(&self, map: &PolylineMap) -> Result<DistanceField> {
        let spec = RasterSpec::covering(map, self.cell_size, self.margin)?;
        DistanceField::from_map(map, spec, self.d_max)
    }
}

/// Experiment manifest: one JSON file with optional sections.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub priors: PriorParams,
    pub solver: SolverConfig,
    pub raster: RasterOptions,
}

impl RunConfig {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let cfg: RunConfig = read_json(path)?;
        if let Some(v) = cfg.version {
            if v != CONFIG_VERSION {
                return Err(Error::UnsupportedVersion {
                    path: path.to_path_buf(),
                    found: v,
                    expected: CONFIG_VERSION,
                });
            }
        }
        cfg.priors.validate().and_then(|_| cfg.solver.validate()).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_csv() {
        let t = trajectory_from_csv("t,x,y\n0,0,0\n1,1.5,-2\n2, 3 ,4e-1\n", Path::new("a.csv")).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.points()[2], Point2::new(3.0, 0.4));
        assert_eq!(t.timestamps().unwrap(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn malformed_row_names_line() {
        let err = trajectory_from_csv("t,x,y\n0,0,0\n1,abc,2\n", Path::new("s.csv")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("s.csv:3"), "{msg}");
        let err = trajectory_from_csv("t,x,y\n0,0,0\n1,2\n", Path::new("s.csv")).unwrap_err();
        assert!(err.to_string().contains("s.csv:3"), "{err}");
        assert!(trajectory_from_csv("a,b,c\n0,0,0\n", Path::new("s.csv")).is_err());
        assert!(trajectory_from_csv("t,x,y\n", Path::new("s.csv")).is_err());
    }

    #[test]
    fn config_sections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"priors":{"sigma":[0.1,0.02,2,0.2],"weight":[1,1,1,0.1]},"solver":{"lr":0.005}}"#).unwrap();
        let cfg = RunConfig::read(&path).unwrap();
        assert_eq!(cfg.priors.sigma[2], 2.0);
        assert_eq!(cfg.solver.learning_rate, 0.005);
        assert_eq!(cfg.raster, RasterOptions::default());
        fs::write(&path, r#"{"version":2}"#).unwrap();
        assert!(matches!(RunConfig::read(&path), Err(Error::UnsupportedVersion { .. })));
        fs::write(&path, r#"{"priors":{"weight":[2,1,1,1]}}"#).unwrap();
        assert!(RunConfig::read(&path).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(pts in prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 1..50)) {
            let points: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
            let stamps: Vec<f64> = (0..points.len()).map(|i| i as f64 * 0.1).collect();
            let t = Trajectory::with_timestamps(points, stamps).unwrap();
            let back = trajectory_from_csv(&trajectory_to_csv(&t), Path::new("m")).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
