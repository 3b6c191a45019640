//! Map JSON and the binary `DFLD` field format.
//!
//! `DFLD` layout, all little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4     | magic `DFLD` |
//! | 4     | u32 version (1) |
//! | 8 x 4 | f64 origin_x, origin_y, cell_size, d_max |
//! | 4 x 2 | u32 width, height |
//! | 8 x n | f64 values, row-major, row 0 at the origin |

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DistanceField, PolylineMap, RasterSpec};
use crate::error::{Error, Result};
use crate::geometry::Point2;

pub const FIELD_MAGIC: &[u8; 4] = b"DFLD";
pub const FIELD_VERSION: u32 = 1;
pub const MAP_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 * 4 + 4 * 2;

#[derive(Serialize, Deserialize)]
struct MapFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    version: Option<u32>,
    polylines: Vec<Vec<[f64; 2]>>,
}

pub fn map_from_json(text: &str, path: &Path) -> Result<PolylineMap> {
    let file: MapFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(v) = file.version {
        if v != MAP_VERSION {
            return Err(Error::UnsupportedVersion {
                path: path.to_path_buf(),
                found: v,
                expected: MAP_VERSION,
            });
        }
    }
    PolylineMap::new(
        file.polylines
            .into_iter()
            .map(|l| l.into_iter().map(|[x, y]| Point2::new(x, y)).collect())
            .collect(),
    )
    .map_err(|e| Error::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

pub fn map_to_json(map: &PolylineMap) -> String {
    let file = MapFile {
        version: Some(MAP_VERSION),
        polylines: map
            .polylines
            .iter()
            .map(|l| l.iter().map(|p| [p.x, p.y]).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("map serializes")
}

pub fn read_map(path: impl AsRef<Path>) -> Result<PolylineMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    map_from_json(&text, path)
}

pub fn write_map(path: impl AsRef<Path>, map: &PolylineMap) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, map_to_json(map) + "\n").map_err(|e| Error::io(path, e))
}

pub fn encode_field(field: &DistanceField) -> Vec<u8> {
    let spec = field.spec();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * field.values().len());
    buf.extend_from_slice(FIELD_MAGIC);
    buf.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    for v in [spec.origin.x, spec.origin.y, spec.cell_size, field.d_max()] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(spec.width as u32).to_le_bytes());
    buf.extend_from_slice(&(spec.height as u32).to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

pub fn decode_field(bytes: &[u8], path: &Path) -> Result<DistanceField> {
    let bad = |msg: String| Error::Format {
        path: path.to_path_buf(),
        msg,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != FIELD_MAGIC {
        return Err(bad("bad magic, not a DFLD file".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != FIELD_VERSION {
        return Err(Error::UnsupportedVersion {
            path: path.to_path_buf(),
            found: version,
            expected: FIELD_VERSION,
        });
    }
    let (ox, oy, cell, d_max) = (f64_at(8), f64_at(16), f64_at(24), f64_at(32));
    let (width, height) = (u32_at(40) as usize, u32_at(44) as usize);
    let expected = HEADER_LEN + 8 * width * height;
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for a {width}x{height} grid, found {}",
            bytes.len()
        )));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let spec = RasterSpec::new(Point2::new(ox, oy), cell, width, height)
        .map_err(|e| bad(e.to_string()))?;
    DistanceField::from_values(spec, values, d_max).map_err(|e| bad(e.to_string()))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<DistanceField> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_field(&bytes, path)
}

pub fn write_field(path: impl AsRef<Path>, field: &DistanceField) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_field(field)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_field() -> DistanceField {
        let map = PolylineMap::new(vec![vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(10.0, 8.0)]]).unwrap();
        let spec = RasterSpec::covering(&map, 0.5, 3.0).unwrap();
        DistanceField::from_map(&map, spec, 2.5).unwrap()
    }

    #[test]
    fn field_bytes_round_trip() {
        let f = sample_field();
        let bytes = encode_field(&f);
        assert_eq!(&bytes[..4], b"DFLD");
        let back = decode_field(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back, f);
        assert_eq!(encode_field(&back), bytes);
    }

    #[test]
    fn rejects_unknown_version_and_truncation() {
        let mut bytes = encode_field(&sample_field());
        bytes[4] = 9;
        let err = decode_field(&bytes, Path::new("x.dfld")).unwrap_err();
        assert!(matches!(err, Error::UnsupportedVersion { found: 9, .. }));
        let bytes = encode_field(&sample_field());
        assert!(decode_field(&bytes[..bytes.len() - 1], Path::new("x")).is_err());
        assert!(decode_field(b"NOPE", Path::new("x")).is_err());
    }

    #[test]
    fn map_json_parses() {
        let m = map_from_json(r#"{"polylines": [[[0,0],[5,0]], [[5,0],[5,5],[0,5]]]}"#, Path::new("m")).unwrap();
        assert_eq!(m.polylines.len(), 2);
        assert_eq!(m.polylines[1][2], Point2::new(0.0, 5.0));
        let again = map_from_json(&map_to_json(&m), Path::new("m")).unwrap();
        assert_eq!(again, m);
        assert!(map_from_json(r#"{"polylines": [[[0,0]]]}"#, Path::new("m")).is_err());
        assert!(map_from_json(r#"{"version": 2, "polylines": []}"#, Path::new("m")).is_err());
    }
}
