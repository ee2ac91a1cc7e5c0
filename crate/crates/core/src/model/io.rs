//! Serialization: points as CSV (`x0,x1,...` header) or JSON
//! (`{"dim": d, "points": [[...], ...]}`), graphs as JSON
//! (`{"n": N, "edges": [[u, v, w], ...]}`), matrices as decimal CSV.
//!
//! Floats are printed in shortest round-trip form, so a save/load cycle is
//! bit-preserving.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DistanceMatrix, PointSet, WeightedGraph};
use crate::{Error, Result};

/// On-disk point formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Json,
}

impl FromStr for PointFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(PointFormat::Csv),
            "json" => Ok(PointFormat::Json),
            other => Err(Error::param("format", format!("unknown point format {other:?}"))),
        }
    }
}

impl PointFormat {
    /// Infers the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(PointFormat::Csv),
            Some("json") => Ok(PointFormat::Json),
            _ => Err(Error::param(
                "path",
                format!("cannot infer point format from {}", path.display()),
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PointsJson {
    dim: usize,
    points: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

/// Loads points from a reader. CSV errors carry 1-based data row numbers.
pub fn load_points<R: Read>(reader: R, format: PointFormat) -> Result<PointSet> {
    match format {
        PointFormat::Csv => load_points_csv(reader),
        PointFormat::Json => {
            let parsed: PointsJson = serde_json::from_reader(reader)?;
            let ps = PointSet::from_rows(&parsed.points)?;
            if ps.dim() != parsed.dim {
                return Err(Error::DimensionMismatch { expected: parsed.dim, got: ps.dim() });
            }
            Ok(ps)
        }
    }
}

fn load_points_csv<R: Read>(reader: R) -> Result<PointSet> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let dim = headers.len();
    for (i, h) in headers.iter().enumerate() {
        let expected = format!("x{i}");
        if h != expected {
            return Err(Error::row(0, format!("header column {i} is {h:?}, expected {expected:?}")));
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record?;
        if record.len() != dim {
            return Err(Error::row(row, format!("expected {dim} fields, got {}", record.len())));
        }
        let mut point = Vec::with_capacity(dim);
        for field in record.iter() {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::row(row, format!("cannot parse {field:?} as a number")))?;
            if !value.is_finite() {
                return Err(Error::row(row, format!("non-finite value {field:?}")));
            }
            point.push(value);
        }
        rows.push(point);
    }
    if rows.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let ps = PointSet::from_rows(&rows)?;
    if ps.has_duplicate_points() {
        log::warn!("point set contains duplicate coordinates");
    }
    Ok(ps)
}

/// Writes points in the requested format.
pub fn save_points<W: Write>(writer: W, ps: &PointSet, format: PointFormat) -> Result<()> {
    match format {
        PointFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(writer);
            let header: Vec<String> = (0..ps.dim()).map(|i| format!("x{i}")).collect();
            wtr.write_record(&header)?;
            for p in ps.iter() {
                let row: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
                wtr.write_record(&row)?;
            }
            wtr.flush()?;
            Ok(())
        }
        PointFormat::Json => {
            let repr =
                PointsJson { dim: ps.dim(), points: ps.iter().map(<[f64]>::to_vec).collect() };
            let mut writer = writer;
            serde_json::to_writer(&mut writer, &repr)?;
            writer.write_all(b"\n")?;
            Ok(())
        }
    }
}

/// Loads points from a path, inferring the format from the extension.
pub fn load_points_path(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let format = PointFormat::from_path(path)?;
    load_points(BufReader::new(File::open(path)?), format)
}

/// Saves points to a path, inferring the format from the extension.
pub fn save_points_path(path: impl AsRef<Path>, ps: &PointSet) -> Result<()> {
    let path = path.as_ref();
    let format = PointFormat::from_path(path)?;
    save_points(BufWriter::new(File::create(path)?), ps, format)
}

/// Loads a graph from JSON, re-validating all invariants.
pub fn load_graph<R: Read>(reader: R) -> Result<WeightedGraph> {
    let parsed: GraphJson = serde_json::from_reader(reader)?;
    let g = WeightedGraph::new(parsed.n, parsed.edges.iter().copied())?;
    if g.edges().iter().map(|e| (e.u, e.v)).ne(parsed.edges.iter().map(|&(u, v, _)| (u, v))) {
        return Err(Error::InvalidGraph("edges are not in canonical sorted order".to_string()));
    }
    Ok(g)
}

/// Writes a graph as canonical JSON.
pub fn save_graph<W: Write>(mut writer: W, g: &WeightedGraph) -> Result<()> {
    let repr = GraphJson {
        n: g.n(),
        edges: g.edges().iter().map(|e| (e.u, e.v, e.w)).collect(),
    };
    serde_json::to_writer(&mut writer, &repr)?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn load_graph_path(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    load_graph(BufReader::new(File::open(path.as_ref())?))
}

pub fn save_graph_path(path: impl AsRef<Path>, g: &WeightedGraph) -> Result<()> {
    save_graph(BufWriter::new(File::create(path.as_ref())?), g)
}

/// Writes a distance matrix as `n` rows of `n` decimals.
pub fn save_matrix_csv<W: Write>(mut writer: W, m: &DistanceMatrix) -> Result<()> {
    for i in 0..m.n() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        writeln!(writer, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let ps = PointSet::from_rows(&[vec![0.0, 0.25], vec![1.5, -2.0]]).unwrap();
        let mut buf = Vec::new();
        save_points(&mut buf, &ps, PointFormat::Csv).unwrap();
        assert!(buf.starts_with(b"x0,x1\n"));
        let back = load_points(&buf[..], PointFormat::Csv).unwrap();
        assert_eq!(back, ps);
    }

    #[test]
    fn csv_nan_names_row() {
        let data = "x0,x1\n0,0\n1,NaN\n";
        let err = load_points(data.as_bytes(), PointFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn csv_ragged_row_rejected() {
        let data = "x0,x1\n0,0\n1\n";
        let err = load_points(data.as_bytes(), PointFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn csv_bad_header_rejected() {
        let data = "a,b\n0,0\n";
        assert!(load_points(data.as_bytes(), PointFormat::Csv).is_err());
    }

    #[test]
    fn json_round_trip_preserves_bits() {
        let ps = PointSet::from_rows(&[
            vec![0.1 + 0.2, 1.0 / 3.0],
            vec![f64::MIN_POSITIVE, 1e300],
        ])
        .unwrap();
        let mut buf = Vec::new();
        save_points(&mut buf, &ps, PointFormat::Json).unwrap();
        let back = load_points(&buf[..], PointFormat::Json).unwrap();
        assert_eq!(back.coords(), ps.coords());
    }

    #[test]
    fn json_dim_mismatch_rejected() {
        let data = r#"{"dim": 3, "points": [[0.0, 1.0]]}"#;
        assert!(load_points(data.as_bytes(), PointFormat::Json).is_err());
    }

    #[test]
    fn graph_json_shape_and_round_trip() {
        let g = WeightedGraph::new(3, vec![(0, 1, 0.5), (1, 2, 0.1 + 0.2)]).unwrap();
        let mut buf = Vec::new();
        save_graph(&mut buf, &g).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(r#"{"n":3,"edges":[[0,1,0.5],"#), "{text}");
        let back = load_graph(&buf[..]).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn graph_json_rejects_unsorted() {
        let data = r#"{"n": 3, "edges": [[1, 2, 1.0], [0, 1, 1.0]]}"#;
        assert!(load_graph(data.as_bytes()).is_err());
    }

    #[test]
    fn matrix_csv_shape() {
        let mut m = DistanceMatrix::zeros(2);
        m.set(0, 1, 2.5);
        let mut buf = Vec::new();
        save_matrix_csv(&mut buf, &m).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0,2.5\n2.5,0\n");
    }
}
