//! Real-data ingestion.
//!
//! A dataset directory holds
//!
//! * `features.csv`: a header row, then one row per node with its id in the
//!   first column and numeric features after it;
//! * `topology.json`: `{"edges": [[i, j], ...], "triangles": [[i, j, k], ...]}`
//!   with 0-based node positions in `features.csv` order;
//! * optionally `edge_signals.csv`: headerless, one row per candidate edge in
//!   lexicographic order. When absent, edge signals are derived from the
//!   node features with [`edge_signals_from_nodes`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{CandidateComplex, Selection};
use crate::error::{check_len, Error, Result};
use crate::matrix::DenseMatrix;

pub const FEATURES_FILE: &str = "features.csv";
pub const TOPOLOGY_FILE: &str = "topology.json";
pub const EDGE_SIGNALS_FILE: &str = "edge_signals.csv";

/// Row `(i, j)` is the componentwise minimum of node rows `i` and `j`.
pub fn edge_signals_from_nodes(x0: &DenseMatrix) -> DenseMatrix {
    let n0 = x0.rows();
    let f = x0.cols();
    let mut out = Vec::with_capacity(n0 * n0.saturating_sub(1) / 2 * f);
    for i in 0..n0 {
        for j in i + 1..n0 {
            out.extend(x0.row(i).iter().zip(x0.row(j)).map(|(a, b)| a.min(*b)));
        }
    }
    DenseMatrix::from_row_major(n0 * n0.saturating_sub(1) / 2, f, out).expect("minimum of finite entries")
}

/// Column-wise preprocessing applied to signals before costs are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    #[default]
    None,
    /// Subtract each column mean.
    Center,
    /// Subtract each column mean and divide by its population standard
    /// deviation (constant columns are only centered).
    Standardize,
}

impl Normalize {
    pub fn apply(self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = m.clone();
        if self == Normalize::None || m.rows() == 0 {
            return out;
        }
        let n = m.rows() as f64;
        for c in 0..m.cols() {
            let mean = (0..m.rows()).map(|r| m[(r, c)]).sum::<f64>() / n;
            let var = (0..m.rows()).map(|r| (m[(r, c)] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            let div = if self == Normalize::Standardize && sd > 0.0 { sd } else { 1.0 };
            for r in 0..m.rows() {
                out[(r, c)] = (m[(r, c)] - mean) / div;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Topology {
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealDataset {
    pub node_ids: Vec<String>,
    pub node_features: DenseMatrix,
    pub truth: Selection,
    pub edge_signals: Option<DenseMatrix>,
}

impl RealDataset {
    pub fn n0(&self) -> usize {
        self.node_ids.len()
    }

    /// Ground-truth edge count, used as the edge cardinality bound.
    pub fn c1(&self) -> usize {
        self.truth.n_edges()
    }

    /// Ground-truth triangle count, used as the triangle cardinality bound.
    pub fn c2(&self) -> usize {
        self.truth.n_triangles()
    }

    /// Stored edge signals, or the node-derived ones.
    pub fn edge_signals(&self) -> DenseMatrix {
        self.edge_signals
            .clone()
            .unwrap_or_else(|| edge_signals_from_nodes(&self.node_features))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_writer(File::create(dir.join(FEATURES_FILE))?);
        let mut header = vec!["id".to_string()];
        header.extend((0..self.node_features.cols()).map(|c| format!("f{c}")));
        w.write_record(&header)?;
        for (i, id) in self.node_ids.iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend(self.node_features.row(i).iter().map(|v| format!("{v:?}")));
            w.write_record(&row)?;
        }
        w.flush()?;

        let cx = CandidateComplex::new(self.n0())?;
        let topo = Topology {
            edges: self.truth.edge_indices().iter().map(|&e| cx.edges()[e]).collect(),
            triangles: self.truth.triangle_indices().iter().map(|&t| cx.triangles()[t]).collect(),
        };
        let mut out = BufWriter::new(File::create(dir.join(TOPOLOGY_FILE))?);
        serde_json::to_writer_pretty(&mut out, &topo)?;
        writeln!(out)?;

        let signals_path = dir.join(EDGE_SIGNALS_FILE);
        match &self.edge_signals {
            Some(x1) => x1.write_csv(File::create(signals_path)?)?,
            None if signals_path.exists() => std::fs::remove_file(signals_path)?,
            None => {}
        }
        Ok(())
    }
}

fn read_features(path: &Path) -> Result<(Vec<String>, DenseMatrix)> {
    let mut r = csv::Reader::from_reader(File::open(path)?);
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let mut fields = record.iter();
        let id = fields
            .next()
            .ok_or_else(|| Error::Malformed(format!("{}: row {} is empty", path.display(), i + 1)))?;
        ids.push(id.to_string());
        let row = fields
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Malformed(format!("{}: row {}: `{s}`: {e}", path.display(), i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((ids, DenseMatrix::from_rows(&rows)?))
}

fn check_vertices(vertices: &[usize], n0: usize) -> Result<()> {
    for &v in vertices {
        if v >= n0 {
            return Err(Error::IndexOutOfRange {
                what: "node",
                index: v,
                limit: n0,
            });
        }
    }
    for (a, &v) in vertices.iter().enumerate() {
        if vertices[..a].contains(&v) {
            return Err(Error::Malformed(format!("simplex {vertices:?} repeats node {v}")));
        }
    }
    Ok(())
}

pub fn load_real_dataset(dir: &Path) -> Result<RealDataset> {
    let (node_ids, node_features) = read_features(&dir.join(FEATURES_FILE))?;
    let n0 = node_ids.len();
    let cx = CandidateComplex::new(n0)?;
    let topo: Topology = serde_json::from_reader(BufReader::new(File::open(dir.join(TOPOLOGY_FILE))?))?;

    let mut truth = Selection::empty(&cx);
    for e in &topo.edges {
        check_vertices(e, n0)?;
        let idx = cx.edge_index(e[0], e[1]).expect("distinct in-range vertices");
        if std::mem::replace(&mut truth.s1[idx], true) {
            return Err(Error::Malformed(format!("edge {e:?} listed twice")));
        }
    }
    for t in &topo.triangles {
        check_vertices(t, n0)?;
        let idx = cx.triangle_index(*t).expect("distinct in-range vertices");
        if std::mem::replace(&mut truth.s2[idx], true) {
            return Err(Error::Malformed(format!("triangle {t:?} listed twice")));
        }
    }
    if let Some(v) = cx.validate_inclusion(&truth)?.first() {
        return Err(Error::InclusionViolation {
            triangle: v.triangle,
            edge: v.edge,
        });
    }

    let signals_path = dir.join(EDGE_SIGNALS_FILE);
    let edge_signals = if signals_path.exists() {
        let x1 = DenseMatrix::read_csv(File::open(signals_path)?)?;
        check_len("edge signal rows", cx.n_edges(), x1.rows())?;
        Some(x1)
    } else {
        None
    };
    Ok(RealDataset {
        node_ids,
        node_features,
        truth,
        edge_signals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn componentwise_minimum() {
        let x0 = DenseMatrix::from_rows(&[vec![1.0, 5.0, 0.0], vec![3.0, 2.0, 4.0]]).unwrap();
        let x1 = edge_signals_from_nodes(&x0);
        assert_eq!(x1.rows(), 1);
        assert_eq!(x1.row(0), &[1.0, 2.0, 0.0]);
    }

    #[test]
    fn standardize_columns() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 2.0]]).unwrap();
        let s = Normalize::Standardize.apply(&m);
        assert_eq!(s.values(), &[-1.0, 0.0, 1.0, 0.0]);
        let c = Normalize::Center.apply(&m);
        assert_eq!(c.values(), &[-1.0, 0.0, 1.0, 0.0]);
        assert_eq!(Normalize::None.apply(&m), m);
    }
}
