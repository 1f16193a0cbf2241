//! Similarity matrices: the linear transform of hop distances
//! (`S = 1 - d/d_max`) and ingestion of precomputed similarity data, plus
//! the off-diagonal extrema that drive evidence construction.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{DistanceMatrix, MultiLayerNetwork, NodeLabel};

/// Tolerance for accepting a noisy diagonal or slightly asymmetric input.
const INPUT_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("degenerate layer `{layer}`: no finite off-diagonal distance")]
    DegenerateLayer { layer: String },
    #[error("matrix needs at least 2 nodes, got {nodes}")]
    TooSmall { nodes: usize },
    #[error("matrix is not square: {rows} rows of {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix row {row}: expected {expected} columns, got {got}")]
    RowLength {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix row {row}, column {col}: `{text}` is not a number")]
    Number {
        row: usize,
        col: usize,
        text: String,
    },
    #[error("matrix row {row}, column {col}: {value} outside [0,1]")]
    OutOfRange { row: usize, col: usize, value: f64 },
    #[error("matrix row {row}, column {col}: {value} != mirror entry {mirror} (asymmetric)")]
    Asymmetric {
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },
    #[error("matrix diagonal entry {index} is {value}, expected 1")]
    Diagonal { index: usize, value: f64 },
    #[error("matrix header: {msg}")]
    Header { msg: String },
    #[error("labels: {msg}")]
    Labels { msg: String },
    #[error("expected {expected} values for the matrix, got {got}")]
    ValueCount { expected: usize, got: usize },
}

/// Extrema of the off-diagonal similarity entries. Both bounds exclude the
/// constant-1 diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityStats {
    pub max: f64,
    pub min: f64,
}

/// A validated per-layer similarity matrix: symmetric, unit diagonal, all
/// entries in `[0,1]`, with cached off-diagonal extrema.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    name: String,
    labels: Vec<NodeLabel>,
    n: usize,
    values: Vec<f64>,
    stats: SimilarityStats,
}

impl SimilarityMatrix {
    /// Validating constructor over row-major `values` (`labels.len()^2` of
    /// them). The diagonal is forced to exactly 1 when within `1e-9` of 1.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<NodeLabel>,
        mut values: Vec<f64>,
    ) -> Result<Self, SimilarityError> {
        let n = labels.len();
        if n < 2 {
            return Err(SimilarityError::TooSmall { nodes: n });
        }
        if values.len() != n * n {
            return Err(SimilarityError::ValueCount {
                expected: n * n,
                got: values.len(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(**l)) {
            return Err(SimilarityError::Labels {
                msg: format!("duplicate node label {dup}"),
            });
        }

        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(SimilarityError::OutOfRange {
                        row: i + 1,
                        col: j + 1,
                        value: v,
                    });
                }
            }
        }
        for i in 0..n {
            let v = values[i * n + i];
            if (v - 1.0).abs() > INPUT_EPSILON {
                return Err(SimilarityError::Diagonal {
                    index: i + 1,
                    value: v,
                });
            }
            values[i * n + i] = 1.0;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = values[i * n + j];
                let b = values[j * n + i];
                if (a - b).abs() > INPUT_EPSILON {
                    return Err(SimilarityError::Asymmetric {
                        row: i + 1,
                        col: j + 1,
                        value: a,
                        mirror: b,
                    });
                }
            }
        }

        let stats = off_diagonal_stats(&values, n);
        Ok(SimilarityMatrix {
            name: name.into(),
            labels,
            n,
            values,
            stats,
        })
    }

    /// Convert a distance matrix via `S = 1 - d/d_max`; unreachable pairs get
    /// similarity 0 and the diagonal is exactly 1. Node labels default to
    /// `1..=n`; reattach network labels with [`SimilarityMatrix::with_labels`].
    pub fn from_distances(dist: &DistanceMatrix) -> Result<Self, SimilarityError> {
        let n = dist.node_count();
        let d_max = dist
            .diameter()
            .ok_or_else(|| SimilarityError::DegenerateLayer {
                layer: dist.layer_name().to_owned(),
            })? as f64;

        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
            for j in (i + 1)..n {
                let s = match dist.get(i, j) {
                    Some(d) => 1.0 - d as f64 / d_max,
                    None => 0.0,
                };
                values[i * n + j] = s;
                values[j * n + i] = s;
            }
        }
        let labels = (1..=n as NodeLabel).collect();
        Self::new(dist.layer_name(), labels, values)
    }

    /// Replace the default labels (e.g. with the network's roster).
    pub fn with_labels(mut self, labels: Vec<NodeLabel>) -> Result<Self, SimilarityError> {
        if labels.len() != self.n {
            return Err(SimilarityError::Labels {
                msg: format!("expected {} labels, got {}", self.n, labels.len()),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(**l)) {
            return Err(SimilarityError::Labels {
                msg: format!("duplicate node label {dup}"),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Parse a similarity matrix from CSV text: `n` rows by `n` columns of
    /// decimals, optionally preceded by a header row of node labels (detected
    /// when the file has one more row than it has columns).
    pub fn parse_csv(name: impl Into<String>, text: &str) -> Result<Self, SimilarityError> {
        let rows: Vec<Vec<&str>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.split(',').map(str::trim).collect())
            .collect();
        if rows.is_empty() {
            return Err(SimilarityError::TooSmall { nodes: 0 });
        }
        let cols = rows[0].len();

        let (header, data) = if rows.len() == cols + 1 {
            (Some(&rows[0]), &rows[1..])
        } else if rows.len() == cols {
            (None, &rows[..])
        } else {
            return Err(SimilarityError::NotSquare {
                rows: rows.len(),
                cols,
            });
        };

        let labels: Vec<NodeLabel> = match header {
            Some(cells) => cells
                .iter()
                .map(|c| {
                    c.parse::<NodeLabel>().map_err(|_| SimilarityError::Header {
                        msg: format!("bad node label `{c}`"),
                    })
                })
                .collect::<Result<_, _>>()?,
            None => (1..=cols as NodeLabel).collect(),
        };

        let mut values = Vec::with_capacity(cols * cols);
        for (r, row) in data.iter().enumerate() {
            if row.len() != cols {
                return Err(SimilarityError::RowLength {
                    row: r + 1,
                    expected: cols,
                    got: row.len(),
                });
            }
            for (c, cell) in row.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| SimilarityError::Number {
                    row: r + 1,
                    col: c + 1,
                    text: (*cell).to_owned(),
                })?;
                values.push(v);
            }
        }
        Self::new(name, labels, values)
    }

    /// Canonical full-precision CSV: a header row of labels followed by the
    /// matrix rows, each value printed with the shortest representation that
    /// parses back to the identical `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, label) in self.labels.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{label}");
        }
        out.push('\n');
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", self.values[i * self.n + j]);
            }
            out.push('\n');
        }
        out
    }

    /// Copy with every entry rounded to two decimals (half away from zero)
    /// and the extrema recomputed. Reproduces arithmetic done on 2-decimal
    /// tabulated matrices.
    pub fn rounded_two_dp(&self) -> Self {
        let values: Vec<f64> = self
            .values
            .iter()
            .map(|v| (v * 100.0).round() / 100.0)
            .collect();
        let stats = off_diagonal_stats(&values, self.n);
        SimilarityMatrix {
            name: self.name.clone(),
            labels: self.labels.clone(),
            n: self.n,
            values,
            stats,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn stats(&self) -> SimilarityStats {
        self.stats
    }
}

fn off_diagonal_stats(values: &[f64], n: usize) -> SimilarityStats {
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = values[i * n + j];
            max = max.max(v);
            min = min.min(v);
        }
    }
    SimilarityStats { max, min }
}

/// Distance-then-similarity for every layer of a network, in layer order,
/// with the network's labels attached.
pub fn layer_similarities(
    net: &MultiLayerNetwork,
) -> Result<Vec<SimilarityMatrix>, SimilarityError> {
    net.layers()
        .iter()
        .map(|layer| {
            let dist = crate::graph::all_pairs_distances(layer, net.node_count());
            SimilarityMatrix::from_distances(&dist)?.with_labels(net.labels().to_vec())
        })
        .collect()
}
