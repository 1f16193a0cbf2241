//! Multilayer network model: one shared node roster, several undirected
//! edge relations ("layers"), and per-layer all-pairs shortest-path
//! distances in hop counts.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

/// External node label as it appears in input files.
///
/// Internally nodes are dense indices `0..n`; the label <-> index mapping is
/// owned by [`MultiLayerNetwork`] with labels sorted ascending.
pub type NodeLabel = u64;

/// Sentinel for "no path" inside the packed distance storage.
const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("manifest declares no layers")]
    EmptyManifest,
    #[error("manifest line {line}: {msg}")]
    ManifestSyntax { line: usize, msg: String },
    #[error("manifest line {line}: duplicate layer name `{name}`")]
    DuplicateLayer { line: usize, name: String },
    #[error("layer `{layer}` line {line}: expected `u v`, got `{text}`")]
    EdgeSyntax {
        layer: String,
        line: usize,
        text: String,
    },
    #[error("layer `{layer}` line {line}: self-loop on node {label}")]
    SelfLoop {
        layer: String,
        line: usize,
        label: NodeLabel,
    },
    #[error("layer `{layer}` line {line}: duplicate edge {{{a},{b}}}")]
    DuplicateEdge {
        layer: String,
        line: usize,
        a: NodeLabel,
        b: NodeLabel,
    },
    #[error("manifest lists {expected} layers but {got} edge texts were supplied")]
    LayerCountMismatch { expected: usize, got: usize },
}

/// One named entry of a layer manifest: a layer name plus the path of the
/// file holding its data (edge list or similarity CSV).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub path: String,
}

/// Parsed layer manifest: an optional explicit node roster plus an ordered
/// list of layer entries. Layer order is preserved everywhere downstream.
///
/// Syntax, one directive per line:
///
/// ```text
/// # full-line comment
/// nodes: 1 2 3 4            (optional, may repeat; declares roster labels)
/// layer <name> <path>       (one per layer, in order)
/// ```
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub roster: Vec<NodeLabel>,
    pub layers: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut roster = BTreeSet::new();
        let mut layers: Vec<ManifestEntry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("nodes:") {
                for tok in rest.split_whitespace() {
                    let label =
                        tok.parse::<NodeLabel>()
                            .map_err(|_| ParseError::ManifestSyntax {
                                line,
                                msg: format!("bad node label `{tok}`"),
                            })?;
                    roster.insert(label);
                }
            } else if let Some(rest) = trimmed.strip_prefix("layer ") {
                let rest = rest.trim();
                let (name, path) = rest.split_once(char::is_whitespace).ok_or_else(|| {
                    ParseError::ManifestSyntax {
                        line,
                        msg: "expected `layer <name> <path>`".into(),
                    }
                })?;
                let path = path.trim();
                if path.is_empty() {
                    return Err(ParseError::ManifestSyntax {
                        line,
                        msg: "layer path is empty".into(),
                    });
                }
                if layers.iter().any(|entry| entry.name == name) {
                    return Err(ParseError::DuplicateLayer {
                        line,
                        name: name.to_owned(),
                    });
                }
                layers.push(ManifestEntry {
                    name: name.to_owned(),
                    path: path.to_owned(),
                });
            } else {
                return Err(ParseError::ManifestSyntax {
                    line,
                    msg: format!("unrecognized directive `{trimmed}`"),
                });
            }
        }
        if layers.is_empty() {
            return Err(ParseError::EmptyManifest);
        }
        Ok(Manifest {
            roster: roster.into_iter().collect(),
            layers,
        })
    }
}

/// One undirected edge relation over the shared roster. Edges are stored as
/// normalized `(low, high)` internal index pairs, no self-loops, no
/// duplicates.
#[derive(Debug, Clone)]
pub struct Layer {
    name: String,
    edges: Vec<(u32, u32)>,
}

impl Layer {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    fn adjacency(&self, node_count: usize) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); node_count];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }
}

/// A network of networks in multiplex form: every layer shares the identical
/// node roster and contributes its own edge relation.
#[derive(Debug, Clone)]
pub struct MultiLayerNetwork {
    labels: Vec<NodeLabel>,
    layers: Vec<Layer>,
}

impl MultiLayerNetwork {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Node labels in ascending order; position is the internal index.
    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn index_of(&self, label: NodeLabel) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }
}

/// Build a [`MultiLayerNetwork`] from a parsed manifest and one edge-list
/// text per manifest layer, in manifest order.
///
/// Edge-list syntax: one edge per line as two whitespace-separated labels;
/// `#` starts a comment; blank lines are ignored. The roster is the union of
/// labels seen in any layer plus the labels declared in the manifest, so a
/// node may be isolated in some or all layers.
pub fn parse_multilayer(
    manifest: &Manifest,
    edge_texts: &[&str],
) -> Result<MultiLayerNetwork, ParseError> {
    if manifest.layers.is_empty() {
        return Err(ParseError::EmptyManifest);
    }
    if manifest.layers.len() != edge_texts.len() {
        return Err(ParseError::LayerCountMismatch {
            expected: manifest.layers.len(),
            got: edge_texts.len(),
        });
    }

    let mut raw_layers = Vec::with_capacity(edge_texts.len());
    let mut labels: BTreeSet<NodeLabel> = manifest.roster.iter().copied().collect();
    for (entry, text) in manifest.layers.iter().zip(edge_texts) {
        let edges = parse_edge_list(&entry.name, text)?;
        for &(a, b) in &edges {
            labels.insert(a);
            labels.insert(b);
        }
        raw_layers.push(edges);
    }

    let labels: Vec<NodeLabel> = labels.into_iter().collect();
    let index = |label: NodeLabel| labels.binary_search(&label).expect("label in roster") as u32;

    let layers = manifest
        .layers
        .iter()
        .zip(raw_layers)
        .map(|(entry, edges)| Layer {
            name: entry.name.clone(),
            edges: edges
                .into_iter()
                .map(|(a, b)| {
                    let (i, j) = (index(a), index(b));
                    (i.min(j), i.max(j))
                })
                .collect(),
        })
        .collect();

    Ok(MultiLayerNetwork { labels, layers })
}

/// Parse one edge-list text into label pairs, validating as we go.
fn parse_edge_list(layer: &str, text: &str) -> Result<Vec<(NodeLabel, NodeLabel)>, ParseError> {
    let mut edges = Vec::new();
    let mut seen: HashSet<(NodeLabel, NodeLabel)> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let (a, b) = match (toks.next(), toks.next(), toks.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(ParseError::EdgeSyntax {
                    layer: layer.to_owned(),
                    line,
                    text: content.to_owned(),
                })
            }
        };
        let parse = |tok: &str| {
            tok.parse::<NodeLabel>()
                .map_err(|_| ParseError::EdgeSyntax {
                    layer: layer.to_owned(),
                    line,
                    text: content.to_owned(),
                })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a == b {
            return Err(ParseError::SelfLoop {
                layer: layer.to_owned(),
                line,
                label: a,
            });
        }
        let key = (a.min(b), a.max(b));
        if !seen.insert(key) {
            return Err(ParseError::DuplicateEdge {
                layer: layer.to_owned(),
                line,
                a: key.0,
                b: key.1,
            });
        }
        edges.push((a, b));
    }
    Ok(edges)
}

/// Per-layer all-pairs shortest-path hop counts.
///
/// Symmetric with a zero diagonal. Pairs with no connecting path are carried
/// explicitly (`get` returns `None`); `diameter` is the maximum finite
/// off-diagonal entry and is `None` for a layer with no edges at all.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    layer: String,
    n: usize,
    hops: Vec<u32>,
    d_max: Option<u32>,
}

impl DistanceMatrix {
    pub fn layer_name(&self) -> &str {
        &self.layer
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Hop count between nodes `i` and `j`, or `None` if unreachable.
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        let d = self.hops[i * self.n + j];
        (d != UNREACHABLE).then_some(d)
    }

    /// Maximum finite off-diagonal distance; `None` when every pair is
    /// unreachable (layer without edges).
    pub fn diameter(&self) -> Option<u32> {
        self.d_max
    }
}

impl fmt::Display for DistanceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                match self.get(i, j) {
                    Some(d) => write!(f, "{d}")?,
                    None => write!(f, "inf")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Compute the all-pairs shortest-path matrix of one layer by breadth-first
/// search from every source. Edges are unweighted and undirected, so entries
/// are hop counts. Sources are searched in parallel; the result does not
/// depend on scheduling.
pub fn all_pairs_distances(layer: &Layer, node_count: usize) -> DistanceMatrix {
    let adj = layer.adjacency(node_count);
    let rows: Vec<Vec<u32>> = (0..node_count)
        .into_par_iter()
        .map(|source| bfs_row(&adj, source))
        .collect();

    let mut hops = Vec::with_capacity(node_count * node_count);
    for row in &rows {
        hops.extend_from_slice(row);
    }
    let d_max = hops
        .iter()
        .filter(|&&d| d != UNREACHABLE && d > 0)
        .max()
        .copied();

    DistanceMatrix {
        layer: layer.name.clone(),
        n: node_count,
        hops,
        d_max,
    }
}

fn bfs_row(adj: &[Vec<u32>], source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::with_capacity(adj.len());
    queue.push_back(source as u32);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in &adj[u as usize] {
            if dist[v as usize] == UNREACHABLE {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}
