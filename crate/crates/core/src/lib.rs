//! Influential-node ranking for multilayer networks.
//!
//! A multilayer network here is one node roster observed under several
//! relations: each layer is an unweighted, undirected edge list over the same
//! nodes. The pipeline turns every layer into a similarity matrix (one minus
//! normalized shortest-path length), reads each similarity as a basic
//! probability assignment over a binary "similar / dissimilar" frame, folds
//! the per-layer assignments element-wise with Dempster's rule of
//! combination, and ranks nodes by their total fused similarity to the rest
//! of the network.
//!
//! The stages are usable on their own:
//!
//! - [`graph`]: manifest and edge-list parsing, breadth-first all-pairs
//!   shortest paths.
//! - [`similarity`]: distance-to-similarity conversion, the CSV matrix
//!   format, per-layer extrema.
//! - [`evidence`]: basic probability assignments and the orthogonal sum.
//! - [`fusion`]: element-wise fusion across layers and influence ranking.
//!
//! ```
//! use nonrank::{fuse_layers, layer_similarities, parse_multilayer, Manifest, Scoring};
//!
//! let manifest = Manifest::parse("layer a a.edges\nlayer b b.edges\n")?;
//! let network = parse_multilayer(&manifest, &["1 2\n2 3\n", "1 3\n2 3\n"])?;
//! let layers = layer_similarities(&network)?;
//! let ranking = fuse_layers(&layers)?.rank(Scoring::SimilarMass);
//! assert_eq!(ranking.len(), 3);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod evidence;
pub mod fusion;
pub mod graph;
pub mod similarity;

pub use evidence::{
    bpa_from_similarity, combine_all, Bpa, CombineError, InvalidBpa, TotalConflict,
};
pub use fusion::{
    fuse_layers, fuse_layers_traced, ElementTrace, FusedNetwork, FusionError, InfluenceRanking,
    RankEntry, Scoring, TraceStep,
};
pub use graph::{
    all_pairs_distances, parse_multilayer, DistanceMatrix, Layer, Manifest, ManifestEntry,
    MultiLayerNetwork, NodeLabel, ParseError,
};
pub use similarity::{layer_similarities, SimilarityError, SimilarityMatrix, SimilarityStats};
