//! Element-wise fusion of per-layer similarity matrices into one
//! comprehensive network, and node ranking by fused similarity mass.

use rayon::prelude::*;
use thiserror::Error;

use crate::evidence::{bpa_from_similarity, combine_all, Bpa, CombineError};
use crate::graph::NodeLabel;
use crate::similarity::{SimilarityMatrix, SimilarityStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("no similarity layers to fuse")]
    NoLayers,
    #[error("layer {layer} (`{name}`) covers {got} nodes, expected {expected}")]
    SizeMismatch {
        layer: usize,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("layer {layer} (`{name}`) has a different node roster")]
    LabelMismatch { layer: usize, name: String },
    #[error(
        "total conflict at element ({row_label},{col_label}) while folding in layer {layer} (K = {conflict})"
    )]
    TotalConflict {
        row_label: NodeLabel,
        col_label: NodeLabel,
        layer: usize,
        conflict: f64,
    },
}

/// How a fused BPA is collapsed to one similarity scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scoring {
    /// Mass on the similar singleton (the default reading).
    #[default]
    SimilarMass,
    /// Pignistic probability: frame mass split between the singletons.
    Pignistic,
}

/// The comprehensive similarity network: one fused BPA per node pair.
/// Symmetric by construction; the diagonal holds categorical similarity and
/// never enters a fold or a score.
#[derive(Debug, Clone)]
pub struct FusedNetwork {
    labels: Vec<NodeLabel>,
    n: usize,
    bpas: Vec<Bpa>,
}

/// One fold step of one element's fusion, for transcripts.
#[derive(Debug, Clone, Copy)]
pub struct TraceStep {
    /// 1-based layer position in input order.
    pub layer: usize,
    pub input: Bpa,
    /// The input came from a degenerate matrix (all off-diagonal entries
    /// equal), so it is the vacuous fallback.
    pub degenerate: bool,
    /// Conflict constant of this fold step; 0 for the first layer.
    pub conflict: f64,
    pub running: Bpa,
}

/// Full fold history of one off-diagonal element.
#[derive(Debug, Clone)]
pub struct ElementTrace {
    pub row_label: NodeLabel,
    pub col_label: NodeLabel,
    pub steps: Vec<TraceStep>,
}

impl FusedNetwork {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn bpa(&self, i: usize, j: usize) -> Bpa {
        self.bpas[i * self.n + j]
    }

    /// Scalar similarity view of one element under the chosen scoring.
    pub fn scalar(&self, i: usize, j: usize, scoring: Scoring) -> f64 {
        let bpa = self.bpa(i, j);
        let value = match scoring {
            Scoring::SimilarMass => bpa.similar(),
            Scoring::Pignistic => bpa.pignistic_similar(),
        };
        value.clamp(0.0, 1.0)
    }

    /// The scalar view as a matrix, exportable in the similarity CSV format.
    pub fn scalar_matrix(&self, scoring: Scoring) -> SimilarityMatrix {
        let mut values = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                values[i * self.n + j] = self.scalar(i, j, scoring);
            }
        }
        SimilarityMatrix::new("fused", self.labels.clone(), values)
            .expect("fused scalars form a valid similarity matrix")
    }

    /// Rank nodes by the sum of their off-diagonal fused similarity to all
    /// other nodes, descending, ties broken by ascending node label.
    pub fn rank(&self, scoring: Scoring) -> InfluenceRanking {
        let scores: Vec<f64> = (0..self.n)
            .map(|i| {
                let mut row: Vec<f64> = (0..self.n)
                    .filter(|&j| j != i)
                    .map(|j| self.scalar(i, j, scoring))
                    .collect();
                // Addends summed in value order so the score is invariant
                // under node relabeling.
                row.sort_by(f64::total_cmp);
                row.iter().sum()
            })
            .collect();

        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .total_cmp(&scores[a])
                .then_with(|| self.labels[a].cmp(&self.labels[b]))
        });

        InfluenceRanking {
            labels: self.labels.clone(),
            scores,
            order,
        }
    }
}

/// Per-node fused-similarity scores and the descending influence order.
#[derive(Debug, Clone)]
pub struct InfluenceRanking {
    labels: Vec<NodeLabel>,
    scores: Vec<f64>,
    order: Vec<usize>,
}

/// One row of a ranking document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankEntry {
    /// 1-based rank.
    pub rank: usize,
    pub label: NodeLabel,
    pub score: f64,
}

impl InfluenceRanking {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Entries in rank order.
    pub fn entries(&self) -> impl Iterator<Item = RankEntry> + '_ {
        self.order.iter().enumerate().map(|(pos, &idx)| RankEntry {
            rank: pos + 1,
            label: self.labels[idx],
            score: self.scores[idx],
        })
    }

    /// Node labels from most to least influential.
    pub fn ordered_labels(&self) -> Vec<NodeLabel> {
        self.order.iter().map(|&idx| self.labels[idx]).collect()
    }

    /// Score of one node, by label.
    pub fn score(&self, label: NodeLabel) -> Option<f64> {
        let idx = self.labels.iter().position(|&l| l == label)?;
        Some(self.scores[idx])
    }
}

fn validate_layers(mats: &[SimilarityMatrix]) -> Result<(usize, &[NodeLabel]), FusionError> {
    let first = mats.first().ok_or(FusionError::NoLayers)?;
    let n = first.node_count();
    let labels = first.labels();
    for (idx, mat) in mats.iter().enumerate().skip(1) {
        if mat.node_count() != n {
            return Err(FusionError::SizeMismatch {
                layer: idx + 1,
                name: mat.name().to_owned(),
                expected: n,
                got: mat.node_count(),
            });
        }
        if mat.labels() != labels {
            return Err(FusionError::LabelMismatch {
                layer: idx + 1,
                name: mat.name().to_owned(),
            });
        }
    }
    Ok((n, labels))
}

/// Per-layer BPAs of one element, in layer order.
fn element_evidence(
    mats: &[SimilarityMatrix],
    stats: &[SimilarityStats],
    i: usize,
    j: usize,
) -> Vec<Bpa> {
    mats.iter()
        .zip(stats)
        .map(|(mat, &st)| bpa_from_similarity(mat.get(i, j), st))
        .collect()
}

fn conflict_error(labels: &[NodeLabel], i: usize, j: usize, err: CombineError) -> FusionError {
    match err {
        CombineError::Empty => FusionError::NoLayers,
        CombineError::TotalConflict {
            layer_index,
            conflict,
        } => FusionError::TotalConflict {
            row_label: labels[i],
            col_label: labels[j],
            layer: layer_index + 1,
            conflict,
        },
    }
}

/// Fuse the layers' similarity matrices element-wise: per off-diagonal pair,
/// one BPA per layer (built against that layer's own extrema) folded with the
/// orthogonal sum. Elements are independent and processed in parallel; the
/// fold order within an element is fixed, so results are schedule-invariant.
pub fn fuse_layers(mats: &[SimilarityMatrix]) -> Result<FusedNetwork, FusionError> {
    let (n, labels) = validate_layers(mats)?;
    let stats: Vec<SimilarityStats> = mats.iter().map(|m| m.stats()).collect();

    let upper: Vec<Result<Vec<Bpa>, FusionError>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| {
                    combine_all(&element_evidence(mats, &stats, i, j))
                        .map_err(|e| conflict_error(labels, i, j, e))
                })
                .collect()
        })
        .collect();

    let mut bpas = vec![Bpa::certain_similar(); n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (offset, bpa) in row?.into_iter().enumerate() {
            let j = i + 1 + offset;
            bpas[i * n + j] = bpa;
            bpas[j * n + i] = bpa;
        }
    }

    Ok(FusedNetwork {
        labels: labels.to_vec(),
        n,
        bpas,
    })
}

/// Sequential variant of [`fuse_layers`] that also records the fold history
/// of every off-diagonal element, row-major over the upper triangle.
pub fn fuse_layers_traced(
    mats: &[SimilarityMatrix],
) -> Result<(FusedNetwork, Vec<ElementTrace>), FusionError> {
    let (n, labels) = validate_layers(mats)?;
    let stats: Vec<SimilarityStats> = mats.iter().map(|m| m.stats()).collect();

    let mut bpas = vec![Bpa::certain_similar(); n * n];
    let mut traces = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let evidence = element_evidence(mats, &stats, i, j);
            let mut steps = Vec::with_capacity(evidence.len());
            let mut running = evidence[0];
            for (idx, (bpa, st)) in evidence.iter().zip(&stats).enumerate() {
                let degenerate = st.max == st.min && mats[idx].get(i, j) == st.max;
                let conflict = if idx == 0 { 0.0 } else { running.conflict(bpa) };
                if idx > 0 {
                    running = running.combine(bpa).map_err(|_| {
                        conflict_error(
                            labels,
                            i,
                            j,
                            CombineError::TotalConflict {
                                layer_index: idx,
                                conflict,
                            },
                        )
                    })?;
                }
                steps.push(TraceStep {
                    layer: idx + 1,
                    input: *bpa,
                    degenerate,
                    conflict,
                    running,
                });
            }
            bpas[i * n + j] = running;
            bpas[j * n + i] = running;
            traces.push(ElementTrace {
                row_label: labels[i],
                col_label: labels[j],
                steps,
            });
        }
    }

    Ok((
        FusedNetwork {
            labels: labels.to_vec(),
            n,
            bpas,
        },
        traces,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_multilayer, Manifest};
    use crate::similarity::layer_similarities;
    use approx::assert_abs_diff_eq;

    fn network_from(edge_texts: &[&str]) -> Vec<SimilarityMatrix> {
        let listing: String = (0..edge_texts.len())
            .map(|i| format!("layer l{i} p{i}\n"))
            .collect();
        let manifest = Manifest::parse(&listing).unwrap();
        let net = parse_multilayer(&manifest, edge_texts).unwrap();
        layer_similarities(&net).unwrap()
    }

    const LAYER_B: &str = "1 2\n1 3\n3 6\n4 5\n5 8\n6 7\n7 8\n7 9\n8 10\n";

    #[test]
    fn single_layer_scalar_equals_elementwise_similar_mass() {
        let mats = network_from(&[LAYER_B]);
        let fused = fuse_layers(&mats).unwrap();
        let st = mats[0].stats();
        for i in 0..10 {
            for j in 0..10 {
                if i == j {
                    assert_eq!(fused.scalar(i, j, Scoring::SimilarMass), 1.0);
                } else {
                    let expected = bpa_from_similarity(mats[0].get(i, j), st).similar();
                    assert_eq!(fused.scalar(i, j, Scoring::SimilarMass), expected);
                }
            }
        }
    }

    #[test]
    fn scalar_view_is_exactly_symmetric() {
        let mats = network_from(&[LAYER_B, "1 4\n2 4\n3 4\n4 6\n4 7\n5 7\n7 8\n7 10\n9 10\n"]);
        let fused = fuse_layers(&mats).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(
                    fused.scalar(i, j, Scoring::SimilarMass).to_bits(),
                    fused.scalar(j, i, Scoring::SimilarMass).to_bits()
                );
            }
        }
    }

    #[test]
    fn triple_copy_ranking_matches_single_layer_ranking() {
        let single = network_from(&[LAYER_B]);
        let triple = network_from(&[LAYER_B, LAYER_B, LAYER_B]);
        let one = fuse_layers(&single).unwrap().rank(Scoring::SimilarMass);
        let three = fuse_layers(&triple).unwrap().rank(Scoring::SimilarMass);
        assert_eq!(one.ordered_labels(), three.ordered_labels());
    }

    #[test]
    fn two_node_single_layer_ties_break_by_label() {
        let mats = network_from(&["1 2\n"]);
        let ranking = fuse_layers(&mats).unwrap().rank(Scoring::SimilarMass);
        assert_eq!(ranking.ordered_labels(), vec![1, 2]);
        assert_eq!(ranking.score(1), ranking.score(2));
    }

    #[test]
    fn star_center_ranks_first() {
        let mats = network_from(&["1 2\n1 3\n1 4\n1 5\n"]);
        let ranking = fuse_layers(&mats).unwrap().rank(Scoring::SimilarMass);
        assert_eq!(ranking.ordered_labels()[0], 1);
    }

    #[test]
    fn ranking_scores_match_independent_recomputation() {
        let mats = network_from(&[LAYER_B, "1 3\n2 4\n3 6\n4 6\n5 7\n6 9\n7 8\n7 10\n9 10\n"]);
        let fused = fuse_layers(&mats).unwrap();
        let ranking = fused.rank(Scoring::SimilarMass);
        for (idx, &label) in fused.labels().iter().enumerate() {
            let mut expected = 0.0;
            for j in 0..fused.node_count() {
                if j != idx {
                    expected += fused.bpa(idx, j).similar();
                }
            }
            assert_abs_diff_eq!(ranking.score(label).unwrap(), expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_size_mismatch() {
        let big = network_from(&[LAYER_B]).remove(0);
        let small = network_from(&["1 2\n2 3\n"]).remove(0);
        let err = fuse_layers(&[big, small]).unwrap_err();
        assert!(matches!(
            err,
            FusionError::SizeMismatch {
                layer: 2,
                expected: 10,
                got: 3,
                ..
            }
        ));
    }

    #[test]
    fn rejects_roster_mismatch() {
        let a = network_from(&["1 2\n2 3\n"]).remove(0);
        let b = network_from(&["1 2\n2 3\n"])
            .remove(0)
            .with_labels(vec![4, 5, 6])
            .unwrap();
        let err = fuse_layers(&[a, b]).unwrap_err();
        assert!(matches!(err, FusionError::LabelMismatch { layer: 2, .. }));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(fuse_layers(&[]).unwrap_err(), FusionError::NoLayers);
    }

    #[test]
    fn traced_fusion_agrees_with_parallel_fusion() {
        let mats = network_from(&[LAYER_B, "1 4\n2 4\n3 4\n4 6\n4 7\n5 7\n7 8\n7 10\n9 10\n"]);
        let fast = fuse_layers(&mats).unwrap();
        let (slow, traces) = fuse_layers_traced(&mats).unwrap();
        assert_eq!(traces.len(), 45);
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(
                    fast.scalar(i, j, Scoring::SimilarMass).to_bits(),
                    slow.scalar(i, j, Scoring::SimilarMass).to_bits()
                );
            }
        }
        let first = &traces[0];
        assert_eq!((first.row_label, first.col_label), (1, 2));
        assert_eq!(first.steps.len(), 2);
        assert_eq!(first.steps[0].conflict, 0.0);
        let last = first.steps.last().unwrap();
        assert_eq!(last.running, slow.bpa(0, 1));
    }

    #[test]
    fn degenerate_layer_is_flagged_in_trace() {
        // Two nodes, one edge: the lone off-diagonal similarity equals both
        // extrema, so every element BPA degenerates to vacuous.
        let mats = network_from(&["1 2\n"]);
        let (fused, traces) = fuse_layers_traced(&mats).unwrap();
        assert!(traces[0].steps[0].degenerate);
        assert_eq!(fused.bpa(0, 1), Bpa::vacuous());
    }

    #[test]
    fn pignistic_scoring_uses_frame_mass() {
        let mats = network_from(&["1 2\n1 3\n"]);
        let fused = fuse_layers(&mats).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let bpa = fused.bpa(i, j);
                    assert_abs_diff_eq!(
                        fused.scalar(i, j, Scoring::Pignistic),
                        bpa.similar() + bpa.uncertain() / 2.0,
                        epsilon = 1e-15
                    );
                }
            }
        }
    }
}
