//! Dempster-Shafer calculus on the binary frame {similar, dissimilar}.
//!
//! Mass is only ever assigned to the three focal elements {similar},
//! {dissimilar} and the whole frame, so a [`Bpa`] is a triple and the
//! orthogonal sum is branch-free. The generic power-set combiner exists
//! only in the test suite as an oracle.

use thiserror::Error;

use crate::similarity::SimilarityStats;

/// Masses must sum to 1 within this tolerance.
const MASS_SUM_EPSILON: f64 = 1e-9;

/// Two sources are in total conflict when `K >= 1 - CONFLICT_EPSILON`; the
/// orthogonal sum is undefined there. Similarity-derived evidence never gets
/// close, so this guards hand-fed categorical inputs only.
const CONFLICT_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("invalid mass assignment ({similar}, {dissimilar}, {uncertain}): must be non-negative and sum to 1")]
pub struct InvalidBpa {
    pub similar: f64,
    pub dissimilar: f64,
    pub uncertain: f64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("total conflict between sources (K = {conflict})")]
pub struct TotalConflict {
    pub conflict: f64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum CombineError {
    #[error("no evidence to combine")]
    Empty,
    #[error("total conflict (K = {conflict}) while folding in source {layer_index}")]
    TotalConflict { layer_index: usize, conflict: f64 },
}

/// Basic probability assignment over the binary frame: mass on {similar},
/// on {dissimilar}, and on the whole frame (uncertainty). The empty set
/// implicitly carries zero mass and the three components sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bpa {
    similar: f64,
    dissimilar: f64,
    uncertain: f64,
}

impl Bpa {
    pub fn try_new(similar: f64, dissimilar: f64, uncertain: f64) -> Result<Self, InvalidBpa> {
        let sum = similar + dissimilar + uncertain;
        let valid = similar >= 0.0
            && dissimilar >= 0.0
            && uncertain >= 0.0
            && (sum - 1.0).abs() <= MASS_SUM_EPSILON;
        if valid {
            Ok(Bpa {
                similar,
                dissimilar,
                uncertain,
            })
        } else {
            Err(InvalidBpa {
                similar,
                dissimilar,
                uncertain,
            })
        }
    }

    /// Total ignorance: all mass on the whole frame.
    pub fn vacuous() -> Self {
        Bpa {
            similar: 0.0,
            dissimilar: 0.0,
            uncertain: 1.0,
        }
    }

    /// Categorical similarity; used for matrix diagonals, never fused.
    pub fn certain_similar() -> Self {
        Bpa {
            similar: 1.0,
            dissimilar: 0.0,
            uncertain: 0.0,
        }
    }

    pub fn similar(&self) -> f64 {
        self.similar
    }

    pub fn dissimilar(&self) -> f64 {
        self.dissimilar
    }

    pub fn uncertain(&self) -> f64 {
        self.uncertain
    }

    /// Pignistic probability of the similar hypothesis: frame mass split
    /// evenly between the two singletons.
    pub fn pignistic_similar(&self) -> f64 {
        self.similar + self.uncertain / 2.0
    }

    /// Conflict constant K of the orthogonal sum: mass product landing on
    /// contradictory singletons.
    pub fn conflict(&self, other: &Bpa) -> f64 {
        self.similar * other.dissimilar + self.dissimilar * other.similar
    }

    /// Dempster's orthogonal sum. Fails when the two sources are in total
    /// conflict. The products are summed in an argument-symmetric grouping,
    /// so `a.combine(b)` and `b.combine(a)` are bit-identical.
    pub fn combine(&self, other: &Bpa) -> Result<Bpa, TotalConflict> {
        let conflict = self.conflict(other);
        if conflict >= 1.0 - CONFLICT_EPSILON {
            return Err(TotalConflict { conflict });
        }
        let norm = 1.0 - conflict;
        let similar = (self.similar * other.similar
            + (self.similar * other.uncertain + self.uncertain * other.similar))
            / norm;
        let dissimilar = (self.dissimilar * other.dissimilar
            + (self.dissimilar * other.uncertain + self.uncertain * other.dissimilar))
            / norm;
        let uncertain = (self.uncertain * other.uncertain) / norm;
        Ok(Bpa {
            similar,
            dissimilar,
            uncertain,
        })
    }
}

/// Construct the BPA of one similarity entry from the entry's value and the
/// off-diagonal extrema of its matrix:
///
/// ```text
/// m(similar)    = |s - min| / SUMM
/// m(dissimilar) = |s - max| / SUMM
/// m(frame)      = |s - (max + min)/2| / SUMM
/// ```
///
/// with SUMM the sum of the three numerators. A degenerate matrix (all
/// off-diagonal entries equal to `s`, SUMM = 0) yields the vacuous BPA.
pub fn bpa_from_similarity(value: f64, stats: SimilarityStats) -> Bpa {
    let toward_similar = (value - stats.min).abs();
    let toward_dissimilar = (value - stats.max).abs();
    let toward_frame = (value - (stats.max + stats.min) / 2.0).abs();
    let summ = toward_similar + toward_dissimilar + toward_frame;
    if summ == 0.0 {
        return Bpa::vacuous();
    }
    Bpa {
        similar: toward_similar / summ,
        dissimilar: toward_dissimilar / summ,
        uncertain: toward_frame / summ,
    }
}

/// Left fold of the orthogonal sum in slice order. Associativity and
/// commutativity of the rule make the result order-insensitive up to
/// floating-point rounding; the fixed order keeps transcripts reproducible.
pub fn combine_all(bpas: &[Bpa]) -> Result<Bpa, CombineError> {
    let (first, rest) = bpas.split_first().ok_or(CombineError::Empty)?;
    let mut acc = *first;
    for (offset, bpa) in rest.iter().enumerate() {
        acc = acc.combine(bpa).map_err(|e| CombineError::TotalConflict {
            layer_index: offset + 1,
            conflict: e.conflict,
        })?;
    }
    Ok(acc)
}
