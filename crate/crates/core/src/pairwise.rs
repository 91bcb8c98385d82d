//! Sample-based classification of a constraint pair.
//!
//! Every unordered pair of sampled points is compared on both constraints.
//! If one point is better on both, the pair is evidence of harmony; if it
//! is better on one and worse on the other, evidence of conflict. Pairs with
//! a (near-)equal value on either constraint are ties and are excluded from
//! the magnitude denominators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Problem, SampleSet};

pub const DEFAULT_EPS_TIE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Harmony,
    Conflict,
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PairLabel {
    TotalHarmony,
    TotalConflict,
    Mixed,
    Degenerate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairEvidence {
    pub harmony_pairs: u64,
    pub conflict_pairs: u64,
    pub tie_pairs: u64,
    pub total_pairs: u64,
}

impl PairEvidence {
    pub fn label(&self) -> PairLabel {
        match (self.harmony_pairs > 0, self.conflict_pairs > 0) {
            (true, false) => PairLabel::TotalHarmony,
            (false, true) => PairLabel::TotalConflict,
            (true, true) => PairLabel::Mixed,
            (false, false) => PairLabel::Degenerate,
        }
    }

    /// `(harmony, conflict)` fractions of the non-tied pairs.
    pub fn magnitudes(&self) -> Option<(f64, f64)> {
        let decided = self.harmony_pairs + self.conflict_pairs;
        if decided == 0 {
            return None;
        }
        let decided = decided as f64;
        Some((
            self.harmony_pairs as f64 / decided,
            self.conflict_pairs as f64 / decided,
        ))
    }

    fn record(&mut self, relation: Relation) {
        match relation {
            Relation::Harmony => self.harmony_pairs += 1,
            Relation::Conflict => self.conflict_pairs += 1,
            Relation::Tie => self.tie_pairs += 1,
        }
        self.total_pairs += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub evidence: PairEvidence,
    pub label: PairLabel,
    pub harmony_magnitude: Option<f64>,
    pub conflict_magnitude: Option<f64>,
}

impl PairVerdict {
    pub fn from_evidence(i: usize, j: usize, evidence: PairEvidence) -> PairVerdict {
        let magnitudes = evidence.magnitudes();
        PairVerdict {
            i,
            j,
            evidence,
            label: evidence.label(),
            harmony_magnitude: magnitudes.map(|m| m.0),
            conflict_magnitude: magnitudes.map(|m| m.1),
        }
    }
}

/// Compares two points `a`, `b` on constraints `i` and `j`.
pub fn compare_pair(fi_a: f64, fi_b: f64, fj_a: f64, fj_b: f64, eps_tie: f64) -> Relation {
    let di = fi_a - fi_b;
    let dj = fj_a - fj_b;
    if di.abs() <= eps_tie || dj.abs() <= eps_tie {
        Relation::Tie
    } else if (di < 0.0) == (dj < 0.0) {
        Relation::Harmony
    } else {
        Relation::Conflict
    }
}

fn check_columns(values_i: &[f64], values_j: &[f64]) -> Result<()> {
    if values_i.len() != values_j.len() {
        return Err(Error::Precondition(format!(
            "value lists differ in length ({} vs {})",
            values_i.len(),
            values_j.len()
        )));
    }
    if values_i.len() < 2 {
        return Err(Error::Precondition(
            "pairwise analysis needs >= 2 samples".into(),
        ));
    }
    Ok(())
}

/// Counts harmony, conflict and tie pairs over all `N(N-1)/2` point pairs.
pub fn pair_evidence(values_i: &[f64], values_j: &[f64], eps_tie: f64) -> Result<PairEvidence> {
    check_columns(values_i, values_j)?;
    let mut evidence = PairEvidence::default();
    for a in 0..values_i.len() {
        for b in a + 1..values_i.len() {
            evidence.record(compare_pair(
                values_i[a],
                values_i[b],
                values_j[a],
                values_j[b],
                eps_tie,
            ));
        }
    }
    Ok(evidence)
}

/// Classifies constraints `i` and `j` from the sampled values.
pub fn analyze_pair(
    problem: &Problem,
    i: usize,
    j: usize,
    samples: &SampleSet,
    eps_tie: f64,
) -> Result<PairVerdict> {
    if i == j {
        return Err(Error::Precondition(format!(
            "cannot analyze constraint {i} against itself"
        )));
    }
    problem.constraint(i)?;
    problem.constraint(j)?;
    if samples.is_empty() {
        return Err(Error::Precondition("sample set is empty".into()));
    }
    let evidence = pair_evidence(&samples.column(i), &samples.column(j), eps_tie)?;
    Ok(PairVerdict::from_evidence(i, j, evidence))
}

/// Number of crossing segment pairs in a two-axis parallel-coordinates plot.
///
/// Sample `a` is drawn as the segment from `(0, values_i[a])` to
/// `(1, values_j[a])`. Two segments cross when they intersect strictly
/// between the axes; segments meeting on an axis (within `eps_tie`) do not
/// count.
pub fn crossing_count(values_i: &[f64], values_j: &[f64], eps_tie: f64) -> Result<u64> {
    check_columns(values_i, values_j)?;
    let mut crossings = 0;
    for a in 0..values_i.len() {
        for b in a + 1..values_i.len() {
            if segments_cross(
                (values_i[a], values_j[a]),
                (values_i[b], values_j[b]),
                eps_tie,
            ) {
                crossings += 1;
            }
        }
    }
    Ok(crossings)
}

/// Interior intersection test for the segments `(0,p.0)-(1,p.1)` and
/// `(0,q.0)-(1,q.1)` via the orientation of `q`'s endpoints against `p`.
fn segments_cross(p: (f64, f64), q: (f64, f64), eps: f64) -> bool {
    // signed offsets of q's endpoints from p's line, measured on each axis
    let left = q.0 - p.0;
    let right = q.1 - p.1;
    if left.abs() <= eps || right.abs() <= eps {
        return false;
    }
    left.signum() != right.signum()
}
