//! Independence of constraints through their variable supports.
//!
//! The syntactic support of a constraint is the set of variables its
//! expression mentions. The effective support keeps only variables whose
//! perturbation actually moves the constraint value at some sample point.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Problem, SampleSet};

/// Default probe size as a fraction of each variable's range.
pub const DEFAULT_PROBE_FRACTION: f64 = 0.01;
pub const DEFAULT_EPS_VALUE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub i: usize,
    pub j: usize,
    pub syntactic_independent: bool,
    pub effective_independent: bool,
    /// Effective supports of `i` and `j` as variable indices.
    pub effective_supports: (BTreeSet<usize>, BTreeSet<usize>),
}

/// Variable indices mentioned by constraint `j`.
pub fn syntactic_support(problem: &Problem, j: usize) -> Result<BTreeSet<usize>> {
    let con = problem.constraint(j)?;
    Ok(con
        .expr
        .syntactic_support()
        .iter()
        .filter_map(|name| problem.variable_index(name))
        .collect())
}

/// Variables whose `±probe_fraction · range` perturbation (clamped to the
/// bounds) changes constraint `j` by more than `eps_value` at some sample.
pub fn effective_support(
    problem: &Problem,
    j: usize,
    samples: &SampleSet,
    probe_fraction: f64,
    eps_value: f64,
) -> Result<BTreeSet<usize>> {
    if !(probe_fraction > 0.0 && probe_fraction.is_finite()) {
        return Err(Error::Precondition(format!(
            "probe size must be positive, got {probe_fraction}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::Precondition("sample set is empty".into()));
    }
    problem.constraint(j)?;
    let mut support = BTreeSet::new();
    for (k, var) in problem.variables().iter().enumerate() {
        let delta = probe_fraction * var.range();
        'points: for (x, row) in samples.points().iter().zip(samples.values()) {
            let base = row[j];
            let mut probe = x.clone();
            for shifted in [x[k] + delta, x[k] - delta] {
                probe[k] = shifted.clamp(var.lower, var.upper);
                if (problem.constraint_value(j, &probe)? - base).abs() > eps_value {
                    support.insert(k);
                    break 'points;
                }
            }
        }
    }
    Ok(support)
}

/// Effective supports of every constraint, in constraint order.
pub fn effective_supports(
    problem: &Problem,
    samples: &SampleSet,
    probe_fraction: f64,
    eps_value: f64,
) -> Result<Vec<BTreeSet<usize>>> {
    (0..problem.constraint_count())
        .map(|j| effective_support(problem, j, samples, probe_fraction, eps_value))
        .collect()
}

/// Verdict from precomputed effective supports.
pub fn verdict_from_supports(
    problem: &Problem,
    i: usize,
    j: usize,
    supports: &[BTreeSet<usize>],
) -> Result<IndependenceVerdict> {
    if i == j {
        return Err(Error::Precondition(format!(
            "cannot test constraint {i} against itself"
        )));
    }
    let syn_i = syntactic_support(problem, i)?;
    let syn_j = syntactic_support(problem, j)?;
    let (eff_i, eff_j) = (supports[i].clone(), supports[j].clone());
    Ok(IndependenceVerdict {
        i,
        j,
        syntactic_independent: syn_i.is_disjoint(&syn_j),
        effective_independent: eff_i.is_disjoint(&eff_j),
        effective_supports: (eff_i, eff_j),
    })
}

pub fn independence_verdict(
    problem: &Problem,
    i: usize,
    j: usize,
    samples: &SampleSet,
    probe_fraction: f64,
    eps_value: f64,
) -> Result<IndependenceVerdict> {
    if i == j {
        return Err(Error::Precondition(format!(
            "cannot test constraint {i} against itself"
        )));
    }
    let mut supports = vec![BTreeSet::new(); problem.constraint_count()];
    supports[i] = effective_support(problem, i, samples, probe_fraction, eps_value)?;
    supports[j] = effective_support(problem, j, samples, probe_fraction, eps_value)?;
    verdict_from_supports(problem, i, j, &supports)
}
