use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Problem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingStrategy {
    Uniform,
    #[default]
    #[serde(rename = "lhs")]
    LatinHypercube,
    Grid,
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingStrategy::Uniform => "uniform",
            SamplingStrategy::LatinHypercube => "lhs",
            SamplingStrategy::Grid => "grid",
        })
    }
}

impl FromStr for SamplingStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(SamplingStrategy::Uniform),
            "lhs" | "latin-hypercube" => Ok(SamplingStrategy::LatinHypercube),
            "grid" => Ok(SamplingStrategy::Grid),
            other => Err(format!("unknown sampling strategy `{other}`")),
        }
    }
}

/// Sampled decision points together with every constraint's value at each.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<Vec<f64>>,
    /// `values[a][j]` is constraint `j` at `points[a]`.
    values: Vec<Vec<f64>>,
    seed: u64,
    strategy: SamplingStrategy,
}

impl SampleSet {
    pub(super) fn draw(
        problem: &Problem,
        count: usize,
        seed: u64,
        strategy: SamplingStrategy,
    ) -> Result<SampleSet> {
        if count == 0 {
            return Err(Error::Precondition("sample count must be positive".into()));
        }
        let unit = match strategy {
            SamplingStrategy::Uniform => uniform(problem.dimension(), count, seed),
            SamplingStrategy::LatinHypercube => latin_hypercube(problem.dimension(), count, seed),
            SamplingStrategy::Grid => grid(problem.dimension(), count)?,
        };
        let points = unit
            .into_iter()
            .map(|u| {
                u.iter()
                    .zip(problem.variables())
                    .map(|(t, var)| (var.lower + t * var.range()).clamp(var.lower, var.upper))
                    .collect()
            })
            .collect();
        SampleSet::from_points(problem, points, seed, strategy)
    }

    /// Evaluates a caller-supplied list of points.
    pub fn from_points(
        problem: &Problem,
        points: Vec<Vec<f64>>,
        seed: u64,
        strategy: SamplingStrategy,
    ) -> Result<SampleSet> {
        let values = points
            .iter()
            .map(|x| {
                (0..problem.constraint_count())
                    .map(|j| problem.constraint_value(j, x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleSet {
            points,
            values,
            seed,
            strategy,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn strategy(&self) -> SamplingStrategy {
        self.strategy
    }

    /// All sampled values of constraint `j`, in point order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }
}

fn uniform(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

/// One point per `1/count`-wide stratum along every coordinate.
fn latin_hypercube(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; dim]; count];
    let mut strata: Vec<usize> = (0..count).collect();
    for k in 0..dim {
        strata.shuffle(&mut rng);
        for (point, &stratum) in points.iter_mut().zip(&strata) {
            let t = (stratum as f64 + rng.gen::<f64>()) / count as f64;
            // stay inside the stratum after rounding
            point[k] = t.min((stratum as f64 + 1.0) / count as f64);
        }
    }
    points
}

/// Full lattice with `count^(1/dim)` levels per axis, endpoints included.
fn grid(dim: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    let levels = (count as f64).powf(1.0 / dim as f64).round() as usize;
    let exact = levels
        .checked_pow(dim as u32)
        .is_some_and(|total| total == count);
    if !exact {
        return Err(Error::Precondition(format!(
            "grid sampling needs a perfect {dim}-th power sample count, got {count}"
        )));
    }
    let coord = |i: usize| {
        if levels == 1 {
            0.5
        } else {
            i as f64 / (levels - 1) as f64
        }
    };
    Ok((0..count)
        .map(|mut idx| {
            let mut point = vec![0.0; dim];
            for slot in point.iter_mut().rev() {
                *slot = coord(idx % levels);
                idx /= levels;
            }
            point
        })
        .collect())
}
