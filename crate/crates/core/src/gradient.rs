//! Gradient-direction relationship between constraints.
//!
//! Two unit gradients `u`, `v` are split along their bisector
//! `c = (u + v) / |u + v|`. The component of `u` along `c` has length
//! `cos(θ/2)` (harmony) and the perpendicular component `sin(θ/2)`
//! (conflict), where `θ` is the angle between the gradients. Parallel
//! gradients are pure harmony, antiparallel ones pure conflict.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::problem::{Problem, SampleSet};

pub const DEFAULT_STEP: f64 = 1e-5;
const NORM_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientMode {
    #[default]
    Symbolic,
    #[serde(rename = "fd")]
    CentralDifference,
}

impl fmt::Display for GradientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientMode::Symbolic => "symbolic",
            GradientMode::CentralDifference => "fd",
        })
    }
}

impl FromStr for GradientMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbolic" => Ok(GradientMode::Symbolic),
            "fd" | "central-difference" => Ok(GradientMode::CentralDifference),
            other => Err(format!("unknown gradient mode `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientDecomposition {
    /// Angle between the gradients in `[0, π]`; `None` if either is zero.
    pub angle: Option<f64>,
    pub harmony_magnitude: Option<f64>,
    pub conflict_magnitude: Option<f64>,
    /// Zero gradient or antiparallel pair (bisector undefined).
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientAggregate {
    pub i: usize,
    pub j: usize,
    /// `None` when no sample point had a usable decomposition.
    pub mean_harmony: Option<f64>,
    pub mean_conflict: Option<f64>,
    /// Points that contributed to the means.
    pub defined_points: usize,
    /// Points where either gradient vanished.
    pub degenerate_points: usize,
    /// Antiparallel points; included in the means with conflict 1.
    pub antiparallel_points: usize,
    /// Points too close to the bounds for the finite-difference stencil.
    pub skipped_points: usize,
}

/// Symbolic partial derivatives of constraint `j`, one per variable.
pub fn gradient_exprs(problem: &Problem, j: usize) -> Result<Vec<Expr>> {
    let con = problem.constraint(j)?;
    Ok(problem
        .variables()
        .iter()
        .map(|v| con.expr.differentiate(&v.name))
        .collect())
}

fn eval_gradient(
    problem: &Problem,
    owner: &str,
    partials: &[Expr],
    point: &[f64],
) -> Result<Vec<f64>> {
    partials
        .iter()
        .map(|d| problem.eval_expr(owner, d, point))
        .collect()
}

fn central_difference(problem: &Problem, j: usize, point: &[f64], step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Precondition(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    for (x, var) in point.iter().zip(problem.variables()) {
        if x - step < var.lower || x + step > var.upper {
            return Err(Error::Precondition(format!(
                "point {point:?} is within {step} of the bounds of `{}`",
                var.name
            )));
        }
    }
    let mut probe = point.to_vec();
    (0..point.len())
        .map(|k| {
            probe[k] = point[k] + step;
            let hi = problem.constraint_value(j, &probe)?;
            probe[k] = point[k] - step;
            let lo = problem.constraint_value(j, &probe)?;
            probe[k] = point[k];
            Ok((hi - lo) / (2.0 * step))
        })
        .collect()
}

/// Gradient of constraint `j` at `point`.
pub fn gradient(
    problem: &Problem,
    j: usize,
    point: &[f64],
    mode: GradientMode,
    step: f64,
) -> Result<Vec<f64>> {
    problem.check_point(point)?;
    match mode {
        GradientMode::Symbolic => {
            let partials = gradient_exprs(problem, j)?;
            eval_gradient(problem, &problem.constraints()[j].name, &partials, point)
        }
        GradientMode::CentralDifference => central_difference(problem, j, point, step),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Splits two gradients into harmony and conflict components about their
/// bisector.
pub fn angle_decomposition(gi: &[f64], gj: &[f64]) -> GradientDecomposition {
    let (ni, nj) = (norm(gi), norm(gj));
    if ni < NORM_FLOOR || nj < NORM_FLOOR || gi.len() != gj.len() {
        return GradientDecomposition {
            angle: None,
            harmony_magnitude: None,
            conflict_magnitude: None,
            degenerate: true,
        };
    }
    let u: Vec<f64> = gi.iter().map(|x| x / ni).collect();
    let v: Vec<f64> = gj.iter().map(|x| x / nj).collect();
    if u == v {
        return GradientDecomposition {
            angle: Some(0.0),
            harmony_magnitude: Some(1.0),
            conflict_magnitude: Some(0.0),
            degenerate: false,
        };
    }
    let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
    let diff: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
    let (ns, nd) = (norm(&sum), norm(&diff));
    let angle = 2.0 * nd.atan2(ns);
    if ns < NORM_FLOOR {
        return GradientDecomposition {
            angle: Some(std::f64::consts::PI),
            harmony_magnitude: Some(0.0),
            conflict_magnitude: Some(1.0),
            degenerate: true,
        };
    }
    let centre: Vec<f64> = sum.iter().map(|x| x / ns).collect();
    let along: f64 = u.iter().zip(&centre).map(|(a, c)| a * c).sum();
    let perpendicular: Vec<f64> = u.iter().zip(&centre).map(|(a, c)| a - along * c).collect();
    GradientDecomposition {
        angle: Some(angle),
        harmony_magnitude: Some(along.clamp(0.0, 1.0)),
        conflict_magnitude: Some(norm(&perpendicular).clamp(0.0, 1.0)),
        degenerate: false,
    }
}

/// Averages [`angle_decomposition`] of constraints `i` and `j` over the
/// sample points.
pub fn gradient_relationship(
    problem: &Problem,
    i: usize,
    j: usize,
    samples: &SampleSet,
    mode: GradientMode,
    step: f64,
) -> Result<GradientAggregate> {
    if i == j {
        return Err(Error::Precondition(format!(
            "cannot compare constraint {i} with itself"
        )));
    }
    let symbolic = match mode {
        GradientMode::Symbolic => Some((gradient_exprs(problem, i)?, gradient_exprs(problem, j)?)),
        GradientMode::CentralDifference => {
            problem.constraint(i)?;
            problem.constraint(j)?;
            None
        }
    };
    let mut agg = GradientAggregate {
        i,
        j,
        mean_harmony: None,
        mean_conflict: None,
        defined_points: 0,
        degenerate_points: 0,
        antiparallel_points: 0,
        skipped_points: 0,
    };
    let (mut harmony, mut conflict) = (0.0, 0.0);
    for x in samples.points() {
        let (gi, gj) = match &symbolic {
            Some((di, dj)) => (
                eval_gradient(problem, &problem.constraints()[i].name, di, x)?,
                eval_gradient(problem, &problem.constraints()[j].name, dj, x)?,
            ),
            None => match (
                central_difference(problem, i, x, step),
                central_difference(problem, j, x, step),
            ) {
                (Ok(gi), Ok(gj)) => (gi, gj),
                (Err(Error::Precondition(_)), _) | (_, Err(Error::Precondition(_))) => {
                    agg.skipped_points += 1;
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            },
        };
        let d = angle_decomposition(&gi, &gj);
        match (d.harmony_magnitude, d.conflict_magnitude) {
            (Some(h), Some(c)) => {
                if d.degenerate {
                    agg.antiparallel_points += 1;
                }
                agg.defined_points += 1;
                harmony += h;
                conflict += c;
            }
            _ => agg.degenerate_points += 1,
        }
    }
    if agg.defined_points > 0 {
        let n = agg.defined_points as f64;
        agg.mean_harmony = Some(harmony / n);
        agg.mean_conflict = Some(conflict / n);
    }
    Ok(agg)
}
