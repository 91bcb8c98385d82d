//! Constraint problems: bounded variables, an optional objective and named
//! inequality (`g(x) <= 0`) or equality (`h(x) = 0`) constraints.

mod sampling;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

pub use sampling::{SampleSet, SamplingStrategy};

pub const DEFAULT_EPS_FEAS: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl VariableSpec {
    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Inequality,
    Equality,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub kind: ConstraintKind,
    pub expr: Expr,
}

/// A validated problem.
///
/// Constraint and variable indices used throughout the crate are 0-based
/// positions in [`Problem::constraints`] and [`Problem::variables`].
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    name: String,
    variables: Vec<VariableSpec>,
    objective: Option<Expr>,
    constraints: Vec<Constraint>,
}

/// On-disk JSON layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub variables: Vec<VariableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    pub constraints: Vec<ConstraintFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintFile {
    pub name: String,
    pub kind: ConstraintKind,
    pub expr: String,
}

/// Per-constraint and overall feasibility of one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub per_constraint: Vec<bool>,
    pub overall: bool,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        variables: Vec<VariableSpec>,
        objective: Option<Expr>,
        constraints: Vec<Constraint>,
    ) -> Result<Problem> {
        if variables.is_empty() {
            return Err(Error::Validation("problem declares no variables".into()));
        }
        let mut seen = HashSet::new();
        for var in &variables {
            if !is_identifier(&var.name) {
                return Err(Error::Validation(format!(
                    "variable name `{}` is not an identifier",
                    var.name
                )));
            }
            if !seen.insert(var.name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate variable name `{}`",
                    var.name
                )));
            }
            if !(var.lower.is_finite() && var.upper.is_finite()) {
                return Err(Error::Validation(format!(
                    "variable `{}` has non-finite bounds",
                    var.name
                )));
            }
            if var.lower >= var.upper {
                return Err(Error::Validation(format!(
                    "variable `{}`: lower bound {} is not below upper bound {}",
                    var.name, var.lower, var.upper
                )));
            }
        }
        let check_support = |owner: &str, expr: &Expr| -> Result<()> {
            for name in expr.syntactic_support() {
                if !seen.contains(name.as_str()) {
                    return Err(Error::Validation(format!(
                        "`{owner}` references undeclared variable `{name}`"
                    )));
                }
            }
            Ok(())
        };
        if let Some(obj) = &objective {
            check_support("objective", obj)?;
        }
        let mut names = HashSet::new();
        for con in &constraints {
            if con.name.is_empty() {
                return Err(Error::Validation("constraint with empty name".into()));
            }
            if !names.insert(con.name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate constraint name `{}`",
                    con.name
                )));
            }
            check_support(&con.name, &con.expr)?;
        }
        Ok(Problem {
            name: name.into(),
            variables,
            objective,
            constraints,
        })
    }

    pub fn from_file(file: &ProblemFile) -> Result<Problem> {
        let objective = file
            .objective
            .as_deref()
            .map(|src| {
                expr::parse(src).map_err(|source| Error::Parse {
                    constraint: "objective".into(),
                    source,
                })
            })
            .transpose()?;
        let constraints = file
            .constraints
            .iter()
            .map(|c| {
                let expr = expr::parse(&c.expr).map_err(|source| Error::Parse {
                    constraint: c.name.clone(),
                    source,
                })?;
                Ok(Constraint {
                    name: c.name.clone(),
                    kind: c.kind,
                    expr,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Problem::new(
            file.name.clone(),
            file.variables.clone(),
            objective,
            constraints,
        )
    }

    /// Parses and validates a JSON problem document.
    pub fn from_json(document: &str) -> Result<Problem> {
        let file: ProblemFile = serde_json::from_str(document)?;
        Problem::from_file(&file)
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            name: self.name.clone(),
            variables: self.variables.clone(),
            objective: self.objective.as_ref().map(Expr::to_string),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintFile {
                    name: c.name.clone(),
                    kind: c.kind,
                    expr: c.expr.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("problem file serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> Option<&Expr> {
        self.objective.as_ref()
    }

    pub fn dimension(&self) -> usize {
        self.variables.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraint_index(&self, name: &str) -> Option<usize> {
        self.constraints.iter().position(|c| c.name == name)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub(crate) fn constraint(&self, j: usize) -> Result<&Constraint> {
        self.constraints.get(j).ok_or_else(|| {
            Error::Precondition(format!(
                "constraint index {j} out of range (problem has {})",
                self.constraints.len()
            ))
        })
    }

    pub(crate) fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.variables.len() {
            return Err(Error::Precondition(format!(
                "point has {} coordinates, problem has {} variables",
                point.len(),
                self.variables.len()
            )));
        }
        Ok(())
    }

    /// Evaluates an arbitrary expression over this problem's variables.
    pub(crate) fn eval_expr(&self, owner: &str, expr: &Expr, point: &[f64]) -> Result<f64> {
        expr.eval_with(&|name: &str| self.variable_index(name).map(|k| point[k]))
            .map_err(|source| Error::NonFinite {
                constraint: owner.to_string(),
                point: point.to_vec(),
                source,
            })
    }

    /// Unified constraint value: `g_j(x)` for inequalities, `h_j(x)` for
    /// equalities. No absolute value is taken.
    pub fn constraint_value(&self, j: usize, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        let con = self.constraint(j)?;
        self.eval_expr(&con.name, &con.expr, point)
    }

    /// Inequality `j` is feasible iff `g_j(x) <= eps`; equality iff
    /// `|h_j(x)| <= eps`.
    pub fn feasibility(&self, point: &[f64], eps_feas: f64) -> Result<Feasibility> {
        if eps_feas.is_nan() || eps_feas < 0.0 {
            return Err(Error::Precondition(format!(
                "feasibility tolerance must be >= 0, got {eps_feas}"
            )));
        }
        let per_constraint = (0..self.constraints.len())
            .map(|j| self.constraint_feasible(j, point, eps_feas))
            .collect::<Result<Vec<_>>>()?;
        let overall = per_constraint.iter().all(|&f| f);
        Ok(Feasibility {
            per_constraint,
            overall,
        })
    }

    pub(crate) fn constraint_feasible(&self, j: usize, point: &[f64], eps: f64) -> Result<bool> {
        let value = self.constraint_value(j, point)?;
        Ok(match self.constraints[j].kind {
            ConstraintKind::Inequality => value <= eps,
            ConstraintKind::Equality => value.abs() <= eps,
        })
    }

    /// Draws a deterministic sample of `count` points and evaluates every
    /// constraint at each of them.
    pub fn sample(&self, count: usize, seed: u64, strategy: SamplingStrategy) -> Result<SampleSet> {
        SampleSet::draw(self, count, seed, strategy)
    }
}
