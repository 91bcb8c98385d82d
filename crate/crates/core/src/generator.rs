//! Example and synthetic problems with known pairwise relationships.
//!
//! Affine plants put constraints in groups sharing one direction `a`:
//! `f_j(x) = s_j (a · x) + b_j` with `s_j = ±1`. Within a group two
//! constraints are in total harmony when their signs agree and in total
//! conflict otherwise; different groups live on disjoint variable blocks and
//! are independent.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse;
use crate::problem::{Constraint, ConstraintKind, Problem, VariableSpec};
use crate::unionfind::{ParityUnionFind, Union};

/// Half-width of the box used for generated variables.
const AFFINE_BOUND: f64 = 5.0;

fn paper_problem(name: &str, exprs: [&str; 2]) -> Problem {
    let variables = ["x1", "x2"]
        .iter()
        .map(|n| VariableSpec {
            name: n.to_string(),
            lower: -3.0,
            upper: 3.0,
        })
        .collect();
    let constraints = exprs
        .iter()
        .enumerate()
        .map(|(k, src)| Constraint {
            name: format!("g{}", k + 1),
            kind: ConstraintKind::Inequality,
            expr: parse(src).expect("built-in expression parses"),
        })
        .collect();
    Problem::new(name, variables, None, constraints).expect("built-in problem is valid")
}

/// The conflicting, harmonious and independent example pairs, in that
/// order, each over `x1, x2 ∈ [-3, 3]`.
pub fn paper_suite() -> Vec<Problem> {
    vec![
        paper_problem(
            "paper-conflict",
            ["x1*exp(-x1^2-x2^2)", "-0.1-x1*exp(-x1^2-x2^2)"],
        ),
        paper_problem("paper-harmony", ["-x1+x2", "-x1+x2+1"]),
        paper_problem("paper-independence", ["2*sin(x1)-1", "x2^2-1"]),
    ]
}

/// The three example pairs merged into one six-constraint problem. Names
/// are prefixed with the pair they come from (`conflict_g1`, ...).
pub fn paper_merged() -> Problem {
    let suite = paper_suite();
    let mut constraints = Vec::new();
    for (prefix, p) in ["conflict", "harmony", "independence"].iter().zip(&suite) {
        for c in p.constraints() {
            constraints.push(Constraint {
                name: format!("{prefix}_{}", c.name),
                ..c.clone()
            });
        }
    }
    Problem::new(
        "paper-merged",
        suite[0].variables().to_vec(),
        None,
        constraints,
    )
    .expect("merged problem is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlantedLabel {
    TotalHarmony,
    TotalConflict,
    Independent,
}

impl fmt::Display for PlantedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlantedLabel::TotalHarmony => "TOTAL_HARMONY",
            PlantedLabel::TotalConflict => "TOTAL_CONFLICT",
            PlantedLabel::Independent => "INDEPENDENT",
        })
    }
}

impl FromStr for PlantedLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "TH" | "TOTAL_HARMONY" => Ok(PlantedLabel::TotalHarmony),
            "TC" | "TOTAL_CONFLICT" => Ok(PlantedLabel::TotalConflict),
            "IND" | "INDEPENDENT" => Ok(PlantedLabel::Independent),
            _ => Err(format!("unknown planted label `{s}`")),
        }
    }
}

/// Requested relationships for [`generate_affine`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    /// Random groups and signs.
    Random,
    /// The same label for every pair.
    Uniform(PlantedLabel),
    /// Labels for selected 0-based pairs; unlisted pairs take whatever the
    /// realization gives them.
    Pairs(BTreeMap<(usize, usize), PlantedLabel>),
}

impl FromStr for Plan {
    type Err = String;

    /// `random`, a single label (`TH`, `TC`, `IND`), or a comma-separated
    /// list of 1-based `i-j:LABEL` entries.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("random") {
            return Ok(Plan::Random);
        }
        if let Ok(label) = s.parse::<PlantedLabel>() {
            return Ok(Plan::Uniform(label));
        }
        let mut pairs = BTreeMap::new();
        for entry in s.split(',') {
            let (pair, label) = entry
                .split_once(':')
                .ok_or_else(|| format!("plan entry `{entry}` is not `i-j:LABEL`"))?;
            let (i, j) = pair
                .split_once('-')
                .ok_or_else(|| format!("plan entry `{entry}` is not `i-j:LABEL`"))?;
            let parse_idx = |t: &str| -> Result<usize, String> {
                match t.trim().parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(format!("bad constraint number `{t}` in plan")),
                }
            };
            let (i, j) = (parse_idx(i)?, parse_idx(j)?);
            if i == j {
                return Err(format!(
                    "plan entry `{entry}` pairs a constraint with itself"
                ));
            }
            pairs.insert((i.min(j), i.max(j)), label.trim().parse()?);
        }
        Ok(Plan::Pairs(pairs))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedProblem {
    pub problem: Problem,
    /// Exact relationship of every constraint pair `(i, j)`, `i < j`.
    pub planted_labels: BTreeMap<(usize, usize), PlantedLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub i: String,
    pub j: String,
    pub label: PlantedLabel,
}

/// Sidecar document listing planted labels by constraint name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelsFile {
    pub pairs: Vec<LabelEntry>,
}

impl PlantedProblem {
    pub fn labels_file(&self) -> LabelsFile {
        let name = |k: usize| self.problem.constraints()[k].name.clone();
        LabelsFile {
            pairs: self
                .planted_labels
                .iter()
                .map(|(&(i, j), &label)| LabelEntry {
                    i: name(i),
                    j: name(j),
                    label,
                })
                .collect(),
        }
    }
}

/// Group index and sign per constraint.
struct Assignment {
    group: Vec<usize>,
    negated: Vec<bool>,
    groups: usize,
}

fn assign_random(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Assignment {
    let groups = rng.gen_range(1..=m.min(n));
    let mut group: Vec<usize> = (0..m).map(|k| k % groups).collect();
    group.shuffle(rng);
    let negated = (0..m).map(|_| rng.gen_bool(0.5)).collect();
    Assignment {
        group,
        negated,
        groups,
    }
}

fn assign_from_plan(
    m: usize,
    pairs: &BTreeMap<(usize, usize), PlantedLabel>,
    rng: &mut ChaCha8Rng,
) -> Result<Assignment> {
    let unrealizable = |msg: String| Error::Precondition(format!("unrealizable plan: {msg}"));
    let mut uf = ParityUnionFind::new(m);
    for (&(i, j), &label) in pairs {
        if j >= m {
            return Err(unrealizable(format!(
                "pair ({}, {}) exceeds {m} constraints",
                i + 1,
                j + 1
            )));
        }
        let odd = match label {
            PlantedLabel::TotalHarmony => false,
            PlantedLabel::TotalConflict => true,
            PlantedLabel::Independent => continue,
        };
        if uf.union(i, j, odd) == Union::Contradiction {
            return Err(unrealizable(format!(
                "pair ({}, {}) contradicts the sign product of other pairs",
                i + 1,
                j + 1
            )));
        }
    }
    for (&(i, j), &label) in pairs {
        if label == PlantedLabel::Independent && uf.same(i, j) {
            return Err(unrealizable(format!(
                "pair ({}, {}) is independent but linked through total relationships",
                i + 1,
                j + 1
            )));
        }
    }
    let mut roots = BTreeMap::new();
    let mut group = Vec::with_capacity(m);
    let mut negated = Vec::with_capacity(m);
    let flips: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
    for k in 0..m {
        let (root, parity) = uf.find(k);
        let next = roots.len();
        let g = *roots.entry(root).or_insert(next);
        group.push(g);
        negated.push(parity ^ flips[root]);
    }
    Ok(Assignment {
        group,
        negated,
        groups: roots.len(),
    })
}

fn nonzero_coefficient(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let a: f64 = rng.gen_range(-1.0..=1.0);
        if a.abs() >= 0.1 {
            return a;
        }
    }
}

/// Generates an affine problem whose pairwise relationships are known
/// exactly.
pub fn generate_affine(n: usize, m: usize, seed: u64, plan: &Plan) -> Result<PlantedProblem> {
    if n < 2 || m < 2 {
        return Err(Error::Precondition(format!(
            "affine generation needs n >= 2 and m >= 2, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment = match plan {
        Plan::Random => assign_random(m, n, &mut rng),
        Plan::Uniform(label) => {
            let pairs = (0..m)
                .flat_map(|i| (i + 1..m).map(move |j| ((i, j), *label)))
                .collect();
            assign_from_plan(m, &pairs, &mut rng)?
        }
        Plan::Pairs(pairs) => assign_from_plan(m, pairs, &mut rng)?,
    };
    let groups = assignment.groups;
    if groups > n {
        return Err(Error::Precondition(format!(
            "plan needs {groups} independent variable blocks but n = {n}"
        )));
    }

    // contiguous, near-equal variable blocks
    let blocks: Vec<Vec<usize>> = (0..groups)
        .map(|g| (g * n / groups..(g + 1) * n / groups).collect())
        .collect();
    let directions: Vec<String> = blocks
        .iter()
        .map(|block| {
            block
                .iter()
                .map(|&k| format!("{}*x{}", nonzero_coefficient(&mut rng), k + 1))
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();

    let constraints = (0..m)
        .map(|j| {
            let base = &directions[assignment.group[j]];
            let sign = if assignment.negated[j] { "-" } else { "" };
            let offset: f64 = rng.gen_range(-1.0..=1.0);
            let src = format!("{sign}({base})+{offset}");
            Constraint {
                name: format!("c{}", j + 1),
                kind: ConstraintKind::Inequality,
                expr: parse(&src).expect("generated expression parses"),
            }
        })
        .collect();
    let variables = (0..n)
        .map(|k| VariableSpec {
            name: format!("x{}", k + 1),
            lower: -AFFINE_BOUND,
            upper: AFFINE_BOUND,
        })
        .collect();
    let problem = Problem::new(
        format!("affine-n{n}-m{m}-seed{seed}"),
        variables,
        None,
        constraints,
    )?;

    let mut planted_labels = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            let label = if assignment.group[i] != assignment.group[j] {
                PlantedLabel::Independent
            } else if assignment.negated[i] == assignment.negated[j] {
                PlantedLabel::TotalHarmony
            } else {
                PlantedLabel::TotalConflict
            };
            planted_labels.insert((i, j), label);
        }
    }
    Ok(PlantedProblem {
        problem,
        planted_labels,
    })
}
