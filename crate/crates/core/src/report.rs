//! Full analysis pipeline and its JSON report.
//!
//! The report is self-contained: it embeds the problem and every run
//! parameter, so re-running with the recorded values reproduces the same
//! labels. Constraints and variables are referred to by name. Keys are
//! emitted in struct declaration order and floats in shortest round-trip
//! form, so identical runs give byte-identical documents.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradient::{gradient_relationship, GradientAggregate, GradientMode, DEFAULT_STEP};
use crate::graph::{
    build_graph, decompose, detect_redundancy, infer_transitive, Decomposition, Edge, EdgeLabel,
    InferenceResult, Provenance, RelationshipGraph,
};
use crate::independence::{
    effective_supports, verdict_from_supports, IndependenceVerdict, DEFAULT_EPS_VALUE,
    DEFAULT_PROBE_FRACTION,
};
use crate::pairwise::{analyze_pair, PairLabel, PairVerdict, DEFAULT_EPS_TIE};
use crate::problem::{Problem, ProblemFile, SampleSet, SamplingStrategy, DEFAULT_EPS_FEAS};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub samples: usize,
    pub seed: u64,
    pub strategy: SamplingStrategy,
    pub eps_tie: f64,
    pub eps_feas: f64,
    /// Independence probe size as a fraction of each variable's range.
    pub probe_fraction: f64,
    pub eps_value: f64,
    pub gradient_mode: GradientMode,
    pub step: f64,
}

impl AnalysisConfig {
    pub fn with_seed(seed: u64) -> Self {
        AnalysisConfig {
            samples: DEFAULT_SAMPLES,
            seed,
            strategy: SamplingStrategy::LatinHypercube,
            eps_tie: DEFAULT_EPS_TIE,
            eps_feas: DEFAULT_EPS_FEAS,
            probe_fraction: DEFAULT_PROBE_FRACTION,
            eps_value: DEFAULT_EPS_VALUE,
            gradient_mode: GradientMode::Symbolic,
            step: DEFAULT_STEP,
        }
    }

    /// Draws the sample set these parameters describe.
    pub fn sample(&self, problem: &Problem) -> Result<SampleSet> {
        if self.samples < 2 {
            return Err(Error::Precondition(format!(
                "pairwise analysis needs >= 2 samples, got {}",
                self.samples
            )));
        }
        problem.sample(self.samples, self.seed, self.strategy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub i: String,
    pub j: String,
    pub label: PairLabel,
    pub harmony_pairs: u64,
    pub conflict_pairs: u64,
    pub tie_pairs: u64,
    pub total_pairs: u64,
    pub harmony_magnitude: Option<f64>,
    pub conflict_magnitude: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceRecord {
    pub i: String,
    pub j: String,
    pub syntactic_independent: bool,
    pub effective_independent: bool,
    pub support_i: Vec<String>,
    pub support_j: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientRecord {
    pub i: String,
    pub j: String,
    pub mean_harmony: Option<f64>,
    pub mean_conflict: Option<f64>,
    pub defined_points: usize,
    pub degenerate_points: usize,
    pub antiparallel_points: usize,
    pub skipped_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub i: String,
    pub j: String,
    pub label: EdgeLabel,
    pub provenance: Provenance,
    pub pairwise_label: Option<PairLabel>,
    pub harmony_magnitude: Option<f64>,
    pub conflict_magnitude: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferredRecord {
    pub i: String,
    pub j: String,
    pub label: EdgeLabel,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContradictionRecord {
    pub i: String,
    pub j: String,
    pub measured: EdgeLabel,
    pub implied: EdgeLabel,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceRecord {
    pub inferred: Vec<InferredRecord>,
    pub contradictions: Vec<ContradictionRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    /// Edges in recording order.
    pub edges: Vec<EdgeRecord>,
    pub inference: InferenceRecord,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedundancyRecord {
    pub redundant: String,
    pub witness: String,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubProblemRecord {
    pub constraints: Vec<String>,
    pub variables: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub subproblems: Vec<SubProblemRecord>,
    pub unconstrained: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub problem: ProblemFile,
    pub parameters: AnalysisConfig,
    pub pairs: Vec<PairRecord>,
    pub independence: Vec<IndependenceRecord>,
    pub gradients: Vec<GradientRecord>,
    pub graph: GraphRecord,
    pub redundancy: Vec<RedundancyRecord>,
    pub decomposition: DecompositionRecord,
}

/// Names attached to index-based results.
pub struct Namer<'a> {
    problem: &'a Problem,
}

impl<'a> Namer<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Namer { problem }
    }

    pub fn constraint(&self, j: usize) -> String {
        self.problem.constraints()[j].name.clone()
    }

    pub fn constraints(&self, js: &[usize]) -> Vec<String> {
        js.iter().map(|&j| self.constraint(j)).collect()
    }

    pub fn variables<'b>(&self, ks: impl IntoIterator<Item = &'b usize>) -> Vec<String> {
        ks.into_iter()
            .map(|&k| self.problem.variables()[k].name.clone())
            .collect()
    }

    pub fn pair(&self, v: &PairVerdict, config: &AnalysisConfig) -> PairRecord {
        PairRecord {
            i: self.constraint(v.i),
            j: self.constraint(v.j),
            label: v.label,
            harmony_pairs: v.evidence.harmony_pairs,
            conflict_pairs: v.evidence.conflict_pairs,
            tie_pairs: v.evidence.tie_pairs,
            total_pairs: v.evidence.total_pairs,
            harmony_magnitude: v.harmony_magnitude,
            conflict_magnitude: v.conflict_magnitude,
            samples: config.samples,
            seed: config.seed,
        }
    }

    pub fn independence(&self, v: &IndependenceVerdict) -> IndependenceRecord {
        IndependenceRecord {
            i: self.constraint(v.i),
            j: self.constraint(v.j),
            syntactic_independent: v.syntactic_independent,
            effective_independent: v.effective_independent,
            support_i: self.variables(&v.effective_supports.0),
            support_j: self.variables(&v.effective_supports.1),
        }
    }

    pub fn gradient(&self, g: &GradientAggregate) -> GradientRecord {
        GradientRecord {
            i: self.constraint(g.i),
            j: self.constraint(g.j),
            mean_harmony: g.mean_harmony,
            mean_conflict: g.mean_conflict,
            defined_points: g.defined_points,
            degenerate_points: g.degenerate_points,
            antiparallel_points: g.antiparallel_points,
            skipped_points: g.skipped_points,
        }
    }

    pub fn inference(&self, r: &InferenceResult) -> InferenceRecord {
        InferenceRecord {
            inferred: r
                .inferred
                .iter()
                .map(|e| InferredRecord {
                    i: self.constraint(e.i),
                    j: self.constraint(e.j),
                    label: e.label,
                    witness: self.constraints(&e.witness),
                })
                .collect(),
            contradictions: r
                .contradictions
                .iter()
                .map(|c| ContradictionRecord {
                    i: self.constraint(c.i),
                    j: self.constraint(c.j),
                    measured: c.measured,
                    implied: c.implied,
                    witness: self.constraints(&c.witness),
                })
                .collect(),
        }
    }

    pub fn decomposition(&self, d: &Decomposition) -> DecompositionRecord {
        DecompositionRecord {
            subproblems: d
                .subproblems
                .iter()
                .map(|s| SubProblemRecord {
                    constraints: self.constraints(&s.constraints),
                    variables: self.variables(&s.variables),
                })
                .collect(),
            unconstrained: self.variables(&d.unconstrained),
        }
    }
}

pub(crate) fn graph_notes(config: &AnalysisConfig) -> Vec<String> {
    vec![
        format!(
            "TOTAL_* labels summarize {} sampled points (strategy {}, seed {}); they are evidence, not proofs.",
            config.samples, config.strategy, config.seed
        ),
        "Ties are excluded, so a pair with no harmony evidence is labeled TOTAL_CONFLICT.".into(),
        "Inferred edges multiply signs (TOTAL_HARMONY=+1, TOTAL_CONFLICT=-1) along paths of measured total edges; paths longer than two edges extend the two-edge composition rules.".into(),
        "Contradictions are measured total edges that disagree with the sign of an earlier-recorded path; they are reported, not resolved.".into(),
    ]
}

fn all_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect()
}

/// Runs every analysis stage and assembles the report.
pub fn analyze(problem: &Problem, config: &AnalysisConfig) -> Result<AnalysisReport> {
    let m = problem.constraint_count();
    if m == 0 {
        return Err(Error::Precondition("problem has no constraints".into()));
    }
    let samples = config.sample(problem)?;
    let pairs = all_pairs(m);

    let verdicts = pairs
        .par_iter()
        .map(|&(i, j)| analyze_pair(problem, i, j, &samples, config.eps_tie))
        .collect::<Result<Vec<_>>>()?;
    let supports = effective_supports(problem, &samples, config.probe_fraction, config.eps_value)?;
    let independence = pairs
        .iter()
        .map(|&(i, j)| verdict_from_supports(problem, i, j, &supports))
        .collect::<Result<Vec<_>>>()?;
    let gradients = pairs
        .par_iter()
        .map(|&(i, j)| {
            gradient_relationship(problem, i, j, &samples, config.gradient_mode, config.step)
        })
        .collect::<Result<Vec<_>>>()?;

    let names: Vec<String> = problem
        .constraints()
        .iter()
        .map(|c| c.name.clone())
        .collect();
    let graph = build_graph(names, &verdicts, &independence)?;
    let inference = infer_transitive(&graph);
    let redundancy = detect_redundancy(problem, &graph, &samples, config.eps_feas)?;
    let decomposition = decompose(problem, &supports)?;

    let namer = Namer::new(problem);
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::default(),
        problem: problem.to_file(),
        parameters: config.clone(),
        pairs: verdicts.iter().map(|v| namer.pair(v, config)).collect(),
        independence: independence.iter().map(|v| namer.independence(v)).collect(),
        gradients: gradients.iter().map(|g| namer.gradient(g)).collect(),
        graph: GraphRecord {
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    i: namer.constraint(e.i),
                    j: namer.constraint(e.j),
                    label: e.label,
                    provenance: e.provenance,
                    pairwise_label: e.pairwise_label,
                    harmony_magnitude: e.harmony_magnitude,
                    conflict_magnitude: e.conflict_magnitude,
                })
                .collect(),
            inference: namer.inference(&inference),
            notes: graph_notes(config),
        },
        redundancy: redundancy
            .iter()
            .map(|r| RedundancyRecord {
                redundant: namer.constraint(r.redundant),
                witness: namer.constraint(r.witness),
                samples: config.samples,
                seed: config.seed,
            })
            .collect(),
        decomposition: namer.decomposition(&decomposition),
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(document: &str) -> Result<AnalysisReport> {
        let report: AnalysisReport = serde_json::from_str(document)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported report schema version {} (expected {SCHEMA_VERSION})",
                report.schema_version
            )));
        }
        Ok(report)
    }

    pub fn problem(&self) -> Result<Problem> {
        Problem::from_file(&self.problem)
    }

    /// Rebuilds the relationship graph from the recorded edges, keeping
    /// their order.
    pub fn graph(&self) -> Result<RelationshipGraph> {
        let names: Vec<String> = self
            .problem
            .constraints
            .iter()
            .map(|c| c.name.clone())
            .collect();
        let index = |name: &str| {
            names.iter().position(|n| n == name).ok_or_else(|| {
                Error::Validation(format!("report edge names unknown constraint `{name}`"))
            })
        };
        let edges = self
            .graph
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    i: index(&e.i)?,
                    j: index(&e.j)?,
                    label: e.label,
                    provenance: e.provenance,
                    pairwise_label: e.pairwise_label,
                    harmony_magnitude: e.harmony_magnitude,
                    conflict_magnitude: e.conflict_magnitude,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RelationshipGraph::from_edges(names, edges)
    }

    pub fn edge_label(&self, a: &str, b: &str) -> Option<EdgeLabel> {
        self.graph
            .edges
            .iter()
            .find(|e| (e.i == a && e.j == b) || (e.i == b && e.j == a))
            .map(|e| e.label)
    }
}

/// Effective supports by constraint, as names.
pub fn named_supports(problem: &Problem, supports: &[BTreeSet<usize>]) -> Vec<Vec<String>> {
    let namer = Namer::new(problem);
    supports.iter().map(|s| namer.variables(s)).collect()
}
