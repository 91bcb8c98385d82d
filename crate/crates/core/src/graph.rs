//! Relationship graph over constraints, transitive inference of total
//! relationships, redundancy detection and decomposition.
//!
//! Inference treats a measured total-harmony edge as sign `+1` and a
//! total-conflict edge as `-1`. The relationship implied between two
//! constraints is the product of signs along any path of measured total
//! edges joining them: harmony∘harmony and conflict∘conflict give harmony,
//! harmony∘conflict gives conflict. Chains longer than two edges follow the
//! same product rule. Mixed, degenerate, independent and unknown edges never
//! propagate anything.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::independence::IndependenceVerdict;
use crate::pairwise::{PairLabel, PairVerdict};
use crate::problem::{ConstraintKind, Problem, SampleSet};
use crate::unionfind::{ParityUnionFind, Union};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeLabel {
    TotalHarmony,
    TotalConflict,
    Mixed,
    Degenerate,
    Independent,
    Unknown,
}

impl EdgeLabel {
    pub fn abbreviation(self) -> &'static str {
        match self {
            EdgeLabel::TotalHarmony => "TH",
            EdgeLabel::TotalConflict => "TC",
            EdgeLabel::Mixed => "MX",
            EdgeLabel::Degenerate => "DG",
            EdgeLabel::Independent => "IND",
            EdgeLabel::Unknown => "UNK",
        }
    }

    /// Sign for the transitivity calculus; `None` for non-total labels.
    fn sign(self) -> Option<bool> {
        match self {
            EdgeLabel::TotalHarmony => Some(false),
            EdgeLabel::TotalConflict => Some(true),
            _ => None,
        }
    }

    fn from_odd(odd: bool) -> EdgeLabel {
        if odd {
            EdgeLabel::TotalConflict
        } else {
            EdgeLabel::TotalHarmony
        }
    }
}

impl From<PairLabel> for EdgeLabel {
    fn from(label: PairLabel) -> Self {
        match label {
            PairLabel::TotalHarmony => EdgeLabel::TotalHarmony,
            PairLabel::TotalConflict => EdgeLabel::TotalConflict,
            PairLabel::Mixed => EdgeLabel::Mixed,
            PairLabel::Degenerate => EdgeLabel::Degenerate,
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeLabel::TotalHarmony => "TOTAL_HARMONY",
            EdgeLabel::TotalConflict => "TOTAL_CONFLICT",
            EdgeLabel::Mixed => "MIXED",
            EdgeLabel::Degenerate => "DEGENERATE",
            EdgeLabel::Independent => "INDEPENDENT",
            EdgeLabel::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Measured,
    Inferred,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub label: EdgeLabel,
    pub provenance: Provenance,
    /// Sample-based label, kept when independence overrides it.
    pub pairwise_label: Option<PairLabel>,
    pub harmony_magnitude: Option<f64>,
    pub conflict_magnitude: Option<f64>,
}

impl Edge {
    fn unknown(i: usize, j: usize) -> Edge {
        Edge {
            i,
            j,
            label: EdgeLabel::Unknown,
            provenance: Provenance::Measured,
            pairwise_label: None,
            harmony_magnitude: None,
            conflict_magnitude: None,
        }
    }
}

fn key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// One edge per unordered constraint pair.
///
/// Edges are kept in the order they were recorded; unmeasured pairs follow
/// as `UNKNOWN`. Inference walks measured edges in that order, so a later
/// measurement that closes an unbalanced cycle is the one reported as
/// contradicted.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationshipGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    index: BTreeMap<(usize, usize), usize>,
}

impl RelationshipGraph {
    /// Builds a graph from recorded edges; missing pairs become `UNKNOWN`.
    pub fn from_edges(names: Vec<String>, recorded: Vec<Edge>) -> Result<RelationshipGraph> {
        let m = names.len();
        let mut graph = RelationshipGraph {
            names,
            edges: Vec::with_capacity(m * m.saturating_sub(1) / 2),
            index: BTreeMap::new(),
        };
        for mut edge in recorded {
            if edge.i == edge.j || edge.i >= m || edge.j >= m {
                return Err(Error::Precondition(format!(
                    "invalid edge ({}, {}) for {m} constraints",
                    edge.i, edge.j
                )));
            }
            (edge.i, edge.j) = key(edge.i, edge.j);
            let k = (edge.i, edge.j);
            if graph.index.contains_key(&k) {
                return Err(Error::Precondition(format!(
                    "duplicate entry for pair ({}, {})",
                    graph.names[k.0], graph.names[k.1]
                )));
            }
            graph.index.insert(k, graph.edges.len());
            graph.edges.push(edge);
        }
        for i in 0..m {
            for j in i + 1..m {
                if !graph.index.contains_key(&(i, j)) {
                    graph.index.insert((i, j), graph.edges.len());
                    graph.edges.push(Edge::unknown(i, j));
                }
            }
        }
        Ok(graph)
    }

    /// Shorthand for tests and hand-built graphs: measured edges with bare
    /// labels.
    pub fn from_labels(
        names: Vec<String>,
        labels: &[(usize, usize, EdgeLabel)],
    ) -> Result<RelationshipGraph> {
        let edges = labels
            .iter()
            .map(|&(i, j, label)| Edge {
                label,
                ..Edge::unknown(i, j)
            })
            .collect();
        RelationshipGraph::from_edges(names, edges)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    /// Edges in recording order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        self.index.get(&key(i, j)).map(|&k| &self.edges[k])
    }

    pub fn label(&self, i: usize, j: usize) -> Option<EdgeLabel> {
        self.edge(i, j).map(|e| e.label)
    }

    pub fn count(&self, label: EdgeLabel) -> usize {
        self.edges.iter().filter(|e| e.label == label).count()
    }

    /// Copy of the graph with every inferred edge filled in.
    pub fn with_inferred(&self, inference: &InferenceResult) -> RelationshipGraph {
        let mut out = self.clone();
        for inf in &inference.inferred {
            if let Some(&k) = out.index.get(&key(inf.i, inf.j)) {
                let edge = &mut out.edges[k];
                if edge.label == EdgeLabel::Unknown {
                    edge.label = inf.label;
                    edge.provenance = Provenance::Inferred;
                }
            }
        }
        out
    }
}

/// Assembles the graph from pairwise and independence verdicts.
///
/// Where the effective supports are disjoint the edge is `INDEPENDENT` and
/// the sample-based label is kept as an annotation.
pub fn build_graph(
    names: Vec<String>,
    verdicts: &[PairVerdict],
    independence: &[IndependenceVerdict],
) -> Result<RelationshipGraph> {
    let mut indep = BTreeMap::new();
    for v in independence {
        if indep.insert(key(v.i, v.j), v).is_some() {
            return Err(Error::Precondition(format!(
                "duplicate independence verdict for pair ({}, {})",
                v.i, v.j
            )));
        }
    }
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    for v in verdicts {
        if !seen.insert(key(v.i, v.j)) {
            return Err(Error::Precondition(format!(
                "duplicate verdict for pair ({}, {})",
                v.i, v.j
            )));
        }
        let independent = indep
            .get(&key(v.i, v.j))
            .is_some_and(|iv| iv.effective_independent);
        edges.push(Edge {
            i: v.i,
            j: v.j,
            label: if independent {
                EdgeLabel::Independent
            } else {
                v.label.into()
            },
            provenance: Provenance::Measured,
            pairwise_label: Some(v.label),
            harmony_magnitude: v.harmony_magnitude,
            conflict_magnitude: v.conflict_magnitude,
        });
    }
    for (&(i, j), iv) in &indep {
        if !seen.contains(&(i, j)) && iv.effective_independent {
            edges.push(Edge {
                label: EdgeLabel::Independent,
                ..Edge::unknown(i, j)
            });
        }
    }
    RelationshipGraph::from_edges(names, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferredEdge {
    pub i: usize,
    pub j: usize,
    pub label: EdgeLabel,
    /// Constraint indices from `i` to `j` along measured total edges.
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    pub i: usize,
    pub j: usize,
    pub measured: EdgeLabel,
    pub implied: EdgeLabel,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub inferred: Vec<InferredEdge>,
    pub contradictions: Vec<Contradiction>,
}

/// Path between two nodes of the spanning forest built during inference.
fn forest_path(adjacency: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adjacency.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        for &next in &adjacency[node] {
            if prev[next] == usize::MAX {
                prev[next] = node;
                queue.push_back(next);
            }
        }
    }
    let mut path = vec![to];
    let mut node = to;
    while node != from {
        node = prev[node];
        path.push(node);
    }
    path.reverse();
    path
}

/// Propagates measured total relationships to unknown pairs and reports
/// measured total edges that disagree with the propagated sign.
pub fn infer_transitive(graph: &RelationshipGraph) -> InferenceResult {
    let m = graph.node_count();
    let mut uf = ParityUnionFind::new(m);
    let mut forest = vec![Vec::new(); m];
    let mut result = InferenceResult::default();
    for edge in graph.edges() {
        if edge.provenance != Provenance::Measured {
            continue;
        }
        let Some(odd) = edge.label.sign() else {
            continue;
        };
        match uf.union(edge.i, edge.j, odd) {
            Union::Merged => {
                forest[edge.i].push(edge.j);
                forest[edge.j].push(edge.i);
            }
            Union::Consistent => {}
            Union::Contradiction => result.contradictions.push(Contradiction {
                i: edge.i,
                j: edge.j,
                measured: edge.label,
                implied: EdgeLabel::from_odd(!odd),
                witness: forest_path(&forest, edge.i, edge.j),
            }),
        }
    }
    for edge in graph.edges() {
        if edge.label != EdgeLabel::Unknown {
            continue;
        }
        if let Some(odd) = uf.relation(edge.i, edge.j) {
            result.inferred.push(InferredEdge {
                i: edge.i,
                j: edge.j,
                label: EdgeLabel::from_odd(odd),
                witness: forest_path(&forest, edge.i, edge.j),
            });
        }
    }
    result
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Redundancy {
    /// Constraint implied by the witness on the sample.
    pub redundant: usize,
    pub witness: usize,
}

/// Flags inequality constraints whose sampled feasible set contains that of
/// a totally harmonious partner.
pub fn detect_redundancy(
    problem: &Problem,
    graph: &RelationshipGraph,
    samples: &SampleSet,
    eps_feas: f64,
) -> Result<Vec<Redundancy>> {
    if samples.is_empty() {
        return Err(Error::Precondition("sample set is empty".into()));
    }
    let m = problem.constraint_count();
    let feasible: Vec<Vec<bool>> = samples
        .values()
        .iter()
        .map(|row| {
            row.iter()
                .zip(problem.constraints())
                .map(|(v, c)| match c.kind {
                    ConstraintKind::Inequality => *v <= eps_feas,
                    ConstraintKind::Equality => v.abs() <= eps_feas,
                })
                .collect()
        })
        .collect();
    let covers = |redundant: usize, witness: usize| {
        let mut any = false;
        for row in &feasible {
            if row[witness] {
                any = true;
                if !row[redundant] {
                    return false;
                }
            }
        }
        any
    };
    let mut pairs: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .filter(|e| e.label == EdgeLabel::TotalHarmony && e.i < m && e.j < m)
        .filter(|e| {
            problem.constraints()[e.i].kind == ConstraintKind::Inequality
                && problem.constraints()[e.j].kind == ConstraintKind::Inequality
        })
        .map(|e| (e.i, e.j))
        .collect();
    pairs.sort_unstable();
    let mut flags = Vec::new();
    for (i, j) in pairs {
        for (redundant, witness) in [(i, j), (j, i)] {
            if covers(redundant, witness) {
                flags.push(Redundancy { redundant, witness });
            }
        }
    }
    Ok(flags)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubProblem {
    pub constraints: Vec<usize>,
    pub variables: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub subproblems: Vec<SubProblem>,
    /// Variables no constraint depends on.
    pub unconstrained: Vec<usize>,
}

/// Connected components of the constraint-variable incidence graph.
pub fn decompose(problem: &Problem, supports: &[BTreeSet<usize>]) -> Result<Decomposition> {
    let m = problem.constraint_count();
    let n = problem.dimension();
    if supports.len() != m {
        return Err(Error::Precondition(format!(
            "expected {m} supports, got {}",
            supports.len()
        )));
    }
    // nodes: constraints 0..m, then variables m..m+n
    let mut uf = ParityUnionFind::new(m + n);
    for (j, support) in supports.iter().enumerate() {
        for &k in support {
            if k >= n {
                return Err(Error::Precondition(format!(
                    "support of constraint {j} names variable {k} (problem has {n})"
                )));
            }
            uf.union(j, m + k, false);
        }
    }
    let mut groups: BTreeMap<usize, SubProblem> = BTreeMap::new();
    let mut order = Vec::new();
    for j in 0..m {
        let root = uf.find(j).0;
        groups
            .entry(root)
            .or_insert_with(|| {
                order.push(root);
                SubProblem {
                    constraints: Vec::new(),
                    variables: Vec::new(),
                }
            })
            .constraints
            .push(j);
    }
    let mut unconstrained = Vec::new();
    for k in 0..n {
        let root = uf.find(m + k).0;
        match groups.get_mut(&root) {
            Some(group) => group.variables.push(k),
            None => unconstrained.push(k),
        }
    }
    let subproblems = order
        .into_iter()
        .map(|root| groups.remove(&root).expect("group exists"))
        .collect();
    Ok(Decomposition {
        subproblems,
        unconstrained,
    })
}
