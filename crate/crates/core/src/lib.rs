//! # conrel
//!
//! Empirical relationship analysis for optimization problems with many
//! constraints.
//!
//! Given bounded real variables and a list of inequality/equality
//! constraints, `conrel` samples the decision space and classifies every
//! constraint pair as totally harmonious, totally conflicting, mixed or
//! independent. It measures harmony and conflict magnitudes three ways
//! (pairwise dominance counts, parallel-coordinate crossings and gradient
//! directions), infers unmeasured relationships by sign composition, flags
//! redundant constraints and splits the problem into independent parts.
//!
//! ```
//! use conrel::{analyze, generator::paper_suite, AnalysisConfig, EdgeLabel};
//!
//! let problem = &paper_suite()[0];
//! let report = analyze(problem, &AnalysisConfig::with_seed(42)).unwrap();
//! assert_eq!(report.edge_label("g1", "g2"), Some(EdgeLabel::TotalConflict));
//! ```

pub mod error;
pub mod expr;
pub mod generator;
pub mod gradient;
pub mod graph;
pub mod independence;
pub mod pairwise;
pub mod plot;
pub mod problem;
pub mod report;
pub mod unionfind;

pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use gradient::{angle_decomposition, gradient, gradient_relationship, GradientMode};
pub use graph::{
    build_graph, decompose, detect_redundancy, infer_transitive, EdgeLabel, InferenceResult,
    RelationshipGraph,
};
pub use independence::{effective_support, independence_verdict, IndependenceVerdict};
pub use pairwise::{
    analyze_pair, compare_pair, crossing_count, PairEvidence, PairLabel, PairVerdict,
};
pub use problem::{ConstraintKind, Problem, SampleSet, SamplingStrategy};
pub use report::{analyze, AnalysisConfig, AnalysisReport};
