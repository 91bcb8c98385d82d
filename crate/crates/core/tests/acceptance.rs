//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::f64::consts::FRAC_PI_4;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use conrel::generator::{generate_affine, paper_merged, paper_suite, Plan, PlantedLabel};
use conrel::gradient::{gradient, gradient_relationship, GradientMode};
use conrel::graph::{infer_transitive, EdgeLabel, RelationshipGraph};
use conrel::pairwise::{crossing_count, pair_evidence, PairLabel};
use conrel::problem::{Problem, SamplingStrategy};
use conrel::report::{analyze, AnalysisConfig, AnalysisReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const GRADIENT_REL_TOL: f64 = 1e-6;
const MEAN_TOL: f64 = 1e-9;

fn paper_config() -> AnalysisConfig {
    AnalysisConfig {
        samples: 200,
        strategy: SamplingStrategy::LatinHypercube,
        eps_tie: 1e-12,
        ..AnalysisConfig::with_seed(SEED)
    }
}

fn timed_analysis(problem: &Problem, config: &AnalysisConfig) -> (AnalysisReport, Duration) {
    let start = Instant::now();
    let report = analyze(problem, config).expect("analysis succeeds");
    (report, start.elapsed())
}

fn paper_classification() {
    let suite = paper_suite();
    let config = paper_config();

    let (conflict, t) = timed_analysis(&suite[0], &config);
    assert!(t < Duration::from_secs(1), "paper-conflict took {t:?}");
    assert_eq!(conflict.pairs[0].label, PairLabel::TotalConflict);
    assert_eq!(conflict.pairs[0].conflict_magnitude, Some(1.0));
    assert_eq!(
        conflict.edge_label("g1", "g2"),
        Some(EdgeLabel::TotalConflict)
    );

    let (harmony, t) = timed_analysis(&suite[1], &config);
    assert!(t < Duration::from_secs(1), "paper-harmony took {t:?}");
    assert_eq!(harmony.pairs[0].label, PairLabel::TotalHarmony);
    assert_eq!(harmony.pairs[0].harmony_magnitude, Some(1.0));
    assert_eq!(
        harmony.edge_label("g1", "g2"),
        Some(EdgeLabel::TotalHarmony)
    );

    let (independent, t) = timed_analysis(&suite[2], &config);
    assert!(t < Duration::from_secs(1), "paper-independence took {t:?}");
    assert!(independent.independence[0].syntactic_independent);
    assert!(independent.independence[0].effective_independent);
    assert_eq!(
        independent.edge_label("g1", "g2"),
        Some(EdgeLabel::Independent)
    );
}

fn redundancy() {
    let report = analyze(&paper_suite()[1], &paper_config()).unwrap();
    let flags: Vec<(String, String)> = report
        .redundancy
        .iter()
        .map(|r| (r.redundant.clone(), r.witness.clone()))
        .collect();
    assert_eq!(flags, [("g1".to_string(), "g2".to_string())]);
    let problem = report.problem().unwrap();
    assert_eq!(problem.constraints()[0].expr.to_string(), "-x1+x2");
    assert_eq!(problem.constraints()[1].expr.to_string(), "-x1+x2+1");
}

fn check_crossings(problem: &Problem, seed: u64) -> usize {
    let samples = problem.sample(50, seed, SamplingStrategy::Uniform).unwrap();
    let m = problem.constraint_count();
    let mut checked = 0;
    for i in 0..m {
        for j in i + 1..m {
            let (vi, vj) = (samples.column(i), samples.column(j));
            let evidence = pair_evidence(&vi, &vj, 1e-12).unwrap();
            assert_eq!(
                crossing_count(&vi, &vj, 1e-12).unwrap(),
                evidence.conflict_pairs,
                "{} pair ({i}, {j})",
                problem.name()
            );
            checked += 1;
        }
    }
    checked
}

fn crossing_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0;
    for k in 0..100 {
        let (n, m) = (rng.gen_range(2..=6), rng.gen_range(2..=8));
        let planted = generate_affine(n, m, k, &Plan::Random).unwrap();
        pairs += check_crossings(&planted.problem, k);
    }
    // the merged examples also contain mixed pairs
    let merged = paper_merged();
    for seed in 0..10 {
        pairs += check_crossings(&merged, seed);
    }
    assert!(pairs > 100);
}

fn transitivity_table() {
    use EdgeLabel::{Independent, Mixed, TotalConflict as TC, TotalHarmony as TH};
    let names = common::names(3);
    let table = [
        (TH, TH, Some(TH)),
        (TH, TC, Some(TC)),
        (TC, TH, Some(TC)),
        (TC, TC, Some(TH)),
        (TH, Mixed, None),
        (Mixed, TH, None),
        (TC, Mixed, None),
        (Mixed, TC, None),
        (Mixed, Mixed, None),
        (TH, Independent, None),
        (Independent, TC, None),
    ];
    for (a, b, expected) in table {
        let graph = RelationshipGraph::from_labels(names.clone(), &[(0, 1, a), (1, 2, b)]).unwrap();
        let result = infer_transitive(&graph);
        let got = result
            .inferred
            .iter()
            .find(|e| (e.i, e.j) == (0, 2))
            .map(|e| e.label);
        assert_eq!(got, expected, "{a} then {b}");
        assert!(result.contradictions.is_empty());
        if expected.is_some() {
            assert_eq!(result.inferred[0].witness, vec![0, 1, 2]);
        }
    }

    let alphabet = [TH, TC, Mixed, EdgeLabel::Unknown];
    for m in 2..=4 {
        let ps = common::pairs(m);
        for code in 0..alphabet.len().pow(ps.len() as u32) {
            let mut c = code;
            let labels: Vec<_> = ps
                .iter()
                .map(|&(i, j)| {
                    let l = alphabet[c % alphabet.len()];
                    c /= alphabet.len();
                    (i, j, l)
                })
                .collect();
            common::check(m, &labels);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for m in [5, 6] {
        for _ in 0..1000 {
            let labels: Vec<_> = common::pairs(m)
                .into_iter()
                .map(|(i, j)| {
                    let l = if rng.gen_bool(0.5) {
                        EdgeLabel::Unknown
                    } else {
                        alphabet[rng.gen_range(0..3)]
                    };
                    (i, j, l)
                })
                .collect();
            common::check(m, &labels);
        }
    }
}

fn planted_recovery() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut recovered = 0;
    for k in 0..100 {
        let (n, m) = (rng.gen_range(2..=6), rng.gen_range(2..=8));
        let planted = generate_affine(n, m, 1000 + k, &Plan::Random).unwrap();
        let config = AnalysisConfig {
            samples: 50,
            ..AnalysisConfig::with_seed(k)
        };
        let report = analyze(&planted.problem, &config).unwrap();
        let graph = report.graph().unwrap();
        for (&(i, j), &label) in &planted.planted_labels {
            let expected = match label {
                PlantedLabel::TotalHarmony => EdgeLabel::TotalHarmony,
                PlantedLabel::TotalConflict => EdgeLabel::TotalConflict,
                PlantedLabel::Independent => EdgeLabel::Independent,
            };
            assert_eq!(
                graph.label(i, j),
                Some(expected),
                "{} pair ({i}, {j})",
                planted.problem.name()
            );
            recovered += 1;
        }
        assert!(
            report.graph.inference.contradictions.is_empty(),
            "{}",
            planted.problem.name()
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    assert!(recovered >= 100);
}

fn contradiction_detection() {
    use EdgeLabel::{TotalConflict as TC, TotalHarmony as TH};
    let graph =
        RelationshipGraph::from_labels(common::names(3), &[(0, 1, TH), (1, 2, TC), (0, 2, TH)])
            .unwrap();
    let result = infer_transitive(&graph);
    assert_eq!(result.contradictions.len(), 1);
    let c = &result.contradictions[0];
    assert_eq!((c.i, c.j), (0, 2));
    assert_eq!(c.measured, TH);
    assert_eq!(c.implied, TC);
    assert!(result.inferred.is_empty());
}

fn gradient_checks() {
    let suite = paper_suite();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for problem in &suite {
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.99..2.99)).collect();
            for j in 0..2 {
                let sym = gradient(problem, j, &x, GradientMode::Symbolic, 1e-5).unwrap();
                let fd = gradient(problem, j, &x, GradientMode::CentralDifference, 1e-5).unwrap();
                for (s, f) in sym.iter().zip(&fd) {
                    assert!(
                        (s - f).abs() <= GRADIENT_REL_TOL * s.abs().max(1.0),
                        "{} g{} at {x:?}: {s} vs {f}",
                        problem.name(),
                        j + 1
                    );
                }
            }
        }
    }
    let aggregate = |p: &Problem| {
        let samples = paper_config().sample(p).unwrap();
        gradient_relationship(p, 0, 1, &samples, GradientMode::Symbolic, 1e-5).unwrap()
    };
    let conflicting = aggregate(&suite[0]);
    assert!((conflicting.mean_conflict.unwrap() - 1.0).abs() <= MEAN_TOL);
    let harmonious = aggregate(&suite[1]);
    assert!((harmonious.mean_harmony.unwrap() - 1.0).abs() <= MEAN_TOL);
    let independent = aggregate(&suite[2]);
    assert!((independent.mean_harmony.unwrap() - FRAC_PI_4.cos()).abs() <= MEAN_TOL);
    assert!((independent.mean_conflict.unwrap() - FRAC_PI_4.cos()).abs() <= MEAN_TOL);
}

fn decomposition() {
    let suite = paper_suite();
    let independent = analyze(&suite[2], &paper_config()).unwrap().decomposition;
    assert_eq!(independent.subproblems.len(), 2);
    let vars: Vec<Vec<String>> = independent
        .subproblems
        .iter()
        .map(|s| s.variables.clone())
        .collect();
    assert_eq!(vars, [vec!["x1".to_string()], vec!["x2".to_string()]]);
    let cons: Vec<Vec<String>> = independent
        .subproblems
        .iter()
        .map(|s| s.constraints.clone())
        .collect();
    assert_eq!(cons, [vec!["g1".to_string()], vec!["g2".to_string()]]);
    assert!(independent.unconstrained.is_empty());

    let whole = analyze(&suite[0], &paper_config()).unwrap().decomposition;
    assert_eq!(whole.subproblems.len(), 1);
    assert_eq!(whole.subproblems[0].constraints, ["g1", "g2"]);
    assert_eq!(whole.subproblems[0].variables, ["x1", "x2"]);
}

fn determinism() {
    let problem = paper_merged();
    let config = paper_config();
    let a = analyze(&problem, &config).unwrap().to_json();
    let b = analyze(&problem, &config).unwrap().to_json();
    assert_eq!(a.as_bytes(), b.as_bytes());

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("merged.json");
    std::fs::write(&input, problem.to_json()).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_conrel"))
            .args([
                "analyze",
                input.to_str().unwrap(),
                "--seed",
                "42",
                "--samples",
                "200",
            ])
            .args(["--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let first = run("a.json");
    assert_eq!(first, run("b.json"));
    assert_eq!(first, a.as_bytes());
}

fn ordering_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..20 {
        let (n, m) = (rng.gen_range(2..=6), rng.gen_range(2..=8));
        let planted = generate_affine(n, m, 500 + k, &Plan::Random).unwrap();
        let samples = planted
            .problem
            .sample(50, k, SamplingStrategy::LatinHypercube)
            .unwrap();
        let (i, j) = (0, rng.gen_range(1..m));
        let vi = samples.column(i);
        let vj = samples.column(j);
        let cubed: Vec<f64> = vi.iter().map(|v| v.powi(3)).collect();
        assert_eq!(
            pair_evidence(&cubed, &vj, 1e-12).unwrap(),
            pair_evidence(&vi, &vj, 1e-12).unwrap(),
            "{}",
            planted.problem.name()
        );
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 10] = [
        ("example classification", paper_classification),
        ("redundancy flag", redundancy),
        ("crossings equal conflict pairs", crossing_agreement),
        ("transitivity table and oracle", transitivity_table),
        ("planted label recovery", planted_recovery),
        ("contradiction detection", contradiction_detection),
        ("gradient checks", gradient_checks),
        ("decomposition", decomposition),
        ("byte-identical reports", determinism),
        ("monotone transform invariance", ordering_invariance),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run));
        let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {title:<32} {verdict} ({:.2?})",
            k + 1,
            start.elapsed()
        );
        failed += usize::from(outcome.is_err());
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
