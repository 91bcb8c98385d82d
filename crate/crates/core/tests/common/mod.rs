//! Brute-force reference for sign-composition inference, independent of the
//! union-find used by the library.

#![allow(dead_code)]

use conrel::graph::{infer_transitive, EdgeLabel, RelationshipGraph};

/// Sign of a total edge: `+1` for harmony, `-1` for conflict.
fn sign(label: EdgeLabel) -> Option<i8> {
    match label {
        EdgeLabel::TotalHarmony => Some(1),
        EdgeLabel::TotalConflict => Some(-1),
        _ => None,
    }
}

pub struct Oracle {
    m: usize,
    total: Vec<Vec<Option<i8>>>,
}

impl Oracle {
    pub fn new(m: usize, labels: &[(usize, usize, EdgeLabel)]) -> Oracle {
        let mut total = vec![vec![None; m]; m];
        for &(i, j, label) in labels {
            total[i][j] = sign(label);
            total[j][i] = sign(label);
        }
        Oracle { m, total }
    }

    /// Sign products of every simple path from `from` to `to` over total
    /// edges, optionally leaving out the direct edge.
    pub fn path_signs(&self, from: usize, to: usize, skip_direct: bool) -> Vec<i8> {
        let mut out = Vec::new();
        let mut visited = vec![false; self.m];
        visited[from] = true;
        self.walk(from, to, 1, skip_direct, &mut visited, &mut out);
        out
    }

    fn walk(
        &self,
        node: usize,
        to: usize,
        acc: i8,
        skip_direct: bool,
        visited: &mut [bool],
        out: &mut Vec<i8>,
    ) {
        for next in 0..self.m {
            let Some(s) = self.total[node][next] else {
                continue;
            };
            if visited[next] {
                continue;
            }
            if skip_direct && visited.iter().filter(|v| **v).count() == 1 && next == to {
                continue;
            }
            if next == to {
                out.push(acc * s);
                continue;
            }
            visited[next] = true;
            self.walk(next, to, acc * s, skip_direct, visited, out);
            visited[next] = false;
        }
    }

    /// True when some two-colouring makes every harmony edge join equal
    /// colours and every conflict edge join different ones.
    pub fn balanced(&self) -> bool {
        (0u32..1 << self.m).any(|mask| {
            let colour = |k: usize| if mask >> k & 1 == 1 { -1 } else { 1 };
            (0..self.m).all(|i| {
                (0..self.m).all(|j| self.total[i][j].is_none_or(|s| colour(i) * colour(j) == s))
            })
        })
    }

    /// For a balanced graph: the implied label of `(i, j)`, if connected.
    pub fn implied(&self, i: usize, j: usize) -> Option<EdgeLabel> {
        let signs = self.path_signs(i, j, false);
        let first = *signs.first()?;
        assert!(signs.iter().all(|&s| s == first), "unbalanced input");
        Some(if first > 0 {
            EdgeLabel::TotalHarmony
        } else {
            EdgeLabel::TotalConflict
        })
    }

    /// True when `path` walks total edges whose sign product is `label`'s.
    pub fn witness_has_sign(&self, path: &[usize], label: EdgeLabel) -> bool {
        let mut acc = 1;
        for w in path.windows(2) {
            match self.total[w[0]][w[1]] {
                Some(s) => acc *= s,
                None => return false,
            }
        }
        Some(acc) == sign(label)
    }
}

pub fn names(m: usize) -> Vec<String> {
    (1..=m).map(|k| format!("g{k}")).collect()
}

pub fn pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect()
}

/// Checks one labelling against the brute-force oracle.
pub fn check(m: usize, labels: &[(usize, usize, EdgeLabel)]) {
    let graph = RelationshipGraph::from_labels(names(m), labels).unwrap();
    let result = infer_transitive(&graph);
    let oracle = Oracle::new(m, labels);
    let balanced = oracle.balanced();
    assert_eq!(result.contradictions.is_empty(), balanced, "{labels:?}");

    for c in &result.contradictions {
        assert_ne!(c.measured, c.implied);
        assert_eq!(graph.label(c.i, c.j), Some(c.measured));
        assert!(!oracle.path_signs(c.i, c.j, true).is_empty());
        assert_eq!(c.witness.first(), Some(&c.i));
        assert_eq!(c.witness.last(), Some(&c.j));
        assert!(
            oracle.witness_has_sign(&c.witness, c.implied),
            "{labels:?} {c:?}"
        );
    }
    for inf in &result.inferred {
        assert_eq!(graph.label(inf.i, inf.j), Some(EdgeLabel::Unknown));
        assert!(
            oracle.witness_has_sign(&inf.witness, inf.label),
            "{labels:?} {inf:?}"
        );
    }

    if balanced {
        for &(i, j, label) in labels {
            let expected = match label {
                EdgeLabel::Unknown => oracle.implied(i, j),
                _ => None,
            };
            let got = result
                .inferred
                .iter()
                .find(|e| (e.i, e.j) == (i, j))
                .map(|e| e.label);
            assert_eq!(got, expected, "pair ({i}, {j}) in {labels:?}");
        }
        // inferring again from the completed graph adds nothing new
        let completed: Vec<_> = graph
            .with_inferred(&result)
            .edges()
            .iter()
            .map(|e| (e.i, e.j, e.label))
            .collect();
        let again =
            infer_transitive(&RelationshipGraph::from_labels(names(m), &completed).unwrap());
        assert!(again.inferred.is_empty() && again.contradictions.is_empty());
    }
}
