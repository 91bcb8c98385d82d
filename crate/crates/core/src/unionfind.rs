//! Disjoint sets where every element carries a parity bit relative to its
//! root, so that `parity(a) ^ parity(b)` is the parity of any path joining
//! `a` and `b` through the recorded unions.

#[derive(Clone, Debug)]
pub struct ParityUnionFind {
    parent: Vec<usize>,
    /// Parity of the edge to `parent`.
    parity: Vec<bool>,
    size: Vec<usize>,
}

/// Outcome of [`ParityUnionFind::union`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Union {
    Merged,
    /// Already connected with the requested parity.
    Consistent,
    /// Already connected with the opposite parity.
    Contradiction,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            parity: vec![false; n],
            size: vec![1; n],
        }
    }

    /// Root of `x` and the parity of `x` relative to it.
    pub fn find(&mut self, x: usize) -> (usize, bool) {
        let parent = self.parent[x];
        if parent == x {
            return (x, false);
        }
        let (root, up) = self.find(parent);
        self.parity[x] ^= up;
        self.parent[x] = root;
        (root, self.parity[x])
    }

    /// Relative parity of `a` and `b`, if connected.
    pub fn relation(&mut self, a: usize, b: usize) -> Option<bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        (ra == rb).then_some(pa ^ pb)
    }

    /// Records that `a` and `b` have relative parity `odd`.
    pub fn union(&mut self, a: usize, b: usize, odd: bool) -> Union {
        let (mut ra, pa) = self.find(a);
        let (mut rb, pb) = self.find(b);
        if ra == rb {
            return if pa ^ pb == odd {
                Union::Consistent
            } else {
                Union::Contradiction
            };
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ odd;
        self.size[ra] += self.size[rb];
        Union::Merged
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a).0 == self.find(b).0
    }
}
