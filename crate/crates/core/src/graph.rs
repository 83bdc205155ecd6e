//! Simple graphs: symmetric, loop-free, vertex set 0..n.

use alloc::vec::Vec;

use crate::bits::{BitMatrix, Bitset};
use crate::rat::{rat, Rat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    adj: BitMatrix,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: BitMatrix::new(n),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.n()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj.set_edge(u, v);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.has_edge(u, v)
    }

    pub fn neighbors(&self, u: usize) -> &Bitset {
        self.adj.row(u)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj.degree(u)
    }

    /// |N(u) ∩ s|
    pub fn degree_into(&self, u: usize, s: &Bitset) -> usize {
        self.adj.row(u).intersection_count(s)
    }

    pub fn edge_count(&self) -> u64 {
        self.adj.edge_count()
    }

    /// Omitted (non-)edges: C(n,2) − e.
    pub fn non_edge_count(&self) -> u64 {
        let n = self.n() as u64;
        n * (n - 1) / 2 - self.edge_count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj.edges()
    }

    /// Complement graph: edge iff distinct and not adjacent here.
    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Edges between disjoint vertex sets.
    pub fn edges_between(&self, xs: &Bitset, ys: &Bitset) -> u64 {
        debug_assert!(xs.is_disjoint_from(ys));
        xs.iter()
            .map(|x| self.adj.row(x).intersection_count(ys) as u64)
            .sum()
    }

    /// e(X,Y) / (|X||Y|), exactly; 0 when either side is empty.
    pub fn pair_density(&self, xs: &Bitset, ys: &Bitset) -> Rat {
        let a = xs.count() as i128;
        let b = ys.count() as i128;
        if a == 0 || b == 0 {
            return rat(0, 1);
        }
        rat(self.edges_between(xs, ys) as i128, a * b)
    }

    /// Edges with both ends inside s.
    pub fn edges_within(&self, s: &Bitset) -> u64 {
        let mut total = 0u64;
        for u in s.iter() {
            total += self.adj.row(u).intersection_count(s) as u64;
        }
        total / 2
    }

    pub fn is_independent(&self, s: &Bitset) -> bool {
        s.iter().all(|u| !self.adj.row(u).intersects(s))
    }

    /// Relabels the induced subgraph on `verts` (given in ascending order)
    /// to 0..verts.len().
    pub fn induced(&self, verts: &[usize]) -> Graph {
        let mut g = Graph::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn empty(n: usize) -> Graph {
        Graph::new(n)
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let mut g = Graph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::new(a + b);
        for u in 0..a {
            for v in a..(a + b) {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// w disjoint edges: vertices 2i and 2i+1 matched. α = w.
    pub fn matching(w: usize) -> Graph {
        let mut g = Graph::new(2 * w);
        for i in 0..w {
            g.add_edge(2 * i, 2 * i + 1);
        }
        g
    }

    /// Half graph on rows a_0..a_{k−1} (vertices 0..k) and b_0..b_{k−1}
    /// (vertices k..2k): a_i ~ b_j iff i < j. Cross density (k−1)/(2k).
    pub fn half_graph(k: usize) -> Graph {
        let mut g = Graph::new(2 * k);
        for i in 0..k {
            for j in (i + 1)..k {
                g.add_edge(i, k + j);
            }
        }
        g
    }

    /// Number of triangles, by scanning edges and intersecting rows.
    pub fn triangle_count(&self) -> u64 {
        let mut total = 0u64;
        for (u, v) in self.edges() {
            let common = self.adj.row(u).intersection(self.adj.row(v));
            total += common.iter().filter(|&w| w > v).count() as u64;
        }
        total
    }
}
