//! Constructive embedding of a small graph into the classes of a
//! partition, greedy with exact candidate-set bookkeeping, and its dual
//! application that digs empty bipartite pairs out of the complement.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::Bitset;
use crate::graph::Graph;
use crate::rat::{rat, Rat};

fn rat_f64(x: Rat) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KeyLemmaError {
    Parameter(String),
    DeltaNotAboveEpsilon {
        delta: Rat,
        epsilon: Rat,
    },
    /// the ε ≤ ε₀ = (δ−ε)^Δ/(Δ+2) gate
    EpsilonExceedsThreshold {
        epsilon: Rat,
        epsilon0: Rat,
    },
    /// the t−1 ≤ ε₀·m gate, t copies per class, m the smallest used class
    CopiesExceedClassSize {
        t: usize,
        m: usize,
        epsilon0: Rat,
    },
    BadAssignment(String),
    DensityBelowDelta {
        class_a: usize,
        class_b: usize,
        density: Rat,
        delta: Rat,
    },
    /// greedy ran out of qualifying candidates; not a precondition failure
    DeadEnd {
        embedded: usize,
        stuck_vertex: usize,
    },
}

impl core::fmt::Display for KeyLemmaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KeyLemmaError::Parameter(s) => write!(f, "{s}"),
            KeyLemmaError::DeltaNotAboveEpsilon { delta, epsilon } => {
                write!(f, "delta {delta} must exceed epsilon {epsilon}")
            }
            KeyLemmaError::EpsilonExceedsThreshold { epsilon, epsilon0 } => write!(
                f,
                "epsilon {epsilon} exceeds the embedding threshold epsilon0 = \
                 (delta - epsilon)^Delta / (Delta + 2) = {epsilon0} ({})",
                rat_f64(*epsilon0)
            ),
            KeyLemmaError::CopiesExceedClassSize { t, m, epsilon0 } => write!(
                f,
                "t - 1 = {} exceeds epsilon0 * m = {epsilon0} * {m} = {}",
                t - 1,
                rat_f64(*epsilon0) * *m as f64
            ),
            KeyLemmaError::BadAssignment(s) => write!(f, "bad assignment: {s}"),
            KeyLemmaError::DensityBelowDelta {
                class_a,
                class_b,
                density,
                delta,
            } => write!(
                f,
                "classes ({class_a},{class_b}) have density {density} below delta {delta}"
            ),
            KeyLemmaError::DeadEnd {
                embedded,
                stuck_vertex,
            } => write!(
                f,
                "greedy dead end after {embedded} vertices, stuck on vertex {stuck_vertex}"
            ),
        }
    }
}

impl core::error::Error for KeyLemmaError {}

/// (δ−ε)^Δ / (Δ+2), exact.
pub fn epsilon0(delta: Rat, epsilon: Rat, max_degree: usize) -> Rat {
    let d = delta - epsilon;
    let mut p = rat(1, 1);
    for _ in 0..max_degree {
        p *= d;
    }
    p / rat(max_degree as i128 + 2, 1)
}

fn to_bitset(n: usize, verts: &[usize]) -> Bitset {
    Bitset::from_iter_len(n, verts.iter().copied())
}

/// Greedy injective embedding of `h` into `g`, one vertex per step in
/// index order, each H-vertex drawn from its assigned class. A
/// candidate must keep every unembedded neighbor's candidate set at
/// least (d−ε) of its current size, d = δ−ε; ties go to the lowest
/// vertex index. Arithmetic and density preconditions are verified
/// here; the ε-regularity of the supplied class pairs is the caller's
/// claim and is not re-certified (the result is verified either way).
pub fn key_lemma_embed(
    g: &Graph,
    classes: &[Vec<usize>],
    epsilon: Rat,
    delta: Rat,
    h: &Graph,
    assignment: &[usize],
) -> Result<Vec<usize>, KeyLemmaError> {
    if delta <= rat(0, 1) || delta >= rat(1, 1) || epsilon <= rat(0, 1) || epsilon >= rat(1, 1) {
        return Err(KeyLemmaError::Parameter(
            "delta and epsilon must lie in (0,1)".into(),
        ));
    }
    if delta <= epsilon {
        return Err(KeyLemmaError::DeltaNotAboveEpsilon { delta, epsilon });
    }
    if assignment.len() != h.n() {
        return Err(KeyLemmaError::BadAssignment(
            "assignment length differs from the target's vertex count".into(),
        ));
    }
    let max_deg = (0..h.n()).map(|v| h.degree(v)).max().unwrap_or(0);
    let eps0 = epsilon0(delta, epsilon, max_deg);
    if epsilon > eps0 {
        return Err(KeyLemmaError::EpsilonExceedsThreshold {
            epsilon,
            epsilon0: eps0,
        });
    }
    let mut copies = vec![0usize; classes.len()];
    for &c in assignment {
        if c >= classes.len() {
            return Err(KeyLemmaError::BadAssignment("class index out of range".into()));
        }
        if classes[c].is_empty() {
            return Err(KeyLemmaError::BadAssignment("assigned class is empty".into()));
        }
        copies[c] += 1;
    }
    let t = copies.iter().copied().max().unwrap_or(0);
    let m = (0..classes.len())
        .filter(|&c| copies[c] > 0)
        .map(|c| classes[c].len())
        .min()
        .unwrap_or(0);
    if t > 0 && rat(t as i128 - 1, 1) > eps0 * rat(m as i128, 1) {
        return Err(KeyLemmaError::CopiesExceedClassSize { t, m, epsilon0: eps0 });
    }
    for (u, v) in h.edges() {
        let (cu, cv) = (assignment[u], assignment[v]);
        if cu == cv {
            return Err(KeyLemmaError::BadAssignment(
                "adjacent target vertices share a class".into(),
            ));
        }
        let d = g.pair_density(
            &to_bitset(g.n(), &classes[cu]),
            &to_bitset(g.n(), &classes[cv]),
        );
        if d < delta {
            return Err(KeyLemmaError::DensityBelowDelta {
                class_a: cu.min(cv),
                class_b: cu.max(cv),
                density: d,
                delta,
            });
        }
    }

    // shrink threshold (d−ε) with d = δ−ε
    let shrink = delta - epsilon - epsilon;
    let (sn, sd) = (*shrink.numer(), *shrink.denom());
    let mut cand: Vec<Bitset> = assignment
        .iter()
        .map(|&c| to_bitset(g.n(), &classes[c]))
        .collect();
    let mut used = Bitset::new(g.n());
    let mut map = vec![usize::MAX; h.n()];
    for v in 0..h.n() {
        let later_neighbors: Vec<usize> = h.neighbors(v).iter().filter(|&u| u > v).collect();
        let mut pick = None;
        'candidates: for x in cand[v].iter() {
            if used.contains(x) {
                continue;
            }
            for &u in &later_neighbors {
                let kept = g.neighbors(x).intersection_count(&cand[u]) as i128;
                let cur = cand[u].count() as i128;
                // kept ≥ shrink·cur, compared in integers
                if kept * sd < sn * cur {
                    continue 'candidates;
                }
            }
            pick = Some(x);
            break;
        }
        let Some(x) = pick else {
            return Err(KeyLemmaError::DeadEnd {
                embedded: v,
                stuck_vertex: v,
            });
        };
        map[v] = x;
        used.insert(x);
        for &u in &later_neighbors {
            cand[u].intersect_with(g.neighbors(x));
        }
    }
    debug_assert!(h.edges().iter().all(|&(u, v)| g.has_edge(map[u], map[v])));
    Ok(map)
}

/// Hunts a t×t empty pair through the complement: the first class pair
/// (lexicographic) whose dual density reaches delta and admits a
/// complete bipartite embedding there yields an edge-free pair in the
/// original graph.
pub fn empty_pair_embed_dual(
    g: &Graph,
    classes: &[Vec<usize>],
    epsilon: Rat,
    delta: Rat,
    t: usize,
) -> Result<Option<(Vec<usize>, Vec<usize>)>, KeyLemmaError> {
    if t == 0 {
        return Err(KeyLemmaError::Parameter("t must be ≥ 1".into()));
    }
    let dual = g.complement();
    let h = Graph::complete_bipartite(t, t);
    // global arithmetic gates, so failures surface as typed errors
    // rather than an ambiguous None
    if delta <= epsilon {
        return Err(KeyLemmaError::DeltaNotAboveEpsilon { delta, epsilon });
    }
    let eps0 = epsilon0(delta, epsilon, t);
    if epsilon > eps0 {
        return Err(KeyLemmaError::EpsilonExceedsThreshold {
            epsilon,
            epsilon0: eps0,
        });
    }
    let m = classes.iter().map(|c| c.len()).min().unwrap_or(0);
    if rat(t as i128 - 1, 1) > eps0 * rat(m as i128, 1) {
        return Err(KeyLemmaError::CopiesExceedClassSize { t, m, epsilon0: eps0 });
    }
    let mut assignment = vec![0usize; 2 * t];
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            let d = dual.pair_density(
                &to_bitset(g.n(), &classes[i]),
                &to_bitset(g.n(), &classes[j]),
            );
            if d < delta {
                continue;
            }
            assignment[..t].fill(i);
            assignment[t..].fill(j);
            match key_lemma_embed(&dual, classes, epsilon, delta, &h, &assignment) {
                Ok(map) => {
                    let xs = map[..t].to_vec();
                    let ys = map[t..].to_vec();
                    debug_assert_eq!(
                        g.edges_between(&to_bitset(g.n(), &xs), &to_bitset(g.n(), &ys)),
                        0
                    );
                    return Ok(Some((xs, ys)));
                }
                Err(KeyLemmaError::DeadEnd { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}
