//! ε-regularity: exact pair certification by exhaustive subset search,
//! a sound sampled refuter for larger sides, and an energy-increment
//! partition refiner.
//!
//! The exact checker leans on one reduction: over all sub-pairs meeting
//! the size thresholds, the extreme densities are attained at exactly
//! the threshold sizes (shrinking a larger set to its best/worst subset
//! of threshold size never moves the average the wrong way), so one
//! enumeration at sizes (⌈ε|X|⌉, ⌈ε|Y|⌉) decides the verdict.

pub mod decomp;
pub mod embed;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{for_each_combination, Bitset};
use crate::graph::Graph;
use crate::rat::{ceil_mul, rat, Rat};
use crate::rng::SeededRng;

pub use decomp::{
    density_spectrum, hierarchical_decomposition, interstitial_report, HierarchicalReport,
    InterstitialReport, LevelLedger, SpectrumEntry,
};
pub use embed::{empty_pair_embed_dual, epsilon0, key_lemma_embed, KeyLemmaError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RegularityError {
    Parameter(String),
    CapExceeded { side: usize, cap: usize },
}

impl core::fmt::Display for RegularityError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RegularityError::Parameter(s) => write!(f, "{s}"),
            RegularityError::CapExceeded { side, cap } => write!(
                f,
                "side of {side} exceeds the exhaustive cap {cap}; use the sampled checker"
            ),
        }
    }
}

impl core::error::Error for RegularityError {}

/// Disjoint vertex sets held sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BipartitePair {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

impl BipartitePair {
    pub fn new(mut x: Vec<usize>, mut y: Vec<usize>) -> Result<Self, RegularityError> {
        x.sort_unstable();
        y.sort_unstable();
        x.dedup();
        y.dedup();
        if x.iter().any(|v| y.binary_search(v).is_ok()) {
            return Err(RegularityError::Parameter("pair sides overlap".into()));
        }
        Ok(BipartitePair { x, y })
    }
}

fn to_bitset(n: usize, verts: &[usize]) -> Bitset {
    Bitset::from_iter_len(n, verts.iter().copied())
}

/// Exact cross density; 0 when a side is empty.
pub fn density(g: &Graph, pair: &BipartitePair) -> Rat {
    g.pair_density(&to_bitset(g.n(), &pair.x), &to_bitset(g.n(), &pair.y))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PairVerdict {
    Regular,
    Irregular {
        x_sub: Vec<usize>,
        y_sub: Vec<usize>,
        deviation: Rat,
    },
    Undecided {
        trials: usize,
    },
}

impl PairVerdict {
    pub fn is_regular(&self) -> bool {
        matches!(self, PairVerdict::Regular)
    }

    pub fn is_irregular(&self) -> bool {
        matches!(self, PairVerdict::Irregular { .. })
    }
}

pub const EXACT_SIDE_CAP: usize = 20;

fn check_eps(epsilon: Rat) -> Result<(), RegularityError> {
    if epsilon <= rat(0, 1) || epsilon >= rat(1, 1) {
        return Err(RegularityError::Parameter("epsilon must lie in (0,1)".into()));
    }
    Ok(())
}

/// Degrees of every y into the current X′, updated incrementally while
/// the combination scan walks X.
struct DegreeTracker<'a> {
    g: &'a Graph,
    xs: &'a [usize],
    ys: &'a [usize],
    deg: Vec<i64>,
}

impl DegreeTracker<'_> {
    fn bump(&mut self, xpos: usize, delta: i64) {
        let xv = self.xs[xpos];
        for (k, &yv) in self.ys.iter().enumerate() {
            if self.g.has_edge(xv, yv) {
                self.deg[k] += delta;
            }
        }
    }

    /// Sum of the q largest (or smallest) degrees, with the chosen y's.
    fn extreme(&self, q: usize, largest: bool) -> (i64, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.ys.len()).collect();
        if largest {
            order.sort_unstable_by_key(|&k| (-self.deg[k], k));
        } else {
            order.sort_unstable_by_key(|&k| (self.deg[k], k));
        }
        let picked = &order[..q];
        let sum = picked.iter().map(|&k| self.deg[k]).sum();
        let mut ys: Vec<usize> = picked.iter().map(|&k| self.ys[k]).collect();
        ys.sort_unstable();
        (sum, ys)
    }
}

/// Exhaustive ε-regularity check. Irregular verdicts carry the
/// deviation-maximizing witness found at the threshold sizes.
pub fn check_regular_exact(
    g: &Graph,
    pair: &BipartitePair,
    epsilon: Rat,
    side_cap: usize,
) -> Result<PairVerdict, RegularityError> {
    check_eps(epsilon)?;
    let (nx, ny) = (pair.x.len(), pair.y.len());
    if nx == 0 || ny == 0 {
        return Ok(PairVerdict::Regular);
    }
    if nx > side_cap || ny > side_cap {
        return Err(RegularityError::CapExceeded {
            side: nx.max(ny),
            cap: side_cap,
        });
    }
    let p = ceil_mul(epsilon, nx);
    let q = ceil_mul(epsilon, ny);
    let e_total = g.edges_between(&to_bitset(g.n(), &pair.x), &to_bitset(g.n(), &pair.y)) as i128;
    let cells = (nx * ny) as i128;
    let pq = (p * q) as i128;
    let (en, ed) = (*epsilon.numer(), *epsilon.denom());

    // deviation of a sub-pair with s edges is |s·cells − e·pq| / (pq·cells);
    // compare scaled numerators only, no rationals in the loop
    let violation_rhs = en * pq * cells;
    let mut best_metric: i128 = -1;
    let mut best: Option<(Vec<usize>, Vec<usize>, i128)> = None;

    // enter, leave and visit each need the degree table; RefCell keeps
    // the single-threaded sharing explicit
    let mut deg = vec![0i64; ny];
    let deg_cell = core::cell::RefCell::new(&mut deg);
    for_each_combination(
        nx,
        p,
        &mut |xpos| {
            let d = &mut **deg_cell.borrow_mut();
            let xv = pair.x[xpos];
            for (k, &yv) in pair.y.iter().enumerate() {
                if g.has_edge(xv, yv) {
                    d[k] += 1;
                }
            }
        },
        &mut |xpos| {
            let d = &mut **deg_cell.borrow_mut();
            let xv = pair.x[xpos];
            for (k, &yv) in pair.y.iter().enumerate() {
                if g.has_edge(xv, yv) {
                    d[k] -= 1;
                }
            }
        },
        &mut |chosen| {
            let d = &**deg_cell.borrow();
            for largest in [true, false] {
                let mut order: Vec<usize> = (0..ny).collect();
                if largest {
                    order.sort_unstable_by_key(|&k| (-d[k], k));
                } else {
                    order.sort_unstable_by_key(|&k| (d[k], k));
                }
                let s: i64 = order[..q].iter().map(|&k| d[k]).sum();
                let metric = ((s as i128) * cells - e_total * pq).abs() * ed;
                if metric > best_metric {
                    best_metric = metric;
                    let xs: Vec<usize> = chosen.iter().map(|&c| pair.x[c]).collect();
                    let mut ys: Vec<usize> = order[..q].iter().map(|&k| pair.y[k]).collect();
                    ys.sort_unstable();
                    best = Some((xs, ys, (s as i128) * cells - e_total * pq));
                }
            }
            true
        },
    );

    let (xs, ys, raw) = best.expect("threshold sizes are within bounds");
    if best_metric >= violation_rhs {
        Ok(PairVerdict::Irregular {
            x_sub: xs,
            y_sub: ys,
            deviation: Rat::new(raw.abs(), pq * cells),
        })
    } else {
        Ok(PairVerdict::Regular)
    }
}

/// Sampled refuter: random threshold-size X′ with the extremal Y′ for
/// each. Sound for "irregular", never claims "regular".
pub fn check_regular_sampled(
    g: &Graph,
    pair: &BipartitePair,
    epsilon: Rat,
    trials: usize,
    seed: u64,
) -> Result<PairVerdict, RegularityError> {
    check_eps(epsilon)?;
    if trials == 0 {
        return Err(RegularityError::Parameter("trials must be ≥ 1".into()));
    }
    let (nx, ny) = (pair.x.len(), pair.y.len());
    if nx == 0 || ny == 0 {
        return Ok(PairVerdict::Undecided { trials });
    }
    let p = ceil_mul(epsilon, nx);
    let q = ceil_mul(epsilon, ny);
    let e_total = g.edges_between(&to_bitset(g.n(), &pair.x), &to_bitset(g.n(), &pair.y)) as i128;
    let cells = (nx * ny) as i128;
    let pq = (p * q) as i128;
    let (en, ed) = (*epsilon.numer(), *epsilon.denom());
    let violation_rhs = en * pq * cells;

    let mut rng = SeededRng::new(seed);
    for _ in 0..trials {
        let xpos = rng.distinct_sorted(nx, p);
        let mut tracker = DegreeTracker {
            g,
            xs: &pair.x,
            ys: &pair.y,
            deg: vec![0i64; ny],
        };
        for &xp in &xpos {
            tracker.bump(xp, 1);
        }
        for largest in [true, false] {
            let (s, ys) = tracker.extreme(q, largest);
            let raw = (s as i128) * cells - e_total * pq;
            if raw.abs() * ed >= violation_rhs {
                return Ok(PairVerdict::Irregular {
                    x_sub: xpos.iter().map(|&c| pair.x[c]).collect(),
                    y_sub: ys,
                    deviation: Rat::new(raw.abs(), pq * cells),
                });
            }
        }
    }
    Ok(PairVerdict::Undecided { trials })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RegularityCaps {
    pub exact_side_cap: usize,
    pub sampled_trials: usize,
    pub sample_seed: u64,
    pub max_classes: usize,
    pub max_rounds: usize,
}

impl Default for RegularityCaps {
    fn default() -> Self {
        RegularityCaps {
            exact_side_cap: EXACT_SIDE_CAP,
            sampled_trials: 200,
            sample_seed: 0x5eed,
            max_classes: 64,
            max_rounds: 8,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairReport {
    pub density: Rat,
    pub verdict: PairVerdict,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StallReason {
    ClassCap,
    MaxRounds,
    EnergyStall,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PartitionStatus {
    BudgetMet,
    BudgetUnmet(StallReason),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegularPartition {
    pub classes: Vec<Vec<usize>>,
    pub epsilon: Rat,
    pub pair_report: BTreeMap<(usize, usize), PairReport>,
    pub status: PartitionStatus,
    pub rounds: usize,
    /// one entry per assessed round, non-decreasing
    pub energy_trace: Vec<Rat>,
    pub m0: usize,
    pub caps: RegularityCaps,
}

impl RegularPartition {
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn irregular_count(&self) -> usize {
        self.pair_report
            .values()
            .filter(|r| r.verdict.is_irregular())
            .count()
    }
}

/// Class-size-weighted mean square density, scaled into [0,1].
pub fn energy(g: &Graph, classes: &[Vec<usize>]) -> Rat {
    let n = g.n() as i128;
    if n == 0 {
        return rat(0, 1);
    }
    let sets: Vec<Bitset> = classes.iter().map(|c| to_bitset(g.n(), c)).collect();
    let mut acc = rat(0, 1);
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            let (a, b) = (classes[i].len() as i128, classes[j].len() as i128);
            if a == 0 || b == 0 {
                continue;
            }
            let e = g.edges_between(&sets[i], &sets[j]) as i128;
            // |Xi||Xj|·d² = e²/(|Xi||Xj|)
            acc += Rat::new(e * e, a * b);
        }
    }
    acc * rat(2, 1) / Rat::new(n * n, 1)
}

/// Contiguous equipartition, class sizes differing by at most one.
pub fn equipartition(n: usize, k: usize) -> Vec<Vec<usize>> {
    let q = n / k;
    let r = n % k;
    let mut out = Vec::with_capacity(k);
    let mut v = 0;
    for i in 0..k {
        let size = q + usize::from(i < r);
        out.push((v..v + size).collect());
        v += size;
    }
    out
}

/// Verdict + density for every class pair; exact below the side cap,
/// sampled above, with per-pair derived seeds.
pub fn assess_partition(
    g: &Graph,
    classes: &[Vec<usize>],
    epsilon: Rat,
    caps: &RegularityCaps,
    round: usize,
) -> Result<BTreeMap<(usize, usize), PairReport>, RegularityError> {
    let k = classes.len();
    let mut report = BTreeMap::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let pair = BipartitePair {
                x: classes[i].clone(),
                y: classes[j].clone(),
            };
            let d = density(g, &pair);
            let exact_ok =
                pair.x.len() <= caps.exact_side_cap && pair.y.len() <= caps.exact_side_cap;
            let verdict = if exact_ok {
                check_regular_exact(g, &pair, epsilon, caps.exact_side_cap)?
            } else {
                let seed = caps
                    .sample_seed
                    .wrapping_add(((round * k + i) * k + j) as u64);
                check_regular_sampled(g, &pair, epsilon, caps.sampled_trials, seed)?
            };
            report.insert((i, j), PairReport { density: d, verdict });
        }
    }
    Ok(report)
}

fn split_by_witnesses(
    classes: &[Vec<usize>],
    report: &BTreeMap<(usize, usize), PairReport>,
) -> Vec<Vec<usize>> {
    // per class, the witness sets touching it, in report order
    let mut touching: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); classes.len()];
    for (&(i, j), r) in report {
        if let PairVerdict::Irregular { x_sub, y_sub, .. } = &r.verdict {
            touching[i].push(x_sub);
            touching[j].push(y_sub);
        }
    }
    let mut out = Vec::new();
    for (c, members) in classes.iter().enumerate() {
        let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
        for &v in members {
            let sig: Vec<bool> = touching[c]
                .iter()
                .map(|w| w.binary_search(&v).is_ok())
                .collect();
            groups.entry(sig).or_default().push(v);
        }
        for (_, g) in groups {
            out.push(g);
        }
    }
    out
}

fn re_equalize(mut classes: Vec<Vec<usize>>, n: usize) -> Vec<Vec<usize>> {
    let k = classes.len();
    let q = n / k;
    let r = n % k;
    // largest classes first keep their bulk; surplus vertices pool up and
    // refill the small classes, all in deterministic index order
    classes.sort_unstable_by_key(|c| (usize::MAX - c.len(), c.first().copied().unwrap_or(0)));
    let mut pool: Vec<usize> = Vec::new();
    for (i, c) in classes.iter_mut().enumerate() {
        let target = q + usize::from(i < r);
        while c.len() > target {
            pool.push(c.pop().expect("nonempty while above target"));
        }
    }
    pool.sort_unstable();
    let mut pool = pool.into_iter();
    for (i, c) in classes.iter_mut().enumerate() {
        let target = q + usize::from(i < r);
        while c.len() < target {
            c.push(pool.next().expect("pool covers all deficits"));
        }
        c.sort_unstable();
    }
    classes
}

/// Energy-increment partitioning. Refines an initial contiguous
/// equipartition by irregularity witnesses until at most ε·k² pairs are
/// confirmed irregular, a cap stops progress, or a refinement round
/// fails to raise the energy (the re-equalization step can destroy the
/// textbook increment; that round is rejected and reported, never
/// silently accepted).
pub fn regularity_partition(
    g: &Graph,
    epsilon: Rat,
    m0: usize,
    caps: &RegularityCaps,
) -> Result<RegularPartition, RegularityError> {
    check_eps(epsilon)?;
    if m0 < 1 || g.n() < m0 {
        return Err(RegularityError::Parameter(
            "need at least m0 vertices".into(),
        ));
    }
    let mut classes = equipartition(g.n(), m0);
    let mut energy_trace = vec![energy(g, &classes)];
    let mut rounds = 0usize;
    loop {
        let report = assess_partition(g, &classes, epsilon, caps, rounds)?;
        let k = classes.len();
        let irregular = report
            .values()
            .filter(|r| r.verdict.is_irregular())
            .count();
        let finish = |status| {
            Ok(RegularPartition {
                classes: classes.clone(),
                epsilon,
                pair_report: report.clone(),
                status,
                rounds,
                energy_trace: energy_trace.clone(),
                m0,
                caps: *caps,
            })
        };
        if rat(irregular as i128, 1) <= epsilon * rat((k * k) as i128, 1) {
            return finish(PartitionStatus::BudgetMet);
        }
        if k >= caps.max_classes {
            return finish(PartitionStatus::BudgetUnmet(StallReason::ClassCap));
        }
        if rounds >= caps.max_rounds {
            return finish(PartitionStatus::BudgetUnmet(StallReason::MaxRounds));
        }
        let candidate = re_equalize(split_by_witnesses(&classes, &report), g.n());
        if candidate.len() > caps.max_classes {
            return finish(PartitionStatus::BudgetUnmet(StallReason::ClassCap));
        }
        let e_new = energy(g, &candidate);
        if e_new <= *energy_trace.last().expect("seeded with one entry") {
            return finish(PartitionStatus::BudgetUnmet(StallReason::EnergyStall));
        }
        classes = candidate;
        energy_trace.push(e_new);
        rounds += 1;
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReducedGraph {
    pub quotient: Graph,
    pub delta: Rat,
    pub epsilon: Rat,
    pub classes: Vec<Vec<usize>>,
}

/// Quotient keeping exactly the exact-certified regular pairs of
/// density ≥ delta. Undecided pairs never produce an edge.
pub fn reduced_graph(partition: &RegularPartition, delta: Rat) -> ReducedGraph {
    let k = partition.k();
    let mut q = Graph::new(k);
    for (&(i, j), r) in &partition.pair_report {
        if r.verdict.is_regular() && r.density >= delta {
            q.add_edge(i, j);
        }
    }
    ReducedGraph {
        quotient: q,
        delta,
        epsilon: partition.epsilon,
        classes: partition.classes.clone(),
    }
}

/// R(t): t vertices per quotient vertex, empty classes, complete
/// bipartite exactly on quotient edges. Vertex (i, s) lands at i·t + s.
pub fn blow_up(quotient: &Graph, t: usize) -> Graph {
    let mut g = Graph::new(quotient.n() * t);
    for (i, j) in quotient.edges() {
        for s in 0..t {
            for s2 in 0..t {
                g.add_edge(i * t + s, j * t + s2);
            }
        }
    }
    g
}
