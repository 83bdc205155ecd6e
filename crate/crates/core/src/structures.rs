//! Finite structures and the fixed formula family evaluated over them.
//!
//! A structure is a universe 0..n with named symmetric loop-free binary
//! relations, unary predicates, equivalence partitions, named constants,
//! and labeled vertex parts. Generators are seed-deterministic.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{binomial, for_each_combination, BitMatrix, Bitset};
use crate::graph::Graph;
use crate::rat::{rat_one, rat_zero, Rat};
use crate::rng::{prob_threshold, SeededRng};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StructureError {
    Parameter(String),
    Capacity {
        stage: usize,
        needed: usize,
        cap: usize,
    },
    UnknownFormula(String),
    MissingSymbol {
        formula: String,
        symbol: String,
    },
    InvalidPartition {
        name: String,
        reason: String,
    },
    OutOfRange {
        what: &'static str,
        index: usize,
        n: usize,
    },
    LoopEdge {
        v: usize,
    },
    ArityMismatch {
        expected: usize,
        got: usize,
    },
    PatternConflict(String),
}

impl core::fmt::Display for StructureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StructureError::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            StructureError::Capacity { stage, needed, cap } => write!(
                f,
                "universe cap {cap} exceeded at stage {stage} (needs {needed} elements)"
            ),
            StructureError::UnknownFormula(name) => write!(f, "unknown formula: {name}"),
            StructureError::MissingSymbol { formula, symbol } => {
                write!(f, "formula {formula} needs symbol {symbol}")
            }
            StructureError::InvalidPartition { name, reason } => {
                write!(f, "equivalence {name} is not a partition: {reason}")
            }
            StructureError::OutOfRange { what, index, n } => {
                write!(f, "{what} index {index} out of range for universe {n}")
            }
            StructureError::LoopEdge { v } => write!(f, "loop edge at {v}"),
            StructureError::ArityMismatch { expected, got } => {
                write!(f, "tuple arity {got}, formula wants {expected}")
            }
            StructureError::PatternConflict(msg) => write!(f, "unrealizable pattern: {msg}"),
        }
    }
}

impl core::error::Error for StructureError {}

/// Equivalence relation stored both ways: class per element for O(1)
/// queries, member lists for enumeration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_classes(n: usize, classes: Vec<Vec<usize>>) -> Result<Self, String> {
        let mut class_of = vec![usize::MAX; n];
        for (ci, class) in classes.iter().enumerate() {
            for &v in class {
                if v >= n {
                    return Err(format!("member {v} outside universe"));
                }
                if class_of[v] != usize::MAX {
                    return Err(format!("element {v} in two classes"));
                }
                class_of[v] = ci;
            }
        }
        if let Some(v) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(format!("element {v} in no class"));
        }
        Ok(Partition { class_of, classes })
    }

    pub fn same_class(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteStructure {
    n: usize,
    relations: BTreeMap<String, BitMatrix>,
    unary: BTreeMap<String, Bitset>,
    equivalences: BTreeMap<String, Partition>,
    constants: BTreeMap<String, usize>,
    parts: BTreeMap<String, Vec<usize>>,
    seed: Option<u64>,
}

impl FiniteStructure {
    pub fn new(n: usize) -> Self {
        FiniteStructure {
            n,
            relations: BTreeMap::new(),
            unary: BTreeMap::new(),
            equivalences: BTreeMap::new(),
            constants: BTreeMap::new(),
            parts: BTreeMap::new(),
            seed: None,
        }
    }

    pub fn from_graph(g: &Graph, rel: &str) -> Self {
        let mut s = FiniteStructure::new(g.n());
        s.ensure_relation(rel);
        for (u, v) in g.edges() {
            s.add_edge(rel, u, v);
        }
        s
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn ensure_relation(&mut self, name: &str) {
        let n = self.n;
        self.relations
            .entry(name.to_owned())
            .or_insert_with(|| BitMatrix::new(n));
    }

    /// Internal fast path; panics on misuse. Loaders go through
    /// `try_add_edge`.
    pub fn add_edge(&mut self, rel: &str, u: usize, v: usize) {
        self.relations
            .get_mut(rel)
            .expect("relation declared")
            .set_edge(u, v);
    }

    pub fn try_add_edge(&mut self, rel: &str, u: usize, v: usize) -> Result<(), StructureError> {
        if u >= self.n || v >= self.n {
            return Err(StructureError::OutOfRange {
                what: "edge endpoint",
                index: u.max(v),
                n: self.n,
            });
        }
        if u == v {
            return Err(StructureError::LoopEdge { v });
        }
        self.ensure_relation(rel);
        self.add_edge(rel, u, v);
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Option<&BitMatrix> {
        self.relations.get(name)
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    pub fn rel_edge(&self, rel: &str, u: usize, v: usize) -> bool {
        self.relations
            .get(rel)
            .map(|m| m.has_edge(u, v))
            .unwrap_or(false)
    }

    pub fn set_unary(&mut self, name: &str, members: &[usize]) {
        self.unary
            .insert(name.to_owned(), Bitset::from_iter_len(self.n, members.iter().copied()));
    }

    pub fn unary(&self, name: &str) -> Option<&Bitset> {
        self.unary.get(name)
    }

    pub fn unary_names(&self) -> impl Iterator<Item = &str> {
        self.unary.keys().map(String::as_str)
    }

    pub fn unary_holds(&self, name: &str, x: usize) -> bool {
        self.unary.get(name).map(|b| b.contains(x)).unwrap_or(false)
    }

    pub fn set_equivalence(
        &mut self,
        name: &str,
        classes: Vec<Vec<usize>>,
    ) -> Result<(), StructureError> {
        let p = Partition::from_classes(self.n, classes).map_err(|reason| {
            StructureError::InvalidPartition {
                name: name.to_owned(),
                reason,
            }
        })?;
        self.equivalences.insert(name.to_owned(), p);
        Ok(())
    }

    pub fn equivalence(&self, name: &str) -> Option<&Partition> {
        self.equivalences.get(name)
    }

    pub fn equivalence_names(&self) -> impl Iterator<Item = &str> {
        self.equivalences.keys().map(String::as_str)
    }

    pub fn same_class(&self, name: &str, x: usize, y: usize) -> bool {
        self.equivalences
            .get(name)
            .map(|p| p.same_class(x, y))
            .unwrap_or(false)
    }

    pub fn set_constant(&mut self, name: &str, v: usize) -> Result<(), StructureError> {
        if v >= self.n {
            return Err(StructureError::OutOfRange {
                what: "constant",
                index: v,
                n: self.n,
            });
        }
        self.constants.insert(name.to_owned(), v);
        Ok(())
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, usize)> {
        self.constants.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn set_part(&mut self, label: &str, members: Vec<usize>) {
        self.parts.insert(label.to_owned(), members);
    }

    pub fn part(&self, label: &str) -> Option<&[usize]> {
        self.parts.get(label).map(Vec::as_slice)
    }

    pub fn part_labels(&self) -> impl Iterator<Item = &str> {
        self.parts.keys().map(String::as_str)
    }

    pub fn push_to_part(&mut self, label: &str, v: usize) {
        self.parts.entry(label.to_owned()).or_default().push(v);
    }

    pub fn to_graph(&self, rel: &str) -> Result<Graph, StructureError> {
        let m = self
            .relations
            .get(rel)
            .ok_or_else(|| StructureError::MissingSymbol {
                formula: "graph view".to_owned(),
                symbol: rel.to_owned(),
            })?;
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            for v in m.row(u).iter() {
                if v > u {
                    g.add_edge(u, v);
                }
            }
        }
        Ok(g)
    }

    /// Appends one fresh element with no memberships. Equivalences would
    /// stop covering the universe, so growth is refused while any exist.
    pub fn grow_one(&mut self) -> usize {
        assert!(
            self.equivalences.is_empty(),
            "cannot grow a structure carrying equivalences"
        );
        let v = self.n;
        self.n += 1;
        for m in self.relations.values_mut() {
            m.grow(self.n);
        }
        for b in self.unary.values_mut() {
            *b = Bitset::from_iter_len(self.n, b.iter());
        }
        v
    }

    /// Full invariant sweep, for structures assembled from external data.
    /// Relation symmetry and loop-freeness hold by construction of
    /// BitMatrix; parts, constants, and partitions are re-checked.
    pub fn validate(&self) -> Result<(), StructureError> {
        for (_, &v) in self.constants.iter() {
            if v >= self.n {
                return Err(StructureError::OutOfRange {
                    what: "constant",
                    index: v,
                    n: self.n,
                });
            }
        }
        for members in self.parts.values() {
            for &v in members {
                if v >= self.n {
                    return Err(StructureError::OutOfRange {
                        what: "part member",
                        index: v,
                        n: self.n,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A formula φ(x̄; ȳ) with fixed object and parameter arities, evaluated
/// against a structure. `validate` checks symbol requirements once;
/// `eval` assumes they passed.
pub trait Formula {
    fn name(&self) -> &str;
    /// ℓ(x): arity of the witness tuple.
    fn object_arity(&self) -> usize;
    /// ℓ(y): arity of one parameter tuple.
    fn parameter_arity(&self) -> usize;
    fn validate(&self, s: &FiniteStructure) -> Result<(), StructureError>;
    fn eval(&self, s: &FiniteStructure, x: &[usize], y: &[usize]) -> bool;
}

fn need_relation(formula: &str, s: &FiniteStructure, rel: &str) -> Result<(), StructureError> {
    if s.relation(rel).is_none() {
        return Err(StructureError::MissingSymbol {
            formula: formula.to_owned(),
            symbol: rel.to_owned(),
        });
    }
    Ok(())
}

fn need_constant(formula: &str, s: &FiniteStructure, name: &str) -> Result<(), StructureError> {
    if s.constant(name).is_none() {
        return Err(StructureError::MissingSymbol {
            formula: formula.to_owned(),
            symbol: format!("constant {name}"),
        });
    }
    Ok(())
}

struct EdgeFormula;

impl Formula for EdgeFormula {
    fn name(&self) -> &str {
        "edge"
    }
    fn object_arity(&self) -> usize {
        1
    }
    fn parameter_arity(&self) -> usize {
        1
    }
    fn validate(&self, s: &FiniteStructure) -> Result<(), StructureError> {
        need_relation("edge", s, "R")
    }
    fn eval(&self, s: &FiniteStructure, x: &[usize], y: &[usize]) -> bool {
        s.rel_edge("R", x[0], y[0])
    }
}

struct CommonNeighbor;

impl Formula for CommonNeighbor {
    fn name(&self) -> &str {
        "common-neighbor"
    }
    fn object_arity(&self) -> usize {
        1
    }
    fn parameter_arity(&self) -> usize {
        2
    }
    fn validate(&self, s: &FiniteStructure) -> Result<(), StructureError> {
        need_relation("common-neighbor", s, "R")
    }
    fn eval(&self, s: &FiniteStructure, x: &[usize], y: &[usize]) -> bool {
        s.rel_edge("R", x[0], y[0]) && s.rel_edge("R", x[0], y[1])
    }
}

/// ψ(x; y, z): x = y when z is the constant 0, xRy otherwise.
struct SemiCompatiblePsi;

impl Formula for SemiCompatiblePsi {
    fn name(&self) -> &str {
        "semi-compatible-psi"
    }
    fn object_arity(&self) -> usize {
        1
    }
    fn parameter_arity(&self) -> usize {
        2
    }
    fn validate(&self, s: &FiniteStructure) -> Result<(), StructureError> {
        need_relation("semi-compatible-psi", s, "R")?;
        need_constant("semi-compatible-psi", s, "0")
    }
    fn eval(&self, s: &FiniteStructure, x: &[usize], y: &[usize]) -> bool {
        if y[1] == s.constant("0").expect("validated") {
            x[0] == y[0]
        } else {
            s.rel_edge("R", x[0], y[0])
        }
    }
}

/// ψ(x; y, z): E(x,y) ∧ P(x) when z is the constant 0, F(x,y) ∧ P(x)
/// otherwise. The predicate falls on the witness: only then does picking
/// a_i, b_j with all-P intersection cells order the pairs.
struct CrosscutPsi;

impl Formula for CrosscutPsi {
    fn name(&self) -> &str {
        "crosscut-psi"
    }
    fn object_arity(&self) -> usize {
        1
    }
    fn parameter_arity(&self) -> usize {
        2
    }
    fn validate(&self, s: &FiniteStructure) -> Result<(), StructureError> {
        for eq in ["E", "F"] {
            if s.equivalence(eq).is_none() {
                return Err(StructureError::MissingSymbol {
                    formula: "crosscut-psi".to_owned(),
                    symbol: format!("equivalence {eq}"),
                });
            }
        }
        if s.unary("P").is_none() {
            return Err(StructureError::MissingSymbol {
                formula: "crosscut-psi".to_owned(),
                symbol: "unary P".to_owned(),
            });
        }
        need_constant("crosscut-psi", s, "0")
    }
    fn eval(&self, s: &FiniteStructure, x: &[usize], y: &[usize]) -> bool {
        let which = if y[1] == s.constant("0").expect("validated") {
            "E"
        } else {
            "F"
        };
        s.same_class(which, x[0], y[0]) && s.unary_holds("P", x[0])
    }
}

/// ρ(x; y, z) = ¬(xRy) ∧ (xRz): over an ordered witness row this carves
/// the half-open interval [y, z).
struct StrictOrderRho;

impl Formula for StrictOrderRho {
    fn name(&self) -> &str {
        "strict-order-rho"
    }
    fn object_arity(&self) -> usize {
        1
    }
    fn parameter_arity(&self) -> usize {
        2
    }
    fn validate(&self, s: &FiniteStructure) -> Result<(), StructureError> {
        need_relation("strict-order-rho", s, "R")
    }
    fn eval(&self, s: &FiniteStructure, x: &[usize], y: &[usize]) -> bool {
        !s.rel_edge("R", x[0], y[0]) && s.rel_edge("R", x[0], y[1])
    }
}

pub const BUILTIN_FORMULAS: [&str; 5] = [
    "edge",
    "common-neighbor",
    "semi-compatible-psi",
    "crosscut-psi",
    "strict-order-rho",
];

pub fn builtin_formula(name: &str) -> Result<Box<dyn Formula>, StructureError> {
    match name {
        "edge" => Ok(Box::new(EdgeFormula)),
        "common-neighbor" => Ok(Box::new(CommonNeighbor)),
        "semi-compatible-psi" => Ok(Box::new(SemiCompatiblePsi)),
        "crosscut-psi" => Ok(Box::new(CrosscutPsi)),
        "strict-order-rho" => Ok(Box::new(StrictOrderRho)),
        other => Err(StructureError::UnknownFormula(other.to_owned())),
    }
}

fn set_default_constants(s: &mut FiniteStructure) {
    if s.universe_size() >= 1 {
        s.set_constant("0", 0).expect("in range");
    }
    if s.universe_size() >= 2 {
        s.set_constant("1", 1).expect("in range");
    }
}

/// G(n, p) with exact rational p: per unordered pair, one 64-bit draw
/// against round(p·2^64).
pub fn gen_random_graph(n: usize, edge_prob: Rat, seed: u64) -> Result<FiniteStructure, StructureError> {
    if n == 0 {
        return Err(StructureError::Parameter("universe must be nonempty".to_owned()));
    }
    if edge_prob < rat_zero() || edge_prob > rat_one() {
        return Err(StructureError::Parameter(format!(
            "edge probability {}/{} outside [0,1]",
            edge_prob.numer(),
            edge_prob.denom()
        )));
    }
    let threshold = prob_threshold(*edge_prob.numer() as u64, *edge_prob.denom() as u64);
    let mut rng = SeededRng::new(seed);
    let mut s = FiniteStructure::new(n);
    s.set_seed(seed);
    s.ensure_relation("R");
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.coin(threshold) {
                s.add_edge("R", u, v);
            }
        }
    }
    set_default_constants(&mut s);
    Ok(s)
}

pub const TFRG_UNIVERSE_CAP: usize = 5000;

/// Per-part sizes after each stage: s₀ = 1 and
/// s_{i+1} = s_i + 2·Σ_{t=1..cap} C(s_i, t) + 1 (the two opposite parts
/// contribute their small subsets; ∅ gets a single element per part).
/// Saturates at u64::MAX.
pub fn tfrg_stage_sizes(stages: usize, subset_cap: usize) -> Vec<u64> {
    let mut sizes = vec![1u64];
    for _ in 0..stages {
        let s = *sizes.last().expect("nonempty");
        let mut new_elems: u64 = 1;
        for t in 1..=subset_cap as u64 {
            let c = binomial(s, t);
            new_elems = new_elems.saturating_add(c.saturating_mul(2));
        }
        sizes.push(s.saturating_add(new_elems));
    }
    sizes
}

const TFRG_PART_LABELS: [&str; 3] = ["X", "Y", "Z"];

pub fn gen_tfrg_staged(stages: usize, subset_cap: usize) -> Result<FiniteStructure, StructureError> {
    gen_tfrg_staged_capped(stages, subset_cap, TFRG_UNIVERSE_CAP)
}

/// Three parts grown in lockstep. A stage-(i+1) element of X picks one
/// size ≤ cap subset τ of the stage-i snapshot of Y, or of Z, and is
/// adjacent exactly to τ; parts stay internally R-free. Every element's
/// creation neighborhood lies in a single opposite part, so the result
/// is triangle-free.
pub fn gen_tfrg_staged_capped(
    stages: usize,
    subset_cap: usize,
    universe_cap: usize,
) -> Result<FiniteStructure, StructureError> {
    if subset_cap == 0 {
        return Err(StructureError::Parameter("subset_cap must be ≥ 1".to_owned()));
    }
    let sizes = tfrg_stage_sizes(stages, subset_cap);
    for (stage, &s) in sizes.iter().enumerate() {
        let needed = s.saturating_mul(3);
        if needed > universe_cap as u64 {
            return Err(StructureError::Capacity {
                stage,
                needed: needed.min(usize::MAX as u64) as usize,
                cap: universe_cap,
            });
        }
    }
    let final_n = (sizes[stages] * 3) as usize;

    let mut s = FiniteStructure::new(final_n);
    s.ensure_relation("R");
    // members[p] = current elements of part p, in creation order
    let mut members: [Vec<usize>; 3] = [vec![0], vec![1], vec![2]];
    for (p, label) in TFRG_PART_LABELS.iter().enumerate() {
        s.set_part(label, members[p].clone());
        s.set_part(&format!("{label}0"), members[p].clone());
    }
    let mut next = 3usize;
    for stage in 1..=stages {
        let snapshot = members.clone();
        for p in 0..3 {
            let mut added: Vec<usize> = Vec::new();
            // one element for the empty pattern, counted once per part
            added.push(next);
            next += 1;
            let opposite = [(p + 1) % 3, (p + 2) % 3];
            let mut opp_sorted = opposite;
            opp_sorted.sort_unstable();
            for &src in &opp_sorted {
                let pool = &snapshot[src];
                for size in 1..=subset_cap.min(pool.len()) {
                    for_each_combination(
                        pool.len(),
                        size,
                        &mut |_| {},
                        &mut |_| {},
                        &mut |combo| {
                            let x = next;
                            next += 1;
                            added.push(x);
                            for &slot in combo {
                                s.add_edge("R", x, pool[slot]);
                            }
                            true
                        },
                    );
                }
            }
            s.set_part(&format!("{}{stage}", TFRG_PART_LABELS[p]), added.clone());
            members[p].extend_from_slice(&added);
        }
        for (p, label) in TFRG_PART_LABELS.iter().enumerate() {
            s.set_part(label, members[p].clone());
        }
    }
    debug_assert_eq!(next, final_n);
    set_default_constants(&mut s);
    Ok(s)
}

/// E_classes × F_classes cells of cell_size elements. P is constant per
/// cell, assigned by a per-F-class threshold on the E-index; the seeded
/// shuffle of thresholds keeps every initial segment 0..t represented,
/// which is what makes ordered half-graph cell patterns findable.
pub fn gen_crosscutting(
    e_classes: usize,
    f_classes: usize,
    cell_size: usize,
    seed: u64,
) -> Result<FiniteStructure, StructureError> {
    if e_classes < 2 || f_classes < 2 {
        return Err(StructureError::Parameter(
            "need at least two classes per equivalence".to_owned(),
        ));
    }
    if cell_size < 1 {
        return Err(StructureError::Parameter("cell_size must be ≥ 1".to_owned()));
    }
    let n = e_classes * f_classes * cell_size;
    let mut s = FiniteStructure::new(n);
    s.set_seed(seed);
    let idx = |e: usize, f: usize, c: usize| (e * f_classes + f) * cell_size + c;

    let mut e_parts: Vec<Vec<usize>> = vec![Vec::new(); e_classes];
    let mut f_parts: Vec<Vec<usize>> = vec![Vec::new(); f_classes];
    for e in 0..e_classes {
        for f in 0..f_classes {
            for c in 0..cell_size {
                e_parts[e].push(idx(e, f, c));
                f_parts[f].push(idx(e, f, c));
            }
        }
    }
    s.set_equivalence("E", e_parts).expect("disjoint covering");
    s.set_equivalence("F", f_parts).expect("disjoint covering");

    let mut thresholds: Vec<usize> = (0..f_classes).map(|f| f % (e_classes + 1)).collect();
    SeededRng::new(seed).shuffle(&mut thresholds);
    let mut p_members: Vec<usize> = Vec::new();
    for (f, &t) in thresholds.iter().enumerate() {
        for e in 0..t.min(e_classes) {
            for c in 0..cell_size {
                p_members.push(idx(e, f, c));
            }
        }
    }
    s.set_unary("P", &p_members);
    set_default_constants(&mut s);
    Ok(s)
}

/// 2k vertices a_1..a_k (indices 0..k) and b_1..b_k (indices k..2k),
/// R(a_i, b_j) iff i < j, rows internally empty.
pub fn gen_half_graph(k: usize) -> Result<FiniteStructure, StructureError> {
    if k == 0 {
        return Err(StructureError::Parameter("k must be ≥ 1".to_owned()));
    }
    let mut s = FiniteStructure::new(2 * k);
    s.ensure_relation("R");
    for i in 1..=k {
        for j in (i + 1)..=k {
            s.add_edge("R", i - 1, k + j - 1);
        }
    }
    s.set_part("A", (0..k).collect());
    s.set_part("B", (k..2 * k).collect());
    set_default_constants(&mut s);
    Ok(s)
}

/// Order-witness structure: parts A = a_1..a_m, B = b_1..b_m and
/// W = w_0..w_m with w_t R a_i ⟺ i ≤ t and w_t R b_j ⟺ j > t.
/// The satisfier set of a_i under the edge formula is {w_t : t ≥ i},
/// of b_j is {w_t : t < j}; mixed intersections are nonempty exactly
/// when every a-index precedes every b-index.
pub fn gen_staircase(m: usize) -> Result<FiniteStructure, StructureError> {
    if m == 0 {
        return Err(StructureError::Parameter("m must be ≥ 1".to_owned()));
    }
    let mut s = FiniteStructure::new(2 * m + (m + 1));
    s.ensure_relation("R");
    let a = |i: usize| i - 1;
    let b = |j: usize| m + j - 1;
    let w = |t: usize| 2 * m + t;
    for t in 0..=m {
        for i in 1..=m {
            if i <= t {
                s.add_edge("R", w(t), a(i));
            } else {
                s.add_edge("R", w(t), b(i));
            }
        }
    }
    s.set_part("A", (1..=m).map(a).collect());
    s.set_part("B", (1..=m).map(b).collect());
    s.set_part("W", (0..=m).map(w).collect());
    set_default_constants(&mut s);
    Ok(s)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TfrgPart {
    X,
    Y,
    Z,
}

impl TfrgPart {
    pub fn label(self) -> &'static str {
        match self {
            TfrgPart::X => "X",
            TfrgPart::Y => "Y",
            TfrgPart::Z => "Z",
        }
    }

    pub const ALL: [TfrgPart; 3] = [TfrgPart::X, TfrgPart::Y, TfrgPart::Z];
}

/// A staged triangle-free structure opened for extension: missing
/// adjacency patterns are realized on demand by fresh elements, the
/// finite stand-in for running the staged construction further.
pub struct TfrgLab {
    s: FiniteStructure,
    part_of: BTreeMap<usize, TfrgPart>,
}

impl TfrgLab {
    pub fn new(stages: usize, subset_cap: usize) -> Result<Self, StructureError> {
        let s = gen_tfrg_staged(stages, subset_cap)?;
        Ok(Self::wrap(s))
    }

    fn wrap(s: FiniteStructure) -> Self {
        let mut part_of = BTreeMap::new();
        for p in TfrgPart::ALL {
            for &v in s.part(p.label()).expect("tfrg parts") {
                part_of.insert(v, p);
            }
        }
        TfrgLab { s, part_of }
    }

    pub fn structure(&self) -> &FiniteStructure {
        &self.s
    }

    pub fn into_structure(self) -> FiniteStructure {
        self.s
    }

    pub fn part_of(&self, v: usize) -> Option<TfrgPart> {
        self.part_of.get(&v).copied()
    }

    pub fn part_members(&self, p: TfrgPart) -> &[usize] {
        self.s.part(p.label()).expect("tfrg parts")
    }

    fn check_pattern(
        &self,
        part: TfrgPart,
        eta: &[usize],
        nu: &[usize],
    ) -> Result<(), StructureError> {
        for &v in eta.iter().chain(nu) {
            if v >= self.s.universe_size() {
                return Err(StructureError::OutOfRange {
                    what: "pattern element",
                    index: v,
                    n: self.s.universe_size(),
                });
            }
        }
        if eta.iter().any(|v| nu.contains(v)) {
            return Err(StructureError::PatternConflict(
                "positive and negative patterns overlap".to_owned(),
            ));
        }
        if eta.iter().any(|&v| self.part_of(v) == Some(part)) {
            return Err(StructureError::PatternConflict(format!(
                "positive pattern touches target part {}",
                part.label()
            )));
        }
        for (ai, &u) in eta.iter().enumerate() {
            for &v in eta.iter().skip(ai + 1) {
                if self.s.rel_edge("R", u, v) {
                    return Err(StructureError::PatternConflict(format!(
                        "positive pattern spans edge {u}-{v}, a witness would close a triangle"
                    )));
                }
            }
        }
        Ok(())
    }

    /// An element of `part` adjacent to all of `eta` and none of `nu`:
    /// reused when present, otherwise freshly added adjacent to exactly
    /// `eta`. Adding keeps parts internally empty and the structure
    /// triangle-free (`eta` is checked to be independent).
    pub fn realize(
        &mut self,
        part: TfrgPart,
        eta: &[usize],
        nu: &[usize],
    ) -> Result<usize, StructureError> {
        self.realize_avoiding(part, eta, nu, &[])
    }

    /// realize, but never returning a member of `exclude`; a fresh
    /// element is grown when every remaining candidate is excluded.
    pub fn realize_avoiding(
        &mut self,
        part: TfrgPart,
        eta: &[usize],
        nu: &[usize],
        exclude: &[usize],
    ) -> Result<usize, StructureError> {
        self.check_pattern(part, eta, nu)?;
        for &x in self.part_members(part) {
            if exclude.contains(&x) {
                continue;
            }
            let row = self.s.relation("R").expect("R").row(x);
            if eta.iter().all(|&e| row.contains(e)) && !nu.iter().any(|&v| row.contains(v)) {
                return Ok(x);
            }
        }
        let x = self.s.grow_one();
        for &e in eta {
            self.s.add_edge("R", x, e);
        }
        self.s.push_to_part(part.label(), x);
        self.s.push_to_part(&format!("{}ext", part.label()), x);
        self.part_of.insert(x, part);
        Ok(x)
    }

    /// Fresh rows a_1..a_len in X and b_1..b_len in Y with
    /// a_i R b_j ⟺ j ≤ i and no other edges: an order pattern with
    /// internally empty rows. Returns (a-row, b-row), 1-based order.
    pub fn add_staircase_rows(&mut self, len: usize) -> (Vec<usize>, Vec<usize>) {
        let mut a_row = Vec::with_capacity(len);
        let mut b_row = Vec::with_capacity(len);
        for _ in 0..len {
            let v = self.s.grow_one();
            self.s.push_to_part("X", v);
            self.s.push_to_part("Xext", v);
            self.part_of.insert(v, TfrgPart::X);
            a_row.push(v);
        }
        for _ in 0..len {
            let v = self.s.grow_one();
            self.s.push_to_part("Y", v);
            self.s.push_to_part("Yext", v);
            self.part_of.insert(v, TfrgPart::Y);
            b_row.push(v);
        }
        for (i, &av) in a_row.iter().enumerate() {
            for (j, &bv) in b_row.iter().enumerate() {
                if j <= i {
                    self.s.add_edge("R", av, bv);
                }
            }
        }
        (a_row, b_row)
    }

    /// For every union U of ≤ n_max pool tuples that is R-independent and
    /// avoids at least one part, ensures a witness adjacent to all of U
    /// exists in such a part. Afterwards, over this pool, "some element is
    /// adjacent to every entry" holds exactly for independent unions.
    /// Returns the number of elements added.
    pub fn saturate_pool_unions(
        &mut self,
        tuples: &[Vec<usize>],
        n_max: usize,
    ) -> Result<usize, StructureError> {
        let mut added = 0usize;
        let k = tuples.len();
        for size in 1..=n_max.min(k) {
            let mut selections: Vec<Vec<usize>> = Vec::new();
            for_each_combination(
                k,
                size,
                &mut |_| {},
                &mut |_| {},
                &mut |combo| {
                    selections.push(combo.to_vec());
                    true
                },
            );
            for sel in selections {
                let mut union: Vec<usize> = sel
                    .iter()
                    .flat_map(|&t| tuples[t].iter().copied())
                    .collect();
                union.sort_unstable();
                union.dedup();
                let independent = union.iter().enumerate().all(|(ui, &u)| {
                    union[ui + 1..].iter().all(|&v| !self.s.rel_edge("R", u, v))
                });
                if !independent {
                    continue;
                }
                let host = TfrgPart::ALL
                    .into_iter()
                    .find(|&p| union.iter().all(|&v| self.part_of(v) != Some(p)));
                let Some(host) = host else { continue };
                let before = self.s.universe_size();
                self.realize(host, &union, &[])?;
                if self.s.universe_size() > before {
                    added += 1;
                }
            }
        }
        Ok(added)
    }
}
