//! Order configurations on relations and characteristic sequences:
//! half-graph fragments, the compatible and empty order properties,
//! pattern realization, and the translations between the compatible
//! order property and three-way rigidity (chain formulas φ, ψ whose
//! joint and crossed instances must be unrealizable).
//!
//! "Contradictory" here always means "no realizer in this structure":
//! finite semantics cannot certify more, and every verdict that uses
//! the notion is relative to the searched candidate space.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{for_each_multiset, Bitset};
use crate::charseq::{CharSeq, CharSeqError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OrderPropsError {
    Parameter(String),
    CharSeq(CharSeqError),
    RangeNotCovered {
        need_lo: i64,
        need_hi: i64,
        have_lo: i64,
        have_hi: i64,
    },
    /// the single-pair ordering ∃x ρ(x;c_i,c_j) ⟺ i<j failed at (i,j)
    HypothesisOne { i: i64, j: i64, holds: bool },
    /// a joint selection broke the interval rule (positive ⟺ every
    /// first index below every second index)
    HypothesisTwo {
        selection: Vec<(i64, i64)>,
        expected: bool,
    },
    ArityMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

impl From<CharSeqError> for OrderPropsError {
    fn from(e: CharSeqError) -> Self {
        OrderPropsError::CharSeq(e)
    }
}

impl core::fmt::Display for OrderPropsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OrderPropsError::Parameter(s) => write!(f, "{s}"),
            OrderPropsError::CharSeq(e) => write!(f, "{e}"),
            OrderPropsError::RangeNotCovered {
                need_lo,
                need_hi,
                have_lo,
                have_hi,
            } => write!(
                f,
                "need base indices [{need_lo}, {need_hi}], have [{have_lo}, {have_hi}]"
            ),
            OrderPropsError::HypothesisOne { i, j, holds } => write!(
                f,
                "single-pair ordering fails at ({i}, {j}): consistency is {holds}, index order says {}",
                i < j
            ),
            OrderPropsError::HypothesisTwo {
                selection,
                expected,
            } => write!(
                f,
                "joint selection {selection:?} should be {}consistent",
                if *expected { "" } else { "in" }
            ),
            OrderPropsError::ArityMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected arity {expected}, got {got}"),
        }
    }
}

impl core::error::Error for OrderPropsError {}

// ---------------------------------------------------------------- half graphs

/// Rows a_1..a_k, b_1..b_k of distinct vertices with R(a_i, b_j) ⟺ i<j.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HalfGraphFragment {
    pub a_seq: Vec<usize>,
    pub b_seq: Vec<usize>,
}

impl HalfGraphFragment {
    pub fn len(&self) -> usize {
        self.a_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_seq.is_empty()
    }
}

/// Exhaustive re-check of the defining biconditional plus distinctness.
pub fn validate_half_graph(
    rel: &dyn Fn(usize, usize) -> bool,
    frag: &HalfGraphFragment,
) -> bool {
    let k = frag.a_seq.len();
    if frag.b_seq.len() != k {
        return false;
    }
    let mut all: Vec<usize> = frag.a_seq.iter().chain(&frag.b_seq).copied().collect();
    all.sort_unstable();
    all.dedup();
    if all.len() != 2 * k {
        return false;
    }
    for i in 0..k {
        for j in 0..k {
            if rel(frag.a_seq[i], frag.b_seq[j]) != (i < j) {
                return false;
            }
        }
    }
    true
}

pub const HALF_GRAPH_EXACT_UNIVERSE: usize = 24;
pub const HALF_GRAPH_EXACT_K: usize = 8;
const HALF_GRAPH_RESTARTS: usize = 32;

struct HgSearch<'a> {
    n: usize,
    rel: &'a dyn Fn(usize, usize) -> bool,
    k: usize,
    a: Vec<usize>,
    b: Vec<usize>,
}

impl HgSearch<'_> {
    // fut_a: still usable as a future a (not related to any chosen b);
    // fut_b: still usable as a future b (related to every chosen a).
    fn extend(&mut self, fut_a: &Bitset, fut_b: &Bitset) -> bool {
        let t = self.a.len();
        if t == self.k {
            return true;
        }
        let left = self.k - t;
        if fut_a.count() < left || fut_b.count() < left {
            return false;
        }
        for av in fut_a.iter() {
            for bv in fut_b.iter() {
                if bv == av || (self.rel)(av, bv) {
                    continue;
                }
                let mut na = Bitset::new(self.n);
                for v in fut_a.iter() {
                    if v != av && v != bv && !(self.rel)(v, bv) {
                        na.insert(v);
                    }
                }
                let mut nb = Bitset::new(self.n);
                for v in fut_b.iter() {
                    if v != av && v != bv && (self.rel)(av, v) {
                        nb.insert(v);
                    }
                }
                self.a.push(av);
                self.b.push(bv);
                if self.extend(&na, &nb) {
                    return true;
                }
                self.a.pop();
                self.b.pop();
            }
        }
        false
    }
}

/// Length-k fragment on which rel behaves like a half graph, or none.
/// Exact backtracking under the size caps; degree-sorted greedy with
/// seeded restarts beyond. Either way the result re-validates.
pub fn find_half_graph(
    n: usize,
    rel: &dyn Fn(usize, usize) -> bool,
    k: usize,
    seed: u64,
) -> Option<HalfGraphFragment> {
    if k == 0 || 2 * k > n {
        return None;
    }
    if n <= HALF_GRAPH_EXACT_UNIVERSE && k <= HALF_GRAPH_EXACT_K {
        let mut s = HgSearch {
            n,
            rel,
            k,
            a: Vec::with_capacity(k),
            b: Vec::with_capacity(k),
        };
        let full = Bitset::full(n);
        if s.extend(&full, &full) {
            let frag = HalfGraphFragment { a_seq: s.a, b_seq: s.b };
            debug_assert!(validate_half_graph(rel, &frag));
            return Some(frag);
        }
        return None;
    }
    // heuristic: half graphs concentrate on degree-sorted orders, so
    // seed each restart with a degree-descending, seed-perturbed order
    // and grow pairs greedily with a one-step feasibility check
    let mut rng = crate::rng::SeededRng::new(seed);
    let degree: Vec<usize> = (0..n)
        .map(|v| (0..n).filter(|&u| rel(v, u)).count())
        .collect();
    for _ in 0..HALF_GRAPH_RESTARTS {
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        order.sort_by_key(|&v| usize::MAX - degree[v]);
        let mut fut_a = Bitset::full(n);
        let mut fut_b = Bitset::full(n);
        let mut a = Vec::with_capacity(k);
        let mut b = Vec::with_capacity(k);
        'grow: while a.len() < k {
            let left = k - a.len();
            for &av in order.iter().filter(|&&v| fut_a.contains(v)) {
                for &bv in order.iter().filter(|&&v| fut_b.contains(v)) {
                    if bv == av || rel(av, bv) {
                        continue;
                    }
                    let mut na = Bitset::new(n);
                    for v in fut_a.iter() {
                        if v != av && v != bv && !rel(v, bv) {
                            na.insert(v);
                        }
                    }
                    let mut nb = Bitset::new(n);
                    for v in fut_b.iter() {
                        if v != av && v != bv && rel(av, v) {
                            nb.insert(v);
                        }
                    }
                    if na.count() >= left - 1 && nb.count() >= left - 1 {
                        a.push(av);
                        b.push(bv);
                        fut_a = na;
                        fut_b = nb;
                        continue 'grow;
                    }
                }
            }
            break;
        }
        if a.len() == k {
            let frag = HalfGraphFragment { a_seq: a, b_seq: b };
            if validate_half_graph(rel, &frag) {
                return Some(frag);
            }
        }
    }
    None
}

// --------------------------------------------------- compatible order property

/// Two rows of parameter tuples indexed into a CharSeq pool, each tuple
/// remembered with the signed base indices it was built from (audit
/// trail for the interval construction; (0,0) when built by hand).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CopFragment {
    pub a_pairs: Vec<(i64, i64)>,
    pub b_pairs: Vec<(i64, i64)>,
    pub a_tuples: Vec<usize>,
    pub b_tuples: Vec<usize>,
}

impl CopFragment {
    pub fn len(&self) -> usize {
        self.a_tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_tuples.is_empty()
    }
}

/// 1-based fragment indices of a violating selection.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CopViolation {
    pub a_indices: Vec<usize>,
    pub b_indices: Vec<usize>,
    pub expected: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CopVerdict {
    pub holds: bool,
    pub violation: Option<CopViolation>,
    pub shortcut: bool,
}

/// Joint positivity ⟺ every chosen a-index precedes every chosen
/// b-index, over all selections with repetition of total even size up
/// to 2·depth. Row-only selections must be positive (empty side of the
/// comparison is vacuous). With `support2` set (caller has passed the
/// support-2 check) only the pairwise facts are consulted.
pub fn verify_cop(
    cs: &CharSeq<'_>,
    frag: &CopFragment,
    depth: usize,
    support2: bool,
) -> Result<CopVerdict, OrderPropsError> {
    let n = frag.len();
    if frag.b_tuples.len() != n || frag.a_pairs.len() != n || frag.b_pairs.len() != n {
        return Err(OrderPropsError::Parameter(
            "fragment rows must have equal length".into(),
        ));
    }
    if n == 0 || depth == 0 {
        return Err(OrderPropsError::Parameter(
            "need a nonempty fragment and depth ≥ 1".into(),
        ));
    }
    let needed_level = if support2 { 2 } else { 2 * depth };
    if needed_level > cs.max_level() {
        return Err(CharSeqError::LevelAboveMax {
            n: needed_level,
            max: cs.max_level(),
        }
        .into());
    }
    let fail = |a_idx: &[usize], b_idx: &[usize], expected: bool| CopVerdict {
        holds: false,
        violation: Some(CopViolation {
            a_indices: a_idx.iter().map(|i| i + 1).collect(),
            b_indices: b_idx.iter().map(|j| j + 1).collect(),
            expected,
        }),
        shortcut: support2,
    };
    if support2 {
        for i in 0..n {
            for j in i..n {
                if !cs.in_p2(frag.a_tuples[i], frag.a_tuples[j]) {
                    return Ok(fail(&[i, j], &[], true));
                }
                if !cs.in_p2(frag.b_tuples[i], frag.b_tuples[j]) {
                    return Ok(fail(&[], &[i, j], true));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let expected = i < j;
                if cs.in_p2(frag.a_tuples[i], frag.b_tuples[j]) != expected {
                    return Ok(fail(&[i], &[j], expected));
                }
            }
        }
        return Ok(CopVerdict {
            holds: true,
            violation: None,
            shortcut: true,
        });
    }
    for m in 1..=depth {
        for a_count in 0..=(2 * m) {
            let b_count = 2 * m - a_count;
            let mut result: Option<CopVerdict> = None;
            let mut a_sel_err: Option<CharSeqError> = None;
            // a_count 0 or b_count 0 contributes the single empty selection

            let a_multisets = collect_multisets(n, a_count);
            let b_multisets = collect_multisets(n, b_count);
            for a_idx in &a_multisets {
                for b_idx in &b_multisets {
                    let expected = match (a_idx.iter().max(), b_idx.iter().min()) {
                        (Some(&amax), Some(&bmin)) => amax < bmin,
                        _ => true,
                    };
                    let sel: Vec<usize> = a_idx
                        .iter()
                        .map(|&i| frag.a_tuples[i])
                        .chain(b_idx.iter().map(|&j| frag.b_tuples[j]))
                        .collect();
                    match cs.holds(&sel) {
                        Ok(got) => {
                            if got != expected {
                                result = Some(fail(a_idx, b_idx, expected));
                            }
                        }
                        Err(e) => a_sel_err = Some(e),
                    }
                    if result.is_some() || a_sel_err.is_some() {
                        break;
                    }
                }
                if result.is_some() || a_sel_err.is_some() {
                    break;
                }
            }
            if let Some(e) = a_sel_err {
                return Err(e.into());
            }
            if let Some(v) = result {
                return Ok(v);
            }
        }
    }
    Ok(CopVerdict {
        holds: true,
        violation: None,
        shortcut: false,
    })
}

fn collect_multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for_each_multiset(n, k, &mut |sel| {
        out.push(sel.to_vec());
        true
    });
    out
}

/// Signed-index window onto a pool of pairs over an ordered base
/// sequence: `pool_index(s, t)` locates the tuple built for base
/// positions (s, t).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrderedBase {
    pub lo: i64,
    pub hi: i64,
    index: Vec<usize>,
}

impl OrderedBase {
    pub fn pool_index(&self, s: i64, t: i64) -> Option<usize> {
        if s < self.lo || s > self.hi || t < self.lo || t > self.hi {
            return None;
        }
        let w = (self.hi - self.lo + 1) as usize;
        let si = (s - self.lo) as usize;
        let ti = (t - self.lo) as usize;
        Some(self.index[si * w + ti])
    }
}

/// Builds the full (s, t) pair pool over [lo, hi]² in row-major order,
/// mapping each signed index pair through `tuple_for`.
pub fn pair_grid(
    lo: i64,
    hi: i64,
    tuple_for: &mut dyn FnMut(i64, i64) -> Vec<usize>,
) -> (Vec<Vec<usize>>, OrderedBase) {
    assert!(lo <= hi, "empty base range");
    let w = (hi - lo + 1) as usize;
    let mut pool = Vec::with_capacity(w * w);
    let mut index = Vec::with_capacity(w * w);
    for s in lo..=hi {
        for t in lo..=hi {
            index.push(pool.len());
            pool.push(tuple_for(s, t));
        }
    }
    (pool, OrderedBase { lo, hi, index })
}

/// Nested-interval construction of a depth-n compatible order fragment
/// over a base sequence whose pairs behave like intervals: pair (s, t)
/// is consistent ⟺ s < t, and joint consistency ⟺ max of the first
/// indices < min of the second indices. Both facts are checked before
/// emission: the single-pair ordering over the whole window, the joint
/// rule over every selection (with repetition) of the emitted pairs up
/// to size 2n.
///
/// The a-row descends through right-shifted intervals (2i−1, 4n−2i+1);
/// the b-row ascends through centered ones. Taking the b-row's second
/// index at 2i (the symmetric choice) makes the comparison at equal row
/// positions degenerate, with both endpoints even, so positivity there
/// would hold non-strictly; the second index sits at 2i−1 instead,
/// which keeps the diagonal strict.
pub fn build_cop_from_ordered(
    cs: &CharSeq<'_>,
    base: &OrderedBase,
    n: usize,
) -> Result<CopFragment, OrderPropsError> {
    if n == 0 {
        return Err(OrderPropsError::Parameter("need n ≥ 1".into()));
    }
    let (need_lo, need_hi) = (-2 * n as i64, 4 * n as i64 - 1);
    if base.lo > need_lo || base.hi < need_hi {
        return Err(OrderPropsError::RangeNotCovered {
            need_lo,
            need_hi,
            have_lo: base.lo,
            have_hi: base.hi,
        });
    }
    if 2 * n > cs.max_level() {
        return Err(CharSeqError::LevelAboveMax {
            n: 2 * n,
            max: cs.max_level(),
        }
        .into());
    }
    for s in base.lo..=base.hi {
        for t in base.lo..=base.hi {
            let idx = base.pool_index(s, t).expect("window bounds checked");
            let holds = cs.in_p1(idx);
            if holds != (s < t) {
                return Err(OrderPropsError::HypothesisOne { i: s, j: t, holds });
            }
        }
    }
    let ni = n as i64;
    let a_pairs: Vec<(i64, i64)> = (1..=ni).map(|i| (2 * i - 1, 4 * ni - 2 * i + 1)).collect();
    let b_pairs: Vec<(i64, i64)> = (1..=ni).map(|j| (-2 * j, 2 * j - 1)).collect();
    let resolve = |pairs: &[(i64, i64)]| -> Vec<usize> {
        pairs
            .iter()
            .map(|&(s, t)| base.pool_index(s, t).expect("window bounds checked"))
            .collect()
    };
    let a_tuples = resolve(&a_pairs);
    let b_tuples = resolve(&b_pairs);
    let emitted: Vec<(i64, i64)> = a_pairs.iter().chain(&b_pairs).copied().collect();
    let emitted_tuples: Vec<usize> = a_tuples.iter().chain(&b_tuples).copied().collect();
    let mut violation: Option<OrderPropsError> = None;
    for size in 2..=(2 * n) {
        for_each_multiset(emitted.len(), size, &mut |sel| {
            let max_first = sel.iter().map(|&p| emitted[p].0).max().expect("size ≥ 2");
            let min_second = sel.iter().map(|&p| emitted[p].1).min().expect("size ≥ 2");
            let expected = max_first < min_second;
            let pool_sel: Vec<usize> = sel.iter().map(|&p| emitted_tuples[p]).collect();
            match cs.holds(&pool_sel) {
                Ok(got) if got == expected => true,
                Ok(_) => {
                    violation = Some(OrderPropsError::HypothesisTwo {
                        selection: sel.iter().map(|&p| emitted[p]).collect(),
                        expected,
                    });
                    false
                }
                Err(e) => {
                    violation = Some(e.into());
                    false
                }
            }
        });
        if violation.is_some() {
            break;
        }
    }
    if let Some(e) = violation {
        return Err(e);
    }
    Ok(CopFragment {
        a_pairs,
        b_pairs,
        a_tuples,
        b_tuples,
    })
}

// -------------------------------------------------------- empty order property

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Row {
    A,
    B,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EmptyOpIssue {
    /// cross pair at (1-based) row positions with the stated expectation
    CrossPair { i: usize, j: usize, expected: bool },
    /// a row selection that is jointly consistent but must not be
    RowPositive { row: Row, indices: Vec<usize> },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EmptyOpVerdict {
    pub holds: bool,
    /// both rows are shorter than n, so the row condition had nothing
    /// to check
    pub vacuous_rows: bool,
    pub issue: Option<EmptyOpIssue>,
}

/// Cross pairs must order the rows (P_2(a_i, b_j) ⟺ i<j) while each
/// row stays jointly inconsistent on every n distinct members.
pub fn verify_empty_op(
    cs: &CharSeq<'_>,
    a_seq: &[usize],
    b_seq: &[usize],
    n: usize,
) -> Result<EmptyOpVerdict, OrderPropsError> {
    if n < 1 {
        return Err(OrderPropsError::Parameter("need n ≥ 1".into()));
    }
    if n > cs.max_level() {
        return Err(CharSeqError::LevelAboveMax {
            n,
            max: cs.max_level(),
        }
        .into());
    }
    for (i, &a) in a_seq.iter().enumerate() {
        for (j, &b) in b_seq.iter().enumerate() {
            let expected = i < j;
            if cs.in_p2(a, b) != expected {
                return Ok(EmptyOpVerdict {
                    holds: false,
                    vacuous_rows: false,
                    issue: Some(EmptyOpIssue::CrossPair {
                        i: i + 1,
                        j: j + 1,
                        expected,
                    }),
                });
            }
        }
    }
    let mut row_issue: Option<EmptyOpIssue> = None;
    let mut row_err: Option<CharSeqError> = None;
    for (row, seq) in [(Row::A, a_seq), (Row::B, b_seq)] {
        if seq.len() < n || row_issue.is_some() || row_err.is_some() {
            continue;
        }
        crate::bits::for_each_combination(
            seq.len(),
            n,
            &mut |_| {},
            &mut |_| {},
            &mut |combo| {
                let sel: Vec<usize> = combo.iter().map(|&p| seq[p]).collect();
                match cs.holds(&sel) {
                    Ok(false) => true,
                    Ok(true) => {
                        row_issue = Some(EmptyOpIssue::RowPositive {
                            row,
                            indices: combo.iter().map(|&p| p + 1).collect(),
                        });
                        false
                    }
                    Err(e) => {
                        row_err = Some(e);
                        false
                    }
                }
            },
        );
    }
    if let Some(e) = row_err {
        return Err(e.into());
    }
    if let Some(issue) = row_issue {
        return Ok(EmptyOpVerdict {
            holds: false,
            vacuous_rows: false,
            issue: Some(issue),
        });
    }
    Ok(EmptyOpVerdict {
        holds: true,
        vacuous_rows: a_seq.len() < n && b_seq.len() < n,
        issue: None,
    })
}

// ---------------------------------------------------------- pattern realization

/// Lowest element related to every b at positions `eta` and to none at
/// positions `nu` (positions index into b_seq).
pub fn pattern_realization(
    n: usize,
    rel: &dyn Fn(usize, usize) -> bool,
    b_seq: &[usize],
    eta: &[usize],
    nu: &[usize],
) -> Result<Option<usize>, OrderPropsError> {
    if eta.iter().any(|p| nu.contains(p)) {
        return Err(OrderPropsError::Parameter(
            "positive and negative patterns must be disjoint".into(),
        ));
    }
    for &p in eta.iter().chain(nu) {
        if p >= b_seq.len() {
            return Err(OrderPropsError::Parameter(
                "pattern position outside the sequence".into(),
            ));
        }
    }
    Ok((0..n).find(|&x| {
        eta.iter().all(|&p| rel(x, b_seq[p])) && nu.iter().all(|&p| !rel(x, b_seq[p]))
    }))
}

/// Batch form: distinct elements c_0..c_{s−1}, disjoint from the base
/// row, with rel(c_i, b_j) ⟺ template(i, j) for all i, j < s.
pub fn template_realization(
    n: usize,
    rel: &dyn Fn(usize, usize) -> bool,
    b_seq: &[usize],
    template: &dyn Fn(usize, usize) -> bool,
    s: usize,
) -> Result<Option<Vec<usize>>, OrderPropsError> {
    if b_seq.len() < s {
        return Err(OrderPropsError::Parameter(
            "template larger than the base row".into(),
        ));
    }
    fn grow(
        n: usize,
        rel: &dyn Fn(usize, usize) -> bool,
        b_seq: &[usize],
        template: &dyn Fn(usize, usize) -> bool,
        s: usize,
        picked: &mut Vec<usize>,
    ) -> bool {
        if picked.len() == s {
            return true;
        }
        let i = picked.len();
        for x in 0..n {
            if picked.contains(&x) || b_seq[..s].contains(&x) {
                continue;
            }
            if (0..s).all(|j| rel(x, b_seq[j]) == template(i, j)) {
                picked.push(x);
                if grow(n, rel, b_seq, template, s, picked) {
                    return true;
                }
                picked.pop();
            }
        }
        false
    }
    let mut picked = Vec::with_capacity(s);
    Ok(if grow(n, rel, b_seq, template, s, &mut picked) {
        Some(picked)
    } else {
        None
    })
}

// ------------------------------------------------------------- chain rigidity

/// The two chain formulas, evaluated over explicit finite tuple spaces.
pub struct ChainFormulas<'a> {
    pub x_arity: usize,
    pub y_arity: usize,
    pub phi: &'a dyn Fn(&[usize], &[usize]) -> bool,
    pub psi: &'a dyn Fn(&[usize], &[usize]) -> bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ChainIssue {
    /// x realizes both formulas against the same block
    CommonRealizer { x: Vec<usize>, block: usize },
    /// witness `witness` fails its required formula against `block`
    ChainWitness {
        witness: usize,
        block: usize,
        needed_phi: bool,
    },
    /// x realizes phi against block j and psi against block i, i<j
    CrossRealizer { x: Vec<usize>, i: usize, j: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CondVerdict {
    pub holds: bool,
    pub issue: Option<ChainIssue>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainVerdict {
    /// no x satisfies both formulas on any single block
    pub cond1: CondVerdict,
    /// each witness c_j satisfies phi on blocks up to j, psi above
    pub cond2: CondVerdict,
    /// no x satisfies phi on a later block and psi on an earlier one
    pub cond3: CondVerdict,
    /// every (i, j, x) behind a cond3 failure, for cross-reporting
    pub cond3_failures: Vec<(usize, usize, Vec<usize>)>,
    /// indiscernibility of the block sequence is never checked at this
    /// scale; recorded so downstream output says so
    pub indiscernibility_checked: bool,
}

impl ChainVerdict {
    pub fn holds(&self) -> bool {
        self.cond1.holds && self.cond2.holds && self.cond3.holds
    }
}

/// Checks the three chain conditions over the given candidate space:
/// (1) the formulas never share a realizer on a block, (2) the supplied
/// witnesses interleave the chain, (3) crossed instances (phi above,
/// psi below) are unrealizable. Indiscernibility is NOT checked.
pub fn check_chain_fragment(
    f: &ChainFormulas<'_>,
    x_candidates: &[Vec<usize>],
    blocks: &[Vec<usize>],
    witnesses: &[Vec<usize>],
) -> Result<ChainVerdict, OrderPropsError> {
    for (what, tuples, arity) in [
        ("candidate", x_candidates, f.x_arity),
        ("block", blocks, f.y_arity),
        ("witness", witnesses, f.x_arity),
    ] {
        if let Some(bad) = tuples.iter().find(|t| t.len() != arity) {
            return Err(OrderPropsError::ArityMismatch {
                what,
                expected: arity,
                got: bad.len(),
            });
        }
    }
    let mut cond1 = CondVerdict {
        holds: true,
        issue: None,
    };
    'c1: for x in x_candidates {
        for (bi, a) in blocks.iter().enumerate() {
            if (f.phi)(x, a) && (f.psi)(x, a) {
                cond1 = CondVerdict {
                    holds: false,
                    issue: Some(ChainIssue::CommonRealizer {
                        x: x.clone(),
                        block: bi,
                    }),
                };
                break 'c1;
            }
        }
    }
    let mut cond2 = CondVerdict {
        holds: true,
        issue: None,
    };
    'c2: for (j, c) in witnesses.iter().enumerate() {
        for (i, a) in blocks.iter().enumerate() {
            let needed_phi = i <= j;
            let ok = if needed_phi {
                (f.phi)(c, a)
            } else {
                (f.psi)(c, a)
            };
            if !ok {
                cond2 = CondVerdict {
                    holds: false,
                    issue: Some(ChainIssue::ChainWitness {
                        witness: j,
                        block: i,
                        needed_phi,
                    }),
                };
                break 'c2;
            }
        }
    }
    let mut cond3_failures: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            if let Some(x) = x_candidates
                .iter()
                .find(|x| (f.phi)(x, &blocks[j]) && (f.psi)(x, &blocks[i]))
            {
                cond3_failures.push((i, j, x.clone()));
            }
        }
    }
    let cond3 = match cond3_failures.first() {
        None => CondVerdict {
            holds: true,
            issue: None,
        },
        Some((i, j, x)) => CondVerdict {
            holds: false,
            issue: Some(ChainIssue::CrossRealizer {
                x: x.clone(),
                i: *i,
                j: *j,
            }),
        },
    };
    Ok(ChainVerdict {
        cond1,
        cond2,
        cond3,
        cond3_failures,
        indiscernibility_checked: false,
    })
}

/// A cond3 failure paired with the pairwise fact that explains it: the
/// crossed realizer is also a joint witness for (a-row j, b-row i), a
/// pair the fragment says must be negative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrossNote {
    /// 0-based block positions of the cond3 failure (i < j)
    pub i: usize,
    pub j: usize,
    pub p2_positive: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CopChainReport {
    pub cop: CopVerdict,
    pub chain: ChainVerdict,
    pub cross: Vec<CrossNote>,
}

/// Materializes the chain formulas from a compatible-order fragment
/// over θ = the sequence's formula: block i is (a_i, b_i), phi demands
/// θ on the a-half and ¬θ on the b-half, psi demands θ on the b-half.
/// Witnesses are taken from the fragment's own joint realizers. The
/// fragment is expected to have passed verify_cop at this depth; the
/// report carries a fresh verdict rather than trusting that, and every
/// cond3 failure is paired with the pairwise fact behind it.
pub fn cop_to_chain(
    cs: &CharSeq<'_>,
    frag: &CopFragment,
    depth: usize,
) -> Result<CopChainReport, OrderPropsError> {
    let cop = verify_cop(cs, frag, depth, false)?;
    let n = frag.len();
    let pa = cs.formula().parameter_arity();
    let ox = cs.formula().object_arity();
    let universe = cs.structure().universe_size();
    let space = universe.checked_pow(ox as u32).ok_or_else(|| {
        OrderPropsError::Parameter("candidate space overflows".into())
    })?;
    if space as u64 > crate::charseq::MAX_WITNESS_SPACE {
        return Err(OrderPropsError::Parameter(
            "candidate space exceeds the enumeration cap".into(),
        ));
    }
    let mut x_candidates: Vec<Vec<usize>> = Vec::with_capacity(space);
    let mut tup = vec![0usize; ox];
    loop {
        x_candidates.push(tup.clone());
        let mut slot = ox;
        loop {
            if slot == 0 {
                break;
            }
            slot -= 1;
            tup[slot] += 1;
            if tup[slot] < universe {
                break;
            }
            tup[slot] = 0;
        }
        if tup.iter().all(|&v| v == 0) {
            break;
        }
    }
    let blocks: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut b = cs.pool()[frag.a_tuples[i]].clone();
            b.extend_from_slice(&cs.pool()[frag.b_tuples[i]]);
            b
        })
        .collect();
    let mut witnesses: Vec<Vec<usize>> = Vec::with_capacity(n);
    for j in 1..=n {
        let sel: Vec<usize> = frag.a_tuples[..j]
            .iter()
            .chain(&frag.b_tuples[j..])
            .copied()
            .collect();
        match cs.witness(&sel)? {
            Some(w) => witnesses.push(w),
            None => witnesses.push(vec![usize::MAX; ox]), // unrealizable: cond2 will report it
        }
    }
    let theta = |x: &[usize], y: &[usize]| -> bool {
        if x.iter().any(|&v| v >= universe) {
            return false;
        }
        cs.formula().eval(cs.structure(), x, y)
    };
    let phi = |x: &[usize], y: &[usize]| theta(x, &y[..pa]) && !theta(x, &y[pa..]);
    let psi = |x: &[usize], y: &[usize]| theta(x, &y[pa..]);
    let formulas = ChainFormulas {
        x_arity: ox,
        y_arity: 2 * pa,
        phi: &phi,
        psi: &psi,
    };
    let chain = check_chain_fragment(&formulas, &x_candidates, &blocks, &witnesses)?;
    let cross = chain
        .cond3_failures
        .iter()
        .map(|&(i, j, _)| CrossNote {
            i,
            j,
            p2_positive: cs.in_p2(frag.a_tuples[j], frag.b_tuples[i]),
        })
        .collect();
    Ok(CopChainReport { cop, chain, cross })
}

// ------------------------------------------------------------------ n-cycles

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycleReport {
    pub chain_holds: bool,
    /// first chain pair (positions) where the relation fails
    pub chain_violation: Option<(usize, usize)>,
    /// a directed n-cycle of distinct vertices, if one exists
    pub cycle: Option<Vec<usize>>,
    /// chain ordered and no cycle found
    pub holds: bool,
}

/// The supplied chain must be related pairwise in order; the digraph
/// must carry no directed cycle of length exactly n (wrap edge
/// included). Exhaustive over distinct-vertex cycles.
pub fn cycle_check(
    n_universe: usize,
    phi: &dyn Fn(usize, usize) -> bool,
    chain: &[usize],
    n: usize,
) -> Result<CycleReport, OrderPropsError> {
    if n < 3 {
        return Err(OrderPropsError::Parameter("cycle length must be ≥ 3".into()));
    }
    let mut chain_violation = None;
    'chain: for i in 0..chain.len() {
        for j in (i + 1)..chain.len() {
            if !phi(chain[i], chain[j]) {
                chain_violation = Some((i, j));
                break 'chain;
            }
        }
    }
    fn dfs(
        n_universe: usize,
        phi: &dyn Fn(usize, usize) -> bool,
        start: usize,
        path: &mut Vec<usize>,
        used: &mut Bitset,
        n: usize,
    ) -> bool {
        if path.len() == n {
            return phi(*path.last().expect("nonempty"), start);
        }
        for v in (start + 1)..n_universe {
            // `start` is the least vertex on the cycle
            if !used.contains(v) && phi(*path.last().expect("nonempty"), v) {
                path.push(v);
                used.insert(v);
                if dfs(n_universe, phi, start, path, used, n) {
                    return true;
                }
                used.remove(v);
                path.pop();
            }
        }
        false
    }
    let mut cycle = None;
    if n <= n_universe {
        let mut used = Bitset::new(n_universe);
        for start in 0..n_universe {
            let mut path = vec![start];
            used.insert(start);
            if dfs(n_universe, phi, start, &mut path, &mut used, n) {
                cycle = Some(path);
                break;
            }
            used.remove(start);
        }
    }
    Ok(CycleReport {
        chain_holds: chain_violation.is_none(),
        chain_violation,
        holds: chain_violation.is_none() && cycle.is_none(),
        cycle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charseq::compute_charseq;
    use crate::graph::Graph;
    use crate::rat::rat;
    use crate::structures::{
        builtin_formula, gen_crosscutting, gen_half_graph, gen_random_graph, gen_staircase,
        gen_tfrg_staged, FiniteStructure, TfrgLab, TfrgPart,
    };

    fn graph_of(s: &FiniteStructure) -> Graph {
        s.to_graph("R").unwrap()
    }

    #[test]
    fn finds_planted_half_graph() {
        let h8 = graph_of(&gen_half_graph(8).unwrap());
        let rel = |x: usize, y: usize| h8.has_edge(x, y);
        let frag = find_half_graph(16, &rel, 8, 0).expect("planted rows");
        assert!(validate_half_graph(&rel, &frag));
        assert_eq!(frag.len(), 8);
        // symmetric relations agree with their argument swap at every k
        let dual = |x: usize, y: usize| h8.has_edge(y, x);
        for k in 1..=8 {
            assert_eq!(
                find_half_graph(16, &rel, k, 0).is_some(),
                find_half_graph(16, &dual, k, 0).is_some(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn complete_relation_has_no_fragment() {
        assert!(find_half_graph(10, &|_, _| true, 1, 0).is_none());
    }

    #[test]
    fn random_graph_yields_short_fragment() {
        let g = graph_of(&gen_random_graph(20, rat(1, 2), 5).unwrap());
        let rel = |x: usize, y: usize| g.has_edge(x, y);
        let frag = find_half_graph(20, &rel, 3, 0).expect("length 3 in G(20, 1/2)");
        assert!(validate_half_graph(&rel, &frag));
    }

    #[test]
    fn chain_order_and_its_dual_peak_together() {
        // on 0..11 under <, rows interleave: 6 pairs fit, 7 need 14 slots
        let lt = |x: usize, y: usize| x < y;
        let gt = |x: usize, y: usize| x > y;
        for (k, expect) in [(6, true), (7, false)] {
            assert_eq!(find_half_graph(12, &lt, k, 0).is_some(), expect);
            assert_eq!(find_half_graph(12, &gt, k, 0).is_some(), expect);
        }
        let frag = find_half_graph(12, &lt, 6, 0).unwrap();
        assert!(validate_half_graph(&lt, &frag));
    }

    #[test]
    fn complement_shortens_the_planted_rows() {
        // flipping edges costs exactly one level: the top a no longer
        // has enough all-negative partners
        let comp = graph_of(&gen_half_graph(8).unwrap()).complement();
        let rel = |x: usize, y: usize| comp.has_edge(x, y);
        let frag = find_half_graph(16, &rel, 7, 0).expect("length 7");
        assert!(validate_half_graph(&rel, &frag));
        assert!(find_half_graph(16, &rel, 8, 0).is_none());
    }

    #[test]
    fn heuristic_recovers_rows_on_large_structure() {
        let h32 = graph_of(&gen_half_graph(32).unwrap());
        let rel = |x: usize, y: usize| h32.has_edge(x, y);
        let frag = find_half_graph(64, &rel, 6, 1).expect("heuristic mode");
        assert!(validate_half_graph(&rel, &frag));
    }

    fn staircase_setup(
        m: usize,
    ) -> (FiniteStructure, Vec<usize>) {
        let s = gen_staircase(m).unwrap();
        let a_row = s.part("A").unwrap().to_vec();
        (s, a_row)
    }

    // interval tuple for signed pair (s, t): consistent ⟺ s < t, with
    // the witness row carving [s, t)
    fn staircase_grid(a_row: &[usize], lo: i64, hi: i64) -> (Vec<Vec<usize>>, OrderedBase) {
        let pos = |k: i64| (k - lo) as usize;
        pair_grid(lo, hi, &mut |s, t| {
            vec![a_row[pos(t)], a_row[pos(s)]]
        })
    }

    #[test]
    fn emission_indices_match_the_interval_picture() {
        let (s, a_row) = staircase_setup(12);
        let rho = builtin_formula("strict-order-rho").unwrap();
        let (pool, base) = staircase_grid(&a_row, -4, 7);
        let cs = compute_charseq(&s, rho.as_ref(), 4, &pool).unwrap();
        let frag = build_cop_from_ordered(&cs, &base, 2).unwrap();
        assert_eq!(frag.a_pairs, vec![(1, 7), (3, 5)]);
        assert_eq!(frag.b_pairs, vec![(-2, 1), (-4, 3)]);
        let frag1 = build_cop_from_ordered(&cs, &base, 1).unwrap();
        assert_eq!(frag1.a_pairs, vec![(1, 3)]);
        assert_eq!(frag1.b_pairs, vec![(-2, 1)]);
    }

    #[test]
    fn nested_intervals_carry_depth_three() {
        let (s, a_row) = staircase_setup(18);
        let rho = builtin_formula("strict-order-rho").unwrap();
        let (pool, base) = staircase_grid(&a_row, -6, 11);
        let cs = compute_charseq(&s, rho.as_ref(), 6, &pool).unwrap();
        let frag = build_cop_from_ordered(&cs, &base, 3).unwrap();
        for depth in 1..=3 {
            let v = verify_cop(&cs, &frag, depth, false).unwrap();
            assert!(v.holds, "depth {depth}");
        }
    }

    #[test]
    fn support_two_shortcut_agrees() {
        // interval intersections are pairwise-determined, so the
        // support-2 route must reach the same verdict
        let (s, a_row) = staircase_setup(12);
        let rho = builtin_formula("strict-order-rho").unwrap();
        let (pool, base) = staircase_grid(&a_row, -4, 7);
        let cs = compute_charseq(&s, rho.as_ref(), 4, &pool).unwrap();
        assert!(crate::charseq::support_check(&cs, 2, 4).unwrap().holds);
        let frag = build_cop_from_ordered(&cs, &base, 2).unwrap();
        let fast = verify_cop(&cs, &frag, 2, true).unwrap();
        let full = verify_cop(&cs, &frag, 2, false).unwrap();
        assert!(fast.shortcut && fast.holds && full.holds);
    }

    #[test]
    fn planted_flip_is_reported() {
        let (s, a_row) = staircase_setup(18);
        let rho = builtin_formula("strict-order-rho").unwrap();
        let (pool, base) = staircase_grid(&a_row, -6, 11);
        let cs = compute_charseq(&s, rho.as_ref(), 6, &pool).unwrap();
        let mut frag = build_cop_from_ordered(&cs, &base, 3).unwrap();
        // narrow the first a-interval until it clears the b-row: the
        // (1, 2) cross pair flips to negative
        frag.a_pairs[0] = (3, 5);
        frag.a_tuples[0] = base.pool_index(3, 5).unwrap();
        let v = verify_cop(&cs, &frag, 3, false).unwrap();
        assert!(!v.holds);
        let viol = v.violation.unwrap();
        assert_eq!(viol.expected, true);
        assert_eq!((viol.a_indices, viol.b_indices), (vec![1], vec![2]));
    }

    #[test]
    fn hypothesis_failures_error_out() {
        let (s, a_row) = staircase_setup(12);
        let rho = builtin_formula("strict-order-rho").unwrap();
        // swapped orientation: consistency runs against the index order
        let pos = |k: i64| (k + 4) as usize;
        let (pool, base) = pair_grid(-4, 7, &mut |s_, t| {
            vec![a_row[pos(s_)], a_row[pos(t)]]
        });
        let cs = compute_charseq(&s, rho.as_ref(), 4, &pool).unwrap();
        match build_cop_from_ordered(&cs, &base, 2) {
            Err(OrderPropsError::HypothesisOne { .. }) => {}
            other => panic!("expected a single-pair ordering failure, got {other:?}"),
        }
        // a window that misses the needed low end
        let (pool2, base2) = staircase_grid(&a_row, 0, 11);
        let cs2 = compute_charseq(&s, rho.as_ref(), 4, &pool2).unwrap();
        match build_cop_from_ordered(&cs2, &base2, 2) {
            Err(OrderPropsError::RangeNotCovered { need_lo, .. }) => assert_eq!(need_lo, -4),
            other => panic!("expected a range error, got {other:?}"),
        }
    }

    #[test]
    fn common_neighbor_rows_carry_depth_two() {
        // rows with a_p R b_q ⟺ q ≤ p: a common neighbor exists exactly
        // for independent unions once every pattern is saturated
        let mut lab = TfrgLab::new(1, 1).unwrap();
        let (a_row, b_row) = lab.add_staircase_rows(12);
        let pos = |k: i64| (k + 4) as usize;
        let (pool, base) = pair_grid(-4, 7, &mut |s, t| {
            vec![a_row[pos(s)], b_row[pos(t)]]
        });
        lab.saturate_pool_unions(&pool, 1).unwrap();
        let ni = 2i64;
        let emitted: Vec<Vec<usize>> = (1..=ni)
            .map(|i| (2 * i - 1, 4 * ni - 2 * i + 1))
            .chain((1..=ni).map(|j| (-2 * j, 2 * j - 1)))
            .map(|(s, t)| vec![a_row[pos(s)], b_row[pos(t)]])
            .collect();
        lab.saturate_pool_unions(&emitted, 4).unwrap();
        let phi = builtin_formula("common-neighbor").unwrap();
        let cs = compute_charseq(lab.structure(), phi.as_ref(), 4, &pool).unwrap();
        let frag = build_cop_from_ordered(&cs, &base, 2).unwrap();
        let v = verify_cop(&cs, &frag, 2, false).unwrap();
        assert!(v.holds);
    }

    fn crosscut_sequence(
        s: &FiniteStructure,
        len: usize,
    ) -> (Vec<Vec<usize>>, Vec<usize>, Vec<usize>) {
        // recover class order by least member, thresholds by P-count
        let n = s.universe_size();
        let mut e_classes: Vec<usize> = Vec::new(); // least members, ascending
        for v in 0..n {
            if !e_classes.iter().any(|&r| s.same_class("E", r, v)) {
                e_classes.push(v);
            }
        }
        let mut f_info: Vec<(usize, usize)> = Vec::new(); // (least member, threshold)
        for v in 0..n {
            if !f_info.iter().any(|&(r, _)| s.same_class("F", r, v)) {
                let t = e_classes
                    .iter()
                    .filter(|&&e| {
                        (0..n).any(|x| {
                            s.same_class("E", e, x)
                                && s.same_class("F", v, x)
                                && s.unary_holds("P", x)
                        })
                    })
                    .count();
                f_info.push((v, t));
            }
        }
        let zero = s.constant("0").unwrap();
        let one = s.constant("1").unwrap();
        let mut pool = Vec::new();
        let mut a_seq = Vec::new();
        let mut b_seq = Vec::new();
        for i in 1..=len {
            a_seq.push(pool.len());
            pool.push(vec![e_classes[i], zero]);
        }
        for j in 1..=len {
            let (rep, _) = f_info
                .iter()
                .find(|&&(_, t)| t == j)
                .expect("threshold present");
            b_seq.push(pool.len());
            pool.push(vec![*rep, one]);
        }
        (pool, a_seq, b_seq)
    }

    #[test]
    fn crosscutting_rows_order_without_joint_members() {
        let s = gen_crosscutting(6, 7, 1, 3).unwrap();
        let psi = builtin_formula("crosscut-psi").unwrap();
        let (pool, a_seq, b_seq) = crosscut_sequence(&s, 4);
        let cs = compute_charseq(&s, psi.as_ref(), 2, &pool).unwrap();
        let v = verify_empty_op(&cs, &a_seq, &b_seq, 2).unwrap();
        assert!(v.holds);
        assert!(!v.vacuous_rows);
    }

    #[test]
    fn positive_row_selection_is_flagged() {
        let s = gen_crosscutting(6, 7, 1, 3).unwrap();
        let psi = builtin_formula("crosscut-psi").unwrap();
        let zero = s.constant("0").unwrap();
        // two members of one class with a filled cell: jointly realizable
        let n = s.universe_size();
        let rich = (0..n)
            .find(|&v| s.unary_holds("P", v))
            .expect("some filled cell");
        let mate = (0..n)
            .find(|&v| v != rich && s.same_class("E", rich, v))
            .expect("classes have several members");
        let pool = vec![vec![rich, zero], vec![mate, zero]];
        let cs = compute_charseq(&s, psi.as_ref(), 2, &pool).unwrap();
        let v = verify_empty_op(&cs, &[0, 1], &[], 2).unwrap();
        assert!(!v.holds);
        assert!(matches!(
            v.issue,
            Some(EmptyOpIssue::RowPositive { row: Row::A, ref indices }) if *indices == vec![1, 2]
        ));
    }

    #[test]
    fn short_rows_are_vacuous() {
        let s = gen_crosscutting(6, 7, 1, 3).unwrap();
        let psi = builtin_formula("crosscut-psi").unwrap();
        let (pool, a_seq, b_seq) = crosscut_sequence(&s, 1);
        let cs = compute_charseq(&s, psi.as_ref(), 2, &pool).unwrap();
        let v = verify_empty_op(&cs, &a_seq[..1], &b_seq[..1], 2).unwrap();
        assert!(v.holds);
        assert!(v.vacuous_rows);
    }

    #[test]
    fn pattern_realization_cases() {
        let g = Graph::complete(6);
        let rel = |x: usize, y: usize| g.has_edge(x, y);
        assert_eq!(pattern_realization(6, &rel, &[2, 3], &[], &[]).unwrap(), Some(0));
        // loopless: the avoided vertex itself realizes the mixed pattern
        assert_eq!(pattern_realization(6, &rel, &[2, 3], &[0], &[1]).unwrap(), Some(3));
        assert_eq!(pattern_realization(6, &rel, &[2, 3], &[], &[0, 1]).unwrap(), None);
        assert!(pattern_realization(6, &rel, &[2, 3], &[0], &[0]).is_err());

        let s = gen_tfrg_staged(2, 2).unwrap();
        let y1: Vec<usize> = s.part("Y").unwrap().to_vec();
        let rel_s = |x: usize, y: usize| s.rel_edge("R", x, y);
        let w = pattern_realization(s.universe_size(), &rel_s, &y1, &[0], &[1])
            .unwrap()
            .expect("pattern was staged in");
        assert!(rel_s(w, y1[0]) && !rel_s(w, y1[1]));
        // adjacent pairs never share a neighbor here
        let n = s.universe_size();
        let (u, v) = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .find(|&(u, v)| rel_s(u, v))
            .expect("staged structure has edges");
        let hit = pattern_realization(n, &rel_s, &[u, v], &[0, 1], &[]).unwrap();
        assert!(hit.is_none());
    }

    #[test]
    fn template_realization_small() {
        // base row 0, 1; candidate rows live on 2..6
        let mut g = Graph::new(6);
        g.add_edge(2, 0);
        g.add_edge(2, 1);
        g.add_edge(3, 0);
        let rel = |x: usize, y: usize| g.has_edge(x, y);
        let t_full = |_: usize, j: usize| j < 2;
        assert_eq!(
            template_realization(6, &rel, &[0, 1], &t_full, 1).unwrap(),
            Some(vec![2])
        );
        let stair = |i: usize, j: usize| j <= i;
        assert_eq!(
            template_realization(6, &rel, &[0, 1], &stair, 2).unwrap(),
            Some(vec![3, 2])
        );
        let anti = |i: usize, j: usize| j > i;
        assert_eq!(template_realization(6, &rel, &[0, 1], &anti, 2).unwrap(), None);
    }

    // S-sequence of part-striped triples ordered by the one-way cyclic
    // comparison (x,y,z) < (x',y',z') ⟺ xRy' ∧ yRz' ∧ zRx'
    fn build_triple_chain(lab: &mut TfrgLab, len: usize) -> Vec<[usize; 3]> {
        let mut triples: Vec<[usize; 3]> = Vec::with_capacity(len);
        for i in 0..len {
            let c_prev: Vec<usize> = triples.iter().map(|t| t[2]).collect();
            let b_prev: Vec<usize> = triples.iter().map(|t| t[1]).collect();
            let a = lab.realize(TfrgPart::X, &c_prev, &b_prev).unwrap();
            let a_all: Vec<usize> = triples
                .iter()
                .map(|t| t[0])
                .chain(core::iter::once(a))
                .collect();
            let b = lab.realize(TfrgPart::Y, &a_all, &c_prev).unwrap();
            let b_all: Vec<usize> = triples
                .iter()
                .map(|t| t[1])
                .chain(core::iter::once(b))
                .collect();
            let c = lab.realize(TfrgPart::Z, &b_all, &a_all[..i].to_vec()).unwrap();
            triples.push([a, b, c]);
        }
        triples
    }

    fn less_l(s: &FiniteStructure, t1: &[usize], t2: &[usize]) -> bool {
        s.rel_edge("R", t1[0], t2[1]) && s.rel_edge("R", t1[1], t2[2]) && s.rel_edge("R", t1[2], t2[0])
    }

    #[test]
    fn triple_chain_conditions_hold_and_misorder_is_caught() {
        let mut lab = TfrgLab::new(1, 1).unwrap();
        let triples = build_triple_chain(&mut lab, 12);
        let s = lab.structure();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(less_l(s, &triples[i], &triples[j]), i < j, "({i},{j})");
            }
        }
        // blocks from positions 3k, 3k+1; witnesses from positions 3k+2
        let blocks: Vec<Vec<usize>> = (0..4)
            .map(|k| {
                let mut b = triples[3 * k].to_vec();
                b.extend_from_slice(&triples[3 * k + 1]);
                b
            })
            .collect();
        let witnesses: Vec<Vec<usize>> = (0..4).map(|k| triples[3 * k + 2].to_vec()).collect();
        let n = s.universe_size();
        let mut x_candidates = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    x_candidates.push(vec![x, y, z]);
                }
            }
        }
        let phi = |x: &[usize], yy: &[usize]| {
            less_l(s, &yy[..3], &yy[3..]) && less_l(s, &yy[3..], x)
        };
        let psi = |x: &[usize], yy: &[usize]| {
            less_l(s, x, &yy[..3]) && less_l(s, &yy[..3], &yy[3..])
        };
        let f = ChainFormulas {
            x_arity: 3,
            y_arity: 6,
            phi: &phi,
            psi: &psi,
        };
        let v = check_chain_fragment(&f, &x_candidates, &blocks, &witnesses).unwrap();
        assert!(v.holds(), "{v:?}");
        assert!(!v.indiscernibility_checked);

        // rotating the last block below the chain plants a crossing:
        // the witness between the displaced blocks realizes both sides
        let mut rotated = blocks.clone();
        rotated.rotate_right(1);
        let v2 = check_chain_fragment(&f, &x_candidates, &rotated, &witnesses).unwrap();
        assert!(!v2.cond3.holds);
        assert!(v2.cond1.holds, "same-block contradiction is structural");
    }

    #[test]
    fn chain_formulas_from_fragment_pass_all_conditions() {
        let (s, a_row) = staircase_setup(18);
        let rho = builtin_formula("strict-order-rho").unwrap();
        let (pool, base) = staircase_grid(&a_row, -6, 11);
        let cs = compute_charseq(&s, rho.as_ref(), 6, &pool).unwrap();
        let frag = build_cop_from_ordered(&cs, &base, 3).unwrap();
        let report = cop_to_chain(&cs, &frag, 3).unwrap();
        assert!(report.cop.holds);
        assert!(report.chain.holds(), "{:?}", report.chain);
        assert!(report.cross.is_empty());
    }

    #[test]
    fn flipped_pair_cross_reports_with_the_pairwise_fact() {
        let (s, a_row) = staircase_setup(18);
        let rho = builtin_formula("strict-order-rho").unwrap();
        let (pool, base) = staircase_grid(&a_row, -6, 11);
        let cs = compute_charseq(&s, rho.as_ref(), 6, &pool).unwrap();
        let mut frag = build_cop_from_ordered(&cs, &base, 3).unwrap();
        // push the first b-interval above the second a-interval
        frag.b_pairs[0] = (5, 11);
        frag.b_tuples[0] = base.pool_index(5, 11).unwrap();
        let report = cop_to_chain(&cs, &frag, 3).unwrap();
        assert!(!report.cop.holds);
        assert!(!report.chain.cond3.holds);
        assert!(!report.cross.is_empty());
        for note in &report.cross {
            assert!(note.i < note.j);
            assert!(note.p2_positive, "every crossing rests on a positive pair");
        }
        assert!(report.chain.cond1.holds, "joint instances stay unrealizable");
    }

    #[test]
    fn cycle_check_cases() {
        let lt = |x: usize, y: usize| x < y;
        let chain: Vec<usize> = (0..8).collect();
        let r = cycle_check(8, &lt, &chain, 3).unwrap();
        assert!(r.holds && r.chain_holds && r.cycle.is_none());

        let ne = |x: usize, y: usize| x != y;
        let r2 = cycle_check(8, &ne, &chain, 3).unwrap();
        assert!(!r2.holds);
        assert_eq!(r2.cycle, Some(vec![0, 1, 2]));
        assert!(r2.chain_holds);

        let never = |_: usize, _: usize| false;
        let r3 = cycle_check(8, &never, &chain, 3).unwrap();
        assert!(!r3.chain_holds);
        assert_eq!(r3.chain_violation, Some((0, 1)));
    }
}
