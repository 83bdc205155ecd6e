//! Independence machinery over a binary relation: finite depth testing
//! of part families (every small positive/negative pattern realized),
//! empirically forbidden edge templates, helix-built approximation
//! arrays, the block comparison relation derived from a template, and
//! pseudo-loop search. The endpoint turns a loop-free block chain into
//! the same three-condition rigidity verdict as the order-property
//! pipeline.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::for_each_combination;
use crate::structures::{FiniteStructure, StructureError, TfrgLab, TfrgPart};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IndependenceError {
    Parameter(String),
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// the helix found no candidate for slot (row, col) under this
    /// pattern, within the backtracking budget
    Unrealizable {
        row: usize,
        col: usize,
        eta: Vec<usize>,
        nu: Vec<usize>,
    },
    ChainViolation { i: usize, j: usize },
}

impl core::fmt::Display for IndependenceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            IndependenceError::Parameter(s) => write!(f, "{s}"),
            IndependenceError::ShapeMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected {expected}, got {got}"),
            IndependenceError::Unrealizable { row, col, eta, nu } => write!(
                f,
                "no element realizes the pattern at row {row}, column {col}: \
                 adjacent to {eta:?}, avoiding {nu:?}"
            ),
            IndependenceError::ChainViolation { i, j } => {
                write!(f, "blocks {i} < {j} are not comparison-ordered")
            }
        }
    }
}

impl core::error::Error for IndependenceError {}

impl From<StructureError> for IndependenceError {
    fn from(e: StructureError) -> Self {
        IndependenceError::Parameter(alloc::format!("{e}"))
    }
}

// -------------------------------------------------------------- depth testing

/// One (target part, complement choice) check at a fixed pattern cap.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DepthCheck {
    pub part: usize,
    pub others: Vec<usize>,
    pub holds: bool,
    /// first unrealized (eta, nu), element ids
    pub failure: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DepthVerdict {
    pub k: usize,
    /// per-part pattern budget: each complement part contributes at
    /// most this many elements to eta ∪ nu
    pub cap: usize,
    pub checks: Vec<DepthCheck>,
    pub holds: bool,
    /// k = 1 leaves nothing to draw patterns from
    pub vacuous: bool,
}

fn check_one_part(
    target: &[usize],
    pools: &[&[usize]],
    rel: &dyn Fn(usize, usize) -> bool,
    cap: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    // per-pool contributions: subsets of size ≤ cap, then sign splits
    fn descend(
        target: &[usize],
        pools: &[&[usize]],
        rel: &dyn Fn(usize, usize) -> bool,
        cap: usize,
        depth: usize,
        eta: &mut Vec<usize>,
        nu: &mut Vec<usize>,
        failure: &mut Option<(Vec<usize>, Vec<usize>)>,
    ) {
        if failure.is_some() {
            return;
        }
        if depth == pools.len() {
            let realized = target
                .iter()
                .any(|&a| eta.iter().all(|&e| rel(a, e)) && nu.iter().all(|&v| !rel(a, v)));
            if !realized {
                *failure = Some((eta.clone(), nu.clone()));
            }
            return;
        }
        let pool = pools[depth];
        for size in 0..=cap.min(pool.len()) {
            if size == 0 {
                descend(target, pools, rel, cap, depth + 1, eta, nu, failure);
                continue;
            }
            let mut subsets: Vec<Vec<usize>> = Vec::new();
            for_each_combination(
                pool.len(),
                size,
                &mut |_| {},
                &mut |_| {},
                &mut |combo| {
                    subsets.push(combo.iter().map(|&p| pool[p]).collect());
                    true
                },
            );
            for subset in &subsets {
                for mask in 0..(1u32 << size) {
                    let e0 = eta.len();
                    let n0 = nu.len();
                    for (b, &v) in subset.iter().enumerate() {
                        if mask & (1 << b) != 0 {
                            eta.push(v);
                        } else {
                            nu.push(v);
                        }
                    }
                    descend(target, pools, rel, cap, depth + 1, eta, nu, failure);
                    eta.truncate(e0);
                    nu.truncate(n0);
                    if failure.is_some() {
                        return;
                    }
                }
            }
        }
    }
    let mut failure = None;
    let mut eta = Vec::new();
    let mut nu = Vec::new();
    descend(target, pools, rel, cap, 0, &mut eta, &mut nu, &mut failure);
    failure
}

/// For every part and every choice of k−1 complement parts, checks that
/// each disjoint (eta, nu) pattern drawn from the complements' pools is
/// realized by some element of the part. The cap bounds each pool's
/// contribution separately, so a k-way check sees patterns of total
/// size up to cap·(k−1). `pattern_pools` restricts where patterns come
/// from (realizers always range over the full parts); it defaults to
/// the parts themselves.
pub fn independence_depth(
    parts: &[Vec<usize>],
    rel: &dyn Fn(usize, usize) -> bool,
    k: usize,
    cap: usize,
    pattern_pools: Option<&[Vec<usize>]>,
) -> Result<DepthVerdict, IndependenceError> {
    if parts.is_empty() || k == 0 || k > parts.len() || cap == 0 {
        return Err(IndependenceError::Parameter(
            "need 1 ≤ k ≤ #parts and cap ≥ 1".into(),
        ));
    }
    if let Some(pools) = pattern_pools {
        if pools.len() != parts.len() {
            return Err(IndependenceError::ShapeMismatch {
                what: "pattern pools",
                expected: parts.len(),
                got: pools.len(),
            });
        }
        for (pool, part) in pools.iter().zip(parts) {
            if pool.iter().any(|v| !part.contains(v)) {
                return Err(IndependenceError::Parameter(
                    "pattern pool escapes its part".into(),
                ));
            }
        }
    }
    let pool_of = |i: usize| -> &[usize] {
        match pattern_pools {
            Some(pools) => &pools[i],
            None => &parts[i],
        }
    };
    let m = parts.len();
    let mut checks = Vec::new();
    for i in 0..m {
        let complements: Vec<usize> = (0..m).filter(|&j| j != i).collect();
        let mut choices: Vec<Vec<usize>> = Vec::new();
        for_each_combination(
            complements.len(),
            k - 1,
            &mut |_| {},
            &mut |_| {},
            &mut |combo| {
                choices.push(combo.iter().map(|&p| complements[p]).collect());
                true
            },
        );
        for others in choices {
            let pools: Vec<&[usize]> = others.iter().map(|&j| pool_of(j)).collect();
            let failure = check_one_part(&parts[i], &pools, rel, cap);
            checks.push(DepthCheck {
                part: i,
                others,
                holds: failure.is_none(),
                failure,
            });
        }
    }
    let holds = checks.iter().all(|c| c.holds);
    Ok(DepthVerdict {
        k,
        cap,
        checks,
        holds,
        vacuous: k == 1,
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DepthProfile {
    pub cap: usize,
    /// (k, passed) for k = 1..=k_max
    pub rows: Vec<(usize, bool)>,
    /// largest k passing at this cap, 0 when none do
    pub max_depth: usize,
}

/// Depth profile: the largest k whose every check passes at this cap.
pub fn depth_profile(
    parts: &[Vec<usize>],
    rel: &dyn Fn(usize, usize) -> bool,
    k_max: usize,
    cap: usize,
    pattern_pools: Option<&[Vec<usize>]>,
) -> Result<DepthProfile, IndependenceError> {
    let mut rows = Vec::new();
    for k in 1..=k_max.min(parts.len()) {
        let v = independence_depth(parts, rel, k, cap, pattern_pools)?;
        rows.push((k, v.holds));
    }
    let max_depth = rows.iter().filter(|&&(_, ok)| ok).map(|&(k, _)| k).max().unwrap_or(0);
    Ok(DepthProfile {
        cap,
        rows,
        max_depth,
    })
}

// --------------------------------------------------------------- templates

/// An h×(n+1) grid of slots with a total edge assignment on
/// cross-column slot pairs; same-column pairs stay undetermined.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConfigTemplate {
    h: usize,
    width: usize,
    /// normalized (lesser slot, greater slot) pairs carrying a 1
    ones: BTreeSet<((usize, usize), (usize, usize))>,
}

fn norm_pair(
    a: (usize, usize),
    b: (usize, usize),
) -> ((usize, usize), (usize, usize)) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ConfigTemplate {
    /// Slots are (row, column), rows 0..h, columns 0..width. Pairs not
    /// listed are 0. Same-column pairs are rejected.
    pub fn new(
        h: usize,
        width: usize,
        ones: &[((usize, usize), (usize, usize))],
    ) -> Result<Self, IndependenceError> {
        if h == 0 || width < 2 {
            return Err(IndependenceError::Parameter(
                "need height ≥ 1 and ≥ 2 columns".into(),
            ));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in ones {
            if a.0 >= h || b.0 >= h || a.1 >= width || b.1 >= width {
                return Err(IndependenceError::Parameter(
                    "slot outside the template grid".into(),
                ));
            }
            if a.1 == b.1 {
                return Err(IndependenceError::Parameter(
                    "same-column pairs carry no template edge".into(),
                ));
            }
            set.insert(norm_pair(a, b));
        }
        Ok(ConfigTemplate {
            h,
            width,
            ones: set,
        })
    }

    /// All cross pairs present: three mutually related elements.
    pub fn triangle() -> Self {
        ConfigTemplate::new(
            1,
            3,
            &[
                ((0, 0), (0, 1)),
                ((0, 0), (0, 2)),
                ((0, 1), (0, 2)),
            ],
        )
        .expect("static template")
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ones(&self) -> impl Iterator<Item = &((usize, usize), (usize, usize))> {
        self.ones.iter()
    }

    /// None on same-column pairs (undetermined by design).
    pub fn edge(&self, a: (usize, usize), b: (usize, usize)) -> Option<bool> {
        if a.1 == b.1 {
            return None;
        }
        Some(self.ones.contains(&norm_pair(a, b)))
    }

    fn slots(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.h * self.width);
        for r in 0..self.h {
            for c in 0..self.width {
                out.push((r, c));
            }
        }
        out
    }
}

/// Distinct elements filling the template slots (row-major) with the
/// relation matching the template on every cross-column pair.
pub fn find_template_embedding(
    n: usize,
    rel: &dyn Fn(usize, usize) -> bool,
    template: &ConfigTemplate,
) -> Option<Vec<usize>> {
    let slots = template.slots();
    fn place(
        n: usize,
        rel: &dyn Fn(usize, usize) -> bool,
        template: &ConfigTemplate,
        slots: &[(usize, usize)],
        filled: &mut Vec<usize>,
    ) -> bool {
        if filled.len() == slots.len() {
            return true;
        }
        let here = slots[filled.len()];
        'cand: for x in 0..n {
            if filled.contains(&x) {
                continue;
            }
            for (j, &prev) in filled.iter().enumerate() {
                if let Some(e) = template.edge(here, slots[j]) {
                    if rel(x, prev) != e {
                        continue 'cand;
                    }
                }
            }
            filled.push(x);
            if place(n, rel, template, slots, filled) {
                return true;
            }
            filled.pop();
        }
        false
    }
    let mut filled = Vec::with_capacity(slots.len());
    if place(n, rel, template, &slots, &mut filled) {
        Some(filled)
    } else {
        None
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ForbiddenOutcome {
    /// no structure in the corpus embeds the template; forbidden-ness
    /// is empirical, quantified by the corpus size
    Found {
        template: ConfigTemplate,
        corpus: usize,
    },
    NotFound,
}

/// Smallest template (height, then edge count, then lexicographic) that
/// no seeded structure from the family realizes. The family's relation
/// is read from "R".
pub fn find_forbidden_config(
    family: &mut dyn FnMut(u64) -> Result<FiniteStructure, StructureError>,
    seeds: &[u64],
    n: usize,
    h_max: usize,
) -> Result<ForbiddenOutcome, IndependenceError> {
    if seeds.is_empty() || h_max == 0 {
        return Err(IndependenceError::Parameter(
            "need a nonempty corpus and h_max ≥ 1".into(),
        ));
    }
    let width = n + 1;
    let corpus: Vec<FiniteStructure> = seeds
        .iter()
        .map(|&s| family(s))
        .collect::<Result<_, _>>()?;
    let realized_somewhere = |t: &ConfigTemplate| {
        corpus.iter().any(|s| {
            let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
            find_template_embedding(s.universe_size(), &rel, t).is_some()
        })
    };
    for h in 1..=h_max {
        let mut pairs: Vec<((usize, usize), (usize, usize))> = Vec::new();
        for r in 0..h {
            for c in 0..width {
                for r2 in 0..h {
                    for c2 in (c + 1)..width {
                        pairs.push(((r, c), (r2, c2)));
                    }
                }
            }
        }
        for count in 0..=pairs.len() {
            let mut found: Option<ConfigTemplate> = None;
            if count == 0 {
                let t = ConfigTemplate::new(h, width, &[]).expect("empty template");
                if !realized_somewhere(&t) {
                    found = Some(t);
                }
            } else {
                for_each_combination(
                    pairs.len(),
                    count,
                    &mut |_| {},
                    &mut |_| {},
                    &mut |combo| {
                        let ones: Vec<_> = combo.iter().map(|&p| pairs[p]).collect();
                        let t = ConfigTemplate::new(h, width, &ones).expect("pairs validated");
                        if realized_somewhere(&t) {
                            true
                        } else {
                            found = Some(t);
                            false
                        }
                    },
                );
            }
            if let Some(template) = found {
                return Ok(ForbiddenOutcome::Found {
                    template,
                    corpus: corpus.len(),
                });
            }
        }
    }
    Ok(ForbiddenOutcome::NotFound)
}

// ------------------------------------------------------------------ the array

/// Column indices whose template edges constrain column i: everything
/// except i itself and its cyclic successor.
pub fn col_scope(i: usize, width: usize) -> Vec<usize> {
    (0..width)
        .filter(|&j| j != i && j != (i + 1) % width)
        .collect()
}

/// Rows of elements, one per column, grouped into blocks of h
/// consecutive rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockArray {
    pub h: usize,
    pub width: usize,
    /// rows[r][k]: row r+1, column k
    pub rows: Vec<Vec<usize>>,
}

impl BlockArray {
    pub fn num_blocks(&self) -> usize {
        self.rows.len() / self.h
    }

    pub fn block(&self, l: usize) -> &[Vec<usize>] {
        &self.rows[l * self.h..(l + 1) * self.h]
    }

    pub fn blocks(&self) -> Vec<Vec<Vec<usize>>> {
        (0..self.num_blocks())
            .map(|l| self.block(l).to_vec())
            .collect()
    }
}

/// Supplies elements matching adjacency patterns during array
/// construction, and answers relation queries for post-hoc checks.
pub trait PatternRealizer {
    fn width(&self) -> usize;
    /// element of `part` adjacent to all of eta, none of nu, outside
    /// exclude; None when no candidate is available
    fn realize(
        &mut self,
        part: usize,
        eta: &[usize],
        nu: &[usize],
        exclude: &[usize],
    ) -> Option<usize>;
    fn related(&self, u: usize, v: usize) -> bool;
}

/// Scans fixed part lists in order, lowest index first.
pub struct ExistingParts<'a> {
    pub parts: &'a [Vec<usize>],
    pub rel: &'a dyn Fn(usize, usize) -> bool,
}

impl PatternRealizer for ExistingParts<'_> {
    fn width(&self) -> usize {
        self.parts.len()
    }

    fn realize(
        &mut self,
        part: usize,
        eta: &[usize],
        nu: &[usize],
        exclude: &[usize],
    ) -> Option<usize> {
        self.parts[part]
            .iter()
            .copied()
            .filter(|v| !exclude.contains(v))
            .find(|&a| {
                eta.iter().all(|&e| (self.rel)(a, e)) && nu.iter().all(|&v| !(self.rel)(a, v))
            })
    }

    fn related(&self, u: usize, v: usize) -> bool {
        (self.rel)(u, v)
    }
}

/// Grows a triangle-free lab on demand; realization only fails when the
/// positive pattern itself is contradictory there (an internal edge).
pub struct LabExtender<'a> {
    pub lab: &'a mut TfrgLab,
}

impl PatternRealizer for LabExtender<'_> {
    fn width(&self) -> usize {
        3
    }

    fn realize(
        &mut self,
        part: usize,
        eta: &[usize],
        nu: &[usize],
        exclude: &[usize],
    ) -> Option<usize> {
        let p = TfrgPart::ALL[part];
        self.lab.realize_avoiding(p, eta, nu, exclude).ok()
    }

    fn related(&self, u: usize, v: usize) -> bool {
        self.lab.structure().rel_edge("R", u, v)
    }
}

/// In-scope predecessor pattern for the slot at (row, col), 1-based
/// rows: every earlier slot in a scope column, split by template edge.
fn slot_pattern(
    template: &ConfigTemplate,
    chosen: &[usize],
    width: usize,
    slot: usize,
) -> (Vec<usize>, Vec<usize>) {
    let (row, col) = (slot / width + 1, slot % width);
    let scope = col_scope(col, width);
    let r = (row - 1) % template.height();
    let mut eta = Vec::new();
    let mut nu = Vec::new();
    for (prev, &elem) in chosen.iter().enumerate() {
        let (prow, pcol) = (prev / width + 1, prev % width);
        if !scope.contains(&pcol) {
            continue;
        }
        let pr = (prow - 1) % template.height();
        match template.edge((r, col), (pr, pcol)) {
            Some(true) => eta.push(elem),
            Some(false) => nu.push(elem),
            None => {}
        }
    }
    (eta, nu)
}

pub const DEFAULT_BACKTRACK_BUDGET: usize = 64;

/// Builds num_rows rows in helix order (row-major), each element
/// realizing the template pattern against every earlier element in its
/// column scope, rows read modulo the template height. Distinct
/// elements throughout. On a dead slot the helix retries earlier slots
/// with their next candidates, up to the budget, then reports the dead
/// slot's pattern. The finished grid is re-scanned pair by pair.
pub fn build_array(
    realizer: &mut dyn PatternRealizer,
    template: &ConfigTemplate,
    num_rows: usize,
    backtrack_budget: usize,
) -> Result<BlockArray, IndependenceError> {
    let width = template.width();
    if realizer.width() != width {
        return Err(IndependenceError::ShapeMismatch {
            what: "realizer parts",
            expected: width,
            got: realizer.width(),
        });
    }
    if num_rows == 0 || num_rows % template.height() != 0 {
        return Err(IndependenceError::Parameter(
            "row count must be a positive multiple of the template height".into(),
        ));
    }
    let total = num_rows * width;
    let mut chosen: Vec<usize> = Vec::with_capacity(total);
    let mut rejected: Vec<Vec<usize>> = vec![Vec::new(); total];
    // the deepest dead slot names the pattern worth reporting; the
    // root running out of retries is only a symptom of it
    let mut deepest: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    let mut backtracks = 0usize;
    while chosen.len() < total {
        let slot = chosen.len();
        let (eta, nu) = slot_pattern(template, &chosen, width, slot);
        let exclude: Vec<usize> = chosen
            .iter()
            .copied()
            .chain(rejected[slot].iter().copied())
            .collect();
        match realizer.realize(slot % width, &eta, &nu, &exclude) {
            Some(x) => chosen.push(x),
            None => {
                if deepest.as_ref().map_or(true, |(s, _, _)| slot >= *s) {
                    deepest = Some((slot, eta, nu));
                }
                if slot == 0 || backtracks >= backtrack_budget {
                    let (slot, eta, nu) = deepest.expect("recorded just above");
                    return Err(IndependenceError::Unrealizable {
                        row: slot / width + 1,
                        col: slot % width,
                        eta,
                        nu,
                    });
                }
                backtracks += 1;
                rejected[slot].clear();
                let prev = chosen.pop().expect("slot > 0");
                rejected[slot - 1].push(prev);
            }
        }
    }
    let array = BlockArray {
        h: template.height(),
        width,
        rows: chosen.chunks(width).map(|r| r.to_vec()).collect(),
    };
    if let Some((slot, prev)) = verify_array(&array, template, &|u, v| realizer.related(u, v)) {
        return Err(IndependenceError::Parameter(alloc::format!(
            "realizer element at row {}, column {} breaks the template against row {}, column {}",
            slot / width + 1,
            slot % width,
            prev / width + 1,
            prev % width
        )));
    }
    Ok(array)
}

/// First slot pair (later, earlier) violating the template's edge rule
/// over the full grid, or None when the array checks out.
pub fn verify_array(
    array: &BlockArray,
    template: &ConfigTemplate,
    rel: &dyn Fn(usize, usize) -> bool,
) -> Option<(usize, usize)> {
    let width = array.width;
    let flat: Vec<usize> = array.rows.iter().flatten().copied().collect();
    for slot in 0..flat.len() {
        let (row, col) = (slot / width + 1, slot % width);
        let scope = col_scope(col, width);
        let r = (row - 1) % template.height();
        for prev in 0..slot {
            let (prow, pcol) = (prev / width + 1, prev % width);
            if !scope.contains(&pcol) {
                continue;
            }
            let pr = (prow - 1) % template.height();
            if let Some(e) = template.edge((r, col), (pr, pcol)) {
                if rel(flat[slot], flat[prev]) != e {
                    return Some((slot, prev));
                }
            }
        }
    }
    None
}

// ----------------------------------------------------------- block comparison

/// Whether the later block's elements relate to the earlier block's
/// exactly as the template dictates, over every pair of rows and every
/// in-scope column pair.
pub fn less_ell(
    earlier: &[Vec<usize>],
    later: &[Vec<usize>],
    template: &ConfigTemplate,
    rel: &dyn Fn(usize, usize) -> bool,
) -> Result<bool, IndependenceError> {
    let h = template.height();
    let width = template.width();
    for (what, block) in [("earlier block", earlier), ("later block", later)] {
        if block.len() != h {
            return Err(IndependenceError::ShapeMismatch {
                what,
                expected: h,
                got: block.len(),
            });
        }
        if let Some(row) = block.iter().find(|r| r.len() != width) {
            return Err(IndependenceError::ShapeMismatch {
                what,
                expected: width,
                got: row.len(),
            });
        }
    }
    for t in 0..h {
        for i in 0..width {
            for tp in 0..h {
                for ip in col_scope(i, width) {
                    let e = template.edge((t, i), (tp, ip)).expect("cross-column");
                    if rel(later[t][i], earlier[tp][ip]) != e {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------- pseudo-loops

/// The ordered comparisons a loop instance must satisfy, as (from, to)
/// positions: the tail chain, the head's forward arcs up to the split,
/// and the back arcs above it.
pub fn loop_demands(n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..i {
            out.push((j, i));
        }
    }
    for j in 1..=m {
        out.push((0, j));
    }
    for j in (m + 1)..=n {
        out.push((j, 0));
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopReport {
    /// candidate indices assigned to positions 0..=n
    pub indices: Vec<usize>,
    pub m: usize,
    /// every verified comparison, as positions into `indices`
    pub verified: Vec<(usize, usize)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LoopOutcome {
    Found(LoopReport),
    /// every assignment checked, none closes
    NoneExhaustive,
    NoneWithinBudget,
}

/// Searches ordered selections of n+1 distinct candidate blocks and all
/// split points for a loop instance. The budget caps how many
/// (selection, split) combinations are evaluated.
pub fn pseudo_loop_search(
    candidates: &[Vec<Vec<usize>>],
    template: &ConfigTemplate,
    rel: &dyn Fn(usize, usize) -> bool,
    n: usize,
    budget: usize,
) -> Result<LoopOutcome, IndependenceError> {
    if n < 2 {
        return Err(IndependenceError::Parameter(
            "loops need n ≥ 2 (no split point exists below that)".into(),
        ));
    }
    if candidates.len() < n + 1 {
        return Ok(LoopOutcome::NoneExhaustive);
    }
    let mut spent = 0usize;
    let mut assignment: Vec<usize> = Vec::with_capacity(n + 1);
    fn assign(
        candidates: &[Vec<Vec<usize>>],
        template: &ConfigTemplate,
        rel: &dyn Fn(usize, usize) -> bool,
        n: usize,
        budget: usize,
        spent: &mut usize,
        assignment: &mut Vec<usize>,
    ) -> Result<Option<LoopReport>, IndependenceError> {
        if assignment.len() == n + 1 {
            for m in 1..n {
                if *spent >= budget {
                    return Ok(None);
                }
                *spent += 1;
                let demands = loop_demands(n, m);
                let mut ok = true;
                for &(from, to) in &demands {
                    if !less_ell(
                        &candidates[assignment[from]],
                        &candidates[assignment[to]],
                        template,
                        rel,
                    )? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    return Ok(Some(LoopReport {
                        indices: assignment.clone(),
                        m,
                        verified: demands,
                    }));
                }
            }
            return Ok(None);
        }
        for c in 0..candidates.len() {
            if assignment.contains(&c) {
                continue;
            }
            assignment.push(c);
            let r = assign(candidates, template, rel, n, budget, spent, assignment)?;
            if r.is_some() {
                return Ok(r);
            }
            assignment.pop();
            if *spent >= budget {
                return Ok(None);
            }
        }
        Ok(None)
    }
    let found = assign(
        candidates,
        template,
        rel,
        n,
        budget,
        &mut spent,
        &mut assignment,
    )?;
    Ok(match found {
        Some(report) => LoopOutcome::Found(report),
        None if spent >= budget => LoopOutcome::NoneWithinBudget,
        None => LoopOutcome::NoneExhaustive,
    })
}

/// Recomputes every comparison a report claims.
pub fn validate_loop(
    report: &LoopReport,
    candidates: &[Vec<Vec<usize>>],
    template: &ConfigTemplate,
    rel: &dyn Fn(usize, usize) -> bool,
) -> Result<bool, IndependenceError> {
    let n = report.indices.len().saturating_sub(1);
    if n < 2 || report.m == 0 || report.m >= n {
        return Ok(false);
    }
    if report.verified != loop_demands(n, report.m) {
        return Ok(false);
    }
    for &(from, to) in &report.verified {
        let (cf, ct) = (report.indices[from], report.indices[to]);
        if cf >= candidates.len() || ct >= candidates.len() {
            return Ok(false);
        }
        if !less_ell(&candidates[cf], &candidates[ct], template, rel)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// --------------------------------------------------------- rigidity from blocks

pub enum WitnessMode {
    /// every (n+1)-th array block is held out as a witness between
    /// consecutive tuples
    GapLayout,
    /// caller-provided witness blocks, one per gap
    Supplied(Vec<Vec<Vec<usize>>>),
    /// no witnesses; the interleaving condition is not checked
    Skip,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockChainReport {
    /// block tuples playing the ordered sequence, as candidate indices
    pub tuples: Vec<Vec<usize>>,
    pub witness_blocks: Vec<usize>,
    /// "gap-layout", "supplied" or "skipped"
    pub witness_source: &'static str,
    /// no candidate block sits on both sides of one tuple
    pub cond1: bool,
    /// each witness is above the tuples before its gap, below the rest;
    /// None when skipped
    pub cond2: Option<bool>,
    /// no candidate block is above a later tuple and below an earlier
    pub cond3: bool,
    pub cond1_loop: Option<LoopReport>,
    pub cond3_loop: Option<LoopReport>,
    /// (witness, tuple) of the first interleaving failure
    pub cond2_failure: Option<(usize, usize)>,
    /// fewer than two tuples: the crossing condition had no instances
    pub degenerate: bool,
}

impl BlockChainReport {
    pub fn holds(&self) -> bool {
        self.cond1 && self.cond2.unwrap_or(true) && self.cond3
    }
}

/// Orders array blocks into tuples, optionally interleaves witnesses,
/// and checks the three rigidity conditions with block comparison as
/// the only primitive: forward = every tuple member below x, backward
/// = x below every member, tuple members chained in order. Violations
/// of the two contradiction conditions are returned as loop reports
/// over the candidate list (array blocks, then witnesses, then
/// extras); extra candidates join the x-search but are exempt from the
/// chain precondition.
pub fn check_block_chain(
    array: &BlockArray,
    template: &ConfigTemplate,
    rel: &dyn Fn(usize, usize) -> bool,
    mode: WitnessMode,
    extra_candidates: &[Vec<Vec<usize>>],
) -> Result<BlockChainReport, IndependenceError> {
    if array.h != template.height() || array.width != template.width() {
        return Err(IndependenceError::ShapeMismatch {
            what: "array grid",
            expected: template.height() * template.width(),
            got: array.h * array.width,
        });
    }
    let n = array.width - 1;
    if n < 2 {
        return Err(IndependenceError::Parameter(
            "rigidity needs at least three columns".into(),
        ));
    }
    let blocks = array.blocks();
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            if !less_ell(&blocks[i], &blocks[j], template, rel)? {
                return Err(IndependenceError::ChainViolation { i, j });
            }
        }
    }
    let mut candidates: Vec<Vec<Vec<usize>>> = blocks.clone();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut witness_blocks: Vec<usize> = Vec::new();
    let witness_source;
    match mode {
        WitnessMode::GapLayout => {
            witness_source = "gap-layout";
            let mut b = 0;
            while b + n <= blocks.len() {
                tuples.push((b..b + n).collect());
                // a witness sits in a gap only when another tuple follows
                if b + 2 * n + 1 <= blocks.len() {
                    witness_blocks.push(b + n);
                    b += n + 1;
                } else {
                    b += n;
                }
            }
        }
        WitnessMode::Supplied(ws) => {
            witness_source = "supplied";
            for w in ws {
                witness_blocks.push(candidates.len());
                candidates.push(w);
            }
            let mut b = 0;
            while b + n <= blocks.len() {
                tuples.push((b..b + n).collect());
                b += n;
            }
        }
        WitnessMode::Skip => {
            witness_source = "skipped";
            let mut b = 0;
            while b + n <= blocks.len() {
                tuples.push((b..b + n).collect());
                b += n;
            }
        }
    }
    candidates.extend(extra_candidates.iter().cloned());
    let above = |x: usize, tuple: &[usize]| -> Result<bool, IndependenceError> {
        // every tuple member below x
        for &b in tuple {
            if b == x || !less_ell(&candidates[b], &candidates[x], template, rel)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let below = |x: usize, tuple: &[usize]| -> Result<bool, IndependenceError> {
        for &b in tuple {
            if b == x || !less_ell(&candidates[x], &candidates[b], template, rel)? {
                return Ok(false);
            }
        }
        Ok(true)
    };

    let mut cond1 = true;
    let mut cond1_loop = None;
    'c1: for tuple in &tuples {
        for x in 0..candidates.len() {
            if above(x, tuple)? && below(x, tuple)? {
                cond1 = false;
                let mut indices = vec![x];
                indices.extend_from_slice(tuple);
                cond1_loop = Some(LoopReport {
                    indices,
                    m: 1,
                    verified: loop_demands(n, 1),
                });
                break 'c1;
            }
        }
    }

    let mut cond2 = None;
    let mut cond2_failure = None;
    if !matches!(witness_source, "skipped") {
        let mut ok = true;
        'c2: for (t, &w) in witness_blocks.iter().enumerate() {
            for (i, tuple) in tuples.iter().enumerate() {
                let needed = if i <= t {
                    above(w, tuple)?
                } else {
                    below(w, tuple)?
                };
                if !needed {
                    ok = false;
                    cond2_failure = Some((t, i));
                    break 'c2;
                }
            }
        }
        cond2 = Some(ok);
    }

    let mut cond3 = true;
    let mut cond3_loop = None;
    'c3: for i in 0..tuples.len() {
        for j in (i + 1)..tuples.len() {
            for x in 0..candidates.len() {
                if above(x, &tuples[j])? && below(x, &tuples[i])? {
                    cond3 = false;
                    let mut indices = vec![x];
                    indices.extend_from_slice(&tuples[i]);
                    indices.extend_from_slice(&tuples[j]);
                    cond3_loop = Some(LoopReport {
                        indices,
                        m: n,
                        verified: loop_demands(2 * n, n),
                    });
                    break 'c3;
                }
            }
        }
    }

    let degenerate = tuples.len() < 2;
    Ok(BlockChainReport {
        tuples,
        witness_blocks,
        witness_source,
        cond1,
        cond2,
        cond3,
        cond1_loop,
        cond3_loop,
        cond2_failure,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rat::rat;
    use crate::structures::{gen_random_graph, gen_tfrg_staged};

    #[test]
    fn template_validation_and_lookup() {
        let t = ConfigTemplate::triangle();
        assert_eq!((t.height(), t.width()), (1, 3));
        assert_eq!(t.edge((0, 0), (0, 1)), Some(true));
        assert_eq!(t.edge((0, 1), (0, 0)), Some(true));
        assert_eq!(t.edge((0, 0), (0, 0)), None);
        let zero = ConfigTemplate::new(1, 3, &[]).unwrap();
        assert_eq!(zero.edge((0, 0), (0, 2)), Some(false));
        assert!(ConfigTemplate::new(2, 2, &[((0, 0), (1, 0))]).is_err());
        assert!(ConfigTemplate::new(1, 3, &[((0, 0), (0, 3))]).is_err());
    }

    #[test]
    fn embedding_search_matches_structure() {
        let tri = ConfigTemplate::triangle();
        let k4 = Graph::complete(4);
        let rel = |u: usize, v: usize| k4.has_edge(u, v);
        let hit = find_template_embedding(4, &rel, &tri).expect("triangles everywhere");
        assert_eq!(hit.len(), 3);
        let s = gen_tfrg_staged(2, 2).unwrap();
        let rel_t = |u: usize, v: usize| s.rel_edge("R", u, v);
        assert!(find_template_embedding(s.universe_size(), &rel_t, &tri).is_none());
        // the two-row, two-column all-ones template is a 4-cycle
        let c4 = ConfigTemplate::new(
            2,
            2,
            &[
                ((0, 0), (0, 1)),
                ((0, 0), (1, 1)),
                ((1, 0), (0, 1)),
                ((1, 0), (1, 1)),
            ],
        )
        .unwrap();
        let cyc = Graph::cycle(4);
        let rel_c = |u: usize, v: usize| cyc.has_edge(u, v);
        assert!(find_template_embedding(4, &rel_c, &c4).is_some());
        let path = path_graph(6);
        let rel_p = |u: usize, v: usize| path.has_edge(u, v);
        assert!(find_template_embedding(6, &rel_p, &c4).is_none());
    }

    fn path_graph(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    #[test]
    fn forbidden_config_is_the_triangle_for_the_lab_family() {
        let mut family =
            |seed: u64| gen_tfrg_staged(1 + (seed % 2) as usize, 2);
        let out = find_forbidden_config(&mut family, &[0, 1, 2], 2, 1).unwrap();
        match out {
            ForbiddenOutcome::Found { template, corpus } => {
                assert_eq!(template, ConfigTemplate::triangle());
                assert_eq!(corpus, 3);
            }
            ForbiddenOutcome::NotFound => panic!("triangles are never realized"),
        }
    }

    #[test]
    fn forbidden_config_finds_nothing_on_dense_random_graphs() {
        let mut family = |seed: u64| gen_random_graph(24, rat(1, 2), seed);
        let out = find_forbidden_config(&mut family, &[1, 2, 3], 2, 1).unwrap();
        assert_eq!(out, ForbiddenOutcome::NotFound);
    }

    #[test]
    fn forbidden_config_recovers_a_planted_four_cycle_gap() {
        // long paths realize every height-2 two-column pattern except
        // the full 4-cycle
        let mut family = |seed: u64| {
            Ok(FiniteStructure::from_graph(
                &path_graph(10 + (seed % 3) as usize),
                "R",
            ))
        };
        let out = find_forbidden_config(&mut family, &[0, 1, 2], 1, 2).unwrap();
        let expected = ConfigTemplate::new(
            2,
            2,
            &[
                ((0, 0), (0, 1)),
                ((0, 0), (1, 1)),
                ((1, 0), (0, 1)),
                ((1, 0), (1, 1)),
            ],
        )
        .unwrap();
        assert_eq!(
            out,
            ForbiddenOutcome::Found {
                template: expected,
                corpus: 3
            }
        );
    }

    #[test]
    fn single_part_is_vacuously_independent() {
        let g = Graph::complete(4);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let v = independence_depth(&[vec![0, 1, 2, 3]], &rel, 1, 1, None).unwrap();
        assert!(v.holds && v.vacuous);
    }

    fn stage_pools(s: &FiniteStructure) -> Vec<Vec<usize>> {
        ["X", "Y", "Z"]
            .iter()
            .map(|p| {
                let mut pool = s.part(&alloc::format!("{p}0")).unwrap().to_vec();
                pool.extend_from_slice(s.part(&alloc::format!("{p}1")).unwrap());
                pool
            })
            .collect()
    }

    #[test]
    fn lab_triple_is_deep_at_two_but_not_three() {
        let mut lab = TfrgLab::new(2, 2).unwrap();
        let pools = stage_pools(lab.structure());
        // witnesses for the cross-part independent pairs, so only the
        // genuinely contradictory patterns stay unrealized
        let singletons: Vec<Vec<usize>> =
            pools.iter().flatten().map(|&v| vec![v]).collect();
        lab.saturate_pool_unions(&singletons, 2).unwrap();
        let parts: Vec<Vec<usize>> = TfrgPart::ALL
            .iter()
            .map(|&p| lab.part_members(p).to_vec())
            .collect();
        let s = lab.structure();
        let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
        let v2 = independence_depth(&parts, &rel, 2, 1, Some(&pools)).unwrap();
        assert!(v2.holds, "{:?}", v2.checks.iter().find(|c| !c.holds));
        let v3 = independence_depth(&parts, &rel, 3, 1, Some(&pools)).unwrap();
        assert!(!v3.holds);
        let bad = v3.checks.iter().find(|c| !c.holds).unwrap();
        let (eta, nu) = bad.failure.as_ref().unwrap();
        assert_eq!((eta.len(), nu.len()), (2, 0));
        assert!(
            rel(eta[0], eta[1]),
            "a shared neighbor of this pair would close a triangle"
        );
    }

    fn complete_tripartite(sizes: [usize; 3]) -> (Graph, Vec<Vec<usize>>) {
        let n: usize = sizes.iter().sum();
        let mut parts = Vec::new();
        let mut at = 0;
        for s in sizes {
            parts.push((at..at + s).collect::<Vec<_>>());
            at += s;
        }
        let mut g = Graph::new(n);
        for i in 0..3 {
            for j in (i + 1)..3 {
                for &u in &parts[i] {
                    for &v in &parts[j] {
                        g.add_edge(u, v);
                    }
                }
            }
        }
        (g, parts)
    }

    #[test]
    fn complete_tripartite_fails_on_negative_patterns() {
        let (g, parts) = complete_tripartite([3, 3, 3]);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let v = independence_depth(&parts, &rel, 3, 1, None).unwrap();
        assert!(!v.holds);
        let bad = v.checks.iter().find(|c| !c.holds).unwrap();
        let (eta, nu) = bad.failure.as_ref().unwrap();
        assert!(eta.is_empty() && nu.len() == 1, "no non-neighbors exist");
    }

    #[test]
    fn depth_is_antitone_in_k_and_cap() {
        let s = gen_random_graph(18, rat(1, 2), 11).unwrap();
        let g = s.to_graph("R").unwrap();
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let parts: Vec<Vec<usize>> =
            vec![(0..6).collect(), (6..12).collect(), (12..18).collect()];
        let mut grid = [[false; 2]; 3];
        for (ki, k) in [1usize, 2, 3].iter().enumerate() {
            for (si, cap) in [1usize, 2].iter().enumerate() {
                grid[ki][si] = independence_depth(&parts, &rel, *k, *cap, None)
                    .unwrap()
                    .holds;
            }
        }
        for ki in 0..3 {
            for si in 0..2 {
                if grid[ki][si] {
                    for ki2 in 0..=ki {
                        for si2 in 0..=si {
                            assert!(grid[ki2][si2], "pass at larger scope must persist below");
                        }
                    }
                }
            }
        }
        let profile = depth_profile(&parts, &rel, 3, 1, None).unwrap();
        assert_eq!(profile.rows.len(), 3);
        let expect = profile
            .rows
            .iter()
            .filter(|&&(_, ok)| ok)
            .map(|&(k, _)| k)
            .max()
            .unwrap_or(0);
        assert_eq!(profile.max_depth, expect);
    }

    fn lab_array(num_rows: usize) -> (TfrgLab, BlockArray) {
        let mut lab = TfrgLab::new(2, 2).unwrap();
        let template = ConfigTemplate::triangle();
        let array = {
            let mut realizer = LabExtender { lab: &mut lab };
            build_array(&mut realizer, &template, num_rows, DEFAULT_BACKTRACK_BUDGET).unwrap()
        };
        (lab, array)
    }

    #[test]
    fn helix_array_over_the_lab_satisfies_the_template() {
        let (lab, array) = lab_array(6);
        assert_eq!((array.rows.len(), array.width, array.h), (6, 3, 1));
        let s = lab.structure();
        let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
        assert_eq!(verify_array(&array, &ConfigTemplate::triangle(), &rel), None);
        // columns live in their parts and never repeat an element
        let mut seen = BTreeSet::new();
        for row in &array.rows {
            for (k, &v) in row.iter().enumerate() {
                assert_eq!(lab.part_of(v), Some(TfrgPart::ALL[k]));
                assert!(seen.insert(v));
            }
        }
        // the first column relates forward to every earlier third column
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(rel(array.rows[i][1], array.rows[j][0]), j <= i, "({i},{j})");
                assert_eq!(rel(array.rows[i][2], array.rows[j][1]), j <= i, "({i},{j})");
                assert_eq!(rel(array.rows[i][0], array.rows[j][2]), j < i, "({i},{j})");
            }
        }
        // blocks chain in order
        let template = ConfigTemplate::triangle();
        let blocks = array.blocks();
        for i in 0..blocks.len() {
            for j in 0..blocks.len() {
                let expect = i < j;
                assert_eq!(
                    less_ell(&blocks[i], &blocks[j], &template, &rel).unwrap(),
                    expect,
                    "blocks ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn loop_search_is_empty_over_the_lab_array() {
        let (lab, array) = lab_array(6);
        let s = lab.structure();
        let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
        let template = ConfigTemplate::triangle();
        let out =
            pseudo_loop_search(&array.blocks(), &template, &rel, 2, 100_000).unwrap();
        assert_eq!(out, LoopOutcome::NoneExhaustive);
    }

    #[test]
    fn lab_array_passes_all_three_conditions() {
        let (lab, array) = lab_array(6);
        let s = lab.structure();
        let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
        let template = ConfigTemplate::triangle();
        let report =
            check_block_chain(&array, &template, &rel, WitnessMode::GapLayout, &[]).unwrap();
        assert_eq!(report.witness_source, "gap-layout");
        assert_eq!(report.tuples, vec![vec![0, 1], vec![3, 4]]);
        assert_eq!(report.witness_blocks, vec![2]);
        assert!(report.cond1 && report.cond3);
        assert_eq!(report.cond2, Some(true));
        assert!(!report.degenerate);
        assert!(report.holds());
    }

    #[test]
    fn supplied_witnesses_interleave_between_tuples() {
        // five chained triples; the middle one is handed in as the
        // witness instead of sitting in the array
        let mut pairs = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                pairs.push((i, j));
            }
        }
        let (g, grids) = plant(&pairs, 5);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let template = ConfigTemplate::triangle();
        let array = BlockArray {
            h: 1,
            width: 3,
            rows: [0usize, 1, 3, 4]
                .iter()
                .map(|&t| vec![3 * t, 3 * t + 1, 3 * t + 2])
                .collect(),
        };
        let report = check_block_chain(
            &array,
            &template,
            &rel,
            WitnessMode::Supplied(vec![grids[2].clone()]),
            &[],
        )
        .unwrap();
        assert_eq!(report.witness_source, "supplied");
        assert_eq!(report.tuples, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(report.witness_blocks, vec![4]);
        assert_eq!(report.cond2, Some(true));
        assert!(report.holds());
    }

    #[test]
    fn single_block_report_is_degenerate() {
        let (lab, array) = lab_array(1);
        let s = lab.structure();
        let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
        let template = ConfigTemplate::triangle();
        let report = check_block_chain(&array, &template, &rel, WitnessMode::Skip, &[]).unwrap();
        assert!(report.degenerate);
        assert!(report.cond1 && report.cond3);
        assert_eq!(report.cond2, None);
    }

    #[test]
    fn all_zero_template_builds_by_avoidance() {
        let g = Graph::new(9);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let parts: Vec<Vec<usize>> =
            vec![(0..3).collect(), (3..6).collect(), (6..9).collect()];
        let zero = ConfigTemplate::new(1, 3, &[]).unwrap();
        let mut realizer = ExistingParts {
            parts: &parts,
            rel: &rel,
        };
        let array = build_array(&mut realizer, &zero, 3, DEFAULT_BACKTRACK_BUDGET).unwrap();
        assert_eq!(verify_array(&array, &zero, &rel), None);
    }

    #[test]
    fn unrealizable_pattern_is_named() {
        let (g, parts) = complete_tripartite([2, 2, 2]);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let zero = ConfigTemplate::new(1, 3, &[]).unwrap();
        let mut realizer = ExistingParts {
            parts: &parts,
            rel: &rel,
        };
        match build_array(&mut realizer, &zero, 3, 4) {
            Err(IndependenceError::Unrealizable { col, eta, nu, .. }) => {
                assert!(eta.is_empty());
                assert!(!nu.is_empty(), "column {col} must avoid a neighbor");
            }
            other => panic!("expected an unrealizable pattern, got {other:?}"),
        }
    }

    // triple blocks with hand-planted comparisons: block t occupies
    // vertices 3t..3t+3 as (x, y, z)
    fn plant(pairs: &[(usize, usize)], blocks: usize) -> (Graph, Vec<Vec<Vec<usize>>>) {
        let mut g = Graph::new(3 * blocks);
        for &(p, q) in pairs {
            let (xp, yp, zp) = (3 * p, 3 * p + 1, 3 * p + 2);
            let (xq, yq, zq) = (3 * q, 3 * q + 1, 3 * q + 2);
            // earlier p, later q: x_q R z_p, y_q R x_p, z_q R y_p
            g.add_edge(xq, zp);
            g.add_edge(yq, xp);
            g.add_edge(zq, yp);
        }
        let grids = (0..blocks)
            .map(|t| vec![vec![3 * t, 3 * t + 1, 3 * t + 2]])
            .collect();
        (g, grids)
    }

    #[test]
    fn less_ell_is_exactly_the_planted_set() {
        let (g, grids) = plant(&[(0, 1)], 2);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let template = ConfigTemplate::triangle();
        assert!(less_ell(&grids[0], &grids[1], &template, &rel).unwrap());
        assert!(!less_ell(&grids[1], &grids[0], &template, &rel).unwrap());
        // dropping one conjunct kills the comparison
        let mut g2 = Graph::new(6);
        g2.add_edge(3, 2);
        g2.add_edge(4, 0);
        let rel2 = |u: usize, v: usize| g2.has_edge(u, v);
        assert!(!less_ell(&grids[0], &grids[1], &template, &rel2).unwrap());
        // a block never compares to itself on an edge-free structure
        let empty = Graph::new(6);
        let rel3 = |u: usize, v: usize| empty.has_edge(u, v);
        assert!(!less_ell(&grids[0], &grids[0], &template, &rel3).unwrap());
    }

    #[test]
    fn planted_three_loop_is_found_and_revalidates() {
        let (g, grids) = plant(&[(0, 1), (1, 2), (2, 0)], 3);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let template = ConfigTemplate::triangle();
        let out = pseudo_loop_search(&grids, &template, &rel, 2, 10_000).unwrap();
        let LoopOutcome::Found(report) = out else {
            panic!("planted loop not found: {out:?}");
        };
        assert!(validate_loop(&report, &grids, &template, &rel).unwrap());
        // too few candidates, then a starved budget
        let out2 = pseudo_loop_search(&grids[..2], &template, &rel, 2, 10_000).unwrap();
        assert_eq!(out2, LoopOutcome::NoneExhaustive);
        let out3 = pseudo_loop_search(&grids, &template, &rel, 2, 0).unwrap();
        assert_eq!(out3, LoopOutcome::NoneWithinBudget);
    }

    #[test]
    fn planted_crossing_flips_only_the_third_condition() {
        // six chained blocks plus a stray that sits above tuple 2 and
        // below tuple 1
        let mut pairs = Vec::new();
        for i in 0..6 {
            for j in (i + 1)..6 {
                pairs.push((i, j));
            }
        }
        pairs.push((6, 0));
        pairs.push((6, 1));
        pairs.push((2, 6));
        pairs.push((3, 6));
        let (g, grids) = plant(&pairs, 7);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let template = ConfigTemplate::triangle();
        let array = BlockArray {
            h: 1,
            width: 3,
            rows: (0..6).map(|t| vec![3 * t, 3 * t + 1, 3 * t + 2]).collect(),
        };
        let extra = vec![grids[6].clone()];
        let report =
            check_block_chain(&array, &template, &rel, WitnessMode::Skip, &extra).unwrap();
        assert!(report.cond1, "the stray never brackets a single tuple");
        assert!(!report.cond3);
        let lr = report.cond3_loop.as_ref().unwrap();
        assert_eq!(lr.indices, vec![6, 0, 1, 2, 3]);
        assert_eq!(lr.m, 2);
        let mut candidates = array.blocks();
        candidates.extend(extra.iter().cloned());
        assert!(validate_loop(lr, &candidates, &template, &rel).unwrap());
    }

    #[test]
    fn chain_violation_reports_before_rigidity() {
        let (g, _) = plant(&[(0, 1)], 3);
        let rel = |u: usize, v: usize| g.has_edge(u, v);
        let template = ConfigTemplate::triangle();
        let array = BlockArray {
            h: 1,
            width: 3,
            rows: (0..3).map(|t| vec![3 * t, 3 * t + 1, 3 * t + 2]).collect(),
        };
        match check_block_chain(&array, &template, &rel, WitnessMode::Skip, &[]) {
            Err(IndependenceError::ChainViolation { i: 0, j: 2 }) => {}
            other => panic!("expected the missing (0,2) comparison, got {other:?}"),
        }
    }

    #[test]
    fn loop_demands_enumerate_the_displayed_conjunction() {
        assert_eq!(loop_demands(2, 1), vec![(1, 2), (0, 1), (2, 0)]);
        let d = loop_demands(4, 2);
        assert!(d.contains(&(0, 1)) && d.contains(&(0, 2)));
        assert!(d.contains(&(3, 0)) && d.contains(&(4, 0)));
        assert!(d.contains(&(1, 4)) && !d.contains(&(1, 0)));
    }
}
