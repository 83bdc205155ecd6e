//! Characteristic sequences: the hypergraph levels P_n of a formula over
//! a structure, on an explicit pool of parameter tuples.
//!
//! P_n(S) asks for one witness tuple satisfying φ against every tuple in
//! S. Duplicates in S are redundant, so membership only depends on the
//! distinct set; everything is answered from per-tuple satisfier bitsets,
//! with P_1 and P_2 materialized and higher levels intersected on demand.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{for_each_multiset, Bitset};
use crate::graph::Graph;
use crate::structures::{FiniteStructure, Formula, StructureError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CharSeqError {
    Structure(StructureError),
    LevelAboveMax { n: usize, max: usize },
    BadIndex { index: usize, pool: usize },
    BadFragment { reason: &'static str },
}

impl From<StructureError> for CharSeqError {
    fn from(e: StructureError) -> Self {
        CharSeqError::Structure(e)
    }
}

impl core::fmt::Display for CharSeqError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CharSeqError::Structure(e) => write!(f, "{e}"),
            CharSeqError::LevelAboveMax { n, max } => {
                write!(f, "level {n} above computed maximum {max}")
            }
            CharSeqError::BadIndex { index, pool } => {
                write!(f, "tuple index {index} outside pool of {pool}")
            }
            CharSeqError::BadFragment { reason } => write!(f, "bad array fragment: {reason}"),
        }
    }
}

impl core::error::Error for CharSeqError {}

/// Guard against accidentally quadratic-and-worse witness spaces; the
/// built-in formulas all have one-element witnesses.
pub const MAX_WITNESS_SPACE: u64 = 1 << 22;

pub struct CharSeq<'a> {
    structure: &'a FiniteStructure,
    formula: &'a dyn Formula,
    pool: Vec<Vec<usize>>,
    max_level: usize,
    /// sat[i] = witness tuples (flattened) satisfying φ(·; pool[i])
    sat: Vec<Bitset>,
    p1: Bitset,
    /// symmetric over pool indices; diagonal bit equals P_1
    p2: Vec<Bitset>,
}

pub fn compute_charseq<'a>(
    structure: &'a FiniteStructure,
    formula: &'a dyn Formula,
    max_level: usize,
    pool: &[Vec<usize>],
) -> Result<CharSeq<'a>, CharSeqError> {
    if max_level < 1 {
        return Err(StructureError::Parameter("max level must be ≥ 1".into()).into());
    }
    formula.validate(structure)?;
    let n = structure.universe_size();
    for t in pool {
        if t.len() != formula.parameter_arity() {
            return Err(StructureError::ArityMismatch {
                expected: formula.parameter_arity(),
                got: t.len(),
            }
            .into());
        }
        for &v in t {
            if v >= n {
                return Err(StructureError::OutOfRange {
                    what: "pool tuple entry",
                    index: v,
                    n,
                }
                .into());
            }
        }
    }
    let lx = formula.object_arity();
    let space = (n as u64).checked_pow(lx as u32).unwrap_or(u64::MAX);
    if space > MAX_WITNESS_SPACE {
        return Err(StructureError::Parameter("witness tuple space too large".into()).into());
    }
    let space = space as usize;

    let mut sat = vec![Bitset::new(space); pool.len()];
    let mut x = vec![0usize; lx];
    for flat in 0..space {
        // odometer decode of the witness tuple
        let mut rest = flat;
        for slot in x.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        for (i, t) in pool.iter().enumerate() {
            if formula.eval(structure, &x, t) {
                sat[i].insert(flat);
            }
        }
    }
    let mut p1 = Bitset::new(pool.len());
    for (i, s) in sat.iter().enumerate() {
        if !s.is_empty() {
            p1.insert(i);
        }
    }
    let mut p2 = vec![Bitset::new(pool.len()); pool.len()];
    for i in 0..pool.len() {
        for j in i..pool.len() {
            if sat[i].intersects(&sat[j]) {
                p2[i].insert(j);
                p2[j].insert(i);
            }
        }
    }
    Ok(CharSeq {
        structure,
        formula,
        pool: pool.to_vec(),
        max_level,
        sat,
        p1,
        p2,
    })
}

impl<'a> CharSeq<'a> {
    pub fn structure(&self) -> &'a FiniteStructure {
        self.structure
    }

    pub fn formula(&self) -> &dyn Formula {
        self.formula
    }

    pub fn pool(&self) -> &[Vec<usize>] {
        &self.pool
    }

    pub fn pool_len(&self) -> usize {
        self.pool.len()
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn in_p1(&self, i: usize) -> bool {
        self.p1.contains(i)
    }

    pub fn in_p2(&self, i: usize, j: usize) -> bool {
        self.p2[i].contains(j)
    }

    pub fn sat(&self, i: usize) -> &Bitset {
        &self.sat[i]
    }

    fn check_selection(&self, sel: &[usize]) -> Result<(), CharSeqError> {
        if sel.is_empty() || sel.len() > self.max_level {
            return Err(CharSeqError::LevelAboveMax {
                n: sel.len(),
                max: self.max_level,
            });
        }
        for &i in sel {
            if i >= self.pool.len() {
                return Err(CharSeqError::BadIndex {
                    index: i,
                    pool: self.pool.len(),
                });
            }
        }
        Ok(())
    }

    fn intersection(&self, sel: &[usize]) -> Bitset {
        let mut acc = self.sat[sel[0]].clone();
        for &i in &sel[1..] {
            acc.intersect_with(&self.sat[i]);
        }
        acc
    }

    /// P_{|sel|} membership of the multiset of pool indices `sel`.
    pub fn holds(&self, sel: &[usize]) -> Result<bool, CharSeqError> {
        self.check_selection(sel)?;
        match sel.len() {
            1 => Ok(self.in_p1(sel[0])),
            2 => Ok(self.in_p2(sel[0], sel[1])),
            _ => Ok(!self.intersection(sel).is_empty()),
        }
    }

    /// One witness tuple for a positive instance, None for a negative one.
    pub fn witness(&self, sel: &[usize]) -> Result<Option<Vec<usize>>, CharSeqError> {
        self.check_selection(sel)?;
        Ok(self.intersection(sel).first().map(|flat| {
            let n = self.structure.universe_size();
            let mut x = vec![0usize; self.formula.object_arity()];
            let mut rest = flat;
            for slot in x.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            x
        }))
    }

    /// The compressed support-2 reading: every pair of entries in P_2.
    pub fn holds_via_pairs(&self, sel: &[usize]) -> Result<bool, CharSeqError> {
        self.check_selection(sel)?;
        for (a, &i) in sel.iter().enumerate() {
            for &j in &sel[a..] {
                if !self.in_p2(i, j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// All n-element multisets (as sorted index sequences) in P_n.
    pub fn level_members(&self, n: usize) -> Result<Vec<Vec<usize>>, CharSeqError> {
        if n < 1 || n > self.max_level {
            return Err(CharSeqError::LevelAboveMax {
                n,
                max: self.max_level,
            });
        }
        let mut out = Vec::new();
        let mut err = None;
        for_each_multiset(self.pool.len(), n, &mut |sel| {
            match self.holds(sel) {
                Ok(true) => out.push(sel.to_vec()),
                Ok(false) => {}
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            }
            true
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// P_2 as a loop-free graph on pool indices.
    pub fn p2_graph(&self) -> Graph {
        let mut g = Graph::new(self.pool.len());
        for i in 0..self.pool.len() {
            for j in self.p2[i].iter() {
                if j > i {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckVerdict {
    pub holds: bool,
    /// a violating selection of pool indices, when holds is false
    pub counterexample: Option<Vec<usize>>,
}

impl CheckVerdict {
    fn pass() -> Self {
        CheckVerdict {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(sel: &[usize]) -> Self {
        CheckVerdict {
            holds: false,
            counterexample: Some(sel.to_vec()),
        }
    }
}

/// Does P_n membership coincide with "P_k on every k-sub-multiset", over
/// every n-multiset from the pool?
pub fn support_check(cs: &CharSeq<'_>, k: usize, n: usize) -> Result<CheckVerdict, CharSeqError> {
    if k < 1 || k > n {
        return Err(StructureError::Parameter("need 1 ≤ k ≤ n".into()).into());
    }
    if n > cs.max_level() {
        return Err(CharSeqError::LevelAboveMax {
            n,
            max: cs.max_level(),
        });
    }
    let mut verdict = CheckVerdict::pass();
    let mut err = None;
    for_each_multiset(cs.pool_len(), n, &mut |sel| {
        let all_subs = all_sub_multisets_hold(cs, sel, k);
        let (Ok(subs), Ok(whole)) = (all_subs, cs.holds(sel)) else {
            err = Some(CharSeqError::LevelAboveMax {
                n,
                max: cs.max_level(),
            });
            return false;
        };
        if whole != subs {
            verdict = CheckVerdict::fail(sel);
            return false;
        }
        true
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(verdict)
}

fn all_sub_multisets_hold(
    cs: &CharSeq<'_>,
    sel: &[usize],
    k: usize,
) -> Result<bool, CharSeqError> {
    // choose k positions of sel; multiset sub-selection
    let mut positions = vec![0usize; k];
    fn rec(
        cs: &CharSeq<'_>,
        sel: &[usize],
        positions: &mut Vec<usize>,
        depth: usize,
        start: usize,
        k: usize,
    ) -> Result<bool, CharSeqError> {
        if depth == k {
            let sub: Vec<usize> = positions.iter().map(|&p| sel[p]).collect();
            return cs.holds(&sub);
        }
        for p in start..=(sel.len() - (k - depth)) {
            positions[depth] = p;
            if !rec(cs, sel, positions, depth + 1, p + 1, k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
    rec(cs, sel, &mut positions, 0, 0, k)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BaseSetVerdict {
    pub holds: bool,
    pub witness: Option<Vec<usize>>,
}

/// Is there one witness satisfying φ against every tuple in A? The empty
/// set holds vacuously. Level limits don't apply: this is a single
/// intersection, not a level query.
pub fn positive_base_set_check(
    cs: &CharSeq<'_>,
    a_set: &[usize],
) -> Result<BaseSetVerdict, CharSeqError> {
    for &i in a_set {
        if i >= cs.pool_len() {
            return Err(CharSeqError::BadIndex {
                index: i,
                pool: cs.pool_len(),
            });
        }
    }
    let space = {
        let n = cs.structure().universe_size() as u64;
        n.pow(cs.formula().object_arity() as u32) as usize
    };
    let mut acc = Bitset::full(space);
    for &i in a_set {
        acc.intersect_with(cs.sat(i));
    }
    let witness = acc.first().map(|flat| {
        let n = cs.structure().universe_size();
        let mut x = vec![0usize; cs.formula().object_arity()];
        let mut rest = flat;
        for slot in x.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        x
    });
    Ok(BaseSetVerdict {
        holds: witness.is_some(),
        witness,
    })
}

/// Two rows of pool indices, column-aligned.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArrayFragment {
    rows: [Vec<usize>; 2],
}

impl ArrayFragment {
    pub fn new(row0: Vec<usize>, row1: Vec<usize>) -> Result<Self, CharSeqError> {
        if row0.len() != row1.len() {
            return Err(CharSeqError::BadFragment {
                reason: "rows differ in width",
            });
        }
        if row0.is_empty() {
            return Err(CharSeqError::BadFragment {
                reason: "zero width",
            });
        }
        Ok(ArrayFragment { rows: [row0, row1] })
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn cell(&self, t: usize, i: usize) -> usize {
        self.rows[t][i]
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArrayVerdict {
    pub holds: bool,
    /// violating selection as (row, column) cells
    pub violation: Option<Vec<(usize, usize)>>,
}

/// The two-row array law at level n: a cell selection is in P exactly
/// when no column contributes both of its rows.
pub fn omega2_array_check(
    cs: &CharSeq<'_>,
    frag: &ArrayFragment,
    n: usize,
) -> Result<ArrayVerdict, CharSeqError> {
    if n > cs.max_level() {
        return Err(CharSeqError::LevelAboveMax {
            n,
            max: cs.max_level(),
        });
    }
    let w = frag.width();
    for t in 0..2 {
        for i in 0..w {
            if frag.cell(t, i) >= cs.pool_len() {
                return Err(CharSeqError::BadIndex {
                    index: frag.cell(t, i),
                    pool: cs.pool_len(),
                });
            }
        }
    }
    let cells = 2 * w;
    let mut verdict = ArrayVerdict {
        holds: true,
        violation: None,
    };
    let mut err = None;
    for_each_multiset(cells, n, &mut |sel| {
        // cell c encodes (row c / w exhausts row 0 first, column c % w)
        let decoded: Vec<(usize, usize)> = sel.iter().map(|&c| (c / w, c % w)).collect();
        let mut column_rows: Vec<(usize, usize)> = decoded.clone();
        column_rows.sort_unstable_by_key(|&(t, i)| (i, t));
        let mut clash = false;
        for win in column_rows.windows(2) {
            if win[0].1 == win[1].1 && win[0].0 != win[1].0 {
                clash = true;
                break;
            }
        }
        let indices: Vec<usize> = decoded.iter().map(|&(t, i)| frag.cell(t, i)).collect();
        match cs.holds(&indices) {
            Ok(p) => {
                if p != !clash {
                    verdict.holds = false;
                    verdict.violation = Some(decoded);
                    return false;
                }
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(verdict)
}
