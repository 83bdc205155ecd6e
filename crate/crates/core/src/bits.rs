//! Fixed-capacity bitsets, the working currency of every exhaustive scan.

use alloc::vec;
use alloc::vec::Vec;

/// Bitset over `0..len`. Words beyond `len` stay zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl core::fmt::Debug for Bitset {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bitset::new(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    pub fn from_iter_len(len: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bitset::new(len);
        for i in it {
            b.insert(i);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set bit, if any.
    pub fn first(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> BitIter<'_> {
        BitIter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersect_with(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn subtract(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &Bitset) -> Bitset {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn intersection_count(&self, other: &Bitset) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &Bitset) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_superset_of(&self, other: &Bitset) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == *b)
    }

    pub fn is_disjoint_from(&self, other: &Bitset) -> bool {
        !self.intersects(other)
    }

    /// Complement within `0..len`.
    pub fn complement(&self) -> Bitset {
        let mut out = Bitset::new(self.len);
        for (o, w) in out.words.iter_mut().zip(&self.words) {
            *o = !w;
        }
        // clear tail bits past len
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }
}

pub struct BitIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * 64 + bit)
    }
}

/// Symmetric loop-free adjacency matrix backed by one bitset row per vertex.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<Bitset>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        BitMatrix {
            n,
            rows: vec![Bitset::new(n); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Inserts {u, v}. Loops are rejected by the callers that construct
    /// relations; at this level a loop request is a programming error.
    pub fn set_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loop edge {u}");
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    pub fn clear_edge(&mut self, u: usize, v: usize) {
        self.rows[u].remove(v);
        self.rows[v].remove(u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.rows[u].contains(v)
    }

    pub fn row(&self, u: usize) -> &Bitset {
        &self.rows[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].count()
    }

    pub fn edge_count(&self) -> u64 {
        self.rows.iter().map(|r| r.count() as u64).sum::<u64>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.rows[u].iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Grows the matrix to `new_n` vertices, keeping existing edges.
    pub fn grow(&mut self, new_n: usize) {
        assert!(new_n >= self.n);
        let mut rows = Vec::with_capacity(new_n);
        for r in &self.rows {
            rows.push(Bitset::from_iter_len(new_n, r.iter()));
        }
        rows.resize(new_n, Bitset::new(new_n));
        self.n = new_n;
        self.rows = rows;
    }
}

/// Visits all `k`-subsets of `0..n` in lexicographic order, invoking
/// `enter`/`leave` per element and `visit` per complete subset, so callers
/// can keep incremental state. `visit` returning false aborts the scan.
pub fn for_each_combination(
    n: usize,
    k: usize,
    enter: &mut dyn FnMut(usize),
    leave: &mut dyn FnMut(usize),
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    if k > n {
        return;
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    // Explicit stack of "next candidate to try at this depth".
    fn rec(
        n: usize,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        enter: &mut dyn FnMut(usize),
        leave: &mut dyn FnMut(usize),
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if chosen.len() == k {
            return visit(chosen);
        }
        let remaining = k - chosen.len();
        for c in start..=(n - remaining) {
            chosen.push(c);
            enter(c);
            let keep = rec(n, k, c + 1, chosen, enter, leave, visit);
            leave(c);
            chosen.pop();
            if !keep {
                return false;
            }
        }
        true
    }
    rec(n, k, 0, &mut chosen, enter, leave, visit);
}

/// Visits all multisets of size `k` over `0..n` (non-decreasing index
/// sequences). `visit` returning false aborts.
pub fn for_each_multiset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    if n == 0 {
        return;
    }
    let mut sel = vec![0usize; k];
    loop {
        if !visit(&sel) {
            return;
        }
        // next non-decreasing sequence
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if sel[i] + 1 < n {
                let v = sel[i] + 1;
                for s in sel.iter_mut().skip(i) {
                    *s = v;
                }
                break;
            }
        }
    }
}

/// Binomial coefficient, saturating at u64::MAX.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_basics() {
        let mut b = Bitset::new(130);
        b.insert(0);
        b.insert(64);
        b.insert(129);
        assert_eq!(b.count(), 3);
        assert_eq!(b.to_vec(), vec![0, 64, 129]);
        assert_eq!(b.first(), Some(0));
        b.remove(0);
        assert_eq!(b.first(), Some(64));
        let c = b.complement();
        assert_eq!(c.count(), 128);
        assert!(!c.contains(64));
        assert!(c.contains(0));
    }

    #[test]
    fn combinations_count() {
        let mut seen = 0usize;
        for_each_combination(6, 3, &mut |_| {}, &mut |_| {}, &mut |s| {
            assert_eq!(s.len(), 3);
            seen += 1;
            true
        });
        assert_eq!(seen, 20);
        assert_eq!(binomial(6, 3), 20);
    }

    #[test]
    fn multisets_count() {
        let mut seen = 0usize;
        for_each_multiset(4, 2, &mut |s| {
            assert!(s[0] <= s[1]);
            seen += 1;
            true
        });
        // C(4+2-1, 2) = 10
        assert_eq!(seen, 10);
    }

    #[test]
    fn bitmatrix_grow_keeps_edges() {
        let mut m = BitMatrix::new(3);
        m.set_edge(0, 2);
        m.grow(5);
        assert!(m.has_edge(0, 2));
        assert!(!m.has_edge(0, 4));
        m.set_edge(2, 4);
        assert_eq!(m.edge_count(), 2);
    }
}
