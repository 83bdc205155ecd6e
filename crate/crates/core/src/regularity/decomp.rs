//! Omitted-edge accounting over partitions: the cross-class ledger, its
//! recursive per-level version, and the empirical density table for the
//! regular-pair spectrum.

use alloc::vec::Vec;

use crate::bits::Bitset;
use crate::graph::Graph;
use crate::rat::{rat, Rat};
use crate::regularity::{
    check_regular_exact, density, regularity_partition, BipartitePair, PairVerdict,
    RegularPartition, RegularityCaps, RegularityError,
};
use crate::rng::SeededRng;

fn to_bitset(n: usize, verts: &[usize]) -> Bitset {
    Bitset::from_iter_len(n, verts.iter().copied())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InterstitialReport {
    /// missing cross-class edges, summed over class pairs
    pub interstitial_omitted: u64,
    pub per_pair: Vec<(usize, usize, u64)>,
    /// ε + (1−ε)(1−δ_min) over the regular pairs; None without any
    pub lhs: Option<Rat>,
    /// c·ℓ/ℓ′ with ℓ the requested class floor, ℓ′ the class cap
    pub rhs: Rat,
    pub inequality_holds: Option<bool>,
    pub cn2: Rat,
    pub under_cn2: bool,
}

/// Cross-class omission ledger plus both sides of the budget inequality
/// that drives the quadratic-count argument.
pub fn interstitial_report(g: &Graph, partition: &RegularPartition, c: Rat) -> InterstitialReport {
    let sets: Vec<Bitset> = partition
        .classes
        .iter()
        .map(|cl| to_bitset(g.n(), cl))
        .collect();
    let mut per_pair = Vec::new();
    let mut total: u64 = 0;
    for i in 0..partition.classes.len() {
        for j in (i + 1)..partition.classes.len() {
            let cells = (partition.classes[i].len() * partition.classes[j].len()) as u64;
            let omitted = cells - g.edges_between(&sets[i], &sets[j]);
            per_pair.push((i, j, omitted));
            total += omitted;
        }
    }
    let delta_min = partition
        .pair_report
        .values()
        .filter(|r| r.verdict.is_regular())
        .map(|r| r.density)
        .min();
    let eps = partition.epsilon;
    let lhs = delta_min.map(|dm| eps + (rat(1, 1) - eps) * (rat(1, 1) - dm));
    let rhs = c * rat(partition.m0 as i128, 1) / rat(partition.caps.max_classes as i128, 1);
    let cn2 = c * rat((g.n() * g.n()) as i128, 1);
    InterstitialReport {
        interstitial_omitted: total,
        per_pair,
        lhs,
        rhs,
        inequality_holds: lhs.map(|l| l < rhs),
        cn2,
        under_cn2: rat(total as i128, 1) < cn2,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LevelLedger {
    pub level: usize,
    /// units entering this level, and how many were too small to split
    pub units: usize,
    pub truncated_units: usize,
    pub interstitial_omitted: u64,
    /// smallest class count among the units split at this level
    pub min_k: Option<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HierarchicalReport {
    pub levels: Vec<LevelLedger>,
    /// internal omissions of every terminal unit (bottom level plus
    /// truncated units at any level)
    pub bottom_internal_omitted: u64,
    /// ê(G), counted directly over the whole graph
    pub total_omitted: u64,
    pub reconciled: bool,
    /// c·n²·(1 + Σ 1/kᵢ^i) + n²/(k_t)^t over the levels that split
    pub bound: Rat,
    pub bound_holds: bool,
}

fn internal_omitted(g: &Graph, verts: &[usize]) -> u64 {
    let sz = verts.len() as u64;
    let pairs = sz * sz.saturating_sub(1) / 2;
    pairs - g.edges_within(&to_bitset(g.n(), verts))
}

/// Recursive omission ledger: partition, charge the cross-class
/// omissions to this level, recurse into every class. Units smaller
/// than 2·m0 become terminal and are reported, never silently dropped.
pub fn hierarchical_decomposition(
    g: &Graph,
    epsilon: Rat,
    m0: usize,
    depth: usize,
    caps: &RegularityCaps,
    c: Rat,
) -> Result<HierarchicalReport, RegularityError> {
    if depth == 0 {
        return Err(RegularityError::Parameter("depth must be ≥ 1".into()));
    }
    let mut units: Vec<Vec<usize>> = alloc::vec![(0..g.n()).collect()];
    let mut levels = Vec::new();
    let mut bottom_internal: u64 = 0;
    for level in 1..=depth {
        let mut next = Vec::new();
        let mut interstitial: u64 = 0;
        let mut truncated = 0usize;
        let mut min_k: Option<usize> = None;
        let unit_count = units.len();
        for unit in &units {
            if unit.len() < 2 * m0 {
                truncated += 1;
                bottom_internal += internal_omitted(g, unit);
                continue;
            }
            let sub = g.induced(unit);
            let part = regularity_partition(&sub, epsilon, m0, caps)?;
            min_k = Some(min_k.map_or(part.k(), |m| m.min(part.k())));
            let local: Vec<Bitset> = part
                .classes
                .iter()
                .map(|cl| Bitset::from_iter_len(sub.n(), cl.iter().copied()))
                .collect();
            for i in 0..part.k() {
                for j in (i + 1)..part.k() {
                    let cells = (part.classes[i].len() * part.classes[j].len()) as u64;
                    interstitial += cells - sub.edges_between(&local[i], &local[j]);
                }
            }
            for cl in &part.classes {
                // lift induced-graph indices back to original vertices
                next.push(cl.iter().map(|&loc| unit[loc]).collect::<Vec<usize>>());
            }
        }
        levels.push(LevelLedger {
            level,
            units: unit_count,
            truncated_units: truncated,
            interstitial_omitted: interstitial,
            min_k,
        });
        units = next;
    }
    for unit in &units {
        bottom_internal += internal_omitted(g, unit);
    }
    let total = g.non_edge_count();
    let ledger_sum: u64 = levels
        .iter()
        .map(|l| l.interstitial_omitted)
        .sum::<u64>()
        + bottom_internal;
    let n2 = rat((g.n() * g.n()) as i128, 1);
    let split_ks: Vec<usize> = levels.iter().filter_map(|l| l.min_k).collect();
    let bound = if split_ks.is_empty() {
        n2
    } else {
        let mut series = rat(1, 1);
        for (i, &k) in split_ks.iter().enumerate().skip(1) {
            let mut kp = rat(1, 1);
            for _ in 0..i {
                kp *= rat(k as i128, 1);
            }
            series += rat(1, 1) / kp;
        }
        let last = *split_ks.last().expect("nonempty") as i128;
        let mut kp = rat(1, 1);
        for _ in 0..split_ks.len() {
            kp *= rat(last, 1);
        }
        c * n2 * series + n2 / kp
    };
    Ok(HierarchicalReport {
        levels,
        bottom_internal_omitted: bottom_internal,
        total_omitted: total,
        reconciled: ledger_sum == total,
        bound,
        bound_holds: rat(total as i128, 1) < bound,
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpectrumEntry {
    pub size: usize,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub density: Rat,
}

/// Empirical density table: balanced disjoint pairs per requested size
/// (one contiguous candidate, then seeded random ones), keeping only
/// pairs the exhaustive checker certifies regular. Sizes above the cap
/// contribute nothing, never an uncertified claim.
pub fn density_spectrum(
    g: &Graph,
    sizes: &[usize],
    epsilon: Rat,
    trials: usize,
    seed: u64,
    exact_side_cap: usize,
) -> Result<Vec<SpectrumEntry>, RegularityError> {
    let mut rng = SeededRng::new(seed);
    let mut out = Vec::new();
    for &s in sizes {
        if s == 0 || 2 * s > g.n() || s > exact_side_cap {
            continue;
        }
        let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        candidates.push(((0..s).collect(), (s..2 * s).collect()));
        for _ in 0..trials {
            let mut picked = rng.distinct_sorted(g.n(), 2 * s);
            rng.shuffle(&mut picked);
            let mut x = picked[..s].to_vec();
            let mut y = picked[s..].to_vec();
            x.sort_unstable();
            y.sort_unstable();
            candidates.push((x, y));
        }
        for (x, y) in candidates {
            let pair = BipartitePair { x, y };
            if check_regular_exact(g, &pair, epsilon, exact_side_cap)? == PairVerdict::Regular {
                let d = density(g, &pair);
                out.push(SpectrumEntry {
                    size: s,
                    x: pair.x,
                    y: pair.y,
                    density: d,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{gen_half_graph, gen_random_graph};

    fn random_graph(n: usize, num: i128, den: i128, seed: u64) -> Graph {
        gen_random_graph(n, rat(num, den), seed)
            .unwrap()
            .to_graph("R")
            .unwrap()
    }

    #[test]
    fn interstitial_zero_on_complete() {
        let g = Graph::complete(12);
        let p = regularity_partition(&g, rat(1, 4), 3, &RegularityCaps::default()).unwrap();
        let r = interstitial_report(&g, &p, rat(1, 10));
        assert_eq!(r.interstitial_omitted, 0);
        assert!(r.under_cn2);
        assert_eq!(r.lhs, Some(rat(1, 4)));
    }

    #[test]
    fn interstitial_counts_empty_pair_cells() {
        let g = Graph::empty(12);
        let p = regularity_partition(&g, rat(1, 4), 2, &RegularityCaps::default()).unwrap();
        let r = interstitial_report(&g, &p, rat(1, 10));
        assert_eq!(r.interstitial_omitted, 36);
        assert_eq!(r.per_pair, alloc::vec![(0, 1, 36)]);
    }

    #[test]
    fn interstitial_band_on_dense_random() {
        let g = random_graph(64, 9, 10, 3);
        let p = regularity_partition(&g, rat(1, 5), 4, &RegularityCaps::default()).unwrap();
        let r = interstitial_report(&g, &p, rat(1, 10));
        let cross_cells: u64 = r
            .per_pair
            .iter()
            .map(|&(i, j, _)| (p.classes[i].len() * p.classes[j].len()) as u64)
            .sum();
        // omissions concentrate near the 1/10 miss rate; 5σ band on the
        // cross-cell count
        let expect = cross_cells as f64 / 10.0;
        let sigma = (cross_cells as f64 * 0.1 * 0.9).sqrt();
        let got = r.interstitial_omitted as f64;
        assert!(
            (got - expect).abs() < 5.0 * sigma,
            "omitted {got} vs expected {expect}"
        );
        let sum: u64 = r.per_pair.iter().map(|&(_, _, o)| o).sum();
        assert_eq!(sum, r.interstitial_omitted);
    }

    #[test]
    fn hierarchy_reconciles_on_empty_graph() {
        let g = Graph::empty(24);
        let r =
            hierarchical_decomposition(&g, rat(1, 4), 2, 1, &RegularityCaps::default(), rat(1, 10))
                .unwrap();
        assert!(r.reconciled);
        assert_eq!(r.total_omitted, 276);
        assert_eq!(r.levels[0].interstitial_omitted, 144);
        assert_eq!(r.bottom_internal_omitted, 132);
    }

    #[test]
    fn hierarchy_all_zero_on_complete_graph() {
        let g = Graph::complete(24);
        let r =
            hierarchical_decomposition(&g, rat(1, 4), 2, 2, &RegularityCaps::default(), rat(1, 10))
                .unwrap();
        assert!(r.reconciled);
        assert_eq!(r.total_omitted, 0);
        for l in &r.levels {
            assert_eq!(l.interstitial_omitted, 0);
        }
        assert_eq!(r.bottom_internal_omitted, 0);
    }

    #[test]
    fn hierarchy_levels_decrease_on_dense_random() {
        let g = random_graph(256, 3, 4, 11);
        let r =
            hierarchical_decomposition(&g, rat(1, 4), 4, 2, &RegularityCaps::default(), rat(1, 10))
                .unwrap();
        assert!(r.reconciled, "levels {:?}", r.levels);
        assert!(
            r.levels[0].interstitial_omitted > r.levels[1].interstitial_omitted,
            "cross-cell mass shrinks with the classes: {:?}",
            r.levels
        );
    }

    #[test]
    fn spectrum_on_complete_graph_is_all_ones() {
        let g = Graph::complete(16);
        let entries = density_spectrum(&g, &[4], rat(1, 2), 3, 9, 20).unwrap();
        assert!(!entries.is_empty());
        for e in entries {
            assert_eq!(e.density, rat(1, 1));
        }
    }

    #[test]
    fn spectrum_keeps_planted_half_graph_pair() {
        let g = gen_half_graph(8).unwrap().to_graph("R").unwrap();
        let entries = density_spectrum(&g, &[8], rat(3, 5), 2, 5, 32).unwrap();
        let planted: Vec<usize> = (0..8).collect();
        let hit = entries
            .iter()
            .find(|e| e.x == planted)
            .expect("the contiguous candidate is the planted pair");
        assert_eq!(hit.density, rat(7, 16));
    }
}
