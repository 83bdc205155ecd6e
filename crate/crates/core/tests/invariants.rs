//! Randomized cross-module properties. Each test states a law the
//! implementation must satisfy on every seed, not just the worked
//! examples in the unit tests.

use proptest::prelude::*;

use cslab_core::bits::for_each_multiset;
use cslab_core::charseq::{compute_charseq, support_check};
use cslab_core::independence::independence_depth;
use cslab_core::orderprops::{build_cop_from_ordered, pair_grid, verify_cop, OrderedBase};
use cslab_core::rat::rat;
use cslab_core::regularity::{
    check_regular_exact, density, energy, equipartition, regularity_partition, BipartitePair,
    RegularityCaps,
};
use cslab_core::structures::{
    builtin_formula, gen_half_graph, gen_random_graph, gen_staircase, FiniteStructure,
};

fn staircase_grid(a_row: &[usize], lo: i64, hi: i64) -> (Vec<Vec<usize>>, OrderedBase) {
    let pos = |k: i64| (k - lo) as usize;
    pair_grid(lo, hi, &mut |s, t| vec![a_row[pos(t)], a_row[pos(s)]])
}

fn multisets(pool: usize, sizes: core::ops::RangeInclusive<usize>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in sizes {
        for_each_multiset(pool, k, &mut |sel| {
            out.push(sel.to_vec());
            true
        });
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // P_n membership is an existential over the finite universe and
    // nothing else: a naive scan must agree, in any argument order,
    // and membership must be inherited by every sub-multiset.
    #[test]
    fn charseq_matches_naive_scan_and_is_closed(seed in 0u64..500, n in 6usize..12) {
        let s = gen_random_graph(n, rat(2, 5), seed).unwrap();
        let f = builtin_formula("edge").unwrap();
        let pool: Vec<Vec<usize>> = (0..n.min(8)).map(|v| vec![v]).collect();
        let cs = compute_charseq(&s, f.as_ref(), 3, &pool).unwrap();
        for sel in multisets(pool.len(), 1..=3) {
            let naive = (0..n)
                .any(|x| sel.iter().all(|&i| s.rel_edge("R", x, pool[i][0])));
            prop_assert_eq!(cs.holds(&sel).unwrap(), naive);
            let mut rev = sel.clone();
            rev.reverse();
            prop_assert_eq!(cs.holds(&rev).unwrap(), naive);
            if naive && sel.len() > 1 {
                for drop in 0..sel.len() {
                    let mut sub = sel.clone();
                    sub.remove(drop);
                    prop_assert!(cs.holds(&sub).unwrap());
                }
            }
        }
    }

    // support_check(·, 2, ·) passing through level N makes the pairwise
    // route exact; a failing check hands back a multiset where the two
    // routes genuinely disagree.
    #[test]
    fn support_two_collapses_membership_to_pairs(seed in 0u64..300, n in 6usize..10) {
        let s = gen_random_graph(n, rat(1, 2), seed).unwrap();
        let f = builtin_formula("edge").unwrap();
        let pool: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        let cs = compute_charseq(&s, f.as_ref(), 4, &pool).unwrap();
        let verdicts: Vec<_> = (2..=4)
            .map(|lvl| support_check(&cs, 2, lvl).unwrap())
            .collect();
        if verdicts.iter().all(|v| v.holds) {
            for sel in multisets(pool.len(), 2..=4) {
                prop_assert_eq!(
                    cs.holds(&sel).unwrap(),
                    cs.holds_via_pairs(&sel).unwrap()
                );
            }
        } else {
            let bad = verdicts.iter().find(|v| !v.holds).unwrap();
            let sel = bad.counterexample.as_ref().unwrap();
            prop_assert_ne!(
                cs.holds(sel).unwrap(),
                cs.holds_via_pairs(sel).unwrap()
            );
        }
    }

    // a_i sees exactly the b_j with j > i, so the two degree sequences
    // are k−i and j−1.
    #[test]
    fn half_graph_degree_sequences(k in 1usize..12) {
        let s = gen_half_graph(k).unwrap();
        let a = s.part("A").unwrap().to_vec();
        let b = s.part("B").unwrap().to_vec();
        for (i0, &av) in a.iter().enumerate() {
            let deg = b.iter().filter(|&&bv| s.rel_edge("R", av, bv)).count();
            prop_assert_eq!(deg, k - (i0 + 1));
        }
        for (j0, &bv) in b.iter().enumerate() {
            let deg = a.iter().filter(|&&av| s.rel_edge("R", av, bv)).count();
            prop_assert_eq!(deg, j0);
        }
    }

    #[test]
    fn generation_is_seed_deterministic(seed in 0u64..1000, n in 2usize..24) {
        let a = gen_random_graph(n, rat(1, 3), seed).unwrap();
        let b = gen_random_graph(n, rat(1, 3), seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // densities and energies are bounded, refinement never loses
    // energy, and class sizes stay balanced.
    #[test]
    fn partition_energy_is_bounded_and_monotone(seed in 0u64..200, n in 12usize..32) {
        let s = gen_random_graph(n, rat(1, 2), seed).unwrap();
        let g = s.to_graph("R").unwrap();
        let pair = BipartitePair::new(
            (0..n / 2).collect(),
            (n / 2..n).collect(),
        )
        .unwrap();
        let d = density(&g, &pair);
        prop_assert!(d >= rat(0, 1) && d <= rat(1, 1));
        let classes = equipartition(n, 3);
        let e = energy(&g, &classes);
        prop_assert!(e >= rat(0, 1) && e <= rat(1, 1));
        let caps = RegularityCaps {
            exact_side_cap: 12,
            sampled_trials: 40,
            sample_seed: 1,
            max_classes: 24,
            max_rounds: 3,
        };
        let p = regularity_partition(&g, rat(1, 4), 3, &caps).unwrap();
        for w in p.energy_trace.windows(2) {
            prop_assert!(w[0] <= w[1], "energy dropped: {} -> {}", w[0], w[1]);
        }
        let sizes: Vec<usize> = p.classes.iter().map(|c| c.len()).collect();
        let mn = *sizes.iter().min().unwrap();
        let mx = *sizes.iter().max().unwrap();
        prop_assert!(mx - mn <= 1);
    }

    // regularity survives loosening ε: fewer sub-pairs qualify and the
    // allowed deviation grows.
    #[test]
    fn regular_verdicts_are_monotone_in_epsilon(seed in 0u64..300) {
        let s = gen_random_graph(14, rat(1, 2), seed).unwrap();
        let g = s.to_graph("R").unwrap();
        let pair = BipartitePair::new((0..7).collect(), (7..14).collect()).unwrap();
        let tight = check_regular_exact(&g, &pair, rat(1, 4), 16).unwrap();
        let loose = check_regular_exact(&g, &pair, rat(1, 2), 16).unwrap();
        if tight.is_regular() {
            prop_assert!(loose.is_regular());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    // the emitted interval fragment passes verification at its own
    // depth and every depth below, on both verification routes.
    #[test]
    fn cop_verification_is_downward_closed(n in 1usize..4) {
        let s = gen_staircase(6 * n).unwrap();
        let a_row = s.part("A").unwrap().to_vec();
        let rho = builtin_formula("strict-order-rho").unwrap();
        let (pool, base) = staircase_grid(&a_row, -2 * n as i64, 4 * n as i64 - 1);
        let cs = compute_charseq(&s, rho.as_ref(), 2 * n, &pool).unwrap();
        let frag = build_cop_from_ordered(&cs, &base, n).unwrap();
        for depth in 1..=n {
            let full = verify_cop(&cs, &frag, depth, false).unwrap();
            prop_assert!(full.holds, "full route at depth {}", depth);
        }
        let fast = verify_cop(&cs, &frag, n, true).unwrap();
        prop_assert!(fast.holds && fast.shortcut);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // a pass at (k, cap) contains every check made at smaller k or cap,
    // so passes fill a downward-closed grid.
    #[test]
    fn independence_passes_are_downward_closed(seed in 0u64..150) {
        let s = gen_random_graph(12, rat(1, 2), seed).unwrap();
        let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
        let parts: Vec<Vec<usize>> =
            vec![(0..4).collect(), (4..8).collect(), (8..12).collect()];
        let ks = [1usize, 2, 3];
        let caps = [1usize, 2];
        let mut grid = [[false; 2]; 3];
        for (ki, &k) in ks.iter().enumerate() {
            for (ci, &cap) in caps.iter().enumerate() {
                grid[ki][ci] = independence_depth(&parts, &rel, k, cap, None)
                    .unwrap()
                    .holds;
            }
        }
        for ki in 0..3 {
            for ci in 0..2 {
                if grid[ki][ci] {
                    for ki2 in 0..=ki {
                        for ci2 in 0..=ci {
                            prop_assert!(grid[ki2][ci2]);
                        }
                    }
                }
            }
        }
    }
}

// `FiniteStructure` relations must stay symmetric and loop-free under
// every generator; validate() is the single authority.
#[test]
fn generators_emit_valid_structures() {
    let mut all: Vec<FiniteStructure> = Vec::new();
    for seed in 0..6u64 {
        all.push(gen_random_graph(10 + seed as usize, rat(1, 3), seed).unwrap());
    }
    for k in 1..=6 {
        all.push(gen_half_graph(k).unwrap());
    }
    for m in 1..=5 {
        all.push(gen_staircase(m).unwrap());
    }
    for s in &all {
        s.validate().unwrap();
    }
}
