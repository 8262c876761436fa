use fptmix::budget::Budget;
use fptmix::gen::{random_digraph, rng};
use fptmix::kiob::{extract_branching, solve_kiob, tp_alg, tree_families, KiobOptions, TreeOptions};
use fptmix::oracles::{oracle_kiob, oracle_tp, out_tree_sets};
use fptmix::problems::{verify_branching, verify_tp_witness, TpInstance, TpWitness};
use fptmix::repsets::{check_representation, PartitionSpec};
use fptmix::types::{Digraph, ElemSet, Objective, WeightedSet};
use rand::Rng;

fn internal_count(parent: &[Option<usize>]) -> usize {
    let mut has = vec![false; parent.len()];
    parent.iter().flatten().for_each(|&p| has[p] = true);
    has.into_iter().filter(|&h| h).count()
}

fn check_against_oracle(seed: u64, rounds: usize, n_max: usize) -> usize {
    let mut r = rng(seed);
    let mut accepted = 0;
    for round in 0..rounds {
        let n = r.gen_range(2..=n_max);
        let d = r.gen_range(0.15..0.6);
        let g = random_digraph(&mut r, n, d, (1, 1));
        let k = r.gen_range(1..=4);
        let mut b = Budget::unlimited("test");
        let want = oracle_kiob(&g, k, &mut b).unwrap();
        let got = solve_kiob(&g, k, KiobOptions::default(), &mut b).unwrap();
        assert_eq!(want, got.is_some(), "round {round}: n={n} k={k} arcs={:?}", g.arcs());
        if let Some(w) = got {
            accepted += 1;
            let internal = verify_branching(&g, w.root, &w.parent).unwrap();
            assert!(internal >= k);
            assert_eq!(internal, w.internal);
            // leaf bound from the exchange argument
            if k > 1 {
                assert!(w.q + k >= 2 * w.leaves, "q={} l={} k={k}", w.q, w.leaves);
            }
        }
    }
    accepted
}

#[test]
fn small_digraphs_match_oracle() {
    let acc = check_against_oracle(21, 500, 6);
    assert!(acc > 100, "only {acc} accepting instances");
}

#[test]
fn larger_digraphs_match_oracle() {
    let acc = check_against_oracle(22, 200, 8);
    assert!(acc > 50, "only {acc} accepting instances");
}

#[test]
fn tree_families_represent_all_out_trees() {
    let mut r = rng(23);
    let mut checked = 0;
    for _ in 0..120 {
        let n = r.gen_range(3..=8);
        let d = r.gen_range(0.2..0.6);
        let g = random_digraph(&mut r, n, d, (1, 1));
        let root = r.gen_range(0..n);
        for x in 0..=4 {
            for y in 1..=4 {
                if x == 0 && y != 1 {
                    continue;
                }
                for z in 0..=(6usize.saturating_sub(x + y)) {
                    if x + y + z > 6 || x + y + z > n {
                        continue;
                    }
                    let mut b = Budget::unlimited("test");
                    let all = out_tree_sets(&g, root, x, y, &mut b).unwrap();
                    let fam = tree_families(&g, root, x, y, z, TreeOptions::default(), &mut b).unwrap();
                    for t in &fam.sets {
                        assert!(all.contains(&t.nodes), "not an out-tree node set: {:?}", t.nodes);
                    }
                    let orig: Vec<WeightedSet> = all.iter().map(|&m| WeightedSet { members: m, weight: 0 }).collect();
                    let kept: Vec<WeightedSet> = fam.sets.iter().map(|t| WeightedSet { members: t.nodes, weight: 0 }).collect();
                    let spec = PartitionSpec::single(ElemSet::full(n), x + y + z, x + y);
                    let v = check_representation(&spec, &orig, &kept, Objective::Max, &mut b).unwrap();
                    assert_eq!(v, None, "n={n} root={root} x={x} y={y} z={z}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn unreduced_tree_families_are_exhaustive() {
    let mut r = rng(24);
    for _ in 0..60 {
        let n = r.gen_range(3..=7);
        let g = random_digraph(&mut r, n, 0.4, (1, 1));
        let (x, y) = (r.gen_range(1..=3), r.gen_range(1..=3));
        if x + y > n {
            continue;
        }
        let mut b = Budget::unlimited("test");
        let mut all = out_tree_sets(&g, 0, x, y, &mut b).unwrap();
        let opts = TreeOptions { reduce: false, ..TreeOptions::default() };
        let mut got: Vec<ElemSet> = tree_families(&g, 0, x, y, 0, opts, &mut b).unwrap().sets.iter().map(|t| t.nodes).collect();
        all.sort();
        got.sort();
        got.dedup();
        assert_eq!(got, all);
    }
}

#[test]
fn tree_and_paths_matches_oracle() {
    let mut r = rng(25);
    let mut accepted = 0;
    let mut tried = 0;
    while tried < 300 {
        let n = r.gen_range(3..=9);
        let d = r.gen_range(0.2..0.6);
        let g = random_digraph(&mut r, n, d, (1, 1));
        let root = r.gen_range(0..n);
        if !g.reachable_from(root).all() {
            continue;
        }
        let k: usize = r.gen_range(1..=4);
        let l = r.gen_range(1..=k);
        let q = r.gen_range((2 * l).saturating_sub(k)..=l);
        let inst = TpInstance { graph: g, root, k, l, q };
        tried += 1;
        let mut b = Budget::unlimited("test");
        let want = oracle_tp(&inst, &mut b).unwrap();
        let got = tp_alg(&inst, TreeOptions::default(), &mut b).unwrap();
        assert_eq!(want, got.is_some(), "{inst:?}");
        if let Some(w) = got {
            accepted += 1;
            verify_tp_witness(&inst, &w).unwrap();
        }
    }
    assert!(accepted > 40, "only {accepted} accepting instances");
}

#[test]
fn extracted_branchings_verify() {
    let mut r = rng(26);
    let mut seen = 0;
    while seen < 100 {
        let n = r.gen_range(4..=9);
        let g = random_digraph(&mut r, n, 0.35, (1, 1));
        let k = r.gen_range(2..=5);
        let mut b = Budget::unlimited("test");
        if let Some(w) = solve_kiob(&g, k, KiobOptions::default(), &mut b).unwrap() {
            seen += 1;
            let parent = extract_branching(&g, w.root, k, &w.tree_and_paths).unwrap();
            assert!(verify_branching(&g, w.root, &parent).unwrap() >= k);
        }
    }
}

/// Tree with 3 internal nodes and 2 leaves plus 3 disjoint arcs
/// (k=6, l=5, q=3). Growing the tree leaves all arc ends as leaves, giving 5
/// internal nodes; one exchange pulls an arc in and reaches 6.
#[test]
fn exchange_configuration_k6_l5_q3() {
    let tree = vec![(0, 1), (1, 2), (2, 3), (2, 4)];
    let paths = vec![(5, 6), (7, 8), (9, 10)];
    let mut arcs: Vec<(usize, usize, i64)> = tree.iter().chain(&paths).map(|&(a, b)| (a, b, 1)).collect();
    arcs.extend([(3, 5, 1), (3, 6, 1), (4, 7, 1), (4, 8, 1), (4, 9, 1), (4, 10, 1)]);
    let g = Digraph::new(11, &arcs).unwrap();
    let inst = TpInstance { graph: g.clone(), root: 0, k: 6, l: 5, q: 3 };
    let w = TpWitness { tree, paths };
    verify_tp_witness(&inst, &w).unwrap();

    let grown = extract_branching(&g, 0, 5, &w).unwrap();
    assert_eq!(internal_count(&grown), 5);
    let exchanged = extract_branching(&g, 0, 6, &w).unwrap();
    assert_eq!(internal_count(&exchanged), 6);
    let changed = (0..11).filter(|&v| grown[v] != exchanged[v]).count();
    assert_eq!(changed, 1, "exactly one arc is re-hung");
    assert!(oracle_kiob(&g, 6, &mut Budget::unlimited("test")).unwrap());
}

#[test]
fn unreachable_roots_and_bad_k() {
    let g = Digraph::new(3, &[(0, 1, 1), (2, 1, 1)]).unwrap();
    let mut b = Budget::unlimited("test");
    assert_eq!(solve_kiob(&g, 1, KiobOptions::default(), &mut b).unwrap(), None);
    assert!(!oracle_kiob(&g, 1, &mut b).unwrap());
    assert!(solve_kiob(&g, 0, KiobOptions::default(), &mut b).is_err());
}
