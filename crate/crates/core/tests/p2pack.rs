use fptmix::budget::Budget;
use fptmix::gen::{random_graph, rng};
use fptmix::oracles::{connected_triples, disjoint_sets_within, oracle_cpro2, oracle_p2p, oracle_pro2, sol_pq_nonempty};
use fptmix::p2pack::{icp_pro1, packing_nodes, pq_pairs, procedure2, solve_cpro2, solve_p2packing, P2Options};
use fptmix::problems::{verify_cpro2_solution, verify_packing, Pro2Instance};
use fptmix::types::ElemSet;
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn driver_matches_packing_oracle() {
    let mut r = rng(21);
    let mut yes = 0;
    for round in 0..220 {
        let n = r.gen_range(3..=10);
        let d = r.gen_range(0.1..0.5);
        let g = random_graph(&mut r, n, d);
        let k = r.gen_range(1..=3);
        let opts = P2Options { inv_eps: r.gen_range(1..=2), ..Default::default() };
        let mut b = Budget::unlimited("test");
        let want = oracle_p2p(&g, k, &mut b).unwrap();
        let got = solve_p2packing(&g, k, opts, &mut b).unwrap();
        assert_eq!(want.is_some(), got.is_some(), "round {round}: {g:?} k={k}");
        if let Some(paths) = got {
            yes += 1;
            verify_packing(&g, k, &paths).unwrap();
        }
    }
    assert!(yes > 40, "only {yes} yes-instances");
}

#[test]
fn first_procedure_biconditional() {
    let mut r = rng(22);
    for _ in 0..120 {
        let n = r.gen_range(6..=10);
        let d = r.gen_range(0.2..0.6);
        let g = random_graph(&mut r, n, d);
        let t = r.gen_range(2..=3);
        let mut b = Budget::unlimited("test");
        let Some(prev) = oracle_p2p(&g, t - 1, &mut b).unwrap() else { continue };
        let x = packing_nodes(&prev);
        let y = ElemSet::full(n).minus(x);
        let inside: Vec<ElemSet> = connected_triples(&g).into_iter().filter(|s| s.is_subset(x)).collect();
        for (p, q) in pq_pairs(t) {
            let cands = icp_pro1(&g, &prev, p, q, P2Options::default(), &mut b).unwrap();
            let plain = icp_pro1(&g, &prev, p, q, P2Options { reduce: false, ..Default::default() }, &mut b).unwrap();
            let xs = |c: &[fptmix::p2pack::Pro1Candidate]| c.iter().map(|c| c.x_part).collect::<Vec<_>>();
            assert_eq!(xs(&cands), xs(&plain));
            let mut rhs = false;
            for c in &cands {
                assert_eq!(c.x_part.len(), 3 * q - p);
                assert_eq!(c.paths.len(), q);
                let used = c.paths.iter().fold(ElemSet::EMPTY, |a, s| a.union(*s));
                assert_eq!(used.inter(y).len(), p);
                assert_eq!(used.inter(x), c.x_part);
                rhs |= disjoint_sets_within(&inside, x.minus(c.x_part), t - q, &mut b).unwrap();
            }
            assert_eq!(sol_pq_nonempty(&g, t, y, p, q, &mut b).unwrap(), rhs, "t={t} p={p} q={q}");
        }
    }
}

fn random_pro2(r: &mut impl Rng) -> Pro2Instance {
    let k = r.gen_range(2..=4);
    let n = 3 * (k - 1);
    let all: Vec<usize> = (0..n).collect();
    let sets: Vec<ElemSet> = (0..r.gen_range(1..=10)).map(|_| ElemSet::from_iter(all.choose_multiple(r, 3).copied())).collect();
    let (p, q) = loop {
        let p: usize = r.gen_range(3..=6);
        let q = r.gen_range(p.div_ceil(3)..=p);
        if q <= k && 3 * q - p <= n {
            break (p, q);
        }
    };
    let family = (0..r.gen_range(0..=4)).map(|_| ElemSet::from_iter(all.choose_multiple(r, 3 * q - p).copied())).collect();
    let mut sets = sets;
    sets.sort();
    sets.dedup();
    Pro2Instance { n, sets, k, p, q, family }
}

#[test]
fn cut_procedure_matches_oracle() {
    let mut r = rng(23);
    for _ in 0..300 {
        let inst = random_pro2(&mut r);
        if inst.need() == 0 {
            continue;
        }
        let inv = r.gen_range(1..=2).min(inst.need());
        let mut f: Vec<usize> = (0..inv).map(|_| r.gen_range(0..inst.n)).collect();
        f.sort_unstable();
        let mut b = Budget::unlimited("test");
        let want = oracle_cpro2(&inst, inv, &f, &mut b).unwrap();
        let got = solve_cpro2(&inst, inv, &f, &mut b).unwrap();
        assert_eq!(want, got.is_some(), "{inst:?} f={f:?}");
        if let Some(sol) = got {
            verify_cpro2_solution(&inst, inv, &f, sol.chosen, &sol.sets).unwrap();
        }
        let want = oracle_pro2(&inst, &mut b).unwrap();
        assert_eq!(want, procedure2(&inst, inv, &mut b).unwrap().is_some());
    }
}
