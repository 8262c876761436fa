use fptmix::budget::Budget;
use fptmix::io::{parse_instance, serialize_instance, DigraphInstance, GraphInstance, Instance, SetFamilyInstance};
use fptmix::matching::max_matching;
use fptmix::oracles::brute_matching_size;
use fptmix::repsets::{check_representation, gen_rep_alg, PartitionSpec};
use fptmix::types::{Digraph, ElemSet, Graph, Objective, OrderedUniverse, WeightedSet, WeightedSetFamily};
use fptmix::unisets::{build_universal, builder, verify_universal, UniversalSet};
use proptest::prelude::*;

fn unlimited() -> Budget {
    Budget::unlimited("test")
}

fn elems(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, 0..n)
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..2 * n).prop_map(move |pairs| {
            let mut edges: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
            edges.sort_unstable();
            edges.dedup();
            Graph::new(n, &edges).unwrap()
        })
    })
}

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, -50i64..50), 0..3 * n).prop_map(move |arcs| {
            let mut arcs: Vec<_> = arcs.into_iter().filter(|(a, b, _)| a != b).collect();
            arcs.sort_by_key(|&(a, b, _)| (a, b));
            arcs.dedup_by_key(|&mut (a, b, _)| (a, b));
            Digraph::new(n, &arcs).unwrap()
        })
    })
}

/// Family of 3-sets over a universe of `n` labelled elements.
fn triples(n: usize) -> impl Strategy<Value = WeightedSetFamily> {
    prop::collection::vec((prop::sample::subsequence((0..n).collect::<Vec<_>>(), 3), -100i64..100), 1..12).prop_map(
        move |raw| {
            let raw = raw.into_iter().map(|(m, w)| WeightedSet { members: ElemSet::from_iter(m), weight: w }).collect();
            WeightedSetFamily::new(OrderedUniverse::numbered(n), raw, Objective::Max).unwrap()
        },
    )
}

proptest! {
    #[test]
    fn elemset_algebra(a in elems(128), b in elems(128)) {
        let (x, y) = (ElemSet::from_iter(a.iter().copied()), ElemSet::from_iter(b.iter().copied()));
        prop_assert_eq!(x.union(y).len() + x.inter(y).len(), x.len() + y.len());
        prop_assert!(x.minus(y).disjoint(y));
        prop_assert_eq!(x.minus(y).union(x.inter(y)), x);
        prop_assert!(x.inter(y).is_subset(x));
        let listed: Vec<usize> = x.iter().collect();
        prop_assert!(listed.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(x.min(), listed.first().copied());
        prop_assert_eq!(x.max(), listed.last().copied());
        for &e in &a {
            prop_assert!(x.contains(e));
        }
    }

    #[test]
    fn graph_instances_round_trip(g in graph(12), k in prop::option::of(0usize..6)) {
        let inst = Instance::Graph(GraphInstance { graph: g, k, w: None });
        let back = parse_instance(serialize_instance(&inst).as_bytes()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn digraph_instances_round_trip(g in digraph(10), k in prop::option::of(0usize..6), w in prop::option::of(-1000i64..1000)) {
        let inst = Instance::Digraph(DigraphInstance { graph: g, k, w });
        let back = parse_instance(serialize_instance(&inst).as_bytes()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn family_instances_round_trip(f in triples(9), w in prop::option::of(-50i64..50)) {
        let inst = Instance::SetFamily(SetFamilyInstance { family: f, k: Some(2), w });
        let back = parse_instance(serialize_instance(&inst).as_bytes()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn matchings_are_valid_and_maximum(g in graph(10)) {
        let m = max_matching(&g);
        prop_assert!(m.is_valid_for(&g));
        prop_assert_eq!(m.len(), brute_matching_size(&g, ElemSet::full(g.n()), &mut unlimited()).unwrap());
    }

    #[test]
    fn universal_sets_verify_and_round_trip(n in 1usize..9, k in 0usize..4, p in 0usize..4, seed in any::<u64>()) {
        prop_assume!(k <= n && p <= k);
        let u = build_universal(n, k, p, builder("rand", Some(seed)).unwrap().as_ref(), &mut unlimited()).unwrap();
        prop_assert_eq!(verify_universal(&u, &mut unlimited()).unwrap(), None);
        let back = UniversalSet::from_lines(n, k, p, &u.to_lines().join("\n")).unwrap();
        prop_assert_eq!(back.functions, u.functions);
    }

    #[test]
    fn representatives_represent(f in triples(8), q in 1usize..=5, max in any::<bool>()) {
        let objective = if max { Objective::Max } else { Objective::Min };
        let spec = PartitionSpec::single(ElemSet::full(8), 3 + q.min(5), 3);
        let (out, stats) = gen_rep_alg(&spec, &f, objective, &mut unlimited()).unwrap();
        prop_assert!(out.sets.iter().all(|s| f.sets.contains(s)));
        prop_assert!(out.len() <= f.len());
        prop_assert_eq!(stats.input_size, f.len());
        prop_assert_eq!(check_representation(&spec, &f.sets, &out.sets, objective, &mut unlimited()).unwrap(), None);
    }
}

#[test]
fn dropping_a_function_breaks_a_tight_universal_set() {
    // n=k: every p-subset must be hit exactly, so the set of all p-subsets is
    // minimal and losing any member leaves a violation
    let u = build_universal(4, 4, 2, builder("greedy", None).unwrap().as_ref(), &mut unlimited()).unwrap();
    assert_eq!(u.functions.len(), 6);
    for i in 0..u.functions.len() {
        let mut cut = u.clone();
        cut.functions.remove(i);
        assert!(verify_universal(&cut, &mut unlimited()).unwrap().is_some());
    }
}
