//! Exhaustive reference solvers. Each problem has a primary enumeration and,
//! where cross-validation needs one, a second strategy that shares no code
//! with the first. Nothing in this module calls into a solver.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use crate::budget::Budget;
use crate::error::Result;
use crate::problems::{
    cwsp_conditions, is_p2, verify_cpro2_solution, verify_kcwp_pieces, CwspInstance, KcwpInstance, KcwpPieces,
    Pro2Instance, TpInstance, P2,
};
use crate::types::{add_weights, Digraph, ElemSet, Graph, WeightedSetFamily};

/// Cap on the number of candidates an oracle may enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_states: u128,
}

impl OracleBudget {
    pub fn new(max_states: u128) -> Self {
        OracleBudget { max_states: max_states.max(1) }
    }

    pub fn budget(self) -> Budget {
        Budget::new(self.max_states, "oracle enumeration")
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget::new(200_000_000)
    }
}

// ---------------------------------------------------------------------------
// Weighted k-path

/// Minimum weight of a simple directed path on exactly `k` nodes, with one
/// such path, by depth-first search over all simple paths.
pub fn oracle_kpath(g: &Digraph, k: usize, b: &mut Budget) -> Result<Option<(i64, Vec<usize>)>> {
    let n = g.n();
    if k == 0 || k > n {
        return Ok(None);
    }
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut path = Vec::with_capacity(k);
    let mut on = vec![false; n];
    fn go(
        g: &Digraph,
        k: usize,
        w: i64,
        path: &mut Vec<usize>,
        on: &mut [bool],
        best: &mut Option<(i64, Vec<usize>)>,
        b: &mut Budget,
    ) -> Result<()> {
        b.spend(1)?;
        if path.len() == k {
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                *best = Some((w, path.clone()));
            }
            return Ok(());
        }
        let v = *path.last().unwrap();
        for &(u, a) in g.out(v) {
            if !on[u] {
                let w2 = add_weights(w, a)?;
                on[u] = true;
                path.push(u);
                go(g, k, w2, path, on, best, b)?;
                path.pop();
                on[u] = false;
            }
        }
        Ok(())
    }
    for s in 0..n {
        on[s] = true;
        path.push(s);
        go(g, k, 0, &mut path, &mut on, &mut best, b)?;
        path.pop();
        on[s] = false;
    }
    Ok(best)
}

/// Same optimum by a dynamic program over (node subset, last node).
pub fn kpath_by_subsets(g: &Digraph, k: usize, b: &mut Budget) -> Result<Option<i64>> {
    let n = g.n();
    if k == 0 || k > n {
        return Ok(None);
    }
    let mut layer: HashMap<(u128, usize), i64> = (0..n).map(|v| ((1u128 << v, v), 0)).collect();
    for _ in 1..k {
        let mut next: HashMap<(u128, usize), i64> = HashMap::new();
        for (&(mask, v), &w) in &layer {
            for &(u, a) in g.out(v) {
                if mask >> u & 1 == 1 {
                    continue;
                }
                b.spend(1)?;
                let w2 = add_weights(w, a)?;
                let e = next.entry((mask | 1 << u, u)).or_insert(w2);
                *e = (*e).min(w2);
            }
        }
        layer = next;
    }
    Ok(layer.values().copied().min())
}

// ---------------------------------------------------------------------------
// Out-trees and out-branchings

/// Every (node set, internal set) pair realised by an out-tree rooted at
/// `root`, found by growing trees one arc at a time.
pub fn out_tree_states(g: &Digraph, root: usize, b: &mut Budget) -> Result<HashSet<(ElemSet, ElemSet)>> {
    let start = (ElemSet::singleton(root), ElemSet::EMPTY);
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some((nodes, internal)) = stack.pop() {
        for t in nodes.iter() {
            for &(u, _) in g.out(t) {
                if nodes.contains(u) {
                    continue;
                }
                b.spend(1)?;
                let mut s = (nodes, internal);
                s.0.insert(u);
                s.1.insert(t);
                if seen.insert(s) {
                    stack.push(s);
                }
            }
        }
    }
    Ok(seen)
}

/// Node sets of out-trees rooted at `root` with `x` internal nodes and `y`
/// leaves.
pub fn out_tree_sets(g: &Digraph, root: usize, x: usize, y: usize, b: &mut Budget) -> Result<Vec<ElemSet>> {
    let mut sets: Vec<ElemSet> = out_tree_states(g, root, b)?
        .into_iter()
        .filter(|(nodes, internal)| internal.len() == x && nodes.len() == x + y)
        .map(|(nodes, _)| nodes)
        .collect();
    sets.sort();
    sets.dedup();
    Ok(sets)
}

/// Largest number of internal nodes over all out-branchings, or `None` when
/// no node reaches every other node. An out-tree extends to an out-branching
/// without losing internal nodes, so the largest internal set of any tree
/// rooted at a spanning root is the answer.
pub fn max_internal_by_growth(g: &Digraph, b: &mut Budget) -> Result<Option<usize>> {
    let mut best = None;
    for r in 0..g.n() {
        if !g.reachable_from(r).all() {
            continue;
        }
        let m = out_tree_states(g, r, b)?.iter().map(|(_, i)| i.len()).max().unwrap_or(0);
        best = Some(best.map_or(m, |x: usize| x.max(m)));
    }
    Ok(best)
}

/// Largest number of internal nodes by enumerating every parent array, with
/// a branching attaining it.
pub fn max_internal_by_parents(g: &Digraph, b: &mut Budget) -> Result<Option<(usize, usize, Vec<Option<usize>>)>> {
    let n = g.n();
    let mut best: Option<(usize, usize, Vec<Option<usize>>)> = None;
    for r in 0..n {
        let mut parent = vec![None; n];
        fn go(
            g: &Digraph,
            r: usize,
            v: usize,
            parent: &mut Vec<Option<usize>>,
            best: &mut Option<(usize, usize, Vec<Option<usize>>)>,
            b: &mut Budget,
        ) -> Result<()> {
            let n = g.n();
            if v == n {
                b.spend(1)?;
                if let Some(i) = branching_internal(r, parent) {
                    if best.as_ref().is_none_or(|(bi, _, _)| i > *bi) {
                        *best = Some((i, r, parent.clone()));
                    }
                }
                return Ok(());
            }
            if v == r {
                return go(g, r, v + 1, parent, best, b);
            }
            for &(p, _) in g.inn(v) {
                parent[v] = Some(p);
                go(g, r, v + 1, parent, best, b)?;
            }
            parent[v] = None;
            Ok(())
        }
        go(g, r, 0, &mut parent, &mut best, b)?;
    }
    Ok(best)
}

fn branching_internal(r: usize, parent: &[Option<usize>]) -> Option<usize> {
    let n = parent.len();
    let mut state = vec![0u8; n]; // 0 unknown, 1 on stack, 2 reaches root
    state[r] = 2;
    for s in 0..n {
        let mut chain = Vec::new();
        let mut v = s;
        while state[v] == 0 {
            state[v] = 1;
            chain.push(v);
            v = parent[v]?;
        }
        if state[v] == 1 {
            return None;
        }
        for c in chain {
            state[c] = 2;
        }
    }
    let mut internal = vec![false; n];
    for p in parent.iter().flatten() {
        internal[*p] = true;
    }
    Some(internal.iter().filter(|&&x| x).count())
}

pub fn oracle_kiob(g: &Digraph, k: usize, b: &mut Budget) -> Result<bool> {
    Ok(max_internal_by_growth(g, b)?.is_some_and(|m| m >= k))
}

/// Maximum matching size of the underlying graph restricted to `allowed`,
/// by branching on the smallest allowed node.
pub fn brute_matching_size(g: &Graph, allowed: ElemSet, b: &mut Budget) -> Result<usize> {
    let Some(v) = allowed.min() else { return Ok(0) };
    b.spend(1)?;
    let rest = allowed.minus(ElemSet::singleton(v));
    let mut best = brute_matching_size(g, rest, b)?;
    for &u in g.neighbors(v) {
        if rest.contains(u) {
            best = best.max(1 + brute_matching_size(g, rest.minus(ElemSet::singleton(u)), b)?);
        }
    }
    Ok(best)
}

/// Tree & paths by growing every out-tree of the right shape and matching
/// the remaining nodes exhaustively.
pub fn oracle_tp(inst: &TpInstance, b: &mut Budget) -> Result<bool> {
    let (x, y) = (inst.internal(), inst.leaves());
    if y == 0 {
        return Ok(false);
    }
    let und = inst.graph.underlying();
    let all = ElemSet::full(inst.graph.n());
    let mut seen_rest = HashSet::new();
    for nodes in out_tree_sets(&inst.graph, inst.root, x, y, b)? {
        let rest = all.minus(nodes);
        if seen_rest.insert(rest) && brute_matching_size(&und, rest, b)? >= inst.q {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Tree & paths by choosing the node set first and then testing parent
/// arrays inside it.
pub fn tp_by_node_sets(inst: &TpInstance, b: &mut Budget) -> Result<bool> {
    let (x, y) = (inst.internal(), inst.leaves());
    let n = inst.graph.n();
    if y == 0 || x + y > n {
        return Ok(false);
    }
    let und = inst.graph.underlying();
    let others: Vec<usize> = (0..n).filter(|&v| v != inst.root).collect();
    for combo in others.iter().copied().combinations(x + y - 1) {
        b.spend(1)?;
        let mut set = ElemSet::from_iter(combo.iter().copied());
        set.insert(inst.root);
        if !tree_with_internal(&inst.graph, inst.root, set, x, b)? {
            continue;
        }
        if brute_matching_size(&und, ElemSet::full(n).minus(set), b)? >= inst.q {
            return Ok(true);
        }
    }
    Ok(false)
}

fn tree_with_internal(g: &Digraph, root: usize, set: ElemSet, x: usize, b: &mut Budget) -> Result<bool> {
    let members: Vec<usize> = set.iter().filter(|&v| v != root).collect();
    let mut parent = vec![None; g.n()];
    fn go(
        g: &Digraph,
        root: usize,
        set: ElemSet,
        x: usize,
        members: &[usize],
        i: usize,
        parent: &mut Vec<Option<usize>>,
        b: &mut Budget,
    ) -> Result<bool> {
        if i == members.len() {
            b.spend(1)?;
            // every member must reach the root through parents inside the set
            for &m in members {
                let mut v = m;
                let mut steps = 0;
                while v != root {
                    v = parent[v].unwrap();
                    steps += 1;
                    if steps > members.len() {
                        return Ok(false);
                    }
                }
            }
            let internal = ElemSet::from_iter(members.iter().map(|&m| parent[m].unwrap()));
            return Ok(internal.len() == x);
        }
        let v = members[i];
        for &(p, _) in g.inn(v) {
            if set.contains(p) {
                parent[v] = Some(p);
                if go(g, root, set, x, members, i + 1, parent, b)? {
                    return Ok(true);
                }
            }
        }
        parent[v] = None;
        Ok(false)
    }
    if members.is_empty() {
        return Ok(x == 0);
    }
    go(g, root, set, x, &members, 0, &mut parent, b)
}

// ---------------------------------------------------------------------------
// Weighted 3-set packing

/// Maximum weight of `k` pairwise disjoint sets, with the chosen indices, by
/// depth-first search in index order.
pub fn oracle_wsp(family: &WeightedSetFamily, k: usize, b: &mut Budget) -> Result<Option<(i64, Vec<usize>)>> {
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut chosen = Vec::new();
    fn go(
        fam: &WeightedSetFamily,
        k: usize,
        from: usize,
        used: ElemSet,
        w: i64,
        chosen: &mut Vec<usize>,
        best: &mut Option<(i64, Vec<usize>)>,
        b: &mut Budget,
    ) -> Result<()> {
        b.spend(1)?;
        if chosen.len() == k {
            if best.as_ref().is_none_or(|(bw, _)| w > *bw) {
                *best = Some((w, chosen.clone()));
            }
            return Ok(());
        }
        for i in from..fam.sets.len() {
            let s = fam.sets[i];
            if used.disjoint(s.members) {
                chosen.push(i);
                go(fam, k, i + 1, used.union(s.members), add_weights(w, s.weight)?, chosen, best, b)?;
                chosen.pop();
            }
        }
        Ok(())
    }
    go(family, k, 0, ElemSet::EMPTY, 0, &mut chosen, &mut best, b)?;
    Ok(best)
}

/// Same optimum by scanning all `k`-combinations.
pub fn wsp_by_combinations(family: &WeightedSetFamily, k: usize, b: &mut Budget) -> Result<Option<i64>> {
    let mut best = None;
    for combo in (0..family.sets.len()).combinations(k) {
        b.spend(1)?;
        let mut used = ElemSet::EMPTY;
        let mut ok = true;
        let mut w = 0i64;
        for &i in &combo {
            let s = family.sets[i];
            if !used.disjoint(s.members) {
                ok = false;
                break;
            }
            used = used.union(s.members);
            w = add_weights(w, s.weight)?;
        }
        if ok {
            best = Some(best.map_or(w, |x: i64| x.max(w)));
        }
    }
    Ok(best)
}

/// Best weight of an ordered solution meeting the three cut conditions,
/// with that ordering.
pub fn oracle_cwsp_best(inst: &CwspInstance, b: &mut Budget) -> Result<Option<(i64, Vec<usize>)>> {
    inst.validate()?;
    let mut best: Option<(i64, Vec<usize>)> = None;
    for combo in (0..inst.family.sets.len()).combinations(inst.k) {
        b.spend(1)?;
        let mut order = combo;
        order.sort_by_key(|&i| inst.family.sets[i].members.min());
        if let Ok(w) = cwsp_conditions(inst, &order) {
            if best.as_ref().is_none_or(|(bw, _)| w > *bw) {
                best = Some((w, order));
            }
        }
    }
    Ok(best)
}

pub fn oracle_cwsp(inst: &CwspInstance, b: &mut Budget) -> Result<bool> {
    Ok(oracle_cwsp_best(inst, b)?.is_some_and(|(w, _)| w >= inst.w))
}

/// Whether `later`, the sets meant to follow `prefix` in an ordered
/// solution, may do so after the smallest elements of the prefix are
/// deleted: each must start beyond every such element and avoid them all.
pub fn smallest_element_closure_check(later: &[ElemSet], prefix: &[ElemSet]) -> bool {
    let mins = ElemSet::from_iter(prefix.iter().filter_map(|&s| s.min()));
    let Some(top) = mins.max() else { return true };
    later.iter().all(|&s| s.min().is_some_and(|m| m > top) && s.disjoint(mins))
}

// ---------------------------------------------------------------------------
// Path packing

/// All node sets of three nodes that induce a connected subgraph.
pub fn connected_triples(g: &Graph) -> Vec<ElemSet> {
    let mut out = Vec::new();
    for (a, b, c) in (0..g.n()).tuple_combinations() {
        let e = g.has_edge(a, b) as u8 + g.has_edge(b, c) as u8 + g.has_edge(a, c) as u8;
        if e >= 2 {
            out.push(ElemSet::from_iter([a, b, c]));
        }
    }
    out
}

/// A `k`-packing of 3-node paths, by depth-first search that covers the
/// smallest undecided node or discards it.
pub fn oracle_p2p(g: &Graph, k: usize, b: &mut Budget) -> Result<Option<Vec<P2>>> {
    fn go(g: &Graph, k: usize, open: ElemSet, acc: &mut Vec<P2>, b: &mut Budget) -> Result<bool> {
        b.spend(1)?;
        if acc.len() == k {
            return Ok(true);
        }
        if open.len() < 3 * (k - acc.len()) {
            return Ok(false);
        }
        let v = open.min().unwrap();
        let rest = open.minus(ElemSet::singleton(v));
        let cand: Vec<usize> = rest.iter().collect();
        for (i, &x) in cand.iter().enumerate() {
            for &y in &cand[i + 1..] {
                for p in [[x, v, y], [v, x, y], [v, y, x]] {
                    if is_p2(g, &p) {
                        acc.push(p);
                        if go(g, k, rest.minus(ElemSet::from_iter([x, y])), acc, b)? {
                            return Ok(true);
                        }
                        acc.pop();
                        break;
                    }
                }
            }
        }
        go(g, k, rest, acc, b)
    }
    let mut acc = Vec::new();
    Ok(if go(g, k, ElemSet::full(g.n()), &mut acc, b)? { Some(acc) } else { None })
}

/// Whether a `k`-packing exists, by scanning combinations of connected
/// triples.
pub fn p2p_by_triples(g: &Graph, k: usize, b: &mut Budget) -> Result<bool> {
    let triples = connected_triples(g);
    for combo in triples.iter().combinations(k) {
        b.spend(1)?;
        let mut used = ElemSet::EMPTY;
        if combo.iter().all(|s| {
            let ok = used.disjoint(**s);
            used = used.union(**s);
            ok
        }) {
            return Ok(true);
        }
    }
    Ok(k == 0)
}

/// Whether `t` disjoint sets of `sets` fit inside `allowed`.
pub fn disjoint_sets_within(sets: &[ElemSet], allowed: ElemSet, t: usize, b: &mut Budget) -> Result<bool> {
    fn go(sets: &[ElemSet], from: usize, allowed: ElemSet, t: usize, b: &mut Budget) -> Result<bool> {
        b.spend(1)?;
        if t == 0 {
            return Ok(true);
        }
        for i in from..sets.len() {
            if sets[i].is_subset(allowed) && go(sets, i + 1, allowed.minus(sets[i]), t - 1, b)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    go(sets, 0, allowed, t, b)
}

/// Whether some `k`-packing has exactly `p` nodes in `y` and exactly `q`
/// paths touching `y`.
pub fn sol_pq_nonempty(g: &Graph, k: usize, y: ElemSet, p: usize, q: usize, b: &mut Budget) -> Result<bool> {
    let triples = connected_triples(g);
    fn go(
        t: &[ElemSet],
        from: usize,
        used: ElemSet,
        left: usize,
        y: ElemSet,
        p: usize,
        q: usize,
        b: &mut Budget,
    ) -> Result<bool> {
        b.spend(1)?;
        if left == 0 {
            return Ok(p == 0 && q == 0);
        }
        for i in from..t.len() {
            if !used.disjoint(t[i]) {
                continue;
            }
            let hit = t[i].inter(y).len();
            if hit > p || (hit > 0 && q == 0) {
                continue;
            }
            if go(t, i + 1, used.union(t[i]), left - 1, y, p - hit, q - (hit > 0) as usize, b)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    go(&triples, 0, ElemSet::EMPTY, k, y, p, q, b)
}

/// Whether some candidate `F` and `k − q` disjoint sets avoiding it exist.
pub fn oracle_pro2(inst: &Pro2Instance, b: &mut Budget) -> Result<bool> {
    let all = ElemSet::full(inst.n);
    for &f in &inst.family {
        if disjoint_sets_within(&inst.sets, all.minus(f), inst.need(), b)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The cut variant: some candidate and ordered family meeting all the
/// conditions under `f`.
pub fn oracle_cpro2(inst: &Pro2Instance, inv_eps: usize, f: &[usize], b: &mut Budget) -> Result<bool> {
    for &cand in &inst.family {
        for combo in inst.sets.iter().copied().combinations(inst.need()) {
            b.spend(1)?;
            let mut order = combo;
            order.sort_by_key(|&s| s.min());
            if verify_cpro2_solution(inst, inv_eps, f, cand, &order).is_ok() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Cut weighted k-path

/// Minimum total weight over all piece tuples meeting every solution
/// condition (ignoring the weight bound), with the pieces.
pub fn oracle_kcwp_best(inst: &KcwpInstance, b: &mut Budget) -> Result<Option<(i64, KcwpPieces)>> {
    let prm = inst.params()?;
    if inst.validate().is_err() {
        return Ok(None);
    }
    let ends = inst.pieces();
    let endpoints = inst.endpoints();
    let a = prm.left_pieces();
    struct Ctx<'a> {
        inst: &'a KcwpInstance,
        ends: Vec<(usize, usize)>,
        endpoints: ElemSet,
        a: usize,
        prm: crate::problems::KcwpParams,
        best: Option<(i64, KcwpPieces)>,
    }
    fn piece(
        cx: &mut Ctx,
        idx: usize,
        cur: &mut Vec<usize>,
        used: ElemSet,
        cl: usize,
        cr: usize,
        w: i64,
        acc: &mut KcwpPieces,
        b: &mut Budget,
    ) -> Result<()> {
        b.spend(1)?;
        let want = if idx == cx.a { cx.prm.mid_internal } else { cx.prm.side_internal };
        let (_, t) = cx.ends[idx];
        let v = *cur.last().unwrap();
        if cur.len() == want + 1 {
            let Some(a) = cx.inst.graph.weight(v, t) else { return Ok(()) };
            let w = add_weights(w, a)?;
            let ok = if idx < cx.a { cx.prm.left_ok(idx + 1, cl) } else { cx.prm.right_ok(idx - cx.a, cr) };
            if !ok {
                return Ok(());
            }
            cur.push(t);
            acc.push(cur.clone());
            cur.pop();
            if idx + 1 == cx.ends.len() {
                if cl == cx.prm.k1 && cr == cx.prm.k2 && cx.best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                    cx.best = Some((w, acc.clone()));
                }
            } else {
                let s = cx.ends[idx + 1].0;
                let mut next = vec![s];
                piece(cx, idx + 1, &mut next, used, cl, cr, w, acc, b)?;
            }
            acc.pop();
            return Ok(());
        }
        for &(u, a) in cx.inst.graph.out(v) {
            if cx.endpoints.contains(u) || used.contains(u) {
                continue;
            }
            if (idx < cx.a && cx.inst.right.contains(u)) || (idx > cx.a && cx.inst.left.contains(u)) {
                continue;
            }
            let (l, r) = (cx.inst.left.contains(u) as usize, cx.inst.right.contains(u) as usize);
            if cl + l > cx.prm.k1 || cr + r > cx.prm.k2 {
                continue;
            }
            cur.push(u);
            let mut used2 = used;
            used2.insert(u);
            piece(cx, idx, cur, used2, cl + l, cr + r, add_weights(w, a)?, acc, b)?;
            cur.pop();
        }
        Ok(())
    }
    let mut cx = Ctx { inst, ends: ends.clone(), endpoints, a, prm, best: None };
    let mut cur = vec![ends[0].0];
    let mut acc = Vec::new();
    piece(&mut cx, 0, &mut cur, ElemSet::EMPTY, 0, 0, 0, &mut acc, b)?;
    if let Some((_, pieces)) = &cx.best {
        debug_assert!(verify_kcwp_pieces(&KcwpInstance { w: i64::MAX, ..inst.clone() }, pieces).is_ok());
    }
    Ok(cx.best)
}

pub fn oracle_kcwp(inst: &KcwpInstance, b: &mut Budget) -> Result<bool> {
    Ok(oracle_kcwp_best(inst, b)?.is_some_and(|(w, _)| w <= inst.w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Objective, OrderedUniverse, WeightedSet};

    fn big() -> Budget {
        Budget::unlimited("test")
    }

    #[test]
    fn single_arc_path() {
        let g = Digraph::new(2, &[(0, 1, 7)]).unwrap();
        assert_eq!(oracle_kpath(&g, 2, &mut big()).unwrap().unwrap().0, 7);
        assert_eq!(oracle_kpath(&g, 3, &mut big()).unwrap(), None);
        assert_eq!(kpath_by_subsets(&g, 2, &mut big()).unwrap(), Some(7));
    }

    #[test]
    fn star_has_one_internal_node() {
        let g = Digraph::new(4, &[(0, 1, 0), (0, 2, 0), (0, 3, 0)]).unwrap();
        assert!(oracle_kiob(&g, 1, &mut big()).unwrap());
        assert!(!oracle_kiob(&g, 2, &mut big()).unwrap());
        assert_eq!(max_internal_by_parents(&g, &mut big()).unwrap().unwrap().0, 1);
    }

    #[test]
    fn cycle_of_three() {
        let g = Digraph::new(3, &[(0, 1, 0), (1, 2, 0), (2, 0, 0)]).unwrap();
        assert!(oracle_kiob(&g, 2, &mut big()).unwrap());
        assert!(!oracle_kiob(&g, 3, &mut big()).unwrap());
    }

    #[test]
    fn two_triangles() {
        let g = Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(oracle_p2p(&g, 2, &mut big()).unwrap().unwrap().len(), 2);
        assert!(p2p_by_triples(&g, 2, &mut big()).unwrap());
        assert!(oracle_p2p(&g, 3, &mut big()).unwrap().is_none());
    }

    #[test]
    fn empty_family_has_no_cut_solution() {
        let fam = WeightedSetFamily::new(OrderedUniverse::numbered(6), vec![], Objective::Max).unwrap();
        let inst = CwspInstance { family: fam, w: 0, k: 1, inv_eps: 1, f: vec![0] };
        assert!(!oracle_cwsp(&inst, &mut big()).unwrap());
    }

    #[test]
    fn wsp_strategies_agree_on_small_family() {
        let raw = vec![
            WeightedSet { members: ElemSet::from_iter([0, 1, 2]), weight: 3 },
            WeightedSet { members: ElemSet::from_iter([2, 3, 4]), weight: 5 },
            WeightedSet { members: ElemSet::from_iter([3, 4, 5]), weight: 1 },
        ];
        let fam = WeightedSetFamily::new(OrderedUniverse::numbered(6), raw, Objective::Max).unwrap();
        assert_eq!(oracle_wsp(&fam, 2, &mut big()).unwrap().unwrap().0, 4);
        assert_eq!(wsp_by_combinations(&fam, 2, &mut big()).unwrap(), Some(4));
    }

    #[test]
    fn closure_check() {
        let later = [ElemSet::from_iter([3, 4, 5])];
        assert!(smallest_element_closure_check(&later, &[]));
        assert!(smallest_element_closure_check(&later, &[ElemSet::from_iter([0, 1, 2])]));
        // the second set reuses the prefix's smallest element 0
        let bad = [ElemSet::from_iter([3, 4, 5]), ElemSet::from_iter([0, 6, 7])];
        assert!(!smallest_element_closure_check(&bad, &[ElemSet::from_iter([0, 1, 2])]));
    }
}
