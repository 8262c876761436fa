//! Packing of 3-node paths by iterative compression: a representative-family
//! dynamic program over the nodes outside the previous packing, and a cut
//! dynamic program over the nodes inside it.

use std::collections::BTreeMap;

use crate::budget::Budget;
use crate::cutting::for_each_cut;
use crate::error::{Error, Result};
use crate::oracles::connected_triples;
use crate::problems::{as_p2, pro2_schedule, without_min, Pro2Instance, P2};
use crate::repsets::{represent, Part, PartitionSpec};
use crate::types::{ElemSet, Graph, Objective};

#[derive(Clone, Copy, Debug)]
pub struct P2Options {
    pub c: f64,
    pub reduce: bool,
    pub inv_eps: usize,
}

impl Default for P2Options {
    fn default() -> Self {
        P2Options { c: 1.0, reduce: true, inv_eps: 2 }
    }
}

/// Nodes used by a packing.
pub fn packing_nodes(paths: &[P2]) -> ElemSet {
    paths.iter().fold(ElemSet::EMPTY, |a, p| a.union(ElemSet::from_iter(*p)))
}

/// The `(p, q)` pairs examined when extending a `(t−1)`-packing: `p` nodes
/// outside it on `q` paths.
pub fn pq_pairs(t: usize) -> Vec<(usize, usize)> {
    // 3t − ⌈2.5(t−1)⌉
    let top = 3 * t - (5 * (t - 1)).div_ceil(2);
    let mut out = Vec::new();
    for p in 3..=top {
        for q in p.div_ceil(3)..=p.min(t) {
            out.push((p, q));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// First procedure: representative families over Y

/// `(p', q', m, X')`: nodes outside the packing, paths, smallest node of the
/// last path outside the packing, and the packing nodes used.
type Pro1Key = (usize, usize, usize, ElemSet);

#[derive(Clone, Debug)]
struct Pro1Item {
    stored: ElemSet,
    path: ElemSet,
    pred: Option<(Pro1Key, usize)>,
}

/// One candidate of the returned family with the `q` paths realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pro1Candidate {
    pub x_part: ElemSet,
    pub paths: Vec<ElemSet>,
}

/// Returns every `X' ⊆ X` of size `3q − p` such that `q` disjoint 3-node
/// paths, each touching `Y`, use exactly `p` nodes of `Y` and exactly `X'`
/// inside `X`, together with such paths.
pub fn icp_pro1(
    g: &Graph,
    prev: &[P2],
    p: usize,
    q: usize,
    opts: P2Options,
    budget: &mut Budget,
) -> Result<Vec<Pro1Candidate>> {
    if p < 3 || q < p.div_ceil(3) || q > p {
        return Err(Error::Parameter(format!("p={p}, q={q} out of range")));
    }
    let n = g.n();
    if n > crate::types::MAX_ELEMENTS {
        return Err(Error::UniverseTooLarge(n));
    }
    let x = packing_nodes(prev);
    let y = ElemSet::full(n).minus(x);
    let triples: Vec<ElemSet> = connected_triples(g).into_iter().filter(|t| !t.disjoint(y)).collect();
    let mut layers: Vec<BTreeMap<Pro1Key, Vec<Pro1Item>>> = Vec::with_capacity(q);

    let mut first: BTreeMap<Pro1Key, Vec<Pro1Item>> = BTreeMap::new();
    for &t in &triples {
        let ty = t.inter(y);
        if ty.len() > p {
            continue;
        }
        budget.spend(1)?;
        let key = (ty.len(), 1, ty.min().expect("touches Y"), t.inter(x));
        first.entry(key).or_default().push(Pro1Item { stored: without_min(ty), path: t, pred: None });
    }
    layers.push(finish_pro1(first, p, y, opts, budget)?);

    for qq in 2..=q {
        let mut next: BTreeMap<Pro1Key, Vec<Pro1Item>> = BTreeMap::new();
        for (key, items) in &layers[qq - 2] {
            let &(p1, _, m1, x1) = key;
            for &t in &triples {
                let ty = t.inter(y);
                let tx = t.inter(x);
                let m = ty.min().expect("touches Y");
                if m <= m1 || p1 + ty.len() > p || !tx.disjoint(x1) {
                    continue;
                }
                let nk = (p1 + ty.len(), qq, m, x1.union(tx));
                for (idx, a) in items.iter().enumerate() {
                    budget.spend(1)?;
                    if !a.stored.disjoint(ty) {
                        continue;
                    }
                    next.entry(nk).or_default().push(Pro1Item {
                        stored: a.stored.union(without_min(ty)),
                        path: t,
                        pred: Some((*key, idx)),
                    });
                }
            }
        }
        layers.push(finish_pro1(next, p, y, opts, budget)?);
    }

    let mut out: BTreeMap<ElemSet, Vec<ElemSet>> = BTreeMap::new();
    for (key, items) in &layers[q - 1] {
        if key.0 != p || out.contains_key(&key.3) {
            continue;
        }
        let Some(_) = items.first() else { continue };
        let mut paths = Vec::with_capacity(q);
        let (mut k, mut idx) = (*key, 0usize);
        for qq in (1..=q).rev() {
            let it = &layers[qq - 1][&k][idx];
            paths.push(it.path);
            if let Some((pk, pi)) = it.pred {
                k = pk;
                idx = pi;
            }
        }
        paths.reverse();
        out.insert(key.3, paths);
    }
    Ok(out.into_iter().map(|(x_part, paths)| Pro1Candidate { x_part, paths }).collect())
}

/// Deduplicates every entry and keeps a `(p − p')`-representative subfamily
/// with respect to `Y`.
fn finish_pro1(
    layer: BTreeMap<Pro1Key, Vec<Pro1Item>>,
    p: usize,
    y: ElemSet,
    opts: P2Options,
    budget: &mut Budget,
) -> Result<BTreeMap<Pro1Key, Vec<Pro1Item>>> {
    let mut out = BTreeMap::new();
    for (key, items) in layer {
        let mut seen = std::collections::HashSet::new();
        let mut kept: Vec<Pro1Item> = items.into_iter().filter(|it| seen.insert(it.stored)).collect();
        if opts.reduce && kept.len() > 1 {
            let (pp, qq) = (key.0, key.1);
            let size = pp - qq;
            let mut part = Part::new(y, (size + p - pp).min(y.len()), size);
            part.c = opts.c;
            let spec = PartitionSpec { parts: vec![part] };
            let pairs: Vec<(ElemSet, i64)> = kept.iter().map(|it| (it.stored, 0)).collect();
            let (mut idx, _) = represent(&spec, &pairs, Objective::Max, budget)?;
            idx.sort_unstable();
            let mut slots: Vec<Option<Pro1Item>> = kept.into_iter().map(Some).collect();
            kept = idx.into_iter().map(|i| slots[i].take().expect("kept once")).collect();
        }
        out.insert(key, kept);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Second procedure: the cut dynamic program over X

/// A solution of the cut problem: the candidate and the ordered sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pro2Solution {
    pub chosen: ElemSet,
    pub sets: Vec<ElemSet>,
}

type Pro2Key = (Vec<u8>, usize, ElemSet);

#[derive(Clone, Copy, Debug)]
struct Pro2Back {
    set: usize,
    /// Candidate index for the first layer, otherwise unused.
    cand: usize,
}

/// Decides the cut problem over elements `0..n` in index order with stage
/// ends `f` (non-decreasing).
pub fn solve_cpro2(inst: &Pro2Instance, inv_eps: usize, f: &[usize], budget: &mut Budget) -> Result<Option<Pro2Solution>> {
    inst.validate()?;
    if f.len() != inv_eps || f.windows(2).any(|w| w[0] > w[1]) || f.iter().any(|&v| v >= inst.n.max(1)) {
        return Err(Error::Parameter("f must be a non-decreasing map into the universe".into()));
    }
    let need = inst.need();
    if need == 0 {
        return Ok(inst.family.first().map(|&c| Pro2Solution { chosen: c, sets: vec![] }));
    }
    let r = pro2_schedule(need, inst.given(), inv_eps)?;
    let step = need / inv_eps;
    let sets = &inst.sets;
    let count = |x: ElemSet| -> Vec<u8> { f.iter().map(|&fl| x.at_most(fl).len() as u8).collect() };
    let mins: Vec<usize> = sets.iter().map(|&s| s.min().expect("non-empty")).collect();
    let schedule_ok = |s: &[u8], upto: usize| (1..upto).all(|l| s[l - 1] as i64 >= r[l]);
    let stage = |j: usize| j.div_ceil(step).min(inv_eps + 1);

    // layer j: state -> (back-pointer, predecessor state)
    let mut layers: Vec<BTreeMap<Pro2Key, (Pro2Back, Option<Pro2Key>)>> = Vec::with_capacity(need);
    let mut first = BTreeMap::new();
    for (ci, &cand) in inst.family.iter().enumerate() {
        for (e, &s) in sets.iter().enumerate() {
            budget.spend(1)?;
            if !s.disjoint(cand) {
                continue;
            }
            let u = cand.union(without_min(s));
            first.entry((count(u), mins[e], u)).or_insert((Pro2Back { set: e, cand: ci }, None));
        }
    }
    layers.push(first);
    for j in 2..=need {
        let i = stage(j);
        let f_prev = (i > 1).then(|| f[i - 2]);
        let mut next = BTreeMap::new();
        for key in layers[j - 2].keys() {
            let (s_prev, m_prev, u_prev) = key;
            let a = match f_prev {
                Some(fp) => u_prev.minus(u_prev.at_most(fp)),
                None => *u_prev,
            };
            for (e, &s) in sets.iter().enumerate() {
                budget.spend(1)?;
                let m = mins[e];
                if m <= *m_prev || f_prev.is_some_and(|fp| m <= fp) || !a.disjoint(s) {
                    continue;
                }
                let add = count(without_min(s));
                let s_new: Vec<u8> = s_prev.iter().zip(&add).map(|(x, y)| x + y).collect();
                if !schedule_ok(&s_new, i) {
                    continue;
                }
                next.entry((s_new, m, a.union(without_min(s))))
                    .or_insert((Pro2Back { set: e, cand: 0 }, Some(key.clone())));
            }
        }
        layers.push(next);
    }
    let Some(end) = layers[need - 1].keys().find(|k| schedule_ok(&k.0, inv_eps + 1)).cloned() else {
        return Ok(None);
    };
    let mut order = Vec::with_capacity(need);
    let mut key = end;
    let mut chosen = ElemSet::EMPTY;
    for j in (1..=need).rev() {
        let (back, pred) = layers[j - 1][&key].clone();
        order.push(sets[back.set]);
        match pred {
            Some(pk) => key = pk,
            None => chosen = inst.family[back.cand],
        }
    }
    order.reverse();
    Ok(Some(Pro2Solution { chosen, sets: order }))
}

fn remap(s: ElemSet, rank: &[usize]) -> ElemSet {
    ElemSet::from_iter(s.iter().map(|e| rank[e]))
}

/// Decides the uncut problem by trying the cut problem on every cutting of
/// the universe.
pub fn procedure2(inst: &Pro2Instance, inv_eps: usize, budget: &mut Budget) -> Result<Option<Pro2Solution>> {
    inst.validate()?;
    if inv_eps == 0 {
        return Err(Error::Parameter("1/eps must be positive".into()));
    }
    let need = inst.need();
    if need == 0 || inst.family.is_empty() {
        return Ok(inst.family.first().filter(|_| need == 0).map(|&c| Pro2Solution { chosen: c, sets: vec![] }));
    }
    let inv = inv_eps.min(need);
    let mut found = None;
    for_each_cut(inst.n, inv, budget, |cut, budget| {
        let rank = cut.ranks();
        let local = Pro2Instance {
            n: inst.n,
            sets: inst.sets.iter().map(|&s| remap(s, &rank)).collect(),
            k: inst.k,
            p: inst.p,
            q: inst.q,
            family: inst.family.iter().map(|&s| remap(s, &rank)).collect(),
        };
        if let Some(sol) = solve_cpro2(&local, inv, &cut.f, budget)? {
            found = Some(Pro2Solution {
                chosen: remap(sol.chosen, &cut.order),
                sets: sol.sets.iter().map(|&s| remap(s, &cut.order)).collect(),
            });
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(found)
}

// ---------------------------------------------------------------------------
// Driver

/// Extends a `(t−1)`-packing to a `t`-packing, if one exists.
pub fn compress_step(g: &Graph, prev: &[P2], opts: P2Options, budget: &mut Budget) -> Result<Option<Vec<P2>>> {
    let t = prev.len() + 1;
    let x = packing_nodes(prev);
    let xs: Vec<usize> = x.iter().collect();
    let mut local_of = vec![usize::MAX; g.n()];
    for (i, &v) in xs.iter().enumerate() {
        local_of[v] = i;
    }
    let keep: Vec<bool> = (0..g.n()).map(|v| x.contains(v)).collect();
    let inside: Vec<ElemSet> = connected_triples(&g.induced(&keep))
        .into_iter()
        .filter(|s| s.is_subset(x))
        .map(|s| remap(s, &local_of))
        .collect();
    for (p, q) in pq_pairs(t) {
        let cands = icp_pro1(g, prev, p, q, opts, budget)?;
        if cands.is_empty() {
            continue;
        }
        let inst = Pro2Instance {
            n: xs.len(),
            sets: inside.clone(),
            k: t,
            p,
            q,
            family: cands.iter().map(|c| remap(c.x_part, &local_of)).collect(),
        };
        let Some(sol) = procedure2(&inst, opts.inv_eps, budget)? else { continue };
        let cand = cands
            .iter()
            .find(|c| remap(c.x_part, &local_of) == sol.chosen)
            .expect("the chosen set is a candidate");
        let mut paths: Vec<P2> = Vec::with_capacity(t);
        for &s in cand.paths.iter().chain(sol.sets.iter().map(|s| remap(*s, &xs)).collect::<Vec<_>>().iter()) {
            paths.push(as_p2(g, s).ok_or_else(|| Error::Invariant(format!("{s:?} is not a path")))?);
        }
        return Ok(Some(paths));
    }
    Ok(None)
}

/// Packing of `k` node-disjoint 3-node paths, built one path count at a
/// time from the previous round's packing.
pub fn solve_p2packing(g: &Graph, k: usize, opts: P2Options, budget: &mut Budget) -> Result<Option<Vec<P2>>> {
    if g.n() > crate::types::MAX_ELEMENTS {
        return Err(Error::UniverseTooLarge(g.n()));
    }
    let mut packing: Vec<P2> = Vec::new();
    for _ in 1..=k {
        match compress_step(g, &packing, opts, budget)? {
            Some(next) => {
                debug_assert!(crate::problems::verify_packing(g, next.len(), &next).is_ok());
                packing = next;
            }
            None => return Ok(None),
        }
    }
    Ok(Some(packing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::verify_packing;

    #[test]
    fn pair_ranges() {
        assert_eq!(pq_pairs(1), vec![(3, 1)]);
        assert_eq!(pq_pairs(3), vec![(3, 1), (3, 2), (3, 3), (4, 2), (4, 3)]);
        assert!(pq_pairs(4).iter().all(|&(p, q)| p <= 4 && q <= 4));
    }

    #[test]
    fn triangle_and_two_triangles() {
        let mut b = Budget::unlimited("t");
        let tri = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let sol = solve_p2packing(&tri, 1, P2Options::default(), &mut b).unwrap().unwrap();
        assert!(verify_packing(&tri, 1, &sol).is_ok());
        assert!(solve_p2packing(&tri, 2, P2Options::default(), &mut b).unwrap().is_none());
        let two = Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let sol = solve_p2packing(&two, 2, P2Options::default(), &mut b).unwrap().unwrap();
        assert!(verify_packing(&two, 2, &sol).is_ok());
    }

    #[test]
    fn no_edges_into_y() {
        // the previous packing is a whole component
        let g = Graph::new(5, &[(0, 1), (1, 2)]).unwrap();
        let mut b = Budget::unlimited("t");
        for (p, q) in pq_pairs(2) {
            assert!(icp_pro1(&g, &[[0, 1, 2]], p, q, P2Options::default(), &mut b).unwrap().is_empty());
        }
    }

    #[test]
    fn all_outside_gives_empty_candidate() {
        let g = Graph::new(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let mut b = Budget::unlimited("t");
        let c = icp_pro1(&g, &[[0, 1, 2]], 3, 1, P2Options::default(), &mut b).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].x_part, ElemSet::EMPTY);
    }

    #[test]
    fn vacuous_candidate_accepts() {
        let inst = Pro2Instance {
            n: 6,
            sets: vec![ElemSet::from_iter([0, 1, 2])],
            k: 2,
            p: 3,
            q: 1,
            family: vec![ElemSet::EMPTY],
        };
        let mut b = Budget::unlimited("t");
        assert!(procedure2(&inst, 1, &mut b).unwrap().is_some());
    }
}
