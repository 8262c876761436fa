//! Weighted k-path: the cut problem's three-phase dynamic program, the
//! witness construction used to exercise it, and the enumerating driver.
//!
//! The dynamic program walks the internal positions of all pieces in piece
//! order. Left pieces (phase M) may use L and free nodes, the middle piece
//! (phase N) anything, right pieces (phase K) R and free nodes. Entries are
//! keyed by `(#L, #R, last node)`; the free count is implied by the layer.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_rational::Ratio;
use serde::Serialize;

use crate::budget::{binomial, Budget};
use crate::error::{Error, Result};
use crate::oracles::oracle_kpath;
use crate::problems::{path_weight, KcwpInstance, KcwpParams, KcwpPieces, KcwpViolation};
use crate::repsets::{represent, Part, PartitionSpec};
use crate::types::{add_weights, Digraph, ElemSet, Objective};
use crate::unisets::shared_universal;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KcwpTradeoffs {
    pub c1: f64,
    pub c2: f64,
    pub cl: f64,
    pub cr: f64,
}

impl Default for KcwpTradeoffs {
    fn default() -> Self {
        KcwpTradeoffs { c1: 1.504, c2: 1.398, cl: 1.092, cr: 1.876 }
    }
}

impl KcwpTradeoffs {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 >= self.c2 && self.c2 >= 1.0 && self.cl >= 1.0 && self.cr >= 1.0) {
            return Err(Error::Parameter(format!("need c1 >= c2 >= 1 and cl, cr >= 1, got {self:?}")));
        }
        Ok(())
    }

    /// The interpolation grid `c1 − d, c1 − 2d, …, c2`, with `d` the step
    /// closest to `ε` that divides `c1 − c2`.
    pub fn sweep(&self, inv_eps: usize) -> Vec<f64> {
        let span = self.c1 - self.c2;
        let steps = ((span * inv_eps as f64).round() as usize).max(1);
        let d = span / steps as f64;
        (1..=steps).map(|t| if t == steps { self.c2 } else { self.c1 - t as f64 * d }).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KcwpOptions {
    pub tradeoffs: KcwpTradeoffs,
    /// Representative reductions after every entry; off gives the plain
    /// dynamic program.
    pub reduce: bool,
}

impl Default for KcwpOptions {
    fn default() -> Self {
        KcwpOptions { tradeoffs: KcwpTradeoffs::default(), reduce: true }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct KcwpStats {
    pub entries: usize,
    pub peak_entry: usize,
    pub stored: usize,
    pub sweep_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KcwpSolution {
    pub pieces: KcwpPieces,
    pub weight: i64,
}

pub fn validate_kcwp(inst: &KcwpInstance) -> std::result::Result<(), KcwpViolation> {
    inst.validate()
}

type Key = (usize, usize, usize);

#[derive(Clone, Debug)]
struct Item {
    stored: ElemSet,
    weight: i64,
    node: usize,
    pred: Option<(Key, usize)>,
}

type Layer = BTreeMap<Key, Vec<Item>>;

/// Lightest solution of the cut problem, ignoring `W`.
pub fn kcwp_best(inst: &KcwpInstance, opts: KcwpOptions, budget: &mut Budget) -> Result<(Option<KcwpSolution>, KcwpStats)> {
    opts.tradeoffs.validate()?;
    let prm = inst.params()?;
    inst.validate().map_err(|v| Error::Parameter(format!("invalid cut k-path input: {v:?}")))?;
    let g = &inst.graph;
    let ends = inst.pieces();
    let a = prm.left_pieces();
    let free = inst.free();
    let (left, right) = (inst.left, inst.right);

    // piece index of every internal position
    let mut piece_of = Vec::new();
    for (idx, _) in ends.iter().enumerate() {
        let len = if idx == a { prm.mid_internal } else { prm.side_internal };
        piece_of.extend(std::iter::repeat_n(idx, len));
    }
    let total = piece_of.len();
    let is_first = |t: usize| t == 0 || piece_of[t - 1] != piece_of[t];
    let closes_ok = |idx: usize, cl: usize, cr: usize| {
        if idx < a {
            prm.left_ok(idx + 1, cl)
        } else {
            (idx > a || cl == prm.k1) && prm.right_ok(idx - a, cr)
        }
    };
    let mut stats = KcwpStats::default();
    let mut layers: Vec<Layer> = Vec::with_capacity(total);

    for t in 0..total {
        let idx = piece_of[t];
        let allowed = if idx < a {
            left.union(free)
        } else if idx == a {
            left.union(right).union(free)
        } else {
            right.union(free)
        };
        let mut layer: Layer = BTreeMap::new();
        let (cs_used, strip_left) = (t, t > 0 && is_first(t) && idx == a + 1);
        let mut extend = |from: Option<(&Key, usize, &Item)>, u: usize, arc: i64, budget: &mut Budget| -> Result<()> {
            budget.spend(1)?;
            let (cl, cr, stored, weight) = match from {
                Some((key, _, it)) => (key.0, key.1, it.stored, it.weight),
                None => (0, 0, ElemSet::EMPTY, 0),
            };
            if stored.contains(u) {
                return Ok(());
            }
            let (cl, cr) = (cl + left.contains(u) as usize, cr + right.contains(u) as usize);
            let cs = cs_used + 1 - cl - cr;
            if cl > prm.k1 || cr > prm.k2 || cs > prm.k3 {
                return Ok(());
            }
            let stored = if strip_left { stored.minus(left) } else { stored };
            layer.entry((cl, cr, u)).or_default().push(Item {
                stored: stored.union(ElemSet::singleton(u)),
                weight: add_weights(weight, arc)?,
                node: u,
                pred: from.map(|(k, i, _)| (*k, i)),
            });
            Ok(())
        };
        if t == 0 {
            for &(u, w) in g.out(ends[0].0) {
                if allowed.contains(u) {
                    extend(None, u, w, budget)?;
                }
            }
        } else if is_first(t) {
            let (prev_end, start) = (ends[idx - 1].1, ends[idx].0);
            for (key, items) in &layers[t - 1] {
                let Some(close) = g.weight(key.2, prev_end) else { continue };
                if !closes_ok(idx - 1, key.0, key.1) {
                    continue;
                }
                for &(u, w) in g.out(start) {
                    if !allowed.contains(u) {
                        continue;
                    }
                    for (i, it) in items.iter().enumerate() {
                        extend(Some((key, i, it)), u, add_weights(close, w)?, budget)?;
                    }
                }
            }
        } else {
            for (key, items) in &layers[t - 1] {
                for &(u, w) in g.out(key.2) {
                    if !allowed.contains(u) {
                        continue;
                    }
                    for (i, it) in items.iter().enumerate() {
                        extend(Some((key, i, it)), u, w, budget)?;
                    }
                }
            }
        }
        let phase = Phase { idx, a, first_right: idx == a + 1 && is_first(t) };
        layers.push(finish_layer(layer, inst, &prm, phase, t + 1, opts, budget, &mut stats)?);
    }

    let last = ends.len() - 1;
    let mut best: Option<(i64, Key, usize)> = None;
    if let Some(final_layer) = layers.last() {
        for (key, items) in final_layer {
            let Some(close) = g.weight(key.2, ends[last].1) else { continue };
            if key.0 != prm.k1 || key.1 != prm.k2 || !closes_ok(last, key.0, key.1) {
                continue;
            }
            for (i, it) in items.iter().enumerate() {
                let w = add_weights(it.weight, close)?;
                if best.as_ref().is_none_or(|b| w < b.0) {
                    best = Some((w, *key, i));
                }
            }
        }
    }
    let Some((weight, mut key, mut i)) = best else { return Ok((None, stats)) };
    let mut nodes = vec![0; total];
    for t in (0..total).rev() {
        let it = &layers[t][&key][i];
        nodes[t] = it.node;
        if let Some((k, j)) = it.pred {
            (key, i) = (k, j);
        }
    }
    let mut pieces: KcwpPieces = ends.iter().map(|&(s, _)| vec![s]).collect();
    for (t, &v) in nodes.iter().enumerate() {
        pieces[piece_of[t]].push(v);
    }
    for (p, &(_, e)) in pieces.iter_mut().zip(&ends) {
        p.push(e);
    }
    Ok((Some(KcwpSolution { pieces, weight }), stats))
}

#[derive(Clone, Copy)]
struct Phase {
    idx: usize,
    a: usize,
    first_right: bool,
}

#[allow(clippy::too_many_arguments)]
fn finish_layer(
    layer: Layer,
    inst: &KcwpInstance,
    prm: &KcwpParams,
    phase: Phase,
    placed: usize,
    opts: KcwpOptions,
    budget: &mut Budget,
    stats: &mut KcwpStats,
) -> Result<Layer> {
    let tr = opts.tradeoffs;
    let free = inst.free();
    let part = |elements: ElemSet, k: usize, p: usize, c: f64| {
        let mut part = Part::new(elements, k.min(elements.len()), p);
        part.c = c;
        part
    };
    let mut out = BTreeMap::new();
    for (key, items) in layer {
        let (cl, cr, _) = key;
        let cs = placed - cl - cr;
        let mut best: HashMap<ElemSet, usize> = HashMap::new();
        let mut kept: Vec<Item> = Vec::new();
        for it in items {
            match best.get(&it.stored) {
                Some(&p) if kept[p].weight <= it.weight => {}
                Some(&p) => kept[p] = it,
                None => {
                    best.insert(it.stored, kept.len());
                    kept.push(it);
                }
            }
        }
        if opts.reduce && kept.len() > 1 {
            let fp = part(free, prm.k3, cs, tr.c1);
            let specs: Vec<PartitionSpec> = if phase.idx < phase.a {
                vec![PartitionSpec { parts: vec![part(inst.left, prm.k1, cl, tr.cl), fp] }]
            } else if phase.idx == phase.a {
                vec![PartitionSpec { parts: vec![part(inst.left, prm.k1, cl, tr.cl), part(inst.right, prm.k2, cr, tr.cr), fp] }]
            } else {
                let cs_grid = if phase.first_right { tr.sweep(inst.inv_eps) } else { vec![tr.c2] };
                if phase.first_right {
                    stats.sweep_steps += cs_grid.len();
                }
                cs_grid
                    .into_iter()
                    .map(|c| PartitionSpec { parts: vec![part(inst.right, prm.k2, cr, tr.cr), part(free, prm.k3, cs, c)] })
                    .collect()
            };
            for spec in specs {
                let pairs: Vec<(ElemSet, i64)> = kept.iter().map(|it| (it.stored, it.weight)).collect();
                let (mut idx, _) = represent(&spec, &pairs, Objective::Min, budget)?;
                idx.sort_unstable();
                let mut slots: Vec<Option<Item>> = kept.into_iter().map(Some).collect();
                kept = idx.into_iter().map(|i| slots[i].take().expect("kept once")).collect();
            }
        }
        stats.entries += 1;
        stats.peak_entry = stats.peak_entry.max(kept.len());
        stats.stored += kept.len();
        out.insert(key, kept);
    }
    Ok(out)
}

/// Decides the cut problem: a solution of weight at most `W`.
pub fn solve_kcwp(inst: &KcwpInstance, opts: KcwpOptions, budget: &mut Budget) -> Result<Option<KcwpSolution>> {
    let (best, _) = kcwp_best(inst, opts, budget)?;
    Ok(best.filter(|s| s.weight <= inst.w))
}

/// Chains the pieces of a solution into one node sequence.
pub fn assemble_path(inst: &KcwpInstance, pieces: &KcwpPieces) -> Option<Vec<usize>> {
    let order = inst.chain_order()?;
    let mut path = vec![pieces[order[0]][0]];
    for &p in &order {
        path.extend_from_slice(&pieces[p][1..]);
    }
    Some(path)
}

/// Builds the cut instance that the driver would hit for a known k-path:
/// cut nodes at fixed positions, the suffix capturing exactly `k1 + k2`
/// path nodes, the best middle piece, a balanced split of the side pieces,
/// and L, R equal to the captured nodes on either side. `W` is the path's
/// weight.
pub fn construct_kcwp_witness(
    g: &Digraph,
    path: &[usize],
    inv_eps: usize,
    delta: Ratio<i64>,
    gamma: Ratio<i64>,
) -> Result<KcwpInstance> {
    let k = path.len();
    let prm = KcwpParams::new(k, inv_eps, delta, gamma)?;
    let on_path = ElemSet::from_iter(path.iter().copied());
    if path.iter().any(|&v| v >= g.n()) || on_path.len() != k {
        return Err(Error::Parameter("known path must consist of distinct nodes of the graph".into()));
    }
    let w = path_weight(g, path).map_err(Error::Parameter)?;
    let step = prm.step;
    let mid_len = prm.mid_internal + 2;
    // 0-based positions of the cut nodes
    let mut cut_pos: Vec<usize> = (0..inv_eps).flat_map(|j| [j * step, j * step + mid_len - 1]).collect();
    cut_pos.push(k - 1);
    let u = ElemSet::from_iter(cut_pos.iter().map(|&p| path[p]));
    let x = prm.k1 + prm.k2;
    let star_at = |i: usize| ElemSet::from_iter(path.iter().copied().filter(|&v| v >= i)).minus(u);
    let i = (0..=g.n())
        .find(|&i| star_at(i).len() == x)
        .ok_or_else(|| Error::Invariant("no suffix captures the requested number of path nodes".into()))?;
    let star = star_at(i);
    let hits = |nodes: &[usize]| nodes.iter().filter(|&&v| star.contains(v)).count();

    let (mut mid_start, mut mid_hits) = (0, 0);
    for j in 0..inv_eps {
        let h = hits(&path[j * step..j * step + mid_len]);
        if j == 0 || h > mid_hits {
            (mid_start, mid_hits) = (j * step, h);
        }
    }
    let mid_end = mid_start + mid_len - 1;
    let mut sides: Vec<&[usize]> = Vec::new();
    for seg in [&path[..=mid_start], &path[mid_end..]] {
        let count = (seg.len() - 1) / step;
        sides.extend((0..count).map(|j| &seg[j * step..=j * step + step]));
    }
    let (a, b) = (prm.left_pieces(), prm.right_pieces());
    if sides.len() != a + b {
        return Err(Error::Invariant(format!("{} side pieces instead of {}", sides.len(), a + b)));
    }
    let split = (0..sides.len())
        .combinations(a)
        .find(|lp| {
            let sl: usize = lp.iter().map(|&p| hits(sides[p])).sum();
            let sr: usize = (0..sides.len()).filter(|p| !lp.contains(p)).map(|p| hits(sides[p])).sum();
            sl <= prm.k1 && sr <= prm.k2
        })
        .ok_or_else(|| Error::Invariant("no balanced split of the side pieces".into()))?;
    let mut lp: Vec<&[usize]> = split.iter().map(|&p| sides[p]).collect();
    let mut rp: Vec<&[usize]> = (0..sides.len()).filter(|p| !split.contains(p)).map(|p| sides[p]).collect();
    lp.sort_by_key(|s| std::cmp::Reverse(hits(s)));
    rp.sort_by_key(|s| hits(s));

    let mut left = ElemSet::from_iter(lp.iter().flat_map(|s| s.iter().copied())).inter(star);
    let mid_star: Vec<usize> = path[mid_start..=mid_end].iter().copied().filter(|&v| star.contains(v)).collect();
    let take = prm.k1 - left.len();
    left = left.union(ElemSet::from_iter(mid_star[..take].iter().copied()));
    let right = star.minus(left);
    Ok(KcwpInstance {
        graph: g.clone(),
        w,
        k,
        inv_eps,
        delta,
        gamma,
        left,
        right,
        l1: lp.iter().map(|s| s[0]).collect(),
        l2: lp.iter().map(|s| s[s.len() - 1]).collect(),
        r1: rp.iter().map(|s| s[0]).collect(),
        r2: rp.iter().map(|s| s[s.len() - 1]).collect(),
        v_l: path[mid_start],
        v_r: path[mid_end],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathParams {
    pub inv_eps: usize,
    pub delta: Ratio<i64>,
    pub gamma: Ratio<i64>,
}

impl Default for PathParams {
    fn default() -> Self {
        PathParams { inv_eps: 13, delta: Ratio::new(1, 12), gamma: Ratio::new(84, 1000) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KPathWitness {
    pub path: Vec<usize>,
    pub weight: i64,
}

/// Outer enumeration count: `|F| · C(n, 1/ε+1) · n · |U|^(2(m+m̃)+2(m−m̃)+2)`.
pub fn path_alg_estimate(n: usize, inv_eps: usize, family_size: u128) -> u128 {
    let u = (inv_eps + 1) as u128;
    let exp = 2 * (inv_eps - 1) + 2;
    family_size
        .saturating_mul(binomial(n, inv_eps + 1))
        .saturating_mul(n as u128)
        .saturating_mul(u.saturating_pow(exp as u32))
}

/// Weighted k-path: a simple path on `k` nodes of weight at most `W`.
/// When pieces would have fewer than one internal node the exhaustive
/// search answers instead.
pub fn path_alg(
    g: &Digraph,
    w: i64,
    k: usize,
    pp: PathParams,
    opts: KcwpOptions,
    budget: &mut Budget,
) -> Result<Option<KPathWitness>> {
    budget.spend(1)?;
    opts.tradeoffs.validate()?;
    let n = g.n();
    if k == 0 || k > n {
        return Ok(None);
    }
    let inv = pp.inv_eps;
    if inv == 0 || (k - 1) / inv < 2 {
        // δ, γ and 1/ε must still be admissible
        KcwpParams::new(3 * inv.max(1) + 1, inv, pp.delta, pp.gamma)?;
        return Ok(oracle_kpath(g, k, budget)?
            .filter(|(wt, _)| *wt <= w)
            .map(|(weight, path)| KPathWitness { path, weight }));
    }
    let prm = KcwpParams::new(k, inv, pp.delta, pp.gamma)?;
    budget.require(path_alg_estimate(n, inv, 1))?;
    let family = shared_universal(n, prm.k1 + prm.k2, prm.k2, budget)?;
    budget.require(path_alg_estimate(n, inv, family.len() as u128))?;
    let (a, b) = (prm.left_pieces(), prm.right_pieces());
    debug_assert_eq!(a + b + 1, inv);
    for f in &family.functions {
        for u in (0..n).combinations(inv + 1) {
            let uset = ElemSet::from_iter(u.iter().copied());
            for i in 0..n {
                let suffix = ElemSet::from_iter(i..n).minus(uset);
                let (left, right) = (suffix.minus(*f), suffix.inter(*f));
                // every legal, chainable choice of the functions is a path
                // order on U, a middle piece and an arrangement of the rest
                for chain in u.iter().copied().permutations(inv + 1) {
                    let pieces: Vec<(usize, usize)> = chain.windows(2).map(|p| (p[0], p[1])).collect();
                    for mid in 0..pieces.len() {
                        let rest: Vec<(usize, usize)> =
                            pieces.iter().enumerate().filter(|&(j, _)| j != mid).map(|(_, &p)| p).collect();
                        for arr in rest.iter().copied().permutations(a + b) {
                            budget.spend(1)?;
                            let inst = KcwpInstance {
                                graph: g.clone(),
                                w,
                                k,
                                inv_eps: inv,
                                delta: pp.delta,
                                gamma: pp.gamma,
                                left,
                                right,
                                l1: arr[..a].iter().map(|p| p.0).collect(),
                                l2: arr[..a].iter().map(|p| p.1).collect(),
                                r1: arr[a..].iter().map(|p| p.0).collect(),
                                r2: arr[a..].iter().map(|p| p.1).collect(),
                                v_l: pieces[mid].0,
                                v_r: pieces[mid].1,
                            };
                            if inst.validate().is_err() || inst.chain_order().is_none() {
                                continue;
                            }
                            if let Some(sol) = solve_kcwp(&inst, opts, budget)? {
                                let path = assemble_path(&inst, &sol.pieces).expect("chainable input");
                                return Ok(Some(KPathWitness { path, weight: sol.weight }));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Document form of a cut k-path input; rationals are written `"p/q"`.
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct KcwpDoc {
    nodes: usize,
    arcs: Vec<(usize, usize, i64)>,
    #[serde(rename = "W")]
    w: i64,
    k: usize,
    inv_eps: usize,
    delta: String,
    gamma: String,
    #[serde(rename = "L")]
    left: Vec<usize>,
    #[serde(rename = "R")]
    right: Vec<usize>,
    l1: Vec<usize>,
    l2: Vec<usize>,
    r1: Vec<usize>,
    r2: Vec<usize>,
    v_l: usize,
    v_r: usize,
}

pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let r: Ratio<i64> = s.trim().parse().map_err(|_| Error::Malformed(format!("`{s}` is not a rational p/q")))?;
    Ok(r)
}

pub fn kcwp_from_value(v: &serde_json::Value) -> Result<KcwpInstance> {
    let d: KcwpDoc = serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
    if d.nodes > crate::types::MAX_ELEMENTS {
        return Err(Error::UniverseTooLarge(d.nodes));
    }
    let set = |xs: &[usize]| -> Result<ElemSet> {
        match xs.iter().find(|&&x| x >= d.nodes) {
            Some(x) => Err(Error::IndexOutOfRange(format!("node {x} of a {}-node graph", d.nodes))),
            None => Ok(ElemSet::from_iter(xs.iter().copied())),
        }
    };
    Ok(KcwpInstance {
        graph: Digraph::new(d.nodes, &d.arcs)?,
        w: d.w,
        k: d.k,
        inv_eps: d.inv_eps,
        delta: parse_ratio(&d.delta)?,
        gamma: parse_ratio(&d.gamma)?,
        left: set(&d.left)?,
        right: set(&d.right)?,
        l1: d.l1,
        l2: d.l2,
        r1: d.r1,
        r2: d.r2,
        v_l: d.v_l,
        v_r: d.v_r,
    })
}

pub fn kcwp_value(inst: &KcwpInstance) -> serde_json::Value {
    let d = KcwpDoc {
        nodes: inst.graph.n(),
        arcs: inst.graph.arcs(),
        w: inst.w,
        k: inst.k,
        inv_eps: inst.inv_eps,
        delta: inst.delta.to_string(),
        gamma: inst.gamma.to_string(),
        left: inst.left.iter().collect(),
        right: inst.right.iter().collect(),
        l1: inst.l1.clone(),
        l2: inst.l2.clone(),
        r1: inst.r1.clone(),
        r2: inst.r2.clone(),
        v_l: inst.v_l,
        v_r: inst.v_r,
    };
    serde_json::to_value(d).expect("plain data serializes")
}
