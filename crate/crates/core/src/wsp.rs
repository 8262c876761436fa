//! Weighted 3-set k-packing: the cut variant's dynamic program and the
//! driver that tries every unbalanced cutting of the universe.

use std::collections::{BTreeMap, HashMap};

use crate::budget::Budget;
use crate::cutting::{cut_count_estimate, for_each_cut};
use crate::error::{Error, Result};
use crate::problems::{deletion_schedule, without_min, CwspInstance};
use crate::repsets::{represent, Part, PartitionSpec};
use crate::types::{add_weights, ElemSet, Objective, WeightedSet, WeightedSetFamily};

#[derive(Clone, Copy, Debug)]
pub struct CwspOptions {
    pub c: f64,
    /// Apply representative reductions after every entry; off gives the
    /// plain dynamic program.
    pub reduce: bool,
}

impl Default for CwspOptions {
    fn default() -> Self {
        CwspOptions { c: 1.591, reduce: true }
    }
}

/// An ordered solution: indices into the family's sets, by increasing
/// smallest element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingWitness {
    pub order: Vec<usize>,
    pub weight: i64,
}

#[derive(Clone, Debug, Default)]
pub struct CwspStats {
    pub entries: usize,
    pub peak_entry: usize,
    pub stored: usize,
}

/// Entry key `(s_1..s_{1/ε}, m)`; the stage and `j` are implied by the layer.
type Key = (Vec<u8>, usize);

#[derive(Clone, Debug)]
struct Item {
    stored: ElemSet,
    weight: i64,
    set: usize,
    /// Predecessor in the previous layer: (key, item index).
    pred: Option<(Key, usize)>,
}

type Layer = BTreeMap<Key, Vec<Item>>;

fn stage_of(j: usize, step: usize, inv_eps: usize) -> usize {
    j.div_ceil(step).min(inv_eps + 1)
}

/// Best-weight ordered solution of the cut problem, ignoring `W`.
pub fn cwsp_best(inst: &CwspInstance, opts: CwspOptions, budget: &mut Budget) -> Result<(Option<PackingWitness>, CwspStats)> {
    inst.validate()?;
    let k = inst.k;
    let mut stats = CwspStats::default();
    if k == 0 {
        return Ok((Some(PackingWitness { order: vec![], weight: 0 }), stats));
    }
    let inv = inst.inv_eps;
    let r = deletion_schedule(k, inv)?;
    let step = k / inv;
    let n = inst.family.universe.len();
    let sets = &inst.family.sets;
    // small[e][l]: non-min members of set e that are at most f(l)
    let small: Vec<Vec<u8>> = sets
        .iter()
        .map(|s| inst.f.iter().map(|&fl| without_min(s.members).at_most(fl).len() as u8).collect())
        .collect();
    let mins: Vec<usize> = sets.iter().map(|s| s.members.min().expect("3-sets are non-empty")).collect();
    let given = |i: usize| if i > 1 { Some(inst.f[i - 2]) } else { None };
    let schedule_ok = |s: &[u8], upto: usize| (1..upto).all(|l| s[l - 1] as i64 >= r[l]);

    let mut layers: Vec<Layer> = Vec::with_capacity(k);
    let mut first: Layer = BTreeMap::new();
    for (e, s) in sets.iter().enumerate() {
        budget.spend(1)?;
        first.entry((small[e].clone(), mins[e])).or_default().push(Item {
            stored: without_min(s.members),
            weight: s.weight,
            set: e,
            pred: None,
        });
    }
    layers.push(finish_layer(first, 1, k, n, opts, budget, &mut stats)?);

    for j in 2..=k {
        let i = stage_of(j, step, inv);
        let f_prev = given(i);
        let mut next: Layer = BTreeMap::new();
        for (key, items) in &layers[j - 2] {
            let (s_prev, m_prev) = key;
            for (e, s) in sets.iter().enumerate() {
                let m = mins[e];
                if m <= *m_prev || f_prev.is_some_and(|fp| m <= fp) {
                    continue;
                }
                let s_new: Vec<u8> = s_prev.iter().zip(&small[e]).map(|(a, b)| a + b).collect();
                if !schedule_ok(&s_new, i) {
                    continue;
                }
                let strip = |x: ElemSet| match f_prev {
                    Some(fp) => x.minus(x.at_most(fp)),
                    None => x,
                };
                let add = strip(without_min(s.members));
                for (idx, a) in items.iter().enumerate() {
                    budget.spend(1)?;
                    if !a.stored.disjoint(s.members) {
                        continue;
                    }
                    next.entry((s_new.clone(), m)).or_default().push(Item {
                        stored: strip(a.stored).union(add),
                        weight: add_weights(a.weight, s.weight)?,
                        set: e,
                        pred: Some((key.clone(), idx)),
                    });
                }
            }
        }
        layers.push(finish_layer(next, j, k, n, opts, budget, &mut stats)?);
    }

    let mut best: Option<(i64, &Key, usize)> = None;
    for (key, items) in &layers[k - 1] {
        if !schedule_ok(&key.0, inv + 1) {
            continue;
        }
        for (idx, it) in items.iter().enumerate() {
            if best.is_none_or(|(w, _, _)| it.weight > w) {
                best = Some((it.weight, key, idx));
            }
        }
    }
    let Some((weight, key, idx)) = best else { return Ok((None, stats)) };
    let mut order = Vec::with_capacity(k);
    let (mut key, mut idx) = (key.clone(), idx);
    for j in (1..=k).rev() {
        let it = &layers[j - 1][&key][idx];
        order.push(it.set);
        if let Some((pk, pi)) = &it.pred {
            key = pk.clone();
            idx = *pi;
        }
    }
    order.reverse();
    Ok((Some(PackingWitness { order, weight }), stats))
}

/// Collapses equal stored sets to their heaviest derivation, then keeps a
/// max `3(k−j)`-representative subfamily of every entry.
fn finish_layer(
    layer: Layer,
    j: usize,
    k: usize,
    n: usize,
    opts: CwspOptions,
    budget: &mut Budget,
    stats: &mut CwspStats,
) -> Result<Layer> {
    let mut out = BTreeMap::new();
    for (key, items) in layer {
        let mut best: HashMap<ElemSet, usize> = HashMap::new();
        let mut kept: Vec<Item> = Vec::new();
        for it in items {
            match best.get(&it.stored) {
                Some(&p) if kept[p].weight >= it.weight => {}
                Some(&p) => kept[p] = it,
                None => {
                    best.insert(it.stored, kept.len());
                    kept.push(it);
                }
            }
        }
        if opts.reduce && kept.len() > 1 {
            let size = kept[0].stored.len();
            let mut part = Part::new(ElemSet::full(n), (size + 3 * (k - j)).min(n), size);
            part.c = opts.c;
            let spec = PartitionSpec { parts: vec![part] };
            let pairs: Vec<(ElemSet, i64)> = kept.iter().map(|it| (it.stored, it.weight)).collect();
            let (mut idx, _) = represent(&spec, &pairs, Objective::Max, budget)?;
            idx.sort_unstable();
            let mut slots: Vec<Option<Item>> = kept.into_iter().map(Some).collect();
            kept = idx.into_iter().map(|i| slots[i].take().expect("kept once")).collect();
        }
        stats.entries += 1;
        stats.peak_entry = stats.peak_entry.max(kept.len());
        stats.stored += kept.len();
        out.insert(key, kept);
    }
    Ok(out)
}

/// Decides the cut problem: a solution of weight at least `W`.
pub fn solve_cwsp(inst: &CwspInstance, opts: CwspOptions, budget: &mut Budget) -> Result<Option<PackingWitness>> {
    let (best, _) = cwsp_best(inst, opts, budget)?;
    Ok(best.filter(|b| b.weight >= inst.w))
}

/// Family with its universe reordered so that original element `order[r]`
/// gets rank `r`.
pub fn reorder_family(family: &WeightedSetFamily, order: &[usize]) -> Result<WeightedSetFamily> {
    let mut rank = vec![usize::MAX; order.len()];
    for (r, &e) in order.iter().enumerate() {
        rank[e] = r;
    }
    let universe = family.universe.reorder(&rank)?;
    let sets = family
        .sets
        .iter()
        .map(|s| WeightedSet { members: ElemSet::from_iter(s.members.iter().map(|e| rank[e])), weight: s.weight })
        .collect();
    Ok(WeightedSetFamily { universe, set_size: family.set_size, sets })
}

/// Weighted 3-set k-packing: tries the cut problem on every unbalanced
/// cutting of the universe into `1/ε` pieces. Returns the chosen set
/// indices of the input family.
pub fn wsp_alg(
    family: &WeightedSetFamily,
    w: i64,
    k: usize,
    inv_eps: usize,
    opts: CwspOptions,
    budget: &mut Budget,
) -> Result<Option<PackingWitness>> {
    if family.set_size != 3 && !family.is_empty() {
        return Err(Error::Invariant("every set must have exactly 3 members".into()));
    }
    if inv_eps == 0 {
        return Err(Error::Parameter("1/eps must be positive".into()));
    }
    if k == 0 {
        return Ok((w <= 0).then(|| PackingWitness { order: vec![], weight: 0 }));
    }
    let n = family.universe.len();
    // floor(eps k) must be positive; fewer stages lose nothing
    let inv = inv_eps.min(k);
    budget.require(cut_count_estimate(n, inv))?;
    if family.len() < k || 3 * k > n {
        return Ok(None);
    }
    let mut found = None;
    for_each_cut(n, inv, budget, |cut, budget| {
        let inst = CwspInstance { family: reorder_family(family, &cut.order)?, w, k, inv_eps: inv, f: cut.f.clone() };
        if let Some(sol) = solve_cwsp(&inst, opts, budget)? {
            found = Some(sol);
            return Ok(true);
        }
        Ok(false)
    })?;
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::OrderedUniverse;

    fn fam(n: usize, sets: &[([usize; 3], i64)]) -> WeightedSetFamily {
        let raw = sets.iter().map(|(m, w)| WeightedSet { members: ElemSet::from_iter(*m), weight: *w }).collect();
        WeightedSetFamily::new(OrderedUniverse::numbered(n), raw, Objective::Max).unwrap()
    }

    #[test]
    fn unique_ordered_pair() {
        let family = fam(6, &[([0, 1, 2], 1), ([3, 4, 5], 1)]);
        let mut b = Budget::unlimited("t");
        let inst = CwspInstance { family: family.clone(), w: 2, k: 2, inv_eps: 1, f: vec![5] };
        let sol = solve_cwsp(&inst, CwspOptions::default(), &mut b).unwrap().unwrap();
        assert_eq!(sol.order, vec![0, 1]);
        let inst = CwspInstance { w: 3, ..inst };
        assert!(solve_cwsp(&inst, CwspOptions::default(), &mut b).unwrap().is_none());
    }

    #[test]
    fn driver_finds_best_pair() {
        let family = fam(7, &[([0, 1, 2], 1), ([3, 4, 5], 4), ([2, 3, 6], 9), ([0, 1, 4], 2)]);
        let mut b = Budget::unlimited("t");
        for inv in 1..=2 {
            let sol = wsp_alg(&family, 11, 2, inv, CwspOptions::default(), &mut b).unwrap().unwrap();
            assert_eq!(sol.weight, 11);
            assert!(wsp_alg(&family, 12, 2, inv, CwspOptions::default(), &mut b).unwrap().is_none());
        }
    }

    #[test]
    fn budget_guard() {
        let family = fam(30, &[([0, 1, 2], 1)]);
        let mut b = Budget::new(10_000, "t");
        let e = wsp_alg(&family, 0, 3, 3, CwspOptions::default(), &mut b);
        assert!(matches!(e, Err(Error::BudgetExceeded { .. })));
    }
}
