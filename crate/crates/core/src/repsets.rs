//! Separators and (generalized) representative families.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use itertools::Itertools;
use serde::Serialize;

use crate::budget::{binomial, Budget};
use crate::error::{Error, Result};
use crate::types::{ElemSet, Objective, WeightedSet, WeightedSetFamily};
use crate::unisets::shared_universal;

const LINEAR_SCAN_BELOW: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Part {
    pub elements: ElemSet,
    pub k: usize,
    pub p: usize,
    /// Tradeoff parameter; recorded only, the family comes from the
    /// universal-set construction whatever its value.
    pub c: f64,
}

impl Part {
    pub fn new(elements: ElemSet, k: usize, p: usize) -> Self {
        Part { elements, k, p, c: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PartitionSpec {
    pub parts: Vec<Part>,
}

impl PartitionSpec {
    pub fn single(elements: ElemSet, k: usize, p: usize) -> Self {
        PartitionSpec { parts: vec![Part::new(elements, k, p)] }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = ElemSet::EMPTY;
        for part in &self.parts {
            if !seen.disjoint(part.elements) {
                return Err(Error::Invariant("parts overlap".into()));
            }
            seen = seen.union(part.elements);
            if part.p > part.k {
                return Err(Error::Parameter(format!("part has p={} > k={}", part.p, part.k)));
            }
            if !(part.c >= 1.0) {
                return Err(Error::Parameter(format!("tradeoff parameter {} below 1", part.c)));
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> ElemSet {
        self.parts.iter().fold(ElemSet::EMPTY, |a, p| a.union(p.elements))
    }

    fn check_member(&self, s: ElemSet) -> Result<()> {
        if !s.is_subset(self.ground()) {
            return Err(Error::Invariant(format!("set {s:?} has members outside every part")));
        }
        for (i, part) in self.parts.iter().enumerate() {
            let c = s.inter(part.elements).len();
            if c != part.p {
                return Err(Error::Invariant(format!(
                    "set {s:?} has {c} members in part {i}, expected {}",
                    part.p
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SeparatorStats {
    pub zeta: usize,
    pub build_time: Duration,
    pub query_time: Duration,
}

/// `(E', k', p')`-separator: a good family over the part plus membership
/// bitmaps answering containment queries.
#[derive(Debug)]
pub struct Separator {
    pub part: ElemSet,
    pub k: usize,
    pub p: usize,
    pub c: f64,
    pub family: Vec<ElemSet>,
    words: usize,
    bitmaps: HashMap<usize, Vec<u64>>,
    build_time: Duration,
    worst_query: Mutex<Duration>,
}

impl Separator {
    pub fn stats(&self) -> SeparatorStats {
        SeparatorStats {
            zeta: self.family.len(),
            build_time: self.build_time,
            query_time: *self.worst_query.lock().expect("stats lock"),
        }
    }

    /// Indices of the family sets containing `s`, ascending.
    pub fn query(&self, s: ElemSet) -> Result<Vec<usize>> {
        if s.len() != self.p || !s.is_subset(self.part) {
            return Err(Error::Invariant(format!(
                "query set {s:?} must have {} elements of the part",
                self.p
            )));
        }
        let start = Instant::now();
        let out = self.query_unchecked(s);
        let spent = start.elapsed();
        let mut worst = self.worst_query.lock().expect("stats lock");
        if spent > *worst {
            *worst = spent;
        }
        Ok(out)
    }

    fn query_unchecked(&self, s: ElemSet) -> Vec<usize> {
        if self.family.len() < LINEAR_SCAN_BELOW {
            return (0..self.family.len()).filter(|&i| s.is_subset(self.family[i])).collect();
        }
        let mut acc = vec![u64::MAX; self.words];
        for e in s.iter() {
            for (a, b) in acc.iter_mut().zip(&self.bitmaps[&e]) {
                *a &= b;
            }
        }
        let mut out = Vec::new();
        for (w, &bits) in acc.iter().enumerate() {
            let mut bits = bits;
            while bits != 0 {
                let i = w * 64 + bits.trailing_zeros() as usize;
                if i < self.family.len() {
                    out.push(i);
                }
                bits &= bits - 1;
            }
        }
        out
    }
}

type SepCache = Mutex<HashMap<(ElemSet, usize, usize), Arc<Separator>>>;

fn separator_cache() -> &'static SepCache {
    static CACHE: OnceLock<SepCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Builds (or reuses) a separator for `part`; `k` is clamped to the part size.
pub fn build_separator(part: ElemSet, k: usize, p: usize, c: f64, budget: &mut Budget) -> Result<Arc<Separator>> {
    let n = part.len();
    if p > k || p > n {
        return Err(Error::Parameter(format!("separator needs p ≤ k and p ≤ |part|, got p={p} k={k} |part|={n}")));
    }
    let k = k.min(n);
    if let Some(s) = separator_cache().lock().expect("cache lock").get(&(part, k, p)) {
        return Ok(s.clone());
    }
    let start = Instant::now();
    let universal = shared_universal(n, k, p, budget)?;
    let elems: Vec<usize> = part.iter().collect();
    let family: Vec<ElemSet> = universal
        .functions
        .iter()
        .map(|f| ElemSet::from_iter(f.iter().map(|i| elems[i])))
        .collect();
    let words = family.len().div_ceil(64);
    let mut bitmaps: HashMap<usize, Vec<u64>> = elems.iter().map(|&e| (e, vec![0u64; words])).collect();
    for (i, f) in family.iter().enumerate() {
        for e in f.iter() {
            bitmaps.get_mut(&e).expect("element of part")[i / 64] |= 1 << (i % 64);
        }
    }
    let sep = Arc::new(Separator {
        part,
        k,
        p,
        c,
        family,
        words,
        bitmaps,
        build_time: start.elapsed(),
        worst_query: Mutex::new(Duration::ZERO),
    });
    separator_cache().lock().expect("cache lock").insert((part, k, p), sep.clone());
    Ok(sep)
}

pub fn query_separator(sep: &Separator, s: ElemSet) -> Result<Vec<usize>> {
    sep.query(s)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RepStats {
    pub input_size: usize,
    pub output_size: usize,
    pub product_family_size: u128,
}

/// Running summary of representative-family computations on this thread.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RepTrace {
    pub calls: usize,
    pub peak_input: usize,
    pub peak_output: usize,
    pub total_input: usize,
    pub total_output: usize,
}

thread_local! {
    static TRACE: std::cell::RefCell<Option<RepTrace>> = const { std::cell::RefCell::new(None) };
}

/// Starts (or restarts) tracing on the current thread.
pub fn start_trace() {
    TRACE.with(|t| *t.borrow_mut() = Some(RepTrace::default()));
}

/// Stops tracing and returns what was recorded.
pub fn take_trace() -> Option<RepTrace> {
    TRACE.with(|t| t.borrow_mut().take())
}

fn record(stats: &RepStats) {
    TRACE.with(|t| {
        if let Some(tr) = t.borrow_mut().as_mut() {
            tr.calls += 1;
            tr.peak_input = tr.peak_input.max(stats.input_size);
            tr.peak_output = tr.peak_output.max(stats.output_size);
            tr.total_input += stats.input_size;
            tr.total_output += stats.output_size;
        }
    });
}

/// Core of the representative-family computation over `(set, weight)`
/// pairs. Returns the indices of the kept items in processing order.
pub fn represent(
    spec: &PartitionSpec,
    items: &[(ElemSet, i64)],
    objective: Objective,
    budget: &mut Budget,
) -> Result<(Vec<usize>, RepStats)> {
    spec.validate()?;
    for &(s, _) in items {
        spec.check_member(s)?;
    }
    // a separator restricted to one k-set realises every p-subset of it, so
    // no family below this size can lose a set
    let floor = spec
        .parts
        .iter()
        .fold(1u128, |acc, p| acc.saturating_mul(binomial(p.k.min(p.elements.len()), p.p)));
    if items.len() as u128 <= floor {
        let n = items.len();
        let stats = RepStats { input_size: n, output_size: n, product_family_size: floor };
        record(&stats);
        return Ok(((0..n).collect(), stats));
    }
    let mut seps = Vec::new();
    for part in spec.parts.iter().filter(|p| !(p.k == 0 && p.p == 0)) {
        seps.push((part.elements, build_separator(part.elements, part.k, part.p, part.c, budget)?));
    }
    let product = seps
        .iter()
        .fold(1u128, |acc, (_, s)| acc.saturating_mul(s.family.len() as u128));
    let mut stats = RepStats { input_size: items.len(), output_size: items.len(), product_family_size: product };
    if (items.len() as u128) <= product {
        record(&stats);
        return Ok(((0..items.len()).collect(), stats));
    }
    let product = product as usize;
    let mut order: Vec<usize> = (0..items.len()).collect();
    match objective {
        Objective::Max => order.sort_by(|&a, &b| items[b].1.cmp(&items[a].1)),
        Objective::Min => order.sort_by(|&a, &b| items[a].1.cmp(&items[b].1)),
    }
    let strides: Vec<usize> = seps
        .iter()
        .scan(1usize, |acc, (_, s)| {
            let st = *acc;
            *acc *= s.family.len();
            Some(st)
        })
        .collect();
    let mut used = vec![0u64; product.div_ceil(64)];
    let mut kept = Vec::new();
    let mut chis: Vec<Vec<usize>> = Vec::with_capacity(seps.len());
    for idx in order {
        let s = items[idx].0;
        chis.clear();
        for (elements, sep) in &seps {
            chis.push(sep.query_unchecked(s.inter(*elements)));
        }
        let combos: u128 = chis.iter().map(|c| c.len() as u128).product();
        budget.spend(combos + 1)?;
        let mut fresh = false;
        for_each_index(&chis, &strides, |f| {
            if used[f / 64] >> (f % 64) & 1 == 0 {
                used[f / 64] |= 1 << (f % 64);
                fresh = true;
            }
        });
        if fresh {
            kept.push(idx);
        }
    }
    stats.output_size = kept.len();
    record(&stats);
    Ok((kept, stats))
}

fn for_each_index(chis: &[Vec<usize>], strides: &[usize], mut visit: impl FnMut(usize)) {
    if chis.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut pos = vec![0usize; chis.len()];
    loop {
        visit(pos.iter().enumerate().map(|(i, &j)| chis[i][j] * strides[i]).sum());
        let mut i = 0;
        loop {
            if i == chis.len() {
                return;
            }
            pos[i] += 1;
            if pos[i] < chis[i].len() {
                break;
            }
            pos[i] = 0;
            i += 1;
        }
    }
}

/// Representative subfamily of `family` under `spec`.
pub fn gen_rep_alg(
    spec: &PartitionSpec,
    family: &WeightedSetFamily,
    objective: Objective,
    budget: &mut Budget,
) -> Result<(WeightedSetFamily, RepStats)> {
    let items: Vec<(ElemSet, i64)> = family.sets.iter().map(|s| (s.members, s.weight)).collect();
    let (kept, stats) = represent(spec, &items, objective, budget)?;
    let mut kept = kept;
    kept.sort_unstable();
    let sets = kept.into_iter().map(|i| family.sets[i]).collect();
    Ok((
        WeightedSetFamily { universe: family.universe.clone(), set_size: family.set_size, sets },
        stats,
    ))
}

/// A violated representation requirement: set `x` of the original family
/// and a set `y` no kept set of good enough weight avoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepViolation {
    pub x: ElemSet,
    pub y: ElemSet,
}

/// Exhaustive check of the generalized representation property.
pub fn check_representation(
    spec: &PartitionSpec,
    original: &[WeightedSet],
    candidate: &[WeightedSet],
    objective: Objective,
    budget: &mut Budget,
) -> Result<Option<RepViolation>> {
    spec.validate()?;
    let orig: HashMap<ElemSet, i64> = original.iter().map(|s| (s.members, s.weight)).collect();
    for c in candidate {
        if orig.get(&c.members) != Some(&c.weight) {
            return Err(Error::Invariant(format!("candidate set {:?} is not in the original family", c.members)));
        }
    }
    for x in original {
        // per part: every subset of E_i \ X of size ≤ k_i - p_i
        let mut choices: Vec<Vec<ElemSet>> = Vec::new();
        for part in &spec.parts {
            let free: Vec<usize> = part.elements.minus(x.members).iter().collect();
            let cap = part.k.saturating_sub(part.p).min(free.len());
            let mut opts = Vec::new();
            for size in 0..=cap {
                for c in free.iter().copied().combinations(size) {
                    opts.push(ElemSet::from_iter(c));
                }
            }
            choices.push(opts);
        }
        let total: u128 = choices.iter().map(|c| c.len() as u128).product();
        budget.spend(total.saturating_mul(candidate.len() as u128 + 1))?;
        for ys in choices.iter().multi_cartesian_product() {
            let y = ys.iter().fold(ElemSet::EMPTY, |a, b| a.union(**b));
            let ok = candidate
                .iter()
                .any(|c| c.members.disjoint(y) && objective.dominates(c.weight, x.weight));
            if !ok {
                return Ok(Some(RepViolation { x: x.members, y }));
            }
        }
        if spec.parts.is_empty() && !candidate.iter().any(|c| objective.dominates(c.weight, x.weight)) {
            return Ok(Some(RepViolation { x: x.members, y: ElemSet::EMPTY }));
        }
    }
    Ok(None)
}

/// Exhaustive goodness check of a separator family.
pub fn is_good(family: &[ElemSet], part: ElemSet, k: usize, p: usize) -> Option<(ElemSet, ElemSet)> {
    let elems: Vec<usize> = part.iter().collect();
    let k = k.min(elems.len());
    for x in elems.iter().copied().combinations(p) {
        let xs = ElemSet::from_iter(x);
        let rest: Vec<usize> = part.minus(xs).iter().collect();
        for size in 0..=k - p {
            for y in rest.iter().copied().combinations(size) {
                let ys = ElemSet::from_iter(y);
                if !family.iter().any(|f| xs.is_subset(*f) && f.disjoint(ys)) {
                    return Some((xs, ys));
                }
            }
        }
    }
    None
}
