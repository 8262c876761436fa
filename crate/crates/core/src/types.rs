use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ELEMENTS: usize = 128;

/// Set of element ranks below [`MAX_ELEMENTS`], stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet(pub u128);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn singleton(e: usize) -> Self {
        ElemSet(1u128 << e)
    }

    pub fn from_iter(it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = ElemSet::EMPTY;
        for e in it {
            s.insert(e);
        }
        s
    }

    /// All ranks `0..n`.
    pub fn full(n: usize) -> Self {
        if n >= 128 {
            ElemSet(u128::MAX)
        } else {
            ElemSet((1u128 << n) - 1)
        }
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u128 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1u128 << e);
    }

    pub fn contains(self, e: usize) -> bool {
        e < 128 && self.0 >> e & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: ElemSet) -> ElemSet {
        ElemSet(self.0 | o.0)
    }

    pub fn inter(self, o: ElemSet) -> ElemSet {
        ElemSet(self.0 & o.0)
    }

    pub fn minus(self, o: ElemSet) -> ElemSet {
        ElemSet(self.0 & !o.0)
    }

    pub fn disjoint(self, o: ElemSet) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_subset(self, o: ElemSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 127 - self.0.leading_zeros() as usize)
    }

    /// Elements `≤ bound`.
    pub fn at_most(self, bound: usize) -> ElemSet {
        self.inter(ElemSet::full(bound + 1))
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let e = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(e)
        })
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Exact integer weight; arithmetic fails on overflow instead of wrapping.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub i64);

impl Weight {
    pub fn checked_add(self, o: Weight) -> Result<Weight> {
        self.0.checked_add(o.0).map(Weight).ok_or(Error::WeightOverflow)
    }
}

pub fn add_weights(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::WeightOverflow)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Max,
    Min,
}

impl Objective {
    /// True when `a` is at least as good as `b`.
    pub fn dominates(self, a: i64, b: i64) -> bool {
        match self {
            Objective::Max => a >= b,
            Objective::Min => a <= b,
        }
    }

    pub fn better(self, a: i64, b: i64) -> i64 {
        if self.dominates(a, b) {
            a
        } else {
            b
        }
    }
}

/// Labelled elements with a total order given by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedUniverse {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl OrderedUniverse {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateElement(l.clone()));
            }
        }
        Ok(OrderedUniverse { labels, index })
    }

    /// Universe `0, 1, .., n-1` labelled by decimal strings.
    pub fn numbered(n: usize) -> Self {
        OrderedUniverse::new((0..n).map(|i| i.to_string()).collect()).expect("distinct labels")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, rank: usize) -> &str {
        &self.labels[rank]
    }

    pub fn rank(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Element of old rank `i` receives rank `new_order[i]`.
    pub fn reorder(&self, new_order: &[usize]) -> Result<OrderedUniverse> {
        let n = self.len();
        if new_order.len() != n {
            return Err(Error::Invariant(format!(
                "reordering has {} entries for a universe of {n}",
                new_order.len()
            )));
        }
        let mut labels = vec![None; n];
        for (old, &new) in new_order.iter().enumerate() {
            if new >= n || labels[new].is_some() {
                return Err(Error::Invariant("reordering is not a permutation".into()));
            }
            labels[new] = Some(self.labels[old].clone());
        }
        OrderedUniverse::new(labels.into_iter().map(Option::unwrap).collect())
    }
}

pub fn reorder_universe(u: &OrderedUniverse, new_order: &[usize]) -> Result<OrderedUniverse> {
    u.reorder(new_order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightedSet {
    pub members: ElemSet,
    pub weight: i64,
}

/// Family of equal-size weighted sets over an ordered universe; each member
/// set appears once (duplicates keep the weight preferred by the objective).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSetFamily {
    pub universe: OrderedUniverse,
    pub set_size: usize,
    pub sets: Vec<WeightedSet>,
}

impl WeightedSetFamily {
    pub fn new(
        universe: OrderedUniverse,
        raw: Vec<WeightedSet>,
        objective: Objective,
    ) -> Result<Self> {
        if universe.len() > MAX_ELEMENTS {
            return Err(Error::UniverseTooLarge(universe.len()));
        }
        let set_size = raw.first().map_or(0, |s| s.members.len());
        let mut pos: BTreeMap<ElemSet, usize> = BTreeMap::new();
        let mut sets: Vec<WeightedSet> = Vec::new();
        for s in raw {
            if s.members.len() != set_size {
                return Err(Error::Invariant(format!(
                    "sets must all have {set_size} members, found one with {}",
                    s.members.len()
                )));
            }
            if !s.members.is_subset(ElemSet::full(universe.len())) {
                return Err(Error::IndexOutOfRange("set member outside universe".into()));
            }
            match pos.get(&s.members) {
                Some(&i) => sets[i].weight = objective.better(sets[i].weight, s.weight),
                None => {
                    pos.insert(s.members, sets.len());
                    sets.push(s);
                }
            }
        }
        Ok(WeightedSetFamily { universe, set_size, sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Simple weighted digraph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<(usize, i64)>>,
    inn: Vec<Vec<(usize, i64)>>,
    weights: HashMap<(usize, usize), i64>,
}

impl Digraph {
    /// Parallel arcs collapse to the lightest one; self-loops are rejected.
    pub fn new(n: usize, arcs: &[(usize, usize, i64)]) -> Result<Self> {
        let mut weights: HashMap<(usize, usize), i64> = HashMap::new();
        for &(t, h, w) in arcs {
            if t >= n || h >= n {
                return Err(Error::IndexOutOfRange(format!("arc ({t},{h}) with {n} nodes")));
            }
            if t == h {
                return Err(Error::Invariant(format!("self-loop at node {t}")));
            }
            weights.entry((t, h)).and_modify(|x| *x = (*x).min(w)).or_insert(w);
        }
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (&(t, h), &w) in &weights {
            out[t].push((h, w));
            inn[h].push((t, w));
        }
        for l in out.iter_mut().chain(inn.iter_mut()) {
            l.sort_unstable();
        }
        Ok(Digraph { n, out, inn, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn out(&self, v: usize) -> &[(usize, i64)] {
        &self.out[v]
    }

    pub fn inn(&self, v: usize) -> &[(usize, i64)] {
        &self.inn[v]
    }

    pub fn weight(&self, t: usize, h: usize) -> Option<i64> {
        self.weights.get(&(t, h)).copied()
    }

    pub fn has_arc(&self, t: usize, h: usize) -> bool {
        self.weights.contains_key(&(t, h))
    }

    /// Arcs sorted by `(tail, head)`.
    pub fn arcs(&self) -> Vec<(usize, usize, i64)> {
        let mut a: Vec<_> = self.weights.iter().map(|(&(t, h), &w)| (t, h, w)).collect();
        a.sort_unstable();
        a
    }

    pub fn reachable_from(&self, r: usize) -> ElemSetLarge {
        let mut seen = vec![false; self.n];
        let mut stack = vec![r];
        seen[r] = true;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.out[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        ElemSetLarge(seen)
    }

    /// Undirected simple graph obtained by forgetting arc directions.
    pub fn underlying(&self) -> Graph {
        let edges: Vec<(usize, usize)> = self.weights.keys().copied().collect();
        Graph::new(self.n, &edges).expect("digraph arcs are valid edges")
    }
}

/// Plain boolean membership vector, for node sets of arbitrary size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemSetLarge(pub Vec<bool>);

impl ElemSetLarge {
    pub fn all(&self) -> bool {
        self.0.iter().all(|&b| b)
    }
}

/// Simple undirected graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Duplicate edges collapse; self-loops are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange(format!("edge ({u},{v}) with {n} nodes")));
            }
            if u == v {
                return Err(Error::Invariant(format!("self-loop at node {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Ok(Graph { n, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    e.push((u, v));
                }
            }
        }
        e
    }

    /// Induced subgraph on the nodes flagged in `keep`, with nodes kept at
    /// their original indices (removed nodes become isolated).
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let edges: Vec<_> = self.edges().into_iter().filter(|&(u, v)| keep[u] && keep[v]).collect();
        Graph::new(self.n, &edges).expect("subset of valid edges")
    }
}
