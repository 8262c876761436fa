//! k-Internal Out-Branching through small out-trees plus disjoint arcs:
//! representative families of out-tree node sets, a matching step that
//! completes them, and an exchange loop that turns the result into an
//! out-branching with enough internal nodes.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::matching::max_matching;
use crate::problems::{verify_branching, TpInstance, TpWitness};
use crate::repsets::{represent, Part, PartitionSpec};
use crate::types::{Digraph, ElemSet, Objective, OrderedUniverse, WeightedSet, WeightedSetFamily, MAX_ELEMENTS};

/// A tree node set together with the arcs of one out-tree spanning it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSet {
    pub nodes: ElemSet,
    pub arcs: Vec<(usize, usize)>,
}

/// Node sets of out-trees rooted at `root` with `x` internal nodes and `y`
/// leaves, reduced to a family that `z`-represents all of them.
#[derive(Clone, Debug)]
pub struct TreeFamily {
    pub root: usize,
    pub x: usize,
    pub y: usize,
    pub sets: Vec<TreeSet>,
    /// Largest family held by any intermediate entry.
    pub peak: usize,
}

impl TreeFamily {
    /// The node sets as an unweighted family.
    pub fn to_family(&self, n: usize) -> WeightedSetFamily {
        let raw = self.sets.iter().map(|t| WeightedSet { members: t.nodes, weight: 0 }).collect();
        WeightedSetFamily::new(OrderedUniverse::numbered(n), raw, Objective::Max).expect("distinct node sets of one size")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TreeOptions {
    pub c: f64,
    /// Apply the representative reduction after every entry.
    pub reduce: bool,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { c: 1.497, reduce: true }
    }
}

type Key = (usize, usize, usize);

struct TreeDp<'a> {
    g: &'a Digraph,
    target: usize,
    z: usize,
    opts: TreeOptions,
    full: HashMap<Key, Vec<TreeSet>>,
    one_child: HashMap<Key, Vec<TreeSet>>,
    peak: usize,
}

impl TreeDp<'_> {
    fn reduce(&mut self, x: usize, y: usize, sets: Vec<TreeSet>, budget: &mut Budget) -> Result<Vec<TreeSet>> {
        let mut seen = HashSet::new();
        let mut sets: Vec<TreeSet> = sets.into_iter().filter(|t| seen.insert(t.nodes)).collect();
        self.peak = self.peak.max(sets.len());
        if self.opts.reduce && sets.len() > 1 {
            let size = x + y;
            let slack = self.target - size + self.z;
            let mut part = Part::new(ElemSet::full(self.g.n()), size + slack, size);
            part.c = self.opts.c;
            let spec = PartitionSpec { parts: vec![part] };
            let items: Vec<(ElemSet, i64)> = sets.iter().map(|t| (t.nodes, 0)).collect();
            let (mut kept, _) = represent(&spec, &items, Objective::Max, budget)?;
            kept.sort_unstable();
            let mut slots: Vec<Option<TreeSet>> = sets.drain(..).map(Some).collect();
            sets = kept.into_iter().map(|i| slots[i].take().expect("kept once")).collect();
        }
        Ok(sets)
    }

    fn compute(&mut self, xt: usize, yt: usize, budget: &mut Budget) -> Result<()> {
        let n = self.g.n();
        for v in 0..n {
            self.full.insert((v, 0, 1), vec![TreeSet { nodes: ElemSet::singleton(v), arcs: vec![] }]);
        }
        for size in 2..=xt + yt {
            for x in 1..=xt.min(size - 1) {
                let y = size - x;
                if y > yt {
                    continue;
                }
                for v in 0..n {
                    // root v with a single child u
                    let mut oc = Vec::new();
                    for &(u, _) in self.g.out(v) {
                        if let Some(fam) = self.full.get(&(u, x - 1, y)) {
                            for t in fam {
                                if t.nodes.contains(v) {
                                    continue;
                                }
                                budget.spend(1)?;
                                let mut nodes = t.nodes;
                                nodes.insert(v);
                                let mut arcs = Vec::with_capacity(t.arcs.len() + 1);
                                arcs.push((v, u));
                                arcs.extend_from_slice(&t.arcs);
                                oc.push(TreeSet { nodes, arcs });
                            }
                        }
                    }
                    let oc = self.reduce(x, y, oc, budget)?;
                    // root v with several children: first child's subtree
                    // from the single-child family, the rest from the full one
                    let mut all = oc.clone();
                    for x1 in 1..=x {
                        let x2 = x + 1 - x1;
                        for y1 in 1..y {
                            let y2 = y - y1;
                            let (Some(a_fam), Some(b_fam)) =
                                (self.one_child.get(&(v, x1, y1)), self.full.get(&(v, x2, y2)))
                            else {
                                continue;
                            };
                            for a in a_fam {
                                for b in b_fam {
                                    budget.spend(1)?;
                                    if a.nodes.inter(b.nodes) != ElemSet::singleton(v) {
                                        continue;
                                    }
                                    let mut arcs = a.arcs.clone();
                                    arcs.extend_from_slice(&b.arcs);
                                    all.push(TreeSet { nodes: a.nodes.union(b.nodes), arcs });
                                }
                            }
                        }
                    }
                    let all = self.reduce(x, y, all, budget)?;
                    if !oc.is_empty() {
                        self.one_child.insert((v, x, y), oc);
                    }
                    if !all.is_empty() {
                        self.full.insert((v, x, y), all);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Family of out-tree node sets rooted at `root` with `x` internal nodes and
/// `y` leaves that `z`-represents every such node set.
pub fn tree_families(
    g: &Digraph,
    root: usize,
    x: usize,
    y: usize,
    z: usize,
    opts: TreeOptions,
    budget: &mut Budget,
) -> Result<TreeFamily> {
    let n = g.n();
    if n > MAX_ELEMENTS {
        return Err(Error::UniverseTooLarge(n));
    }
    if root >= n {
        return Err(Error::IndexOutOfRange(format!("root {root}")));
    }
    if !(x >= 1 || (x, y) == (0, 1)) {
        return Err(Error::Parameter(format!("no out-tree has {x} internal nodes and {y} leaves")));
    }
    if x + y + z > n {
        return Err(Error::Parameter(format!("x+y+z = {} exceeds the {n} nodes", x + y + z)));
    }
    let mut dp = TreeDp { g, target: x + y, z, opts, full: HashMap::new(), one_child: HashMap::new(), peak: 0 };
    dp.compute(x, y, budget)?;
    let sets = dp.full.remove(&(root, x, y)).unwrap_or_default();
    Ok(TreeFamily { root, x, y, sets, peak: dp.peak })
}

/// Solves tree & paths: an out-tree from the representing family plus `q`
/// disjoint arcs found by maximum matching on the remaining nodes.
pub fn tp_alg(inst: &TpInstance, opts: TreeOptions, budget: &mut Budget) -> Result<Option<TpWitness>> {
    inst.validate()?;
    let (x, y) = (inst.internal(), inst.leaves());
    if y == 0 || x + y + 2 * inst.q > inst.graph.n() {
        return Ok(None);
    }
    let fam = tree_families(&inst.graph, inst.root, x, y, 2 * inst.q, opts, budget)?;
    let und = inst.graph.underlying();
    for t in &fam.sets {
        budget.spend(1)?;
        let keep: Vec<bool> = (0..inst.graph.n()).map(|v| !t.nodes.contains(v)).collect();
        let m = max_matching(&und.induced(&keep));
        if m.len() >= inst.q {
            let paths = m
                .edges
                .iter()
                .take(inst.q)
                .map(|&(a, b)| if inst.graph.has_arc(a, b) { (a, b) } else { (b, a) })
                .collect();
            return Ok(Some(TpWitness { tree: t.arcs.clone(), paths }));
        }
    }
    Ok(None)
}

/// Extends a tree & paths witness to an out-branching rooted at `root` with
/// at least `k` internal nodes: the tree is grown to span the graph, then
/// each witness arc whose two ends are both leaves is pulled into the
/// branching, re-hanging its head under its tail.
pub fn extract_branching(g: &Digraph, root: usize, k: usize, w: &TpWitness) -> Result<Vec<Option<usize>>> {
    let n = g.n();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut in_tree = vec![false; n];
    in_tree[root] = true;
    for &(p, c) in &w.tree {
        parent[c] = Some(p);
        in_tree[c] = true;
    }
    let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&v| in_tree[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.out(v) {
            if !in_tree[u] {
                in_tree[u] = true;
                parent[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    if in_tree.iter().any(|&t| !t) {
        return Err(Error::Invariant(format!("node {root} does not reach every node")));
    }
    let internal = |parent: &[Option<usize>]| {
        let mut has = vec![false; n];
        parent.iter().flatten().for_each(|&p| has[p] = true);
        has
    };
    loop {
        let has_child = internal(&parent);
        if has_child.iter().filter(|&&h| h).count() >= k {
            break;
        }
        let Some(&(v, u)) = w.paths.iter().find(|&&(v, u)| !has_child[v] && !has_child[u] && parent[u] != Some(v))
        else {
            return Err(Error::Invariant("no exchange left before reaching k internal nodes".into()));
        };
        parent[u] = Some(v);
    }
    verify_branching(g, root, &parent).map_err(Error::Invariant)?;
    Ok(parent)
}

/// Alternative solver for the out-tree subproblem with exactly `k` internal
/// nodes and `l` leaves; when supplied it replaces the tree & paths branch.
pub trait IotSolver: Send + Sync {
    fn name(&self) -> &'static str;
    /// Arcs of a suitable out-tree rooted at `root`, if one exists.
    fn solve(&self, g: &Digraph, root: usize, k: usize, l: usize, budget: &mut Budget) -> Result<Option<Vec<(usize, usize)>>>;
}

#[derive(Clone, Copy, Default)]
pub struct KiobOptions<'a> {
    pub tree: TreeOptions,
    pub iot: Option<&'a dyn IotSolver>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KiobWitness {
    pub root: usize,
    pub leaves: usize,
    pub q: usize,
    pub parent: Vec<Option<usize>>,
    pub internal: usize,
    pub tree_and_paths: TpWitness,
}

/// Decides whether `g` has an out-branching with at least `k` internal
/// nodes, returning one when it does.
pub fn solve_kiob(g: &Digraph, k: usize, opts: KiobOptions, budget: &mut Budget) -> Result<Option<KiobWitness>> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let n = g.n();
    for root in 0..n {
        if !g.reachable_from(root).all() {
            continue;
        }
        if k == 1 {
            // A single arc r→u has one leaf whose father is the root, which the
            // leaf-count bound q ≥ 2ℓ−k does not cover; any arc out of r will do.
            let Some(&(u, _)) = g.out(root).first() else { continue };
            let tp = TpWitness { tree: vec![(root, u)], paths: vec![] };
            let parent = extract_branching(g, root, k, &tp)?;
            let internal = verify_branching(g, root, &parent).map_err(Error::Invariant)?;
            return Ok(Some(KiobWitness { root, leaves: 1, q: 0, parent, internal, tree_and_paths: tp }));
        }
        for l in 1..=k {
            if let Some(iot) = opts.iot {
                if let Some(arcs) = iot.solve(g, root, k, l, budget)? {
                    let tp = TpWitness { tree: arcs, paths: vec![] };
                    let parent = extract_branching(g, root, k, &tp)?;
                    let internal = verify_branching(g, root, &parent).map_err(Error::Invariant)?;
                    return Ok(Some(KiobWitness { root, leaves: l, q: 0, parent, internal, tree_and_paths: tp }));
                }
                continue;
            }
            for q in (2 * l).saturating_sub(k)..=l {
                let inst = TpInstance { graph: g.clone(), root, k, l, q };
                if let Some(tp) = tp_alg(&inst, opts.tree, budget)? {
                    let parent = extract_branching(g, root, k, &tp)?;
                    let internal = verify_branching(g, root, &parent).map_err(Error::Invariant)?;
                    return Ok(Some(KiobWitness { root, leaves: l, q, parent, internal, tree_and_paths: tp }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big() -> Budget {
        Budget::unlimited("test")
    }

    #[test]
    fn star_family_holds_all_nodes() {
        let g = Digraph::new(4, &[(0, 1, 0), (0, 2, 0), (0, 3, 0)]).unwrap();
        let f = tree_families(&g, 0, 1, 3, 0, TreeOptions::default(), &mut big()).unwrap();
        assert_eq!(f.sets.len(), 1);
        assert_eq!(f.sets[0].nodes, ElemSet::full(4));
    }

    #[test]
    fn path_family() {
        let g = Digraph::new(3, &[(0, 1, 0), (1, 2, 0)]).unwrap();
        let f = tree_families(&g, 0, 2, 1, 0, TreeOptions::default(), &mut big()).unwrap();
        assert_eq!(f.sets.iter().map(|t| t.nodes).collect::<Vec<_>>(), vec![ElemSet::full(3)]);
    }

    #[test]
    fn directed_path_of_five() {
        let arcs: Vec<_> = (0..4).map(|i| (i, i + 1, 0)).collect();
        let g = Digraph::new(5, &arcs).unwrap();
        let w = solve_kiob(&g, 4, KiobOptions::default(), &mut big()).unwrap().unwrap();
        assert!(w.internal >= 4);
        assert!(solve_kiob(&g, 5, KiobOptions::default(), &mut big()).unwrap().is_none());
    }

    #[test]
    fn three_cycle_rejects_three() {
        let g = Digraph::new(3, &[(0, 1, 0), (1, 2, 0), (2, 0, 0)]).unwrap();
        assert!(solve_kiob(&g, 3, KiobOptions::default(), &mut big()).unwrap().is_none());
        assert!(solve_kiob(&g, 2, KiobOptions::default(), &mut big()).unwrap().is_some());
    }

    #[test]
    fn tp_without_paths_on_a_path() {
        let g = Digraph::new(3, &[(0, 1, 0), (1, 2, 0)]).unwrap();
        let inst = TpInstance { graph: g, root: 0, k: 2, l: 1, q: 0 };
        assert!(tp_alg(&inst, TreeOptions::default(), &mut big()).unwrap().is_some());
    }

    #[test]
    fn single_arc_leaves_no_room_for_paths() {
        let g = Digraph::new(2, &[(0, 1, 0)]).unwrap();
        let inst = TpInstance { graph: g, root: 0, k: 1, l: 1, q: 1 };
        assert!(tp_alg(&inst, TreeOptions::default(), &mut big()).unwrap().is_none());
    }

    #[test]
    fn spanning_witness_is_kept() {
        let g = Digraph::new(3, &[(0, 1, 0), (1, 2, 0)]).unwrap();
        let w = TpWitness { tree: vec![(0, 1), (1, 2)], paths: vec![] };
        assert_eq!(extract_branching(&g, 0, 2, &w).unwrap(), vec![None, Some(0), Some(1)]);
    }
}
