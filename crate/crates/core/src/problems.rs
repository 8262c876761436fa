//! Instance types shared by the solvers and the oracles, the integer
//! schedules their conditions refer to, and structural verifiers for every
//! kind of witness. Nothing here depends on a solver.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{add_weights, Digraph, ElemSet, Graph, WeightedSetFamily};

/// `⌈a / b⌉` for `b > 0`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

// ---------------------------------------------------------------------------
// Tree & paths

/// Out-tree rooted at `root` with `k - q` internal nodes and `l - q` leaves,
/// plus `q` node-disjoint arcs avoiding the tree.
#[derive(Clone, Debug)]
pub struct TpInstance {
    pub graph: Digraph,
    pub root: usize,
    pub k: usize,
    pub l: usize,
    pub q: usize,
}

impl TpInstance {
    pub fn validate(&self) -> Result<()> {
        if self.root >= self.graph.n() {
            return Err(Error::IndexOutOfRange(format!("root {}", self.root)));
        }
        if self.l > self.k {
            return Err(Error::Parameter(format!("l={} exceeds k={}", self.l, self.k)));
        }
        if self.q + self.k < 2 * self.l {
            return Err(Error::Parameter(format!("q={} below 2l-k", self.q)));
        }
        if self.q > self.l {
            return Err(Error::Parameter(format!("q={} exceeds l={}", self.q, self.l)));
        }
        if !self.graph.reachable_from(self.root).all() {
            return Err(Error::Invariant(format!("node {} does not reach every node", self.root)));
        }
        Ok(())
    }

    pub fn internal(&self) -> usize {
        self.k - self.q
    }

    pub fn leaves(&self) -> usize {
        self.l - self.q
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TpWitness {
    /// Arcs `(parent, child)` of the out-tree.
    pub tree: Vec<(usize, usize)>,
    /// Node-disjoint arcs `(tail, head)` avoiding the tree.
    pub paths: Vec<(usize, usize)>,
}

/// Checks that `arcs` form an out-tree rooted at `root`; returns its node set
/// and its number of internal nodes.
pub fn out_tree_shape(g: &Digraph, root: usize, arcs: &[(usize, usize)]) -> Option<(Vec<usize>, usize)> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut in_tree = vec![false; n];
    in_tree[root] = true;
    for &(p, c) in arcs {
        if p >= n || c >= n || !g.has_arc(p, c) || c == root || parent[c] != usize::MAX {
            return None;
        }
        parent[c] = p;
        in_tree[c] = true;
    }
    for &(p, _) in arcs {
        if !in_tree[p] {
            return None;
        }
    }
    // every node must climb to the root without revisiting
    for &(_, c) in arcs {
        let mut v = c;
        let mut steps = 0;
        while v != root {
            v = parent[v];
            steps += 1;
            if v == usize::MAX || steps > n {
                return None;
            }
        }
    }
    let nodes: Vec<usize> = (0..n).filter(|&v| in_tree[v]).collect();
    let mut has_child = vec![false; n];
    for &(p, _) in arcs {
        has_child[p] = true;
    }
    let internal = nodes.iter().filter(|&&v| has_child[v]).count();
    Some((nodes, internal))
}

pub fn verify_tp_witness(inst: &TpInstance, w: &TpWitness) -> std::result::Result<(), String> {
    let (nodes, internal) = out_tree_shape(&inst.graph, inst.root, &w.tree).ok_or("tree arcs do not form an out-tree")?;
    let leaves = nodes.len() - internal;
    if internal != inst.internal() || leaves != inst.leaves() {
        return Err(format!("tree has {internal} internal nodes and {leaves} leaves"));
    }
    if w.paths.len() != inst.q {
        return Err(format!("{} paths instead of {}", w.paths.len(), inst.q));
    }
    let mut used = vec![false; inst.graph.n()];
    for &v in &nodes {
        used[v] = true;
    }
    for &(a, b) in &w.paths {
        if !inst.graph.has_arc(a, b) {
            return Err(format!("({a},{b}) is not an arc"));
        }
        if used[a] || used[b] {
            return Err(format!("path ({a},{b}) overlaps"));
        }
        used[a] = true;
        used[b] = true;
    }
    Ok(())
}

/// Out-branching given by `parent[v]` (`None` at the root); returns the
/// number of internal nodes.
pub fn verify_branching(g: &Digraph, root: usize, parent: &[Option<usize>]) -> std::result::Result<usize, String> {
    let n = g.n();
    if parent.len() != n || root >= n || parent[root].is_some() {
        return Err("malformed parent array".into());
    }
    let mut arcs = Vec::new();
    for (v, p) in parent.iter().enumerate() {
        match p {
            Some(p) if v != root => arcs.push((*p, v)),
            None if v == root => {}
            _ => return Err(format!("node {v} has no parent")),
        }
    }
    let (nodes, internal) = out_tree_shape(g, root, &arcs).ok_or("parent arcs do not form an out-tree")?;
    if nodes.len() != n {
        return Err("branching does not span the graph".into());
    }
    Ok(internal)
}

// ---------------------------------------------------------------------------
// Weighted k-path

/// Weight of a simple directed path given as a node sequence.
pub fn path_weight(g: &Digraph, path: &[usize]) -> std::result::Result<i64, String> {
    let mut seen = vec![false; g.n()];
    for &v in path {
        if v >= g.n() || seen[v] {
            return Err(format!("node {v} repeated or out of range"));
        }
        seen[v] = true;
    }
    let mut w = 0i64;
    for p in path.windows(2) {
        let a = g.weight(p[0], p[1]).ok_or_else(|| format!("({},{}) is not an arc", p[0], p[1]))?;
        w = add_weights(w, a).map_err(|e| e.to_string())?;
    }
    Ok(w)
}

pub fn verify_kpath(g: &Digraph, k: usize, w_max: i64, path: &[usize]) -> std::result::Result<i64, String> {
    if path.len() != k {
        return Err(format!("path has {} nodes, expected {k}", path.len()));
    }
    let w = path_weight(g, path)?;
    if w > w_max {
        return Err(format!("path weight {w} exceeds {w_max}"));
    }
    Ok(w)
}

/// Piece parameters derived from `(k, 1/ε, δ, γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KcwpParams {
    pub k: usize,
    pub inv_eps: usize,
    /// `m = (1/ε − 1)/2`.
    pub m: usize,
    /// `m̃ = δ(1/ε − 1)`.
    pub mt: usize,
    /// `⌊ε(k−1)⌋`.
    pub step: usize,
    /// Internal nodes of each side piece.
    pub side_internal: usize,
    /// Internal nodes of the middle piece.
    pub mid_internal: usize,
    /// `⌊(½+δ)γk⌋`.
    pub k1: usize,
    /// `⌊(½−δ)γk⌋`.
    pub k2: usize,
    /// Remaining internal nodes, from neither side.
    pub k3: usize,
}

impl KcwpParams {
    pub fn new(k: usize, inv_eps: usize, delta: Ratio<i64>, gamma: Ratio<i64>) -> Result<Self> {
        let zero = Ratio::from_integer(0);
        let tenth = Ratio::new(1, 10);
        if !(delta > zero && delta < tenth && gamma > zero && gamma < tenth) {
            return Err(Error::Parameter("delta and gamma must lie strictly between 0 and 0.1".into()));
        }
        if inv_eps <= 10 {
            return Err(Error::Parameter(format!("1/eps = {inv_eps} must exceed 10")));
        }
        if (inv_eps - 1) % 2 != 0 {
            return Err(Error::Parameter(format!("m = (1/eps - 1)/2 is not an integer for 1/eps = {inv_eps}")));
        }
        let mt = delta * Ratio::from_integer(inv_eps as i64 - 1);
        if !mt.is_integer() {
            return Err(Error::Parameter(format!("delta*(1/eps - 1) = {mt} is not an integer")));
        }
        let m = (inv_eps - 1) / 2;
        let mt = mt.to_integer() as usize;
        if k == 0 {
            return Err(Error::Parameter("k must be positive".into()));
        }
        let step = (k - 1) / inv_eps;
        if step < 2 {
            return Err(Error::Parameter(format!(
                "pieces need at least one internal node: floor(eps(k-1)) = {step} < 2"
            )));
        }
        let half = Ratio::new(1, 2);
        let kk = Ratio::from_integer(k as i64);
        let k1 = ((half + delta) * gamma * kk).floor().to_integer() as usize;
        let k2 = ((half - delta) * gamma * kk).floor().to_integer() as usize;
        let mid_internal = k - 2 * m * step - 2;
        let side_internal = step - 1;
        let total_internal = k - inv_eps - 1;
        let k3 = total_internal
            .checked_sub(k1 + k2)
            .ok_or_else(|| Error::Parameter("more side nodes than internal nodes".into()))?;
        Ok(KcwpParams { k, inv_eps, m, mt, step, side_internal, mid_internal, k1, k2, k3 })
    }

    pub fn left_pieces(&self) -> usize {
        self.m + self.mt
    }

    pub fn right_pieces(&self) -> usize {
        self.m - self.mt
    }

    /// Whether `count` nodes of L after `i` left pieces meet the running
    /// lower bound `(i / (m+m̃)) (k1 − mid)`.
    pub fn left_ok(&self, i: usize, count: usize) -> bool {
        let a = self.left_pieces() as i64;
        (count as i64) * a >= (i as i64) * (self.k1 as i64 - self.mid_internal as i64)
    }

    /// Whether `count` nodes of R in the middle piece and the first `i`
    /// right pieces meet the running upper bound
    /// `(i / (m−m̃)) (k2 − mid) + mid`.
    pub fn right_ok(&self, i: usize, count: usize) -> bool {
        let b = self.right_pieces() as i64;
        let mid = self.mid_internal as i64;
        (count as i64) * b <= (i as i64) * (self.k2 as i64 - mid) + b * mid
    }
}

/// Input of the cut weighted k-path problem. Pieces `1..=m+m̃` run from
/// `l1[i]` to `l2[i]`, the middle piece from `v_l` to `v_r`, and pieces
/// `1..=m−m̃` of the second half from `r1[i]` to `r2[i]` (all 0-based here).
#[derive(Clone, Debug)]
pub struct KcwpInstance {
    pub graph: Digraph,
    pub w: i64,
    pub k: usize,
    pub inv_eps: usize,
    pub delta: Ratio<i64>,
    pub gamma: Ratio<i64>,
    pub left: ElemSet,
    pub right: ElemSet,
    pub l1: Vec<usize>,
    pub l2: Vec<usize>,
    pub r1: Vec<usize>,
    pub r2: Vec<usize>,
    pub v_l: usize,
    pub v_r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KcwpViolation {
    Shape(String),
    Condition1(Vec<usize>),
    Condition2 { starts_only: Vec<usize>, ends_only: Vec<usize> },
}

impl KcwpInstance {
    pub fn params(&self) -> Result<KcwpParams> {
        KcwpParams::new(self.k, self.inv_eps, self.delta, self.gamma)
    }

    /// Endpoints of all pieces in solution order.
    pub fn pieces(&self) -> Vec<(usize, usize)> {
        let mut p: Vec<(usize, usize)> = self.l1.iter().copied().zip(self.l2.iter().copied()).collect();
        p.push((self.v_l, self.v_r));
        p.extend(self.r1.iter().copied().zip(self.r2.iter().copied()));
        p
    }

    /// Every node that starts or ends a piece.
    pub fn endpoints(&self) -> ElemSet {
        self.pieces().iter().fold(ElemSet::EMPTY, |s, &(a, b)| s.union(ElemSet::from_iter([a, b])))
    }

    /// Nodes of neither L, R nor the endpoints.
    pub fn free(&self) -> ElemSet {
        ElemSet::full(self.graph.n()).minus(self.left).minus(self.right).minus(self.endpoints())
    }

    /// Checks the shape of the input and the two function conditions.
    pub fn validate(&self) -> std::result::Result<(), KcwpViolation> {
        let shape = |m: String| Err(KcwpViolation::Shape(m));
        let prm = match self.params() {
            Ok(p) => p,
            Err(e) => return shape(e.to_string()),
        };
        let n = self.graph.n();
        if n > crate::types::MAX_ELEMENTS {
            return shape(format!("{n} nodes exceed the supported maximum"));
        }
        if self.l1.len() != prm.left_pieces()
            || self.l2.len() != prm.left_pieces()
            || self.r1.len() != prm.right_pieces()
            || self.r2.len() != prm.right_pieces()
        {
            return shape("function lengths do not match m+m~ and m-m~".into());
        }
        let all = ElemSet::full(n);
        if !self.left.is_subset(all) || !self.right.is_subset(all) || !self.left.disjoint(self.right) {
            return shape("L and R must be disjoint node sets".into());
        }
        let side = self.left.union(self.right);
        for f in [&self.l1, &self.l2, &self.r1, &self.r2] {
            let img = ElemSet::from_iter(f.iter().copied());
            if f.iter().any(|&v| v >= n) || img.len() != f.len() {
                return shape("functions must be injective maps into the nodes".into());
            }
            if !img.disjoint(side) {
                return shape("function images must avoid L and R".into());
            }
        }
        if self.v_l >= n || self.v_r >= n || self.v_l == self.v_r || side.contains(self.v_l) || side.contains(self.v_r) {
            return shape("v_l and v_r must be distinct nodes outside L and R".into());
        }
        let img = |f: &[usize]| ElemSet::from_iter(f.iter().copied());
        let (il1, il2, ir1, ir2) = (img(&self.l1), img(&self.l2), img(&self.r1), img(&self.r2));
        let mut bad = il1.inter(ir1).union(il2.inter(ir2));
        if il1.union(ir1).contains(self.v_l) {
            bad.insert(self.v_l);
        }
        if il2.union(ir2).contains(self.v_r) {
            bad.insert(self.v_r);
        }
        if !bad.is_empty() {
            return Err(KcwpViolation::Condition1(bad.iter().collect()));
        }
        let starts = il1.union(ir1).union(ElemSet::singleton(self.v_l));
        let ends = il2.union(ir2).union(ElemSet::singleton(self.v_r));
        let (so, eo) = (starts.minus(ends), ends.minus(starts));
        if so.len() != 1 || eo.len() != 1 {
            return Err(KcwpViolation::Condition2 { starts_only: so.iter().collect(), ends_only: eo.iter().collect() });
        }
        Ok(())
    }

    /// Piece indices in the order they appear along the single path formed
    /// by chaining endpoints, or `None` when the chaining closes a cycle.
    pub fn chain_order(&self) -> Option<Vec<usize>> {
        let pieces = self.pieces();
        let ends = ElemSet::from_iter(pieces.iter().map(|p| p.1));
        let first = pieces.iter().position(|p| !ends.contains(p.0))?;
        let mut order = vec![first];
        let mut used = vec![false; pieces.len()];
        used[first] = true;
        while order.len() < pieces.len() {
            let tail = pieces[*order.last().unwrap()].1;
            let next = pieces.iter().position(|p| p.0 == tail)?;
            if used[next] {
                return None;
            }
            used[next] = true;
            order.push(next);
        }
        Some(order)
    }
}

/// A candidate solution: one node sequence per piece, endpoints included,
/// in piece order (left pieces, middle, right pieces).
pub type KcwpPieces = Vec<Vec<usize>>;

/// Checks all solution conditions and the weight bound; returns the total
/// weight.
pub fn verify_kcwp_pieces(inst: &KcwpInstance, pieces: &KcwpPieces) -> std::result::Result<i64, String> {
    let prm = inst.params().map_err(|e| e.to_string())?;
    let ends = inst.pieces();
    if pieces.len() != ends.len() {
        return Err(format!("{} pieces instead of {}", pieces.len(), ends.len()));
    }
    let endpoints = inst.endpoints();
    let a = prm.left_pieces();
    let mut used = ElemSet::EMPTY;
    let (mut cl, mut cr) = (0usize, 0usize);
    let mut total = 0i64;
    for (idx, (piece, &(s, t))) in pieces.iter().zip(&ends).enumerate() {
        if piece.first() != Some(&s) || piece.last() != Some(&t) || piece.len() < 2 {
            return Err(format!("piece {idx} does not run from {s} to {t}"));
        }
        let inner = &piece[1..piece.len() - 1];
        let want = if idx == a { prm.mid_internal } else { prm.side_internal };
        if inner.len() != want {
            return Err(format!("piece {idx} has {} internal nodes, expected {want}", inner.len()));
        }
        for &v in inner {
            if v >= inst.graph.n() || endpoints.contains(v) || used.contains(v) {
                return Err(format!("internal node {v} of piece {idx} is an endpoint or reused"));
            }
            if idx < a && inst.right.contains(v) {
                return Err(format!("left piece {idx} uses node {v} of R"));
            }
            if idx > a && inst.left.contains(v) {
                return Err(format!("right piece {idx} uses node {v} of L"));
            }
            used.insert(v);
            cl += inst.left.contains(v) as usize;
            cr += inst.right.contains(v) as usize;
        }
        total = add_weights(total, path_weight(&inst.graph, piece)?).map_err(|e| e.to_string())?;
        if idx < a && !prm.left_ok(idx + 1, cl) {
            return Err(format!("only {cl} nodes of L after left piece {}", idx + 1));
        }
        if idx >= a && !prm.right_ok(idx - a, cr) {
            return Err(format!("{cr} nodes of R after right piece {}", idx - a));
        }
    }
    if cl != prm.k1 || cr != prm.k2 {
        return Err(format!("{cl} nodes of L and {cr} of R, expected {} and {}", prm.k1, prm.k2));
    }
    if total > inst.w {
        return Err(format!("weight {total} exceeds {}", inst.w));
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Weighted 3-set packing

/// The deletion schedule `R(0..=1/ε)` of the cut packing problem.
pub fn deletion_schedule(k: usize, inv_eps: usize) -> Result<Vec<i64>> {
    if inv_eps == 0 {
        return Err(Error::Parameter("1/eps must be positive".into()));
    }
    let step = (k / inv_eps) as i64;
    if step == 0 {
        return Err(Error::Parameter(format!("floor(eps k) = 0 for k={k}, 1/eps={inv_eps}")));
    }
    let k = k as i64;
    let mut r = vec![0i64; inv_eps + 1];
    for j in 2..=inv_eps {
        let j1 = j as i64 - 1;
        let den = ceil_div(3 * (k - j1 * step), step);
        r[j] = r[j - 1] + ceil_div(2 * j1 * step - r[j - 1], den);
    }
    Ok(r)
}

/// The schedule of the cut variant used for path packing, which starts
/// with `3q − p` given elements: `R(0) = 0` and every stage contributes.
pub fn pro2_schedule(need: usize, given: usize, inv_eps: usize) -> Result<Vec<i64>> {
    if inv_eps == 0 {
        return Err(Error::Parameter("1/eps must be positive".into()));
    }
    let step = (need / inv_eps) as i64;
    if step == 0 {
        return Err(Error::Parameter(format!("floor(eps (k-q)) = 0 for k-q={need}, 1/eps={inv_eps}")));
    }
    let need = need as i64;
    let mut r = vec![0i64; inv_eps + 1];
    for j in 1..=inv_eps {
        let j1 = j as i64 - 1;
        let den = ceil_div(3 * (need - j1 * step), step);
        r[j] = r[j - 1] + ceil_div(given as i64 + 2 * j1 * step - r[j - 1], den);
    }
    Ok(r)
}

/// Input of the cut packing problem. Elements are the indices of the
/// family's universe and their order is the index order; `f[i-1]` is the
/// element given at the end of stage `i`.
#[derive(Clone, Debug)]
pub struct CwspInstance {
    pub family: WeightedSetFamily,
    pub w: i64,
    pub k: usize,
    pub inv_eps: usize,
    pub f: Vec<usize>,
}

impl CwspInstance {
    pub fn validate(&self) -> Result<()> {
        if self.family.set_size != 3 && !self.family.is_empty() {
            return Err(Error::Invariant("every set must have exactly 3 members".into()));
        }
        if self.f.len() != self.inv_eps {
            return Err(Error::Parameter(format!("f has {} values, expected {}", self.f.len(), self.inv_eps)));
        }
        if self.f.iter().any(|&x| x >= self.family.universe.len()) {
            return Err(Error::IndexOutOfRange("f value outside the universe".into()));
        }
        if self.f.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invariant("f must be non-decreasing".into()));
        }
        Ok(())
    }
}

/// Re-checks an ordered solution (indices into `family.sets`) against all
/// three conditions and the weight threshold; returns its weight.
pub fn verify_cwsp_solution(inst: &CwspInstance, order: &[usize]) -> std::result::Result<i64, String> {
    let weight = cwsp_conditions(inst, order)?;
    if weight < inst.w {
        return Err(format!("weight {weight} below {}", inst.w));
    }
    Ok(weight)
}

/// The three solution conditions without the weight threshold.
pub fn cwsp_conditions(inst: &CwspInstance, order: &[usize]) -> std::result::Result<i64, String> {
    inst.validate().map_err(|e| e.to_string())?;
    let sets: Vec<ElemSet> = order
        .iter()
        .map(|&i| inst.family.sets.get(i).map(|s| s.members))
        .collect::<Option<_>>()
        .ok_or("set index out of range")?;
    let weight = verify_disjoint_sets(&inst.family, order, inst.k)?;
    for p in sets.windows(2) {
        if p[0].min() >= p[1].min() {
            return Err("sets are not ordered by their smallest elements".into());
        }
    }
    let r = deletion_schedule(inst.k, inst.inv_eps).map_err(|e| e.to_string())?;
    let step = inst.k / inst.inv_eps;
    for i in 1..=inst.inv_eps {
        let fi = inst.f[i - 1];
        let prefix = &sets[..(i * step).min(sets.len())];
        let small: usize = prefix.iter().map(|s| without_min(*s).at_most(fi).len()).sum();
        if (small as i64) < r[i] {
            return Err(format!("stage {i}: {small} small elements, need {}", r[i]));
        }
        if sets[(i * step).min(sets.len())..].iter().any(|&s| s.min().is_some_and(|m| m <= fi)) {
            return Err(format!("a set after stage {i} has an element not above f({i})"));
        }
    }
    Ok(weight)
}

pub fn without_min(s: ElemSet) -> ElemSet {
    match s.min() {
        Some(m) => s.minus(ElemSet::singleton(m)),
        None => s,
    }
}

/// `k` pairwise disjoint distinct sets of the family; returns their weight.
pub fn verify_disjoint_sets(family: &WeightedSetFamily, chosen: &[usize], k: usize) -> std::result::Result<i64, String> {
    if chosen.len() != k {
        return Err(format!("{} sets instead of {k}", chosen.len()));
    }
    let mut used = ElemSet::EMPTY;
    let mut w = 0i64;
    for &i in chosen {
        let s = family.sets.get(i).ok_or("set index out of range")?;
        if !used.disjoint(s.members) {
            return Err(format!("set {i} overlaps an earlier one"));
        }
        used = used.union(s.members);
        w = add_weights(w, s.weight).map_err(|e| e.to_string())?;
    }
    Ok(w)
}

// ---------------------------------------------------------------------------
// Path packing

/// A path on three nodes `(a, b, c)` with centre `b`.
pub type P2 = [usize; 3];

pub fn is_p2(g: &Graph, p: &P2) -> bool {
    let [a, b, c] = *p;
    a != b && b != c && a != c && a.max(b).max(c) < g.n() && g.has_edge(a, b) && g.has_edge(b, c)
}

pub fn verify_packing(g: &Graph, k: usize, paths: &[P2]) -> std::result::Result<(), String> {
    if paths.len() != k {
        return Err(format!("{} paths instead of {k}", paths.len()));
    }
    let mut used = vec![false; g.n()];
    for p in paths {
        if !is_p2(g, p) {
            return Err(format!("{p:?} is not a path on three nodes"));
        }
        for &v in p {
            if used[v] {
                return Err(format!("node {v} used twice"));
            }
            used[v] = true;
        }
    }
    Ok(())
}

/// Orders a connected 3-node set as a path, if possible.
pub fn as_p2(g: &Graph, s: ElemSet) -> Option<P2> {
    let v: Vec<usize> = s.iter().collect();
    if v.len() != 3 {
        return None;
    }
    for c in 0..3 {
        let (a, b) = ((c + 1) % 3, (c + 2) % 3);
        let p = [v[a], v[c], v[b]];
        if is_p2(g, &p) {
            return Some(p);
        }
    }
    None
}

/// Packing problem on a previous packing's nodes: find `F` in `family` and
/// `k − q` disjoint sets of `sets` avoiding it. Elements are `0..n` in index
/// order.
#[derive(Clone, Debug)]
pub struct Pro2Instance {
    pub n: usize,
    pub sets: Vec<ElemSet>,
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub family: Vec<ElemSet>,
}

impl Pro2Instance {
    pub fn need(&self) -> usize {
        self.k.saturating_sub(self.q)
    }

    pub fn given(&self) -> usize {
        3 * self.q - self.p
    }

    pub fn validate(&self) -> Result<()> {
        if self.q > self.k || 3 * self.q < self.p || self.q > self.p {
            return Err(Error::Parameter(format!("p={}, q={} out of range for k={}", self.p, self.q, self.k)));
        }
        let all = ElemSet::full(self.n);
        if self.sets.iter().any(|s| s.len() != 3 || !s.is_subset(all)) {
            return Err(Error::Invariant("sets must be 3-subsets of the universe".into()));
        }
        if self.family.iter().any(|f| f.len() != self.given() || !f.is_subset(all)) {
            return Err(Error::Invariant(format!("candidate sets must have {} members", self.given())));
        }
        Ok(())
    }
}

/// Re-checks an ordered cut solution `(F, S_1..S_{k−q})` of the path
/// packing cut problem under order function `f`.
pub fn verify_cpro2_solution(
    inst: &Pro2Instance,
    inv_eps: usize,
    f: &[usize],
    chosen_f: ElemSet,
    order: &[ElemSet],
) -> std::result::Result<(), String> {
    if !inst.family.contains(&chosen_f) {
        return Err("F is not a candidate".into());
    }
    if order.len() != inst.need() {
        return Err(format!("{} sets instead of {}", order.len(), inst.need()));
    }
    let mut used = chosen_f;
    for s in order {
        if !inst.sets.contains(s) || !used.disjoint(*s) {
            return Err(format!("{s:?} is not an available disjoint set"));
        }
        used = used.union(*s);
    }
    for p in order.windows(2) {
        if p[0].min() >= p[1].min() {
            return Err("sets are not ordered by their smallest elements".into());
        }
    }
    if inst.need() == 0 {
        return Ok(());
    }
    let r = pro2_schedule(inst.need(), inst.given(), inv_eps).map_err(|e| e.to_string())?;
    let step = inst.need() / inv_eps;
    for i in 1..=inv_eps {
        let fi = f[i - 1];
        let cut = (i * step).min(order.len());
        let small = chosen_f.at_most(fi).len() + order[..cut].iter().map(|s| without_min(*s).at_most(fi).len()).sum::<usize>();
        if (small as i64) < r[i] {
            return Err(format!("stage {i}: {small} small elements, need {}", r[i]));
        }
        if order[cut..].iter().any(|&s| s.min().is_some_and(|m| m <= fi)) {
            return Err(format!("a set after stage {i} has an element not above f({i})"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deletion_schedule_values() {
        assert_eq!(deletion_schedule(7, 1).unwrap(), vec![0, 0]);
        assert_eq!(deletion_schedule(10, 2).unwrap(), vec![0, 0, 4]);
        assert_eq!(deletion_schedule(12, 3).unwrap(), vec![0, 0, 2, 7]);
        assert!(deletion_schedule(1, 2).is_err());
    }

    #[test]
    fn pro2_schedule_first_stage() {
        assert_eq!(pro2_schedule(4, 2, 2).unwrap()[1], 1);
    }

    #[test]
    fn schedule_is_monotone_and_bounded() {
        for k in 1..40 {
            for inv in 1..=6 {
                let Ok(r) = deletion_schedule(k, inv) else { continue };
                let step = (k / inv) as i64;
                for j in 1..r.len() {
                    assert!(r[j] >= r[j - 1]);
                    assert!(r[j] <= 2 * (j as i64 - 1) * step);
                }
            }
        }
    }

    #[test]
    fn smallest_kcwp_parameters() {
        let p = KcwpParams::new(27, 13, Ratio::new(1, 12), Ratio::new(9, 100)).unwrap();
        assert_eq!((p.m, p.mt, p.step, p.side_internal, p.mid_internal), (6, 1, 2, 1, 1));
        assert_eq!(p.k1 + p.k2 + p.k3, 27 - 14);
        assert!(KcwpParams::new(26, 13, Ratio::new(1, 12), Ratio::new(9, 100)).is_err());
        assert!(KcwpParams::new(27, 11, Ratio::new(1, 12), Ratio::new(9, 100)).is_err());
    }
}
