//! `(n,k,p)`-universal sets: families of functions `{1..n} → {0,1}` such that
//! every assignment with exactly `p` ones on any `k` positions is matched by
//! some member.

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::{binomial, Budget};
use crate::error::{Error, Result};
use crate::types::ElemSet;

/// Functions are stored as bitmasks: bit `i` holds `f(i+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalSet {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub functions: Vec<ElemSet>,
}

impl UniversalSet {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// One line of `0`/`1` characters per function, `f(1)` first.
    pub fn to_lines(&self) -> Vec<String> {
        self.functions.iter().map(|f| bit_string(*f, self.n)).collect()
    }

    pub fn from_lines(n: usize, k: usize, p: usize, text: &str) -> Result<Self> {
        let mut functions = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if line.len() != n {
                return Err(Error::Malformed(format!("expected {n} bits, got `{line}`")));
            }
            let mut f = ElemSet::EMPTY;
            for (i, ch) in line.chars().enumerate() {
                match ch {
                    '1' => f.insert(i),
                    '0' => {}
                    _ => return Err(Error::Malformed(format!("bad character `{ch}`"))),
                }
            }
            functions.push(f);
        }
        check_params(n, k, p)?;
        Ok(UniversalSet { n, k, p, functions })
    }
}

pub fn bit_string(f: ElemSet, n: usize) -> String {
    (0..n).map(|i| if f.contains(i) { '1' } else { '0' }).collect()
}

/// A violated constraint: positions `I` (0-based, ascending) and the subset
/// of them that should be set to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub positions: Vec<usize>,
    pub ones: Vec<usize>,
}

fn check_params(n: usize, k: usize, p: usize) -> Result<()> {
    if p > k || k > n {
        return Err(Error::Parameter(format!("need p ≤ k ≤ n, got n={n} k={k} p={p}")));
    }
    if n > crate::types::MAX_ELEMENTS {
        return Err(Error::UniverseTooLarge(n));
    }
    Ok(())
}

pub fn constraint_count(n: usize, k: usize, p: usize) -> u128 {
    binomial(n, k).saturating_mul(binomial(k, p))
}

/// Checks the covering property; reports the violation with the
/// lexicographically smallest `I` (then smallest assignment) if any.
pub fn verify_universal(u: &UniversalSet, budget: &mut Budget) -> Result<Option<Violation>> {
    check_params(u.n, u.k, u.p)?;
    if u.functions.iter().any(|f| !f.is_subset(ElemSet::full(u.n))) {
        return Err(Error::Invariant("function wider than n bits".into()));
    }
    let per_i = (u.functions.len() + binomial(u.k, u.p) as usize) as u128;
    budget.require(binomial(u.n, u.k).saturating_mul(per_i))?;
    let mut seen = HashSet::new();
    for positions in (0..u.n).combinations(u.k) {
        budget.spend(per_i)?;
        let mask = ElemSet::from_iter(positions.iter().copied());
        seen.clear();
        seen.extend(u.functions.iter().map(|f| f.inter(mask)));
        for ones in positions.iter().copied().combinations(u.p) {
            if !seen.contains(&ElemSet::from_iter(ones.iter().copied())) {
                return Ok(Some(Violation { positions, ones }));
            }
        }
    }
    Ok(None)
}

struct Binomials(Vec<Vec<u64>>);

impl Binomials {
    fn new(n: usize) -> Self {
        let mut t = vec![vec![0u64; n + 2]; n + 2];
        for a in 0..=n + 1 {
            t[a][0] = 1;
            for b in 1..=a {
                t[a][b] = t[a - 1][b - 1].saturating_add(t[a - 1][b]);
            }
        }
        Binomials(t)
    }

    fn get(&self, a: usize, b: usize) -> u64 {
        if b > a {
            0
        } else {
            self.0[a][b]
        }
    }

    /// Colex rank of the set bits of `mask`.
    fn rank(&self, mask: u128) -> u64 {
        let mut r = 0;
        for (j, pos) in ElemSet(mask).iter().enumerate() {
            r += self.get(pos, j + 1);
        }
        r
    }
}

struct Greedy<'a> {
    k: usize,
    p: usize,
    per_i: u64,
    binom: &'a Binomials,
    covered: Vec<bool>,
}

impl Greedy<'_> {
    fn constraint_id(&self, ones: u128, zeros: u128) -> usize {
        let i = ones | zeros;
        // O expressed as positions within I
        let mut local = 0u128;
        for (j, pos) in ElemSet(i).iter().enumerate() {
            if ones >> pos & 1 == 1 {
                local |= 1 << j;
            }
        }
        (self.binom.rank(i) * self.per_i + self.binom.rank(local)) as usize
    }

    fn for_each_covered(&self, f: ElemSet, n: usize, mut visit: impl FnMut(usize)) {
        let ones: Vec<usize> = f.iter().collect();
        let zeros: Vec<usize> = ElemSet::full(n).minus(f).iter().collect();
        for a in ones.iter().combinations(self.p) {
            let am: u128 = a.iter().fold(0, |m, &&x| m | 1 << x);
            for b in zeros.iter().combinations(self.k - self.p) {
                let bm: u128 = b.iter().fold(0, |m, &&x| m | 1 << x);
                visit(self.constraint_id(am, bm));
            }
        }
    }

    fn gain(&self, f: ElemSet, n: usize) -> u64 {
        let mut g = 0;
        self.for_each_covered(f, n, |id| {
            if !self.covered[id] {
                g += 1;
            }
        });
        g
    }
}

/// Estimated number of constraint visits for one greedy sweep.
pub fn greedy_cost(n: usize, k: usize, p: usize) -> u128 {
    let pool = if n >= 100 { u128::MAX } else { 1u128 << (n - k) };
    constraint_count(n, k, p).saturating_mul(pool)
}

/// Reverses the low `n` bits so that `f(1)` is the most significant one.
fn lex_key(f: ElemSet, n: usize) -> u128 {
    if n == 0 {
        0
    } else {
        f.0.reverse_bits() >> (128 - n)
    }
}

/// Greedy set cover over the explicit constraint space, all `2^n` functions
/// as candidates; ties go to the lexicographically smallest bit-vector.
pub fn build_greedy(n: usize, k: usize, p: usize, budget: &mut Budget) -> Result<UniversalSet> {
    check_params(n, k, p)?;
    let total = constraint_count(n, k, p);
    budget.require(greedy_cost(n, k, p))?;
    if n > 30 {
        return Err(Error::BudgetExceeded { what: "greedy universal set".into(), needed: u128::MAX, cap: budget.cap() });
    }
    let binom = Binomials::new(n);
    let mut g = Greedy { k, p, per_i: binomial(k, p) as u64, binom: &binom, covered: vec![false; total as usize] };
    let mut heap = BinaryHeap::new();
    for bits in 0..(1u128 << n) {
        let f = ElemSet(bits);
        let c = binomial(f.len(), p) * binomial(n - f.len(), k - p);
        if c > 0 {
            heap.push((c as u64, Reverse(lex_key(f, n)), bits));
        }
    }
    let mut remaining = total as u64;
    let mut functions = Vec::new();
    while remaining > 0 {
        let (_, key, bits) = heap.pop().expect("uncovered constraints imply a useful candidate");
        let f = ElemSet(bits);
        let gain = g.gain(f, n);
        budget.spend(binomial(f.len(), p) * binomial(n - f.len(), k - p))?;
        if gain == 0 {
            continue;
        }
        if let Some(&(top, top_key, _)) = heap.peek() {
            if (gain, key) < (top, top_key) {
                heap.push((gain, key, bits));
                continue;
            }
        }
        let mut newly = Vec::new();
        g.for_each_covered(f, n, |id| newly.push(id));
        for id in newly {
            if !g.covered[id] {
                g.covered[id] = true;
                remaining -= 1;
            }
        }
        functions.push(f);
    }
    Ok(UniversalSet { n, k, p, functions })
}

/// Samples functions with bias `p/k` per bit, in rounds of
/// `⌈2·C(k,p)·ln(C(n,k)·C(k,p))⌉`, until a full verification passes.
pub fn build_randomized(n: usize, k: usize, p: usize, seed: u64, budget: &mut Budget) -> Result<UniversalSet> {
    check_params(n, k, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = constraint_count(n, k, p) as f64;
    let round = ((2.0 * binomial(k, p) as f64 * total.ln()).ceil() as usize).max(1);
    let bias = if k == 0 { 0.0 } else { p as f64 / k as f64 };
    let mut u = UniversalSet { n, k, p, functions: Vec::new() };
    loop {
        for _ in 0..round {
            let f = ElemSet::from_iter((0..n).filter(|_| rng.gen_bool(bias)));
            u.functions.push(f);
        }
        if verify_universal(&u, budget)?.is_none() {
            return Ok(u);
        }
    }
}

/// Construction strategy, selected by name.
pub trait UniversalSetBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, n: usize, k: usize, p: usize, budget: &mut Budget) -> Result<UniversalSet>;
}

pub struct GreedyBuilder;

pub struct RandomizedBuilder {
    pub seed: u64,
}

impl UniversalSetBuilder for GreedyBuilder {
    fn name(&self) -> &'static str {
        "greedy"
    }
    fn build(&self, n: usize, k: usize, p: usize, budget: &mut Budget) -> Result<UniversalSet> {
        build_greedy(n, k, p, budget)
    }
}

impl UniversalSetBuilder for RandomizedBuilder {
    fn name(&self) -> &'static str {
        "rand"
    }
    fn build(&self, n: usize, k: usize, p: usize, budget: &mut Budget) -> Result<UniversalSet> {
        build_randomized(n, k, p, self.seed, budget)
    }
}

/// Looks up a builder; `rand` requires a seed.
pub fn builder(mode: &str, seed: Option<u64>) -> Result<Box<dyn UniversalSetBuilder>> {
    match (mode, seed) {
        ("greedy", _) => Ok(Box::new(GreedyBuilder)),
        ("rand", Some(seed)) => Ok(Box::new(RandomizedBuilder { seed })),
        ("rand", None) => Err(Error::Parameter("randomized mode requires --seed".into())),
        (other, _) => Err(Error::UnknownStrategy(other.to_string())),
    }
}

pub fn build_universal(n: usize, k: usize, p: usize, mode: &dyn UniversalSetBuilder, budget: &mut Budget) -> Result<UniversalSet> {
    mode.build(n, k, p, budget)
}

/// Greedy sweeps above this many constraint visits fall back to sampling.
const GREEDY_LIMIT: u128 = 40_000_000;

type Cache = Mutex<HashMap<(usize, usize, usize), Arc<UniversalSet>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide memoized construction used by the separators: greedy when
/// affordable, otherwise sampling with a seed derived from the parameters.
pub fn shared_universal(n: usize, k: usize, p: usize, budget: &mut Budget) -> Result<Arc<UniversalSet>> {
    if let Some(u) = cache().lock().expect("cache lock").get(&(n, k, p)) {
        return Ok(u.clone());
    }
    let u = if p == 0 || p == k {
        // one constant-pattern function covers everything
        let f = if p == 0 { ElemSet::EMPTY } else { ElemSet::full(n) };
        UniversalSet { n, k, p, functions: vec![f] }
    } else if greedy_cost(n, k, p) <= GREEDY_LIMIT {
        build_greedy(n, k, p, &mut Budget::unlimited("greedy universal set"))?
    } else {
        let seed = (n as u64) << 32 | (k as u64) << 16 | p as u64;
        build_randomized(n, k, p, seed, budget)?
    };
    let u = Arc::new(u);
    cache().lock().expect("cache lock").insert((n, k, p), u.clone());
    Ok(u)
}
