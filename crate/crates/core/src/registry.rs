//! Solvers and oracles behind common traits, looked up by name.

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::io::{parse_value, Instance};
use crate::kiob::{solve_kiob, KiobOptions, TreeOptions};
use crate::kpath::{kcwp_best, kcwp_from_value, path_alg, KcwpOptions, KcwpTradeoffs, PathParams};
use crate::oracles::{oracle_kcwp_best, oracle_kiob, oracle_kpath, oracle_p2p, oracle_wsp};
use crate::p2pack::{solve_p2packing, P2Options};
use crate::problems::{verify_branching, verify_disjoint_sets, verify_kcwp_pieces, verify_kpath, verify_packing};
use crate::types::{Digraph, Graph, Objective, WeightedSetFamily};
use crate::wsp::{wsp_alg, CwspOptions};

/// Knobs shared by all solvers; each reads the ones it understands.
/// `k` and `W` override the values in the document.
#[derive(Clone, Debug)]
pub struct SolveParams {
    pub k: Option<usize>,
    pub w: Option<i64>,
    pub inv_eps: Option<usize>,
    pub c: Option<f64>,
    pub delta: Option<Ratio<i64>>,
    pub gamma: Option<Ratio<i64>>,
    pub tradeoffs: KcwpTradeoffs,
    pub reduce: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            k: None,
            w: None,
            inv_eps: None,
            c: None,
            delta: None,
            gamma: None,
            tradeoffs: KcwpTradeoffs::default(),
            reduce: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub accept: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl SolveOutcome {
    fn reject() -> Self {
        SolveOutcome { accept: false, witness: None }
    }
    fn accept(witness: Value) -> Self {
        SolveOutcome { accept: true, witness: Some(witness) }
    }
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;
    /// Decides the document; every returned witness has passed the
    /// problem's structural verifier.
    fn solve(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome>;
}

/// Exhaustive decision procedure for the same problem as the solver of the
/// same name.
pub trait Oracle: Send + Sync {
    fn name(&self) -> &'static str;
    fn decide(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome>;
}

fn need_k(p: &SolveParams, inst: Option<usize>) -> Result<usize> {
    p.k.or(inst).ok_or_else(|| Error::Parameter("k is required (flag or document field)".into()))
}

fn digraph(doc: &Value, p: &SolveParams) -> Result<(Digraph, usize, Option<i64>)> {
    match parse_value(doc, Objective::Min)? {
        Instance::Digraph(d) => Ok((d.graph, need_k(p, d.k)?, p.w.or(d.w))),
        other => Err(Error::Malformed(format!("expected a digraph document, got {}", other.kind()))),
    }
}

fn graph(doc: &Value, p: &SolveParams) -> Result<(Graph, usize)> {
    match parse_value(doc, Objective::Max)? {
        Instance::Graph(g) => Ok((g.graph, need_k(p, g.k)?)),
        other => Err(Error::Malformed(format!("expected a graph document, got {}", other.kind()))),
    }
}

fn family(doc: &Value, p: &SolveParams) -> Result<(WeightedSetFamily, usize, Option<i64>)> {
    match parse_value(doc, Objective::Max)? {
        Instance::SetFamily(s) => Ok((s.family, need_k(p, s.k)?, p.w.or(s.w))),
        other => Err(Error::Malformed(format!("expected a setfamily document, got {}", other.kind()))),
    }
}

fn checked(r: std::result::Result<i64, String>) -> Result<i64> {
    r.map_err(|e| Error::Invariant(format!("witness failed verification: {e}")))
}

fn sets_witness(f: &WeightedSetFamily, chosen: &[usize], weight: i64) -> Value {
    let sets: Vec<Vec<&str>> = chosen
        .iter()
        .map(|&i| f.sets[i].members.iter().map(|e| f.universe.label(e)).collect())
        .collect();
    json!({ "sets": sets, "weight": weight })
}

fn path_params(p: &SolveParams) -> PathParams {
    let d = PathParams::default();
    PathParams {
        inv_eps: p.inv_eps.unwrap_or(d.inv_eps),
        delta: p.delta.unwrap_or(d.delta),
        gamma: p.gamma.unwrap_or(d.gamma),
    }
}

struct KpathSolver;
struct KcwpSolver;
struct KiobSolver;
struct WspSolver;
struct P2pSolver;

impl Solver for KpathSolver {
    fn name(&self) -> &'static str {
        "kpath"
    }
    fn solve(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (g, k, w) = digraph(doc, p)?;
        let w = w.unwrap_or(i64::MAX);
        let opts = KcwpOptions { tradeoffs: p.tradeoffs, reduce: p.reduce };
        Ok(match path_alg(&g, w, k, path_params(p), opts, budget)? {
            Some(sol) => {
                checked(verify_kpath(&g, k, w, &sol.path))?;
                SolveOutcome::accept(json!({ "path": sol.path, "weight": sol.weight }))
            }
            None => SolveOutcome::reject(),
        })
    }
}

impl Solver for KcwpSolver {
    fn name(&self) -> &'static str {
        "kcwp"
    }
    fn solve(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let mut inst = kcwp_from_value(doc)?;
        if let Some(w) = p.w {
            inst.w = w;
        }
        let opts = KcwpOptions { tradeoffs: p.tradeoffs, reduce: p.reduce };
        let (best, stats) = kcwp_best(&inst, opts, budget)?;
        Ok(match best.filter(|s| s.weight <= inst.w) {
            Some(sol) => {
                checked(verify_kcwp_pieces(&inst, &sol.pieces))?;
                SolveOutcome::accept(json!({ "pieces": sol.pieces, "weight": sol.weight, "stats": stats }))
            }
            None => SolveOutcome::reject(),
        })
    }
}

impl Solver for KiobSolver {
    fn name(&self) -> &'static str {
        "kiob"
    }
    fn solve(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (g, k, _) = digraph(doc, p)?;
        let tree = TreeOptions { c: p.c.unwrap_or(TreeOptions::default().c), reduce: p.reduce };
        Ok(match solve_kiob(&g, k, KiobOptions { tree, iot: None }, budget)? {
            Some(wit) => {
                let internal = verify_branching(&g, wit.root, &wit.parent).map_err(Error::Invariant)?;
                if internal < k {
                    return Err(Error::Invariant(format!("branching has {internal} internal nodes, fewer than {k}")));
                }
                SolveOutcome::accept(serde_json::to_value(&wit).expect("plain data serializes"))
            }
            None => SolveOutcome::reject(),
        })
    }
}

impl Solver for WspSolver {
    fn name(&self) -> &'static str {
        "wsp"
    }
    fn solve(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (f, k, w) = family(doc, p)?;
        let w = w.unwrap_or(i64::MIN);
        let opts = CwspOptions { c: p.c.unwrap_or(CwspOptions::default().c), reduce: p.reduce };
        Ok(match wsp_alg(&f, w, k, p.inv_eps.unwrap_or(2), opts, budget)? {
            Some(sol) => {
                let weight = checked(verify_disjoint_sets(&f, &sol.order, k))?;
                if weight < w {
                    return Err(Error::Invariant(format!("packing weight {weight} below {w}")));
                }
                SolveOutcome::accept(sets_witness(&f, &sol.order, weight))
            }
            None => SolveOutcome::reject(),
        })
    }
}

impl Solver for P2pSolver {
    fn name(&self) -> &'static str {
        "p2p"
    }
    fn solve(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (g, k) = graph(doc, p)?;
        let d = P2Options::default();
        let opts = P2Options { c: p.c.unwrap_or(d.c), reduce: p.reduce, inv_eps: p.inv_eps.unwrap_or(d.inv_eps) };
        Ok(match solve_p2packing(&g, k, opts, budget)? {
            Some(paths) => {
                verify_packing(&g, k, &paths).map_err(Error::Invariant)?;
                SolveOutcome::accept(json!({ "paths": paths }))
            }
            None => SolveOutcome::reject(),
        })
    }
}

struct KpathOracle;
struct KcwpOracle;
struct KiobOracle;
struct WspOracle;
struct P2pOracle;

impl Oracle for KpathOracle {
    fn name(&self) -> &'static str {
        "kpath"
    }
    fn decide(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (g, k, w) = digraph(doc, p)?;
        let w = w.unwrap_or(i64::MAX);
        Ok(match oracle_kpath(&g, k, budget)?.filter(|(wt, _)| *wt <= w) {
            Some((weight, path)) => SolveOutcome::accept(json!({ "path": path, "weight": weight })),
            None => SolveOutcome::reject(),
        })
    }
}

impl Oracle for KcwpOracle {
    fn name(&self) -> &'static str {
        "kcwp"
    }
    fn decide(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let mut inst = kcwp_from_value(doc)?;
        if let Some(w) = p.w {
            inst.w = w;
        }
        Ok(match oracle_kcwp_best(&inst, budget)?.filter(|(wt, _)| *wt <= inst.w) {
            Some((weight, pieces)) => SolveOutcome::accept(json!({ "pieces": pieces, "weight": weight })),
            None => SolveOutcome::reject(),
        })
    }
}

impl Oracle for KiobOracle {
    fn name(&self) -> &'static str {
        "kiob"
    }
    fn decide(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (g, k, _) = digraph(doc, p)?;
        let yes = oracle_kiob(&g, k, budget)?;
        Ok(SolveOutcome { accept: yes, witness: None })
    }
}

impl Oracle for WspOracle {
    fn name(&self) -> &'static str {
        "wsp"
    }
    fn decide(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (f, k, w) = family(doc, p)?;
        let w = w.unwrap_or(i64::MIN);
        Ok(match oracle_wsp(&f, k, budget)?.filter(|(wt, _)| *wt >= w) {
            Some((weight, chosen)) => SolveOutcome::accept(sets_witness(&f, &chosen, weight)),
            None => SolveOutcome::reject(),
        })
    }
}

impl Oracle for P2pOracle {
    fn name(&self) -> &'static str {
        "p2p"
    }
    fn decide(&self, doc: &Value, p: &SolveParams, budget: &mut Budget) -> Result<SolveOutcome> {
        let (g, k) = graph(doc, p)?;
        Ok(match oracle_p2p(&g, k, budget)? {
            Some(paths) => SolveOutcome::accept(json!({ "paths": paths })),
            None => SolveOutcome::reject(),
        })
    }
}

static SOLVERS: [&dyn Solver; 5] = [&KpathSolver, &KcwpSolver, &KiobSolver, &WspSolver, &P2pSolver];
static ORACLES: [&dyn Oracle; 5] = [&KpathOracle, &KcwpOracle, &KiobOracle, &WspOracle, &P2pOracle];

pub fn solvers() -> &'static [&'static dyn Solver] {
    &SOLVERS
}

pub fn solver(name: &str) -> Result<&'static dyn Solver> {
    SOLVERS.iter().copied().find(|s| s.name() == name).ok_or_else(|| Error::UnknownStrategy(name.to_string()))
}

pub fn oracles() -> &'static [&'static dyn Oracle] {
    &ORACLES
}

pub fn oracle(name: &str) -> Result<&'static dyn Oracle> {
    ORACLES.iter().copied().find(|s| s.name() == name).ok_or_else(|| Error::UnknownStrategy(name.to_string()))
}
