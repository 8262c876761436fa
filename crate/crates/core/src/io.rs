//! Canonical JSON instance documents.

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::types::{Digraph, ElemSet, Graph, Objective, OrderedUniverse, WeightedSet, WeightedSetFamily};

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    SetFamily(SetFamilyInstance),
    Digraph(DigraphInstance),
    Graph(GraphInstance),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetFamilyInstance {
    pub family: WeightedSetFamily,
    pub k: Option<usize>,
    pub w: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DigraphInstance {
    pub graph: Digraph,
    pub k: Option<usize>,
    pub w: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphInstance {
    pub graph: Graph,
    pub k: Option<usize>,
    pub w: Option<i64>,
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::SetFamily(_) => "setfamily",
            Instance::Digraph(_) => "digraph",
            Instance::Graph(_) => "graph",
        }
    }

    pub fn k(&self) -> Option<usize> {
        match self {
            Instance::SetFamily(i) => i.k,
            Instance::Digraph(i) => i.k,
            Instance::Graph(i) => i.k,
        }
    }

    pub fn w(&self) -> Option<i64> {
        match self {
            Instance::SetFamily(i) => i.w,
            Instance::Digraph(i) => i.w,
            Instance::Graph(i) => i.w,
        }
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn int(v: &Value, what: &str) -> Result<i64> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(i)
            } else if n.is_u64() || n.as_f64().is_some_and(|f| f.fract() == 0.0 && f.abs() >= 9.2e18) {
                Err(Error::WeightOverflow)
            } else {
                Err(malformed(format!("{what} must be an integer")))
            }
        }
        _ => Err(malformed(format!("{what} must be an integer"))),
    }
}

fn index(v: &Value, what: &str) -> Result<usize> {
    let i = int(v, what).map_err(|e| match e {
        Error::WeightOverflow => malformed(format!("{what} is too large")),
        e => e,
    })?;
    usize::try_from(i).map_err(|_| Error::IndexOutOfRange(format!("{what} = {i}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| malformed(format!("{what} must be an array")))
}

fn label(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(malformed("labels must be strings or numbers")),
    }
}

fn wrapper(obj: &Map<String, Value>) -> Result<(Option<usize>, Option<i64>)> {
    let k = obj.get("k").map(|v| index(v, "k")).transpose()?;
    let w = obj.get("W").map(|v| int(v, "W")).transpose()?;
    Ok((k, w))
}

/// Parses a document; set families collapse duplicates under the max objective.
pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    parse_instance_with(bytes, Objective::Max)
}

pub fn parse_instance_with(bytes: &[u8], objective: Objective) -> Result<Instance> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| malformed(e.to_string()))?;
    parse_value(&v, objective)
}

pub fn parse_value(v: &Value, objective: Objective) -> Result<Instance> {
    let obj = v.as_object().ok_or_else(|| malformed("document must be an object"))?;
    let (k, w) = wrapper(obj)?;
    if let Some(universe) = obj.get("universe") {
        let family = parse_family(universe, obj.get("sets"), objective)?;
        return Ok(Instance::SetFamily(SetFamilyInstance { family, k, w }));
    }
    let n = index(obj.get("nodes").ok_or_else(|| malformed("missing `nodes`"))?, "nodes")?;
    if let Some(arcs) = obj.get("arcs") {
        let mut list = Vec::new();
        for a in array(arcs, "arcs")? {
            let a = array(a, "arc")?;
            if a.len() != 3 {
                return Err(malformed("arc must be [tail, head, weight]"));
            }
            list.push((index(&a[0], "tail")?, index(&a[1], "head")?, int(&a[2], "weight")?));
        }
        return Ok(Instance::Digraph(DigraphInstance { graph: Digraph::new(n, &list)?, k, w }));
    }
    if let Some(edges) = obj.get("edges") {
        let mut list = Vec::new();
        for e in array(edges, "edges")? {
            let e = array(e, "edge")?;
            if e.len() != 2 {
                return Err(malformed("edge must be [u, v]"));
            }
            list.push((index(&e[0], "endpoint")?, index(&e[1], "endpoint")?));
        }
        return Ok(Instance::Graph(GraphInstance { graph: Graph::new(n, &list)?, k, w }));
    }
    Err(malformed("document has neither `universe`, `arcs` nor `edges`"))
}

fn parse_family(universe: &Value, sets: Option<&Value>, objective: Objective) -> Result<WeightedSetFamily> {
    let labels = array(universe, "universe")?.iter().map(label).collect::<Result<Vec<_>>>()?;
    let universe = OrderedUniverse::new(labels)?;
    if universe.len() > crate::types::MAX_ELEMENTS {
        return Err(Error::UniverseTooLarge(universe.len()));
    }
    let mut raw = Vec::new();
    for s in array(sets.ok_or_else(|| malformed("missing `sets`"))?, "sets")? {
        let s = s.as_object().ok_or_else(|| malformed("set must be an object"))?;
        let members = array(s.get("members").ok_or_else(|| malformed("set without `members`"))?, "members")?;
        let mut m = ElemSet::EMPTY;
        for x in members {
            let l = label(x)?;
            let r = universe.rank(&l).ok_or_else(|| Error::IndexOutOfRange(format!("unknown element `{l}`")))?;
            if m.contains(r) {
                return Err(Error::DuplicateElement(l));
            }
            m.insert(r);
        }
        let weight = int(s.get("weight").ok_or_else(|| malformed("set without `weight`"))?, "weight")?;
        raw.push(WeightedSet { members: m, weight });
    }
    WeightedSetFamily::new(universe, raw, objective)
}

fn wrap(mut obj: Map<String, Value>, k: Option<usize>, w: Option<i64>) -> Value {
    if let Some(k) = k {
        obj.insert("k".into(), Value::Number(Number::from(k)));
    }
    if let Some(w) = w {
        obj.insert("W".into(), Value::Number(Number::from(w)));
    }
    Value::Object(obj)
}

pub fn family_value(f: &WeightedSetFamily) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert(
        "universe".into(),
        Value::Array(f.universe.labels().iter().map(|l| Value::String(l.clone())).collect()),
    );
    let sets = f
        .sets
        .iter()
        .map(|s| {
            let members = s.members.iter().map(|e| Value::String(f.universe.label(e).to_string())).collect();
            serde_json::json!({ "members": Value::Array(members), "weight": s.weight })
        })
        .collect();
    obj.insert("sets".into(), Value::Array(sets));
    obj
}

pub fn digraph_value(g: &Digraph) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("nodes".into(), g.n().into());
    obj.insert(
        "arcs".into(),
        Value::Array(g.arcs().into_iter().map(|(t, h, w)| serde_json::json!([t, h, w])).collect()),
    );
    obj
}

pub fn graph_value(g: &Graph) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("nodes".into(), g.n().into());
    obj.insert(
        "edges".into(),
        Value::Array(g.edges().into_iter().map(|(u, v)| serde_json::json!([u, v])).collect()),
    );
    obj
}

pub fn instance_value(inst: &Instance) -> Value {
    match inst {
        Instance::SetFamily(i) => wrap(family_value(&i.family), i.k, i.w),
        Instance::Digraph(i) => wrap(digraph_value(&i.graph), i.k, i.w),
        Instance::Graph(i) => wrap(graph_value(&i.graph), i.k, i.w),
    }
}

/// Canonical compact serialization (keys sorted, no whitespace).
pub fn serialize_instance(inst: &Instance) -> String {
    serde_json::to_string(&instance_value(inst)).expect("json values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digraph_echo() {
        let i = parse_instance(br#"{"nodes":3,"arcs":[[0,1,1],[1,2,1]]}"#).unwrap();
        match &i {
            Instance::Digraph(d) => {
                assert_eq!(d.graph.n(), 3);
                assert_eq!(d.graph.arcs().len(), 2);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn three_set_family() {
        let doc = br#"{"universe":["a","b","c","d","e","f"],"sets":[{"members":["a","b","c"],"weight":2},{"members":["d","e","f"],"weight":1}],"k":2,"W":3}"#;
        let Instance::SetFamily(s) = parse_instance(doc).unwrap() else { panic!() };
        assert_eq!(s.family.set_size, 3);
        assert_eq!(s.k, Some(2));
        assert_eq!(s.w, Some(3));
    }

    #[test]
    fn out_of_range_tail() {
        let e = parse_instance(br#"{"nodes":3,"arcs":[[7,1,1]]}"#).unwrap_err();
        assert!(e.to_string().contains("index out of range"), "{e}");
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(parse_instance(b"{"), Err(Error::Malformed(_))));
        assert!(matches!(
            parse_instance(br#"{"universe":["a","a"],"sets":[]}"#),
            Err(Error::DuplicateElement(_))
        ));
        assert!(matches!(
            parse_instance(br#"{"universe":["a","b"],"sets":[{"members":["a","a"],"weight":1}]}"#),
            Err(Error::DuplicateElement(_))
        ));
        assert_eq!(
            parse_instance(br#"{"nodes":2,"arcs":[[0,1,99999999999999999999]]}"#),
            Err(Error::WeightOverflow)
        );
        assert!(matches!(parse_instance(br#"{"nodes":2,"edges":[[0,-1]]}"#), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn round_trip_is_fixed_point() {
        let doc = br#"{"nodes":4,"edges":[[2,1],[0,1],[1,2]],"k":1}"#;
        let a = parse_instance(doc).unwrap();
        let s = serialize_instance(&a);
        let b = parse_instance(s.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(s, serialize_instance(&b));
    }
}
