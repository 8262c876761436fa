//! Seeded random instances, optionally with a planted solution.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{DigraphInstance, GraphInstance, Instance, SetFamilyInstance};
use crate::problems::P2;
use crate::types::{Digraph, ElemSet, Graph, Objective, OrderedUniverse, WeightedSet, WeightedSetFamily, MAX_ELEMENTS};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_digraph(rng: &mut impl Rng, n: usize, density: f64, weights: (i64, i64)) -> Digraph {
    let mut arcs = Vec::new();
    for t in 0..n {
        for h in 0..n {
            if t != h && rng.gen_bool(density.clamp(0.0, 1.0)) {
                arcs.push((t, h, rng.gen_range(weights.0..=weights.1)));
            }
        }
    }
    Digraph::new(n, &arcs).expect("generated arcs are in range")
}

pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).expect("generated edges are in range")
}

/// `count` random 3-subsets of `0..n` (duplicates collapse).
pub fn random_triples(rng: &mut impl Rng, n: usize, count: usize, weights: (i64, i64)) -> WeightedSetFamily {
    let nodes: Vec<usize> = (0..n).collect();
    let raw = (0..count)
        .filter(|_| n >= 3)
        .map(|_| WeightedSet {
            members: ElemSet::from_iter(nodes.choose_multiple(rng, 3).copied()),
            weight: rng.gen_range(weights.0..=weights.1),
        })
        .collect();
    WeightedSetFamily::new(OrderedUniverse::numbered(n), raw, Objective::Max).expect("generated sets are valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenKind {
    Digraph,
    Graph,
    SetFamily,
}

impl std::str::FromStr for GenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "digraph" => Ok(GenKind::Digraph),
            "graph" => Ok(GenKind::Graph),
            "setfamily" => Ok(GenKind::SetFamily),
            _ => Err(Error::Parameter(format!("unknown instance kind `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenParams {
    pub n: usize,
    /// Arc or edge probability for graphs.
    pub density: f64,
    /// Number of random sets for set families.
    pub sets: usize,
    pub weights: (i64, i64),
    /// Size of the planted solution: a k-node path, k disjoint 3-node
    /// paths, or k disjoint 3-sets.
    pub plant: Option<usize>,
}

/// The planted structure, emitted next to the instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Certificate {
    Path { path: Vec<usize>, weight: i64 },
    Packing { paths: Vec<P2> },
    Sets { sets: Vec<Vec<usize>>, weight: i64 },
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub instance: Instance,
    pub certificate: Option<Certificate>,
}

pub fn gen_instance(kind: GenKind, p: &GenParams, seed: u64) -> Result<Generated> {
    if p.n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    if p.n > MAX_ELEMENTS {
        return Err(Error::UniverseTooLarge(p.n));
    }
    if p.weights.0 > p.weights.1 {
        return Err(Error::Parameter("empty weight range".into()));
    }
    let mut r = rng(seed);
    let mut perm: Vec<usize> = (0..p.n).collect();
    match kind {
        GenKind::Digraph => {
            let base = random_digraph(&mut r, p.n, p.density, p.weights);
            let mut arcs = base.arcs();
            let mut cert = None;
            if let Some(k) = p.plant {
                if k == 0 || k > p.n {
                    return Err(Error::Parameter(format!("cannot plant a {k}-node path in {} nodes", p.n)));
                }
                perm.shuffle(&mut r);
                let path = perm[..k].to_vec();
                let mut weight = 0;
                for w in path.windows(2) {
                    let a = r.gen_range(p.weights.0..=p.weights.1);
                    arcs.retain(|&(t, h, _)| (t, h) != (w[0], w[1]));
                    arcs.push((w[0], w[1], a));
                    weight += a;
                }
                cert = Some(Certificate::Path { path, weight });
            }
            let graph = Digraph::new(p.n, &arcs)?;
            Ok(Generated { instance: Instance::Digraph(DigraphInstance { graph, k: p.plant, w: None }), certificate: cert })
        }
        GenKind::Graph => {
            let base = random_graph(&mut r, p.n, p.density);
            let mut edges = base.edges();
            let mut cert = None;
            if let Some(k) = p.plant {
                if 3 * k > p.n {
                    return Err(Error::Parameter(format!("cannot plant {k} disjoint 3-node paths in {} nodes", p.n)));
                }
                perm.shuffle(&mut r);
                let paths: Vec<P2> = perm[..3 * k].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
                for q in &paths {
                    edges.push((q[0], q[1]));
                    edges.push((q[1], q[2]));
                }
                cert = Some(Certificate::Packing { paths });
            }
            let graph = Graph::new(p.n, &edges)?;
            Ok(Generated { instance: Instance::Graph(GraphInstance { graph, k: p.plant, w: None }), certificate: cert })
        }
        GenKind::SetFamily => {
            let base = random_triples(&mut r, p.n, p.sets, p.weights);
            let mut raw = base.sets.clone();
            let mut cert = None;
            if let Some(k) = p.plant {
                if 3 * k > p.n {
                    return Err(Error::Parameter(format!("cannot plant {k} disjoint 3-sets in {} elements", p.n)));
                }
                perm.shuffle(&mut r);
                let mut sets = Vec::new();
                let mut weight = 0;
                for c in perm[..3 * k].chunks(3) {
                    let members = ElemSet::from_iter(c.iter().copied());
                    let w = r.gen_range(p.weights.0..=p.weights.1);
                    raw.retain(|s| s.members != members);
                    raw.push(WeightedSet { members, weight: w });
                    sets.push(members.iter().collect());
                    weight += w;
                }
                cert = Some(Certificate::Sets { sets, weight });
            }
            let family = WeightedSetFamily::new(OrderedUniverse::numbered(p.n), raw, Objective::Max)?;
            Ok(Generated {
                instance: Instance::SetFamily(SetFamilyInstance { family, k: p.plant, w: None }),
                certificate: cert,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::serialize_instance;

    fn params(plant: Option<usize>) -> GenParams {
        GenParams { n: 8, density: 0.3, sets: 10, weights: (-3, 9), plant }
    }

    #[test]
    fn same_seed_same_document() {
        for kind in [GenKind::Digraph, GenKind::Graph, GenKind::SetFamily] {
            let a = gen_instance(kind, &params(Some(2)), 7).unwrap();
            let b = gen_instance(kind, &params(Some(2)), 7).unwrap();
            assert_eq!(serialize_instance(&a.instance), serialize_instance(&b.instance));
            assert_eq!(a.certificate, b.certificate);
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        let p = GenParams { n: 0, ..params(None) };
        assert!(gen_instance(GenKind::Graph, &p, 1).is_err());
    }

    #[test]
    fn infeasible_plants() {
        assert!(gen_instance(GenKind::Digraph, &params(Some(9)), 1).is_err());
        assert!(gen_instance(GenKind::Graph, &params(Some(3)), 1).is_err());
    }
}
