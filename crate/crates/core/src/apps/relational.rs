//! Relational structures and hypergraphs, solved as strings over the induced
//! action on tuples.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::luks::{Solver, Symbol};
use crate::partition::{Partition, PartitionSequence};
use crate::perm::{Coset, Perm, StabChain};

/// Largest tuple domain `n^t` accepted.
pub const TUPLE_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalStructure {
    domain_size: usize,
    arity: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

impl RelationalStructure {
    pub fn new(domain_size: usize, arity: usize, relations: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut rels = Vec::with_capacity(relations.len());
        for r in relations {
            let mut set = BTreeSet::new();
            for tup in r {
                if tup.len() != arity {
                    return Err(Error::Parse(format!("tuple of length {} in a {arity}-ary structure", tup.len())));
                }
                if let Some(&p) = tup.iter().find(|&&p| p >= domain_size) {
                    return Err(Error::PointOutOfRange { point: p + 1, n: domain_size });
                }
                set.insert(tup);
            }
            rels.push(set);
        }
        Ok(RelationalStructure { domain_size, arity, relations: rels })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn relations(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.relations
    }

    pub fn permuted(&self, p: &Perm) -> RelationalStructure {
        let relations = self
            .relations
            .iter()
            .map(|r| r.iter().map(|t| t.iter().map(|&a| p.apply(a)).collect()).collect())
            .collect();
        RelationalStructure { relations, ..self.clone() }
    }

    pub fn is_isomorphism(&self, other: &RelationalStructure, p: &Perm) -> bool {
        self.domain_size == other.domain_size
            && self.arity == other.arity
            && p.degree() == self.domain_size
            && self.permuted(p).relations == other.relations
    }

    /// `{"domain_size", "arity", "relations": [[[1, 2], ..], ..]}`, 1-indexed.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let n = v
            .get("domain_size")
            .or_else(|| v.get("n"))
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing domain_size".into()))? as usize;
        let arity = v.get("arity").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing arity".into()))? as usize;
        let rels = v
            .get("relations")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing relations".into()))?;
        let relations = rels.iter().map(|r| tuples_from_json(r, n)).collect::<Result<Vec<_>>>()?;
        RelationalStructure::new(n, arity, relations)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> Value {
        let rels: Vec<Vec<Vec<usize>>> =
            self.relations.iter().map(|r| r.iter().map(|t| t.iter().map(|p| p + 1).collect()).collect()).collect();
        json!({"domain_size": self.domain_size, "arity": self.arity, "relations": rels})
    }
}

fn tuples_from_json(v: &Value, n: usize) -> Result<Vec<Vec<usize>>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("relation must be an array".into()))?;
    arr.iter()
        .map(|t| {
            t.as_array()
                .ok_or_else(|| Error::Parse("tuple must be an array".into()))?
                .iter()
                .map(|p| match p.as_u64() {
                    Some(p) if p >= 1 && (p as usize) <= n => Ok(p as usize - 1),
                    Some(p) => Err(Error::PointOutOfRange { point: p as usize, n }),
                    None => Err(Error::Parse("tuple entries must be positive integers".into())),
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Colour {
    Point(bool),
    Tuple(Vec<usize>),
}

fn tuple_index(k: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &a| acc * k + a)
}

fn pow_checked(k: usize, a: usize) -> Result<usize> {
    let mut r: usize = 1;
    for _ in 0..a {
        r = r.checked_mul(k).filter(|&r| r <= TUPLE_CAP).ok_or_else(|| Error::CapExceeded {
            order: format!("{k}^{a}"),
            cap: TUPLE_CAP as u64,
        })?;
    }
    Ok(r)
}

/// The action of `g` on `[k] ⊔ [k]^a`, with tuples indexed in base `k` after the points.
fn tuple_perm(g: &Perm, a: usize, size: usize) -> Perm {
    let k = g.degree();
    let mut img: Vec<usize> = (0..k).map(|p| g.apply(p)).collect();
    let mut tup = vec![0usize; a];
    for _ in 0..size {
        let moved: Vec<usize> = tup.iter().map(|&c| g.apply(c)).collect();
        img.push(k + tuple_index(k, &moved));
        for c in tup.iter_mut().rev() {
            *c += 1;
            if *c < k {
                break;
            }
            *c = 0;
        }
    }
    Perm::from_images(img).expect("coordinatewise action is a bijection")
}

/// Points grouped with the tuples they start, then tuples by longer and longer prefixes.
fn prefix_chain(k: usize, a: usize, size: usize) -> Vec<Partition> {
    let n = k + size;
    let mut chain = vec![Partition::trivial(n)];
    for len in 1..=a {
        let span = size / k.pow(len as u32);
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for prefix in 0..k.pow(len as u32) {
            let mut b: Vec<usize> = (0..span).map(|s| k + prefix * span + s).collect();
            if len == 1 {
                b.insert(0, prefix);
            }
            blocks.push(b);
        }
        if len > 1 {
            blocks.extend((0..k).map(|p| vec![p]));
        }
        chain.push(Partition::from_blocks_unchecked(n, blocks));
    }
    chain.push(Partition::discrete(n));
    chain.dedup();
    chain
}

/// Elements of `group ≤ Sym(k)` carrying the `a`-ary colouring `ca` onto `cb`,
/// where colourings assign a relation-membership list to tuples and a flag
/// to points.
pub(crate) fn tuple_colouring_iso(
    group: &StabChain,
    a: usize,
    points_a: &[bool],
    points_b: &[bool],
    ca: &BTreeMap<Vec<usize>, Vec<usize>>,
    cb: &BTreeMap<Vec<usize>, Vec<usize>>,
    solver: &Solver,
) -> Result<Option<Coset>> {
    let k = group.degree();
    if k == 0 {
        return Ok(Some(Coset::group(group.clone())));
    }
    let size = if a == 0 { 0 } else { pow_checked(k, a)? };
    let n = k + size;
    let colour_string = |points: &[bool], c: &BTreeMap<Vec<usize>, Vec<usize>>| -> Vec<Colour> {
        let mut s: Vec<Colour> = points.iter().map(|&b| Colour::Point(b)).collect();
        s.resize(n, Colour::Tuple(Vec::new()));
        for (t, rels) in c {
            s[k + tuple_index(k, t)] = Colour::Tuple(rels.clone());
        }
        s
    };
    let sa = colour_string(points_a, ca);
    let sb = colour_string(points_b, cb);
    let palette: BTreeSet<&Colour> = sa.iter().chain(&sb).collect();
    let code: BTreeMap<&Colour, Symbol> = palette.into_iter().enumerate().map(|(i, c)| (c, i as Symbol)).collect();
    let x: Vec<Symbol> = sa.iter().map(|c| code[c]).collect();
    let y: Vec<Symbol> = sb.iter().map(|c| code[c]).collect();
    let gens: Vec<Perm> = group.generators().iter().map(|g| tuple_perm(g, a, size)).collect();
    let lifted = StabChain::new(n, gens)?;
    let chain = if a == 0 {
        let mut c = vec![Partition::trivial(n), Partition::discrete(n)];
        c.dedup();
        c
    } else {
        prefix_chain(k, a, size)
    };
    let seq = PartitionSequence::new(lifted, chain, k + 1)?;
    let first: Vec<usize> = (0..k).collect();
    Ok(solver.string_iso_main(&seq, &x, &y)?.map(|c| {
        let gens = c.subgroup.generators().iter().map(|g| g.restrict(&first).expect("points are invariant")).collect();
        let sub = StabChain::new(k, gens).expect("restricted generators share a domain");
        Coset { subgroup: sub, rep: c.rep.restrict(&first).expect("points are invariant") }
    }))
}

fn membership(s: &RelationalStructure) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut m: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, r) in s.relations.iter().enumerate() {
        for t in r {
            m.entry(t.clone()).or_default().push(i);
        }
    }
    m
}

/// `Iso(A1, A2)` as a coset of `Sym(D)`.
pub fn relational_structure_iso(a1: &RelationalStructure, a2: &RelationalStructure, solver: &Solver) -> Result<Option<Coset>> {
    if a1.domain_size != a2.domain_size || a1.arity != a2.arity {
        return Err(Error::Precondition("structures differ in domain size or arity".into()));
    }
    if a1.relations.len() != a2.relations.len()
        || a1.relations.iter().zip(&a2.relations).any(|(r, s)| r.len() != s.len())
    {
        return Ok(None);
    }
    let k = a1.domain_size;
    let marks = vec![true; k];
    tuple_colouring_iso(&StabChain::symmetric(k), a1.arity, &marks, &marks, &membership(a1), &membership(a2), solver)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: BTreeSet<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if let Some(&p) = e.iter().find(|&&p| p >= n) {
                return Err(Error::PointOutOfRange { point: p + 1, n });
            }
            if e.is_empty() {
                return Err(Error::EmptySet);
            }
            set.insert(e);
        }
        Ok(Hypergraph { n, edges: set })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<Vec<usize>> {
        &self.edges
    }

    /// Largest hyperedge size.
    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn permuted(&self, p: &Perm) -> Hypergraph {
        let edges = self.edges.iter().map(|e| p.image_of_set(e)).collect();
        Hypergraph { n: self.n, edges }
    }

    pub fn is_isomorphism(&self, other: &Hypergraph, p: &Perm) -> bool {
        self.n == other.n && p.degree() == self.n && self.permuted(p).edges == other.edges
    }

    /// One relation per edge size over sorted tuples, padded by repeating
    /// the last vertex up to the rank.
    fn as_structure(&self, t: usize) -> Result<RelationalStructure> {
        let mut relations = vec![Vec::new(); t];
        for e in &self.edges {
            let mut tup = e.clone();
            let last = *tup.last().expect("nonempty edge");
            tup.resize(t, last);
            relations[e.len() - 1].push(tup);
        }
        RelationalStructure::new(self.n, t, relations)
    }

    /// `{"n", "edges": [[1, 2, 3], ..]}`, 1-indexed.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing n".into()))? as usize;
        let edges = tuples_from_json(v.get("edges").ok_or_else(|| Error::Parse("missing edges".into()))?, n)?;
        Hypergraph::new(n, edges)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> Value {
        let edges: Vec<Vec<usize>> = self.edges.iter().map(|e| e.iter().map(|p| p + 1).collect()).collect();
        json!({"n": self.n, "edges": edges})
    }
}

/// Sorted tuples are mapped to sorted tuples only up to reordering, so each
/// edge is encoded by all of its orderings.
pub fn hypergraph_iso(h1: &Hypergraph, h2: &Hypergraph, solver: &Solver) -> Result<Option<Coset>> {
    if h1.n != h2.n {
        return Ok(None);
    }
    let sizes = |h: &Hypergraph| h.edges.iter().map(Vec::len).collect::<Vec<_>>();
    let (mut s1, mut s2) = (sizes(h1), sizes(h2));
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Ok(None);
    }
    let t = h1.rank().max(1);
    let a1 = symmetrize(&h1.as_structure(t)?);
    let a2 = symmetrize(&h2.as_structure(t)?);
    relational_structure_iso(&a1, &a2, solver)
}

/// Close each relation under the images of the padded tuples by every
/// rearrangement of the underlying edge.
fn symmetrize(s: &RelationalStructure) -> RelationalStructure {
    let relations = s
        .relations
        .iter()
        .map(|r| {
            let mut out = BTreeSet::new();
            for tup in r {
                let mut e = tup.clone();
                e.sort_unstable();
                e.dedup();
                for word in words_over(&e, s.arity) {
                    out.insert(word);
                }
            }
            out
        })
        .collect();
    RelationalStructure { relations, ..s.clone() }
}

/// All length-`t` words over `e` using every letter at least once.
fn words_over(e: &[usize], t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(e: &[usize], t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            if e.iter().all(|a| cur.contains(a)) {
                out.push(cur.clone());
            }
            return;
        }
        for &a in e {
            cur.push(a);
            rec(e, t, cur, out);
            cur.pop();
        }
    }
    rec(e, t, &mut cur, &mut out);
    out
}
