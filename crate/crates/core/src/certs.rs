//! Certificates for giant representations: affected points, local
//! certificates of fullness and their comparison, aggregation into canonical
//! structures or a large symmetry, and the split of an isomorphism coset that
//! these yield.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::apps::relational::tuple_colouring_iso;
use crate::error::{Error, Result};
use crate::luks::{coset_union, shift_string, Frame, Solver, Symbol};
use crate::par;
use crate::partition::PartitionSequence;
use crate::perm::{action_on_set, Coset, GroupHom, Perm, StabChain};
use crate::reduction::k_subsets;

/// A homomorphism `G → Sym(k)` whose image contains `Alt(k)`.
#[derive(Clone, Debug)]
pub struct GiantRep {
    pub hom: GroupHom,
    pub k: usize,
}

impl GiantRep {
    pub fn new(hom: GroupHom) -> Result<Self> {
        if !hom.image_group().is_giant_at_least_alt() {
            return Err(Error::Precondition("image is not a giant".into()));
        }
        let k = hom.target_degree();
        Ok(GiantRep { hom, k })
    }

    pub fn group(&self) -> &StabChain {
        self.hom.source()
    }
}

fn image_of(h: &StabChain, hom: &GroupHom) -> Result<StabChain> {
    let gens = h.generators().iter().map(|g| hom.image(g)).collect::<Result<Vec<_>>>()?;
    StabChain::new(hom.target_degree(), gens)
}

/// Points whose stabilizer in `h` does not map onto a giant.
pub(crate) fn affected(h: &StabChain, hom: &GroupHom) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for o in h.orbits().blocks() {
        let stab = h.pointwise_stabilizer(&o[..1]);
        if !image_of(&stab, hom)?.is_giant_at_least_alt() {
            out.extend_from_slice(o);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `Aff(H, φ)`; a union of `H`-orbits.
pub fn affected_points(h: &StabChain, rep: &GiantRep) -> Result<Vec<usize>> {
    if !h.is_subgroup_of(rep.group()) {
        return Err(Error::NotSubgroup);
    }
    affected(h, &rep.hom)
}

/// `g ↦ (g^φ)^T` on a subgroup stabilizing `T`, with `T` relabelled by position.
fn restricted(h: &StabChain, phi: &GroupHom, t: &[usize]) -> Result<GroupHom> {
    let imgs = h.generators().iter().map(|g| phi.image(g)?.restrict(t)).collect::<Result<Vec<_>>>()?;
    Ok(GroupHom::trusted(h.clone(), t.len(), imgs))
}

#[derive(Clone, Debug)]
pub enum CertOutcome {
    /// `K ≤ Aut_{G_T}(x)` with `(K^φ)^T ≥ Alt(T)`
    Full(StabChain),
    /// a non-giant subgroup of `Sym(T)` containing the image of `Aut_{G_T}(x)`
    NonFull(StabChain),
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub test_set: Vec<usize>,
    pub outcome: CertOutcome,
    /// sizes of the successive window increments
    pub windows: Vec<usize>,
}

impl Certificate {
    pub fn is_full(&self) -> bool {
        matches!(self.outcome, CertOutcome::Full(_))
    }

    pub fn to_json_value(&self) -> Value {
        let (kind, g) = match &self.outcome {
            CertOutcome::Full(k) => ("full", k),
            CertOutcome::NonFull(m) => ("nonfull", m),
        };
        json!({
            "kind": kind,
            "test_set": self.test_set.iter().map(|p| p + 1).collect::<Vec<_>>(),
            "degree": g.degree(),
            "generators": g.generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "window_trace": self.windows,
        })
    }
}

/// Result of comparing two test sets.
#[derive(Clone, Debug)]
pub enum Comparison {
    /// no isomorphism carries the first set onto the second
    NoMap,
    /// every such isomorphism acts on `T1` as an element of `M σ`; `M` acts on
    /// positions of `T1` and `sigma[p]` is the image of the `p`-th point of `T1`
    Morphisms { m: StabChain, sigma: Vec<usize> },
}

impl Comparison {
    /// The maps `T1 → [k]` in `M σ`, as image lists over positions of `T1`.
    pub fn maps(&self) -> Result<Vec<Vec<usize>>> {
        match self {
            Comparison::NoMap => Ok(Vec::new()),
            Comparison::Morphisms { m, sigma } => {
                Ok(m.elements()?.map(|g| (0..sigma.len()).map(|p| sigma[g.apply(p)]).collect()).collect())
            }
        }
    }
}

/// A relational structure on a subset of `[k]`; all relations share one arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalStructure {
    pub domain: Vec<usize>,
    pub arity: usize,
    pub relations: Vec<Vec<Vec<usize>>>,
}

impl LocalStructure {
    fn new(mut domain: Vec<usize>, arity: usize, relations: Vec<Vec<Vec<usize>>>) -> Self {
        domain.sort_unstable();
        domain.dedup();
        let relations = relations
            .into_iter()
            .map(|mut r| {
                r.sort_unstable();
                r.dedup();
                r
            })
            .collect();
        LocalStructure { domain, arity, relations }
    }

    pub fn permuted(&self, p: &Perm) -> LocalStructure {
        let rels = self.relations.iter().map(|r| r.iter().map(|t| t.iter().map(|&a| p.apply(a)).collect()).collect()).collect();
        LocalStructure::new(p.image_of_set(&self.domain), self.arity, rels)
    }

    pub fn to_json_value(&self) -> Value {
        let one = |v: &[usize]| v.iter().map(|p| p + 1).collect::<Vec<_>>();
        json!({
            "domain": one(&self.domain),
            "arity": self.arity,
            "relations": self.relations.iter().map(|r| r.iter().map(|t| one(t)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Tuple to the indices of the relations containing it.
    fn colours(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let mut c: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.relations.iter().enumerate() {
            for t in r {
                c.entry(t.clone()).or_default().push(i);
            }
        }
        c
    }

    fn shape(&self) -> (usize, usize, Vec<usize>) {
        (self.domain.len(), self.arity, self.relations.iter().map(Vec::len).collect())
    }
}

/// Isomorphisms of local structures inside a group on `[k]`.
pub trait StructureOracle: Send + Sync {
    fn iso_in(&self, group: &StabChain, a: &LocalStructure, b: &LocalStructure, solver: &Solver) -> Result<Option<Coset>>;
}

/// Enumeration up to `brute_cap` elements, otherwise the tuple-action string reduction.
#[derive(Clone, Copy, Debug)]
pub struct DefaultStructureOracle {
    pub brute_cap: u64,
}

impl Default for DefaultStructureOracle {
    fn default() -> Self {
        DefaultStructureOracle { brute_cap: 1_000_000 }
    }
}

impl StructureOracle for DefaultStructureOracle {
    fn iso_in(&self, group: &StabChain, a: &LocalStructure, b: &LocalStructure, solver: &Solver) -> Result<Option<Coset>> {
        if a.shape() != b.shape() {
            return Ok(None);
        }
        let k = group.degree();
        let marks = |s: &LocalStructure| {
            let mut m = vec![false; k];
            s.domain.iter().for_each(|&p| m[p] = true);
            m
        };
        let (ca, cb) = (a.colours(), b.colours());
        if group.order_u64().is_some_and(|o| o <= self.brute_cap) {
            let mb = marks(b);
            let cb: HashMap<&[usize], &Vec<usize>> = cb.iter().map(|(t, r)| (t.as_slice(), r)).collect();
            // equal relation sizes make membership-preserving maps onto
            let maps_onto = |g: &Perm| {
                let mut img = Vec::with_capacity(a.arity);
                a.domain.iter().all(|&p| mb[g.apply(p)])
                    && ca.iter().all(|(t, rels)| {
                        img.clear();
                        img.extend(t.iter().map(|&p| g.apply(p)));
                        cb.get(img.as_slice()) == Some(&rels)
                    })
            };
            // the isomorphisms form a coset `Aut(a) r`: elements of the part
            // found so far need no full check
            let mut found: Option<(StabChain, Perm)> = None; // (automorphisms so far, r^-1)
            for g in group.elements_capped(self.brute_cap)? {
                if let Some((aut, r_inv)) = &found {
                    if aut.contains(&g.then(r_inv)) {
                        continue;
                    }
                }
                if !maps_onto(&g) {
                    continue;
                }
                found = Some(match found {
                    None => (StabChain::trivial(k), g.inverse()),
                    Some((aut, r_inv)) => (aut.closure(&[g.then(&r_inv)]), r_inv),
                });
            }
            return found.map(|(aut, r_inv)| Coset::new(aut, r_inv.inverse())).transpose();
        }
        tuple_colouring_iso(group, a.arity, &marks(a), &marks(b), &ca, &cb, solver)
    }
}

#[derive(Clone, Debug)]
pub enum Aggregate {
    /// a canonical family of structures per input
    Structures { first: Vec<LocalStructure>, second: Vec<LocalStructure> },
    /// a large set `Δ_i` on which `K_i ≤ Aut(x_i)` induces at least `Alt(Δ_i)`
    Symmetry { first: (Vec<usize>, StabChain), second: (Vec<usize>, StabChain) },
    /// the two inputs land in different cases, so they are not isomorphic
    Mismatch,
}

impl Aggregate {
    pub fn to_json_value(&self) -> Value {
        let one = |v: &[usize]| v.iter().map(|p| p + 1).collect::<Vec<_>>();
        match self {
            Aggregate::Structures { first, second } => json!({
                "kind": "structures",
                "first": first.iter().map(LocalStructure::to_json_value).collect::<Vec<_>>(),
                "second": second.iter().map(LocalStructure::to_json_value).collect::<Vec<_>>(),
            }),
            Aggregate::Symmetry { first, second } => json!({
                "kind": "symmetry",
                "first": {"delta": one(&first.0), "generators": first.1.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>()},
                "second": {"delta": one(&second.0), "generators": second.1.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>()},
            }),
            Aggregate::Mismatch => json!({"kind": "mismatch"}),
        }
    }
}

/// Where a descent through growing windows stopped.
enum Descent {
    /// image no longer a giant: the final group part and representative
    NonGiant(StabChain, Perm),
    /// affected points stopped growing; `K` fixes everything outside the window
    Full(StabChain),
    Empty,
}

/// `n − max{|Δ| : Alt(Δ) ≤ G}`. Connected families of 3-cycles generate the
/// alternating group on their joint support, so the largest such `Δ` is the
/// largest component of the 3-cycles in `G`.
pub fn symmetry_defect(g: &StabChain) -> usize {
    let n = g.degree();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut in_cycle = vec![false; n];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let hit = [[a, b, c], [a, c, b]].iter().any(|cyc| {
                    let p = Perm::from_cycles(n, &[cyc.to_vec()]).expect("distinct points");
                    g.contains(&p)
                });
                if hit {
                    for p in [a, b, c] {
                        in_cycle[p] = true;
                    }
                    union(&mut parent, a, b);
                    union(&mut parent, a, c);
                }
            }
        }
    }
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for p in (0..n).filter(|&p| in_cycle[p]) {
        *sizes.entry(find(&mut parent, p)).or_default() += 1;
    }
    let largest = sizes.values().copied().max().unwrap_or(0).max(n.min(2));
    n - largest
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Orbits of `G` on ordered pairs: those inside the diagonal first, each
/// group ordered by least pair.
pub fn orbital_configuration(g: &StabChain) -> Vec<Vec<(usize, usize)>> {
    let n = g.degree();
    let mut seen = vec![false; n * n];
    let mut orbitals = Vec::new();
    for start in 0..n * n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut i = 0;
        while i < orbit.len() {
            let (a, b) = (orbit[i] / n, orbit[i] % n);
            i += 1;
            for s in g.generators() {
                let q = s.apply(a) * n + s.apply(b);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
        }
        orbit.sort_unstable();
        orbitals.push(orbit.into_iter().map(|q| (q / n, q % n)).collect::<Vec<_>>());
    }
    orbitals.sort_by_key(|o: &Vec<(usize, usize)>| (o[0].0 != o[0].1, o[0]));
    orbitals
}

/// Largest `s` with `G` `s`-transitive on its domain (`G` transitive).
fn transitivity_degree(g: &StabChain) -> usize {
    let n = g.degree();
    let mut s = 1;
    while s < n {
        let fixed: Vec<usize> = (0..s).collect();
        let stab = g.pointwise_stabilizer(&fixed);
        if stab.orbit(s).map(|o| o.len()).unwrap_or(0) != n - s {
            break;
        }
        s += 1;
    }
    s
}

/// Ordered tuples of distinct elements of `set` of length `len`, lexicographic.
fn arrangements(set: &[usize], len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(set: &[usize], len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for &a in set {
            if !cur.contains(&a) {
                cur.push(a);
                rec(set, len, cur, out);
                cur.pop();
            }
        }
    }
    rec(set, len, &mut cur, &mut out);
    out
}

fn diag(points: &[usize]) -> Vec<Vec<usize>> {
    points.iter().map(|&p| vec![p, p]).collect()
}

/// Per-input summary of all local certificates.
struct Fullness {
    group: StabChain,
    support: Vec<usize>,
}

enum Shape {
    Colouring(Vec<LocalStructure>),
    Orbits(Vec<LocalStructure>),
    Giant(Vec<usize>, StabChain),
    Orbitals(Vec<LocalStructure>),
    Sparse,
}

pub(crate) struct Certifier<'a> {
    solver: &'a Solver,
    rep: &'a GiantRep,
    f: Frame<'a>,
}

impl<'a> Certifier<'a> {
    pub(crate) fn new(solver: &'a Solver, rep: &'a GiantRep, f: Frame<'a>) -> Self {
        Certifier { solver, rep, f }
    }

    fn check_size(&self, t: usize) -> Result<()> {
        let floor = if self.solver.config().guard_override.is_some() {
            2.0
        } else {
            8f64.max(2.0 + (self.f.d.max(1) as f64).log2())
        };
        if (t as f64) <= floor {
            return Err(Error::Precondition(format!("test sets of size {t} must exceed {floor}")));
        }
        if t > self.rep.k {
            return Err(Error::Precondition(format!("test set size {t} exceeds k = {}", self.rep.k)));
        }
        Ok(())
    }

    fn test_set(&self, t: &[usize]) -> Result<Vec<usize>> {
        let mut s = t.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != t.len() {
            return Err(Error::Precondition("test set has repeated points".into()));
        }
        if let Some(&p) = s.iter().find(|&&p| p >= self.rep.k) {
            return Err(Error::PointOutOfRange { point: p + 1, n: self.rep.k });
        }
        self.check_size(s.len())?;
        Ok(s)
    }

    fn stabilizer(&self, t: &[usize]) -> Result<(StabChain, GroupHom)> {
        let img = self.rep.hom.image_group().setwise_stabilizer(t);
        let gt = self.rep.hom.preimage_group(&img)?;
        let psi = restricted(&gt, &self.rep.hom, t)?;
        Ok((gt, psi))
    }

    /// `Iso_{Hσ}^W(x, y)` where `W` is `H`-invariant; windows over half the
    /// domain go through the cosets of `ker ψ`.
    fn window_step(&self, h: &StabChain, psi: &GroupHom, sigma: &Perm, x: &[Symbol], y: &[Symbol], w: &[usize]) -> Result<Option<Coset>> {
        let y2 = shift_string(y, sigma);
        let inner = self.f.deeper();
        if 2 * w.len() <= h.degree() {
            return Ok(self.solver.solve(h, inner, x, &y2, Some(w))?.map(|c| c.times(sigma)));
        }
        let local = psi.restrict_to(h)?;
        let kernel = local.kernel();
        let cap = self.solver.config().transversal_cap;
        let lifts = local
            .image_group()
            .elements_capped(cap)?
            .map(|p| local.preimage(&p).and_then(|o| o.ok_or(Error::NotSubgroup)))
            .collect::<Result<Vec<_>>>()?;
        let parts = par::map(&lifts, |g| {
            let y3 = shift_string(&y2, g);
            self.solver.solve(&kernel, inner, x, &y3, Some(w)).map(|r| r.map(|c| c.times(g)))
        });
        let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(coset_union(&parts)?.map(|c| c.times(sigma)))
    }

    /// Shrink `G_0 σ_0` through windows of affected points until the image
    /// under `ψ` stops being a giant or the affected points stop growing.
    /// When they stop growing while the fixer of the rest is not a giant, the
    /// remaining points are taken as one last window.
    fn descend(&self, g0: StabChain, psi: &GroupHom, sigma0: Perm, x: &[Symbol], y: &[Symbol], trace: &mut Vec<usize>) -> Result<Descent> {
        let n = g0.degree();
        let (mut gi, mut sigma) = (g0, sigma0);
        let mut inw = vec![false; n];
        loop {
            let local = psi.restrict_to(&gi)?;
            if !local.image_group().is_giant_at_least_alt() {
                return Ok(Descent::NonGiant(gi, sigma));
            }
            let mut fresh: Vec<usize> = affected(&gi, &local)?.into_iter().filter(|&a| !inw[a]).collect();
            if fresh.is_empty() {
                let rest: Vec<usize> = (0..n).filter(|&a| !inw[a]).collect();
                let k = gi.pointwise_stabilizer(&rest);
                if rest.is_empty() || image_of(&k, psi)?.is_giant_at_least_alt() {
                    return Ok(Descent::Full(k));
                }
                fresh = rest;
            }
            trace.push(fresh.len());
            match self.window_step(&gi, &local, &sigma, x, y, &fresh)? {
                None => return Ok(Descent::Empty),
                Some(c) => {
                    gi = c.subgroup;
                    sigma = c.rep;
                }
            }
            fresh.iter().for_each(|&a| inw[a] = true);
        }
    }

    pub(crate) fn local(&self, x: &[Symbol], t: &[usize]) -> Result<Certificate> {
        let t = self.test_set(t)?;
        let (gt, psi) = self.stabilizer(&t)?;
        let n = gt.degree();
        let mut windows = Vec::new();
        let outcome = match self.descend(gt, &psi, Perm::identity(n), x, x, &mut windows)? {
            Descent::Full(k) => CertOutcome::Full(k),
            Descent::NonGiant(g, _) => CertOutcome::NonFull(image_of(&g, &psi)?),
            Descent::Empty => unreachable!("the identity is an automorphism"),
        };
        Ok(Certificate { test_set: t, outcome, windows })
    }

    pub(crate) fn compare(&self, x1: &[Symbol], x2: &[Symbol], t1: &[usize], t2: &[usize]) -> Result<Comparison> {
        let t1 = self.test_set(t1)?;
        let t2 = self.test_set(t2)?;
        if t1.len() != t2.len() {
            return Ok(Comparison::NoMap);
        }
        let img = self.rep.hom.image_group();
        let Some(s0) = img.set_transporter(&t1, &t2) else { return Ok(Comparison::NoMap) };
        let s0 = self.rep.hom.preimage(&s0)?.ok_or(Error::NotSubgroup)?;
        let (g0, psi) = self.stabilizer(&t1)?;
        match self.descend(g0, &psi, s0, x1, x2, &mut Vec::new())? {
            Descent::Full(_) => Err(Error::T1FullViolation),
            Descent::Empty => Ok(Comparison::NoMap),
            Descent::NonGiant(g, sigma) => {
                let m = image_of(&g, &psi)?;
                let s = self.rep.hom.image(&sigma)?;
                Ok(Comparison::Morphisms { m, sigma: t1.iter().map(|&a| s.apply(a)).collect() })
            }
        }
    }

    fn fullness(&self, x: &[Symbol], t: usize) -> Result<Fullness> {
        let sets = k_subsets(self.rep.k, t);
        let certs = par::map(&sets, |s| self.local(x, s)).into_iter().collect::<Result<Vec<_>>>()?;
        let n = self.rep.group().degree();
        let gens: Vec<Perm> = certs
            .iter()
            .filter_map(|c| match &c.outcome {
                CertOutcome::Full(k) => Some(k.generators().to_vec()),
                CertOutcome::NonFull(_) => None,
            })
            .flatten()
            .collect();
        let group = StabChain::new(n, gens)?;
        let img = image_of(&group, &self.rep.hom)?;
        let mut support: BTreeSet<usize> = BTreeSet::new();
        for g in img.generators() {
            support.extend(g.support());
        }
        Ok(Fullness { group, support: support.into_iter().collect() })
    }

    fn shape(&self, full: &Fullness) -> Result<Shape> {
        let k = self.rep.k;
        let s = full.support.len();
        if 4 * s < k {
            return Ok(Shape::Sparse);
        }
        let all: Vec<usize> = (0..k).collect();
        if 4 * s <= 3 * k {
            let colour: Vec<Vec<usize>> = full.support.iter().map(|&p| vec![p]).collect();
            return Ok(Shape::Colouring(vec![LocalStructure::new(all, 1, vec![colour])]));
        }
        let img = image_of(&full.group, &self.rep.hom)?;
        let orbits = img.orbits();
        let Some(big) = orbits.blocks().iter().find(|o| 4 * o.len() >= 3 * k) else {
            let same: Vec<Vec<usize>> =
                orbits.blocks().iter().flat_map(|o| o.iter().flat_map(move |&a| o.iter().map(move |&b| vec![a, b]))).collect();
            return Ok(Shape::Orbits(vec![LocalStructure::new(all, 2, vec![same])]));
        };
        let c = big.clone();
        let on_c = img.restrict(&c)?;
        if on_c.is_giant_at_least_alt() {
            return Ok(Shape::Giant(c, full.group.clone()));
        }
        let dt = transitivity_degree(&on_c);
        let mut out = Vec::new();
        for ind in arrangements(&(0..c.len()).collect::<Vec<_>>(), dt - 1) {
            let h = on_c.pointwise_stabilizer(&ind);
            let rest: Vec<usize> = (0..c.len()).filter(|p| !ind.contains(p)).collect();
            let h_rest = h.restrict(&rest)?;
            let pinned: Vec<Vec<Vec<usize>>> = ind.iter().map(|&p| diag(&[c[p]])).collect();
            let lift = |q: usize| c[rest[q]];
            let m = rest.len();
            for orb in orbital_configuration(&h_rest).into_iter().filter(|o| o[0].0 != o[0].1) {
                let rel: BTreeSet<(usize, usize)> = orb.iter().copied().collect();
                let symmetric = rel.iter().all(|&(a, b)| rel.contains(&(b, a)));
                let mut push = |first: Vec<Vec<Vec<usize>>>| {
                    let mut rels = first;
                    rels.extend(pinned.iter().cloned());
                    out.push(LocalStructure::new(c.clone(), 2, rels));
                };
                let out_degree = rel.len() / m.max(1);
                if symmetric {
                    push(vec![rel.iter().map(|&(a, b)| vec![lift(a), lift(b)]).collect()]);
                } else if 2 * out_degree + 1 < m {
                    let both = rel.iter().flat_map(|&(a, b)| [vec![lift(a), lift(b)], vec![lift(b), lift(a)]]).collect();
                    push(vec![both]);
                } else {
                    for v in 0..m {
                        let outs: Vec<usize> = rel.iter().filter(|e| e.0 == v).map(|e| lift(e.1)).collect();
                        let ins: Vec<usize> = rel.iter().filter(|e| e.1 == v).map(|e| lift(e.0)).collect();
                        push(vec![diag(&[lift(v)]), diag(&outs), diag(&ins)]);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(Shape::Orbitals(out))
    }

    /// Classes of ordered `t`-tuples over both complements of the supports,
    /// joined along all compared morphisms.
    fn tuple_classes(&self, xs: [&[Symbol]; 2], fulls: [&Fullness; 2], t: usize) -> Result<Aggregate> {
        let k = self.rep.k;
        let doms: Vec<Vec<usize>> = fulls.iter().map(|f| (0..k).filter(|p| f.support.binary_search(p).is_err()).collect()).collect();
        if doms[0].len() != doms[1].len() {
            return Ok(Aggregate::Mismatch);
        }
        let mut nodes: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut sets: Vec<(usize, Vec<usize>)> = Vec::new();
        for (side, d) in doms.iter().enumerate() {
            for s in k_subsets(d.len(), t) {
                sets.push((side, s.iter().map(|&i| d[i]).collect()));
            }
            for tup in arrangements(d, t) {
                nodes.push((side, tup));
            }
        }
        let id: HashMap<&(usize, Vec<usize>), usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let pairs: Vec<(usize, usize)> = (0..sets.len()).flat_map(|a| (0..sets.len()).map(move |b| (a, b))).collect();
        let results = par::map(&pairs, |&(a, b)| {
            let (sa, ta) = &sets[a];
            let (sb, tb) = &sets[b];
            self.compare(xs[*sa], xs[*sb], ta, tb)
        });
        // joining along σ and along generators of M inside the first side
        // generates the same classes as joining along every element of M σ
        let orders = arrangements(&(0..t).collect::<Vec<_>>(), t);
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        for (&(a, b), cmp) in pairs.iter().zip(results) {
            let Comparison::Morphisms { m, sigma } = cmp? else { continue };
            let (sa, ta) = &sets[a];
            let sb = sets[b].0;
            let node = |side: usize, tup: Vec<usize>| id.get(&(side, tup)).copied();
            for order in &orders {
                let Some(from) = node(*sa, order.iter().map(|&p| ta[p]).collect()) else { continue };
                if let Some(to) = node(sb, order.iter().map(|&p| sigma[p]).collect()) {
                    union(&mut parent, from, to);
                }
                for g in m.generators() {
                    if let Some(to) = node(*sa, order.iter().map(|&p| ta[g.apply(p)]).collect()) {
                        union(&mut parent, from, to);
                    }
                }
            }
        }
        // nodes are in (side, tuple) order, so the first node seen per class is its least member
        let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut rels: [Vec<Vec<Vec<usize>>>; 2] = [Vec::new(), Vec::new()];
        for (i, (side, tup)) in nodes.iter().enumerate() {
            let root = find(&mut parent, i);
            let next = class_of.len();
            let j = *class_of.entry(root).or_insert(next);
            for r in rels.iter_mut() {
                if r.len() <= j {
                    r.resize(j + 1, Vec::new());
                }
            }
            rels[*side][j].push(tup.clone());
        }
        let [r1, r2] = rels;
        Ok(Aggregate::Structures {
            first: vec![LocalStructure::new(doms[0].clone(), t, r1)],
            second: vec![LocalStructure::new(doms[1].clone(), t, r2)],
        })
    }

    pub(crate) fn aggregate(&self, x1: &[Symbol], x2: &[Symbol], t: usize) -> Result<Aggregate> {
        self.check_size(t)?;
        let f1 = self.fullness(x1, t)?;
        let f2 = self.fullness(x2, t)?;
        let shapes = (self.shape(&f1)?, self.shape(&f2)?);
        Ok(match shapes {
            (Shape::Colouring(a), Shape::Colouring(b))
            | (Shape::Orbits(a), Shape::Orbits(b))
            | (Shape::Orbitals(a), Shape::Orbitals(b)) => {
                if a.len() != b.len() {
                    Aggregate::Mismatch
                } else {
                    Aggregate::Structures { first: a, second: b }
                }
            }
            (Shape::Giant(c1, k1), Shape::Giant(c2, k2)) => Aggregate::Symmetry { first: (c1, k1), second: (c2, k2) },
            (Shape::Sparse, Shape::Sparse) => self.tuple_classes([x1, x2], [&f1, &f2], t)?,
            _ => Aggregate::Mismatch,
        })
    }

    /// `(H_j, h_j)` with `H_j h_j` the elements whose image carries the first
    /// structure of the first family onto the `j`-th of the second.
    pub(crate) fn find_structure(&self, first: &[LocalStructure], second: &[LocalStructure]) -> Result<Vec<(StabChain, Perm)>> {
        let Some(a1) = first.first() else { return Ok(Vec::new()) };
        let img = self.rep.hom.image_group();
        let oracle = self.solver.structure_oracle();
        let found = par::map(second, |a2| oracle.iso_in(img, a1, a2, self.solver));
        let mut out = Vec::new();
        for c in found {
            if let Some(c) = c? {
                let h = self.rep.hom.preimage_group(&c.subgroup)?;
                let r = self.rep.hom.preimage(&c.rep)?.ok_or(Error::NotSubgroup)?;
                out.push((h, r));
            }
        }
        Ok(out)
    }

    pub(crate) fn find_symmetry(&self, d1: &[usize], d2: &[usize], k1: &StabChain) -> Result<Option<SymmetrySplit>> {
        let (d1, d2) = (sorted(d1), sorted(d2));
        let hom = &self.rep.hom;
        let img = hom.image_group();
        if d1.len() >= 3 && !image_of(k1, hom)?.restrict(&d1)?.is_giant_at_least_alt() {
            return Err(Error::Precondition("symmetry group does not induce a giant on its set".into()));
        }
        let Some(g) = img.set_transporter(&d1, &d2) else { return Ok(None) };
        let g = hom.preimage(&g)?.ok_or(Error::NotSubgroup)?;
        let h = hom.preimage_group(&img.pointwise_stabilizer(&d1))?;
        let mut reps = vec![g.clone()];
        if d1.len() >= 2 {
            let on_d1 = action_on_set(&img.setwise_stabilizer(&d1), &d1)?;
            let swap = Perm::from_cycles(d1.len(), &[vec![0, 1]])?;
            if let Some(u) = on_d1.preimage(&swap)? {
                let tau = hom.preimage(&u)?.ok_or(Error::NotSubgroup)?;
                reps.push(tau.then(&g));
            }
        }
        Ok(Some(SymmetrySplit { h, reps, k1: k1.clone() }))
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// `H = G_(Δ_1)` with representatives; `Iso_G = ⋃_j ⟨K_1, G_j⟩ g_j` where
/// `G_j g_j = Iso_{H h_j}`.
#[derive(Clone, Debug)]
pub struct SymmetrySplit {
    pub h: StabChain,
    pub reps: Vec<Perm>,
    pub k1: StabChain,
}

fn frame_for<'a>(seq: &'a PartitionSequence, rep: &GiantRep) -> Result<Frame<'a>> {
    if !rep.group().is_subgroup_of(&seq.group) {
        return Err(Error::NotSubgroup);
    }
    Ok(Frame { chain: &seq.chain, d: seq.d, depth: 0 })
}

pub fn local_certificates(solver: &Solver, seq: &PartitionSequence, rep: &GiantRep, x: &[Symbol], t: &[usize]) -> Result<Certificate> {
    if x.len() != rep.group().degree() {
        return Err(Error::BadString);
    }
    Certifier::new(solver, rep, frame_for(seq, rep)?).local(x, t)
}

pub fn compare_local_certificates(
    solver: &Solver,
    seq: &PartitionSequence,
    rep: &GiantRep,
    x1: &[Symbol],
    x2: &[Symbol],
    t1: &[usize],
    t2: &[usize],
) -> Result<Comparison> {
    let n = rep.group().degree();
    if x1.len() != n || x2.len() != n {
        return Err(Error::BadString);
    }
    Certifier::new(solver, rep, frame_for(seq, rep)?).compare(x1, x2, t1, t2)
}

pub fn aggregate_certificates(
    solver: &Solver,
    seq: &PartitionSequence,
    rep: &GiantRep,
    x1: &[Symbol],
    x2: &[Symbol],
    t: usize,
) -> Result<Aggregate> {
    let n = rep.group().degree();
    if x1.len() != n || x2.len() != n {
        return Err(Error::BadString);
    }
    Certifier::new(solver, rep, frame_for(seq, rep)?).aggregate(x1, x2, t)
}

pub fn find_structure(
    solver: &Solver,
    seq: &PartitionSequence,
    rep: &GiantRep,
    first: &[LocalStructure],
    second: &[LocalStructure],
) -> Result<Vec<(StabChain, Perm)>> {
    Certifier::new(solver, rep, frame_for(seq, rep)?).find_structure(first, second)
}

pub fn find_symmetry(
    solver: &Solver,
    seq: &PartitionSequence,
    rep: &GiantRep,
    d1: &[usize],
    d2: &[usize],
    k1: &StabChain,
) -> Result<Option<SymmetrySplit>> {
    Certifier::new(solver, rep, frame_for(seq, rep)?).find_symmetry(d1, d2, k1)
}

/// `Iso_G(x, y)` for `G` with giant representation `phi`, split through the
/// aggregated certificates. Falls back to the plain kernel-coset union when
/// the split would not shrink the group.
pub(crate) fn certificate_branch(
    solver: &Solver,
    g: &StabChain,
    phi: &GroupHom,
    f: Frame<'_>,
    x: &[Symbol],
    y: &[Symbol],
    t: usize,
) -> Result<Option<Coset>> {
    solver.note("certificates");
    let rep = GiantRep { hom: phi.clone(), k: phi.target_degree() };
    let cert = Certifier::new(solver, &rep, f);
    let pieces: Vec<(StabChain, Perm, Option<StabChain>)> = match cert.aggregate(x, y, t)? {
        Aggregate::Mismatch => return Ok(None),
        Aggregate::Structures { first, second } => {
            cert.find_structure(&first, &second)?.into_iter().map(|(h, r)| (h, r, None)).collect()
        }
        Aggregate::Symmetry { first, second } => match cert.find_symmetry(&first.0, &second.0, &first.1)? {
            None => return Ok(None),
            Some(s) => s.reps.into_iter().map(|r| (s.h.clone(), r, Some(s.k1.clone()))).collect(),
        },
    };
    let order = g.order();
    if pieces.iter().any(|(h, ..)| h.order() == order) {
        return solver.luks_over(g, phi, f, x, y, "certificates-fallback");
    }
    let inner = f.deeper();
    let parts = par::map(&pieces, |(h, r, extra)| {
        let y2 = shift_string(y, r);
        let found = solver.solve(h, inner, x, &y2, None)?;
        Ok(found.map(|c| {
            let sub = match extra {
                Some(k1) => c.subgroup.closure(k1.generators()),
                None => c.subgroup,
            };
            Coset { subgroup: sub, rep: c.rep.then(r) }
        }))
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    coset_union(&parts)
}
