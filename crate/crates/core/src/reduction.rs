//! Primitive-group classification, the two change-of-action reductions
//! (coset augmentation and Johnson unfolding) and the giant-representation
//! finder used by the solver.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::luks::Symbol;
use crate::partition::{action_on_blocks, is_semi_regular, Partition, PartitionSequence};
use crate::perm::{block_closure, induced_action, GroupHom, Perm, StabChain};

/// Largest augmented domain built by the reductions.
pub const OMEGA_CAP: usize = 2_000_000;
const JOHNSON_DOMAIN_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionConfig {
    pub c1: f64,
    pub c2: f64,
    pub socle_cap: u64,
    pub johnson_guard: bool,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig { c1: 1.0, c2: 10.0, socle_cap: 1_000_000, johnson_guard: true }
    }
}

impl ReductionConfig {
    /// `|G| ≤ n^{c1 log d + c2}`.
    pub fn is_small(&self, g: &StabChain, d: usize) -> bool {
        let n = g.degree().max(2) as f64;
        let d = d.max(2) as f64;
        g.log2_order() <= (self.c1 * d.log2() + self.c2) * n.log2() + 1e-9
    }
}

pub fn binom(m: usize, t: usize) -> u128 {
    if t > m {
        return 0;
    }
    let t = t.min(m - t);
    (0..t).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

/// `t`-subsets of `{0..m-1}` in lexicographic order.
pub fn k_subsets(m: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(start: usize, m: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < t - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, t, cur, out);
            cur.pop();
        }
    }
    rec(0, m, t, &mut cur, &mut out);
    out
}

/// `m > 4 log2 C(m, t)`.
pub fn johnson_guard_holds(m: usize, t: usize) -> bool {
    (m as f64) > 4.0 * (binom(m, t) as f64).log2()
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| p % q != 0)
}

/// Subgroup generated by the minimal normal subgroups, by enumeration.
pub fn socle(g: &StabChain, cap: u64) -> Result<StabChain> {
    let n = g.degree();
    if g.is_trivial() {
        return Ok(g.clone());
    }
    let mut done: HashSet<Perm> = HashSet::new();
    let mut closures: Vec<StabChain> = Vec::new();
    for e in g.elements_capped(cap)? {
        if done.contains(&e) || !is_prime(e.order()) {
            continue;
        }
        let mut class = vec![e.clone()];
        done.insert(e);
        let mut i = 0;
        while i < class.len() {
            for s in g.generators() {
                let c = class[i].conjugate_by(s);
                if done.insert(c.clone()) {
                    class.push(c);
                }
            }
            i += 1;
        }
        let mut sub = StabChain::trivial(n);
        for c in &class {
            if !sub.contains(c) {
                sub = sub.closure(std::slice::from_ref(c));
            }
        }
        if !closures.iter().any(|c| c.same_group(&sub)) {
            closures.push(sub);
        }
    }
    let gens: Vec<Perm> = closures
        .iter()
        .filter(|m| !closures.iter().any(|o| o.order() < m.order() && o.is_subgroup_of(m)))
        .flat_map(|m| m.generators().iter().cloned())
        .collect();
    Ok(StabChain::new(n, gens)?)
}

/// A point-to-subset labelling `α ↦ ρ(α) ∈ C([m], t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JohnsonRep {
    pub m: usize,
    pub t: usize,
    pub labels: Vec<Vec<usize>>,
}

impl JohnsonRep {
    fn ranks(&self) -> Result<Vec<usize>> {
        let subsets = k_subsets(self.m, self.t);
        self.labels
            .iter()
            .map(|l| subsets.binary_search(l).map_err(|_| Error::NotJohnson))
            .collect()
    }

    /// `ρ^-1 g ρ` as a permutation of the lexicographically ranked subsets.
    pub fn subset_perm(&self, g: &Perm) -> Result<Perm> {
        let ranks = self.ranks()?;
        let mut img = vec![0; ranks.len()];
        for (a, &r) in ranks.iter().enumerate() {
            img[r] = ranks[g.apply(a)];
        }
        Perm::from_images(img).map_err(|_| Error::NotJohnson)
    }

    /// The permutation of `[m]` inducing `g`.
    pub fn point_perm(&self, g: &Perm) -> Result<Perm> {
        johnson_induced_permutation(&self.subset_perm(g)?, self.m, self.t)
    }

    fn verify(&self, g: &StabChain) -> Result<()> {
        let n = g.degree();
        if self.labels.len() != n || binom(self.m, self.t) != n as u128 {
            return Err(Error::NotJohnson);
        }
        let ranks = self.ranks()?;
        let mut seen = vec![false; n];
        for r in ranks {
            if std::mem::replace(&mut seen[r], true) {
                return Err(Error::NotJohnson);
            }
        }
        let sig = g.generators().iter().map(|h| self.point_perm(h)).collect::<Result<Vec<_>>>().map_err(|_| Error::NotJohnson)?;
        if !StabChain::new(self.m, sig)?.is_giant_at_least_alt() {
            return Err(Error::NotJohnson);
        }
        Ok(())
    }
}

/// The unique `σ ∈ S_m` with `X^γ = X^σ` for all `t`-subsets `X`.
pub fn johnson_induced_permutation(gamma: &Perm, m: usize, t: usize) -> Result<Perm> {
    let subsets = k_subsets(m, t);
    if gamma.degree() != subsets.len() {
        return Err(Error::DomainMismatch { left: gamma.degree(), right: subsets.len() });
    }
    let induces = |s: &Perm| {
        subsets.iter().enumerate().all(|(r, x)| {
            let mut img = s.image_of_set(x);
            img.sort_unstable();
            subsets[gamma.apply(r)] == img
        })
    };
    if m < 7 {
        let found = crate::oracle::filter_bijections(m, &Default::default(), induces)?;
        return match found.len() {
            0 => Err(Error::NotInduced),
            1 => Ok(found.into_iter().next().unwrap()),
            _ => Err(Error::AmbiguousSmallM(m)),
        };
    }
    let mut img = Vec::with_capacity(m);
    for i in 0..m {
        let mut inter: Option<Vec<usize>> = None;
        for (r, x) in subsets.iter().enumerate() {
            if x.binary_search(&i).is_err() {
                continue;
            }
            let y = &subsets[gamma.apply(r)];
            inter = Some(match inter {
                None => y.clone(),
                Some(cur) => cur.into_iter().filter(|p| y.binary_search(p).is_ok()).collect(),
            });
        }
        match inter.as_deref() {
            Some([p]) => img.push(*p),
            _ => return Err(Error::NotInduced),
        }
    }
    let s = Perm::from_images(img).map_err(|_| Error::NotInduced)?;
    if induces(&s) {
        Ok(s)
    } else {
        Err(Error::NotInduced)
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Maximal cliques through each edge, assuming every common neighbourhood
/// splits into at most two cliques with no edges between them.
fn edge_cliques(adj: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let mut out: std::collections::BTreeSet<Vec<usize>> = Default::default();
    for (x, nx) in adj.iter().enumerate() {
        for &y in nx.iter().filter(|&&y| y > x) {
            let common = intersect_sorted(nx, &adj[y]);
            let mut comp = vec![usize::MAX; common.len()];
            let mut parts: Vec<Vec<usize>> = Vec::new();
            for s in 0..common.len() {
                if comp[s] != usize::MAX {
                    continue;
                }
                comp[s] = parts.len();
                let mut part = vec![common[s]];
                let mut stack = vec![s];
                while let Some(u) = stack.pop() {
                    for v in 0..common.len() {
                        if comp[v] == usize::MAX && adj[common[u]].binary_search(&common[v]).is_ok() {
                            comp[v] = parts.len();
                            part.push(common[v]);
                            stack.push(v);
                        }
                    }
                }
                parts.push(part);
            }
            for mut p in parts {
                if !p.iter().all(|&a| p.iter().all(|&b| a == b || adj[a].binary_search(&b).is_ok())) {
                    return None;
                }
                p.push(x);
                p.push(y);
                p.sort_unstable();
                out.insert(p);
            }
        }
    }
    Some(out.into_iter().collect())
}

/// Candidate labellings of a graph assumed isomorphic to `J(m, t)`.
fn johnson_labellings(adj: &[Vec<usize>], m: usize, t: usize) -> Vec<Vec<Vec<usize>>> {
    let n = adj.len();
    if t == 1 {
        return if n == m { vec![(0..m).map(|i| vec![i]).collect()] } else { vec![] };
    }
    let Some(cliques) = edge_cliques(adj) else { return vec![] };
    let star = m - t + 1;
    let sized: Vec<Vec<usize>> = cliques.into_iter().filter(|c| c.len() == star).collect();
    let families: Vec<Vec<Vec<usize>>> = if star != t + 1 {
        vec![sized]
    } else {
        // stars and tops meet in 0 or 2 vertices, so "meet in exactly one"
        // never links the two families
        let share = share_one_graph(n, &sized);
        let mut comp = vec![usize::MAX; sized.len()];
        let mut fams = Vec::new();
        for s in 0..sized.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = fams.len();
            let mut fam = vec![s];
            let mut i = 0;
            while i < fam.len() {
                for &v in &share[fam[i]] {
                    if comp[v] == usize::MAX {
                        comp[v] = fams.len();
                        fam.push(v);
                    }
                }
                i += 1;
            }
            fams.push(fam.into_iter().map(|i| sized[i].clone()).collect());
        }
        fams
    };
    let mut out = Vec::new();
    for fam in families {
        if fam.len() as u128 != binom(m, t - 1) {
            continue;
        }
        let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, c) in fam.iter().enumerate() {
            for &x in c {
                containing[x].push(s);
            }
        }
        if containing.iter().any(|c| c.len() != t) {
            continue;
        }
        let sub = share_one_graph(n, &fam);
        for lower in johnson_labellings(&sub, m, t - 1) {
            let labels: Vec<Vec<usize>> = containing
                .iter()
                .map(|ss| {
                    let mut l: Vec<usize> = ss.iter().flat_map(|&s| lower[s].iter().copied()).collect();
                    l.sort_unstable();
                    l.dedup();
                    l
                })
                .collect();
            if labels.iter().all(|l| l.len() == t) {
                out.push(labels);
            }
        }
    }
    out
}

/// Graph on `sets` joining two sets that share exactly one of the `n` points.
fn share_one_graph(n: usize, sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, c) in sets.iter().enumerate() {
        for &x in c {
            containing[x].push(s);
        }
    }
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for c in &containing {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                *shared.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
    }
    let mut adj = vec![Vec::new(); sets.len()];
    for (&(a, b), &k) in &shared {
        if k == 1 {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj.iter_mut().for_each(|v| v.sort_unstable());
    adj
}

/// Recognize a transitive group as a Johnson action `A_m^(t) ≤ G ≤ S_m^(t)`
/// with `m ≤ d`, `2t ≤ m`. Every candidate is verified before returning.
pub fn johnson_recognize(g: &StabChain, d: usize) -> Result<JohnsonRep> {
    let n = g.degree();
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if n > JOHNSON_DOMAIN_CAP {
        return Err(Error::CapExceeded { order: n.to_string(), cap: JOHNSON_DOMAIN_CAP as u64 });
    }
    let mut candidates = Vec::new();
    let mut t = 1;
    while 2 * t <= d && binom(2 * t, t) <= n as u128 {
        for m in 2 * t..=d {
            match binom(m, t).cmp(&(n as u128)) {
                std::cmp::Ordering::Equal => candidates.push((m, t)),
                std::cmp::Ordering::Greater => break,
                _ => {}
            }
        }
        t += 1;
    }
    if candidates.is_empty() {
        return Err(Error::NotJohnson);
    }
    let rooted = g.with_base_prefix(&[0]);
    let suborbits = g.pointwise_stabilizer(&[0]).orbits();
    for (m, t) in candidates {
        if t == 1 {
            let rep = JohnsonRep { m, t, labels: (0..n).map(|i| vec![i]).collect() };
            if rep.verify(g).is_ok() {
                return Ok(rep);
            }
            continue;
        }
        for s in suborbits.blocks().iter().filter(|s| s.len() == t * (m - t)) {
            let adj: Vec<Vec<usize>> = (0..n)
                .map(|a| {
                    let u = rooted.transversal(0, a).expect("transitive");
                    u.image_of_set(s)
                })
                .collect();
            if adj.iter().enumerate().any(|(a, na)| na.iter().any(|&b| adj[b].binary_search(&a).is_err())) {
                continue;
            }
            for labels in johnson_labellings(&adj, m, t) {
                let rep = JohnsonRep { m, t, labels };
                if rep.verify(g).is_ok() {
                    return Ok(rep);
                }
            }
        }
    }
    Err(Error::NotJohnson)
}

/// Maximal-block tower of a transitive group, coarse to fine, starting
/// below `{Ω}` and ending in singletons.
fn maximal_block_tower(g: &StabChain) -> Result<Vec<Partition>> {
    let n = g.degree();
    let mut out = Vec::new();
    let mut block: Vec<usize> = (0..n).collect();
    while block.len() > 1 {
        let stab = g.setwise_stabilizer(&block).restrict(&block)?;
        let sys = stab.min_block_system()?;
        let sub: Vec<usize> = sys.block_of(0).iter().map(|&i| block[i]).collect();
        out.push(block_closure(n, g.generators(), &sub));
        block = sub;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum PrimitiveClassification {
    Small,
    JohnsonTower {
        socle: StabChain,
        /// `{Ω} ≻ P_1 ≻ … ≻ singletons`, all socle-invariant
        chain: Vec<Partition>,
        /// recognition of each quotient at the block containing point 0
        levels: Vec<JohnsonRep>,
        m: usize,
        t: usize,
    },
}

impl PrimitiveClassification {
    pub fn is_small(&self) -> bool {
        matches!(self, PrimitiveClassification::Small)
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            PrimitiveClassification::Small => json!({"kind": "SMALL"}),
            PrimitiveClassification::JohnsonTower { socle, chain, levels, m, t } => json!({
                "kind": "JOHNSON_TOWER",
                "socle_order": socle.order().to_string(),
                "m": m,
                "t": t,
                "levels": levels.iter().map(|l| json!({"m": l.m, "t": l.t})).collect::<Vec<_>>(),
                "chain": chain.iter().map(|p| p.to_json_value()).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Quotient `N_B^{chain[i][B]}` at the block `B` of `chain[i-1]` holding point 0.
fn level_quotient(g: &StabChain, chain: &[Partition], i: usize) -> Result<StabChain> {
    let b = &chain[i - 1].blocks()[0];
    let gb = g.setwise_stabilizer(b);
    action_on_blocks(&gb, &chain[i].induced(b)?)
}

pub fn classify_primitive(g: &StabChain, d: usize, cfg: &ReductionConfig) -> Result<PrimitiveClassification> {
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if !g.min_block_system()?.is_discrete() {
        return Err(Error::Precondition("group is not primitive".into()));
    }
    if cfg.is_small(g, d) {
        return Ok(PrimitiveClassification::Small);
    }
    let fail = |e: Error| Error::ClassificationFailed(e.to_string());
    let soc = socle(g, cfg.socle_cap).map_err(fail)?;
    let n = g.degree();
    let mut chain = vec![Partition::trivial(n)];
    chain.extend(maximal_block_tower(&soc).map_err(fail)?);
    let mut levels = Vec::new();
    for i in 1..chain.len() {
        let q = level_quotient(&soc, &chain, i).map_err(fail)?;
        let rep = johnson_recognize(&q, d).map_err(fail)?;
        if cfg.johnson_guard && !johnson_guard_holds(rep.m, rep.t) {
            return Ok(PrimitiveClassification::Small);
        }
        levels.push(rep);
    }
    let (m, t) = (levels[0].m, levels[0].t);
    Ok(PrimitiveClassification::JohnsonTower { socle: soc, chain, levels, m, t })
}

/// `N ⊴ P` with `ψ: N → S_k` onto a giant and `ker ψ = N_(blocks)`.
#[derive(Clone, Debug)]
pub struct GiantRepresentation {
    pub n: StabChain,
    pub blocks: Partition,
    pub psi: GroupHom,
    pub k: usize,
}

#[derive(Clone, Debug)]
pub enum GiantSearch {
    TooSmall,
    Found(GiantRepresentation),
}

fn check_giant_rep(p: &StabChain, rep: &GiantRepresentation, d: usize) -> Result<()> {
    let bad = |m: &str| Err(Error::RecognitionFailed(m.to_string()));
    if p.order() > rep.n.order() * num_bigint::BigUint::from(d.max(1)) {
        return bad("index of N exceeds d");
    }
    if !p.generators().iter().all(|g| rep.blocks.is_invariant(g)) {
        return bad("partition is not invariant");
    }
    let ker = rep.psi.kernel();
    let fix: Vec<usize> = rep.blocks.blocks().iter().filter(|b| b.len() == 1).map(|b| b[0]).collect();
    let stab = if rep.blocks.is_discrete() {
        rep.n.pointwise_stabilizer(&fix)
    } else {
        let hom = induced_action(&rep.n, &rep.blocks)?;
        hom.kernel()
    };
    if !ker.same_group(&stab) {
        return bad("kernel differs from the block stabilizer");
    }
    if !rep.psi.image_group().is_giant_at_least_alt() {
        return bad("image is not a giant");
    }
    Ok(())
}

/// Search order: natural giant action, then a Johnson action of the socle.
pub fn compute_giant_representation(p: &StabChain, d: usize, cfg: &ReductionConfig) -> Result<GiantSearch> {
    if !p.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let dl = (d.max(2) as f64).log2();
    if p.log2_order() + 1e-9 < (1.0 + dl) * dl {
        return Ok(GiantSearch::TooSmall);
    }
    let k = p.degree();
    let rep = if p.is_giant_at_least_alt() {
        let psi = GroupHom::trusted(p.clone(), k, p.generators().to_vec());
        GiantRepresentation { n: p.clone(), blocks: Partition::discrete(k), psi, k }
    } else {
        let fail = |e: Error| Error::RecognitionFailed(e.to_string());
        let soc = socle(p, cfg.socle_cap).map_err(fail)?;
        let j = johnson_recognize(&soc, d).map_err(fail)?;
        let imgs = soc.generators().iter().map(|g| j.point_perm(g)).collect::<Result<Vec<_>>>().map_err(fail)?;
        let psi = GroupHom::new(soc.clone(), j.m, imgs).map_err(fail)?;
        GiantRepresentation { n: soc, blocks: Partition::discrete(k), psi, k: j.m }
    };
    check_giant_rep(p, &rep, d)?;
    Ok(GiantSearch::Found(rep))
}

/// Per-level shape of a transitive group's partition chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LevelKind {
    SemiRegular,
    Johnson { m: usize, t: usize, guard: bool },
    Other,
}

pub fn level_kinds(seq: &PartitionSequence) -> Result<Vec<LevelKind>> {
    if !seq.group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    (1..seq.chain.len()).map(|i| level_kind(&seq.group, &seq.chain, i, seq.d).map(|(k, _)| k)).collect()
}

fn level_kind(g: &StabChain, chain: &[Partition], i: usize, d: usize) -> Result<(LevelKind, Option<JohnsonRep>)> {
    let q = level_quotient(g, chain, i)?;
    if is_semi_regular(&q) {
        return Ok((LevelKind::SemiRegular, None));
    }
    Ok(match johnson_recognize(&q, d) {
        Ok(r) => (LevelKind::Johnson { m: r.m, t: r.t, guard: johnson_guard_holds(r.m, r.t) }, Some(r)),
        Err(_) => (LevelKind::Other, None),
    })
}

/// Elements `σ_{1→i}` mapping block 0 of `blocks` onto block `i`, chosen
/// from the transversal of the block action.
fn block_aligners(g: &StabChain, blocks: &Partition) -> Result<Vec<Perm>> {
    let n = g.degree();
    if blocks.num_blocks() == 1 {
        return Ok(vec![Perm::identity(n)]);
    }
    let hom = induced_action(g, blocks)?;
    let rooted = hom.image_group().with_base_prefix(&[0]);
    (0..blocks.num_blocks())
        .map(|i| {
            if i == 0 {
                return Ok(Perm::identity(n));
            }
            let u = rooted.transversal(0, i).ok_or(Error::NotTransitive)?;
            hom.preimage(u)?.ok_or(Error::NotSubgroup)
        })
        .collect()
}

#[derive(Clone, Debug)]
struct StageOne {
    n: usize,
    top_idx: Vec<usize>,
    sub: Partition,
    sub_idx: Vec<usize>,
    first_subs: Vec<usize>,
    pos_in_first: Vec<usize>,
    sigma: Vec<Perm>,
    sigma_inv: Vec<Perm>,
    coset_of: HashMap<Perm, usize>,
    reps: Vec<Perm>,
    kept: Vec<usize>,
    pos: HashMap<usize, usize>,
}

impl StageOne {
    /// `σ_{1→i} g σ_{1→j}^-1` acting on the sub-blocks of the first block.
    fn c_bar(&self, g: &Perm, i: usize, j: usize) -> Perm {
        let full = self.sigma[i].then(g).then(&self.sigma_inv[j]);
        let img = self
            .first_subs
            .iter()
            .map(|&s| self.pos_in_first[self.sub_idx[full.apply(self.sub.blocks()[s][0])]])
            .collect();
        Perm::from_images(img).expect("block action")
    }

    fn image_global(&self, g: &Perm, cache: &mut HashMap<usize, Perm>, p: usize) -> usize {
        let (c, a) = (p / self.n, p % self.n);
        let b = g.apply(a);
        let (i, j) = (self.top_idx[a], self.top_idx[b]);
        let cb = cache.entry(i).or_insert_with(|| self.c_bar(g, i, j));
        let h = self.reps[c].then(cb);
        self.coset_of[&h] * self.n + b
    }

    fn full_lift(&self, g: &Perm, points: &[usize]) -> Vec<usize> {
        let mut cache = HashMap::new();
        points.iter().map(|&p| self.image_global(g, &mut cache, p)).collect()
    }

    fn lift(&self, g: &Perm) -> Result<Perm> {
        let imgs = self.full_lift(g, &self.kept);
        let img = imgs.iter().map(|q| self.pos.get(q).copied().ok_or(Error::NotInvariant)).collect::<Result<Vec<_>>>()?;
        Perm::from_images(img)
    }

    fn origin(&self, p: usize) -> usize {
        self.kept[p] % self.n
    }

    fn label(&self, p: usize) -> String {
        format!("(N{}, {})", self.kept[p] / self.n, self.kept[p] % self.n + 1)
    }
}

#[derive(Clone, Debug)]
struct StageTwo {
    graph: UnfoldGraph,
    branches: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl StageTwo {
    fn lift(&self, g: &Perm) -> Result<Perm> {
        let map = self.graph.vertex_image(g)?;
        let img = self
            .branches
            .iter()
            .map(|b| {
                let nb: Vec<usize> = b.iter().map(|&v| map[v]).collect();
                self.index.get(&nb).copied().ok_or(Error::NotInvariant)
            })
            .collect::<Result<Vec<_>>>()?;
        Perm::from_images(img)
    }

    fn origin(&self, p: usize) -> usize {
        match &self.graph.vertices[*self.branches[p].last().unwrap()] {
            Vertex::Block { block, .. } => block[0],
            Vertex::Lattice { .. } => unreachable!("branches end in singleton blocks"),
        }
    }
}

#[derive(Clone, Debug)]
enum Stage {
    One(Box<StageOne>),
    Two(Box<StageTwo>),
}

impl Stage {
    fn lift(&self, g: &Perm) -> Result<Perm> {
        match self {
            Stage::One(s) => s.lift(g),
            Stage::Two(s) => s.lift(g),
        }
    }

    fn origin(&self, p: usize) -> usize {
        match self {
            Stage::One(s) => s.origin(p),
            Stage::Two(s) => s.origin(p),
        }
    }
}

/// Result of a change of action: `x ≅_G y ⇔ x* ≅_{G*} y*`.
#[derive(Clone, Debug)]
pub struct AugmentedInstance {
    /// original point behind each new point
    pub origin: Vec<usize>,
    pub labels: Vec<String>,
    pub group: StabChain,
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub seq: PartitionSequence,
    source_degree: usize,
    stages: Vec<Stage>,
}

impl AugmentedInstance {
    pub fn degree(&self) -> usize {
        self.origin.len()
    }

    /// `g ↦ g*`.
    pub fn lift(&self, g: &Perm) -> Result<Perm> {
        if g.degree() != self.source_degree {
            return Err(Error::DomainMismatch { left: self.source_degree, right: g.degree() });
        }
        let mut cur = g.clone();
        for s in &self.stages {
            cur = s.lift(&cur)?;
        }
        Ok(cur)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "n": self.degree(),
            "origin": self.origin.iter().map(|p| p + 1).collect::<Vec<_>>(),
            "labels": self.labels,
            "group": crate::perm::GeneratorList::from(&self.group).to_json_value(),
            "x": self.x,
            "y": self.y,
            "sequence": self.seq.to_json_value(),
        })
    }

    fn identity(seq: &PartitionSequence, x: &[Symbol], y: &[Symbol]) -> Self {
        let n = seq.degree();
        AugmentedInstance {
            origin: (0..n).collect(),
            labels: (1..=n).map(|p| p.to_string()).collect(),
            group: seq.group.clone(),
            x: x.to_vec(),
            y: y.to_vec(),
            seq: seq.clone(),
            source_degree: n,
            stages: Vec::new(),
        }
    }

    fn push(self, stage: Stage, group: StabChain, chain: Vec<Partition>, labels: Vec<String>) -> Self {
        let origin: Vec<usize> = (0..group.degree()).map(|p| self.origin[stage.origin(p)]).collect();
        let pick = |s: &[Symbol]| (0..group.degree()).map(|p| s[stage.origin(p)]).collect::<Vec<_>>();
        let (x, y) = (pick(&self.x), pick(&self.y));
        let d = self.seq.d;
        let mut stages = self.stages;
        stages.push(stage);
        AugmentedInstance {
            origin,
            labels,
            seq: PartitionSequence { group: group.clone(), chain, d },
            group,
            x,
            y,
            source_degree: self.source_degree,
            stages,
        }
    }
}

/// Group points by a key into a partition, blocks ordered by minimum.
fn partition_by<K: std::hash::Hash + Eq>(n: usize, key: impl Fn(usize) -> K) -> Partition {
    let mut map: HashMap<K, usize> = HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for p in 0..n {
        let k = key(p);
        let id = *map.entry(k).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[id].push(p);
    }
    Partition::new(n, blocks).expect("covers the domain")
}

fn dedup_chain(chain: Vec<Partition>) -> Vec<Partition> {
    let mut out: Vec<Partition> = Vec::new();
    for p in chain {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

/// Longest prefix of the chain whose levels are semi-regular or guarded Johnson.
fn good_prefix(g: &StabChain, chain: &[Partition], d: usize, guard: bool) -> Result<usize> {
    let mut len = 1;
    while len < chain.len() {
        let (kind, _) = level_kind(g, chain, len, d)?;
        let ok = match kind {
            LevelKind::SemiRegular => true,
            LevelKind::Johnson { guard: g, .. } => g || !guard,
            LevelKind::Other => false,
        };
        if !ok {
            break;
        }
        len += 1;
    }
    Ok(len)
}

/// Coset augmentation: refine the chain until every level is semi-regular or
/// a Johnson action, restricting to one orbit after each step.
pub fn reduce_step_one(seq: &PartitionSequence, x: &[Symbol], y: &[Symbol], cfg: &ReductionConfig) -> Result<AugmentedInstance> {
    let n = seq.degree();
    if x.len() != n || y.len() != n {
        return Err(Error::BadString);
    }
    if !seq.group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    seq.check_structure()?;
    let keep = good_prefix(&seq.group, &seq.chain, seq.d, cfg.johnson_guard)?;
    let mut inst = AugmentedInstance::identity(seq, x, y);
    inst.seq.chain.truncate(keep);
    if keep == seq.chain.len() {
        return Ok(inst);
    }
    loop {
        let prefix = inst.seq.chain.clone();
        if prefix.last().is_some_and(|p| p.is_discrete()) {
            return Ok(inst);
        }
        let (stage, group, chain, labels) = step_one_stage(&inst.group, &prefix, inst.seq.d, cfg)?;
        inst = inst.push(Stage::One(Box::new(stage)), group, chain, labels);
    }
}

fn step_one_stage(
    g: &StabChain,
    prefix: &[Partition],
    d: usize,
    cfg: &ReductionConfig,
) -> Result<(StageOne, StabChain, Vec<Partition>, Vec<String>)> {
    let n = g.degree();
    let top = prefix.last().unwrap().clone();
    let top_idx = top.index_map();
    let b1 = top.blocks()[0].clone();
    // B_{ℓ+1}: images of a maximal block inside B_1
    let stab = g.setwise_stabilizer(&b1);
    let sys = stab.restrict(&b1)?.min_block_system()?;
    let inner: Vec<usize> = sys.block_of(0).iter().map(|&i| b1[i]).collect();
    let sub = block_closure(n, g.generators(), &inner);
    let sub_idx = sub.index_map();
    let first_subs: Vec<usize> = (0..sub.num_blocks()).filter(|&s| top_idx[sub.blocks()[s][0]] == 0).collect();
    let mut pos_in_first = vec![usize::MAX; sub.num_blocks()];
    for (p, &s) in first_subs.iter().enumerate() {
        pos_in_first[s] = p;
    }
    let h = action_on_blocks(&stab, &sub.induced(&b1)?)?;
    let class = classify_primitive(&h, d, cfg)?;
    let nsub = match &class {
        PrimitiveClassification::Small => StabChain::trivial(h.degree()),
        PrimitiveClassification::JohnsonTower { socle, .. } => socle.clone(),
    };
    // cosets N h in H
    let mut coset_of: HashMap<Perm, usize> = HashMap::new();
    let mut reps = Vec::new();
    let n_elems: Vec<Perm> = nsub.elements()?.collect();
    for e in h.elements()? {
        if coset_of.contains_key(&e) {
            continue;
        }
        let id = reps.len();
        for m in &n_elems {
            coset_of.insert(m.then(&e), id);
        }
        reps.push(e);
    }
    let total = reps.len() * n;
    if total > OMEGA_CAP {
        return Err(Error::CapExceeded { order: total.to_string(), cap: OMEGA_CAP as u64 });
    }
    let sigma = block_aligners(g, &top)?;
    let sigma_inv = sigma.iter().map(|s| s.inverse()).collect();
    let mut stage = StageOne {
        n,
        top_idx,
        sub,
        sub_idx,
        first_subs,
        pos_in_first,
        sigma,
        sigma_inv,
        coset_of,
        reps,
        kept: Vec::new(),
        pos: HashMap::new(),
    };
    // orbit of (N, point 0) under the lifted generators
    let start = stage.coset_of[&Perm::identity(h.degree())] * n;
    let mut seen: HashSet<usize> = HashSet::from([start]);
    let mut orbit = vec![start];
    let mut i = 0;
    while i < orbit.len() {
        let p = orbit[i];
        i += 1;
        for s in g.generators() {
            let q = stage.full_lift(s, &[p])[0];
            if seen.insert(q) {
                orbit.push(q);
            }
        }
    }
    orbit.sort_unstable();
    stage.pos = orbit.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    stage.kept = orbit;
    let big_n = stage.kept.len();
    let gens = g.generators().iter().map(|s| stage.lift(s)).collect::<Result<Vec<_>>>()?;
    let order = g.order();
    let group = StabChain::build(big_n, gens, &[], Some(&order));

    let coset = |p: usize| stage.kept[p] / n;
    let alpha = |p: usize| stage.kept[p] % n;
    let mut chain: Vec<Partition> = prefix
        .iter()
        .map(|part| {
            let idx = part.index_map();
            partition_by(big_n, |p| idx[alpha(p)])
        })
        .collect();
    match &class {
        PrimitiveClassification::Small => {
            chain.push(partition_by(big_n, |p| (coset(p), stage.sub_idx[alpha(p)])));
        }
        PrimitiveClassification::JohnsonTower { chain: tower, .. } => {
            chain.push(partition_by(big_n, |p| (coset(p), stage.top_idx[alpha(p)])));
            // positions are pulled back through the coset representative; the
            // tower is only socle-invariant, so labelling by raw position is not
            // preserved by elements acting outside the socle
            let rep_inv: Vec<Perm> = stage.reps.iter().map(Perm::inverse).collect();
            for part in &tower[1..] {
                let idx = part.index_map();
                chain.push(partition_by(big_n, |p| {
                    let a = alpha(p);
                    let j = stage.top_idx[a];
                    let back = stage.sigma_inv[j].apply(a);
                    let s = stage.pos_in_first[stage.sub_idx[back]];
                    (coset(p), j, idx[rep_inv[coset(p)].apply(s)])
                }));
            }
        }
    }
    let labels = (0..big_n).map(|p| stage.label(p)).collect();
    Ok((stage, group, dedup_chain(chain), labels))
}

/// Vertex of the unfolding graph. Points and subsets are 0-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Vertex {
    Block { level: usize, block: Vec<usize> },
    Lattice { level: usize, parent: Vec<usize>, set: Vec<usize> },
}

impl Vertex {
    fn dot_label(&self) -> String {
        let one = |v: &[usize]| v.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(",");
        match self {
            Vertex::Block { block, .. } => format!("{{{}}}", one(block)),
            Vertex::Lattice { level, parent, set } => format!("({level},{{{}}},{{{}}})", one(parent), one(set)),
        }
    }
}

/// A Johnson level `i`: `labels[b]` is `ρ` of block `b` of `chain[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JohnsonLevel {
    pub level: usize,
    pub m: usize,
    pub t: usize,
    pub labels: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct UnfoldGraph {
    pub vertices: Vec<Vertex>,
    /// out-neighbours, sorted by vertex order
    pub children: Vec<Vec<usize>>,
    pub root: usize,
    chain: Vec<Partition>,
    levels: BTreeMap<usize, JohnsonLevel>,
    ids: HashMap<Vertex, usize>,
}

pub fn build_unfold_graph(chain: &[Partition], levels: &[JohnsonLevel]) -> Result<UnfoldGraph> {
    let Some(first) = chain.first() else { return Err(Error::StructurallyInvalid("empty chain".into())) };
    let n = first.degree();
    let by_level: BTreeMap<usize, JohnsonLevel> = levels.iter().map(|l| (l.level, l.clone())).collect();
    for l in levels {
        if l.level == 0 || l.level >= chain.len() || l.labels.len() != chain[l.level].num_blocks() {
            return Err(Error::Precondition(format!("bad Johnson level {}", l.level)));
        }
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    for (i, p) in chain.iter().enumerate() {
        vertices.extend(p.blocks().iter().map(|b| Vertex::Block { level: i, block: b.clone() }));
    }
    for (&i, l) in &by_level {
        for parent in chain[i - 1].blocks() {
            for size in 0..=l.t {
                for set in k_subsets(l.m, size) {
                    vertices.push(Vertex::Lattice { level: i, parent: parent.clone(), set });
                }
            }
        }
    }
    vertices.sort();
    let ids: HashMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for i in 1..chain.len() {
        let parent_idx = chain[i - 1].index_map();
        for (b, blk) in chain[i].blocks().iter().enumerate() {
            let parent = &chain[i - 1].blocks()[parent_idx[blk[0]]];
            let child = ids[&Vertex::Block { level: i, block: blk.clone() }];
            match by_level.get(&i) {
                None => children[ids[&Vertex::Block { level: i - 1, block: parent.clone() }]].push(child),
                Some(l) => {
                    let from = Vertex::Lattice { level: i, parent: parent.clone(), set: l.labels[b].clone() };
                    let id = *ids.get(&from).ok_or_else(|| Error::Precondition("label is not a t-subset".into()))?;
                    children[id].push(child);
                }
            }
        }
        if let Some(l) = by_level.get(&i) {
            for parent in chain[i - 1].blocks() {
                let pv = ids[&Vertex::Block { level: i - 1, block: parent.clone() }];
                children[pv].push(ids[&Vertex::Lattice { level: i, parent: parent.clone(), set: vec![] }]);
                for size in 0..l.t {
                    for set in k_subsets(l.m, size) {
                        let from = ids[&Vertex::Lattice { level: i, parent: parent.clone(), set: set.clone() }];
                        for a in (0..l.m).filter(|a| set.binary_search(a).is_err()) {
                            let mut s2 = set.clone();
                            s2.push(a);
                            s2.sort_unstable();
                            children[from].push(ids[&Vertex::Lattice { level: i, parent: parent.clone(), set: s2 }]);
                        }
                    }
                }
            }
        }
    }
    children.iter_mut().for_each(|c| c.sort_unstable());
    let root = ids[&Vertex::Block { level: 0, block: (0..n).collect() }];
    Ok(UnfoldGraph { vertices, children, root, chain: chain.to_vec(), levels: by_level, ids })
}

impl UnfoldGraph {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.children.iter().enumerate().flat_map(|(u, cs)| cs.iter().map(move |&v| (u, v))).collect()
    }

    pub fn num_edges(&self) -> usize {
        self.children.iter().map(|c| c.len()).sum()
    }

    pub fn vertex_id(&self, v: &Vertex) -> Option<usize> {
        self.ids.get(v).copied()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        self.children.iter().flatten().for_each(|&v| deg[v] += 1);
        deg
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph unfold {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{}\"];", v.dot_label());
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  v{u} -> v{v};");
        }
        s.push_str("}\n");
        s
    }

    /// `g^Γ` as a map on vertex ids.
    pub fn vertex_image(&self, g: &Perm) -> Result<Vec<usize>> {
        let idx: Vec<Vec<usize>> = self.chain.iter().map(|p| p.index_map()).collect();
        let block_img = |level: usize, blk: &[usize]| -> Vec<usize> { self.chain[level].blocks()[idx[level][g.apply(blk[0])]].clone() };
        let mut pis: HashMap<(usize, Vec<usize>), Perm> = HashMap::new();
        let mut out = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let w = match v {
                Vertex::Block { level, block } => Vertex::Block { level: *level, block: block_img(*level, block) },
                Vertex::Lattice { level, parent, set } => {
                    let target = block_img(level - 1, parent);
                    let key = (*level, parent.clone());
                    if !pis.contains_key(&key) {
                        let pi = self.lattice_perm(*level, parent, g, &idx[*level])?;
                        pis.insert(key.clone(), pi);
                    }
                    let pi = &pis[&key];
                    Vertex::Lattice { level: *level, parent: target, set: pi.image_of_set(set) }
                }
            };
            out.push(*self.ids.get(&w).ok_or(Error::NotInvariant)?);
        }
        Ok(out)
    }

    /// `π ∈ S_m` inducing `Y ↦ ρ_{B^g}((ρ_B^-1(Y))^g)`.
    fn lattice_perm(&self, level: usize, parent: &[usize], g: &Perm, idx: &[usize]) -> Result<Perm> {
        let l = &self.levels[&level];
        let subsets = k_subsets(l.m, l.t);
        let part = &self.chain[level];
        let mut img = vec![usize::MAX; subsets.len()];
        for (b, blk) in part.blocks().iter().enumerate() {
            if parent.binary_search(&blk[0]).is_err() {
                continue;
            }
            let r = subsets.binary_search(&l.labels[b]).map_err(|_| Error::NotInduced)?;
            let r2 = subsets.binary_search(&l.labels[idx[g.apply(blk[0])]]).map_err(|_| Error::NotInduced)?;
            img[r] = r2;
        }
        let f = Perm::from_images(img).map_err(|_| Error::NotInduced)?;
        johnson_induced_permutation(&f, l.m, l.t)
    }

    pub fn maximal_branches(&self) -> Vec<Vec<usize>> {
        maximal_branches(self)
    }
}

/// Root-to-sink paths of maximal length, in depth-first order over sorted children.
pub fn maximal_branches(g: &UnfoldGraph) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut path = vec![g.root];
    fn dfs(g: &UnfoldGraph, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if g.children[v].is_empty() {
            out.push(path.clone());
            return;
        }
        for &c in &g.children[v] {
            path.push(c);
            dfs(g, path, out);
            path.pop();
        }
    }
    dfs(g, &mut path, &mut out);
    let longest = out.iter().map(|p| p.len()).max().unwrap_or(0);
    out.retain(|p| p.len() == longest);
    out
}

/// Johnson unfolding: replace each Johnson level by its subset lattice and
/// act on maximal branches; the result is almost d-ary.
pub fn reduce_step_two(seq: &PartitionSequence, x: &[Symbol], y: &[Symbol]) -> Result<AugmentedInstance> {
    let n = seq.degree();
    if x.len() != n || y.len() != n {
        return Err(Error::BadString);
    }
    let g = &seq.group;
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    seq.check_structure()?;
    let mut levels = Vec::new();
    for i in 1..seq.chain.len() {
        match level_kind(g, &seq.chain, i, seq.d)? {
            (LevelKind::SemiRegular, _) => {}
            (LevelKind::Johnson { .. }, Some(rep)) => levels.push(transport_labels(g, &seq.chain, i, &rep)?),
            _ => return Err(Error::Precondition(format!("level {i} is neither semi-regular nor a Johnson action"))),
        }
    }
    let graph = build_unfold_graph(&seq.chain, &levels)?;
    let branches = maximal_branches(&graph);
    if branches.len() > OMEGA_CAP {
        return Err(Error::CapExceeded { order: branches.len().to_string(), cap: OMEGA_CAP as u64 });
    }
    let index: HashMap<Vec<usize>, usize> = branches.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    let depth = branches.first().map(|b| b.len()).unwrap_or(1);
    let stage = StageTwo { graph, branches, index };
    let big_n = stage.branches.len();
    let gens = g.generators().iter().map(|s| stage.lift(s)).collect::<Result<Vec<_>>>()?;
    let order = g.order();
    let group = StabChain::build(big_n, gens, &[], Some(&order));
    let chain: Vec<Partition> = (0..depth).map(|k| partition_by(big_n, |p| stage.branches[p][..=k].to_vec())).collect();
    let labels = (0..big_n)
        .map(|p| stage.branches[p].iter().map(|&v| stage.graph.vertices[v].dot_label()).collect::<Vec<_>>().join(" "))
        .collect();
    let inst = AugmentedInstance::identity(seq, x, y);
    Ok(inst.push(Stage::Two(Box::new(stage)), group, dedup_chain(chain), labels))
}

/// `ρ` for every block of `chain[i]`, transported from the block holding
/// point 0 by the aligning elements so that every induced map is a point
/// permutation.
fn transport_labels(g: &StabChain, chain: &[Partition], i: usize, rep: &JohnsonRep) -> Result<JohnsonLevel> {
    let top = &chain[i - 1];
    let part = &chain[i];
    let sigma = block_aligners(g, top)?;
    let top_idx = top.index_map();
    let idx = part.index_map();
    let b1 = &top.blocks()[0];
    let local: Vec<usize> = part.induced(b1)?.blocks().iter().map(|b| idx[b[0]]).collect();
    let mut pos = vec![usize::MAX; part.num_blocks()];
    for (p, &s) in local.iter().enumerate() {
        pos[s] = p;
    }
    let labels = part
        .blocks()
        .iter()
        .map(|blk| {
            let a = blk[0];
            let back = sigma[top_idx[a]].inverse().apply(a);
            rep.labels[pos[idx[back]]].clone()
        })
        .collect();
    Ok(JohnsonLevel { level: i, m: rep.m, t: rep.t, labels })
}

/// Both steps: coset augmentation, then Johnson unfolding.
pub fn reduce_full(seq: &PartitionSequence, x: &[Symbol], y: &[Symbol], cfg: &ReductionConfig) -> Result<AugmentedInstance> {
    let one = reduce_step_one(seq, x, y, cfg)?;
    let two = reduce_step_two(&one.seq, &one.x, &one.y)?;
    let mut stages = one.stages;
    stages.extend(two.stages);
    Ok(AugmentedInstance {
        origin: two.origin.iter().map(|&p| one.origin[p]).collect(),
        source_degree: one.source_degree,
        stages,
        ..two
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Perm {
        Perm::parse(n, s).unwrap()
    }

    /// `S_m` or `A_m` acting on `t`-subsets.
    pub(crate) fn johnson_group(m: usize, t: usize, alt: bool) -> StabChain {
        let subsets = k_subsets(m, t);
        let base = if alt { StabChain::alternating(m) } else { StabChain::symmetric(m) };
        let gens = base
            .generators()
            .iter()
            .map(|g| {
                let img = subsets
                    .iter()
                    .map(|x| {
                        let mut y = g.image_of_set(x);
                        y.sort_unstable();
                        subsets.binary_search(&y).unwrap()
                    })
                    .collect();
                Perm::from_images(img).unwrap()
            })
            .collect();
        StabChain::new(subsets.len(), gens).unwrap()
    }

    #[test]
    fn socle_examples() {
        assert_eq!(socle(&StabChain::alternating(5), 1_000_000).unwrap().order_u64(), Some(60));
        assert_eq!(socle(&StabChain::symmetric(4), 1_000_000).unwrap().order_u64(), Some(4));
    }

    #[test]
    fn recognize_pairs_of_five() {
        let g = johnson_group(5, 2, true);
        let r = johnson_recognize(&g, 5).unwrap();
        assert_eq!((r.m, r.t), (5, 2));
        let s4 = johnson_recognize(&StabChain::symmetric(4), 4).unwrap();
        assert_eq!((s4.m, s4.t), (4, 1));
    }

    #[test]
    fn dihedral_is_not_johnson() {
        let d10 = StabChain::new(10, vec![p(10, "(1 2 3 4 5 6 7 8 9 10)"), p(10, "(2 10)(3 9)(4 8)(5 7)")]).unwrap();
        assert_eq!(johnson_recognize(&d10, 10).unwrap_err(), Error::NotJohnson);
    }

    #[test]
    fn induced_permutation_roundtrip() {
        let rep = JohnsonRep { m: 7, t: 2, labels: k_subsets(7, 2) };
        let s = p(7, "(1 2 3)");
        let g = johnson_group(7, 2, false);
        let gamma = {
            let subsets = k_subsets(7, 2);
            let img = subsets.iter().map(|x| subsets.binary_search(&s.image_of_set(x)).unwrap()).collect();
            Perm::from_images(img).unwrap()
        };
        assert!(g.contains(&gamma));
        assert_eq!(rep.point_perm(&gamma).unwrap(), s);
        assert_eq!(johnson_induced_permutation(&Perm::identity(21), 7, 2).unwrap(), Perm::identity(7));
    }

    #[test]
    fn middle_layer_recognition() {
        // m = 2t: stars and tops have the same size
        let g = johnson_group(6, 3, true);
        let r = johnson_recognize(&g, 6).unwrap();
        assert_eq!((r.m, r.t), (6, 3));
    }

    #[test]
    fn classify_small_cases() {
        let cfg = ReductionConfig::default();
        assert!(classify_primitive(&StabChain::cyclic(5), 5, &cfg).unwrap().is_small());
        assert!(classify_primitive(&johnson_group(5, 2, true), 5, &cfg).unwrap().is_small());
    }

    #[test]
    fn giant_representation_cases() {
        let cfg = ReductionConfig::default();
        assert!(matches!(
            compute_giant_representation(&johnson_group(5, 2, false), 10, &cfg).unwrap(),
            GiantSearch::TooSmall
        ));
        match compute_giant_representation(&StabChain::alternating(9), 9, &cfg).unwrap() {
            GiantSearch::Found(r) => assert_eq!(r.k, 9),
            GiantSearch::TooSmall => panic!("A_9 is above the threshold"),
        }
    }
}
