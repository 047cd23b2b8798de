//! String isomorphism over permutation groups: windowed cosets, orbit-by-orbit
//! processing, Luks reduction over invariant partitions, and the recursion
//! steered by an almost d-ary sequence.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::par;
use crate::partition::{is_semi_regular, restrict_chain, Partition, PartitionSequence};
use crate::perm::{action_on_set, induced_action, Coset, GeneratorList, GroupHom, Perm, StabChain, ENUM_CAP};
use crate::certs::{DefaultStructureOracle, StructureOracle};
use crate::reduction::{compute_giant_representation, GiantSearch, ReductionConfig};

pub type Symbol = u32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// groups up to this order are solved by enumeration
    pub brute_cap: u64,
    pub transversal_cap: u64,
    /// largest `k` handled by the certificate machinery
    pub d_cap: usize,
    pub c1: f64,
    pub c2: f64,
    pub socle_cap: u64,
    /// enforce `m > 4 log C(m,t)` before accepting a Johnson level
    pub johnson_guard: bool,
    /// Test hook: use this `t` for certificates and take the certificate
    /// branch whenever `k > t`. Violates the size hypothesis of the
    /// certificate lemmas; never set in theorem-level checks.
    pub guard_override: Option<usize>,
}

impl SolverConfig {
    pub fn reduction(&self) -> ReductionConfig {
        ReductionConfig { c1: self.c1, c2: self.c2, socle_cap: self.socle_cap, johnson_guard: self.johnson_guard }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            brute_cap: 10_000,
            transversal_cap: ENUM_CAP,
            d_cap: 24,
            c1: 1.0,
            c2: 10.0,
            socle_cap: 1_000_000,
            johnson_guard: true,
            guard_override: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceEntry {
    pub branch: String,
    pub n: usize,
    pub cosets: usize,
    /// orbit lengths of the kernel; each coset contributes one copy
    pub orbit_sizes: Vec<usize>,
}

impl TraceEntry {
    pub fn subproblem_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cosets).flat_map(move |_| self.orbit_sizes.iter().copied())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub calls: u64,
    pub max_depth: u64,
    pub branches: BTreeMap<String, u64>,
    pub trace: Vec<TraceEntry>,
}

impl Stats {
    /// Most frequent non-base branch, for reporting.
    pub fn dominant_branch(&self) -> String {
        self.branches
            .iter()
            .filter(|(k, _)| k.as_str() != "base")
            .max_by_key(|(_, v)| **v)
            .map(|(k, _)| k.clone())
            .unwrap_or_else(|| "base".into())
    }
}

#[derive(Default)]
struct Counters {
    calls: AtomicU64,
    max_depth: AtomicU64,
    branches: Mutex<BTreeMap<String, u64>>,
    trace: Mutex<Vec<TraceEntry>>,
}

/// Chain and degree bound travelling with a recursive call.
#[derive(Clone, Copy)]
pub(crate) struct Frame<'a> {
    pub chain: &'a [Partition],
    pub d: usize,
    pub depth: usize,
}

impl<'a> Frame<'a> {
    pub fn deeper(self) -> Frame<'a> {
        Frame { depth: self.depth + 1, ..self }
    }
}

pub struct Solver {
    cfg: SolverConfig,
    counters: Counters,
    oracle: Box<dyn StructureOracle>,
}

/// `y'(β) = y(β^g)`, so that `Iso_{Hg}(x, y) = Iso_H(x, y') g`.
pub fn shift_string(y: &[Symbol], g: &Perm) -> Vec<Symbol> {
    (0..y.len()).map(|b| y[g.apply(b)]).collect()
}

fn check_strings(n: usize, x: &[Symbol], y: &[Symbol]) -> Result<()> {
    if x.len() != n || y.len() != n {
        return Err(Error::BadString);
    }
    Ok(())
}

fn check_window(n: usize, g: &StabChain, w: &[usize]) -> Result<()> {
    if let Some(&p) = w.iter().find(|&&p| p >= n) {
        return Err(Error::PointOutOfRange { point: p + 1, n });
    }
    if !g.is_invariant_set(w) {
        return Err(Error::NotInvariant);
    }
    Ok(())
}

/// Merge cosets of subgroups of one window-automorphism group into the
/// single coset they span. `None` parts are empty.
pub fn coset_union(parts: &[Option<Coset>]) -> Result<Option<Coset>> {
    coset_union_with_order(parts, None)
}

pub(crate) fn coset_union_with_order(parts: &[Option<Coset>], known: Option<&BigUint>) -> Result<Option<Coset>> {
    let live: Vec<&Coset> = parts.iter().flatten().collect();
    let Some(first) = live.first() else { return Ok(None) };
    let n = first.degree();
    if live.iter().any(|c| c.degree() != n || c.subgroup.degree() != n) {
        return Err(Error::InconsistentAmbient);
    }
    let r1_inv = first.rep.inverse();
    let mut group = first.subgroup.clone();
    for c in &live {
        if known.is_some_and(|k| &group.order() == k) {
            break;
        }
        let missing: Vec<Perm> = c.subgroup.generators().iter().filter(|g| !group.contains(g)).cloned().collect();
        if !missing.is_empty() {
            group = group.closure(&missing);
        }
        let q = c.rep.then(&r1_inv);
        if !group.contains(&q) {
            group = group.closure(&[q]);
        }
    }
    Ok(Some(Coset { subgroup: group, rep: first.rep.clone() }))
}

/// Coset spanned by an explicit nonempty list of elements of one coset.
pub(crate) fn coset_from_elements(n: usize, els: &[Perm]) -> Option<Coset> {
    let rep = els.first()?.clone();
    let inv = rep.inverse();
    let target = BigUint::from(els.len());
    let mut group = StabChain::trivial(n);
    for e in els {
        if group.order() == target {
            break;
        }
        let q = e.then(&inv);
        if !group.contains(&q) {
            group = group.closure(&[q]);
        }
    }
    Some(Coset { subgroup: group, rep })
}

fn ceil_pow(base: f64, exp: f64) -> f64 {
    base.powf(exp).ceil()
}

fn fits_under(order: &BigUint, bound: f64) -> bool {
    if bound >= 1e30 {
        return true;
    }
    order <= &BigUint::from(bound.max(0.0) as u128)
}

/// `t = max(9, 3 + ceil(log2 d))`.
pub fn certificate_size(d: usize) -> usize {
    9.max(3 + (d.max(1) as f64).log2().ceil() as usize)
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverConfig::default())
    }
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Self {
        Solver { cfg, counters: Counters::default(), oracle: Box::new(DefaultStructureOracle::default()) }
    }

    /// Replace the isomorphism test for local structures used by the certificate branch.
    pub fn with_structure_oracle(mut self, oracle: Box<dyn StructureOracle>) -> Self {
        self.oracle = oracle;
        self
    }

    pub(crate) fn structure_oracle(&self) -> &dyn StructureOracle {
        self.oracle.as_ref()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn stats(&self) -> Stats {
        let mut trace = self.counters.trace.lock().unwrap().clone();
        trace.sort();
        Stats {
            calls: self.counters.calls.load(Ordering::Relaxed),
            max_depth: self.counters.max_depth.load(Ordering::Relaxed),
            branches: self.counters.branches.lock().unwrap().clone(),
            trace,
        }
    }

    pub fn reset_stats(&self) {
        self.counters.calls.store(0, Ordering::Relaxed);
        self.counters.max_depth.store(0, Ordering::Relaxed);
        self.counters.branches.lock().unwrap().clear();
        self.counters.trace.lock().unwrap().clear();
    }

    pub(crate) fn note(&self, branch: &str) {
        *self.counters.branches.lock().unwrap().entry(branch.to_string()).or_default() += 1;
    }

    /// `Iso_G(x, y)` for the group of `seq`.
    pub fn string_iso_main(&self, seq: &PartitionSequence, x: &[Symbol], y: &[Symbol]) -> Result<Option<Coset>> {
        self.string_iso_window(seq, x, y, None)
    }

    /// `Iso_G^W(x, y)`; `window = None` means the whole domain.
    pub fn string_iso_window(
        &self,
        seq: &PartitionSequence,
        x: &[Symbol],
        y: &[Symbol],
        window: Option<&[usize]>,
    ) -> Result<Option<Coset>> {
        let n = seq.degree();
        check_strings(n, x, y)?;
        seq.check_structure()?;
        if let Some(w) = window {
            check_window(n, &seq.group, w)?;
        }
        let w = window.map(sorted);
        let f = Frame { chain: &seq.chain, d: seq.d, depth: 0 };
        self.solve(&seq.group, f, x, y, w.as_deref())
    }

    /// `Iso_{Gg}^W(x, y) = Iso_G^W(x, y^{g^-1}) g`.
    pub fn iso_window_shift(
        &self,
        seq: &PartitionSequence,
        coset: &Coset,
        x: &[Symbol],
        y: &[Symbol],
        window: Option<&[usize]>,
    ) -> Result<Option<Coset>> {
        if !coset.subgroup.same_group(&seq.group) {
            return Err(Error::Precondition("coset group differs from the sequence group".into()));
        }
        let y2 = shift_string(y, &coset.rep);
        Ok(self.string_iso_window(seq, x, &y2, window)?.map(|c| c.times(&coset.rep)))
    }

    /// Algorithm-1 style processing of an intransitive group, orbit by orbit.
    pub fn orbit_by_orbit(
        &self,
        seq: &PartitionSequence,
        x: &[Symbol],
        y: &[Symbol],
        window: Option<&[usize]>,
    ) -> Result<Option<Coset>> {
        let n = seq.degree();
        check_strings(n, x, y)?;
        let w = window.map(sorted);
        let f = Frame { chain: &seq.chain, d: seq.d, depth: 0 };
        self.orbits_step(&seq.group, f, x, y, w.as_deref())
    }

    /// Union over a transversal of `G_(blocks)` in `G`.
    pub fn standard_luks_reduction(
        &self,
        seq: &PartitionSequence,
        blocks: &Partition,
        x: &[Symbol],
        y: &[Symbol],
    ) -> Result<Option<Coset>> {
        check_strings(seq.degree(), x, y)?;
        let hom = induced_action(&seq.group, blocks)?;
        let f = Frame { chain: &seq.chain, d: seq.d, depth: 0 };
        self.luks_over(&seq.group, &hom, f, x, y, "luks")
    }

    /// The transitive step with primitive quotient handling.
    pub fn lemma62_recursion(&self, seq: &PartitionSequence, x: &[Symbol], y: &[Symbol]) -> Result<Option<Coset>> {
        check_strings(seq.degree(), x, y)?;
        if !seq.group.is_transitive() {
            return Err(Error::NotTransitive);
        }
        if seq.degree() <= 1 {
            return self.base_case(&seq.group, x, y, None);
        }
        let f = Frame { chain: &seq.chain, d: seq.d, depth: 0 };
        self.lemma62(&seq.group, f, x, y)
    }

    /// Enumeration filter.
    pub fn base_case(&self, g: &StabChain, x: &[Symbol], y: &[Symbol], window: Option<&[usize]>) -> Result<Option<Coset>> {
        self.note("base");
        let n = g.degree();
        check_strings(n, x, y)?;
        let all: Vec<usize>;
        let w = match window {
            Some(w) => w,
            None => {
                all = (0..n).collect();
                &all
            }
        };
        let els: Vec<Perm> = g.elements_capped(self.cfg.transversal_cap.max(self.cfg.brute_cap))?.collect();
        let keep = par::filter_map(&els, |h| w.iter().all(|&a| x[a] == y[h.apply(a)]).then(|| h.clone()));
        Ok(coset_from_elements(n, &keep))
    }

    pub(crate) fn solve(
        &self,
        g: &StabChain,
        f: Frame<'_>,
        x: &[Symbol],
        y: &[Symbol],
        window: Option<&[usize]>,
    ) -> Result<Option<Coset>> {
        self.counters.calls.fetch_add(1, Ordering::Relaxed);
        self.counters.max_depth.fetch_max(f.depth as u64, Ordering::Relaxed);
        let n = g.degree();
        if window.is_some_and(|w| w.is_empty()) {
            return Ok(Some(Coset::group(g.clone())));
        }
        if n <= 2 || g.is_trivial() || g.order() <= BigUint::from(self.cfg.brute_cap) {
            return self.base_case(g, x, y, window);
        }
        if !g.is_transitive() {
            return self.orbits_step(g, f, x, y, window);
        }
        let b1 = &f.chain[1];
        let hom = induced_action(g, b1)?;
        if is_semi_regular(hom.image_group()) {
            return self.luks_over(g, &hom, f, x, y, "semiregular");
        }
        self.lemma62(g, f, x, y)
    }

    fn orbits_step(
        &self,
        g: &StabChain,
        f: Frame<'_>,
        x: &[Symbol],
        y: &[Symbol],
        window: Option<&[usize]>,
    ) -> Result<Option<Coset>> {
        self.note("orbits");
        let n = g.degree();
        let mut inw = vec![window.is_none(); n];
        if let Some(w) = window {
            w.iter().for_each(|&p| inw[p] = true);
        }
        let orbits = g.orbits();
        let mut k = Coset::group(g.clone());
        for o in orbits.blocks() {
            if !inw[o[0]] {
                continue;
            }
            match self.iso_on_set(&k, f.deeper(), x, y, o)? {
                Some(c) => k = c,
                None => return Ok(None),
            }
        }
        Ok(Some(k))
    }

    /// `Iso_K^O(x, y)` for a coset `K = H r` and an `H`-invariant set `O`,
    /// via the action of `H` on `O`.
    pub(crate) fn iso_on_set(
        &self,
        k: &Coset,
        f: Frame<'_>,
        x: &[Symbol],
        y: &[Symbol],
        o: &[usize],
    ) -> Result<Option<Coset>> {
        let h = &k.subgroup;
        let y2 = shift_string(y, &k.rep);
        if o.len() == h.degree() {
            return Ok(self.solve(h, f, x, &y2, None)?.map(|c| c.times(&k.rep)));
        }
        let xo: Vec<Symbol> = o.iter().map(|&a| x[a]).collect();
        let yo: Vec<Symbol> = o.iter().map(|&a| y2[a]).collect();
        let mut sx = xo.clone();
        let mut sy = yo.clone();
        sx.sort_unstable();
        sy.sort_unstable();
        if sx != sy {
            return Ok(None);
        }
        let rho = action_on_set(h, o)?;
        let chain = restrict_chain(f.chain, o)?;
        let sub = Frame { chain: &chain, ..f };
        let Some(r) = self.solve(rho.image_group(), sub, &xo, &yo, None)? else {
            return Ok(None);
        };
        let kernel = rho.kernel();
        let mut gens = kernel.strong_generators();
        for g in r.subgroup.generators() {
            gens.push(rho.preimage(g)?.ok_or(Error::NotSubgroup)?);
        }
        let order = kernel.order() * r.subgroup.order();
        let lifted = StabChain::build(h.degree(), gens, &h.base(), Some(&order));
        let rep = rho.preimage(&r.rep)?.ok_or(Error::NotSubgroup)?;
        Ok(Some(Coset { subgroup: lifted, rep: rep.then(&k.rep) }))
    }

    /// `Iso_G(x, y) = ⋃ Iso_{H g_i}(x, y)` with `H = ker(hom)` and `g_i`
    /// lifting the elements of the image in enumeration order.
    pub(crate) fn luks_over(
        &self,
        g: &StabChain,
        hom: &GroupHom,
        f: Frame<'_>,
        x: &[Symbol],
        y: &[Symbol],
        branch: &str,
    ) -> Result<Option<Coset>> {
        self.note(branch);
        let img = hom.image_group();
        let size = img.order();
        if size > BigUint::from(self.cfg.transversal_cap) {
            return Err(Error::TransversalCapExceeded { size: size.to_string(), cap: self.cfg.transversal_cap });
        }
        let h = hom.kernel();
        let images: Vec<Perm> = img.elements_capped(self.cfg.transversal_cap)?.collect();
        let lifts: Vec<Perm> = images
            .iter()
            .map(|p| hom.preimage(p).and_then(|o| o.ok_or(Error::NotSubgroup)))
            .collect::<Result<_>>()?;
        let orbit_sizes: Vec<usize> = h.orbits().blocks().iter().map(|b| b.len()).collect();
        self.counters.trace.lock().unwrap().push(TraceEntry {
            branch: branch.to_string(),
            n: g.degree(),
            cosets: lifts.len(),
            orbit_sizes,
        });
        let inner = f.deeper();
        let parts = par::map(&lifts, |gi| {
            let y2 = shift_string(y, gi);
            self.solve(&h, inner, x, &y2, None).map(|r| r.map(|c| c.times(gi)))
        });
        let parts: Vec<Option<Coset>> = parts.into_iter().collect::<Result<_>>()?;
        let live = parts.iter().flatten().count();
        let known = parts.iter().flatten().next().map(|c| c.subgroup.order() * BigUint::from(live));
        coset_union_with_order(&parts, known.as_ref())
    }

    fn lemma62(&self, g: &StabChain, f: Frame<'_>, x: &[Symbol], y: &[Symbol]) -> Result<Option<Coset>> {
        let b1 = &f.chain[1];
        let hom1 = induced_action(g, b1)?;
        let quotient = hom1.image_group().min_block_system()?;
        let coarse: Vec<Partition>;
        let (chain, hom) = if quotient.is_discrete() {
            (f.chain, hom1)
        } else {
            let blocks: Vec<Vec<usize>> = quotient
                .blocks()
                .iter()
                .map(|cls| cls.iter().flat_map(|&i| b1.blocks()[i].iter().copied()).collect())
                .collect();
            let b = Partition::new(g.degree(), blocks)?;
            let mut c = vec![f.chain[0].clone(), b.clone()];
            c.extend(f.chain[1..].iter().cloned());
            coarse = c;
            (&coarse[..], induced_action(g, &b)?)
        };
        let f = Frame { chain, ..f };
        let p = hom.image_group();
        let d = f.d.max(1) as f64;
        if fits_under(&p.order(), ceil_pow(d, 1.0 + d.log2())) {
            return self.luks_over(g, &hom, f, x, y, "luks-small");
        }
        let rep = match compute_giant_representation(p, f.d, &self.cfg.reduction()) {
            Ok(GiantSearch::Found(r)) => r,
            Ok(GiantSearch::TooSmall) => return self.luks_over(g, &hom, f, x, y, "luks-small"),
            Err(e) => {
                if p.order() <= BigUint::from(self.cfg.transversal_cap) {
                    return self.luks_over(g, &hom, f, x, y, "fallback");
                }
                return Err(Error::OracleUnavailable(e.to_string()));
            }
        };
        let g_prime = hom.preimage_group(&rep.n)?;
        let lifts = coset_lifts(p, &rep.n, &hom)?;
        let phi_imgs = g_prime
            .generators()
            .iter()
            .map(|h| hom.image(h).and_then(|q| rep.psi.image(&q)))
            .collect::<Result<Vec<_>>>()?;
        let k = rep.psi.target_degree();
        let phi = GroupHom::trusted(g_prime.clone(), k, phi_imgs);
        let (t, certify) = match self.cfg.guard_override {
            Some(t) => (t, k > t),
            None => {
                let t = certificate_size(f.d);
                (t, k > 10 * t)
            }
        };
        let certify = certify && k <= self.cfg.d_cap;
        let parts = lifts
            .iter()
            .map(|gj| {
                let y2 = shift_string(y, gj);
                let r = if certify {
                    crate::certs::certificate_branch(self, &g_prime, &phi, f, x, &y2, t)?
                } else {
                    self.luks_over(&g_prime, &phi, f, x, &y2, "luks-giant")?
                };
                Ok(r.map(|c| c.times(gj)))
            })
            .collect::<Result<Vec<_>>>()?;
        coset_union(&parts)
    }
}

/// Lifts of right coset representatives of `n` in `p`.
fn coset_lifts(p: &StabChain, n: &StabChain, hom: &GroupHom) -> Result<Vec<Perm>> {
    let deg = p.degree();
    let mut reps = vec![Perm::identity(deg)];
    let mut i = 0;
    while i < reps.len() {
        let r = reps[i].clone();
        i += 1;
        for s in p.generators() {
            let c = r.then(s);
            if !reps.iter().any(|q| n.contains(&c.then(&q.inverse()))) {
                reps.push(c);
            }
        }
    }
    reps.iter().map(|r| hom.preimage(r).and_then(|o| o.ok_or(Error::NotSubgroup))).collect()
}

fn sorted(w: &[usize]) -> Vec<usize> {
    let mut v = w.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// A string isomorphism instance as read from JSON.
#[derive(Clone, Debug)]
pub struct StringInstance {
    pub sigma: Vec<String>,
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub seq: PartitionSequence,
    pub window: Option<Vec<usize>>,
}

fn symbol_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(Error::Parse("symbols must be strings or numbers".into())),
    }
}

fn symbol_list(v: &Value) -> Result<Vec<String>> {
    match v {
        Value::Array(a) => a.iter().map(symbol_text).collect(),
        Value::String(s) => Ok(s.chars().map(|c| c.to_string()).collect()),
        _ => Err(Error::Parse("string must be an array or text".into())),
    }
}

impl StringInstance {
    /// `{"n", "sigma"?, "x", "y", "group": {"n","gens"}, "sequence"?, "window"?}`.
    /// Without a sequence one is derived from the group; without `d` the least
    /// valid value is used.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let group = GeneratorList::from_json_value(v.get("group").ok_or_else(|| Error::Parse("missing group".into()))?)?;
        let n = v.get("n").and_then(Value::as_u64).map(|n| n as usize).unwrap_or(group.n);
        if n != group.n {
            return Err(Error::DomainMismatch { left: n, right: group.n });
        }
        let xs = symbol_list(v.get("x").ok_or_else(|| Error::Parse("missing x".into()))?)?;
        let ys = symbol_list(v.get("y").ok_or_else(|| Error::Parse("missing y".into()))?)?;
        let sigma: Vec<String> = match v.get("sigma") {
            Some(s) => symbol_list(s)?,
            None => {
                let mut all: Vec<String> = xs.iter().chain(&ys).cloned().collect();
                all.sort();
                all.dedup();
                all
            }
        };
        let code = |s: &String| sigma.iter().position(|t| t == s).map(|i| i as Symbol).ok_or(Error::BadString);
        let x = xs.iter().map(code).collect::<Result<Vec<_>>>()?;
        let y = ys.iter().map(code).collect::<Result<Vec<_>>>()?;
        check_strings(n, &x, &y)?;
        let g = group.to_group();
        let seq = match v.get("sequence") {
            None | Some(Value::Null) => PartitionSequence::auto(g)?,
            Some(s) => {
                let (chain, d) = match PartitionSequence::chain_from_json_value(s, None) {
                    Ok(r) => r,
                    Err(_) => {
                        let (chain, _) = PartitionSequence::chain_from_json_value(s, Some(0))?;
                        let probe = PartitionSequence::new(g.clone(), chain.clone(), 1)?;
                        let d = probe.minimal_d()?;
                        (chain, d)
                    }
                };
                PartitionSequence::new(g, chain, d)?
            }
        };
        let window = match v.get("window") {
            None | Some(Value::Null) => None,
            Some(w) => Some(
                w.as_array()
                    .ok_or_else(|| Error::Parse("window must be an array".into()))?
                    .iter()
                    .map(|p| match p.as_u64() {
                        Some(p) if p >= 1 && (p as usize) <= n => Ok(p as usize - 1),
                        _ => Err(Error::Parse("bad window point".into())),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(StringInstance { sigma, x, y, seq, window })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> Value {
        let n = self.seq.degree();
        let mut v = json!({
            "n": n,
            "sigma": self.sigma,
            "x": self.x.iter().map(|&s| self.sigma[s as usize].clone()).collect::<Vec<_>>(),
            "y": self.y.iter().map(|&s| self.sigma[s as usize].clone()).collect::<Vec<_>>(),
            "group": GeneratorList::from(&self.seq.group).to_json_value(),
            "sequence": self.seq.to_json_value(),
        });
        if let Some(w) = &self.window {
            v["window"] = json!(w.iter().map(|p| p + 1).collect::<Vec<_>>());
        }
        v
    }

    pub fn solve(&self, solver: &Solver) -> Result<Option<Coset>> {
        solver.string_iso_window(&self.seq, &self.x, &self.y, self.window.as_deref())
    }
}

/// `{"empty": bool, "aut_gens": [cycles], "rep": cycle | null}`.
pub fn iso_result_json(r: Option<&Coset>) -> Value {
    match r {
        None => json!({"empty": true, "aut_gens": [], "rep": Value::Null}),
        Some(c) => json!({
            "empty": false,
            "aut_gens": c.subgroup.strong_generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "rep": c.rep.to_string(),
        }),
    }
}
