use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::permutation::{check_same, Perm};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Default cap on exhaustive element enumeration.
pub const ENUM_CAP: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub point: usize,
    pub gens: Vec<Perm>,
    pub orbit: Vec<usize>,
    pub trans: Vec<Option<Perm>>,
    pub inv: Vec<Option<Perm>>,
}

impl Level {
    fn new(n: usize, point: usize) -> Self {
        let mut trans = vec![None; n];
        let mut inv = vec![None; n];
        trans[point] = Some(Perm::identity(n));
        inv[point] = Some(Perm::identity(n));
        Level { point, gens: Vec::new(), orbit: vec![point], trans, inv }
    }

    fn add_gen(&mut self, g: Perm) {
        self.gens.push(g);
        // grow the orbit: the new generator may reach new points from any old point,
        // and new points must be closed under all generators.
        let mut i = 0;
        let mut queue: Vec<usize> = Vec::new();
        let g = self.gens.last().unwrap().clone();
        for &b in &self.orbit {
            let c = g.apply(b);
            if self.trans[c].is_none() {
                let u = self.trans[b].as_ref().unwrap().then(&g);
                self.inv[c] = Some(u.inverse());
                self.trans[c] = Some(u);
                queue.push(c);
            }
        }
        self.orbit.extend(queue.iter().copied());
        while i < queue.len() {
            let b = queue[i];
            i += 1;
            for s in 0..self.gens.len() {
                let c = self.gens[s].apply(b);
                if self.trans[c].is_none() {
                    let u = self.trans[b].as_ref().unwrap().then(&self.gens[s]);
                    self.inv[c] = Some(u.inverse());
                    self.trans[c] = Some(u);
                    queue.push(c);
                    self.orbit.push(c);
                }
            }
        }
    }
}

/// Base and strong generating set for a permutation group.
#[derive(Clone, Debug)]
pub struct StabChain {
    n: usize,
    gens: Vec<Perm>,
    levels: Vec<Level>,
}

/// Giant classification of a group in its natural action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Giant {
    Sym,
    Alt,
    Neither,
}

impl StabChain {
    /// Group generated by `gens` on `n` points.
    pub fn new(n: usize, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            check_same(n, g.degree())?;
        }
        Ok(Self::build(n, gens, &[], None))
    }

    pub fn trivial(n: usize) -> Self {
        StabChain { n, gens: Vec::new(), levels: Vec::new() }
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Perm::from_cycles(n, &[vec![0, 1]]).unwrap());
        }
        if n >= 3 {
            gens.push(Perm::from_cycles(n, &[(0..n).collect()]).unwrap());
        }
        Self::build(n, gens, &[], None)
    }

    pub fn alternating(n: usize) -> Self {
        let gens = (2..n).map(|k| Perm::from_cycles(n, &[vec![0, 1, k]]).unwrap()).collect();
        Self::build(n, gens, &[], None)
    }

    pub fn cyclic(n: usize) -> Self {
        let gens = if n >= 2 { vec![Perm::from_cycles(n, &[(0..n).collect()]).unwrap()] } else { vec![] };
        Self::build(n, gens, &[], None)
    }

    /// Schreier–Sims with an optional prescribed base prefix and known order.
    /// Random sifting first, then a deterministic Schreier generator pass unless
    /// the known order is already reached.
    pub(crate) fn build(n: usize, gens: Vec<Perm>, prefix: &[usize], known: Option<&BigUint>) -> Self {
        let mut gens: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        let mut seen = std::collections::HashSet::new();
        gens.retain(|g| seen.insert(g.clone()));
        let mut sc = StabChain { n, gens: gens.clone(), levels: Vec::new() };
        for &p in prefix {
            if !sc.levels.iter().any(|l| l.point == p) {
                sc.levels.push(Level::new(n, p));
            }
        }
        for g in &gens {
            let (r, j) = sc.sift(g, 0);
            if !r.is_identity() {
                sc.insert(r, 0, j);
            }
        }
        if gens.is_empty() {
            return sc;
        }
        if known.is_some_and(|k| &sc.order() == k) {
            return sc;
        }
        // random phase
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ n as u64);
        let mut pool: Vec<Perm> = gens.clone();
        while pool.len() < 10 {
            pool.push(gens[pool.len() % gens.len()].clone());
        }
        let mut acc = Perm::identity(n);
        for _ in 0..20 {
            product_replace(&mut pool, &mut acc, &mut rng);
        }
        let mut quiet = 0;
        while quiet < 24 {
            product_replace(&mut pool, &mut acc, &mut rng);
            let (r, j) = sc.sift(&acc, 0);
            if r.is_identity() {
                quiet += 1;
            } else {
                sc.insert(r, 0, j);
                quiet = 0;
                if known.is_some_and(|k| &sc.order() == k) {
                    return sc;
                }
            }
        }
        if known.is_some_and(|k| &sc.order() == k) {
            return sc;
        }
        sc.verify();
        sc
    }

    /// Add residue `r` (fixing base points before `stop`) to levels `0..=stop`.
    fn insert(&mut self, r: Perm, _from: usize, stop: usize) {
        if stop == self.levels.len() {
            let p = r
                .support()
                .into_iter()
                .find(|p| !self.levels.iter().any(|l| l.point == *p))
                .expect("residue fixing all base points must move a new point");
            self.levels.push(Level::new(self.n, p));
        }
        for k in 0..=stop {
            self.levels[k].add_gen(r.clone());
        }
    }

    /// Deterministic Schreier–Sims pass: every Schreier generator must sift.
    fn verify(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() as isize - 1;
        'outer: while i >= 0 {
            let li = i as usize;
            let mut oi = 0;
            while oi < self.levels[li].orbit.len() {
                let b = self.levels[li].orbit[oi];
                for si in 0..self.levels[li].gens.len() {
                    let lv = &self.levels[li];
                    let s = &lv.gens[si];
                    let c = s.apply(b);
                    let h = lv.trans[b].as_ref().unwrap().then(s).then(lv.inv[c].as_ref().unwrap());
                    if h.is_identity() {
                        continue;
                    }
                    let (r, j) = self.sift(&h, li + 1);
                    if !r.is_identity() {
                        self.insert(r, li + 1, j);
                        i = j.min(self.levels.len() - 1) as isize;
                        continue 'outer;
                    }
                }
                oi += 1;
            }
            i -= 1;
        }
    }

    /// Strip `g` from level `from`; returns residue and level where stripping stopped.
    pub(crate) fn sift(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut g = g.clone();
        for k in from..self.levels.len() {
            let lv = &self.levels[k];
            let b = g.apply(lv.point);
            match &lv.inv[b] {
                None => return (g, k),
                Some(u) => g = g.then(u),
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// The generators the group was built from (identity and duplicates removed).
    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        self.levels.first().map(|l| l.gens.clone()).unwrap_or_default()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub(crate) fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Order if it fits in `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.levels.iter().try_fold(1u64, |acc, l| acc.checked_mul(l.orbit.len() as u64))
    }

    pub fn log2_order(&self) -> f64 {
        self.levels.iter().map(|l| (l.orbit.len() as f64).log2()).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    pub fn contains(&self, p: &Perm) -> bool {
        p.degree() == self.n && self.sift(p, 0).0.is_identity()
    }

    pub fn membership(&self, p: &Perm) -> Result<bool> {
        check_same(self.n, p.degree())?;
        Ok(self.contains(p))
    }

    pub fn is_subgroup_of(&self, other: &StabChain) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &StabChain) -> bool {
        self.n == other.n && self.order() == other.order() && self.is_subgroup_of(other)
    }

    pub fn orbit(&self, p: usize) -> Result<Vec<usize>> {
        if p >= self.n {
            return Err(Error::PointOutOfRange { point: p, n: self.n });
        }
        Ok(orbit_of(self.n, &self.gens, &[p]))
    }

    pub fn orbits(&self) -> Partition {
        orbits_of(self.n, &self.gens)
    }

    pub fn is_transitive(&self) -> bool {
        self.n <= 1 || orbit_of(self.n, &self.gens, &[0]).len() == self.n
    }

    pub fn is_invariant_set(&self, set: &[usize]) -> bool {
        let mut mark = vec![false; self.n];
        set.iter().for_each(|&p| mark[p] = true);
        self.gens.iter().all(|g| set.iter().all(|&p| mark[g.apply(p)]))
    }

    /// Rebuild with a prescribed base prefix (a base change).
    pub fn with_base_prefix(&self, prefix: &[usize]) -> StabChain {
        let order = self.order();
        let mut sc = StabChain::build(self.n, self.strong_generators(), prefix, Some(&order));
        sc.gens = self.gens.clone();
        sc
    }

    /// Subgroup formed by the levels from `k` on.
    pub(crate) fn tail(&self, k: usize) -> StabChain {
        let levels: Vec<Level> = self.levels[k.min(self.levels.len())..].to_vec();
        let gens = levels.first().map(|l| l.gens.clone()).unwrap_or_default();
        let mut sc = StabChain { n: self.n, gens, levels };
        // drop trivial leading levels so the chain stays tidy
        while sc.levels.first().is_some_and(|l| l.orbit.len() == 1 && l.gens.is_empty()) {
            sc.levels.remove(0);
        }
        sc
    }

    /// Pointwise stabilizer of `delta`.
    pub fn pointwise_stabilizer(&self, delta: &[usize]) -> StabChain {
        if delta.is_empty() {
            return self.clone();
        }
        let mut d: Vec<usize> = delta.to_vec();
        d.sort_unstable();
        d.dedup();
        let sc = self.with_base_prefix(&d);
        sc.tail(d.len())
    }

    /// Subgroup generated by this group and `extra`.
    pub fn closure(&self, extra: &[Perm]) -> StabChain {
        let mut g = self.gens.clone();
        let mut changed = false;
        for e in extra {
            if !self.contains(e) {
                changed = true;
            }
            g.push(e.clone());
        }
        if !changed {
            return self.clone();
        }
        let mut sg = self.strong_generators();
        sg.extend(extra.iter().cloned());
        let mut sc = StabChain::build(self.n, sg, &self.base(), None);
        let mut seen = std::collections::HashSet::new();
        g.retain(|p| !p.is_identity() && seen.insert(p.clone()));
        sc.gens = g;
        sc
    }

    /// Coset representative `u` at `level` with `base[level]^u = point`.
    pub(crate) fn transversal(&self, level: usize, point: usize) -> Option<&Perm> {
        self.levels[level].trans[point].as_ref()
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.n);
        for lv in self.levels.iter().rev() {
            let b = lv.orbit[rng.gen_range(0..lv.orbit.len())];
            g = g.then(lv.trans[b].as_ref().unwrap());
        }
        g
    }

    /// All elements, lexicographic by base images.
    pub fn elements(&self) -> Result<Elements<'_>> {
        self.elements_capped(ENUM_CAP)
    }

    pub fn elements_capped(&self, cap: u64) -> Result<Elements<'_>> {
        match self.order_u64() {
            Some(o) if o <= cap => Ok(Elements::new(self)),
            _ => Err(Error::CapExceeded { order: self.order().to_string(), cap }),
        }
    }

    pub fn is_giant(&self) -> Giant {
        let k = self.n;
        let fact = (1..=k).fold(BigUint::from(1u32), |a, i| a * BigUint::from(i));
        let o = self.order();
        if o == fact {
            Giant::Sym
        } else if o.clone() * BigUint::from(2u32) == fact && self.is_transitive() {
            Giant::Alt
        } else {
            Giant::Neither
        }
    }

    pub fn is_giant_at_least_alt(&self) -> bool {
        self.is_giant() != Giant::Neither
    }

    /// Action on an invariant set, relabelled by position in sorted `set`.
    pub fn restrict(&self, set: &[usize]) -> Result<StabChain> {
        let mut s = set.to_vec();
        s.sort_unstable();
        let gens = self.gens.iter().map(|g| g.restrict(&s)).collect::<Result<Vec<_>>>()?;
        Ok(StabChain::build(s.len(), gens, &[], None))
    }

    /// Conjugate group `g^-1 G g`.
    pub fn conjugate(&self, g: &Perm) -> StabChain {
        let gens = self.gens.iter().map(|h| h.conjugate_by(g)).collect();
        let o = self.order();
        StabChain::build(self.n, gens, &[], Some(&o))
    }
}

fn product_replace(pool: &mut [Perm], acc: &mut Perm, rng: &mut ChaCha8Rng) {
    let len = pool.len();
    let i = rng.gen_range(0..len);
    let mut j = rng.gen_range(0..len);
    while j == i && len > 1 {
        j = rng.gen_range(0..len);
    }
    pool[i] = if rng.gen_bool(0.5) { pool[i].then(&pool[j]) } else { pool[j].then(&pool[i]) };
    *acc = acc.then(&pool[i]);
}

pub fn orbit_of(n: usize, gens: &[Perm], seeds: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            out.push(s);
        }
    }
    let mut i = 0;
    while i < out.len() {
        let p = out[i];
        i += 1;
        for g in gens {
            let q = g.apply(p);
            if !seen[q] {
                seen[q] = true;
                out.push(q);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn orbits_of(n: usize, gens: &[Perm]) -> Partition {
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for p in 0..n {
        if !seen[p] {
            let o = orbit_of(n, gens, &[p]);
            o.iter().for_each(|&q| seen[q] = true);
            blocks.push(o);
        }
    }
    Partition::from_blocks_unchecked(n, blocks)
}

/// Depth-first element enumeration; candidate images sorted at each level.
pub struct Elements<'a> {
    chain: &'a StabChain,
    // stack of (level, sorted candidate list, next index, partial product)
    stack: Vec<(Vec<(usize, usize)>, usize, Perm)>,
    done: bool,
}

impl<'a> Elements<'a> {
    fn new(chain: &'a StabChain) -> Self {
        let id = Perm::identity(chain.n);
        let mut e = Elements { chain, stack: Vec::new(), done: false };
        if chain.levels.is_empty() {
            e.stack.push((vec![], 0, id));
        } else {
            let c = e.candidates(0, &id);
            e.stack.push((c, 0, id));
        }
        e
    }

    fn candidates(&self, level: usize, partial: &Perm) -> Vec<(usize, usize)> {
        let lv = &self.chain.levels[level];
        let mut c: Vec<(usize, usize)> = lv.orbit.iter().map(|&g| (partial.apply(g), g)).collect();
        c.sort_unstable();
        c
    }
}

impl Iterator for Elements<'_> {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        if self.done {
            return None;
        }
        let depth = self.chain.levels.len();
        if depth == 0 {
            self.done = true;
            return self.stack.pop().map(|s| s.2);
        }
        loop {
            let level = self.stack.len() - 1;
            let (cands, idx, partial) = self.stack.last_mut().unwrap();
            if *idx >= cands.len() {
                self.stack.pop();
                if self.stack.is_empty() {
                    self.done = true;
                    return None;
                }
                continue;
            }
            let (_, gamma) = cands[*idx];
            *idx += 1;
            let u = self.chain.levels[level].trans[gamma].as_ref().unwrap();
            let next = u.then(partial);
            if level + 1 == depth {
                return Some(next);
            }
            let c = self.candidates(level + 1, &next);
            self.stack.push((c, 0, next));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Perm {
        Perm::parse(n, s).unwrap()
    }

    #[test]
    fn orders() {
        let s4 = StabChain::new(4, vec![p(4, "(1 2)"), p(4, "(1 2 3 4)")]).unwrap();
        assert_eq!(s4.order_u64(), Some(24));
        assert_eq!(StabChain::new(5, vec![]).unwrap().order_u64(), Some(1));
        assert_eq!(StabChain::symmetric(9).order_u64(), Some(362880));
        assert_eq!(StabChain::alternating(9).order_u64(), Some(181440));
    }

    #[test]
    fn membership_examples() {
        let a4 = StabChain::alternating(4);
        assert!(a4.contains(&Perm::identity(4)));
        assert!(!a4.contains(&p(4, "(1 2)")));
    }

    #[test]
    fn stabilizers() {
        let s4 = StabChain::symmetric(4);
        let st = s4.pointwise_stabilizer(&[0]);
        assert_eq!(st.order_u64(), Some(6));
        assert!(st.strong_generators().iter().all(|g| g.apply(0) == 0));
        assert_eq!(s4.pointwise_stabilizer(&[]).order_u64(), Some(24));
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(StabChain::trivial(3).elements().unwrap().count(), 1);
        let s4: Vec<Perm> = StabChain::symmetric(4).elements().unwrap().collect();
        let set: std::collections::HashSet<_> = s4.iter().cloned().collect();
        assert_eq!(s4.len(), 24);
        assert_eq!(set.len(), 24);
        let a5: Vec<Perm> = StabChain::alternating(5).elements().unwrap().collect();
        assert_eq!(a5.len(), 60);
        assert!(a5.iter().all(|g| g.is_even()));
    }

    #[test]
    fn giants() {
        assert_eq!(StabChain::symmetric(6).is_giant(), Giant::Sym);
        assert_eq!(StabChain::alternating(4).is_giant(), Giant::Alt);
        assert_eq!(StabChain::cyclic(5).is_giant(), Giant::Neither);
    }

    #[test]
    fn orbits_examples() {
        let g = StabChain::new(4, vec![p(4, "(1 2)(3 4)")]).unwrap();
        assert_eq!(g.orbit(0).unwrap(), vec![0, 1]);
        assert_eq!(StabChain::symmetric(4).orbit(2).unwrap(), vec![0, 1, 2, 3]);
    }
}
