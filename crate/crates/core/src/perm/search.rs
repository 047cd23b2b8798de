//! Backtrack searches over a stabilizer chain whose base starts with a given set.

use super::chain::StabChain;
use super::permutation::Perm;

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Depth-first search for `g` with `base[j]^g ∈ target` for `j` in `from..t`,
/// extending a partial product; returns the first hit.
fn find_below(chain: &StabChain, level: usize, t: usize, partial: &Perm, target: &[bool]) -> Option<Perm> {
    if level == t {
        return Some(partial.clone());
    }
    let lv = &chain.levels()[level];
    let mut cands: Vec<(usize, usize)> = lv
        .orbit
        .iter()
        .map(|&g| (partial.apply(g), g))
        .filter(|(img, _)| target[*img])
        .collect();
    cands.sort_unstable();
    for (_, gamma) in cands {
        let next = chain.transversal(level, gamma).unwrap().then(partial);
        if let Some(g) = find_below(chain, level + 1, t, &next, target) {
            return Some(g);
        }
    }
    None
}

/// Setwise stabilizer `{g : set^g = set}` by orbit-pruned backtracking.
pub(crate) fn setwise_stabilizer(g: &StabChain, set: &[usize]) -> StabChain {
    let n = g.degree();
    let mut t_set: Vec<usize> = set.to_vec();
    t_set.sort_unstable();
    t_set.dedup();
    if t_set.is_empty() || t_set.len() == n || g.is_invariant_set(&t_set) {
        return g.clone();
    }
    let chain = g.with_base_prefix(&t_set);
    let t = t_set.len();
    let mut target = vec![false; n];
    t_set.iter().for_each(|&p| target[p] = true);
    let mut found: Vec<Perm> = chain.levels().get(t).map(|l| l.gens.clone()).unwrap_or_default();
    for i in (0..t).rev() {
        let lv = &chain.levels()[i];
        let mut dsu = Dsu::new(n);
        for k in &found {
            for p in 0..n {
                dsu.union(p, k.apply(p));
            }
        }
        let mut tested = vec![false; n];
        tested[dsu.find(lv.point)] = true;
        let mut orbit = lv.orbit.clone();
        orbit.sort_unstable();
        for gamma in orbit {
            if !target[gamma] {
                continue;
            }
            let r = dsu.find(gamma);
            if tested[r] {
                continue;
            }
            tested[r] = true;
            let u = chain.transversal(i, gamma).unwrap().clone();
            if let Some(h) = find_below(&chain, i + 1, t, &u, &target) {
                for p in 0..n {
                    dsu.union(p, h.apply(p));
                }
                let r2 = dsu.find(gamma);
                tested[r2] = true;
                found.push(h);
            }
        }
    }
    StabChain::build(n, found, &chain.base(), None)
}

/// Some `g` in the group with `from^g = to` (as sets), if one exists.
pub(crate) fn set_transporter(g: &StabChain, from: &[usize], to: &[usize]) -> Option<Perm> {
    let n = g.degree();
    let mut a: Vec<usize> = from.to_vec();
    a.sort_unstable();
    a.dedup();
    let mut b: Vec<usize> = to.to_vec();
    b.sort_unstable();
    b.dedup();
    if a.len() != b.len() {
        return None;
    }
    if a.is_empty() {
        return Some(Perm::identity(n));
    }
    let chain = g.with_base_prefix(&a);
    let mut target = vec![false; n];
    b.iter().for_each(|&p| target[p] = true);
    find_below(&chain, 0, a.len(), &Perm::identity(n), &target)
}
