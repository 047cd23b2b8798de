//! Brute-force reference implementations. These work on plain permutation
//! values and explicit element lists only, never on stabilizer chains, so they
//! stay an independent check on the main code paths.

use std::collections::HashSet;

use crate::apps::graph::Graph;
use crate::error::{Error, Result};
use crate::par;
use crate::perm::{Coset, Perm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub element_cap: u64,
    /// largest domain for searches over all `n!` bijections
    pub max_bijection_n: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { element_cap: 10_000_000, max_bijection_n: 10 }
    }
}

/// All elements of `<gens>` by closure, sorted.
pub fn closure(n: usize, gens: &[Perm], cap: u64) -> Result<Vec<Perm>> {
    let id = Perm::identity(n);
    let mut seen: HashSet<Perm> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = vec![id];
    let mut i = 0;
    while i < queue.len() {
        let g = queue[i].clone();
        i += 1;
        for s in gens {
            let h = g.then(s);
            if seen.insert(h.clone()) {
                if seen.len() as u64 > cap {
                    return Err(Error::CapExceeded { order: format!(">{cap}"), cap });
                }
                queue.push(h);
            }
        }
    }
    queue.sort_unstable();
    Ok(queue)
}

/// `{g ∈ G : x(α) = y(α^g) for all α ∈ window}` with `G` given by elements.
pub fn filter_string_iso<S: PartialEq + Sync>(elements: &[Perm], x: &[S], y: &[S], window: &[usize]) -> Vec<Perm> {
    par::filter_map(elements, |g| window.iter().all(|&a| x[a] == y[g.apply(a)]).then(|| g.clone()))
}

/// Literal isomorphism set of two strings under `<gens>`; empty vector = no isomorphism.
pub fn brute_string_iso<S: PartialEq + Sync>(
    n: usize,
    gens: &[Perm],
    x: &[S],
    y: &[S],
    window: &[usize],
    cfg: &OracleConfig,
) -> Result<Vec<Perm>> {
    if x.len() != n || y.len() != n {
        return Err(Error::BadString);
    }
    let els = closure(n, gens, cfg.element_cap)?;
    Ok(filter_string_iso(&els, x, y, window))
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All `n!` bijections in lexicographic order, filtered by `keep`.
pub fn filter_bijections<F>(n: usize, cfg: &OracleConfig, keep: F) -> Result<Vec<Perm>>
where
    F: Fn(&Perm) -> bool + Sync + Send,
{
    if n > cfg.max_bijection_n {
        return Err(Error::CapExceeded { order: factorial(n.min(20)).to_string(), cap: factorial(cfg.max_bijection_n) });
    }
    if n == 0 {
        return Ok(vec![Perm::identity(0)]);
    }
    let firsts: Vec<usize> = (0..n).collect();
    let parts = par::map(&firsts, |&f| {
        let mut out = Vec::new();
        let mut rest: Vec<usize> = (0..n).filter(|&p| p != f).collect();
        loop {
            let mut img = Vec::with_capacity(n);
            img.push(f);
            img.extend_from_slice(&rest);
            let p = Perm::from_images(img).expect("bijection");
            if keep(&p) {
                out.push(p);
            }
            if !next_permutation(&mut rest) {
                break;
            }
        }
        out
    });
    Ok(parts.into_iter().flatten().collect())
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All vertex bijections mapping `g1` onto `g2`.
pub fn brute_graph_iso(g1: &Graph, g2: &Graph, cfg: &OracleConfig) -> Result<Vec<Perm>> {
    if g1.order() != g2.order() || g1.num_edges() != g2.num_edges() {
        return Ok(Vec::new());
    }
    let e1 = g1.edges();
    filter_bijections(g1.order(), cfg, |p| e1.iter().all(|&(u, v)| g2.has_edge(p.apply(u), p.apply(v))))
}

pub fn brute_graph_aut(g: &Graph, cfg: &OracleConfig) -> Result<Vec<Perm>> {
    brute_graph_iso(g, g, cfg)
}

/// Two nonempty cosets are the same set of permutations.
pub fn coset_equal(a: &Coset, b: &Coset) -> bool {
    a.subgroup.degree() == b.subgroup.degree()
        && a.subgroup.order() == b.subgroup.order()
        && a.subgroup.generators().iter().all(|g| b.subgroup.contains(g))
        && b.subgroup.generators().iter().all(|g| a.subgroup.contains(g))
        && a.subgroup.contains(&a.rep.then(&b.rep.inverse()))
}

/// A main-code coset agrees with an explicit element list: same size, every
/// listed element is a member, and the representative is listed.
pub fn coset_matches_elements(c: Option<&Coset>, elements: &[Perm]) -> bool {
    match c {
        None => elements.is_empty(),
        Some(c) => {
            !elements.is_empty()
                && c.subgroup.order_u64() == Some(elements.len() as u64)
                && elements.binary_search(&c.rep).is_ok()
                && !par::any(elements, |g| !c.contains(g))
        }
    }
}
