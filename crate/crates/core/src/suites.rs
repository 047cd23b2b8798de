//! Seeded instance generators shared by the benchmarks, the CLI suites and
//! the test harnesses. Output depends only on the seed.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apps::Graph;
use crate::luks::Symbol;
use crate::perm::{Perm, StabChain};

pub fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Perm {
    let mut img: Vec<usize> = (0..n).collect();
    img.shuffle(rng);
    Perm::from_images(img).expect("valid by construction")
}

/// Random contiguous split of `0..n` into nonempty parts.
pub fn random_split<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let mut parts = vec![vec![0]];
    for p in 1..n {
        if rng.gen_bool(0.4) {
            parts.push(vec![p]);
        } else {
            parts.last_mut().expect("valid by construction").push(p);
        }
    }
    parts
}

/// Random permutation of each part, fixed across parts.
fn part_perm<R: Rng>(rng: &mut R, n: usize, parts: &[Vec<usize>]) -> Perm {
    let mut img: Vec<usize> = (0..n).collect();
    for part in parts {
        let mut shuffled = part.clone();
        shuffled.shuffle(rng);
        for (a, b) in part.iter().zip(shuffled) {
            img[*a] = b;
        }
    }
    Perm::from_images(img).expect("valid by construction")
}

/// A random small cycle.
fn short_cycle<R: Rng>(rng: &mut R, n: usize) -> Perm {
    let len = rng.gen_range(2..=n.clamp(2, 4));
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    Perm::from_cycles(n, &[pts[..len.min(n)].to_vec()]).expect("valid by construction")
}

/// Permutes the blocks `b*m..(b+1)*m` among themselves and acts inside each.
fn imprimitive_perm<R: Rng>(rng: &mut R, m: usize, k: usize) -> Perm {
    let top = random_perm(rng, k);
    let mut img = vec![0; m * k];
    for b in 0..k {
        let inner = random_perm(rng, m);
        for i in 0..m {
            img[b * m + i] = top.apply(b) * m + inner.apply(i);
        }
    }
    Perm::from_images(img).expect("valid by construction")
}

/// Mixed family: free generators, intransitive products, short cycles and
/// imprimitive groups, all on `n` points.
pub fn random_group<R: Rng>(rng: &mut R, n: usize) -> StabChain {
    let gens: Vec<Perm> = match rng.gen_range(0..4) {
        0 => (0..rng.gen_range(1..=2)).map(|_| random_perm(rng, n)).collect(),
        1 => {
            let parts = random_split(rng, n);
            (0..rng.gen_range(1..=3)).map(|_| part_perm(rng, n, &parts)).collect()
        }
        2 if n >= 2 => (0..rng.gen_range(1..=3)).map(|_| short_cycle(rng, n)).collect(),
        _ => {
            let divisors: Vec<usize> = (1..=n).filter(|m| n % m == 0).collect();
            let m = *divisors.choose(rng).expect("valid by construction");
            (0..rng.gen_range(1..=2)).map(|_| imprimitive_perm(rng, m, n / m)).collect()
        }
    };
    StabChain::new(n, gens).expect("valid by construction")
}

pub fn random_string<R: Rng>(rng: &mut R, n: usize, alphabet: u32) -> Vec<Symbol> {
    (0..n).map(|_| rng.gen_range(0..alphabet)).collect()
}

/// `y` obtained from `x` by a random element of `g`, or a perturbed copy.
pub fn related_string<R: Rng>(rng: &mut R, g: &StabChain, x: &[Symbol], alphabet: u32) -> Vec<Symbol> {
    let h = g.random_element(rng);
    let mut y = vec![0; x.len()];
    for (a, &s) in x.iter().enumerate() {
        y[h.apply(a)] = s;
    }
    if rng.gen_bool(0.25) {
        let i = rng.gen_range(0..y.len());
        y[i] = rng.gen_range(0..alphabet);
    }
    y
}

/// Isomorphism of small graphs by degree-respecting backtracking.
pub fn graphs_isomorphic(a: &Graph, b: &Graph) -> bool {
    let n = a.order();
    if n != b.order() || a.num_edges() != b.num_edges() || a.degree_sequence() != b.degree_sequence() {
        return false;
    }
    fn extend(a: &Graph, b: &Graph, map: &mut Vec<usize>, used: &mut Vec<bool>, v: usize) -> bool {
        if v == a.order() {
            return true;
        }
        for w in 0..b.order() {
            if used[w] || a.degree(v) != b.degree(w) {
                continue;
            }
            if (0..v).any(|u| a.has_edge(u, v) != b.has_edge(map[u], w)) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(a, b, map, used, v + 1) {
                return true;
            }
            used[w] = false;
        }
        false
    }
    extend(a, b, &mut vec![0; n], &mut vec![false; n], 0)
}

/// Connected graphs on `1..=max_n` vertices with maximum degree at most
/// `max_deg`, one per isomorphism class. Every connected graph has a vertex
/// whose removal keeps it connected, so each class on `n` vertices arises by
/// attaching a vertex to a class on `n - 1` vertices.
pub fn connected_graph_classes(max_n: usize, max_deg: usize) -> Vec<Graph> {
    let mut all = vec![Graph::empty(1)];
    let mut layer = vec![Graph::empty(1)];
    for n in 2..=max_n {
        let mut buckets: HashMap<(usize, Vec<usize>), Vec<Graph>> = HashMap::new();
        let mut next = Vec::new();
        for g in &layer {
            let open: Vec<usize> = (0..n - 1).filter(|&v| g.degree(v) < max_deg).collect();
            for mask in 1u32..(1 << open.len()) {
                if mask.count_ones() as usize > max_deg {
                    continue;
                }
                let mut edges = g.edges();
                edges.extend(open.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| (v, n - 1)));
                let h = Graph::new(n, &edges).expect("attached vertex keeps edges valid");
                let key = (h.num_edges(), h.degree_sequence());
                let bucket = buckets.entry(key).or_default();
                if !bucket.iter().any(|c| graphs_isomorphic(c, &h)) {
                    bucket.push(h.clone());
                    next.push(h);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// One string-isomorphism test group: random (`|G| ≤ 10^4`, `n ≤ 10`) or one
/// of the fixed wreath families cut down to at most ten points.
pub fn si_group<R: Rng>(rng: &mut R, i: usize) -> StabChain {
    let fixed = || match i % 5 {
        0 => StabChain::wreath(&StabChain::symmetric(2), &StabChain::symmetric(5)),
        1 => StabChain::wreath(&StabChain::cyclic(2), &StabChain::alternating(5)),
        2 => StabChain::wreath(&StabChain::cyclic(2), &StabChain::alternating(4)),
        3 => StabChain::wreath(&StabChain::cyclic(2), &StabChain::alternating(3)),
        _ => StabChain::wreath(&StabChain::symmetric(3), &StabChain::cyclic(3)),
    };
    if i % 4 == 0 {
        return fixed();
    }
    loop {
        let n = rng.gen_range(1..=10);
        let g = random_group(rng, n);
        if g.order_u64().is_some_and(|o| o <= 10_000) {
            return g;
        }
    }
}

/// One string-isomorphism instance of the seeded suite.
#[derive(Clone, Debug)]
pub struct SiCase {
    pub id: usize,
    pub group: StabChain,
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
}

/// `count` instances over groups from [`si_group`], alphabet of size 3, `y`
/// drawn from the orbit of `x` and perturbed a quarter of the time.
pub fn si_suite(seed: u64, count: usize) -> Vec<SiCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|id| {
            let group = si_group(&mut rng, id);
            let x = random_string(&mut rng, group.degree(), 3);
            let y = related_string(&mut rng, &group, &x, 3);
            SiCase { id, group, x, y }
        })
        .collect()
}

/// Index pairs `(i, j)`, `i ≤ j`, of same-order graphs in a corpus.
pub fn same_order_pairs(corpus: &[Graph]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..corpus.len() {
        for j in i..corpus.len() {
            if corpus[i].order() == corpus[j].order() {
                out.push((i, j));
            }
        }
    }
    out
}

/// One graph-isomorphism instance: two corpus classes of equal order, the
/// second relabelled by a seeded random permutation.
#[derive(Clone, Debug)]
pub struct GiCase {
    pub id: usize,
    pub classes: (usize, usize),
    pub first: Graph,
    pub second: Graph,
}

/// Every same-order pair of [`connected_graph_classes`]`(max_n, max_deg)`.
pub fn gi_suite(seed: u64, max_n: usize, max_deg: usize) -> Vec<GiCase> {
    let corpus = connected_graph_classes(max_n, max_deg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    same_order_pairs(&corpus)
        .into_iter()
        .enumerate()
        .map(|(id, (i, j))| {
            let p = random_perm(&mut rng, corpus[j].order());
            GiCase { id, classes: (i, j), first: corpus[i].clone(), second: corpus[j].permuted(&p) }
        })
        .collect()
}
