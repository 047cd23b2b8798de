#![allow(dead_code)]

pub mod engine;

pub use isokit::suites::*;

use std::collections::BTreeSet;

use isokit::certs::GiantRep;
use isokit::luks::Symbol;
use isokit::partition::Partition;
use isokit::perm::{GroupHom, Perm, StabChain};
use isokit::reduction::{JohnsonLevel, Vertex};

/// Top action of a wreath product with blocks of size `m`.
pub fn wreath_top(g: &StabChain, m: usize, k: usize) -> GiantRep {
    let imgs = g.generators().iter().map(|p| Perm::from_images((0..k).map(|b| p.apply(b * m) / m).collect()).unwrap()).collect();
    GiantRep::new(GroupHom::new(g.clone(), k, imgs).unwrap()).unwrap()
}

/// `C_2 wr A_k` on `2k` points plus two points swapped by every block flip.
pub fn parity_wreath(k: usize) -> StabChain {
    let w = StabChain::wreath(&StabChain::cyclic(2), &StabChain::alternating(k));
    let n = 2 * k + 2;
    let gens = w
        .generators()
        .iter()
        .map(|p| {
            let flips = (0..k).filter(|&b| p.apply(2 * b) % 2 == 1).count();
            let mut img: Vec<usize> = (0..n).map(|a| if a < 2 * k { p.apply(a) } else { a }).collect();
            if flips % 2 == 1 {
                img.swap(2 * k, 2 * k + 1);
            }
            Perm::from_images(img).unwrap()
        })
        .collect();
    StabChain::new(n, gens).unwrap()
}

/// `A_k` in natural action with `extra` fixed points appended.
pub fn alt_with_fixed(k: usize, extra: usize) -> StabChain {
    let gens = StabChain::alternating(k).generators().iter().map(|p| p.extend(k + extra)).collect();
    StabChain::new(k + extra, gens).unwrap()
}

/// Projection onto the first `k` points.
pub fn leading_rep(g: &StabChain, k: usize) -> GiantRep {
    let lead: Vec<usize> = (0..k).collect();
    let imgs = g.generators().iter().map(|p| p.restrict(&lead).unwrap()).collect();
    GiantRep::new(GroupHom::new(g.clone(), k, imgs).unwrap()).unwrap()
}

/// The nine-point, two-Johnson-level configuration with `m = 3`, `t = 2`.
pub fn figure_one() -> (Vec<Partition>, Vec<JohnsonLevel>) {
    let chain = vec![
        Partition::trivial(9),
        Partition::new(9, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap(),
        Partition::discrete(9),
    ];
    let pairs = vec![vec![0, 1], vec![0, 2], vec![1, 2]];
    let levels = vec![
        JohnsonLevel { level: 1, m: 3, t: 2, labels: pairs.clone() },
        JohnsonLevel { level: 2, m: 3, t: 2, labels: [pairs.clone(), pairs.clone(), pairs].concat() },
    ];
    (chain, levels)
}

/// Vertices and edges of the drawing, written out by hand.
pub fn figure_one_drawn() -> (BTreeSet<Vertex>, BTreeSet<(Vertex, Vertex)>) {
    let block = |level: usize, b: &[usize]| Vertex::Block { level, block: b.to_vec() };
    let lat = |level: usize, parent: &[usize], set: &[usize]| Vertex::Lattice { level, parent: parent.to_vec(), set: set.to_vec() };
    let omega: Vec<usize> = (0..9).collect();
    let tops: [&[usize]; 3] = [&[0, 1, 2], &[3, 4, 5], &[6, 7, 8]];
    let subsets: [&[usize]; 7] = [&[], &[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]];
    let lattice_edges: [(&[usize], &[usize]); 9] = [
        (&[], &[0]),
        (&[], &[1]),
        (&[], &[2]),
        (&[0], &[0, 1]),
        (&[0], &[0, 2]),
        (&[1], &[0, 1]),
        (&[1], &[1, 2]),
        (&[2], &[0, 2]),
        (&[2], &[1, 2]),
    ];
    let labels: [&[usize]; 3] = [&[0, 1], &[0, 2], &[1, 2]];

    let mut v = BTreeSet::new();
    let mut e = BTreeSet::new();
    v.insert(block(0, &omega));
    for s in subsets {
        v.insert(lat(1, &omega, s));
    }
    e.insert((block(0, &omega), lat(1, &omega, &[])));
    for (a, b) in lattice_edges {
        e.insert((lat(1, &omega, a), lat(1, &omega, b)));
    }
    for (i, top) in tops.iter().enumerate() {
        v.insert(block(1, top));
        e.insert((lat(1, &omega, labels[i]), block(1, top)));
        for s in subsets {
            v.insert(lat(2, top, s));
        }
        e.insert((block(1, top), lat(2, top, &[])));
        for (a, b) in lattice_edges {
            e.insert((lat(2, top, a), lat(2, top, b)));
        }
        for (j, &p) in top.iter().enumerate() {
            v.insert(block(2, &[p]));
            e.insert((lat(2, top, labels[j]), block(2, &[p])));
        }
    }
    (v, e)
}

/// Compare the recursive solver with enumeration on `(x, y)` over `g`.
pub fn si_agrees(solver: &isokit::luks::Solver, g: &StabChain, x: &[Symbol], y: &[Symbol]) -> Result<(), String> {
    use isokit::oracle::{brute_string_iso, coset_matches_elements, OracleConfig};
    let n = g.degree();
    let seq = isokit::partition::PartitionSequence::auto(g.clone()).map_err(|e| e.to_string())?;
    let got = solver.string_iso_main(&seq, x, y).map_err(|e| e.to_string())?;
    let all: Vec<usize> = (0..n).collect();
    let want = brute_string_iso(n, g.generators(), x, y, &all, &OracleConfig::default()).map_err(|e| e.to_string())?;
    if coset_matches_elements(got.as_ref(), &want) {
        Ok(())
    } else {
        Err(format!("gens {:?} x {x:?} y {y:?}: got {:?}, want {} elements", g.generators(), got.map(|c| c.size()), want.len()))
    }
}

/// Inductive-step inequality on one recorded recursion step: when every
/// subproblem has size at most `n/2`, take the least `k` with
/// `Σ n_i ≤ 2^k n` and check `Σ n_i^{k+1} ≤ n^{k+1}` exactly.
/// `None` when the step is outside the lemma's hypothesis.
pub fn recursion_step_holds(entry: &isokit::luks::TraceEntry) -> Option<bool> {
    use num_bigint::BigUint;
    let n = entry.n;
    let sizes: Vec<usize> = entry.subproblem_sizes().collect();
    if n < 2 || sizes.is_empty() || sizes.iter().any(|&s| 2 * s > n) {
        return None;
    }
    let total: usize = sizes.iter().sum();
    let mut k = 0u32;
    while total > (n << k) {
        k += 1;
    }
    let lhs: BigUint = sizes.iter().map(|&s| BigUint::from(s).pow(k + 1)).sum();
    Some(lhs <= BigUint::from(n).pow(k + 1))
}

/// `C(m, k)^{log m} ≥ m^k`, which for `m ≥ 2` is `C(m, k) ≥ 2^k`.
pub fn approx_binom_holds(m: usize, k: usize) -> bool {
    isokit::reduction::binom(m, k) >= 1u128 << k
}

/// `S_m` or `A_m` acting on 2-subsets of `[m]`.
pub fn pairs_action(m: usize, alt: bool) -> StabChain {
    let subsets = isokit::reduction::k_subsets(m, 2);
    let base = if alt { StabChain::alternating(m) } else { StabChain::symmetric(m) };
    let gens = base
        .generators()
        .iter()
        .map(|g| {
            let img = subsets.iter().map(|x| subsets.binary_search(&g.image_of_set(x)).unwrap()).collect();
            Perm::from_images(img).unwrap()
        })
        .collect();
    StabChain::new(subsets.len(), gens).unwrap()
}

/// Transitive group from [`random_group`]; order is capped so the
/// coset-augmented domain stays enumerable.
pub fn transitive_group<R: rand::Rng>(rng: &mut R, n: usize) -> StabChain {
    loop {
        let g = random_group(rng, n);
        if g.is_transitive() && g.order_u64().is_some_and(|o| o <= 720) {
            return g;
        }
    }
}

/// Groups whose primitive sections are all giants, so an eager
/// configuration takes the Johnson branch instead of failing.
pub fn giant_sectioned() -> Vec<StabChain> {
    let (s2, s3, s4, a4) = (StabChain::symmetric(2), StabChain::symmetric(3), StabChain::symmetric(4), StabChain::alternating(4));
    vec![
        StabChain::symmetric(5),
        StabChain::alternating(6),
        StabChain::wreath(&s3, &s2),
        StabChain::wreath(&s2, &s4),
        StabChain::wreath(&s2, &a4),
        StabChain::wreath(&s4, &s2),
        pairs_action(4, false),
    ]
}

/// Size thresholds low enough that every giant section is unfolded.
pub fn eager_reduction() -> isokit::reduction::ReductionConfig {
    isokit::reduction::ReductionConfig { c1: 0.0, c2: 0.5, johnson_guard: false, ..Default::default() }
}

/// Both instances have an isomorphism exactly together, the group order is
/// kept, and lifted isomorphisms stay isomorphisms.
pub fn check_equivalent(
    seq: &isokit::partition::PartitionSequence,
    x: &[Symbol],
    y: &[Symbol],
    aug: &isokit::reduction::AugmentedInstance,
) -> Result<(), String> {
    use isokit::oracle::{brute_string_iso, OracleConfig};
    let n = seq.degree();
    let all: Vec<usize> = (0..n).collect();
    let cfg = OracleConfig::default();
    aug.seq.check_structure().map_err(|e| e.to_string())?;
    let before = brute_string_iso(n, seq.group.generators(), x, y, &all, &cfg).map_err(|e| e.to_string())?;
    let big: Vec<usize> = (0..aug.degree()).collect();
    let after = brute_string_iso(aug.degree(), aug.group.generators(), &aug.x, &aug.y, &big, &cfg).map_err(|e| e.to_string())?;
    if before.is_empty() != after.is_empty() {
        return Err(format!("isomorphic before: {}, after: {}", !before.is_empty(), !after.is_empty()));
    }
    if aug.group.order() != seq.group.order() {
        return Err(format!("order {} became {}", seq.group.order(), aug.group.order()));
    }
    for g in before.iter().take(20) {
        let l = aug.lift(g).map_err(|e| e.to_string())?;
        if !aug.group.contains(&l) || !big.iter().all(|&a| aug.x[a] == aug.y[l.apply(a)]) {
            return Err(format!("lift of {g} is not an isomorphism"));
        }
    }
    if aug.origin.iter().enumerate().any(|(p, &o)| aug.x[p] != x[o]) {
        return Err("augmented string does not follow origins".into());
    }
    Ok(())
}

/// Random subgroup of `g` and a union of its orbits.
pub fn subgroup_and_set<R: rand::Rng>(rng: &mut R, g: &StabChain) -> (StabChain, Vec<usize>) {
    use rand::seq::SliceRandom;
    let gens: Vec<Perm> = (0..rng.gen_range(0..=2)).map(|_| g.random_element(rng)).collect();
    let h = StabChain::new(g.degree(), gens).unwrap();
    let mut orbits = h.orbits().blocks().to_vec();
    orbits.shuffle(rng);
    let keep = rng.gen_range(1..=orbits.len());
    let mut set: Vec<usize> = orbits[..keep].concat();
    set.sort_unstable();
    (h, set)
}

/// The identity representation of a group on its own domain.
pub fn natural_rep(g: &StabChain) -> GiantRep {
    GiantRep::new(GroupHom::new(g.clone(), g.degree(), g.generators().to_vec()).unwrap()).unwrap()
}

/// Image of `h` under the representation.
pub fn rep_image(rep: &GiantRep, h: &StabChain) -> StabChain {
    let gens = h.generators().iter().map(|g| rep.hom.image(g).unwrap()).collect();
    StabChain::new(rep.k, gens).unwrap()
}

/// `|img : sub| ≥ (4/3)^k`, i.e. `4^k ≤ |img : sub| · 3^k`.
pub fn index_bound(img: &StabChain, sub: &StabChain, k: usize) -> bool {
    use num_bigint::BigUint;
    let idx = img.order() / sub.order();
    BigUint::from(4u32).pow(k as u32) <= idx * BigUint::from(3u32).pow(k as u32)
}
