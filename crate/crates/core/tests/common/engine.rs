//! Element-enumeration checks for the permutation-group operations.

use std::collections::HashSet;

use isokit::oracle::closure;
use isokit::partition::Partition;
use isokit::perm::{action_on_set, induced_action, Perm, StabChain};
use rand::seq::SliceRandom;
use rand::Rng;

use super::random_perm;

/// All set partitions of `0..n`.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for p in 0..n {
        let mut next = Vec::new();
        for part in out {
            for i in 0..part.len() {
                let mut q: Vec<Vec<usize>> = part.clone();
                q[i].push(p);
                next.push(q);
            }
            let mut q = part;
            q.push(vec![p]);
            next.push(q);
        }
        out = next;
    }
    out
}

fn invariant(blocks: &[Vec<usize>], n: usize, gens: &[Perm]) -> bool {
    let mut idx = vec![0; n];
    for (i, b) in blocks.iter().enumerate() {
        b.iter().for_each(|&p| idx[p] = i);
    }
    gens.iter().all(|g| blocks.iter().all(|b| b.iter().all(|&p| idx[g.apply(p)] == idx[g.apply(b[0])])))
}

fn coarser(a: &[Vec<usize>], b: &Partition) -> bool {
    // every block of `b` inside one block of `a`, and `a` has fewer blocks
    a.len() < b.num_blocks() && b.blocks().iter().all(|blk| a.iter().any(|x| blk.iter().all(|p| x.contains(p))))
}

fn elements_fixing(els: &[Perm], pred: impl Fn(&Perm) -> bool) -> Vec<Perm> {
    els.iter().filter(|g| pred(g)).cloned().collect()
}

fn same_set(g: &StabChain, els: &[Perm]) -> Result<(), String> {
    if g.order_u64() != Some(els.len() as u64) {
        return Err(format!("order {} vs {} elements", g.order(), els.len()));
    }
    if let Some(bad) = els.iter().find(|e| !g.contains(e)) {
        return Err(format!("{bad} missing"));
    }
    Ok(())
}

/// Compare every group operation on `g` with brute enumeration.
pub fn check_against_enumeration<R: Rng>(g: &StabChain, rng: &mut R) -> Result<(), String> {
    let n = g.degree();
    let els = closure(n, g.generators(), 100_000).map_err(|e| e.to_string())?;
    let set: HashSet<&Perm> = els.iter().collect();

    same_set(g, &els).map_err(|e| format!("order/membership: {e}"))?;
    for _ in 0..10 {
        let p = random_perm(rng, n);
        if g.contains(&p) != set.contains(&p) {
            return Err(format!("membership of {p}"));
        }
    }

    let orbits = g.orbits();
    for b in orbits.blocks() {
        let from_els: HashSet<usize> = els.iter().map(|e| e.apply(b[0])).collect();
        if from_els.len() != b.len() || b.iter().any(|p| !from_els.contains(p)) {
            return Err(format!("orbit of {}", b[0] + 1));
        }
    }

    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    let delta = &pts[..rng.gen_range(0..=n.min(3))];
    let stab = g.pointwise_stabilizer(delta);
    let want = elements_fixing(&els, |e| delta.iter().all(|&a| e.apply(a) == a));
    same_set(&stab, &want).map_err(|e| format!("pointwise stabilizer of {delta:?}: {e}"))?;

    if g.is_transitive() && n > 1 {
        let sys = g.min_block_system().map_err(|e| e.to_string())?;
        let blocks = sys.blocks().to_vec();
        if !invariant(&blocks, n, g.generators()) {
            return Err("block system not invariant".into());
        }
        let better = set_partitions(n)
            .into_iter()
            .filter(|q| q.len() > 1 && invariant(q, n, g.generators()))
            .any(|q| coarser(&q, &sys));
        if better {
            return Err(format!("block system {:?} is not maximal", sys.blocks()));
        }
        let hom = induced_action(g, &sys).map_err(|e| e.to_string())?;
        let idx = sys.index_map();
        let want = elements_fixing(&els, |e| (0..n).all(|a| idx[e.apply(a)] == idx[a]));
        same_set(&hom.kernel(), &want).map_err(|e| format!("block kernel: {e}"))?;
        check_preimages(&hom, &els, rng)?;
    }

    let orbit = orbits.blocks()[rng.gen_range(0..orbits.num_blocks())].clone();
    let hom = action_on_set(g, &orbit).map_err(|e| e.to_string())?;
    let want = elements_fixing(&els, |e| orbit.iter().all(|&a| e.apply(a) == a));
    same_set(&hom.kernel(), &want).map_err(|e| format!("orbit kernel: {e}"))?;
    check_preimages(&hom, &els, rng)
}

fn check_preimages<R: Rng>(hom: &isokit::perm::GroupHom, els: &[Perm], rng: &mut R) -> Result<(), String> {
    let images: HashSet<Perm> = els.iter().map(|e| hom.image(e).unwrap()).collect();
    for _ in 0..5 {
        let e = els.choose(rng).unwrap();
        let h = hom.image(e).map_err(|x| x.to_string())?;
        match hom.preimage(&h).map_err(|x| x.to_string())? {
            Some(p) if hom.image(&p).unwrap() == h && els.binary_search(&p).is_ok() => {}
            _ => return Err(format!("preimage of {h}")),
        }
        let q = random_perm(rng, hom.target_degree());
        let found = hom.preimage(&q).map_err(|x| x.to_string())?;
        if found.is_some() != images.contains(&q) {
            return Err(format!("preimage existence of {q}"));
        }
    }
    Ok(())
}
