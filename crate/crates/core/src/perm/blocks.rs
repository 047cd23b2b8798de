use super::chain::StabChain;
use super::permutation::Perm;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Finest invariant partition in which all of `seed` lies in one block.
pub fn block_closure(n: usize, gens: &[Perm], seed: &[usize]) -> Partition {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut queue: Vec<(usize, usize)> = Vec::new();
    if let Some(&first) = seed.first() {
        for &s in &seed[1..] {
            let (a, b) = (find(&mut parent, first), find(&mut parent, s));
            if a != b {
                parent[a.max(b)] = a.min(b);
                queue.push((a, b));
            }
        }
    }
    while let Some((a, b)) = queue.pop() {
        for g in gens {
            let (x, y) = (find(&mut parent, g.apply(a)), find(&mut parent, g.apply(b)));
            if x != y {
                parent[x.max(y)] = x.min(y);
                queue.push((x, y));
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut idx = vec![usize::MAX; n];
    for p in 0..n {
        let r = find(&mut parent, p);
        if idx[r] == usize::MAX {
            idx[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[idx[r]].push(p);
    }
    Partition::from_blocks_unchecked(n, blocks)
}

/// Block system with primitive action on the blocks (inclusion-maximal blocks).
/// Singletons iff the group is primitive.
pub(crate) fn min_block_system(g: &StabChain) -> Result<Partition> {
    let n = g.degree();
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let gens = g.generators();
    let mut block = vec![0usize];
    'grow: loop {
        for beta in 0..n {
            if block.contains(&beta) {
                continue;
            }
            let mut seed = block.clone();
            seed.push(beta);
            let sys = block_closure(n, gens, &seed);
            if sys.num_blocks() > 1 {
                block = sys.block_of(0).to_vec();
                continue 'grow;
            }
        }
        break;
    }
    Ok(block_closure(n, gens, &block))
}
