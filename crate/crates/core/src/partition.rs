//! Partitions of a point set, refinement, and almost d-ary invariant sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{block_image, Perm, StabChain};

/// Partition of a subset of `{0, .., n-1}`; blocks sorted, ordered by minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Partition of the whole domain.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self::on_subset(n, blocks)?;
        if p.ground_size() != n {
            return Err(Error::Parse("blocks do not cover the domain".into()));
        }
        Ok(p)
    }

    /// Partition of the union of its blocks, inside a domain of size `n`.
    pub fn on_subset(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            for &p in b {
                if p >= n {
                    return Err(Error::PointOutOfRange { point: p, n });
                }
                if seen[p] {
                    return Err(Error::Parse(format!("point {} in two blocks", p + 1)));
                }
                seen[p] = true;
            }
        }
        Ok(Self::from_blocks_unchecked(n, blocks))
    }

    pub(crate) fn from_blocks_unchecked(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition { n, blocks }
    }

    pub fn trivial(n: usize) -> Self {
        Partition { n, blocks: if n == 0 { vec![] } else { vec![(0..n).collect()] } }
    }

    pub fn discrete(n: usize) -> Self {
        Partition { n, blocks: (0..n).map(|p| vec![p]).collect() }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        g.sort_unstable();
        g
    }

    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() <= 1
    }

    /// `map[p]` = index of the block containing `p` (`usize::MAX` off the ground set).
    pub fn index_map(&self) -> Vec<usize> {
        let mut idx = vec![usize::MAX; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &p in b {
                idx[p] = i;
            }
        }
        idx
    }

    pub fn block_of(&self, p: usize) -> &[usize] {
        self.blocks.iter().find(|b| b.binary_search(&p).is_ok()).map(|b| b.as_slice()).unwrap_or(&[])
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.n != other.n {
            return false;
        }
        let idx = other.index_map();
        self.blocks.iter().all(|b| {
            let j = idx[b[0]];
            j != usize::MAX && b.iter().all(|&p| idx[p] == j)
        })
    }

    /// Largest number of blocks of `self` inside one block of `coarser`.
    pub fn index_in(&self, coarser: &Partition) -> Result<usize> {
        if !self.refines(coarser) {
            return Err(Error::NotRefinement);
        }
        let idx = coarser.index_map();
        let mut count = vec![0usize; coarser.num_blocks()];
        for b in &self.blocks {
            count[idx[b[0]]] += 1;
        }
        Ok(count.into_iter().max().unwrap_or(0))
    }

    /// `{B ∩ S : B ∩ S ≠ ∅}`.
    pub fn induced(&self, set: &[usize]) -> Result<Partition> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut mark = vec![false; self.n];
        for &p in set {
            if p >= self.n {
                return Err(Error::PointOutOfRange { point: p, n: self.n });
            }
            mark[p] = true;
        }
        let blocks: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| b.iter().copied().filter(|&p| mark[p]).collect::<Vec<_>>())
            .filter(|b| !b.is_empty())
            .collect();
        Ok(Partition::from_blocks_unchecked(self.n, blocks))
    }

    pub fn is_invariant(&self, g: &Perm) -> bool {
        block_image(g, self).is_ok()
    }

    /// Relabel the ground points by their position in sorted `set`.
    pub fn relabel_to(&self, set: &[usize]) -> Result<Partition> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &p) in set.iter().enumerate() {
            pos[p] = i;
        }
        let mut blocks = Vec::new();
        for b in &self.blocks {
            let nb: Vec<usize> = b.iter().map(|&p| pos[p]).collect();
            if nb.iter().any(|&p| p == usize::MAX) {
                return Err(Error::Precondition("partition leaves the subset".into()));
            }
            blocks.push(nb);
        }
        Ok(Partition::from_blocks_unchecked(set.len(), blocks))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let blocks: Vec<Vec<usize>> = self.blocks.iter().map(|b| b.iter().map(|p| p + 1).collect()).collect();
        serde_json::json!({ "n": self.n, "blocks": blocks })
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            blocks: Vec<Vec<usize>>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut blocks = Vec::new();
        for b in raw.blocks {
            let mut nb = Vec::new();
            for p in b {
                if p == 0 || p > raw.n {
                    return Err(Error::PointOutOfRange { point: p, n: raw.n });
                }
                nb.push(p - 1);
            }
            blocks.push(nb);
        }
        Partition::new(raw.n, blocks)
    }
}

pub fn refines(p: &Partition, q: &Partition) -> bool {
    p.refines(q)
}

pub fn index(p: &Partition, q: &Partition) -> Result<usize> {
    p.index_in(q)
}

pub fn induced(p: &Partition, set: &[usize]) -> Result<Partition> {
    p.induced(set)
}

/// Every point stabilizer trivial, i.e. every orbit has length `|G|`.
pub fn is_semi_regular(g: &StabChain) -> bool {
    let order = g.order();
    g.orbits().blocks().iter().all(|o| num_bigint::BigUint::from(o.len()) == order)
}

/// Chain `{Ω} = B_0 ≻ … ≻ B_m = singletons` of invariant partitions.
#[derive(Clone, Debug)]
pub struct PartitionSequence {
    pub group: StabChain,
    pub chain: Vec<Partition>,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// 1-based level `i` of the finer partition
    pub level: usize,
    /// block of `B_{i-1}`, 1-indexed points
    pub block: Vec<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl PartitionSequence {
    pub fn new(group: StabChain, chain: Vec<Partition>, d: usize) -> Result<Self> {
        let s = PartitionSequence { group, chain, d };
        s.check_structure()?;
        Ok(s)
    }

    /// `{Ω} ≻ singletons`.
    pub fn two_level(group: StabChain, d: usize) -> Self {
        let n = group.degree();
        let chain = if n <= 1 { vec![Partition::trivial(n)] } else { vec![Partition::trivial(n), Partition::discrete(n)] };
        PartitionSequence { group, chain, d }
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn check_structure(&self) -> Result<()> {
        let n = self.group.degree();
        let bad = |m: &str| Err(Error::StructurallyInvalid(m.to_string()));
        let Some(first) = self.chain.first() else { return bad("empty chain") };
        if first != &Partition::trivial(n) {
            return bad("first partition is not the whole domain");
        }
        if self.chain.last() != Some(&Partition::discrete(n)) {
            return bad("last partition is not discrete");
        }
        for w in self.chain.windows(2) {
            if w[1].degree() != n || w[1].ground_size() != n {
                return bad("partition does not cover the domain");
            }
            if !w[1].refines(&w[0]) || w[1] == w[0] {
                return bad("chain is not strictly refining");
            }
        }
        for p in &self.chain {
            for g in self.group.generators() {
                if !p.is_invariant(g) {
                    return bad("partition not invariant under a generator");
                }
            }
        }
        Ok(())
    }

    /// Almost d-ary check: for each level and each block `B` of the coarser
    /// partition, `G_B` acts semi-regularly on the sub-blocks or there are at most `d` of them.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_structure()?;
        let mut violations = Vec::new();
        for i in 1..self.chain.len() {
            for b in self.chain[i - 1].blocks() {
                let sub = self.chain[i].induced(b)?;
                if sub.num_blocks() <= self.d {
                    continue;
                }
                let gb = self.group.setwise_stabilizer(b);
                let act = action_on_blocks(&gb, &sub)?;
                if !is_semi_regular(&act) {
                    violations.push(Violation {
                        level: i,
                        block: b.iter().map(|p| p + 1).collect(),
                        reason: format!(
                            "{} sub-blocks exceed d = {} and the induced action is not semi-regular",
                            sub.num_blocks(),
                            self.d
                        ),
                    });
                }
            }
        }
        Ok(ValidationReport { valid: violations.is_empty(), violations })
    }

    /// Restrict to a subgroup `h` and an `h`-invariant set; the result lives on
    /// `set` relabelled in sorted order, with repeated partitions collapsed.
    pub fn restrict(&self, h: &StabChain, set: &[usize]) -> Result<PartitionSequence> {
        if !h.is_subgroup_of(&self.group) {
            return Err(Error::NotSubgroup);
        }
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        if !h.is_invariant_set(&s) {
            return Err(Error::NotInvariant);
        }
        let mut chain: Vec<Partition> = Vec::new();
        for p in &self.chain {
            let q = p.induced(&s)?.relabel_to(&s)?;
            if chain.last() != Some(&q) {
                chain.push(q);
            }
        }
        let hr = h.restrict(&s)?;
        Ok(PartitionSequence { group: hr, chain, d: self.d })
    }

    /// A chain for an arbitrary group: orbits first, then inside each orbit a
    /// maximal tower of block systems, each grown from a maximal block of the
    /// block stabilizer. `d` is the least value making the chain almost d-ary.
    pub fn auto(group: StabChain) -> Result<PartitionSequence> {
        let n = group.degree();
        let orbits = group.orbits();
        let towers: Vec<Vec<Vec<Vec<usize>>>> = orbits.blocks().iter().map(|o| block_tower(&group, o)).collect::<Result<_>>()?;
        let mut chain = vec![Partition::trivial(n)];
        if orbits.num_blocks() > 1 {
            chain.push(orbits.clone());
        }
        let depth = towers.iter().map(|t| t.len()).max().unwrap_or(0);
        for lvl in 1..depth {
            let mut blocks = Vec::new();
            for t in &towers {
                blocks.extend(t[lvl.min(t.len() - 1)].iter().cloned());
            }
            let p = Partition::from_blocks_unchecked(n, blocks);
            if chain.last() != Some(&p) {
                chain.push(p);
            }
        }
        if n > 0 && chain.last() != Some(&Partition::discrete(n)) {
            chain.push(Partition::discrete(n));
        }
        let mut s = PartitionSequence { group, chain, d: 1 };
        s.d = s.minimal_d()?;
        Ok(s)
    }

    /// Least `d` (at least 1) for which the chain is almost d-ary.
    pub fn minimal_d(&self) -> Result<usize> {
        self.check_structure()?;
        let mut d = 1;
        for i in 1..self.chain.len() {
            for b in self.chain[i - 1].blocks() {
                let sub = self.chain[i].induced(b)?;
                if sub.num_blocks() <= d {
                    continue;
                }
                let gb = self.group.setwise_stabilizer(b);
                if !is_semi_regular(&action_on_blocks(&gb, &sub)?) {
                    d = sub.num_blocks();
                }
            }
        }
        Ok(d)
    }

    /// Same chain attached to a subgroup on the same domain.
    pub fn with_group(&self, h: StabChain) -> PartitionSequence {
        PartitionSequence { group: h, chain: self.chain.clone(), d: self.d }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "sequence": self.chain.iter().map(|p| p.to_json_value()).collect::<Vec<_>>(),
        })
    }

    /// Accepts `{"d": .., "sequence": [..]}` or a bare array (then `d` is required).
    pub fn chain_from_json_value(v: &serde_json::Value, default_d: Option<usize>) -> Result<(Vec<Partition>, usize)> {
        let (arr, d) = match v {
            serde_json::Value::Array(a) => (a.clone(), default_d),
            serde_json::Value::Object(o) => {
                let arr = o
                    .get("sequence")
                    .or_else(|| o.get("partitions"))
                    .and_then(|x| x.as_array())
                    .cloned()
                    .ok_or_else(|| Error::Parse("missing sequence array".into()))?;
                let d = o.get("d").and_then(|x| x.as_u64()).map(|x| x as usize).or(default_d);
                (arr, d)
            }
            _ => return Err(Error::Parse("sequence must be an array or object".into())),
        };
        let d = d.ok_or_else(|| Error::Parse("missing d".into()))?;
        let chain = arr.iter().map(Partition::from_json_value).collect::<Result<Vec<_>>>()?;
        Ok((chain, d))
    }
}

/// Partitions of one orbit `o`, coarse to fine, ending in singletons.
fn block_tower(g: &StabChain, o: &[usize]) -> Result<Vec<Vec<Vec<usize>>>> {
    let n = g.degree();
    let mut tower = vec![vec![o.to_vec()]];
    let mut block = o.to_vec();
    while block.len() > 1 {
        let stab = g.setwise_stabilizer(&block).restrict(&block)?;
        let sys = stab.min_block_system()?;
        let sub: Vec<usize> = sys.block_of(0).iter().map(|&i| block[i]).collect();
        let closure = crate::perm::block_closure(n, g.generators(), &sub);
        let level: Vec<Vec<usize>> = closure.blocks().iter().filter(|b| o.contains(&b[0])).cloned().collect();
        tower.push(level);
        block = sub;
    }
    Ok(tower)
}

/// Restrict each partition to `set`, relabel by position, drop repeats.
pub(crate) fn restrict_chain(chain: &[Partition], set: &[usize]) -> Result<Vec<Partition>> {
    let mut out: Vec<Partition> = Vec::new();
    for p in chain {
        let q = p.induced(set)?.relabel_to(set)?;
        if out.last() != Some(&q) {
            out.push(q);
        }
    }
    Ok(out)
}

/// The action of `g` on the blocks of `sub` (which `g` must preserve).
pub fn action_on_blocks(g: &StabChain, sub: &Partition) -> Result<StabChain> {
    let gens = g.generators().iter().map(|h| block_image(h, sub)).collect::<Result<Vec<_>>>()?;
    StabChain::new(sub.num_blocks(), gens)
}

pub fn validate_almost_d_ary(s: &PartitionSequence) -> Result<ValidationReport> {
    s.validate()
}

pub fn restrict_sequence(s: &PartitionSequence, h: &StabChain, set: &[usize]) -> Result<PartitionSequence> {
    s.restrict(h, set)
}
