use std::sync::OnceLock;

use num_bigint::BigUint;

use super::chain::StabChain;
use super::permutation::{check_same, Perm};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Homomorphism given by images of the source generators. Internally the
/// graph `{(g, g^φ)}` is kept as a group on `n + m` points.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: StabChain,
    target_n: usize,
    images: Vec<Perm>,
    image: StabChain,
    // graph chain with base starting on source base points
    by_source: StabChain,
    by_target: StabChain,
    source_prefix: usize,
    target_prefix: usize,
    kernel: OnceLock<StabChain>,
}

fn pair(a: &Perm, b: &Perm) -> Perm {
    let n = a.degree();
    let mut img: Vec<u32> = a.raw().to_vec();
    img.extend(b.raw().iter().map(|&p| p + n as u32));
    Perm::from_u32_unchecked(img)
}

fn split(d: &Perm, n: usize) -> (Perm, Perm) {
    let raw = d.raw();
    let a = Perm::from_u32_unchecked(raw[..n].to_vec());
    let b = Perm::from_u32_unchecked(raw[n..].iter().map(|&p| p - n as u32).collect());
    (a, b)
}

impl GroupHom {
    /// `images[i]` is the image of `source.generators()[i]`.
    pub fn new(source: StabChain, target_n: usize, images: Vec<Perm>) -> Result<Self> {
        if images.len() != source.generators().len() {
            return Err(Error::Precondition("one image per source generator".into()));
        }
        for im in &images {
            check_same(target_n, im.degree())?;
        }
        let n = source.degree();
        let order = source.order();
        let graph_gens: Vec<Perm> = source.generators().iter().zip(&images).map(|(g, h)| pair(g, h)).collect();
        let sbase = source.base();
        let graph = StabChain::build(n + target_n, graph_gens.clone(), &sbase, None);
        if graph.order() != order {
            return Err(Error::NotHomomorphism);
        }
        let image = StabChain::build(target_n, images.clone(), &[], None);
        let tbase: Vec<usize> = image.base().iter().map(|&p| p + n).collect();
        let by_target = StabChain::build(n + target_n, graph.strong_generators(), &tbase, Some(&order));
        Ok(GroupHom {
            source,
            target_n,
            images,
            image,
            by_source: graph,
            by_target,
            source_prefix: sbase.len(),
            target_prefix: tbase.len(),
            kernel: OnceLock::new(),
        })
    }

    /// For maps known to be homomorphisms (block actions, restrictions,
    /// compositions of such); skips the graph-order check.
    pub(crate) fn trusted(source: StabChain, target_n: usize, images: Vec<Perm>) -> GroupHom {
        let n = source.degree();
        let order = source.order();
        let graph_gens: Vec<Perm> = source.generators().iter().zip(&images).map(|(g, h)| pair(g, h)).collect();
        let sbase = source.base();
        let graph = StabChain::build(n + target_n, graph_gens, &sbase, Some(&order));
        let image = StabChain::build(target_n, images.clone(), &[], None);
        let tbase: Vec<usize> = image.base().iter().map(|&p| p + n).collect();
        let by_target = StabChain::build(n + target_n, graph.strong_generators(), &tbase, Some(&order));
        GroupHom {
            source,
            target_n,
            images,
            image,
            by_source: graph,
            by_target,
            source_prefix: sbase.len(),
            target_prefix: tbase.len(),
            kernel: OnceLock::new(),
        }
    }

    pub fn source(&self) -> &StabChain {
        &self.source
    }

    pub fn target_degree(&self) -> usize {
        self.target_n
    }

    pub fn generator_images(&self) -> &[Perm] {
        &self.images
    }

    /// The image group `G^φ`.
    pub fn image_group(&self) -> &StabChain {
        &self.image
    }

    /// Image of an element of the source group.
    pub fn image(&self, g: &Perm) -> Result<Perm> {
        let n = self.source.degree();
        check_same(n, g.degree())?;
        let e = pair(g, &Perm::identity(self.target_n));
        let mut cur = e;
        for k in 0..self.source_prefix {
            let lv = &self.by_source.levels()[k];
            let b = cur.apply(lv.point);
            match &lv.inv[b] {
                None => return Err(Error::Precondition("element not in source group".into())),
                Some(u) => cur = cur.then(u),
            }
        }
        let (x, y) = split(&cur, n);
        if !x.is_identity() {
            return Err(Error::Precondition("element not in source group".into()));
        }
        Ok(y.inverse())
    }

    pub fn kernel(&self) -> StabChain {
        self.kernel.get_or_init(|| self.compute_kernel()).clone()
    }

    fn compute_kernel(&self) -> StabChain {
        let n = self.source.degree();
        let tail = self.by_target.tail(self.target_prefix);
        let gens: Vec<Perm> = tail.strong_generators().iter().map(|d| split(d, n).0).collect();
        let ko = self.source.order() / self.image.order();
        StabChain::build(n, gens, &self.source.base(), Some(&ko))
    }

    /// Some preimage of `h`, or `None` when `h` is not in the image.
    pub fn preimage(&self, h: &Perm) -> Result<Option<Perm>> {
        check_same(self.target_n, h.degree())?;
        let n = self.source.degree();
        let mut cur = pair(&Perm::identity(n), h);
        for k in 0..self.target_prefix {
            let lv = &self.by_target.levels()[k];
            let b = cur.apply(lv.point);
            match &lv.inv[b] {
                None => return Ok(None),
                Some(u) => cur = cur.then(u),
            }
        }
        let (x, y) = split(&cur, n);
        if !y.is_identity() {
            return Ok(None);
        }
        Ok(Some(x.inverse()))
    }

    /// Full preimage of a subgroup of the image.
    pub fn preimage_group(&self, h: &StabChain) -> Result<StabChain> {
        let mut gens = self.kernel().strong_generators();
        for g in h.generators() {
            match self.preimage(g)? {
                Some(p) => gens.push(p),
                None => return Err(Error::NotSubgroup),
            }
        }
        let o: BigUint = self.kernel().order() * h.order();
        Ok(StabChain::build(self.source.degree(), gens, &self.source.base(), Some(&o)))
    }

    /// Restrict the source to a subgroup.
    pub fn restrict_to(&self, sub: &StabChain) -> Result<GroupHom> {
        let imgs = sub.generators().iter().map(|g| self.image(g)).collect::<Result<Vec<_>>>()?;
        Ok(GroupHom::trusted(sub.clone(), self.target_n, imgs))
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        let imgs = self.images.iter().map(|g| other.image(g)).collect::<Result<Vec<_>>>()?;
        Ok(GroupHom::trusted(self.source.clone(), other.target_n, imgs))
    }
}

/// Permutation of the blocks induced by `g`; blocks indexed by minimum element.
pub fn block_image(g: &Perm, blocks: &Partition) -> Result<Perm> {
    let idx = blocks.index_map();
    let mut img = Vec::with_capacity(blocks.num_blocks());
    for b in blocks.blocks() {
        let j = idx[g.apply(b[0])];
        if j == usize::MAX || blocks.blocks()[j].len() != b.len() || b.iter().any(|&p| idx[g.apply(p)] != j) {
            return Err(Error::NotInvariant);
        }
        img.push(j);
    }
    Perm::from_images(img)
}

/// The action `G → Sym(blocks)`.
pub fn induced_action(g: &StabChain, blocks: &Partition) -> Result<GroupHom> {
    check_same(g.degree(), blocks.degree())?;
    let imgs = g.generators().iter().map(|h| block_image(h, blocks)).collect::<Result<Vec<_>>>()?;
    Ok(GroupHom::trusted(g.clone(), blocks.num_blocks(), imgs))
}

/// The restriction homomorphism to an invariant set (relabelled in sorted order).
pub fn action_on_set(g: &StabChain, set: &[usize]) -> Result<GroupHom> {
    let mut s = set.to_vec();
    s.sort_unstable();
    let imgs = g.generators().iter().map(|h| h.restrict(&s)).collect::<Result<Vec<_>>>()?;
    Ok(GroupHom::trusted(g.clone(), s.len(), imgs))
}
