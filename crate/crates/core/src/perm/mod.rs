//! Permutations, stabilizer chains and the group toolkit built on them.

mod blocks;
mod chain;
mod hom;
mod permutation;
mod search;

pub use blocks::block_closure;
pub use chain::{orbit_of, orbits_of, Elements, Giant, StabChain, ENUM_CAP};
pub use hom::{action_on_set, block_image, induced_action, GroupHom};
pub use permutation::{apply, compose, invert, Perm};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

impl StabChain {
    pub fn setwise_stabilizer(&self, set: &[usize]) -> StabChain {
        search::setwise_stabilizer(self, set)
    }

    /// Some element mapping the set `from` onto the set `to`.
    pub fn set_transporter(&self, from: &[usize], to: &[usize]) -> Option<Perm> {
        search::set_transporter(self, from, to)
    }

    /// Imprimitive wreath product: `outer` permutes `outer.degree()` copies of
    /// the domain of `inner`; point `(b, i)` is `b * m + i`.
    pub fn wreath(inner: &StabChain, outer: &StabChain) -> StabChain {
        let m = inner.degree();
        let k = outer.degree();
        let n = m * k;
        let mut gens = Vec::new();
        for g in inner.generators() {
            let mut img: Vec<usize> = (0..n).collect();
            (0..m).for_each(|i| img[i] = g.apply(i));
            gens.push(Perm::from_images(img).expect("block map is a bijection"));
        }
        for g in outer.generators() {
            let img: Vec<usize> = (0..n).map(|p| g.apply(p / m) * m + p % m).collect();
            gens.push(Perm::from_images(img).expect("block map is a bijection"));
        }
        StabChain::new(n, gens).expect("generators share a domain")
    }

    /// Block system on which the group acts primitively.
    pub fn min_block_system(&self) -> Result<Partition> {
        blocks::min_block_system(self)
    }
}

/// Generators on a shared domain, as read from `{"n": .., "gens": ["(1 2)", ..]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorList {
    pub n: usize,
    pub gens: Vec<Perm>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorListJson {
    n: usize,
    gens: Vec<String>,
}

impl GeneratorList {
    pub fn new(n: usize, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            if g.degree() != n {
                return Err(Error::DomainMismatch { left: n, right: g.degree() });
            }
        }
        Ok(GeneratorList { n, gens })
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let raw: GeneratorListJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let gens = raw.gens.iter().map(|s| Perm::parse(raw.n, s)).collect::<Result<Vec<_>>>()?;
        GeneratorList::new(raw.n, gens)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GeneratorListJson { n: self.n, gens: self.gens.iter().map(|g| g.to_string()).collect() })
            .expect("plain struct serializes")
    }

    pub fn to_group(&self) -> StabChain {
        StabChain::new(self.n, self.gens.clone()).expect("validated on construction")
    }
}

impl From<&StabChain> for GeneratorList {
    fn from(g: &StabChain) -> Self {
        GeneratorList { n: g.degree(), gens: g.generators().to_vec() }
    }
}

/// Group-theoretic coset `subgroup · rep`.
#[derive(Clone, Debug)]
pub struct Coset {
    pub subgroup: StabChain,
    pub rep: Perm,
}

impl Coset {
    pub fn new(subgroup: StabChain, rep: Perm) -> Result<Self> {
        if subgroup.degree() != rep.degree() {
            return Err(Error::DomainMismatch { left: subgroup.degree(), right: rep.degree() });
        }
        Ok(Coset { subgroup, rep })
    }

    pub fn group(g: StabChain) -> Self {
        let n = g.degree();
        Coset { subgroup: g, rep: Perm::identity(n) }
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.subgroup.contains(&p.then(&self.rep.inverse()))
    }

    /// The coset `self · g`.
    pub fn times(&self, g: &Perm) -> Coset {
        Coset { subgroup: self.subgroup.clone(), rep: self.rep.then(g) }
    }

    pub fn degree(&self) -> usize {
        self.rep.degree()
    }

    pub fn size(&self) -> num_bigint::BigUint {
        self.subgroup.order()
    }

    pub fn elements(&self) -> Result<impl Iterator<Item = Perm> + '_> {
        Ok(self.subgroup.elements()?.map(move |h| h.then(&self.rep)))
    }
}
