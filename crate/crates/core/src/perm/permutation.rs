use std::fmt;

use crate::error::{Error, Result};

/// Bijection of `{0, .., n-1}`. Cycle notation and all I/O are 1-indexed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    img: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { img: (0..n as u32).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &p in &images {
            if p >= n || seen[p] {
                return Err(Error::NotBijection);
            }
            seen[p] = true;
        }
        Ok(Perm { img: images.into_iter().map(|p| p as u32).collect() })
    }

    pub(crate) fn from_u32_unchecked(img: Vec<u32>) -> Self {
        Perm { img }
    }

    /// Build from 0-indexed cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut img: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for c in cycles {
            for &p in c {
                if p >= n {
                    return Err(Error::PointOutOfRange { point: p + 1, n });
                }
                if touched[p] {
                    return Err(Error::Parse(format!("point {} repeated in cycles", p + 1)));
                }
                touched[p] = true;
            }
            for (i, &p) in c.iter().enumerate() {
                img[p] = c[(i + 1) % c.len()] as u32;
            }
        }
        Ok(Perm { img })
    }

    /// Parse `"(1 2 3)(4 5)"`; `"()"` is the identity.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {s:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {s:?}")))?;
            let body = &open[..close];
            let mut cyc = Vec::new();
            for tok in body.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point {tok:?}")))?;
                if v == 0 || v > n {
                    return Err(Error::PointOutOfRange { point: v, n });
                }
                cyc.push(v - 1);
            }
            if !cyc.is_empty() {
                cycles.push(cyc);
            }
            rest = open[close + 1..].trim_start();
        }
        Perm::from_cycles(n, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.img[p] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.img.iter().map(|&p| p as usize)
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.img
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    /// `a.then(b)` applies `a` first, then `b`.
    #[inline]
    pub fn then(&self, b: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), b.degree());
        Perm { img: self.img.iter().map(|&p| b.img[p as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.img.len()];
        for (i, &p) in self.img.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Perm { img: inv }
    }

    pub fn pow(&self, e: usize) -> Perm {
        let mut out = Perm::identity(self.degree());
        for _ in 0..e {
            out = out.then(self);
        }
        out
    }

    /// `g^-1 self g`
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || self.apply(s) == s {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut p = self.apply(s);
            while p != s {
                seen[p] = true;
                c.push(p);
                p = self.apply(p);
            }
            out.push(c);
        }
        out
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&p| self.apply(p) != p).collect()
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.img.iter().enumerate().find(|(i, &p)| *i as u32 != p).map(|(i, _)| i)
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> u64 {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        self.cycles().iter().fold(1u64, |acc, c| {
            let l = c.len() as u64;
            acc / gcd(acc, l) * l
        })
    }

    /// Image of a point set, sorted.
    pub fn image_of_set(&self, set: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&p| self.apply(p)).collect();
        v.sort_unstable();
        v
    }

    /// Restriction to an invariant set, relabelled by position in `set` (sorted).
    pub fn restrict(&self, set: &[usize]) -> Result<Perm> {
        let mut pos = vec![usize::MAX; self.degree()];
        for (i, &p) in set.iter().enumerate() {
            pos[p] = i;
        }
        let mut img = Vec::with_capacity(set.len());
        for &p in set {
            let q = pos[self.apply(p)];
            if q == usize::MAX {
                return Err(Error::NotInvariant);
            }
            img.push(q as u32);
        }
        Ok(Perm { img })
    }

    /// Embed into a larger domain by fixing the new points.
    pub fn extend(&self, n: usize) -> Perm {
        let mut img = self.img.clone();
        img.extend(self.degree() as u32..n as u32);
        Perm { img }
    }

    /// Relabel through an injective point map `map[old] = new` into a domain of size `n`.
    pub fn relabel(&self, map: &[usize], n: usize) -> Perm {
        let mut img: Vec<u32> = (0..n as u32).collect();
        for (i, &p) in self.img.iter().enumerate() {
            img[map[i]] = map[p as usize] as u32;
        }
        Perm { img }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.cycles();
        if cs.is_empty() {
            return write!(f, "()");
        }
        for c in cs {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}; {}]", self.degree(), self)
    }
}

pub fn compose(a: &Perm, b: &Perm) -> Result<Perm> {
    check_same(a.degree(), b.degree())?;
    Ok(a.then(b))
}

pub fn invert(a: &Perm) -> Perm {
    a.inverse()
}

pub fn apply(a: &Perm, p: usize) -> Result<usize> {
    if p >= a.degree() {
        return Err(Error::PointOutOfRange { point: p, n: a.degree() });
    }
    Ok(a.apply(p))
}

pub(crate) fn check_same(l: usize, r: usize) -> Result<()> {
    if l != r {
        Err(Error::DomainMismatch { left: l, right: r })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_roundtrip() {
        let p = Perm::parse(5, "(1 2 3)(4 5)").unwrap();
        assert_eq!(p.to_string(), "(1 2 3)(4 5)");
        assert_eq!(Perm::parse(3, "()").unwrap(), Perm::identity(3));
        assert_eq!(Perm::identity(4).to_string(), "()");
    }

    #[test]
    fn basic_ops() {
        let t = Perm::parse(3, "(1 2)").unwrap();
        assert!(compose(&t, &t).unwrap().is_identity());
        let c = Perm::parse(3, "(1 2 3)").unwrap();
        assert_eq!(invert(&c).to_string(), "(1 3 2)");
        assert_eq!(c.apply(0), 1);
        let a = Perm::parse(3, "(1 2)").unwrap();
        let b = Perm::parse(3, "(2 3)").unwrap();
        // a then b: 1 -> 2 -> 3
        assert_eq!(a.then(&b).apply(0), 2);
        assert!(compose(&a, &Perm::identity(4)).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(Perm::parse(3, "(1 4)").is_err());
        assert!(Perm::parse(3, "(1 2").is_err());
        assert!(Perm::parse(3, "(1 2)(2 3)").is_err());
        assert!(Perm::from_images(vec![0, 0]).is_err());
    }
}
