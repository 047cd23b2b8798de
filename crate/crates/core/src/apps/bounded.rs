//! Isomorphism of graphs of bounded degree through string isomorphism.
//!
//! Connected graphs: fix an oriented edge of the first graph, try every
//! oriented edge of the second with matching end degrees, and grow BFS balls
//! around the fixed edge. Each layer step is one string problem on the
//! boundary half-edges (and their pairs, coloured by shared endpoint) under
//! the current coset extended by local permutations at each tail, followed by
//! one on the new layer checking degrees and inner edges.

use crate::apps::graph::Graph;
use crate::error::{Error, Result};
use crate::luks::{coset_union, shift_string, Solver, Symbol};
use crate::par;
use crate::partition::PartitionSequence;
use crate::perm::{Coset, Perm, StabChain};

/// `Iso(Γ1, Γ2)` as a coset `Aut(Γ1) · π`.
pub fn graph_iso_bounded_degree(g1: &Graph, g2: &Graph, solver: &Solver) -> Result<Option<Coset>> {
    if g1.order() != g2.order() || g1.num_edges() != g2.num_edges() || g1.degree_sequence() != g2.degree_sequence() {
        return Ok(None);
    }
    let n = g1.order();
    if n == 0 {
        return Ok(Some(Coset::group(StabChain::trivial(0))));
    }
    let c1 = g1.components();
    let c2 = g2.components();
    if c1.len() == 1 {
        return connected_iso(g1, g2, solver);
    }
    if c1.len() != c2.len() {
        return Ok(None);
    }
    let parts1: Vec<Graph> = c1.iter().map(|c| g1.induced(c)).collect();
    let parts2: Vec<Graph> = c2.iter().map(|c| g2.induced(c)).collect();
    // match each component of Γ1 to an unused isomorphic component of Γ2, in order
    let mut used = vec![false; c2.len()];
    let mut rep = vec![usize::MAX; n];
    let mut gens: Vec<Perm> = Vec::new();
    // latest member of each isomorphism class of components, for swaps
    let mut latest: Vec<usize> = Vec::new();
    for (i, p1) in parts1.iter().enumerate() {
        let mut matched = None;
        for (j, p2) in parts2.iter().enumerate() {
            if used[j] {
                continue;
            }
            if let Some(c) = connected_iso(p1, p2, solver)? {
                matched = Some((j, c));
                break;
            }
        }
        let Some((j, c)) = matched else { return Ok(None) };
        used[j] = true;
        for (a, &v) in c1[i].iter().enumerate() {
            rep[v] = c2[j][c.rep.apply(a)];
        }
        for h in c.subgroup.generators() {
            gens.push(embed(n, &c1[i], h));
        }
        let mut joined = false;
        for slot in latest.iter_mut() {
            if let Some(iso) = connected_iso(&parts1[*slot], p1, solver)? {
                gens.push(swap(n, &c1[*slot], &c1[i], &iso.rep));
                *slot = i;
                joined = true;
                break;
            }
        }
        if !joined {
            latest.push(i);
        }
    }
    let group = StabChain::new(n, gens)?;
    Ok(Some(Coset { subgroup: group, rep: Perm::from_images(rep)? }))
}

/// `h` on component positions, carried to the component's vertices.
fn embed(n: usize, comp: &[usize], h: &Perm) -> Perm {
    let mut img: Vec<usize> = (0..n).collect();
    for (a, &v) in comp.iter().enumerate() {
        img[v] = comp[h.apply(a)];
    }
    Perm::from_images(img).expect("component map is a bijection")
}

/// Exchange two components along the isomorphism `iso` (positions of `a` to positions of `b`).
fn swap(n: usize, a: &[usize], b: &[usize], iso: &Perm) -> Perm {
    let mut img: Vec<usize> = (0..n).collect();
    for (i, &v) in a.iter().enumerate() {
        let j = iso.apply(i);
        img[v] = b[j];
        img[b[j]] = v;
    }
    Perm::from_images(img).expect("component swap is a bijection")
}

fn connected_iso(g1: &Graph, g2: &Graph, solver: &Solver) -> Result<Option<Coset>> {
    let n = g1.order();
    if n != g2.order() || g1.num_edges() != g2.num_edges() || g1.degree_sequence() != g2.degree_sequence() {
        return Ok(None);
    }
    if !g2.is_connected() {
        return Ok(None);
    }
    if n == 1 {
        return Ok(Some(Coset::group(StabChain::trivial(1))));
    }
    let oriented = |g: &Graph| -> Vec<(usize, usize)> {
        g.edges().into_iter().flat_map(|(u, v)| [(u, v), (v, u)]).collect::<Vec<_>>()
    };
    let (e1s, e2s) = (oriented(g1), oriented(g2));
    let degs = |g: &Graph, (u, v): (usize, usize)| (g.degree(u), g.degree(v));
    let candidates = |e: (usize, usize)| -> Vec<(usize, usize)> {
        let mut c: Vec<(usize, usize)> = e2s.iter().copied().filter(|&f| degs(g2, f) == degs(g1, e)).collect();
        c.sort_unstable();
        c
    };
    let e1 = *e1s
        .iter()
        .min_by_key(|&&e| (candidates(e).len(), e))
        .expect("a connected graph on two or more vertices has an edge");
    let targets = candidates(e1);
    let parts = par::map(&targets, |&e2| rooted_iso(g1, g2, e1, e2, solver));
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    coset_union(&parts)
}

fn bfs_layers(g: &Graph, root: (usize, usize)) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut seen = vec![false; n];
    seen[root.0] = true;
    seen[root.1] = true;
    let mut layers = vec![vec![root.0, root.1]];
    loop {
        let mut next: Vec<usize> = Vec::new();
        for &a in layers.last().expect("nonempty") {
            for &w in g.neighbors(a) {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return layers;
        }
        next.sort_unstable();
        layers.push(next);
    }
}

/// One graph's view of a layer step: half-edges out of layer `r` in
/// position order, with endpoint positions.
struct Boundary {
    offset: Vec<usize>,
    count: Vec<usize>,
    ends: Vec<usize>,
}

fn boundary(g: &Graph, layer: &[usize], pos: &[usize], start: usize, next: &[usize]) -> Boundary {
    let mut inside = vec![false; g.order()];
    next.iter().for_each(|&w| inside[w] = true);
    let mut offset = Vec::with_capacity(layer.len());
    let mut count = Vec::with_capacity(layer.len());
    let mut ends = Vec::new();
    for &a in layer {
        offset.push(ends.len());
        let mut out: Vec<usize> = g.neighbors(a).iter().copied().filter(|&w| inside[w]).map(|w| pos[w]).collect();
        out.sort_unstable();
        count.push(out.len());
        ends.extend(out);
    }
    debug_assert!(ends.iter().all(|&e| e >= start));
    Boundary { offset, count, ends }
}

fn pair_index(q: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * q - i * (i + 1) / 2 + (j - i - 1)
}

/// `g` acting on points `[0, s)`, half-edges `[s, s+q)` and unordered half-edge pairs after that.
fn with_pairs(s: usize, q: usize, on_points: &[usize], on_half: &[usize]) -> Perm {
    let mut img: Vec<usize> = on_points.to_vec();
    img.extend(on_half.iter().map(|&e| s + e));
    for i in 0..q {
        for j in i + 1..q {
            img.push(s + q + pair_index(q, on_half[i], on_half[j]));
        }
    }
    Perm::from_images(img).expect("induced action is a bijection")
}

/// Solve `Iso_{H σ}(x, y)` for `H` on its whole domain with an automatic sequence.
fn coset_iso(solver: &Solver, h: StabChain, sigma: &Perm, x: &[Symbol], y: &[Symbol]) -> Result<Option<Coset>> {
    let seq = PartitionSequence::auto(h)?;
    let y2 = shift_string(y, sigma);
    Ok(solver.string_iso_main(&seq, x, &y2)?.map(|c| c.times(sigma)))
}

fn restrict_coset(c: &Coset, to: usize) -> Result<Coset> {
    let keep: Vec<usize> = (0..to).collect();
    let gens = c.subgroup.generators().iter().map(|g| g.restrict(&keep)).collect::<Result<Vec<_>>>()?;
    Ok(Coset { subgroup: StabChain::new(to, gens)?, rep: c.rep.restrict(&keep)? })
}

/// Isomorphisms mapping the oriented edge `e1` to `e2`.
fn rooted_iso(g1: &Graph, g2: &Graph, e1: (usize, usize), e2: (usize, usize), solver: &Solver) -> Result<Option<Coset>> {
    let n = g1.order();
    let l1 = bfs_layers(g1, e1);
    let l2 = bfs_layers(g2, e2);
    if l1.iter().map(Vec::len).ne(l2.iter().map(Vec::len)) {
        return Ok(None);
    }
    let order1: Vec<usize> = l1.concat();
    let order2: Vec<usize> = l2.concat();
    if order1.len() != n {
        return Err(Error::Precondition("graph is not connected".into()));
    }
    let mut pos1 = vec![0; n];
    let mut pos2 = vec![0; n];
    order1.iter().enumerate().for_each(|(i, &v)| pos1[v] = i);
    order2.iter().enumerate().for_each(|(i, &v)| pos2[v] = i);
    if g1.degree(e1.0) != g2.degree(e2.0) || g1.degree(e1.1) != g2.degree(e2.1) {
        return Ok(None);
    }
    // positions [start, start + len) hold layer r
    let mut cur = Coset::group(StabChain::trivial(2));
    let mut start = 0;
    for r in 0..l1.len() - 1 {
        let s = start + l1[r].len();
        let b1 = boundary(g1, &l1[r], &pos1, s, &l1[r + 1]);
        let b2 = boundary(g2, &l2[r], &pos2, s, &l2[r + 1]);
        let q = b1.ends.len();
        if q != b2.ends.len() {
            return Ok(None);
        }
        let lp = l1[r].len();
        // half-edge at layer position i, slot k  ↦  index offset[i] + k
        let lift = |h: &Perm, from: &Boundary, to: &Boundary| -> Option<Vec<usize>> {
            let mut img = vec![0; q];
            for i in 0..lp {
                let j = h.apply(start + i) - start;
                if from.count[i] != to.count[j] {
                    return None;
                }
                for k in 0..from.count[i] {
                    img[from.offset[i] + k] = to.offset[j] + k;
                }
            }
            Some(img)
        };
        let ident: Vec<usize> = (0..s).collect();
        let mut gens = Vec::new();
        for h in cur.subgroup.generators() {
            let half = lift(h, &b1, &b1).ok_or(Error::NotInvariant)?;
            gens.push(with_pairs(s, q, &h.images().collect::<Vec<_>>(), &half));
        }
        for i in 0..lp {
            let (o, c) = (b1.offset[i], b1.count[i]);
            if c >= 2 {
                let mut t: Vec<usize> = (0..q).collect();
                t.swap(o, o + 1);
                gens.push(with_pairs(s, q, &ident, &t));
                if c >= 3 {
                    let mut cyc: Vec<usize> = (0..q).collect();
                    for k in 0..c {
                        cyc[o + k] = o + (k + 1) % c;
                    }
                    gens.push(with_pairs(s, q, &ident, &cyc));
                }
            }
        }
        let Some(half_rep) = lift(&cur.rep, &b1, &b2) else { return Ok(None) };
        let sigma = with_pairs(s, q, &cur.rep.images().collect::<Vec<_>>(), &half_rep);
        let total = s + q + q * q.saturating_sub(1) / 2;
        let k_group = StabChain::new(total, gens)?;
        let colours = |b: &Boundary| -> Vec<Symbol> {
            let mut x = vec![2; s + q];
            for i in 0..q {
                for j in i + 1..q {
                    x.push((b.ends[i] == b.ends[j]) as Symbol);
                }
            }
            x
        };
        let Some(found) = coset_iso(solver, k_group, &sigma, &colours(&b1), &colours(&b2))? else { return Ok(None) };
        // read off the map on the next layer from half-edge endpoints
        let ln = l1[r + 1].len();
        let s2 = s + ln;
        let mut first_half = vec![usize::MAX; ln];
        for (e, &w) in b1.ends.iter().enumerate().rev() {
            first_half[w - s] = e;
        }
        let extend = |g: &Perm, to: &Boundary| -> Perm {
            let mut img: Vec<usize> = (0..s).map(|p| g.apply(p)).collect();
            for &e in &first_half {
                img.push(to.ends[g.apply(s + e) - s]);
            }
            Perm::from_images(img).expect("endpoint map is a bijection")
        };
        let hgens: Vec<Perm> = found.subgroup.generators().iter().map(|g| extend(g, &b1)).collect();
        let rep = extend(&found.rep, &b2);
        // degrees and edges inside the new layer
        let inner = |g: &Perm| -> Perm {
            let mut img: Vec<usize> = g.images().collect();
            for i in 0..ln {
                for j in i + 1..ln {
                    img.push(s2 + pair_index(ln, g.apply(s + i) - s, g.apply(s + j) - s));
                }
            }
            Perm::from_images(img).expect("induced action is a bijection")
        };
        let m = s2 + ln * ln.saturating_sub(1) / 2;
        let h2 = StabChain::new(m, hgens.iter().map(inner).collect())?;
        let paint = |g: &Graph, order: &[usize]| -> Vec<Symbol> {
            let mut x: Vec<Symbol> = order[..s2].iter().map(|&v| 2 + g.degree(v) as Symbol).collect();
            for i in 0..ln {
                for j in i + 1..ln {
                    x.push(g.has_edge(order[s + i], order[s + j]) as Symbol);
                }
            }
            x
        };
        let Some(next) = coset_iso(solver, h2, &inner(&rep), &paint(g1, &order1), &paint(g2, &order2))? else {
            return Ok(None);
        };
        cur = restrict_coset(&next, s2)?;
        start = s;
    }
    // positions back to vertices
    let sub: Vec<Perm> = cur
        .subgroup
        .generators()
        .iter()
        .map(|h| Perm::from_images((0..n).map(|v| order1[h.apply(pos1[v])]).collect()))
        .collect::<Result<_>>()?;
    let rep = Perm::from_images((0..n).map(|v| order2[cur.rep.apply(pos1[v])]).collect())?;
    Ok(Some(Coset { subgroup: StabChain::new(n, sub)?, rep }))
}
