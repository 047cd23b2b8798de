use serde::Deserialize;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Finite simple undirected graph on `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::PointOutOfRange { point: u, n });
            }
            if v >= n {
                return Err(Error::PointOutOfRange { point: v, n });
            }
            if u == v {
                return Err(Error::Parse(format!("loop at vertex {}", u + 1)));
            }
            if adj[u].contains(&v) {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        Ok(Graph { n, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n] }
    }

    pub fn cycle(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &e).expect("cycle is simple for n >= 3")
    }

    pub fn complete(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::new(n, &e).unwrap()
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &e).unwrap()
    }

    pub fn petersen() -> Self {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, &e).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let e: Vec<(usize, usize)> = (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j))).collect();
        Graph::new(a + b, &e).unwrap()
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut e = self.edges();
        e.extend(other.edges().into_iter().map(|(u, v)| (u + self.n, v + self.n)));
        Graph::new(self.n + other.n, &e).unwrap()
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    e.push((u, v));
                }
            }
        }
        e
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(|a| a.len()).collect();
        d.sort_unstable();
        d
    }

    /// Connected components, each sorted, ordered by minimum vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Induced subgraph on `verts`, relabelled by position.
    pub fn induced(&self, verts: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let mut e = Vec::new();
        for (i, &v) in verts.iter().enumerate() {
            for &w in &self.adj[v] {
                if pos[w] != usize::MAX && i < pos[w] {
                    e.push((i, pos[w]));
                }
            }
        }
        Graph::new(verts.len(), &e).unwrap()
    }

    /// The graph with vertex `v` renamed `v^p`.
    pub fn permuted(&self, p: &Perm) -> Graph {
        let e: Vec<(usize, usize)> = self.edges().into_iter().map(|(u, v)| (p.apply(u), p.apply(v))).collect();
        Graph::new(self.n, &e).unwrap()
    }

    /// `p` maps edges of `self` onto edges of `other`.
    pub fn is_isomorphism(&self, other: &Graph, p: &Perm) -> bool {
        self.n == other.n
            && self.num_edges() == other.num_edges()
            && self.edges().iter().all(|&(u, v)| other.has_edge(p.apply(u), p.apply(v)))
    }

    /// Edge list text: one `u v` per line, 1-indexed; `#`/`c` comments and a
    /// `p edge n m` header are accepted. Without a header `n` is the largest vertex.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut maxv = 0;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("c ") || line == "c" {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] == "p" {
                if toks.len() < 3 {
                    return Err(Error::Parse(format!("bad header {line:?}")));
                }
                n = Some(toks[2].parse().map_err(|_| Error::Parse(format!("bad header {line:?}")))?);
                continue;
            }
            let toks: Vec<&str> = if toks[0] == "e" { toks[1..].to_vec() } else { toks };
            if toks.len() != 2 {
                return Err(Error::Parse(format!("bad edge line {line:?}")));
            }
            let u: usize = toks[0].parse().map_err(|_| Error::Parse(format!("bad vertex {:?}", toks[0])))?;
            let v: usize = toks[1].parse().map_err(|_| Error::Parse(format!("bad vertex {:?}", toks[1])))?;
            if u == 0 || v == 0 {
                return Err(Error::Parse("vertices are 1-indexed".into()));
            }
            maxv = maxv.max(u).max(v);
            edges.push((u - 1, v - 1));
        }
        let n = n.unwrap_or(maxv);
        if maxv > n {
            return Err(Error::PointOutOfRange { point: maxv, n });
        }
        Graph::new(n, &edges)
    }

    /// JSON `{"n": 6, "edges": [[1,2], ...]}` (1-indexed).
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.edges.iter().any(|&(u, v)| u == 0 || v == 0) {
            return Err(Error::Parse("vertices are 1-indexed".into()));
        }
        let e: Vec<(usize, usize)> = raw.edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        Graph::new(raw.n, &e)
    }

    /// JSON if the text starts with `{`, edge list otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Graph::from_json(text)
        } else {
            Graph::parse_edge_list(text)
        }
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("p edge {} {}\n", self.n, self.num_edges());
        for (u, v) in self.edges() {
            s.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_formats() {
        let g = Graph::parse("p edge 4 2\n1 2\n3 4\n").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.num_edges(), 2);
        let h = Graph::parse("{\"n\": 4, \"edges\": [[1,2],[3,4]]}").unwrap();
        assert_eq!(g, h);
        assert_eq!(Graph::parse(&g.to_edge_list()).unwrap(), g);
        assert!(Graph::parse("1 1\n").is_err());
    }

    #[test]
    fn petersen_is_cubic() {
        let p = Graph::petersen();
        assert_eq!(p.num_edges(), 15);
        assert!(p.degree_sequence().iter().all(|&d| d == 3));
    }
}
