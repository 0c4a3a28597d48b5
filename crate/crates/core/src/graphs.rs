//! Labeled simple graphs, their statistics, and the two random models:
//! independent edges (Erdos-Renyi) and inner-product thresholding of
//! uniform sphere points.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A labeled simple graph on vertices 0..n with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
}

/// Vertex, edge, degree, and triangle statistics of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    /// Number of nonisolated vertices.
    pub mu: u64,
    /// Number of edges.
    pub sigma: u64,
    /// Maximum degree.
    pub delta: u64,
    /// Number of triangles.
    pub tau: u64,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    /// Build from an edge list; rejects self-loops and out-of-range
    /// endpoints, deduplicates repeated edges.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(j, k) in edges {
            g.add_edge(j, k)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for j in 0..n as u32 {
            for k in (j + 1)..n as u32 {
                g.add_edge(j, k).expect("complete graph edges are valid");
            }
        }
        g
    }

    pub fn add_edge(&mut self, j: u32, k: u32) -> Result<()> {
        if j == k {
            return Err(Error::param(format!("self-loop at vertex {j}")));
        }
        if j as usize >= self.n || k as usize >= self.n {
            return Err(Error::param(format!(
                "edge ({j},{k}) out of range for n = {}",
                self.n
            )));
        }
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        if let Err(pos) = self.adj[a as usize].binary_search(&b) {
            self.adj[a as usize].insert(pos, b);
            let pos2 = self.adj[b as usize]
                .binary_search(&a)
                .expect_err("adjacency lists out of sync");
            self.adj[b as usize].insert(pos2, a);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, j: u32, k: u32) -> bool {
        j != k
            && (j as usize) < self.n
            && (k as usize) < self.n
            && self.adj[j as usize].binary_search(&k).is_ok()
    }

    pub fn edge_count(&self) -> u64 {
        self.adj.iter().map(|a| a.len() as u64).sum::<u64>() / 2
    }

    /// Edges as (j, k) pairs with j < k, in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count() as usize);
        for j in 0..self.n as u32 {
            for &k in &self.adj[j as usize] {
                if k > j {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Copy with isolated vertices removed and the rest relabeled in
    /// increasing order of original label.
    pub fn strip_isolated(&self) -> Graph {
        let keep: Vec<u32> = (0..self.n as u32).filter(|&v| self.degree(v) > 0).collect();
        let mut remap = vec![u32::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let mut g = Graph::empty(keep.len());
        for (j, k) in self.edges() {
            g.add_edge(remap[j as usize], remap[k as usize])
                .expect("relabeled edges are valid");
        }
        g
    }

    /// Serialize as the edge-list text format: a header line `n <count>`
    /// followed by one `j k` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (j, k) in self.edges() {
            s.push_str(&format!("{j} {k}\n"));
        }
        s
    }

    /// Parse the edge-list text format produced by `to_edge_list`.
    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::param("empty graph file"))?;
        let mut toks = header.split_whitespace();
        match (toks.next(), toks.next(), toks.next()) {
            (Some("n"), Some(cnt), None) => {
                let n: usize = cnt
                    .parse()
                    .map_err(|_| Error::param(format!("bad vertex count {cnt:?}")))?;
                let mut g = Graph::empty(n);
                for line in lines {
                    let mut it = line.split_whitespace();
                    let (a, b) = match (it.next(), it.next(), it.next()) {
                        (Some(a), Some(b), None) => (a, b),
                        _ => return Err(Error::param(format!("bad edge line {line:?}"))),
                    };
                    let j: u32 = a
                        .parse()
                        .map_err(|_| Error::param(format!("bad vertex {a:?}")))?;
                    let k: u32 = b
                        .parse()
                        .map_err(|_| Error::param(format!("bad vertex {b:?}")))?;
                    g.add_edge(j, k)?;
                }
                Ok(g)
            }
            _ => Err(Error::param(format!("bad header line {header:?}"))),
        }
    }
}

/// Exact graph statistics. Triangles are counted by merge-intersecting the
/// sorted adjacency lists of each edge's endpoints.
pub fn graph_stats(g: &Graph) -> GraphStats {
    let mu = (0..g.n as u32).filter(|&v| g.degree(v) > 0).count() as u64;
    let sigma = g.edge_count();
    let delta = (0..g.n as u32).map(|v| g.degree(v) as u64).max().unwrap_or(0);
    let mut tri3 = 0u64; // each triangle counted once per edge, i.e. 3 times
    for (j, k) in g.edges() {
        let a = &g.adj[j as usize];
        let b = &g.adj[k as usize];
        let (mut ia, mut ib) = (0, 0);
        while ia < a.len() && ib < b.len() {
            match a[ia].cmp(&b[ib]) {
                std::cmp::Ordering::Less => ia += 1,
                std::cmp::Ordering::Greater => ib += 1,
                std::cmp::Ordering::Equal => {
                    tri3 += 1;
                    ia += 1;
                    ib += 1;
                }
            }
        }
    }
    GraphStats {
        mu,
        sigma,
        delta,
        tau: tri3 / 3,
    }
}

/// Uniform points on the unit sphere in `R^d`: normalized standard
/// normal vectors.
pub fn sample_sphere_points<R: Rng>(count: usize, d: u32, rng: &mut R) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v: Vec<f64>;
        loop {
            v = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                for x in &mut v {
                    *x /= norm;
                }
                break;
            }
        }
        out.push(v);
    }
    out
}

/// Spherical random geometric graph: n uniform sphere points, edge (j,k)
/// present iff their inner product is at least t.
pub fn sample_rgg<R: Rng>(n: usize, d: u32, t: f64, rng: &mut R) -> Graph {
    let pts = sample_sphere_points(n, d, rng);
    let mut g = Graph::empty(n);
    for j in 0..n {
        for k in (j + 1)..n {
            let ip: f64 = pts[j].iter().zip(&pts[k]).map(|(a, b)| a * b).sum();
            if ip >= t {
                g.add_edge(j as u32, k as u32).expect("indices in range");
            }
        }
    }
    g
}

/// Erdos-Renyi graph: each of the C(n,2) edges present independently with
/// probability p.
pub fn sample_er<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability p = {p} outside [0,1]")));
    }
    let mut g = Graph::empty(n);
    for j in 0..n as u32 {
        for k in (j + 1)..n as u32 {
            if rng.gen::<f64>() < p {
                g.add_edge(j, k).expect("indices in range");
            }
        }
    }
    Ok(g)
}

/// Labeled inclusion: every edge of `pattern` is present in `host`.
pub fn contains(host: &Graph, pattern: &Graph) -> Result<bool> {
    if pattern.n > host.n {
        return Err(Error::param(format!(
            "pattern has {} vertices but host only {}",
            pattern.n, host.n
        )));
    }
    Ok(pattern.edges().iter().all(|&(j, k)| host.has_edge(j, k)))
}

/// Membership in the bounded-statistics class used for the divergence
/// comparison: mu <= n, sigma <= K n, delta <= ln n, tau <= ln n.
pub fn class_membership(stats: &GraphStats, n: usize, k: f64) -> bool {
    let ln_n = (n as f64).ln();
    stats.mu <= n as u64
        && (stats.sigma as f64) <= k * n as f64
        && (stats.delta as f64) <= ln_n
        && (stats.tau as f64) <= ln_n
}
