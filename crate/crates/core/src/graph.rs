//! Simple undirected graphs, Erdős–Rényi sampling, and connectivity.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::rng::rng_from_seed;

/// Simple undirected graph on `0..n` with sorted, deduplicated adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(invalid("edge", format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    /// Adjacency lists must already be symmetric, sorted and loop-free.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Self {
        let g = Graph { adj };
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Graph { adj }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    /// Star with center 0 and leaves `1..n`.
    pub fn star(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (0, i))).unwrap()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Vertices of positive degree.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.degree(v) > 0).collect()
    }

    pub fn isolated_count(&self) -> usize {
        self.adj.iter().filter(|l| l.is_empty()).count()
    }

    /// Returns a copy with the edge `{u, v}` added.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        Graph::from_edges(self.n(), self.edges().chain(std::iter::once((u, v))))
    }

    /// Checks symmetry, absence of loops, and strict ordering.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (u, list) in self.adj.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("adjacency of {u} not strictly increasing"));
            }
            for &v in list {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if v >= self.n() || self.adj[v].binary_search(&u).is_err() {
                    return Err(format!("edge {u}-{v} not symmetric"));
                }
            }
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut lines = reader.lines().enumerate();
        let (n, m) = loop {
            let (idx, line) = lines.next().ok_or(Error::Parse {
                line: 1,
                reason: "missing header `n m`".into(),
            })?;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let nums = parse_numbers(&line, idx + 1)?;
            if nums.len() != 2 {
                return Err(Error::Parse {
                    line: idx + 1,
                    reason: "header must be `n m`".into(),
                });
            }
            break (nums[0], nums[1]);
        };
        let mut edges = Vec::with_capacity(m);
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let nums = parse_numbers(&line, idx + 1)?;
            if nums.len() != 2 || nums[0] >= nums[1] {
                return Err(Error::Parse {
                    line: idx + 1,
                    reason: "edge lines must be `u v` with u < v".into(),
                });
            }
            edges.push((nums[0], nums[1]));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, edges)
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.n(), self.edge_count())?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

pub(crate) fn parse_numbers(line: &str, line_no: usize) -> Result<Vec<usize>> {
    line.split_ascii_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                reason: format!("`{tok}`: {e}"),
            })
        })
        .collect()
}

/// Parameters of the binomial random graph `G(n, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl GraphParams {
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        GraphParams { n, p, seed }
    }

    /// `p = coefficient · ln n / n`, clamped to 1.
    pub fn from_coefficient(n: usize, coefficient: f64, seed: u64) -> Self {
        GraphParams {
            n,
            p: log_scaled_p(n, coefficient),
            seed,
        }
    }

    /// Expected degree `(n − 1) p`.
    pub fn d(&self) -> f64 {
        expected_degree(self.n, self.p)
    }
}

pub fn log_scaled_p(n: usize, coefficient: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    (coefficient * (n as f64).ln() / n as f64).min(1.0)
}

pub fn expected_degree(n: usize, p: f64) -> f64 {
    n.saturating_sub(1) as f64 * p
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("{p} is outside [0, 1]")));
    }
    Ok(())
}

/// Samples `G(n, p)`. Edge slots are visited in lexicographic order with
/// geometric skips, so the cost is proportional to `n` plus the number of
/// edges.
pub fn erdos_renyi(params: GraphParams) -> Result<Graph> {
    let GraphParams { n, p, seed } = params;
    if n < 1 {
        return Err(invalid("n", "need at least one vertex"));
    }
    check_probability(p)?;
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut rng = rng_from_seed(seed);
    let log_q = (1.0 - p).ln();
    let mut adj = vec![Vec::new(); n];
    // Slot (v, w) with w < v; rows visited in increasing v.
    let mut v = 1usize;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor();
        // Saturate so huge skips (tiny p) just end the stream.
        let cap = (n as f64) * (n as f64);
        w += 1 + if skip.is_finite() {
            skip.min(cap) as i64
        } else {
            cap as i64
        };
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            let ww = w as usize;
            adj[v].push(ww);
            adj[ww].push(v);
        }
    }
    // Rows are visited in increasing v with increasing w, so adj[v] gets its
    // smaller neighbours in order, then larger ones in order.
    Ok(Graph::from_sorted_adjacency(adj))
}

/// Connected-component labelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// Component label per vertex; labels are assigned in order of the
    /// smallest vertex of each component.
    pub component_id: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Largest component, ties broken by smallest contained vertex.
    pub giant: usize,
}

impl ComponentDecomposition {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn members(&self, label: usize) -> Vec<usize> {
        self.component_id
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == label)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn giant_members(&self) -> Vec<usize> {
        self.members(self.giant)
    }

    /// Number of components with at least one edge.
    pub fn nontrivial_count(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 1).count()
    }
}

pub fn components(g: &Graph) -> ComponentDecomposition {
    let n = g.n();
    let mut component_id = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if component_id[start] != usize::MAX {
            continue;
        }
        let label = sizes.len();
        component_id[start] = label;
        stack.push(start);
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in g.neighbors(u) {
                if component_id[v] == usize::MAX {
                    component_id[v] = label;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    let mut giant = 0;
    for (label, &s) in sizes.iter().enumerate() {
        if s > sizes[giant] {
            giant = label;
        }
    }
    ComponentDecomposition {
        component_id,
        sizes,
        giant,
    }
}

/// Subgraph induced on `vs`, relabelled `0..|vs|` in increasing order of
/// the original indices.
pub fn induced_subgraph(g: &Graph, vs: &[usize]) -> Result<Graph> {
    let n = g.n();
    let mut sorted = vs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: bad, n });
    }
    let mut index = vec![usize::MAX; n];
    for (i, &v) in sorted.iter().enumerate() {
        index[v] = i;
    }
    let adj = sorted
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                .collect()
        })
        .collect();
    Ok(Graph::from_sorted_adjacency(adj))
}

/// Number of ordered pairs `(u, v)` with `u ∈ A`, `v ∈ B` and `u ~ v`.
/// Edges inside `A ∩ B` are counted twice. Repeated entries in `A` or `B`
/// are ignored.
pub fn cross_edges(g: &Graph, a: &[usize], b: &[usize]) -> usize {
    let n = g.n();
    let mut in_b = vec![false; n];
    for &v in b {
        in_b[v] = true;
    }
    let mut seen_a = vec![false; n];
    let mut count = 0;
    for &u in a {
        if std::mem::replace(&mut seen_a[u], true) {
            continue;
        }
        count += g.neighbors(u).iter().filter(|&&v| in_b[v]).count();
    }
    count
}

/// Disjoint-set forest with union by size and path halving; tracks the
/// number of components.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns whether they were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}
