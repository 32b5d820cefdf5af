//! Checkable forms of the deterministic gap conditions: the fuzz, the
//! four measured constants, the certified bound, a discrepancy refutation
//! search, and the induced-path witness.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::rng::rng_from_seed;
use crate::spectral::{adjacency_seminorm, laplacian_spectrum, max_deviation_after};

/// Vertices of degree at most `d / M`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzSet {
    pub m: f64,
    pub d: f64,
    pub members: Vec<usize>,
    mask: Vec<bool>,
}

impl FuzzSet {
    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn fuzz_set(g: &Graph, d: f64, m: f64) -> Result<FuzzSet> {
    if !(m >= 1.0) {
        return Err(invalid("M", format!("must be at least 1, got {m}")));
    }
    if !(d > 0.0) {
        return Err(invalid("d", format!("must be positive, got {d}")));
    }
    let cut = d / m;
    let mask: Vec<bool> = (0..g.n()).map(|v| g.degree(v) as f64 <= cut).collect();
    let members = (0..g.n()).filter(|&v| mask[v]).collect();
    Ok(FuzzSet {
        m,
        d,
        members,
        mask,
    })
}

/// `‖q − (q·u) u‖` with `q = T^{−1/2} 𝟙_{ℵᶜ}` and `u` the unit vector along
/// `T^{1/2} 𝟙_W`, `W` the positive-degree vertices. This is the supremum of
/// `|xᵀ T^{−1/2} 𝟙_{ℵᶜ}|` over unit `x ⊥ T^{1/2} 𝟙_W`.
pub fn parallel_norm(g: &Graph, fz: &FuzzSet) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    let n = g.n();
    let mut q = vec![0.0; n];
    let mut u = vec![0.0; n];
    for v in 0..n {
        let deg = g.degree(v) as f64;
        if deg > 0.0 {
            u[v] = deg.sqrt();
            if !fz.contains(v) {
                q[v] = 1.0 / deg.sqrt();
            }
        }
    }
    let u_norm = crate::linalg::norm(&u);
    u.iter_mut().for_each(|x| *x /= u_norm);
    let proj = crate::linalg::dot(&q, &u);
    let residual: f64 = q
        .iter()
        .zip(&u)
        .map(|(qi, ui)| (qi - proj * ui).powi(2))
        .sum();
    Ok(residual.sqrt())
}

/// Measured constants of the four gap conditions for one graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub n: usize,
    pub d: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    pub fuzz_size: usize,
    pub fuzz_independent: bool,
    pub fuzz_small: bool,
    pub fuzz_neighbor_ok: bool,
    pub certified_bound: Option<f64>,
    /// `max_{i > I+1} |1 − λ_i|` for `I` isolated vertices.
    pub measured_gap: Option<f64>,
}

impl ConditionReport {
    pub fn fuzz_ok(&self) -> bool {
        self.fuzz_independent && self.fuzz_small && self.fuzz_neighbor_ok
    }

    /// True when a certificate exists and the measured gap respects it.
    pub fn certificate_holds(&self, slack: f64) -> Option<bool> {
        Some(self.measured_gap? <= self.certified_bound? + slack)
    }
}

/// Measures every condition. `C3` and the spectrum are only defined with at
/// least one edge; an edgeless graph reports `C3 = 0` and no gap.
pub fn audit(g: &Graph, d: f64, m: f64) -> Result<ConditionReport> {
    let fz = fuzz_set(g, d, m)?;
    let n = g.n();
    let fuzz_independent = fz
        .members
        .iter()
        .all(|&v| g.neighbors(v).iter().all(|&w| !fz.contains(w)));
    let fuzz_small = 2 * fz.len() <= n;
    let fuzz_neighbor_ok = (0..n)
        .filter(|&v| !fz.contains(v))
        .all(|v| g.neighbors(v).iter().filter(|&&w| fz.contains(w)).count() <= 1);
    let c1 = g.max_degree() as f64 / d;
    let c2 = adjacency_seminorm(g)? / d.sqrt();
    let (c3, measured_gap) = if g.edge_count() == 0 {
        (0.0, None)
    } else {
        let c3 = parallel_norm(g, &fz)? * d / (n as f64).sqrt();
        let spectrum = laplacian_spectrum(g)?;
        let cut = g.isolated_count() + 1;
        (c3, Some(max_deviation_after(&spectrum.eigenvalues, cut)))
    };
    let mut report = ConditionReport {
        n,
        d,
        m,
        c1,
        c2,
        c3,
        fuzz_size: fz.len(),
        fuzz_independent,
        fuzz_small,
        fuzz_neighbor_ok,
        certified_bound: None,
        measured_gap,
    };
    report.certified_bound = certified_bound(&report, d).ok();
    Ok(report)
}

/// `(2·C2·M + 2·√M)/√d + 2·C1·C3²/d`.
///
/// The four contributions: the non-fuzz block of `M` against itself is
/// at most `C2·M/√d`; each of the two cross terms with the fuzz is at most
/// `√M/√d`; the correction from projecting out the top eigenvector is at
/// most `C2·M/√d + 2·C1·C3²/d`.
pub fn certified_bound(r: &ConditionReport, d: f64) -> Result<f64> {
    if !r.fuzz_ok() {
        return Err(Error::Precondition(
            "fuzz conditions fail, no certificate".into(),
        ));
    }
    let (sm, sd) = (r.m.sqrt(), d.sqrt());
    Ok((2.0 * r.c2 * r.m + 2.0 * sm) / sd + 2.0 * r.c1 * r.c3 * r.c3 / d)
}

/// A pair of vertex sets failing every discrepancy clause.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyPair {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub e: usize,
    pub mu: f64,
    pub violation_score: f64,
}

/// Clause evaluation for a single pair of set sizes and edge count.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ClauseRatios {
    /// `(e/μ)/C`; clause (a) fails iff this exceeds 1.
    pub ratio_a: f64,
    /// `e·ln(e/μ) / (C·s·ln(n/s))`; clause (b) fails iff this exceeds 1.
    pub ratio_b: f64,
    /// Clause (c): `|A|, |B| ≤ d^{1/4}/100`.
    pub small: bool,
}

impl ClauseRatios {
    pub(crate) fn new(n: usize, d: f64, c: f64, size_a: usize, size_b: usize, e: usize) -> Self {
        let s = size_a.max(size_b) as f64;
        let mu = size_a as f64 * size_b as f64 * d / n as f64;
        let small = s <= d.max(0.0).powf(0.25) / 100.0;
        if e == 0 {
            return ClauseRatios {
                ratio_a: 0.0,
                ratio_b: 0.0,
                small,
            };
        }
        let e = e as f64;
        let excess = e / mu;
        let lhs = e * excess.ln();
        let rhs = c * s * (n as f64 / s).ln();
        let ratio_b = if lhs <= 0.0 {
            0.0
        } else if rhs <= 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs
        };
        ClauseRatios {
            ratio_a: excess / c,
            ratio_b,
            small,
        }
    }

    pub(crate) fn violated(&self) -> bool {
        !self.small && self.ratio_a > 1.0 && self.ratio_b > 1.0
    }

    /// Product of the two shortfalls; positive exactly on violations.
    pub(crate) fn score(&self) -> f64 {
        if !self.violated() {
            return 0.0;
        }
        (self.ratio_a - 1.0).max(0.0) * (self.ratio_b - 1.0).max(0.0)
    }

    /// Smooth objective for local search: the weaker of the two clause
    /// ratios, so improving it moves toward violating both.
    fn objective(&self) -> f64 {
        self.ratio_a.min(self.ratio_b)
    }
}

/// Pair state for local search with cached edge counts.
struct SearchState<'g> {
    g: &'g Graph,
    in_a: Vec<bool>,
    in_b: Vec<bool>,
    size_a: usize,
    size_b: usize,
    /// Neighbours of each vertex inside A and inside B.
    nbr_a: Vec<usize>,
    nbr_b: Vec<usize>,
    e: usize,
}

impl<'g> SearchState<'g> {
    fn new(g: &'g Graph, in_a: Vec<bool>, in_b: Vec<bool>) -> Self {
        let n = g.n();
        let mut nbr_a = vec![0; n];
        let mut nbr_b = vec![0; n];
        for u in 0..n {
            for &v in g.neighbors(u) {
                nbr_a[u] += in_a[v] as usize;
                nbr_b[u] += in_b[v] as usize;
            }
        }
        let e = (0..n).filter(|&u| in_a[u]).map(|u| nbr_b[u]).sum();
        SearchState {
            g,
            size_a: in_a.iter().filter(|&&x| x).count(),
            size_b: in_b.iter().filter(|&&x| x).count(),
            in_a,
            in_b,
            nbr_a,
            nbr_b,
            e,
        }
    }

    /// Edge count and sizes after toggling `v` in A (side 0) or B (side 1).
    fn toggled(&self, side: usize, v: usize) -> (usize, usize, usize) {
        if side == 0 {
            if self.in_a[v] {
                (self.size_a - 1, self.size_b, self.e - self.nbr_b[v])
            } else {
                (self.size_a + 1, self.size_b, self.e + self.nbr_b[v])
            }
        } else if self.in_b[v] {
            (self.size_a, self.size_b - 1, self.e - self.nbr_a[v])
        } else {
            (self.size_a, self.size_b + 1, self.e + self.nbr_a[v])
        }
    }

    fn toggle(&mut self, side: usize, v: usize) {
        let (sa, sb, e) = self.toggled(side, v);
        let (mask, nbr) = if side == 0 {
            (&mut self.in_a, &mut self.nbr_a)
        } else {
            (&mut self.in_b, &mut self.nbr_b)
        };
        mask[v] = !mask[v];
        for &w in self.g.neighbors(v) {
            if mask[v] {
                nbr[w] += 1;
            } else {
                nbr[w] -= 1;
            }
        }
        self.size_a = sa;
        self.size_b = sb;
        self.e = e;
    }

    fn members(mask: &[bool]) -> Vec<usize> {
        (0..mask.len()).filter(|&v| mask[v]).collect()
    }
}

/// Searches for a pair `(A, B)` of nonempty vertex sets that fails all three
/// discrepancy clauses. Returns the worst violator found, or `None` if the
/// search (`budget` random restarts, each followed by greedy single-vertex
/// toggles) found nothing. `None` means "not refuted", never "verified".
pub fn discrepancy_refute(
    g: &Graph,
    d: f64,
    c: f64,
    budget: usize,
    seed: u64,
) -> Result<Option<DiscrepancyPair>> {
    if !(c > 0.0) {
        return Err(invalid("C", format!("must be positive, got {c}")));
    }
    if budget == 0 {
        return Err(invalid("budget", "must be at least 1"));
    }
    let n = g.n();
    if n == 0 || g.edge_count() == 0 {
        return Ok(None);
    }
    let mut rng = rng_from_seed(seed);
    let mut best: Option<DiscrepancyPair> = None;
    let mut order: Vec<(usize, usize)> = (0..2).flat_map(|s| (0..n).map(move |v| (s, v))).collect();
    let ratios = |sa: usize, sb: usize, e: usize| ClauseRatios::new(n, d, c, sa, sb, e);

    for restart in 0..budget {
        // Restarts alternate between a random edge (the densest possible
        // small pair) and random sets of random density.
        let (in_a, in_b) = if restart % 2 == 0 {
            let u = rng.gen_range(0..n);
            let mut a = vec![false; n];
            let mut b = vec![false; n];
            a[u] = true;
            match g.neighbors(u).choose(&mut rng) {
                Some(&v) => b[v] = true,
                None => b[rng.gen_range(0..n)] = true,
            }
            (a, b)
        } else {
            let density: f64 = rng.gen_range(0.05..0.95);
            let mut pick = || -> Vec<bool> {
                let mut m: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
                if !m.iter().any(|&x| x) {
                    m[rng.gen_range(0..n)] = true;
                }
                m
            };
            let a = pick();
            let b = pick();
            (a, b)
        };
        let mut state = SearchState::new(g, in_a, in_b);
        let mut current = ratios(state.size_a, state.size_b, state.e);
        loop {
            order.shuffle(&mut rng);
            let mut best_move = None;
            let mut best_obj = current.objective();
            let mut best_score = current.score();
            for &(side, v) in &order {
                let (sa, sb, e) = state.toggled(side, v);
                if sa == 0 || sb == 0 {
                    continue;
                }
                let r = ratios(sa, sb, e);
                let (obj, score) = (r.objective(), r.score());
                if score > best_score || (score == best_score && obj > best_obj) {
                    best_move = Some((side, v, r));
                    best_obj = obj;
                    best_score = score;
                }
            }
            match best_move {
                Some((side, v, r)) => {
                    state.toggle(side, v);
                    current = r;
                }
                None => break,
            }
        }
        if current.violated() {
            let score = current.score();
            if best.as_ref().map_or(true, |b| score > b.violation_score) {
                best = Some(DiscrepancyPair {
                    a: SearchState::members(&state.in_a),
                    b: SearchState::members(&state.in_b),
                    e: state.e,
                    mu: state.size_a as f64 * state.size_b as f64 * d / n as f64,
                    violation_score: score,
                });
            }
        }
    }
    Ok(best)
}

/// Induced path `u – v – w – x` with `deg v = deg w = 2` and
/// `deg u, deg x ≥ m` in the ambient graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PathWitness {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    pub x: usize,
    pub m: usize,
}

impl PathWitness {
    /// Test vector `f(v) = f(w) = 1/√2`, `f(u) = −1/√deg u`,
    /// `f(x) = −1/√deg x`, orthogonal to `T^{1/2}𝟙`.
    pub fn low_vector(&self, g: &Graph) -> Vec<f64> {
        let mut f = vec![0.0; g.n()];
        f[self.v] = std::f64::consts::FRAC_1_SQRT_2;
        f[self.w] = std::f64::consts::FRAC_1_SQRT_2;
        f[self.u] = -1.0 / (g.degree(self.u) as f64).sqrt();
        f[self.x] = -1.0 / (g.degree(self.x) as f64).sqrt();
        f
    }

    /// Test vector `f(v) = 1`, `f(w) = −1`.
    pub fn high_vector(&self, g: &Graph) -> Vec<f64> {
        let mut f = vec![0.0; g.n()];
        f[self.v] = 1.0;
        f[self.w] = -1.0;
        f
    }
}

/// First witness in vertex order of `v`, then `w`.
pub fn find_path_witness(g: &Graph, m: usize) -> Result<Option<PathWitness>> {
    if m == 0 {
        return Err(invalid("m", "degree floor must be at least 1"));
    }
    let other = |a: usize, b: usize| {
        let nb = g.neighbors(a);
        if nb[0] == b {
            nb[1]
        } else {
            nb[0]
        }
    };
    for v in 0..g.n() {
        if g.degree(v) != 2 {
            continue;
        }
        for &w in g.neighbors(v) {
            if g.degree(w) != 2 {
                continue;
            }
            let u = other(v, w);
            let x = other(w, v);
            // With deg v = deg w = 2, u ≁ w and v ≁ x follow from u ≠ x.
            if u == x || g.has_edge(u, x) {
                continue;
            }
            if g.degree(u) >= m && g.degree(x) >= m {
                return Ok(Some(PathWitness { u, v, w, x, m }));
            }
        }
    }
    Ok(None)
}

/// Two stars whose centres `u`, `x` are joined through two fresh degree-2
/// vertices `v`, `w`; each centre has degree exactly `m`. Returns the graph
/// and `[u, v, w, x]`.
pub fn handle_gadget(m: usize) -> (Graph, [usize; 4]) {
    assert!(
        m >= 2,
        "centres need a path neighbour plus at least one leaf"
    );
    let (u, v, w, x) = (0, 1, 2, 3);
    let mut edges = vec![(u, v), (v, w), (w, x)];
    let mut next = 4;
    for centre in [u, x] {
        for _ in 0..m - 1 {
            edges.push((centre, next));
            next += 1;
        }
    }
    let g = Graph::from_edges(next, edges).expect("gadget edges are valid");
    (g, [u, v, w, x])
}
