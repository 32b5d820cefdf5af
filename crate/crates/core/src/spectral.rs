//! Normalized Laplacian spectra and the quantities built from them.

use crate::error::{Error, Result};
use crate::graph::{components, induced_subgraph, Graph};
use crate::linalg::{dot, full_spectrum, norm, Spectrum, SymMatrix};

/// Eigenvalues below this count as kernel.
pub const ZERO_TOL: f64 = 1e-7;

/// Relative residual budget used for Laplacian eigensolves.
pub const SPECTRUM_TOL: f64 = 1e-9;

/// `L = π₊ − T^{−1/2} A T^{−1/2}`, with `T^{−1/2}` zero on isolated
/// vertices.
pub fn normalized_laplacian(g: &Graph) -> SymMatrix {
    let n = g.n();
    let mut l = SymMatrix::zeros(n);
    for u in 0..n {
        if g.degree(u) > 0 {
            l.set(u, u, 1.0);
        }
        for &v in g.neighbors(u) {
            if v > u {
                let dd = (g.degree(u) * g.degree(v)) as f64;
                l.set(u, v, -1.0 / dd.sqrt());
            }
        }
    }
    l
}

/// `M = T^{−1/2} A T^{−1/2}`, zero on isolated vertices.
pub fn normalized_adjacency(g: &Graph) -> SymMatrix {
    let mut m = normalized_laplacian(g);
    for i in 0..g.n() {
        for j in 0..=i {
            let v = m.get(i, j);
            m.set(i, j, if i == j { 0.0 } else { -v });
        }
    }
    m
}

pub fn laplacian_spectrum(g: &Graph) -> Result<Spectrum> {
    full_spectrum(&normalized_laplacian(g), SPECTRUM_TOL)
}

pub fn kernel_dim(s: &Spectrum) -> usize {
    s.eigenvalues.iter().filter(|&&x| x < ZERO_TOL).count()
}

/// `max_{i > skip} |1 − λ_i|` over an ascending spectrum; 0 if nothing is
/// left after skipping.
pub fn max_deviation_after(eigenvalues: &[f64], skip: usize) -> f64 {
    eigenvalues
        .iter()
        .skip(skip)
        .fold(0.0_f64, |acc, &x| acc.max((1.0 - x).abs()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapResult {
    /// `λ(G) = max_{i ≥ 2} |1 − λ_i|`.
    pub lambda_abs: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
    pub kernel_dim: usize,
}

impl GapResult {
    fn from_connected(s: &Spectrum) -> Self {
        let e = &s.eigenvalues;
        GapResult {
            lambda_abs: max_deviation_after(e, 1),
            lambda2: e[1],
            lambda_max: e[e.len() - 1],
            kernel_dim: kernel_dim(s),
        }
    }
}

/// Gap of a connected graph on at least two vertices. Exactly one
/// eigenvalue (the smallest) is dropped.
pub fn gap(g: &Graph) -> Result<GapResult> {
    if g.n() < 2 {
        return Err(Error::Precondition(
            "gap needs a connected graph on at least two vertices".into(),
        ));
    }
    let comps = components(g);
    let s = laplacian_spectrum(g)?;
    if comps.count() != 1 {
        return Err(Error::Disconnected {
            kernel_dim: kernel_dim(&s),
        });
    }
    Ok(GapResult::from_connected(&s))
}

/// Gap of the largest connected component.
pub fn giant_gap(g: &Graph) -> Result<GapResult> {
    if g.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    let giant = components(g).giant_members();
    let h = induced_subgraph(g, &giant)?;
    gap(&h)
}

/// `sup |xᵀ A y|` over unit `x ⊥ 𝟙` and unit `y`, i.e. the largest
/// singular value of `(I − 𝟙𝟙ᵀ/n) A`, from the top eigenvalue of
/// `A (I − 𝟙𝟙ᵀ/n) A = A² − deg degᵀ / n`.
pub fn adjacency_seminorm(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n == 0 || g.edge_count() == 0 {
        return Ok(0.0);
    }
    let deg: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let mut s = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            s.set(i, j, -deg[i] * deg[j] / n as f64);
        }
    }
    // (A²)_{uv} counts common neighbours: accumulate over middle vertices.
    for w in 0..n {
        let nb = g.neighbors(w);
        for (a, &u) in nb.iter().enumerate() {
            for &v in &nb[..=a] {
                s.add(u, v, 1.0);
            }
        }
    }
    let spec = full_spectrum(&s, SPECTRUM_TOL)?;
    Ok(spec.max().unwrap_or(0.0).max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayleighBounds {
    /// `fᵀ M f / ‖f‖²` with `M = T^{−1/2} A T^{−1/2}`.
    pub quotient: f64,
    /// Upper bound on `λ_2`.
    pub lambda2_upper: f64,
    /// Lower bound on `λ_n`.
    pub lambda_max_lower: f64,
}

/// Bounds from the Rayleigh quotient of `L` at a test vector `f ⊥ T^{1/2}𝟙`.
/// When `f` vanishes on isolated vertices both bounds equal `1 − R`.
pub fn rayleigh_bounds(g: &Graph, f: &[f64]) -> Result<RayleighBounds> {
    let n = g.n();
    if f.len() != n {
        return Err(Error::Dimension(format!(
            "test vector has length {}, graph has {n} vertices",
            f.len()
        )));
    }
    let f_norm = norm(f);
    if f_norm == 0.0 {
        return Err(Error::Precondition("test vector is zero".into()));
    }
    let sqrt_deg: Vec<f64> = g.degrees().iter().map(|&d| (d as f64).sqrt()).collect();
    let overlap = dot(f, &sqrt_deg);
    if overlap.abs() > 1e-9 * f_norm * norm(&sqrt_deg) {
        return Err(Error::Precondition(format!(
            "test vector is not orthogonal to T^(1/2)1 (inner product {overlap:e})"
        )));
    }
    let mut form = 0.0;
    for (u, v) in g.edges() {
        form += 2.0 * f[u] * f[v] / (sqrt_deg[u] * sqrt_deg[v]);
    }
    let norm_sq = f_norm * f_norm;
    let supported: f64 = (0..n)
        .filter(|&v| g.degree(v) > 0)
        .map(|v| f[v] * f[v])
        .sum();
    let rayleigh = (supported - form) / norm_sq;
    Ok(RayleighBounds {
        quotient: form / norm_sq,
        lambda2_upper: rayleigh,
        lambda_max_lower: rayleigh,
    })
}
