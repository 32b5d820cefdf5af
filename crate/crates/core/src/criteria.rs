//! Local-to-global certificates on links (Garland / Ballmann–Świątkowski,
//! Żuk), the free-product structure verdict, and hitting times along face
//! processes.

use serde::Serialize;

use crate::complex::{
    binomial, colex_unrank, is_pure, isolated_faces, links, Complex, ComplexStats, FaceProcess,
};
use crate::error::{invalid, Result};
use crate::graph::{components, induced_subgraph, Graph, UnionFind};
use crate::homology::{betti_dminus1_exact, cone_column, RankTracker};
use crate::rng::substream;
use crate::spectral::{giant_gap, kernel_dim, laplacian_spectrum, max_deviation_after};

/// Spectral summary of one link, computed on its positive-degree vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkSpectrum {
    /// The `(d−1)`-vertex face whose link this is.
    pub face: Vec<usize>,
    /// Vertices of positive link degree.
    pub support: usize,
    pub edges: usize,
    pub connected: bool,
    /// `λ_2` on the support (0 when the support is disconnected).
    pub lambda2: f64,
    pub lambda_max: f64,
    /// `max |1 − λ_i|` beyond the kernel of the support graph.
    pub lambda_abs: f64,
}

impl LinkSpectrum {
    fn of(face: Vec<usize>, g: &Graph) -> Result<Self> {
        let support = g.support();
        if support.is_empty() {
            return Ok(LinkSpectrum {
                face,
                support: 0,
                edges: 0,
                connected: false,
                lambda2: 0.0,
                lambda_max: 0.0,
                lambda_abs: 0.0,
            });
        }
        let h = induced_subgraph(g, &support)?;
        let s = laplacian_spectrum(&h)?;
        let e = &s.eigenvalues;
        Ok(LinkSpectrum {
            face,
            support: support.len(),
            edges: h.edge_count(),
            connected: components(&h).count() == 1,
            lambda2: e[1],
            lambda_max: e[e.len() - 1],
            lambda_abs: max_deviation_after(e, kernel_dim(&s)),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.edges == 0
    }
}

/// Spectra of every `(d−2)`-face link, in colex order of the faces.
pub fn link_spectra(y: &Complex) -> Result<Vec<LinkSpectrum>> {
    let k = y.d().checked_sub(1).filter(|&k| k >= 1);
    let Some(k) = k else {
        return Err(invalid("d", "links of (d−2)-faces need d ≥ 2"));
    };
    links(y)?
        .iter()
        .enumerate()
        .map(|(r, g)| LinkSpectrum::of(colex_unrank(r as u64, k), g))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GarlandReport {
    /// Minimum `λ_2` over nonempty links (`None` if every link is empty).
    pub min_link_lambda2: Option<f64>,
    pub pure: bool,
    pub certified: bool,
    pub worst_face: Option<Vec<usize>>,
}

/// `Ỹ` is pure and every link has `λ_2 > 1 − 1/d`, which forces
/// `H^{d−1}(Ỹ; ℚ) = 0`.
pub fn garland_check(y: &Complex) -> Result<GarlandReport> {
    let spectra = link_spectra(y)?;
    garland_from_spectra(y, &spectra)
}

fn garland_from_spectra(y: &Complex, spectra: &[LinkSpectrum]) -> Result<GarlandReport> {
    let pure = is_pure(y)?;
    let worst = spectra
        .iter()
        .filter(|s| !s.is_empty())
        .min_by(|a, b| a.lambda2.total_cmp(&b.lambda2));
    let min_link_lambda2 = worst.map(|s| s.lambda2);
    let threshold = 1.0 - 1.0 / y.d() as f64;
    Ok(GarlandReport {
        min_link_lambda2,
        pure,
        certified: pure && min_link_lambda2.is_some_and(|l| l > threshold),
        worst_face: worst.map(|s| s.face.clone()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZukReport {
    pub all_links_connected: bool,
    pub min_link_lambda2: Option<f64>,
    pub certified: bool,
    pub worst_vertex: Option<usize>,
}

/// Every vertex link (on its positive-degree vertices) is nonempty,
/// connected and has `λ_2 > 1/2`.
pub fn zuk_check(y: &Complex) -> Result<ZukReport> {
    if y.d() != 2 {
        return Err(invalid(
            "d",
            format!("Żuk's criterion needs d = 2, got {}", y.d()),
        ));
    }
    Ok(zuk_from_spectra(&link_spectra(y)?))
}

fn zuk_from_spectra(spectra: &[LinkSpectrum]) -> ZukReport {
    let all_links_connected = spectra.iter().all(|s| !s.is_empty() && s.connected);
    let worst = spectra
        .iter()
        .min_by(|a, b| a.lambda2.total_cmp(&b.lambda2));
    let min_link_lambda2 = worst.map(|s| s.lambda2);
    ZukReport {
        all_links_connected,
        min_link_lambda2,
        certified: all_links_connected && min_link_lambda2.is_some_and(|l| l > 0.5),
        worst_vertex: worst.map(|s| s.face[0]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedTFreeProduct,
    Inconclusive,
}

/// Certificate that `π₁(Y) ≅ G ∗ F` with `G` having property (T) and `F`
/// free on one generator per isolated edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureVerdict {
    pub isolated_edges: usize,
    pub skeleton_connected: bool,
    pub zuk_on_stripped: ZukReport,
    pub verdict: Verdict,
}

impl StructureVerdict {
    /// Rank of the free factor.
    pub fn free_rank(&self) -> usize {
        self.isolated_edges
    }

    pub fn certified(&self) -> bool {
        self.verdict == Verdict::CertifiedTFreeProduct
    }

    /// `π₁(Y)` itself is certified (T): the structure is certified and the
    /// free factor is trivial (a nontrivial free factor maps onto `ℤ`).
    pub fn certifies_t(&self) -> bool {
        self.certified() && self.isolated_edges == 0
    }
}

/// Removing fewer than `n − 1` edges from `K_n` cannot disconnect it, so
/// the stripped 1-skeleton is connected below that count. The links of `Ỹ`
/// are the links of `Y` restricted to positive-degree vertices, which is
/// how [`zuk_check`] reads them.
pub fn t_structure(y: &Complex) -> Result<StructureVerdict> {
    if y.d() != 2 {
        return Err(invalid(
            "d",
            format!("structure verdict needs d = 2, got {}", y.d()),
        ));
    }
    let stats = isolated_faces(y);
    structure_from(y, &stats)
}

fn structure_from(y: &Complex, stats: &ComplexStats) -> Result<StructureVerdict> {
    let isolated_edges = stats.isolated_count;
    let skeleton_connected = isolated_edges < y.n() - 1;
    let zuk = zuk_from_spectra(&link_spectra(y)?);
    let verdict = if skeleton_connected && zuk.certified {
        Verdict::CertifiedTFreeProduct
    } else {
        Verdict::Inconclusive
    };
    Ok(StructureVerdict {
        isolated_edges,
        skeleton_connected,
        zuk_on_stripped: zuk,
        verdict,
    })
}

/// Hitting times along one process trajectory. Indices count arrivals, so
/// `m` refers to the complex formed by the first `m` faces.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HittingReport {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// First `m` with no isolated `(d−1)`-face.
    #[serde(rename = "M1")]
    pub m1: Option<usize>,
    /// First `m` with `b_{d−1} = 0`.
    #[serde(rename = "M2")]
    pub m2: Option<usize>,
    /// First `m` at which `π₁` is certified (T) (`d = 2`).
    #[serde(rename = "M2T")]
    pub m2t: Option<usize>,
    /// First `m` at which the graph process is connected (`d = 1`).
    pub tau_c: Option<usize>,
    /// `λ(G)` of the graph at `tau_c`.
    pub gap_at_tau_c: Option<f64>,
}

/// Stream offset for the prime used along a trajectory.
const PRIME_STREAM: u64 = 0x9E37;

/// One pass over the process: incremental isolated-face counts give `M1`,
/// incremental rank mod a random prime gives `M2`.
pub fn cohomology_hitting(proc: &FaceProcess) -> Result<HittingReport> {
    let (n, d) = (proc.n(), proc.d());
    if d < 2 {
        return Err(invalid("d", "cohomology hitting needs d ≥ 2"));
    }
    let target = binomial(n - 1, d) as usize;
    let prime_seed = {
        use rand::Rng;
        substream(proc.seed(), PRIME_STREAM).gen::<u64>()
    };
    let mut tracker = RankTracker::new(target, prime_seed);
    let mut stats = ComplexStats::new(n, d);
    let mut report = HittingReport {
        n,
        d,
        seed: proc.seed(),
        ..Default::default()
    };
    for (i, face) in proc.faces().enumerate() {
        let m = i + 1;
        stats.insert(&face);
        if report.m1.is_none() && stats.isolated_count == 0 {
            report.m1 = Some(m);
        }
        if report.m2.is_none() {
            tracker.add_signed(&cone_column(&face));
            if tracker.rank() == target {
                report.m2 = Some(m);
            }
        }
        if report.m1.is_some() && report.m2.is_some() {
            break;
        }
    }
    Ok(report)
}

/// Confirms `M2` over `ℚ`: `b_{d−1}` vanishes at `M2` and not one step
/// earlier.
pub fn verify_m2_exact(proc: &FaceProcess, m2: usize) -> Result<bool> {
    let at = betti_dminus1_exact(&proc.prefix(m2))?;
    let before = if m2 == 0 {
        1
    } else {
        betti_dminus1_exact(&proc.prefix(m2 - 1))?
    };
    Ok(at == 0 && before > 0)
}

/// Evenly spaced arrival counts `N·k/points`, `k = 1..=points`.
pub fn uniform_grid(total: u64, points: usize) -> Vec<usize> {
    (1..=points)
        .map(|k| ((total as u128 * k as u128) / points as u128) as usize)
        .collect()
}

/// `t_structure` along a grid of arrival counts. Certification is not
/// monotone in `m`, so the first certified grid point is refined by a
/// linear scan back from it to the preceding uncertified grid point.
pub fn t_hitting(proc: &FaceProcess, grid: &[usize]) -> Result<HittingReport> {
    if proc.d() != 2 {
        return Err(invalid("d", "t_hitting needs d = 2"));
    }
    if grid.is_empty() {
        return Err(invalid("grid", "must contain at least one arrival count"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("grid", "must be strictly increasing"));
    }
    let total = proc.total() as usize;
    if grid[grid.len() - 1] > total {
        return Err(invalid("grid", format!("entries must not exceed {total}")));
    }
    let faces: Vec<Vec<usize>> = proc.faces().collect();
    let (n, d) = (proc.n(), proc.d());
    let prefix = |m: usize| Complex::from_faces_unchecked(n, d, faces[..m].to_vec());
    let certified_at = |m: usize| -> Result<bool> { Ok(t_structure(&prefix(m))?.certifies_t()) };

    let mut report = HittingReport {
        n,
        d,
        seed: proc.seed(),
        ..Default::default()
    };
    let mut stats = isolated_faces(&prefix(0));
    for (i, face) in faces.iter().enumerate() {
        stats.insert(face);
        if stats.isolated_count == 0 {
            report.m1 = Some(i + 1);
            break;
        }
    }

    let mut last_uncertified = 0;
    for &m in grid {
        if certified_at(m)? {
            let mut first = m;
            for k in last_uncertified + 1..m {
                if certified_at(k)? {
                    first = k;
                    break;
                }
            }
            report.m2t = Some(first);
            break;
        }
        last_uncertified = m;
    }
    Ok(report)
}

/// Union-find along the graph process: `τ_c` is the first arrival count
/// with a single component, and the gap is measured there.
pub fn graph_connectivity_hitting(proc: &FaceProcess) -> Result<HittingReport> {
    if proc.d() != 1 {
        return Err(invalid("d", "the graph process has d = 1"));
    }
    let n = proc.n();
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::new();
    let mut report = HittingReport {
        n,
        d: 1,
        seed: proc.seed(),
        ..Default::default()
    };
    for face in proc.faces() {
        uf.union(face[0], face[1]);
        edges.push((face[0], face[1]));
        if uf.components() == 1 {
            break;
        }
    }
    if uf.components() == 1 {
        report.tau_c = Some(edges.len());
        let g = Graph::from_edges(n, edges)?;
        report.gap_at_tau_c = Some(giant_gap(&g)?.lambda_abs);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{face_process, sample_complex, strip_isolated};
    use crate::homology::betti_stripped_identity;

    #[test]
    fn garland_examples() {
        let r = garland_check(&Complex::full(6, 2).unwrap()).unwrap();
        assert!(r.pure && r.certified);
        assert!((r.min_link_lambda2.unwrap() - 1.25).abs() < 1e-12);

        let r = garland_check(&Complex::empty(6, 2).unwrap()).unwrap();
        assert!(!r.pure && !r.certified && r.min_link_lambda2.is_none());

        let r = garland_check(&Complex::new(5, 2, vec![vec![0, 1, 2]]).unwrap()).unwrap();
        assert!(!r.pure && !r.certified);

        let r = garland_check(&Complex::full(7, 3).unwrap()).unwrap();
        // Links of edges in the full 3-skeleton on 7 vertices are K_5.
        assert!(r.certified && (r.min_link_lambda2.unwrap() - 1.25).abs() < 1e-12);
        assert!(garland_check(&Complex::empty(4, 1).unwrap()).is_err());
    }

    #[test]
    fn zuk_examples() {
        let r = zuk_check(&Complex::full(6, 2).unwrap()).unwrap();
        assert!(r.certified && r.all_links_connected);
        assert!((r.min_link_lambda2.unwrap() - 1.25).abs() < 1e-12);

        // Two tetrahedron boundaries glued at vertex 0: lk(0) is two
        // disjoint triangles.
        let mut faces = Vec::new();
        for block in [[0, 1, 2, 3], [0, 4, 5, 6]] {
            for skip in 0..4 {
                faces.push(
                    block
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect(),
                );
            }
        }
        let y = Complex::new(7, 2, faces).unwrap();
        let r = zuk_check(&y).unwrap();
        assert!(!r.all_links_connected && !r.certified);
        assert!(zuk_check(&Complex::full(6, 3).unwrap()).is_err());
    }

    #[test]
    fn structure_examples() {
        let v = t_structure(&Complex::full(6, 2).unwrap()).unwrap();
        assert!(v.certified() && v.free_rank() == 0 && v.certifies_t());

        let v = t_structure(&Complex::empty(5, 2).unwrap()).unwrap();
        assert_eq!(v.isolated_edges, 10);
        assert!(!v.skeleton_connected && v.verdict == Verdict::Inconclusive);

        // Full 2-skeleton on {0..5} inside n = 8; vertices 6, 7 only meet
        // isolated edges.
        let block = Complex::full(6, 2).unwrap();
        let y = Complex::new(8, 2, block.faces().to_vec()).unwrap();
        let v = t_structure(&y).unwrap();
        // Edges touching 6 or 7: 6·2 + 1 = 13, not below n − 1 = 7.
        assert_eq!(v.isolated_edges, 13);
        assert!(!v.skeleton_connected);
    }

    #[test]
    fn structure_gadget_with_few_isolated_edges() {
        // Full 2-skeleton on 8 vertices minus every triangle through the
        // edge {6, 7}: exactly one isolated edge.
        let faces: Vec<Vec<usize>> = Complex::full(8, 2)
            .unwrap()
            .faces()
            .iter()
            .filter(|f| !(f.contains(&6) && f.contains(&7)))
            .cloned()
            .collect();
        let y = Complex::new(8, 2, faces).unwrap();
        let v = t_structure(&y).unwrap();
        assert_eq!(v.isolated_edges, 1);
        assert!(v.certified());
        assert_eq!(v.free_rank(), 1);
        assert!(!v.certifies_t());
        let s = betti_stripped_identity(&y).unwrap();
        assert_eq!((s.full, s.stripped, s.isolated), (1, 0, 1));
    }

    #[test]
    fn cohomology_hitting_examples() {
        for seed in 0..20 {
            let proc = face_process(6, 2, seed).unwrap();
            let r = cohomology_hitting(&proc).unwrap();
            assert!(r.m1.unwrap() <= 20 && r.m2.unwrap() <= 20);
            assert!(verify_m2_exact(&proc, r.m2.unwrap()).unwrap());
            let m1 = r.m1.unwrap();
            assert_eq!(isolated_faces(&proc.prefix(m1)).isolated_count, 0);
            assert!(isolated_faces(&proc.prefix(m1 - 1)).isolated_count > 0);
        }
        let proc = face_process(3, 2, 1).unwrap();
        let r = cohomology_hitting(&proc).unwrap();
        assert_eq!((r.m1, r.m2), (Some(1), Some(1)));
        assert!(cohomology_hitting(&face_process(5, 1, 0).unwrap()).is_err());
    }

    #[test]
    fn t_hitting_examples() {
        let proc = face_process(7, 2, 3).unwrap();
        let total = proc.total() as usize;
        let r = t_hitting(&proc, &[total]).unwrap();
        assert!(r.m2t.unwrap() <= total);
        assert!(t_hitting(&proc, &[]).is_err());
        assert!(t_hitting(&proc, &[5, 3]).is_err());

        for seed in 0..5 {
            let proc = face_process(9, 2, seed).unwrap();
            let grid = uniform_grid(proc.total(), 10);
            let r = t_hitting(&proc, &grid).unwrap();
            let m2t = r.m2t.unwrap();
            assert!(m2t >= r.m1.unwrap());
            // Minimality: no earlier prefix certifies (T).
            for m in 0..m2t {
                assert!(
                    !t_structure(&proc.prefix(m)).unwrap().certifies_t()
                        || m <= grid_floor(&grid, m2t)
                );
            }
            assert!(t_structure(&proc.prefix(m2t)).unwrap().certifies_t());
        }
    }

    /// Largest grid point strictly below `m`, or 0.
    fn grid_floor(grid: &[usize], m: usize) -> usize {
        grid.iter().copied().filter(|&g| g < m).max().unwrap_or(0)
    }

    #[test]
    fn connectivity_hitting_examples() {
        let r = graph_connectivity_hitting(&face_process(2, 1, 0).unwrap()).unwrap();
        assert_eq!(r.tau_c, Some(1));
        assert!((r.gap_at_tau_c.unwrap() - 1.0).abs() < 1e-12);
        for seed in 0..20 {
            let proc = face_process(30, 1, seed).unwrap();
            let r = graph_connectivity_hitting(&proc).unwrap();
            let tau = r.tau_c.unwrap();
            let before = proc.prefix(tau - 1);
            let edges: Vec<(usize, usize)> = before.faces().iter().map(|f| (f[0], f[1])).collect();
            let g = Graph::from_edges(30, edges).unwrap();
            assert!(components(&g).count() > 1);
        }
    }

    #[test]
    fn garland_implies_vanishing_on_samples() {
        let mut certified = 0;
        for seed in 0..80u64 {
            let d = 2 + (seed % 2) as usize;
            let n = 8 + (seed as usize % 7);
            let p = [0.4, 0.6, 0.8, 0.95][seed as usize % 4];
            let y = sample_complex(n, d, p, seed).unwrap();
            let g = garland_check(&y).unwrap();
            if g.certified {
                certified += 1;
                let s = betti_stripped_identity(&y).unwrap();
                assert_eq!(s.stripped, 0, "seed {seed}");
            }
            // On d = 2 the Garland threshold equals Żuk's.
            if d == 2 {
                let z = zuk_check(&y).unwrap();
                if g.certified {
                    assert!(z.min_link_lambda2.unwrap() > 0.5);
                }
            }
        }
        assert!(certified > 0);
    }

    #[test]
    fn stripped_links_match_support_restriction() {
        let y = sample_complex(12, 2, 0.3, 5).unwrap();
        let s = strip_isolated(&y);
        let spectra = link_spectra(&y).unwrap();
        for (v, spec) in spectra.iter().enumerate() {
            // Link vertices of Ỹ are the kept edges through v.
            let kept_through_v = (0..12)
                .filter(|&w| w != v)
                .filter(|&w| {
                    let e = if v < w { [v, w] } else { [w, v] };
                    s.kept[crate::complex::colex_rank(&e) as usize]
                })
                .count();
            assert_eq!(spec.support, kept_through_v);
        }
    }
}
