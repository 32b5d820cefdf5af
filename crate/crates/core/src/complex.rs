//! Linial–Meshulam complexes: `d`-faces over a complete `(d−1)`-skeleton,
//! the random face process, links of `(d−2)`-faces and isolated faces.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::audit::{fuzz_set, FuzzSet};
use crate::error::{invalid, Error, Result};
use crate::graph::{check_probability, parse_numbers, Graph};
use crate::rng::{rng_from_seed, TrialRng};

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Colexicographic rank of a strictly increasing tuple:
/// `Σ_i C(s_i, i + 1)`.
pub fn colex_rank(face: &[usize]) -> u64 {
    face.iter()
        .enumerate()
        .map(|(i, &s)| binomial(s, i + 1))
        .sum()
}

/// Inverse of [`colex_rank`] for `k`-element subsets.
pub fn colex_unrank(mut rank: u64, k: usize) -> Vec<usize> {
    let mut face = vec![0; k];
    for i in (1..=k).rev() {
        // Largest c with C(c, i) ≤ rank; C(c, i) grows with c.
        let mut lo = i - 1;
        let mut hi = i;
        while binomial(hi, i) <= rank {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if binomial(mid, i) <= rank {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        face[i - 1] = lo;
        rank -= binomial(lo, i);
    }
    face
}

/// Calls `visit` with each `k`-subset of `set` (in lexicographic order of
/// positions). `buf` is scratch of length `k`.
fn for_each_subset(set: &[usize], k: usize, mut visit: impl FnMut(&[usize])) {
    let n = set.len();
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = set[i];
        }
        visit(&buf);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A `d`-dimensional complex on `n` vertices with complete `(d−1)`-skeleton,
/// given by its `d`-faces (in insertion order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    n: usize,
    d: usize,
    faces: Vec<Vec<usize>>,
}

fn check_dims(n: usize, d: usize) -> Result<()> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    if d + 1 > n {
        return Err(invalid(
            "d",
            format!("need d + 1 ≤ n, got d = {d}, n = {n}"),
        ));
    }
    Ok(())
}

impl Complex {
    pub fn new(n: usize, d: usize, faces: Vec<Vec<usize>>) -> Result<Self> {
        check_dims(n, d)?;
        let mut seen = std::collections::HashSet::with_capacity(faces.len());
        for f in &faces {
            if f.len() != d + 1 {
                return Err(Error::Dimension(format!(
                    "face {f:?} has {} vertices, expected {}",
                    f.len(),
                    d + 1
                )));
            }
            if f.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("face", format!("{f:?} is not strictly increasing")));
            }
            if let Some(&v) = f.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if !seen.insert(colex_rank(f)) {
                return Err(invalid("face", format!("{f:?} listed twice")));
            }
        }
        Ok(Complex { n, d, faces })
    }

    /// The bare `(d−1)`-skeleton.
    pub fn empty(n: usize, d: usize) -> Result<Self> {
        Complex::new(n, d, Vec::new())
    }

    /// Every `d`-face, in colex order.
    pub fn full(n: usize, d: usize) -> Result<Self> {
        check_dims(n, d)?;
        let total = binomial(n, d + 1);
        let faces = (0..total).map(|r| colex_unrank(r, d + 1)).collect();
        Ok(Complex { n, d, faces })
    }

    pub(crate) fn from_faces_unchecked(n: usize, d: usize, faces: Vec<Vec<usize>>) -> Self {
        Complex { n, d, faces }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Number of `(d−1)`-faces, `C(n, d)`.
    pub fn ridge_count(&self) -> usize {
        binomial(self.n, self.d) as usize
    }

    /// Format: a header line `n d m`, then one face per line.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.n, self.d, self.faces.len())?;
        for f in &self.faces {
            let line: Vec<String> = f.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((i, line)) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break parse_numbers(&line, i + 1)?;
                    }
                }
                None => {
                    return Err(Error::Parse {
                        line: 1,
                        reason: "missing header".into(),
                    })
                }
            }
        };
        let [n, d, m] = header[..] else {
            return Err(Error::Parse {
                line: 1,
                reason: "header must be `n d m`".into(),
            });
        };
        let mut faces = Vec::with_capacity(m);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            faces.push(parse_numbers(&line, i + 1)?);
        }
        if faces.len() != m {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header promises {m} faces, found {}", faces.len()),
            });
        }
        Complex::new(n, d, faces)
    }
}

/// `Y_d(n, p)`: each of the `C(n, d+1)` faces independently with
/// probability `p`, sampled by geometric skips over colex ranks.
pub fn sample_complex(n: usize, d: usize, p: f64, seed: u64) -> Result<Complex> {
    check_dims(n, d)?;
    check_probability(p)?;
    let total = binomial(n, d + 1);
    let mut faces = Vec::new();
    if p == 0.0 {
        return Ok(Complex::from_faces_unchecked(n, d, faces));
    }
    if p == 1.0 {
        return Complex::full(n, d);
    }
    let mut rng = rng_from_seed(seed);
    let log_q = (-p).ln_1p();
    let mut slot: u64 = 0;
    loop {
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (total - slot) as f64 {
            break;
        }
        slot += skip as u64;
        faces.push(colex_unrank(slot, d + 1));
        slot += 1;
        if slot >= total {
            break;
        }
    }
    Ok(Complex::from_faces_unchecked(n, d, faces))
}

/// The face-addition process as a uniformly random order of all `d`-faces.
///
/// The continuous-time process with i.i.d. Exp(1) birth times visits faces
/// in a uniformly random order, and at time `t` contains each face with
/// probability `p(t) = 1 − e^{−t}`. Only the order is materialized; the
/// clock is the analytic map `m ↔ p = m / N` (`N = C(n, d+1)`).
#[derive(Clone, Debug)]
pub struct FaceProcess {
    n: usize,
    d: usize,
    seed: u64,
    total: u64,
}

impl FaceProcess {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `N = C(n, d+1)`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Faces in arrival order.
    pub fn faces(&self) -> FaceStream {
        FaceStream {
            k: self.d + 1,
            next: 0,
            total: self.total,
            displaced: HashMap::new(),
            rng: rng_from_seed(self.seed),
        }
    }

    /// The complex formed by the first `m` arrivals.
    pub fn prefix(&self, m: usize) -> Complex {
        let m = (m as u64).min(self.total) as usize;
        Complex::from_faces_unchecked(self.n, self.d, self.faces().take(m).collect())
    }

    /// Face density `m / N` after `m` arrivals.
    pub fn density(&self, m: usize) -> f64 {
        m as f64 / self.total as f64
    }

    /// Time `t` with `p(t) = m / N`, i.e. `t = −ln(1 − m/N)`.
    pub fn time(&self, m: usize) -> f64 {
        -(-self.density(m)).ln_1p()
    }

    /// Arrival count matching density `p`, rounded to the nearest step.
    pub fn index_for_density(&self, p: f64) -> usize {
        (p.clamp(0.0, 1.0) * self.total as f64).round() as usize
    }

    /// Arrival count matching time `t`.
    pub fn index_for_time(&self, t: f64) -> usize {
        self.index_for_density(-(-t).exp_m1())
    }
}

pub fn face_process(n: usize, d: usize, seed: u64) -> Result<FaceProcess> {
    check_dims(n, d)?;
    Ok(FaceProcess {
        n,
        d,
        seed,
        total: binomial(n, d + 1),
    })
}

/// Lazy Fisher–Yates shuffle of the colex ranks `0..N`; memory is
/// proportional to the number of faces drawn.
pub struct FaceStream {
    k: usize,
    next: u64,
    total: u64,
    displaced: HashMap<u64, u64>,
    rng: TrialRng,
}

impl FaceStream {
    /// Next face as a colex rank.
    pub fn next_rank(&mut self) -> Option<u64> {
        if self.next >= self.total {
            return None;
        }
        let i = self.next;
        let j = self.rng.gen_range(i..self.total);
        let at_j = self.displaced.get(&j).copied().unwrap_or(j);
        let at_i = self.displaced.remove(&i).unwrap_or(i);
        if j != i {
            self.displaced.insert(j, at_i);
        }
        self.next += 1;
        Some(at_j)
    }
}

impl Iterator for FaceStream {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let k = self.k;
        self.next_rank().map(|r| colex_unrank(r, k))
    }
}

/// Position of vertex `w ∉ f` among the vertices outside `f`.
fn link_index(f: &[usize], w: usize) -> usize {
    w - f.iter().filter(|&&x| x < w).count()
}

/// Vertex of the ambient complex for link index `i` (inverse of
/// [`link_index`]).
pub fn link_vertex(f: &[usize], i: usize) -> usize {
    let mut w = i;
    for &x in f {
        if x <= w {
            w += 1;
        }
    }
    w
}

fn check_link_face(y: &Complex, f: &[usize]) -> Result<()> {
    if y.d < 2 {
        return Err(invalid("d", "links of (d−2)-faces need d ≥ 2"));
    }
    if f.len() != y.d - 1 {
        return Err(Error::Dimension(format!(
            "link face must have {} vertices, got {}",
            y.d - 1,
            f.len()
        )));
    }
    if f.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("f", format!("{f:?} is not strictly increasing")));
    }
    if let Some(&v) = f.iter().find(|&&v| v >= y.n) {
        return Err(Error::VertexOutOfRange { vertex: v, n: y.n });
    }
    Ok(())
}

/// `lk(f)` on the `n − (d−1)` vertices outside `f` (relabelled in
/// increasing order): `u ~ v` iff `f ∪ {u, v}` is a face.
pub fn link(y: &Complex, f: &[usize]) -> Result<Graph> {
    check_link_face(y, f)?;
    let mut edges = Vec::new();
    for face in &y.faces {
        let mut rest = [usize::MAX; 2];
        let mut extra = 0;
        let mut j = 0;
        for &v in face {
            if j < f.len() && f[j] == v {
                j += 1;
            } else {
                if extra < 2 {
                    rest[extra] = v;
                }
                extra += 1;
            }
        }
        if j == f.len() && extra == 2 {
            edges.push((link_index(f, rest[0]), link_index(f, rest[1])));
        }
    }
    Graph::from_edges(y.n - f.len(), edges)
}

/// All links, indexed by the colex rank of the `(d−1)`-vertex face, built
/// in one pass: each face contributes one edge to each of its `C(d+1, 2)`
/// codimension-2 subfaces.
pub fn links(y: &Complex) -> Result<Vec<Graph>> {
    if y.d < 2 {
        return Err(invalid("d", "links of (d−2)-faces need d ≥ 2"));
    }
    let k = y.d - 1;
    let count = binomial(y.n, k) as usize;
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
    let mut sub = vec![0; k];
    for face in &y.faces {
        let len = face.len();
        for a in 0..len {
            for b in a + 1..len {
                let mut t = 0;
                for (i, &v) in face.iter().enumerate() {
                    if i != a && i != b {
                        sub[t] = v;
                        t += 1;
                    }
                }
                let r = colex_rank(&sub) as usize;
                edges[r].push((link_index(&sub, face[a]), link_index(&sub, face[b])));
            }
        }
    }
    edges
        .into_iter()
        .map(|e| Graph::from_edges(y.n - k, e))
        .collect()
}

/// Exact `d`-degree of every `(d−1)`-face, maintained incrementally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexStats {
    pub isolated_count: usize,
    /// Indexed by colex rank of the `(d−1)`-face.
    pub degree: Vec<u32>,
    d: usize,
}

impl ComplexStats {
    /// Stats of the bare skeleton: every `(d−1)`-face isolated.
    pub fn new(n: usize, d: usize) -> Self {
        let count = binomial(n, d) as usize;
        ComplexStats {
            isolated_count: count,
            degree: vec![0; count],
            d,
        }
    }

    /// Records one new `d`-face; `O(d)` table updates.
    pub fn insert(&mut self, face: &[usize]) {
        debug_assert_eq!(face.len(), self.d + 1);
        let mut facet = Vec::with_capacity(self.d);
        for skip in 0..face.len() {
            facet.clear();
            facet.extend(
                face.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v),
            );
            let r = colex_rank(&facet) as usize;
            if self.degree[r] == 0 {
                self.isolated_count -= 1;
            }
            self.degree[r] += 1;
        }
    }

    pub fn is_isolated(&self, rank: usize) -> bool {
        self.degree[rank] == 0
    }

    /// Recount from the degree table.
    pub fn recount_isolated(&self) -> usize {
        self.degree.iter().filter(|&&x| x == 0).count()
    }
}

pub fn isolated_faces(y: &Complex) -> ComplexStats {
    let mut stats = ComplexStats::new(y.n, y.d);
    for f in &y.faces {
        stats.insert(f);
    }
    stats
}

/// `Ỹ`: the complex with its isolated `(d−1)`-faces removed from the
/// skeleton. The `d`-faces are unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stripped {
    /// Membership of each `(d−1)`-face (by colex rank) in `Ỹ`.
    pub kept: Vec<bool>,
    pub removed: Vec<Vec<usize>>,
}

impl Stripped {
    pub fn kept_count(&self) -> usize {
        self.kept.len() - self.removed.len()
    }
}

pub fn strip_isolated(y: &Complex) -> Stripped {
    let stats = isolated_faces(y);
    let kept: Vec<bool> = stats.degree.iter().map(|&x| x > 0).collect();
    let removed = (0..kept.len())
        .filter(|&r| !kept[r])
        .map(|r| colex_unrank(r as u64, y.d))
        .collect();
    Stripped { kept, removed }
}

/// Every `(d−2)`-face lies in some `d`-face.
pub fn is_pure(y: &Complex) -> Result<bool> {
    if y.d < 2 {
        return Err(invalid("d", "purity of the stripped complex needs d ≥ 2"));
    }
    let k = y.d - 1;
    let mut covered = vec![false; binomial(y.n, k) as usize];
    let mut remaining = covered.len();
    for face in &y.faces {
        for_each_subset(face, k, |sub| {
            let r = colex_rank(sub) as usize;
            if !std::mem::replace(&mut covered[r], true) {
                remaining -= 1;
            }
        });
        if remaining == 0 {
            return Ok(true);
        }
    }
    Ok(remaining == 0)
}

/// Reference degree for link fuzz thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FuzzThreshold {
    /// A fixed reference degree, e.g. `d(t₀)` frozen at the start time.
    Frozen(f64),
    /// `d(t) = (n − 1)·p` with `p` the current face density.
    Current,
}

/// Fuzz of `lk(f)` for every `(d−2)`-face: link vertices with link degree
/// at most `reference / M`. With a frozen reference the sets shrink as
/// faces arrive.
pub fn link_fuzz(y: &Complex, threshold: FuzzThreshold, m: f64) -> Result<Vec<FuzzSet>> {
    let reference = match threshold {
        FuzzThreshold::Frozen(d0) => d0,
        FuzzThreshold::Current => {
            let p = y.face_count() as f64 / binomial(y.n, y.d + 1) as f64;
            (y.n - 1) as f64 * p
        }
    };
    links(y)?
        .iter()
        .map(|g| fuzz_set(g, reference, m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail::{binom_cdf_unchecked, BinomialSpec};
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn binomial_and_colex() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4000, 2), 7_998_000);
        assert_eq!(binomial(3, 5), 0);
        let mut seen = HashSet::new();
        for r in 0..binomial(9, 4) {
            let f = colex_unrank(r, 4);
            assert!(f.windows(2).all(|w| w[0] < w[1]) && f[3] < 9);
            assert_eq!(colex_rank(&f), r);
            assert!(seen.insert(f));
        }
        assert_eq!(colex_rank(&[0, 1]), 0);
        assert_eq!(colex_rank(&[0, 2]), 1);
        assert_eq!(colex_rank(&[1, 2]), 2);
    }

    #[test]
    fn sample_examples() {
        let y = sample_complex(5, 2, 1.0, 0).unwrap();
        assert_eq!(y.face_count(), 10);
        let y = sample_complex(5, 2, 0.0, 0).unwrap();
        assert_eq!(y.face_count(), 0);
        assert_eq!(isolated_faces(&y).isolated_count, 10);
        assert!(sample_complex(5, 5, 0.5, 0).is_err());
        assert!(sample_complex(5, 0, 0.5, 0).is_err());
        assert!(sample_complex(5, 2, 1.5, 0).is_err());
    }

    #[test]
    fn sample_count_within_four_sigma() {
        let total = binomial(20, 3);
        let p = 0.1;
        let y = sample_complex(20, 2, p, 12345).unwrap();
        let sd = (total as f64 * p * (1.0 - p)).sqrt();
        let mean = total as f64 * p;
        assert!((y.face_count() as f64 - mean).abs() <= 4.0 * sd);
        // The 4σ window carries essentially all of the exact binomial mass.
        let spec = BinomialSpec::new(total, p).unwrap();
        let lo = (mean - 4.0 * sd).ceil() as u64;
        let hi = (mean + 4.0 * sd).floor() as u64;
        let mass = binom_cdf_unchecked(&spec, hi) - binom_cdf_unchecked(&spec, lo - 1);
        assert!(mass > 0.999);
        Complex::new(20, 2, y.faces().to_vec()).unwrap();
    }

    #[test]
    fn process_prefix_examples() {
        let proc = face_process(6, 2, 3).unwrap();
        assert_eq!(proc.prefix(0).face_count(), 0);
        let all = proc.prefix(20);
        let set: HashSet<_> = all.faces().iter().cloned().collect();
        assert_eq!(set.len(), 20);
        assert!(Complex::new(6, 2, all.faces().to_vec()).is_ok());
        assert_eq!(proc.faces().count(), 20);
        assert_eq!(proc.time(0), 0.0);
        assert!(proc.time(20).is_infinite());
        let m = proc.index_for_time(proc.time(7));
        assert_eq!(m, 7);
    }

    #[test]
    fn first_arrival_is_uniform() {
        // χ² goodness of fit over the 20 faces of n = 6, d = 2.
        let trials = 10_000;
        let mut counts = vec![0usize; 20];
        for seed in 0..trials {
            let proc = face_process(6, 2, seed).unwrap();
            let r = proc.faces().next_rank().unwrap();
            counts[r as usize] += 1;
        }
        let expected = trials as f64 / 20.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 0.99 quantile of χ² with 19 degrees of freedom.
        const CHI2_19_99: f64 = 36.191;
        assert!(chi2 < CHI2_19_99, "chi2 = {chi2}");
    }

    #[test]
    fn link_examples() {
        let full = Complex::full(6, 2).unwrap();
        let lk = link(&full, &[0]).unwrap();
        assert_eq!(lk, Graph::complete(5));

        let one = Complex::new(5, 2, vec![vec![0, 1, 2]]).unwrap();
        let lk = link(&one, &[0]).unwrap();
        assert_eq!(lk.edges().collect::<Vec<_>>(), vec![(0, 1)]);

        let y = Complex::new(6, 3, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 4]]).unwrap();
        let lk = link(&y, &[0, 1]).unwrap();
        let edges: Vec<(usize, usize)> = lk
            .edges()
            .map(|(a, b)| (link_vertex(&[0, 1], a), link_vertex(&[0, 1], b)))
            .collect();
        assert_eq!(edges, vec![(2, 3), (2, 4)]);

        assert!(link(&y, &[0]).is_err());
        assert!(link(&y, &[1, 0]).is_err());
        assert!(link(&y, &[0, 9]).is_err());
        assert!(link(&Complex::empty(4, 1).unwrap(), &[]).is_err());
    }

    #[test]
    fn links_match_single_link() {
        for seed in 0..5 {
            let y = sample_complex(9, 3, 0.3, seed).unwrap();
            let all = links(&y).unwrap();
            for (r, g) in all.iter().enumerate() {
                let f = colex_unrank(r as u64, 2);
                assert_eq!(g, &link(&y, &f).unwrap());
            }
        }
    }

    #[test]
    fn isolated_examples() {
        assert_eq!(
            isolated_faces(&Complex::empty(7, 2).unwrap()).isolated_count,
            21
        );
        assert_eq!(
            isolated_faces(&Complex::full(7, 2).unwrap()).isolated_count,
            0
        );
        let one = Complex::new(5, 2, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(isolated_faces(&one).isolated_count, 7);
    }

    #[test]
    fn strip_examples() {
        assert!(strip_isolated(&Complex::full(6, 2).unwrap())
            .removed
            .is_empty());
        let s = strip_isolated(&Complex::empty(5, 2).unwrap());
        assert_eq!(s.removed.len(), 10);
        let one = Complex::new(5, 2, vec![vec![0, 1, 2]]).unwrap();
        let s = strip_isolated(&one);
        assert_eq!((s.removed.len(), s.kept_count()), (7, 3));
    }

    #[test]
    fn purity_examples() {
        assert!(is_pure(&Complex::full(6, 2).unwrap()).unwrap());
        assert!(!is_pure(&Complex::empty(6, 2).unwrap()).unwrap());
        let star: Vec<Vec<usize>> = (1..5)
            .flat_map(|a| (a + 1..5).map(move |b| vec![0, a, b]))
            .collect();
        assert!(is_pure(&Complex::new(5, 2, star).unwrap()).unwrap());
        assert!(is_pure(&Complex::empty(4, 1).unwrap()).is_err());
    }

    #[test]
    fn complex_io_round_trip() {
        let y = sample_complex(9, 2, 0.3, 4).unwrap();
        let mut buf = Vec::new();
        y.write_to(&mut buf).unwrap();
        assert_eq!(Complex::read_from(&buf[..]).unwrap(), y);
        assert!(Complex::read_from(&b"4 2 1\n0 1\n"[..]).is_err());
        assert!(Complex::read_from(&b"4 2 2\n0 1 2\n"[..]).is_err());
        assert!(Complex::read_from(&b"4 2 1\n2 1 0\n"[..]).is_err());
    }

    #[test]
    fn link_fuzz_frozen_shrinks() {
        let proc = face_process(12, 2, 9).unwrap();
        let mut previous: Option<Vec<FuzzSet>> = None;
        for m in (0..=220).step_by(20) {
            let fz = link_fuzz(&proc.prefix(m), FuzzThreshold::Frozen(4.0), 2.0).unwrap();
            if let Some(prev) = &previous {
                for (now, before) in fz.iter().zip(prev) {
                    assert!(now.members.iter().all(|&v| before.contains(v)));
                }
            }
            previous = Some(fz);
        }
        let current = link_fuzz(&proc.prefix(100), FuzzThreshold::Current, 2.0).unwrap();
        assert_eq!(current.len(), 12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn incremental_stats_match_recount(seed in 0u64..10_000, n in 4usize..10, d in 1usize..4) {
            prop_assume!(d + 1 <= n);
            let proc = face_process(n, d, seed).unwrap();
            let mut stats = ComplexStats::new(n, d);
            let mut prev = stats.isolated_count;
            for (m, face) in proc.faces().enumerate() {
                stats.insert(&face);
                prop_assert!(stats.isolated_count <= prev);
                prev = stats.isolated_count;
                if m % 3 == 0 {
                    let fresh = isolated_faces(&proc.prefix(m + 1));
                    prop_assert_eq!(&fresh, &stats);
                    prop_assert_eq!(fresh.recount_isolated(), stats.isolated_count);
                }
            }
            prop_assert_eq!(stats.isolated_count, 0);
        }

        #[test]
        fn link_degrees_count_faces(seed in 0u64..10_000, n in 4usize..11, d in 2usize..4, p in 0.0f64..1.0) {
            prop_assume!(d + 1 <= n);
            let y = sample_complex(n, d, p, seed).unwrap();
            for (r, g) in links(&y).unwrap().iter().enumerate() {
                let f = colex_unrank(r as u64, d - 1);
                let containing = y.faces().iter()
                    .filter(|face| f.iter().all(|v| face.contains(v)))
                    .count();
                let total: usize = g.degrees().iter().sum();
                prop_assert_eq!(total, 2 * containing);
                for w in 0..g.n() {
                    let v = link_vertex(&f, w);
                    let mut fw = f.clone();
                    fw.push(v);
                    fw.sort_unstable();
                    let through = y.faces().iter()
                        .filter(|face| fw.iter().all(|x| face.contains(x)))
                        .count();
                    prop_assert_eq!(g.degree(w), through);
                }
            }
        }

        #[test]
        fn faces_are_valid(seed in 0u64..10_000, n in 3usize..12, d in 1usize..4, p in 0.0f64..1.0) {
            prop_assume!(d + 1 <= n);
            let y = sample_complex(n, d, p, seed).unwrap();
            prop_assert!(Complex::new(n, d, y.faces().to_vec()).is_ok());
            prop_assert_eq!(&y, &sample_complex(n, d, p, seed).unwrap());
        }
    }
}
