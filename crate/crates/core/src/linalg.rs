//! Dense symmetric matrices and a symmetric eigensolver.
//!
//! The solver reduces the matrix to tridiagonal form with Householder
//! reflections and then runs the implicit-shift QL iteration on the
//! tridiagonal. Two paths are provided:
//!
//! * [`eigenvalues`] works on a packed lower triangle and fuses each
//!   rank-2 update with the matrix-vector product of the next reflection,
//!   so the trailing block is streamed once per step. This is the path
//!   used for mid-size Laplacians.
//! * With the `system-lapack` feature, orders above [`LAPACK_MIN_N`] go to
//!   LAPACK's `dsyev`, whose blocked reduction is several times faster at
//!   the largest desk-scale sizes.
//! * [`eigh`] accumulates the orthogonal transformation and returns
//!   eigenvectors together with the measured residual.

use crate::error::{Error, Result};

/// Dense symmetric matrix in row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from row-major entries, rejecting anything that is
    /// not exactly symmetric.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for order {n}, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension("matrix rows must be square".into()));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
        if i != j {
            self.data[j * self.n + i] += v;
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// Principal submatrix on the given index set, in the given order.
    pub fn principal_submatrix(&self, idx: &[usize]) -> SymMatrix {
        let m = idx.len();
        let mut out = SymMatrix::zeros(m);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.data[a * m + b] = self.get(i, j);
            }
        }
        out
    }

    fn packed_lower(&self) -> Vec<f64> {
        let n = self.n;
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            packed.extend_from_slice(&self.data[i * n..i * n + i + 1]);
        }
        packed
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenvalues with an implicit bound on the eigen-residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Absolute bound on `‖S v − λ v‖` for unit eigenvectors `v`: measured
    /// when eigenvectors were formed, otherwise the backward-error bound of
    /// the Householder/QL reduction.
    pub residual_tol: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }
}

/// Full eigendecomposition: `vectors[k]` is the unit eigenvector for
/// `values[k]`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Largest measured `‖S v − λ v‖` over the returned pairs.
    pub max_residual: f64,
}

const MAX_QL_SWEEPS: usize = 64;

/// Order up to which [`full_spectrum`] forms eigenvectors and measures the
/// residual directly instead of relying on the backward-error bound.
pub const MEASURED_RESIDUAL_MAX_N: usize = 192;

/// All eigenvalues of `m`, ascending. `tol` is the relative residual
/// budget: the call fails if the achievable residual exceeds
/// `tol · ‖m‖_op`.
pub fn full_spectrum(m: &SymMatrix, tol: f64) -> Result<Spectrum> {
    let n = m.n();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            residual_tol: 0.0,
        });
    }
    let (eigenvalues, residual) = if n <= MEASURED_RESIDUAL_MAX_N {
        let e = eigh(m)?;
        (e.values, e.max_residual)
    } else {
        let values = eigenvalues_auto(m)?;
        // Householder tridiagonalization and QL with Givens rotations are
        // backward stable: the computed values are exact for S + E with
        // ‖E‖ bounded by a small multiple of n·ε·‖S‖_F.
        let bound = 4.0 * n as f64 * f64::EPSILON * m.frobenius_norm();
        (values, bound)
    };
    let op_norm = eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if residual > tol * op_norm.max(f64::MIN_POSITIVE) && residual > f64::EPSILON {
        return Err(Error::Convergence(format!(
            "residual {residual:e} exceeds {tol:e} x ‖S‖ = {:e}",
            tol * op_norm
        )));
    }
    Ok(Spectrum {
        eigenvalues,
        residual_tol: residual,
    })
}

/// Orders above this use LAPACK when the `system-lapack` feature is on.
pub const LAPACK_MIN_N: usize = 512;

fn eigenvalues_auto(m: &SymMatrix) -> Result<Vec<f64>> {
    #[cfg(feature = "system-lapack")]
    if m.n() > LAPACK_MIN_N {
        return eigenvalues_lapack(m);
    }
    eigenvalues(m)
}

/// Eigenvalues through LAPACK `dsyev`, ascending.
#[cfg(feature = "system-lapack")]
pub fn eigenvalues_lapack(m: &SymMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let order = i32::try_from(n)
        .map_err(|_| Error::Dimension(format!("order {n} is too large for LAPACK")))?;
    // Symmetric, so row-major storage is also the column-major matrix.
    let mut a = m.data.clone();
    let mut w = vec![0.0; n];
    let mut info = 0;
    let mut query = [0.0];
    // SAFETY: buffers are sized per the LAPACK contract for JOBZ = 'N'.
    unsafe {
        lapack::dsyev(
            b'N', b'L', order, &mut a, order, &mut w, &mut query, -1, &mut info,
        )
    };
    let lwork = (query[0] as usize).max(3 * n);
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack::dsyev(
            b'N',
            b'L',
            order,
            &mut a,
            order,
            &mut w,
            &mut work,
            lwork as i32,
            &mut info,
        )
    };
    if info != 0 {
        return Err(Error::Convergence(format!("dsyev returned info = {info}")));
    }
    Ok(w)
}

/// Eigenvalues only, ascending, from the built-in solver.
pub fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut packed = m.packed_lower();
    let (mut diag, mut off) = tridiagonalize_packed(&mut packed, n);
    drop(packed);
    ql_implicit(&mut diag, &mut off, None)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

#[inline]
fn row_offset(i: usize) -> usize {
    i * (i + 1) / 2
}

/// Householder reduction of a packed lower triangle. Returns the diagonal
/// and the subdiagonal, with `off[i]` coupling rows `i − 1` and `i`
/// (`off[0] = 0`).
fn tridiagonalize_packed(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    if n == 1 {
        diag[0] = a[0];
        return (diag, off);
    }

    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut v_next = vec![0.0; n];
    let mut p_next = vec![0.0; n];

    // Reflection for row `i` annihilates a[i][0..i-1], acting on the
    // leading block of order `i`. Returns h (0 when no reflection needed).
    let reflect = |row: &[f64], v: &mut [f64], off_i: &mut f64| -> f64 {
        let len = row.len();
        let l = len - 1;
        let scale: f64 = row.iter().map(|x| x.abs()).sum();
        if len == 1 || scale == 0.0 {
            *off_i = row[l];
            v[..len].iter_mut().for_each(|x| *x = 0.0);
            return 0.0;
        }
        let mut sigma = 0.0;
        for (vk, &rk) in v[..len].iter_mut().zip(row) {
            *vk = rk / scale;
            sigma += *vk * *vk;
        }
        let f = v[l];
        let g = if f >= 0.0 {
            -sigma.sqrt()
        } else {
            sigma.sqrt()
        };
        *off_i = scale * g;
        let h = sigma - f * g;
        v[l] = f - g;
        // v is in scaled units; rescale h so that H = I − v vᵀ / h holds
        // for the scaled v.
        h
    };

    // Initial reflection for the last row and its matrix-vector product.
    let last = n - 1;
    let mut h = {
        let row = &a[row_offset(last)..row_offset(last) + last];
        reflect(row, &mut v, &mut off[last])
    };
    diag[last] = a[row_offset(last) + last];
    if h != 0.0 {
        symv_packed(a, last, &v[..last], &mut p[..last]);
    }

    for i in (1..n).rev() {
        // Block order for this step's update is `i` (rows 0..i).
        let len = i;
        if h != 0.0 {
            for x in p[..len].iter_mut() {
                *x /= h;
            }
            let k = dot(&v[..len], &p[..len]) / (2.0 * h);
            for j in 0..len {
                q[j] = p[j] - k * v[j];
            }
        }
        if i == 1 {
            // Apply the final (trivial) update to a[0][0].
            if h != 0.0 {
                a[0] -= 2.0 * v[0] * q[0];
            }
            diag[0] = a[0];
            break;
        }

        // Update row i-1 first, then build the next reflection from it.
        let next = i - 1;
        let next_off = row_offset(next);
        if h != 0.0 {
            let (vn, qn) = (v[next], q[next]);
            for c in 0..=next {
                a[next_off + c] -= vn * q[c] + qn * v[c];
            }
        }
        diag[next] = a[next_off + next];
        let h_next = {
            let (head, _) = a.split_at(next_off + next);
            let row = &head[next_off..];
            reflect(row, &mut v_next, &mut off[next])
        };

        // Fused pass over rows 0..next: apply this step's update and
        // accumulate p_next = A' v_next on the leading block of order next.
        let need_next = h_next != 0.0;
        p_next[..next].iter_mut().for_each(|x| *x = 0.0);
        for r in 0..next {
            let off_r = row_offset(r);
            let row = &mut a[off_r..off_r + r + 1];
            let (vr, qr) = (v[r], q[r]);
            let vnr = v_next[r];
            let mut acc = 0.0;
            if h != 0.0 {
                if need_next {
                    let (pre, diag_el) = row.split_at_mut(r);
                    acc = update_and_multiply(
                        pre,
                        (&v[..r], &q[..r], vr, qr),
                        (&v_next[..r], &mut p_next[..r], vnr),
                    );
                    let x = diag_el[0] - 2.0 * vr * qr;
                    diag_el[0] = x;
                    acc += x * vnr;
                } else {
                    for c in 0..=r {
                        row[c] -= vr * q[c] + qr * v[c];
                    }
                }
            } else if need_next {
                let (pre, diag_el) = row.split_at(r);
                acc = row_multiply(pre, &v_next[..r], &mut p_next[..r], vnr);
                acc += diag_el[0] * vnr;
            }
            p_next[r] += acc;
        }

        std::mem::swap(&mut v, &mut v_next);
        std::mem::swap(&mut p, &mut p_next);
        h = h_next;
    }
    (diag, off)
}

/// One off-diagonal row segment of a symmetric product: returns
/// `row · x` and adds `row · xr` into `y`. Four independent accumulators
/// keep the reduction from serialising on add latency.
#[inline]
fn row_multiply(row: &[f64], x: &[f64], y: &mut [f64], xr: f64) -> f64 {
    let mut acc = [0.0; 4];
    let mut rc = row.chunks_exact(4);
    let mut xc = x.chunks_exact(4);
    let mut yc = y.chunks_exact_mut(4);
    for ((r4, x4), y4) in (&mut rc).zip(&mut xc).zip(&mut yc) {
        for k in 0..4 {
            acc[k] += r4[k] * x4[k];
            y4[k] += r4[k] * xr;
        }
    }
    let mut tail = 0.0;
    for ((r, x), y) in rc
        .remainder()
        .iter()
        .zip(xc.remainder())
        .zip(yc.into_remainder())
    {
        tail += r * x;
        *y += r * xr;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Rank-2 update `row −= vr·q + qr·v` fused with [`row_multiply`] against
/// the next reflector.
#[inline]
fn update_and_multiply(
    row: &mut [f64],
    (v, q, vr, qr): (&[f64], &[f64], f64, f64),
    (x, y, xr): (&[f64], &mut [f64], f64),
) -> f64 {
    let mut acc = [0.0; 4];
    let mut rc = row.chunks_exact_mut(4);
    let mut vc = v.chunks_exact(4);
    let mut qc = q.chunks_exact(4);
    let mut xc = x.chunks_exact(4);
    let mut yc = y.chunks_exact_mut(4);
    for ((((r4, v4), q4), x4), y4) in (&mut rc)
        .zip(&mut vc)
        .zip(&mut qc)
        .zip(&mut xc)
        .zip(&mut yc)
    {
        for k in 0..4 {
            let t = r4[k] - vr * q4[k] - qr * v4[k];
            r4[k] = t;
            acc[k] += t * x4[k];
            y4[k] += t * xr;
        }
    }
    let mut tail = 0.0;
    let rest = rc
        .into_remainder()
        .iter_mut()
        .zip(vc.remainder())
        .zip(qc.remainder())
        .zip(xc.remainder())
        .zip(yc.into_remainder());
    for ((((r, v), q), x), y) in rest {
        let t = *r - vr * q - qr * v;
        *r = t;
        tail += t * x;
        *y += t * xr;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// y = A x for the leading block of order `len` of a packed lower triangle.
fn symv_packed(a: &[f64], len: usize, x: &[f64], y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = 0.0);
    for r in 0..len {
        let off_r = row_offset(r);
        let row = &a[off_r..off_r + r + 1];
        let xr = x[r];
        let mut acc = row_multiply(&row[..r], &x[..r], &mut y[..r], xr);
        acc += row[r] * xr;
        y[r] += acc;
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. `off[i]` couples
/// `i − 1` and `i` on entry. When `z` is given (row-major, n×n) the
/// rotations are accumulated into its columns.
fn ql_implicit(diag: &mut [f64], off: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    // Shift so that e[i] couples i and i + 1.
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[1..n]);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Convergence(format!(
                    "QL iteration did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let row = &mut z[k * n..(k + 1) * n];
                        let f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Full eigendecomposition with measured residuals, eigenvalues ascending.
pub fn eigh(m: &SymMatrix) -> Result<Eigen> {
    let n = m.n();
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: Vec::new(),
            max_residual: 0.0,
        });
    }
    let mut a = m.data.clone();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    tridiagonalize_accumulate(&mut a, n, &mut diag, &mut off);
    ql_implicit(&mut diag, &mut off, Some(&mut a))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|r| a[r * n + k]).collect())
        .collect();

    let mut max_residual = 0.0_f64;
    for (lambda, v) in values.iter().zip(&vectors) {
        let sv = m.mat_vec(v);
        let res = sv
            .iter()
            .zip(v)
            .map(|(s, x)| (s - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(res);
    }
    Ok(Eigen {
        values,
        vectors,
        max_residual,
    })
}

/// Householder tridiagonalization of a full row-major matrix, leaving the
/// accumulated orthogonal transform in `a`. Output convention as in
/// [`tridiagonalize_packed`].
fn tridiagonalize_accumulate(a: &mut [f64], n: usize, diag: &mut [f64], off: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                off[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let mut f = a[idx(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                off[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                f = 0.0;
                for j in 0..=l {
                    a[idx(j, i)] = a[idx(i, j)] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    off[j] = g / h;
                    f += off[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = off[j] - hh * f;
                    off[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] -= f * off[k] + g * a[idx(i, k)];
                    }
                }
            }
        } else {
            off[i] = a[idx(i, l)];
        }
        diag[i] = h;
    }
    diag[0] = 0.0;
    off[0] = 0.0;
    for i in 0..n {
        if diag[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[idx(i, k)] * a[idx(k, j)];
                }
                for k in 0..i {
                    a[idx(k, j)] -= g * a[idx(k, i)];
                }
            }
        }
        diag[i] = a[idx(i, i)];
        a[idx(i, i)] = 1.0;
        for j in 0..i {
            a[idx(j, i)] = 0.0;
            a[idx(i, j)] = 0.0;
        }
    }
}
