use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::boundary::BoundaryMatrix;
use crate::error::{Error, Result};

/// Largest row or column count accepted by [`rank_exact`].
pub const EXACT_RANK_MAX_DIM: usize = 2000;

type SparseVec = Vec<(usize, BigInt)>;

/// `a·x − b·y` on sorted sparse vectors, dropping zeros.
fn combine(a: &BigInt, x: &SparseVec, b: &BigInt, y: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (idx, v) = if take_x {
            let v = a * &x[i].1;
            i += 1;
            (x[i - 1].0, v)
        } else if take_y {
            let v = -(b * &y[j].1);
            j += 1;
            (y[j - 1].0, v)
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            i += 1;
            j += 1;
            (x[i - 1].0, v)
        };
        if !v.is_zero() {
            out.push((idx, v));
        }
    }
    out
}

/// Divides out the content and makes the leading entry positive.
fn normalize(v: &mut SparseVec) {
    let Some(first) = v.first() else { return };
    let mut g = first.1.abs();
    for (_, x) in v.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    let flip = first.1.is_negative();
    if !g.is_one() || flip {
        let g = if flip { -g } else { g };
        for (_, x) in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Rank over `ℚ` by fraction-free elimination on integer columns, with
/// each reduced column divided by its content to keep entries small.
pub fn rank_exact(m: &BoundaryMatrix) -> Result<usize> {
    if m.rows() > EXACT_RANK_MAX_DIM || m.cols() > EXACT_RANK_MAX_DIM {
        return Err(Error::SizeCap(format!(
            "exact rank supports at most {EXACT_RANK_MAX_DIM}×{EXACT_RANK_MAX_DIM}, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    rank_exact_columns(m.columns().iter().map(|col| {
        let mut v: SparseVec = col.iter().map(|&(r, s)| (r, BigInt::from(s))).collect();
        v.sort_by_key(|e| e.0);
        v
    }))
}

/// Echelon basis keyed by leading row.
fn rank_exact_columns(columns: impl Iterator<Item = SparseVec>) -> Result<usize> {
    let mut basis: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for mut v in columns {
        normalize(&mut v);
        while let Some(&(lead, _)) = v.first() {
            match basis.get(&lead) {
                Some(b) => {
                    let g = b[0].1.gcd(&v[0].1);
                    let a = &b[0].1 / &g;
                    let c = &v[0].1 / &g;
                    v = combine(&a, &v, &c, b);
                    normalize(&mut v);
                }
                None => {
                    basis.insert(lead, v);
                    break;
                }
            }
        }
    }
    Ok(basis.len())
}

/// Exact rank of a dense integer matrix, for tests and small checks.
pub fn rank_exact_dense(rows: &[Vec<i64>]) -> Result<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.len() > EXACT_RANK_MAX_DIM || ncols > EXACT_RANK_MAX_DIM {
        return Err(Error::SizeCap(format!(
            "exact rank supports at most {EXACT_RANK_MAX_DIM}×{EXACT_RANK_MAX_DIM}"
        )));
    }
    rank_exact_columns((0..ncols).map(|j| {
        rows.iter()
            .enumerate()
            .filter(|(_, r)| r[j] != 0)
            .map(|(i, r)| (i, BigInt::from(r[j])))
            .collect()
    }))
}
