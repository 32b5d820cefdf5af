//! Rational Betti numbers of complexes with a complete `(d−1)`-skeleton.
//!
//! Homology and cohomology over `ℚ` have equal dimensions in every degree
//! for finite complexes, so everything here is computed from boundary
//! ranks.

mod boundary;
mod exact;
mod field;
mod tracker;

pub use boundary::{boundary_matrix, cone_boundary, cone_column, face_boundary, BoundaryMatrix};
pub use exact::{rank_exact, rank_exact_dense, EXACT_RANK_MAX_DIM};
pub use field::{is_prime, random_prime, PrimeField, PRIME_BITS};
pub use tracker::{rank_mod_p, RankTracker};

use serde::Serialize;

use crate::complex::{binomial, colex_unrank, isolated_faces, Complex};
use crate::error::{invalid, Result};

/// Seed for the prime used when the caller does not supply one.
pub const DEFAULT_PRIME_SEED: u64 = 0x5EED_0F_C0_40_1065;

/// Rank of the boundary of the given `k`-vertex faces mod a prime drawn
/// from `seed`, via the cone restriction (faces through vertex 0 are unit
/// columns and go first, since they never cause fill-in).
pub fn boundary_rank_mod_p<'a>(
    n: usize,
    k: usize,
    faces: impl IntoIterator<Item = &'a [usize]>,
    seed: u64,
) -> usize {
    let rows = binomial(n - 1, k - 1) as usize;
    let mut tracker = RankTracker::new(rows, seed);
    let mut rest = Vec::new();
    for face in faces {
        if face[0] == 0 {
            tracker.add_signed(&cone_column(face));
        } else {
            rest.push(face);
        }
    }
    for face in rest {
        tracker.add_signed(&cone_column(face));
    }
    tracker.rank()
}

/// `b_{d−1}(Y) = C(n−1, d) − rank ∂_d`, valid because the `(d−1)`-skeleton
/// is complete.
pub fn betti_dminus1(y: &Complex) -> usize {
    betti_dminus1_with(y, DEFAULT_PRIME_SEED)
}

pub fn betti_dminus1_with(y: &Complex, prime_seed: u64) -> usize {
    let (n, d) = (y.n(), y.d());
    let rank = boundary_rank_mod_p(n, d + 1, y.faces().iter().map(|f| f.as_slice()), prime_seed);
    binomial(n - 1, d) as usize - rank
}

/// `b_{d−1}` over `ℚ` by exact elimination on the full boundary matrix.
pub fn betti_dminus1_exact(y: &Complex) -> Result<usize> {
    Ok(binomial(y.n() - 1, y.d()) as usize - rank_exact(&boundary_matrix(y))?)
}

/// Betti numbers of `Y` and of `Ỹ` (isolated `(d−1)`-faces removed).
///
/// `Ỹ` keeps every `d`-face and every face of dimension `< d−1`, so its
/// `(d−1)`-cycles are computed on the kept faces only. The exact relation
/// is `b(Y) = b(Ỹ) + I − b̃_{d−2}(Ỹ)`; `b̃_{d−2}(Ỹ)` vanishes whenever
/// removing the isolated faces leaves the `(d−1)`-skeleton
/// `(d−2)`-connected, and then `b(Y) = b(Ỹ) + I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StrippedBetti {
    /// `b_{d−1}(Y)`.
    pub full: usize,
    /// `b_{d−1}(Ỹ)`.
    pub stripped: usize,
    /// Number of isolated `(d−1)`-faces.
    pub isolated: usize,
    /// `b̃_{d−2}(Ỹ)`: homology created by the removal.
    pub defect: usize,
}

impl StrippedBetti {
    /// `b(Y) = b(Ỹ) + I`.
    pub fn additive(&self) -> bool {
        self.full == self.stripped + self.isolated
    }

    /// `b(Y) + b̃_{d−2}(Ỹ) = b(Ỹ) + I`, true for every complex.
    pub fn balanced(&self) -> bool {
        self.full + self.defect == self.stripped + self.isolated
    }
}

pub fn betti_stripped_identity(y: &Complex) -> Result<StrippedBetti> {
    betti_stripped_identity_with(y, DEFAULT_PRIME_SEED)
}

pub fn betti_stripped_identity_with(y: &Complex, prime_seed: u64) -> Result<StrippedBetti> {
    let (n, d) = (y.n(), y.d());
    if d < 2 {
        return Err(invalid("d", "the stripped complex needs d ≥ 2"));
    }
    let stats = isolated_faces(y);
    let kept: Vec<Vec<usize>> = (0..stats.degree.len())
        .filter(|&r| !stats.is_isolated(r))
        .map(|r| colex_unrank(r as u64, d))
        .collect();
    let rank_top =
        boundary_rank_mod_p(n, d + 1, y.faces().iter().map(|f| f.as_slice()), prime_seed);
    let rank_kept = boundary_rank_mod_p(n, d, kept.iter().map(|f| f.as_slice()), prime_seed);
    let full = binomial(n - 1, d) as usize - rank_top;
    let cycles = kept.len() - rank_kept;
    Ok(StrippedBetti {
        full,
        stripped: cycles - rank_top,
        isolated: stats.isolated_count,
        defect: binomial(n - 1, d - 1) as usize - rank_kept,
    })
}
