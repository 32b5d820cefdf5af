use super::boundary::BoundaryMatrix;
use super::field::{random_prime, PrimeField};

const NO_PIVOT: usize = usize::MAX;

/// Incremental column rank over `F_p`.
///
/// The basis is kept in reduced row-echelon form: every basis vector has a
/// pivot row where it is 1 and every other basis vector is 0. Reducing a
/// sparse incoming column then only touches the basis vectors at its own
/// pivot rows, and all arithmetic runs over the non-pivot rows.
#[derive(Clone, Debug)]
pub struct RankTracker {
    field: PrimeField,
    rows: usize,
    /// Basis index owning each pivot row.
    pivot_owner: Vec<usize>,
    basis: Vec<Vec<u64>>,
    /// Non-pivot rows, with each row's position in the list.
    free: Vec<usize>,
    free_pos: Vec<usize>,
    scratch: Vec<u64>,
}

impl RankTracker {
    pub fn with_prime(rows: usize, prime: u64) -> Self {
        RankTracker {
            field: PrimeField::new(prime),
            rows,
            pivot_owner: vec![NO_PIVOT; rows],
            basis: Vec::new(),
            free: (0..rows).collect(),
            free_pos: (0..rows).collect(),
            scratch: vec![0; rows],
        }
    }

    /// Tracker over a random 62-bit prime drawn from `seed`.
    pub fn new(rows: usize, seed: u64) -> Self {
        RankTracker::with_prime(rows, random_prime(seed))
    }

    pub fn prime(&self) -> u64 {
        self.field.prime()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Adds a column given as `(row, value)` pairs; returns whether the rank
    /// went up.
    pub fn add_column(&mut self, entries: &[(usize, i64)]) -> bool {
        let f = self.field;
        let mut pivots = Vec::new();
        for &(r, v) in entries {
            let v = f.from_i64(v);
            if v == 0 {
                continue;
            }
            self.scratch[r] = f.add(self.scratch[r], v);
            if self.pivot_owner[r] != NO_PIVOT {
                pivots.push(r);
            }
        }
        pivots.sort_unstable();
        pivots.dedup();
        // Basis vectors vanish on other pivot rows, so pivot coordinates of
        // the column are fixed while we subtract.
        for &r in &pivots {
            let c = std::mem::take(&mut self.scratch[r]);
            if c == 0 {
                continue;
            }
            let b = &self.basis[self.pivot_owner[r]];
            let s = f.scaled(c);
            for &i in &self.free {
                let bi = b[i];
                if bi != 0 {
                    self.scratch[i] = f.sub(self.scratch[i], f.mul_scaled(s, bi));
                }
            }
        }
        let Some(&pivot) = self.free.iter().find(|&&i| self.scratch[i] != 0) else {
            for &(r, _) in entries {
                self.scratch[r] = 0;
            }
            return false;
        };

        // Normalise so the pivot entry is 1, then clear the pivot row from
        // the existing basis.
        let mut x = vec![0u64; self.rows];
        let s = f.scaled(f.inv(self.scratch[pivot]));
        for &i in &self.free {
            let v = std::mem::take(&mut self.scratch[i]);
            if v != 0 {
                x[i] = f.mul_scaled(s, v);
            }
        }
        for b in &mut self.basis {
            let t = b[pivot];
            if t == 0 {
                continue;
            }
            let s = f.scaled(t);
            for &i in &self.free {
                let xi = x[i];
                if xi != 0 {
                    b[i] = f.sub(b[i], f.mul_scaled(s, xi));
                }
            }
        }
        let pos = self.free_pos[pivot];
        let last = *self.free.last().expect("pivot came from the free list");
        self.free.swap_remove(pos);
        if last != pivot {
            self.free_pos[last] = pos;
        }
        self.pivot_owner[pivot] = self.basis.len();
        self.basis.push(x);
        true
    }

    /// Adds a `±1` boundary column.
    pub fn add_signed(&mut self, column: &[(usize, i8)]) -> bool {
        let entries: Vec<(usize, i64)> = column.iter().map(|&(r, s)| (r, s as i64)).collect();
        self.add_column(&entries)
    }
}

/// Rank of `m` over the tracker's field, adding every column of `m` to it.
pub fn rank_mod_p(m: &BoundaryMatrix, tracker: &mut RankTracker) -> usize {
    assert_eq!(m.rows(), tracker.rows(), "tracker has the wrong row count");
    for col in m.columns() {
        tracker.add_signed(col);
    }
    tracker.rank()
}
