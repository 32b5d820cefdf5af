use crate::complex::{binomial, colex_rank, Complex};

/// Sparse `±1` matrix with columns given as `(row, sign)` lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, i8)>>,
}

impl BoundaryMatrix {
    pub fn new(rows: usize, columns: Vec<Vec<(usize, i8)>>) -> Self {
        debug_assert!(columns.iter().flatten().all(|&(r, _)| r < rows));
        BoundaryMatrix { rows, columns }
    }

    /// `∂` of `k`-faces into the `C(n, k)` faces of one dimension lower,
    /// rows indexed by colex rank.
    pub fn from_faces<'a>(n: usize, faces: impl IntoIterator<Item = &'a [usize]>) -> Self {
        let mut columns = Vec::new();
        let mut k = None;
        for face in faces {
            k = Some(face.len());
            columns.push(face_boundary(face));
        }
        let rows = k.map_or(0, |k| binomial(n, k - 1) as usize);
        BoundaryMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<(usize, i8)>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[(usize, i8)] {
        &self.columns[j]
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, s) in col {
                m[r][j] = s as i64;
            }
        }
        m
    }
}

/// Facets of a sorted face with signs `(−1)^i` for the facet omitting
/// position `i`.
pub fn face_boundary(face: &[usize]) -> Vec<(usize, i8)> {
    let mut facet = Vec::with_capacity(face.len().saturating_sub(1));
    (0..face.len())
        .map(|skip| {
            facet.clear();
            facet.extend(
                face.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v),
            );
            let sign = if skip % 2 == 0 { 1 } else { -1 };
            (colex_rank(&facet) as usize, sign)
        })
        .collect()
}

/// `∂_d` of the complex: rows are all `(d−1)`-faces, one column per face in
/// the complex's order.
pub fn boundary_matrix(y: &Complex) -> BoundaryMatrix {
    let mut m = BoundaryMatrix::from_faces(y.n(), y.faces().iter().map(|f| f.as_slice()));
    m.rows = y.ridge_count();
    m
}

/// The boundary of a `k`-face restricted to the `(k−1)`-faces avoiding
/// vertex 0, rows indexed by the colex rank after shifting every vertex down
/// by one (so there are `C(n−1, k)` of them).
///
/// On cycles the restriction is injective (a cycle supported on faces
/// through vertex 0 is zero), so it preserves the rank of any matrix whose
/// columns are boundaries. Faces through 0 become unit columns.
pub fn cone_column(face: &[usize]) -> Vec<(usize, i8)> {
    let mut facet = Vec::with_capacity(face.len());
    let mut out = Vec::with_capacity(face.len());
    for skip in 0..face.len() {
        if face[skip] != 0 && face[0] == 0 {
            continue;
        }
        facet.clear();
        facet.extend(
            face.iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v - 1),
        );
        let sign = if skip % 2 == 0 { 1 } else { -1 };
        out.push((colex_rank(&facet) as usize, sign));
    }
    out
}

/// Cone-restricted boundary of `k`-faces on `n` vertices.
pub fn cone_boundary<'a>(
    n: usize,
    k: usize,
    faces: impl IntoIterator<Item = &'a [usize]>,
) -> BoundaryMatrix {
    BoundaryMatrix {
        rows: binomial(n - 1, k - 1) as usize,
        columns: faces.into_iter().map(cone_column).collect(),
    }
}
