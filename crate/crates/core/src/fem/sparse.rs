use std::sync::{Arc, OnceLock};

use crate::mesh::TriMesh;

/// Compressed-row sparsity with sorted column indices.
#[derive(Clone, Debug)]
pub struct SparsityPattern {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    /// Unknowns per vertex when built from a mesh.
    block: usize,
    /// Value slots of every element's local matrix, row-major over the
    /// `3·block` local unknowns; empty unless built from a mesh.
    element_slots: Vec<usize>,
    /// Slot of `(j, i)` for every stored `(i, j)`, if present.
    transpose: OnceLock<Vec<Option<usize>>>,
}

impl PartialEq for SparsityPattern {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.row_ptr == other.row_ptr && self.cols == other.cols
    }
}

impl Eq for SparsityPattern {}

impl SparsityPattern {
    fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            cols.extend(r);
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, block: 0, element_slots: Vec::new(), transpose: OnceLock::new() }
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.cols[start..self.row_ptr[i + 1]].binary_search(&j).ok().map(|k| start + k)
    }

    fn transpose_slots(&self) -> &[Option<usize>] {
        self.transpose.get_or_init(|| {
            let mut t = Vec::with_capacity(self.cols.len());
            for i in 0..self.n {
                for &j in &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]] {
                    t.push(self.slot(j, i));
                }
            }
            t
        })
    }

    /// One unknown per vertex, coupled through shared triangles.
    pub fn scalar(mesh: &TriMesh) -> Self {
        Self::blocked(mesh, 1)
    }

    /// Two unknowns per vertex, interleaved as `2 * node + component`.
    pub fn vector(mesh: &TriMesh) -> Self {
        Self::blocked(mesh, 2)
    }

    fn blocked(mesh: &TriMesh, block: usize) -> Self {
        let mut rows = vec![Vec::new(); block * mesh.num_vertices()];
        for tri in mesh.triangles() {
            for &a in tri {
                for &b in tri {
                    for ca in 0..block {
                        for cb in 0..block {
                            rows[block * a + ca].push(block * b + cb);
                        }
                    }
                }
            }
        }
        let mut pattern = Self::from_rows(rows);
        let local = 3 * block;
        let mut slots = Vec::with_capacity(mesh.num_triangles() * local * local);
        for tri in mesh.triangles() {
            for r in 0..local {
                for c in 0..local {
                    let i = block * tri[r / block] + r % block;
                    let j = block * tri[c / block] + c % block;
                    slots.push(pattern.slot(i, j).expect("element entry in pattern"));
                }
            }
        }
        pattern.block = block;
        pattern.element_slots = slots;
        pattern
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }
}

/// Square sparse matrix intended to hold symmetric operators. Both triangles
/// are stored so products are a single row sweep.
#[derive(Clone, Debug)]
pub struct SparseSymMatrix {
    pattern: Arc<SparsityPattern>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    pub fn zeros(pattern: Arc<SparsityPattern>) -> Self {
        let vals = vec![0.0; pattern.nnz()];
        Self { pattern, vals }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); n];
        for &(i, j, _) in triplets {
            rows[i].push(j);
        }
        let mut m = Self::zeros(Arc::new(SparsityPattern::from_rows(rows)));
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut trip = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 || i == j {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &trip)
    }

    pub fn pattern(&self) -> &Arc<SparsityPattern> {
        &self.pattern
    }

    pub fn dim(&self) -> usize {
        self.pattern.n
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
        (&self.pattern.cols[r.clone()], &self.vals[r])
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        self.pattern.slot(i, j)
    }

    /// Adds a dense local matrix of element `t`, row-major over the
    /// `3·block` local unknowns (vertex-major, then component). The pattern
    /// must have been built from the same mesh.
    pub(crate) fn add_element(&mut self, t: usize, local: &[f64]) {
        let size = local.len();
        let slots = &self.pattern.element_slots[t * size..(t + 1) * size];
        for (&k, &v) in slots.iter().zip(local) {
            self.vals[k] += v;
        }
    }

    /// Adds `v` to entry `(i, j)`, which must be in the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside sparsity pattern"));
        self.vals[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.vals[k])
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        if let Some(k) = self.slot(i, j) {
            self.vals[k] = v;
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &a)| a * x[j]).sum();
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.matvec(x, &mut y);
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn scale(&mut self, s: f64) {
        self.vals.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += alpha * other`; both must share the same pattern.
    pub fn add_scaled(&mut self, alpha: f64, other: &SparseSymMatrix) {
        assert!(
            Arc::ptr_eq(&self.pattern, &other.pattern) || self.pattern == other.pattern,
            "pattern mismatch"
        );
        for (a, b) in self.vals.iter_mut().zip(&other.vals) {
            *a += alpha * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|A_ij - A_ji|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let t = self.pattern.transpose_slots();
        self.vals.iter().zip(t).fold(0.0_f64, |worst, (&a, tk)| {
            let b = tk.map_or(0.0, |k| self.vals[k]);
            worst.max((a - b).abs())
        })
    }

    /// Symmetric to `rel_tol` relative to the largest entry.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.max_asymmetry() <= rel_tol * self.max_abs()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut d = vec![vec![0.0; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                row[j] = a;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = SparseSymMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.mul(&[1.0, 1.0]), vec![6.0, 2.0]);
        assert!(m.is_symmetric(0.0));
    }

    #[test]
    fn detects_asymmetry() {
        let m = SparseSymMatrix::from_dense(&[vec![1.0, 2.0], vec![2.5, 1.0]]);
        assert_eq!(m.max_asymmetry(), 0.5);
        assert!(!m.is_symmetric(1e-12));
    }
}
