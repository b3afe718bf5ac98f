//! Essential boundary conditions and symmetric linear solves.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem::{ScalarField, SparseSymMatrix};
use crate::mesh::BoundaryPartition;

pub const DEFAULT_TOL: f64 = 1e-12;
/// Largest system handed to [`solve_dense`].
pub const DENSE_LIMIT: usize = 2000;

/// Prescribed values keyed by `(node, component)`; `component` is `None`
/// for scalar unknowns. A set is either all-scalar or all-vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSet {
    entries: BTreeMap<(usize, Option<u8>), f64>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a constraint. Repeating an identical constraint is a no-op;
    /// a different value for the same dof is an error.
    pub fn insert(&mut self, node: usize, component: Option<u8>, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Input(format!("non-finite constraint value on node {node}")));
        }
        if component.is_some_and(|c| c > 1) {
            return Err(Error::Input(format!("component {component:?} out of range")));
        }
        if let Some(&(_, first)) = self.entries.keys().next() {
            if first.is_some() != component.is_some() {
                return Err(Error::Input("mixed scalar and vector constraints".into()));
            }
        }
        let dof = dof_index(node, component);
        match self.entries.get(&(node, component)) {
            Some(&old) if old.to_bits() != value.to_bits() && old != value => {
                Err(Error::ConflictingConstraint { dof, first: old, second: value })
            }
            Some(_) => Ok(()),
            None => {
                self.entries.insert((node, component), value);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, node: usize, component: Option<u8>) -> Option<f64> {
        self.entries.get(&(node, component)).copied()
    }

    /// `(dof, value)` in increasing dof order.
    pub fn dofs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&(n, c), &v)| (dof_index(n, c), v))
    }

    /// Dense lookup table of prescribed values over `n` dofs.
    fn table(&self, n: usize) -> Result<Vec<Option<f64>>> {
        let mut t = vec![None; n];
        for (dof, v) in self.dofs() {
            if dof >= n {
                return Err(Error::Input(format!("constraint on dof {dof} outside system of size {n}")));
            }
            t[dof] = Some(v);
        }
        Ok(t)
    }

    /// Overwrites the constrained entries of `x` with their prescribed values.
    pub fn impose(&self, x: &mut [f64]) {
        for (dof, v) in self.dofs() {
            x[dof] = v;
        }
    }
}

fn dof_index(node: usize, component: Option<u8>) -> usize {
    match component {
        None => node,
        Some(c) => 2 * node + c as usize,
    }
}

/// Symmetric elimination: for each constrained dof `k` with value `v`,
/// `b -= A[:,k] v`, row and column `k` are zeroed, `A[k,k] = 1`, `b[k] = v`.
pub fn apply_constraints(
    a: &SparseSymMatrix,
    b: &[f64],
    cs: &ConstraintSet,
) -> Result<(SparseSymMatrix, Vec<f64>)> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Input(format!("load vector has {} entries, matrix {n}", b.len())));
    }
    let fixed = cs.table(n)?;
    let mut a = a.clone();
    let mut b = b.to_vec();
    if cs.is_empty() {
        return Ok((a, b));
    }
    let mut updates = Vec::new();
    for i in 0..n {
        let (cols, vals) = a.row(i);
        if let Some(v) = fixed[i] {
            b[i] = v;
            for &j in cols {
                updates.push((i, j, if i == j { 1.0 } else { 0.0 }));
            }
            continue;
        }
        for (&j, &aij) in cols.iter().zip(vals) {
            if let Some(v) = fixed[j] {
                b[i] -= aij * v;
                updates.push((i, j, 0.0));
            }
        }
    }
    for (i, j, v) in updates {
        a.set(i, j, v);
    }
    Ok((a, b))
}

/// Result of a conjugate-gradient solve.
#[derive(Clone, Debug)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `‖b - Ax‖ / ‖b‖`.
    pub residual: f64,
}

/// Jacobi-preconditioned CG from a zero initial guess. `maxit` defaults to
/// ten times the dimension.
pub fn solve_spd(a: &SparseSymMatrix, b: &[f64], tol: f64, maxit: Option<usize>) -> Result<Vec<f64>> {
    Ok(solve_spd_from(a, b, None, tol, maxit)?.x)
}

/// As [`solve_spd`] with an optional initial guess.
pub fn solve_spd_from(
    a: &SparseSymMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    maxit: Option<usize>,
) -> Result<CgSolution> {
    let n = a.dim();
    if b.len() != n || x0.is_some_and(|x| x.len() != n) {
        return Err(Error::Input(format!("system of size {n} given vectors of other lengths")));
    }
    let asym = a.max_asymmetry();
    if asym > 1e-10 * a.max_abs() {
        return Err(Error::Input(format!("matrix not symmetric (max |A_ij - A_ji| = {asym:e})")));
    }
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Input(format!("non-positive diagonal entry at row {i}")));
    }
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(CgSolution { x: vec![0.0; n], iterations: 0, residual: 0.0 });
    }
    let maxit = maxit.unwrap_or(10 * n);

    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = vec![0.0; n];
    a.matvec(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut residual = norm(&r) / bnorm;
    let mut it = 0;
    while residual > tol {
        if it == maxit {
            return Err(Error::NoConvergence { iterations: it, residual });
        }
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NoConvergence { iterations: it, residual });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        residual = norm(&r) / bnorm;
        it += 1;
    }
    Ok(CgSolution { x, iterations: it, residual })
}

/// Cholesky solve of a small SPD system.
pub fn solve_dense(a: &SparseSymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if n > DENSE_LIMIT {
        return Err(Error::Input(format!("dense solve limited to {DENSE_LIMIT} unknowns, got {n}")));
    }
    let dense = a.to_dense();
    let m = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Input("matrix is not positive definite".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(b)).iter().copied().collect())
}

/// Velocity constraints: zero on Dirichlet nodes, `c0 √(gζ) (η/φ) n` on
/// transmission nodes.
pub fn tbc_values(
    bp: &BoundaryPartition,
    phi: &ScalarField,
    eta: &ScalarField,
    c0: f64,
    g: f64,
    zeta: f64,
) -> Result<ConstraintSet> {
    let floor = 1e-8 * zeta;
    let speed = c0 * (g * zeta).sqrt();
    let mut cs = ConstraintSet::new();
    for &node in bp.dirichlet_nodes() {
        cs.insert(node, Some(0), 0.0)?;
        cs.insert(node, Some(1), 0.0)?;
    }
    for (node, normal) in bp.transmission() {
        let p = phi.values()[node];
        if !(p >= floor) {
            return Err(Error::PositivityLost { node, value: p, step: None });
        }
        let s = speed * eta.values()[node] / p;
        cs.insert(node, Some(0), s * normal[0])?;
        cs.insert(node, Some(1), s * normal[1])?;
    }
    Ok(cs)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
