//! Continuous P1 fields on a [`TriMesh`], quadrature, and assembly of the
//! mass, viscous and pressure-gradient operators.

pub(crate) mod assembly;
pub mod quadrature;
mod sparse;

pub use assembly::{
    assemble_a, assemble_b_rhs, assemble_mass, assemble_source, assemble_vector_source,
    assemble_weighted_vector_mass, check_positive,
};
pub use quadrature::{rule, QuadratureRule};
pub use sparse::{SparseSymMatrix, SparsityPattern};

use crate::error::{Error, Result};
use crate::mesh::{BaryCoord, Point, TriMesh};

/// Nodal values of a scalar P1 function.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

/// Nodal values of a vector P1 function, stored interleaved
/// (`[u1(0), u2(0), u1(1), u2(1), ...]`).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    values: Vec<f64>,
}

/// Raw access shared by scalar and vector fields for norm computations.
pub trait NodalField {
    const COMPONENTS: usize;
    fn raw(&self) -> &[f64];

    fn num_nodes(&self) -> usize {
        self.raw().len() / Self::COMPONENTS
    }
}

impl NodalField for ScalarField {
    const COMPONENTS: usize = 1;
    fn raw(&self) -> &[f64] {
        &self.values
    }
}

impl NodalField for VectorField {
    const COMPONENTS: usize = 2;
    fn raw(&self) -> &[f64] {
        &self.values
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Input(format!("non-finite nodal value at index {i}"))),
        None => Ok(()),
    }
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest nodal value and its node.
    pub fn min(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc })
    }

    pub fn eval(&self, mesh: &TriMesh, bc: &BaryCoord) -> f64 {
        let tri = mesh.triangles()[bc.element];
        (0..3).map(|k| bc.lambda[k] * self.values[tri[k]]).sum()
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        ScalarField { values }
    }
}

impl VectorField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() % 2 != 0 {
            return Err(Error::Input("vector field needs an even number of values".into()));
        }
        check_finite(&values)?;
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; 2 * n] }
    }

    pub fn from_nodal(nodal: &[[f64; 2]]) -> Result<Self> {
        Self::new(nodal.iter().flatten().copied().collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, node: usize) -> [f64; 2] {
        [self.values[2 * node], self.values[2 * node + 1]]
    }

    pub fn eval(&self, mesh: &TriMesh, bc: &BaryCoord) -> [f64; 2] {
        let tri = mesh.triangles()[bc.element];
        let mut v = [0.0; 2];
        for k in 0..3 {
            let n = self.get(tri[k]);
            v[0] += bc.lambda[k] * n[0];
            v[1] += bc.lambda[k] * n[1];
        }
        v
    }

    /// Constant gradient `[[du1/dx, du1/dy], [du2/dx, du2/dy]]` on triangle `t`.
    pub fn gradient(&self, mesh: &TriMesh, t: usize) -> [[f64; 2]; 2] {
        let tri = mesh.triangles()[t];
        let g = &mesh.geometry(t).grads;
        let mut grad = [[0.0; 2]; 2];
        for k in 0..3 {
            let u = self.get(tri[k]);
            for c in 0..2 {
                grad[c][0] += u[c] * g[k][0];
                grad[c][1] += u[c] * g[k][1];
            }
        }
        grad
    }

    pub fn lin_comb(&self, a: f64, other: &VectorField, b: f64) -> VectorField {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        VectorField { values }
    }
}

/// Lagrange interpolation of a scalar function: nodal values at the vertices.
pub fn interpolate(mesh: &TriMesh, f: impl Fn(Point) -> f64) -> Result<ScalarField> {
    ScalarField::new(mesh.vertices().iter().map(|&x| f(x)).collect())
}

/// Lagrange interpolation of a vector function.
pub fn interpolate_vector(mesh: &TriMesh, f: impl Fn(Point) -> [f64; 2]) -> Result<VectorField> {
    VectorField::new(mesh.vertices().iter().flat_map(|&x| f(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_square_mesh, SideLabels};

    #[test]
    fn interpolation_of_constants_and_linears() {
        let m = gen_square_mesh(1.0, 5, 0.2, 1, SideLabels::uniform(0)).unwrap();
        let c = interpolate(&m, |_| 2.5).unwrap();
        assert!(c.values().iter().all(|&v| v == 2.5));
        let x1 = interpolate(&m, |p| p[0]).unwrap();
        for t in 0..m.num_triangles() {
            let bc = BaryCoord { element: t, lambda: [0.2, 0.5, 0.3] };
            let p = m.map_point(t, bc.lambda);
            assert!((x1.eval(&m, &bc) - p[0]).abs() < 1e-15);
        }
        let centroid = BaryCoord { element: 3, lambda: [1.0 / 3.0; 3] };
        assert!((x1.eval(&m, &centroid) - m.centroid(3)[0]).abs() < 1e-15);
    }

    #[test]
    fn non_finite_interpolant_rejected() {
        let m = gen_square_mesh(1.0, 2, 0.0, 0, SideLabels::uniform(0)).unwrap();
        let err = interpolate(&m, |p| 1.0 / p[0]).unwrap_err();
        assert_eq!(err.code(), "INPUT_ERROR");
    }

    #[test]
    fn nodal_evaluation() {
        let m = gen_square_mesh(1.0, 3, 0.1, 2, SideLabels::uniform(0)).unwrap();
        let u = interpolate_vector(&m, |p| [p[0] * p[1], 1.0 - p[1]]).unwrap();
        let tri = m.triangles()[4];
        let bc = BaryCoord { element: 4, lambda: [0.0, 1.0, 0.0] };
        assert_eq!(u.eval(&m, &bc), u.get(tri[1]));
    }

    #[test]
    fn gradient_of_linear_field() {
        let m = gen_square_mesh(1.0, 4, 0.2, 9, SideLabels::uniform(0)).unwrap();
        let u = interpolate_vector(&m, |p| [2.0 * p[0] - p[1], 0.5 * p[1] + 3.0]).unwrap();
        for t in 0..m.num_triangles() {
            let g = u.gradient(&m, t);
            assert!((g[0][0] - 2.0).abs() < 1e-12 && (g[0][1] + 1.0).abs() < 1e-12);
            assert!(g[1][0].abs() < 1e-12 && (g[1][1] - 0.5).abs() < 1e-12);
        }
    }
}
