use std::sync::Arc;

use super::{rule, ScalarField, SparseSymMatrix, SparsityPattern};
use crate::error::{Error, Result};
use crate::mesh::{Point, TriMesh};

/// Errors with `POSITIVITY_LOST` unless every nodal value is strictly positive.
pub fn check_positive(phi: &ScalarField) -> Result<()> {
    let (node, value) = phi.min();
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::PositivityLost { node, value, step: None })
    }
}

/// Consistent P1 mass matrix, integrated exactly.
pub fn assemble_mass(mesh: &TriMesh) -> SparseSymMatrix {
    assemble_mass_with(mesh, Arc::new(SparsityPattern::scalar(mesh)))
}

pub(crate) fn assemble_mass_with(mesh: &TriMesh, pattern: Arc<SparsityPattern>) -> SparseSymMatrix {
    let mut m = SparseSymMatrix::zeros(pattern);
    for t in 0..mesh.num_triangles() {
        let area = mesh.geometry(t).area;
        let mut local = [area / 12.0; 9];
        for i in 0..3 {
            local[4 * i] *= 2.0;
        }
        m.add_element(t, &local);
    }
    m
}

/// Block mass matrix weighted by `phi`: entry `(2i+c, 2j+c)` is
/// `∫ phi b_i b_j`, integrated with the degree-4 rule (cubic integrand).
pub fn assemble_weighted_vector_mass(mesh: &TriMesh, phi: &ScalarField) -> Result<SparseSymMatrix> {
    assemble_weighted_vector_mass_with(mesh, phi, Arc::new(SparsityPattern::vector(mesh)))
}

pub(crate) fn assemble_weighted_vector_mass_with(
    mesh: &TriMesh,
    phi: &ScalarField,
    pattern: Arc<SparsityPattern>,
) -> Result<SparseSymMatrix> {
    check_positive(phi)?;
    let q = rule(4);
    let mut m = SparseSymMatrix::zeros(pattern);
    let phi = phi.values();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.geometry(t).area;
        let mut local = [[0.0; 3]; 3];
        for (l, w) in q.points.iter().zip(&q.weights) {
            let weight: f64 = (0..3).map(|k| l[k] * phi[tri[k]]).sum();
            for i in 0..3 {
                for j in 0..3 {
                    local[i][j] += w * area * weight * l[i] * l[j];
                }
            }
        }
        let mut block = [0.0; 36];
        for i in 0..3 {
            for j in 0..3 {
                for c in 0..2 {
                    block[(2 * i + c) * 6 + 2 * j + c] = local[i][j];
                }
            }
        }
        m.add_element(t, &block);
    }
    Ok(m)
}

/// Viscous form `a(u, v; phi) = 2 mu (phi D(u), D(v))`.
///
/// With `G_i` the gradient of basis `i`, the local entry coupling component
/// `c` of node `i` to component `d` of node `j` is
/// `mu * |K| * mean(phi) * (δ_cd G_i·G_j + G_i[d] G_j[c])`.
pub fn assemble_a(mesh: &TriMesh, phi: &ScalarField, mu: f64) -> Result<SparseSymMatrix> {
    assemble_a_with(mesh, phi, mu, Arc::new(SparsityPattern::vector(mesh)))
}

pub(crate) fn assemble_a_with(
    mesh: &TriMesh,
    phi: &ScalarField,
    mu: f64,
    pattern: Arc<SparsityPattern>,
) -> Result<SparseSymMatrix> {
    check_positive(phi)?;
    let mut m = SparseSymMatrix::zeros(pattern);
    let phi = phi.values();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let geo = mesh.geometry(t);
        let mean_phi = (phi[tri[0]] + phi[tri[1]] + phi[tri[2]]) / 3.0;
        let scale = mu * geo.area * mean_phi;
        let g = &geo.grads;
        let mut block = [0.0; 36];
        for i in 0..3 {
            for j in 0..3 {
                let dot = g[i][0] * g[j][0] + g[i][1] * g[j][1];
                for c in 0..2 {
                    for d in 0..2 {
                        let delta = if c == d { dot } else { 0.0 };
                        block[(2 * i + c) * 6 + 2 * j + d] = scale * (delta + g[i][d] * g[j][c]);
                    }
                }
            }
        }
        m.add_element(t, &block);
    }
    Ok(m)
}

/// Load vector of `b(eta, v; phi) = rho g (phi ∇eta, v)` over the vector
/// basis, interleaved like a [`super::VectorField`].
pub fn assemble_b_rhs(mesh: &TriMesh, phi: &ScalarField, eta: &ScalarField, rho: f64, g: f64) -> Vec<f64> {
    let q = rule(3);
    let (phi, eta) = (phi.values(), eta.values());
    let mut load = vec![0.0; 2 * mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let geo = mesh.geometry(t);
        let mut grad = [0.0; 2];
        for k in 0..3 {
            grad[0] += eta[tri[k]] * geo.grads[k][0];
            grad[1] += eta[tri[k]] * geo.grads[k][1];
        }
        // ∫ phi b_i over K
        let mut w_int = [0.0; 3];
        for (l, w) in q.points.iter().zip(&q.weights) {
            let phi_q: f64 = (0..3).map(|k| l[k] * phi[tri[k]]).sum();
            for i in 0..3 {
                w_int[i] += w * geo.area * phi_q * l[i];
            }
        }
        for i in 0..3 {
            load[2 * tri[i]] += rho * g * w_int[i] * grad[0];
            load[2 * tri[i] + 1] += rho * g * w_int[i] * grad[1];
        }
    }
    load
}

/// `(f, b_i)` for a scalar source, degree-5 quadrature.
pub fn assemble_source(mesh: &TriMesh, f: impl Fn(Point) -> f64) -> Vec<f64> {
    let q = rule(5);
    let mut load = vec![0.0; mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.geometry(t).area;
        for (l, w) in q.points.iter().zip(&q.weights) {
            let fx = f(mesh.map_point(t, *l));
            for i in 0..3 {
                load[tri[i]] += w * area * fx * l[i];
            }
        }
    }
    load
}

/// `(F, e_c b_i)` for a vector source, interleaved, degree-5 quadrature.
pub fn assemble_vector_source(mesh: &TriMesh, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let q = rule(5);
    let mut load = vec![0.0; 2 * mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.geometry(t).area;
        for (l, w) in q.points.iter().zip(&q.weights) {
            let fx = f(mesh.map_point(t, *l));
            for i in 0..3 {
                load[2 * tri[i]] += w * area * fx[0] * l[i];
                load[2 * tri[i] + 1] += w * area * fx[1] * l[i];
            }
        }
    }
    load
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{interpolate, interpolate_vector};
    use crate::mesh::{gen_square_mesh, BoundaryEdge, SideLabels};

    fn square(n: usize) -> TriMesh {
        gen_square_mesh(1.0, n, 0.2, 4, SideLabels::uniform(0)).unwrap()
    }

    #[test]
    fn single_triangle_mass() {
        let m = TriMesh::new(
            vec![[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]],
            vec![[0, 1, 2]],
            vec![
                BoundaryEdge { a: 0, b: 1, label: 0 },
                BoundaryEdge { a: 1, b: 2, label: 0 },
                BoundaryEdge { a: 2, b: 0, label: 0 },
            ],
        )
        .unwrap();
        let mass = assemble_mass(&m);
        let area = 3.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { area / 6.0 } else { area / 12.0 };
                assert!((mass.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mass_row_sums_cover_area() {
        let m = gen_square_mesh(1.0, 2, 0.0, 0, SideLabels::uniform(0)).unwrap();
        let total: f64 = assemble_mass(&m).row_sums().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_weight_replicates_scalar_mass() {
        let m = square(5);
        let n = m.num_vertices();
        let scalar = assemble_mass(&m);
        let one = assemble_weighted_vector_mass(&m, &ScalarField::constant(n, 1.0)).unwrap();
        let two = assemble_weighted_vector_mass(&m, &ScalarField::constant(n, 2.0)).unwrap();
        for i in 0..n {
            for j in 0..n {
                let s = scalar.get(i, j);
                for c in 0..2 {
                    assert!((one.get(2 * i + c, 2 * j + c) - s).abs() < 1e-15);
                    assert!((two.get(2 * i + c, 2 * j + c) - 2.0 * s).abs() < 1e-15);
                }
                assert_eq!(one.get(2 * i, 2 * j + 1), 0.0);
            }
        }
    }

    #[test]
    fn non_positive_weight_rejected() {
        let m = square(3);
        let mut v = vec![1.0; m.num_vertices()];
        v[5] = 0.0;
        let phi = ScalarField::new(v).unwrap();
        let err = assemble_weighted_vector_mass(&m, &phi).unwrap_err();
        assert!(matches!(err, Error::PositivityLost { node: 5, .. }));
        assert_eq!(assemble_a(&m, &phi, 1.0).unwrap_err().code(), "POSITIVITY_LOST");
    }

    #[test]
    fn viscous_form_on_simple_motions() {
        let m = square(6);
        let n = m.num_vertices();
        let one = ScalarField::constant(n, 1.0);
        let mu = 0.7;
        let a = assemble_a(&m, &one, mu).unwrap();
        let rotation = interpolate_vector(&m, |p| [-p[1], p[0]]).unwrap();
        assert!(a.quadratic_form(rotation.values()).abs() < 1e-12);
        let dilation = interpolate_vector(&m, |p| [p[0], p[1]]).unwrap();
        assert!((a.quadratic_form(dilation.values()) - 4.0 * mu).abs() < 1e-12);
        for shift in [[1.0, 0.0], [0.0, 1.0]] {
            let u = interpolate_vector(&m, |_| shift).unwrap();
            let r = a.mul(u.values());
            assert!(r.iter().all(|v| v.abs() < 1e-12));
        }
        assert!(a.is_symmetric(1e-12));
    }

    #[test]
    fn pressure_gradient_load() {
        let m = square(6);
        let n = m.num_vertices();
        let one = ScalarField::constant(n, 1.0);
        let flat = ScalarField::constant(n, 0.3);
        assert!(assemble_b_rhs(&m, &one, &flat, 2.0, 9.0).iter().all(|v| v.abs() < 1e-14));
        let x1 = interpolate(&m, |p| p[0]).unwrap();
        let load = assemble_b_rhs(&m, &one, &x1, 2.0, 9.0);
        let sx: f64 = load.iter().step_by(2).sum();
        let sy: f64 = load.iter().skip(1).step_by(2).sum();
        assert!((sx - 18.0).abs() < 1e-12);
        assert!(sy.abs() < 1e-12);
    }

    #[test]
    fn source_partition_of_unity() {
        let m = square(4);
        assert!(assemble_source(&m, |_| 0.0).iter().all(|&v| v == 0.0));
        let s: f64 = assemble_source(&m, |_| 1.0).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
        let v = assemble_vector_source(&m, |_| [1.0, -2.0]);
        let sy: f64 = v.iter().skip(1).step_by(2).sum();
        assert!((sy + 2.0).abs() < 1e-14);
    }
}
