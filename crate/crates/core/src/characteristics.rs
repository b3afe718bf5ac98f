//! Characteristic feet and the composed-function load vectors of the
//! Lagrange-Galerkin material derivatives.
//!
//! For a velocity `v` and `s` in {1, 2}, the foot of a point `x` is
//! `x - s·dt·v(x)` and its Jacobian weight is `det(I - s·dt·∇v)`. Both are
//! tabulated at every quadrature point of every element; the load vectors
//! then integrate `φ(foot)·γ` (conservative form) or `u(foot)` (non-conservative
//! form) against the P1 basis on the source element.

use crate::error::{Error, Result};
use crate::fem::{check_positive, QuadratureRule, ScalarField, VectorField};
use crate::mesh::{BaryCoord, Point, TriMesh};
use crate::par;

/// `u* = 2 u_prev - u_prev2`, exact for velocities linear in time.
pub fn extrapolate_velocity(u_prev: &VectorField, u_prev2: &VectorField) -> VectorField {
    u_prev.lin_comb(2.0, u_prev2, -1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Foot {
    /// Foot position after clipping.
    pub position: Point,
    pub bary: BaryCoord,
    /// `det(I - steps·dt·∇v)` on the source element.
    pub jacobian: f64,
    pub clipped: bool,
}

/// Feet of every quadrature point, element-major.
#[derive(Clone, Debug)]
pub struct FootTable {
    rule: &'static QuadratureRule,
    steps: usize,
    feet: Vec<Foot>,
}

impl FootTable {
    pub fn rule(&self) -> &'static QuadratureRule {
        self.rule
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn feet(&self) -> &[Foot] {
        &self.feet
    }

    /// Feet of element `t`, one per quadrature point.
    pub fn element(&self, t: usize) -> &[Foot] {
        let nq = self.rule.len();
        &self.feet[t * nq..(t + 1) * nq]
    }

    pub fn num_clipped(&self) -> usize {
        self.feet.iter().filter(|f| f.clipped).count()
    }
}

/// Traces `x - steps·dt·v(x)` from every quadrature point of `rule`.
///
/// Feet leaving the domain are clipped to the first boundary crossing; the
/// Jacobian is taken from the source element's velocity gradient whether or
/// not the foot was clipped.
pub fn build_foot_table(
    mesh: &TriMesh,
    v: &VectorField,
    dt: f64,
    steps: usize,
    rule: &'static QuadratureRule,
) -> Result<FootTable> {
    if !(dt > 0.0) {
        return Err(Error::Input(format!("time increment must be positive, got {dt}")));
    }
    if !(steps == 1 || steps == 2) {
        return Err(Error::Input(format!("characteristic steps must be 1 or 2, got {steps}")));
    }
    let nq = rule.len();
    let tau = steps as f64 * dt;
    let placeholder = Foot {
        position: [0.0; 2],
        bary: BaryCoord { element: 0, lambda: [0.0; 3] },
        jacobian: 1.0,
        clipped: false,
    };
    let mut feet = vec![placeholder; nq * mesh.num_triangles()];
    par::try_for_each_chunk(&mut feet, nq, |t, out| {
        let grad = v.gradient(mesh, t);
        let jacobian = (1.0 - tau * grad[0][0]) * (1.0 - tau * grad[1][1])
            - tau * tau * grad[0][1] * grad[1][0];
        for (foot, lambda) in out.iter_mut().zip(&rule.points) {
            let x = mesh.map_point(t, *lambda);
            let vx = v.eval(mesh, &BaryCoord { element: t, lambda: *lambda });
            let target = [x[0] - tau * vx[0], x[1] - tau * vx[1]];
            let (position, bary, clipped) = match mesh.locate_point(target, Some(t)) {
                Some(bc) => (target, bc, false),
                None => match mesh.clip_outside(x, target, Some(t)) {
                    (p, Some(bc)) => (p, bc, true),
                    (p, None) => {
                        return Err(Error::Internal(format!(
                            "clipped foot {p:?} of element {t} could not be located"
                        )))
                    }
                },
            };
            *foot = Foot { position, bary, jacobian, clipped };
        }
        Ok(())
    })?;
    Ok(FootTable { rule, steps, feet })
}

/// `(φ_prev∘X · γ, b_i)` for every node `i`.
pub fn rhs_conservative(mesh: &TriMesh, phi_prev: &ScalarField, feet: &FootTable) -> Vec<f64> {
    let rule = feet.rule();
    let mut load = vec![0.0; mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.geometry(t).area;
        for ((foot, lambda), w) in feet.element(t).iter().zip(&rule.points).zip(&rule.weights) {
            let value = w * area * foot.jacobian * phi_prev.eval(mesh, &foot.bary);
            for k in 0..3 {
                load[tri[k]] += value * lambda[k];
            }
        }
    }
    load
}

/// `(φ_w · u_prev∘X, e_c b_i)` for every node `i` and component `c`,
/// interleaved. `φ_w` is evaluated at the source point.
pub fn rhs_nonconservative(
    mesh: &TriMesh,
    u_prev: &VectorField,
    phi_weight: &ScalarField,
    feet: &FootTable,
) -> Result<Vec<f64>> {
    check_positive(phi_weight)?;
    let rule = feet.rule();
    let phi = phi_weight.values();
    let mut load = vec![0.0; 2 * mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.geometry(t).area;
        for ((foot, lambda), w) in feet.element(t).iter().zip(&rule.points).zip(&rule.weights) {
            let weight: f64 = (0..3).map(|k| lambda[k] * phi[tri[k]]).sum();
            let u = u_prev.eval(mesh, &foot.bary);
            for k in 0..3 {
                let s = w * area * weight * lambda[k];
                load[2 * tri[k]] += s * u[0];
                load[2 * tri[k] + 1] += s * u[1];
            }
        }
    }
    Ok(load)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_mass, interpolate, interpolate_vector, rule};
    use crate::mesh::{gen_square_mesh, SideLabels};

    fn mesh() -> TriMesh {
        gen_square_mesh(1.0, 8, 0.2, 3, SideLabels::uniform(0)).unwrap()
    }

    #[test]
    fn extrapolation() {
        let a = VectorField::from_nodal(&[[2.0, 2.0]]).unwrap();
        let b = VectorField::from_nodal(&[[1.0, 1.0]]).unwrap();
        assert_eq!(extrapolate_velocity(&a, &b).get(0), [3.0, 3.0]);
        assert_eq!(extrapolate_velocity(&a, &a).get(0), [2.0, 2.0]);
        // u(t) = u0 + t u1 sampled at t = 1, 2 predicts t = 3 exactly.
        let at = |t: f64| VectorField::from_nodal(&[[0.5 + 0.25 * t, -1.0 + 2.0 * t]]).unwrap();
        assert_eq!(extrapolate_velocity(&at(2.0), &at(1.0)).get(0), at(3.0).get(0));
    }

    #[test]
    fn zero_velocity_is_identity() {
        let m = mesh();
        let feet = build_foot_table(&m, &VectorField::zeros(m.num_vertices()), 0.1, 2, rule(5)).unwrap();
        for (i, f) in feet.feet().iter().enumerate() {
            let t = i / 7;
            let src = m.map_point(t, rule(5).points[i % 7]);
            assert_eq!(f.position, src);
            assert_eq!(f.bary.element, t);
            assert_eq!(f.jacobian, 1.0);
            assert!(!f.clipped);
        }
        let phi = interpolate(&m, |p| 1.0 + p[0] * p[1]).unwrap();
        let got = rhs_conservative(&m, &phi, &feet);
        let want = assemble_mass(&m).mul(phi.values());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_velocity_jacobian() {
        let m = mesh();
        let dt = 0.05;
        let v = interpolate_vector(&m, |p| p).unwrap();
        let feet = build_foot_table(&m, &v, dt, 1, rule(5)).unwrap();
        for f in feet.feet() {
            assert!((f.jacobian - (1.0 - dt).powi(2)).abs() < 1e-13);
        }
        let feet2 = build_foot_table(&m, &v, dt, 2, rule(5)).unwrap();
        assert!((feet2.feet()[0].jacobian - (1.0 - 2.0 * dt).powi(2)).abs() < 1e-13);
    }

    #[test]
    fn outward_flow_clips_near_boundary() {
        let m = mesh();
        let v = interpolate_vector(&m, |_| [1.0, 0.0]).unwrap();
        let feet = build_foot_table(&m, &v, 0.1, 1, rule(5)).unwrap();
        assert!(feet.num_clipped() > 0);
        for f in feet.feet() {
            assert!(f.bary.is_valid());
            assert!(f.position[0] >= 0.0);
            assert!((f.jacobian - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nonconservative_trivial_cases() {
        let m = mesh();
        let n = m.num_vertices();
        let feet = build_foot_table(&m, &VectorField::zeros(n), 0.1, 1, rule(5)).unwrap();
        let one = ScalarField::constant(n, 1.0);
        let u = interpolate_vector(&m, |p| [p[0], -p[1] * p[1]]).unwrap();
        let got = rhs_nonconservative(&m, &u, &one, &feet).unwrap();
        let mass = assemble_mass(&m);
        for c in 0..2 {
            let comp: Vec<f64> = u.values().iter().skip(c).step_by(2).copied().collect();
            let want = mass.mul(&comp);
            for i in 0..n {
                assert!((got[2 * i + c] - want[i]).abs() < 1e-14);
            }
        }
        let zero = rhs_nonconservative(&m, &VectorField::zeros(n), &one, &feet).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let bad = ScalarField::constant(n, -1.0);
        assert!(rhs_nonconservative(&m, &u, &bad, &feet).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = mesh();
        let v = VectorField::zeros(m.num_vertices());
        assert!(build_foot_table(&m, &v, 0.0, 1, rule(5)).is_err());
        assert!(build_foot_table(&m, &v, 0.1, 3, rule(5)).is_err());
    }
}
