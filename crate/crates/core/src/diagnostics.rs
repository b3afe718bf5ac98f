//! Norms, error measures, convergence orders, and energy/mass monitors.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{rule, NodalField, ScalarField, VectorField};
use crate::mesh::TriMesh;

/// `‖z‖_{L²}` of a P1 field, integrated exactly (equal to `√(zᵀMz)`).
pub fn l2_norm<F: NodalField>(mesh: &TriMesh, field: &F) -> f64 {
    let c = F::COMPONENTS;
    let z = field.raw();
    let mut sum = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.geometry(t).area;
        for k in 0..c {
            let v = tri.map(|n| z[c * n + k]);
            let s = v[0] + v[1] + v[2];
            sum += area / 12.0 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + s * s);
        }
    }
    sum.sqrt()
}

/// `‖∇z‖_{L²}` with elementwise-constant gradients.
pub fn h1_semi_norm<F: NodalField>(mesh: &TriMesh, field: &F) -> f64 {
    let c = F::COMPONENTS;
    let z = field.raw();
    let mut sum = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let geo = mesh.geometry(t);
        for k in 0..c {
            let mut g = [0.0; 2];
            for (i, &n) in tri.iter().enumerate() {
                g[0] += z[c * n + k] * geo.grads[i][0];
                g[1] += z[c * n + k] * geo.grads[i][1];
            }
            sum += geo.area * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    sum.sqrt()
}

/// `∫ z dx`.
pub fn mass(mesh: &TriMesh, field: &ScalarField) -> f64 {
    let z = field.values();
    mesh.triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| mesh.geometry(t).area / 3.0 * (z[tri[0]] + z[tri[1]] + z[tri[2]]))
        .sum()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Energies {
    /// `∫ (ρ/2) φ |u|²`
    pub kinetic: f64,
    /// `∫ (ρg/2) η²`
    pub potential: f64,
}

impl Energies {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

pub fn energies(
    mesh: &TriMesh,
    phi: &ScalarField,
    eta: &ScalarField,
    u: &VectorField,
    rho: f64,
    g: f64,
) -> Energies {
    let q = rule(5);
    let (phi, eta, u) = (phi.values(), eta.values(), u.values());
    let mut e = Energies::default();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.geometry(t).area;
        for (l, w) in q.points.iter().zip(&q.weights) {
            let at = |f: &dyn Fn(usize) -> f64| -> f64 { (0..3).map(|k| l[k] * f(tri[k])).sum() };
            let p = at(&|n| phi[n]);
            let h = at(&|n| eta[n]);
            let u1 = at(&|n| u[2 * n]);
            let u2 = at(&|n| u[2 * n + 1]);
            e.kinetic += w * area * 0.5 * rho * p * (u1 * u1 + u2 * u2);
            e.potential += w * area * 0.5 * rho * g * h * h;
        }
    }
    e
}

/// `log(e_coarse / e_fine) / log(dt_coarse / dt_fine)`.
pub fn eoc(e_coarse: f64, e_fine: f64, dt_coarse: f64, dt_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (dt_coarse / dt_fine).ln()
}

/// `√(Δt Σ_n ‖η^n‖²)` from the per-step norms `‖η^n‖`, `n = 1..N_T`.
pub fn l2_l2_norm(norms: impl IntoIterator<Item = f64>, dt: f64) -> f64 {
    (dt * norms.into_iter().map(|v| v * v).sum::<f64>()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ErrorNorm {
    /// Relative `ℓ∞(L²)` error.
    E0,
    /// Relative `ℓ∞(L²)` error of the gradient.
    E1,
}

impl ErrorNorm {
    fn measure<F: NodalField>(self, mesh: &TriMesh, field: &F) -> f64 {
        match self {
            ErrorNorm::E0 => l2_norm(mesh, field),
            ErrorNorm::E1 => h1_semi_norm(mesh, field),
        }
    }
}

/// Running `max_n ‖z_h^n - Π_h z^n‖ / max_n ‖Π_h z^n‖`.
#[derive(Clone, Debug)]
pub struct ErrorAccumulator {
    norm: ErrorNorm,
    max_error: f64,
    max_exact: f64,
}

impl ErrorAccumulator {
    pub fn new(norm: ErrorNorm) -> Self {
        Self { norm, max_error: 0.0, max_exact: 0.0 }
    }

    /// `exact` is the nodal interpolant of the exact solution at the same time level.
    pub fn push_scalar(&mut self, mesh: &TriMesh, numeric: &ScalarField, exact: &ScalarField) {
        let diff = numeric.lin_comb(1.0, exact, -1.0);
        self.update(self.norm.measure(mesh, &diff), self.norm.measure(mesh, exact));
    }

    pub fn push_vector(&mut self, mesh: &TriMesh, numeric: &VectorField, exact: &VectorField) {
        let diff = numeric.lin_comb(1.0, exact, -1.0);
        self.update(self.norm.measure(mesh, &diff), self.norm.measure(mesh, exact));
    }

    fn update(&mut self, err: f64, exact: f64) {
        self.max_error = self.max_error.max(err);
        self.max_exact = self.max_exact.max(exact);
    }

    pub fn value(&self) -> Result<f64> {
        if self.max_exact > 0.0 {
            Ok(self.max_error / self.max_exact)
        } else {
            Err(Error::Input("exact solution has zero norm at every time level".into()))
        }
    }
}

/// Relative error of a scalar history against the interpolated exact history.
pub fn error_pair(mesh: &TriMesh, numeric: &[ScalarField], exact: &[ScalarField], norm: ErrorNorm) -> Result<f64> {
    if numeric.len() != exact.len() {
        return Err(Error::Input("numeric and exact histories differ in length".into()));
    }
    let mut acc = ErrorAccumulator::new(norm);
    for (z, e) in numeric.iter().zip(exact) {
        acc.push_scalar(mesh, z, e);
    }
    acc.value()
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub e0_eta: f64,
    pub e0_u: f64,
    pub e1_eta: f64,
    pub e1_u: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub l2_eta: f64,
    pub mass_eta: f64,
    pub kinetic: f64,
    pub potential: f64,
}

impl Sample {
    pub fn measure(
        mesh: &TriMesh,
        t: f64,
        phi: &ScalarField,
        eta: &ScalarField,
        u: &VectorField,
        rho: f64,
        g: f64,
    ) -> Self {
        let e = energies(mesh, phi, eta, u, rho, g);
        Sample {
            t,
            l2_eta: l2_norm(mesh, eta),
            mass_eta: mass(mesh, eta),
            kinetic: e.kinetic,
            potential: e.potential,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TimeSeries {
    samples: Vec<Sample>,
}

pub const TIMESERIES_HEADER: &str = "t,l2_eta,mass_eta,kinetic,potential";

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sample; times must increase strictly.
    pub fn push(&mut self, s: Sample) -> Result<()> {
        if let Some(last) = self.samples.last() {
            if !(s.t > last.t) {
                return Err(Error::Internal(format!("time series not increasing: {} after {}", s.t, last.t)));
            }
        }
        self.samples.push(s);
        Ok(())
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// CSV with 17 significant digits per value.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{TIMESERIES_HEADER}")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.l2_eta, s.mass_eta, s.kinetic, s.potential
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_mass, interpolate, interpolate_vector};
    use crate::mesh::{gen_square_mesh, SideLabels};

    fn unit(n: usize) -> TriMesh {
        gen_square_mesh(1.0, n, 0.2, 11, SideLabels::uniform(0)).unwrap()
    }

    #[test]
    fn simple_norms() {
        let m = unit(6);
        let n = m.num_vertices();
        assert_eq!(l2_norm(&m, &ScalarField::zeros(n)), 0.0);
        assert!((l2_norm(&m, &ScalarField::constant(n, 2.0)) - 2.0).abs() < 1e-14);
        let x1 = interpolate(&m, |p| p[0]).unwrap();
        assert!((l2_norm(&m, &x1) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((h1_semi_norm(&m, &x1) - 1.0).abs() < 1e-13);
        assert!(h1_semi_norm(&m, &ScalarField::constant(n, 3.0)) < 1e-13);
        let v = interpolate_vector(&m, |p| [p[0], 1.0]).unwrap();
        assert!((l2_norm(&m, &v) - (1.0 / 3.0 + 1.0f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn norm_matches_mass_quadratic_form() {
        let m = unit(5);
        let z = interpolate(&m, |p| (3.0 * p[0]).sin() - p[1] * p[1]).unwrap();
        let q = assemble_mass(&m).quadratic_form(z.values());
        assert!((l2_norm(&m, &z).powi(2) - q).abs() < 1e-14);
        let rs: f64 = assemble_mass(&m).row_sums().iter().zip(z.values()).map(|(a, b)| a * b).sum();
        assert!((mass(&m, &z) - rs).abs() < 1e-14);
    }

    #[test]
    fn energy_of_constant_level() {
        let m = unit(4);
        let n = m.num_vertices();
        let e = energies(
            &m,
            &ScalarField::constant(n, 1.0),
            &ScalarField::zeros(n),
            &VectorField::zeros(n),
            1.0,
            1.0,
        );
        assert_eq!(e, Energies::default());
        let e = energies(
            &m,
            &ScalarField::constant(n, 1.5),
            &ScalarField::constant(n, 0.5),
            &VectorField::zeros(n),
            2.0,
            3.0,
        );
        assert_eq!(e.kinetic, 0.0);
        assert!((e.potential - 2.0 * 3.0 * 0.25 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn eoc_formula() {
        assert_eq!(eoc(0.3, 0.3, 0.1, 0.05), 0.0);
        assert!((eoc(4.0, 1.0, 0.2, 0.1) - 2.0).abs() < 1e-14);
        let e = eoc(6.81e-1, 1.96e-1, 8.84e-2, 6.25e-2);
        assert!((e - 3.60).abs() < 0.01, "{e}");
    }

    #[test]
    fn l2_l2() {
        assert_eq!(l2_l2_norm([0.0, 0.0], 0.1), 0.0);
        assert_eq!(l2_l2_norm([2.5], 1.0), 2.5);
    }

    #[test]
    fn relative_errors() {
        let m = unit(4);
        let z = interpolate(&m, |p| p[0] + p[1]).unwrap();
        let zh = interpolate(&m, |p| 1.1 * (p[0] + p[1])).unwrap();
        let e0 = error_pair(&m, &[zh.clone()], &[z.clone()], ErrorNorm::E0).unwrap();
        assert!((e0 - 0.1).abs() < 1e-13);
        let e1 = error_pair(&m, &[zh], &[z.clone()], ErrorNorm::E1).unwrap();
        assert!((e1 - 0.1).abs() < 1e-13);
        let zero = ScalarField::zeros(m.num_vertices());
        assert!(error_pair(&m, &[zero.clone()], &[zero], ErrorNorm::E0).is_err());
    }

    #[test]
    fn series_csv() {
        let mut ts = TimeSeries::new();
        let s = Sample { t: 0.1, l2_eta: 1.0 / 3.0, mass_eta: 0.0, kinetic: 1e-20, potential: 2.0 };
        ts.push(s).unwrap();
        assert!(ts.push(s).is_err());
        let mut out = Vec::new();
        ts.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TIMESERIES_HEADER));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[1], 1.0 / 3.0);
        assert_eq!(row[0], 0.1);
    }
}
