//! Time stepping: the single-step (first order) and two-step (second order)
//! Lagrange-Galerkin schemes.
//!
//! Each step first transports the total height `φ` with the conservative
//! composed term, sets `η = φ - ζ`, then solves a symmetric system for the
//! velocity with the transmission values imposed on the boundary.

use std::sync::Arc;

use serde::Serialize;

use crate::characteristics::{build_foot_table, extrapolate_velocity, rhs_conservative, rhs_nonconservative};
use crate::diagnostics::{Sample, TimeSeries};
use crate::error::{Error, Result};
use crate::fem::{
    assemble_source, assemble_vector_source, interpolate, interpolate_vector, rule, ScalarField, SparseSymMatrix,
    SparsityPattern, VectorField,
};
use crate::fem::assembly as asm;
use crate::mesh::{BoundaryPartition, Point, TriMesh};
use crate::solver::{apply_constraints, ConstraintSet, solve_spd_from, tbc_values, DEFAULT_TOL};

/// Quadrature degree of the composed-function terms.
pub const COMPOSED_QUADRATURE_DEGREE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn from_int(k: u32) -> Result<Self> {
        match k {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::Input(format!("order must be 1 or 2, got {k}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweParams {
    pub rho: f64,
    pub mu: f64,
    pub g: f64,
    /// Constant still-water depth.
    pub zeta: f64,
    pub c0: f64,
    pub dt: f64,
    pub t_final: f64,
    pub order: Order,
}

impl SweParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("mu", self.mu),
            ("g", self.g),
            ("zeta", self.zeta),
            ("dt", self.dt),
            ("T", self.t_final),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.c0 >= 0.0 && self.c0.is_finite()) {
            return Err(Error::Input(format!("c0 must be non-negative, got {}", self.c0)));
        }
        Ok(())
    }

    /// `⌊T/Δt⌋`, tolerant of round-off when `T` is a multiple of `Δt`.
    pub fn num_steps(&self) -> usize {
        (self.t_final / self.dt * (1.0 + 1e-12)).floor() as usize
    }
}

/// Source terms of the mass and momentum equations.
pub trait Forcing: Sync {
    fn mass_source(&self, x: Point, t: f64) -> f64;
    fn momentum_source(&self, x: Point, t: f64) -> [f64; 2];

    /// Lets the stepper skip assembling identically zero sources.
    fn is_zero(&self) -> bool {
        false
    }

    /// Prescribed velocity on transmission nodes, replacing the TBC relation.
    fn boundary_velocity(&self, _x: Point, _t: f64) -> Option<[f64; 2]> {
        None
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {
    fn mass_source(&self, _: Point, _: f64) -> f64 {
        0.0
    }

    fn momentum_source(&self, _: Point, _: f64) -> [f64; 2] {
        [0.0; 2]
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// One time level.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub phi: ScalarField,
    pub u: VectorField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweState {
    pub step: usize,
    pub time: f64,
    pub phi: ScalarField,
    pub eta: ScalarField,
    pub u: VectorField,
    /// The level before this one, once available.
    pub previous: Option<Level>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepInfo {
    /// Feet clipped to the boundary while tracing this step.
    pub clipped: usize,
    pub cg_iterations_height: usize,
    pub cg_iterations_velocity: usize,
}

/// Precomputed operators for a fixed mesh, boundary and parameter set.
pub struct LagrangeGalerkin<'a> {
    mesh: &'a TriMesh,
    boundary: &'a BoundaryPartition,
    params: SweParams,
    forcing: &'a dyn Forcing,
    mass: SparseSymMatrix,
    mass_row_sums: Vec<f64>,
    vector_pattern: Arc<SparsityPattern>,
}

impl<'a> LagrangeGalerkin<'a> {
    pub fn new(
        mesh: &'a TriMesh,
        boundary: &'a BoundaryPartition,
        params: SweParams,
        forcing: &'a dyn Forcing,
    ) -> Result<Self> {
        params.validate()?;
        let mass = asm::assemble_mass_with(mesh, Arc::new(SparsityPattern::scalar(mesh)));
        let mass_row_sums = mass.row_sums();
        Ok(Self {
            mesh,
            boundary,
            params,
            forcing,
            mass,
            mass_row_sums,
            vector_pattern: Arc::new(SparsityPattern::vector(mesh)),
        })
    }

    pub fn params(&self) -> &SweParams {
        &self.params
    }

    pub fn mesh(&self) -> &TriMesh {
        self.mesh
    }

    /// Interpolates the initial data; `η⁰ = φ⁰ - ζ`.
    pub fn init_state(&self, phi0: impl Fn(Point) -> f64, u0: impl Fn(Point) -> [f64; 2]) -> Result<SweState> {
        let phi = interpolate(self.mesh, phi0)?;
        let (node, value) = phi.min();
        if !(value > 0.0) {
            return Err(Error::PositivityLost { node, value, step: Some(0) });
        }
        let eta = ScalarField::from_vec_unchecked(phi.values().iter().map(|p| p - self.params.zeta).collect());
        let u = interpolate_vector(self.mesh, u0)?;
        Ok(SweState { step: 0, time: 0.0, phi, eta, u, previous: None })
    }

    /// Advances `state` by one time increment.
    pub fn step(&self, state: &SweState) -> Result<(SweState, StepInfo)> {
        let p = &self.params;
        let mesh = self.mesh;
        let n = state.step + 1;
        let t = n as f64 * p.dt;
        let quad = rule(COMPOSED_QUADRATURE_DEGREE);
        let with_step = |e: Error| match e {
            Error::PositivityLost { node, value, .. } => Error::PositivityLost { node, value, step: Some(n) },
            other => other,
        };

        let two_level = match (&state.previous, p.order) {
            (Some(prev), Order::Second) => Some(prev),
            _ => None,
        };
        let theta = if two_level.is_some() { 1.5 } else { 1.0 };
        let w = match two_level {
            Some(prev) => extrapolate_velocity(&state.u, &prev.u),
            None => state.u.clone(),
        };
        let feet1 = build_foot_table(mesh, &w, p.dt, 1, quad)?;
        let feet2 = match two_level {
            Some(_) => Some(build_foot_table(mesh, &w, p.dt, 2, quad)?),
            None => None,
        };
        let mut info = StepInfo {
            clipped: feet1.num_clipped() + feet2.as_ref().map_or(0, |f| f.num_clipped()),
            ..StepInfo::default()
        };

        // Height: θ M φ = Δt (f, ψ) + composed terms, solved for η = φ - ζ.
        let mut rhs = rhs_conservative(mesh, &state.phi, &feet1);
        if let (Some(prev), Some(f2)) = (two_level, &feet2) {
            let older = rhs_conservative(mesh, &prev.phi, f2);
            for (r, o) in rhs.iter_mut().zip(&older) {
                *r = 2.0 * *r - 0.5 * o;
            }
        }
        if !self.forcing.is_zero() {
            let f = assemble_source(mesh, |x| self.forcing.mass_source(x, t));
            for (r, fi) in rhs.iter_mut().zip(&f) {
                *r += p.dt * fi;
            }
        }
        let b_eta: Vec<f64> = rhs
            .iter()
            .zip(&self.mass_row_sums)
            .map(|(r, s)| r / theta - p.zeta * s)
            .collect();
        // Start both solves from the linear extrapolation in time.
        let eta_guess: Vec<f64> = match &state.previous {
            Some(prev) => state
                .eta
                .values()
                .iter()
                .zip(prev.phi.values())
                .map(|(e, p_old)| 2.0 * e - (p_old - p.zeta))
                .collect(),
            None => state.eta.values().to_vec(),
        };
        let sol = solve_spd_from(&self.mass, &b_eta, Some(&eta_guess), DEFAULT_TOL, None)?;
        info.cg_iterations_height = sol.iterations;
        let eta = ScalarField::new(sol.x)?;
        let phi = ScalarField::from_vec_unchecked(eta.values().iter().map(|e| e + p.zeta).collect());
        let (node, value) = phi.min();
        if !(value > 0.0) {
            return Err(Error::PositivityLost { node, value, step: Some(n) });
        }

        // Velocity: (ρθ/Δt) M_φ + a(φ; μ), pressure gradient and composed terms on the right.
        let mut a = asm::assemble_weighted_vector_mass_with(mesh, &phi, self.vector_pattern.clone())
            .map_err(with_step)?;
        a.scale(p.rho * theta / p.dt);
        let visc = asm::assemble_a_with(mesh, &phi, p.mu, self.vector_pattern.clone()).map_err(with_step)?;
        a.add_scaled(1.0, &visc);

        let mut b = rhs_nonconservative(mesh, &state.u, &phi, &feet1).map_err(with_step)?;
        if let (Some(prev), Some(f2)) = (two_level, &feet2) {
            let older = rhs_nonconservative(mesh, &prev.u, &phi, f2).map_err(with_step)?;
            for (r, o) in b.iter_mut().zip(&older) {
                *r = 2.0 * *r - 0.5 * o;
            }
        }
        let pressure = asm::assemble_b_rhs(mesh, &phi, &eta, p.rho, p.g);
        for (r, pr) in b.iter_mut().zip(&pressure) {
            *r = p.rho / p.dt * *r - pr;
        }
        if !self.forcing.is_zero() {
            let f = assemble_vector_source(mesh, |x| self.forcing.momentum_source(x, t));
            for (r, fi) in b.iter_mut().zip(&f) {
                *r += fi;
            }
        }

        let cs = self.constraints(&phi, &eta, t).map_err(with_step)?;
        let (a, b) = apply_constraints(&a, &b, &cs)?;
        let mut x0 = match &state.previous {
            Some(prev) => extrapolate_velocity(&state.u, &prev.u).values().to_vec(),
            None => state.u.values().to_vec(),
        };
        cs.impose(&mut x0);
        let sol = solve_spd_from(&a, &b, Some(&x0), DEFAULT_TOL, None)?;
        info.cg_iterations_velocity = sol.iterations;
        let mut u = sol.x;
        cs.impose(&mut u);
        let u = VectorField::new(u)?;

        let next = SweState {
            step: n,
            time: t,
            phi,
            eta,
            u,
            previous: Some(Level { phi: state.phi.clone(), u: state.u.clone() }),
        };
        Ok((next, info))
    }

    fn constraints(&self, phi: &ScalarField, eta: &ScalarField, t: f64) -> Result<ConstraintSet> {
        let p = &self.params;
        let mut cs = ConstraintSet::new();
        for &node in self.boundary.dirichlet_nodes() {
            cs.insert(node, Some(0), 0.0)?;
            cs.insert(node, Some(1), 0.0)?;
        }
        let mut traced = false;
        for (node, _) in self.boundary.transmission() {
            match self.forcing.boundary_velocity(self.mesh.vertices()[node], t) {
                Some(v) => {
                    cs.insert(node, Some(0), v[0])?;
                    cs.insert(node, Some(1), v[1])?;
                    traced = true;
                }
                None if traced => {
                    return Err(Error::Internal("boundary trace defined on part of the boundary".into()))
                }
                None => return tbc_values(self.boundary, phi, eta, p.c0, p.g, p.zeta),
            }
        }
        Ok(cs)
    }

    pub fn sample(&self, state: &SweState) -> Sample {
        Sample::measure(self.mesh, state.time, &state.phi, &state.eta, &state.u, self.params.rho, self.params.g)
    }

    /// Runs `⌊T/Δt⌋` steps from `initial`. `observer` sees the initial
    /// state (with no step info) and every subsequent state.
    pub fn run(
        &self,
        initial: SweState,
        mut observer: impl FnMut(&SweState, Option<&StepInfo>) -> Result<()>,
    ) -> Result<RunReport> {
        let steps = self.params.num_steps();
        observer(&initial, None)?;
        let initial_sample = self.sample(&initial);
        let mut series = TimeSeries::new();
        let mut step_info = Vec::with_capacity(steps);
        let mut state = initial;
        for _ in 0..steps {
            let (next, info) = self.step(&state)?;
            observer(&next, Some(&info))?;
            series.push(self.sample(&next))?;
            step_info.push(info);
            state = next;
        }
        Ok(RunReport { initial: initial_sample, series, step_info, final_state: state })
    }
}

/// Diagnostics of a completed run.
#[derive(Clone, Debug)]
pub struct RunReport {
    /// Diagnostics of the initial state.
    pub initial: Sample,
    /// One sample per step `n = 1..N_T`.
    pub series: TimeSeries,
    pub step_info: Vec<StepInfo>,
    pub final_state: SweState,
}

impl RunReport {
    pub fn steps(&self) -> usize {
        self.step_info.len()
    }

    /// First step (1-based) in which a foot was clipped.
    pub fn first_clipped_step(&self) -> Option<usize> {
        self.step_info.iter().position(|s| s.clipped > 0).map(|i| i + 1)
    }

    pub fn total_clipped(&self) -> usize {
        self.step_info.iter().map(|s| s.clipped).sum()
    }

    pub fn max_cg_iterations(&self) -> usize {
        self.step_info
            .iter()
            .map(|s| s.cg_iterations_height.max(s.cg_iterations_velocity))
            .max()
            .unwrap_or(0)
    }

    /// `‖η^n‖_{L²}` for `n = 1..N_T`.
    pub fn l2_eta(&self) -> Vec<f64> {
        self.series.samples().iter().map(|s| s.l2_eta).collect()
    }

    /// Mass of `η` at `n = 0..N_T`.
    pub fn mass_history(&self) -> Vec<f64> {
        std::iter::once(self.initial.mass_eta)
            .chain(self.series.samples().iter().map(|s| s.mass_eta))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{compute_boundary_normals, gen_square_mesh, SideLabels};

    fn params(order: Order) -> SweParams {
        SweParams { rho: 1.0, mu: 1.0, g: 1.0, zeta: 1.0, c0: 0.9, dt: 0.05, t_final: 0.2, order }
    }

    #[test]
    fn step_count() {
        let mut p = params(Order::First);
        assert_eq!(p.num_steps(), 4);
        p.t_final = 0.01;
        assert_eq!(p.num_steps(), 0);
        p.t_final = 1.0;
        p.dt = 0.1;
        assert_eq!(p.num_steps(), 10);
    }

    #[test]
    fn validation() {
        let mut p = params(Order::Second);
        assert!(p.validate().is_ok());
        p.mu = 0.0;
        assert!(p.validate().is_err());
        let mut p = params(Order::Second);
        p.c0 = -0.1;
        assert!(p.validate().is_err());
        assert!(Order::from_int(3).is_err());
    }

    #[test]
    fn quiescent_state_is_stationary() {
        let labels = SideLabels { bottom: 1, right: 2, top: 0, left: 0 };
        let m = gen_square_mesh(1.0, 6, 0.2, 5, labels).unwrap();
        let bp = compute_boundary_normals(&m).unwrap();
        for order in [Order::First, Order::Second] {
            let lg = LagrangeGalerkin::new(&m, &bp, params(order), &NoForcing).unwrap();
            let s0 = lg.init_state(|_| 1.0, |_| [0.0, 0.0]).unwrap();
            let report = lg.run(s0.clone(), |_, _| Ok(())).unwrap();
            let s = report.final_state;
            assert_eq!(s.step, 4);
            assert!(s.eta.values().iter().all(|v| v.abs() < 1e-12));
            assert!(s.u.values().iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn negative_height_rejected() {
        let m = gen_square_mesh(1.0, 3, 0.0, 0, SideLabels::uniform(0)).unwrap();
        let bp = compute_boundary_normals(&m).unwrap();
        let lg = LagrangeGalerkin::new(&m, &bp, params(Order::First), &NoForcing).unwrap();
        let err = lg.init_state(|p| p[0] - 0.5, |_| [0.0; 2]).unwrap_err();
        assert_eq!(err.code(), "POSITIVITY_LOST");
    }

    #[test]
    fn zero_steps_keep_initial_diagnostics() {
        let m = gen_square_mesh(1.0, 4, 0.0, 0, SideLabels::uniform(0)).unwrap();
        let bp = compute_boundary_normals(&m).unwrap();
        let mut p = params(Order::Second);
        p.t_final = 0.5 * p.dt;
        let lg = LagrangeGalerkin::new(&m, &bp, p, &NoForcing).unwrap();
        let s0 = lg.init_state(|x| 1.0 + 0.1 * x[0], |_| [0.0; 2]).unwrap();
        let mut seen = 0;
        let report = lg
            .run(s0, |_, _| {
                seen += 1;
                Ok(())
            })
            .unwrap();
        assert_eq!(seen, 1);
        assert!(report.series.is_empty());
        assert!((report.initial.mass_eta - 0.05).abs() < 1e-14);
    }
}
