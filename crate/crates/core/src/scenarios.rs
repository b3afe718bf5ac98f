//! Ready-made problem setups: manufactured solutions on the unit square,
//! a Gaussian drop in a square basin with selectable open sides, and the
//! Bay of Bengal runs on shipped SMF meshes.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Serialize;

use crate::diagnostics::{l2_l2_norm, ErrorAccumulator, ErrorNorm, ErrorRecord};
use crate::error::{Error, Result};
use crate::fem::{interpolate, interpolate_vector};
use crate::mesh::{compute_boundary_normals, gen_square_mesh, load_mesh, BoundaryPartition, Point, SideLabels, TriMesh};
use crate::par;
use crate::scheme::{Forcing, LagrangeGalerkin, NoForcing, Order, RunReport, SweParams, SweState, StepInfo};

/// Exact solution
/// `φ = ζ + s(x)(2 + sin πt)/8`, `u = s(x)(2 + sin πt)/3 · (1, 1)`
/// with `s = sin πx₁ sin πx₂`, and the sources that make it solve the
/// shallow water system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Manufactured {
    pub rho: f64,
    pub mu: f64,
    pub g: f64,
    pub zeta: f64,
}

impl Default for Manufactured {
    fn default() -> Self {
        Self { rho: 1.0, mu: 1.0, g: 1.0, zeta: 1.0 }
    }
}

/// `s`, `s_x`, `s_y`, `s_xx (= s_yy)`, `s_xy`.
fn sine_bump(x: Point) -> [f64; 5] {
    let (sx, cx) = (PI * x[0]).sin_cos();
    let (sy, cy) = (PI * x[1]).sin_cos();
    [sx * sy, PI * cx * sy, PI * sx * cy, -PI * PI * sx * sy, PI * PI * cx * cy]
}

impl Manufactured {
    fn amplitudes(t: f64) -> (f64, f64, f64, f64) {
        let (st, ct) = (PI * t).sin_cos();
        ((2.0 + st) / 8.0, (2.0 + st) / 3.0, PI * ct / 8.0, PI * ct / 3.0)
    }

    pub fn eta(&self, x: Point, t: f64) -> f64 {
        sine_bump(x)[0] * Self::amplitudes(t).0
    }

    pub fn phi(&self, x: Point, t: f64) -> f64 {
        self.zeta + self.eta(x, t)
    }

    pub fn u(&self, x: Point, t: f64) -> [f64; 2] {
        let w = sine_bump(x)[0] * Self::amplitudes(t).1;
        [w, w]
    }

    /// `f = ∂φ/∂t + ∇·(φu)`.
    pub fn mass_residual(&self, x: Point, t: f64) -> f64 {
        let [s, sx, sy, ..] = sine_bump(x);
        let (a, b, da, _) = Self::amplitudes(t);
        let phi = self.zeta + a * s;
        da * s + b * (sx + sy) * (phi + a * s)
    }

    /// `F = ρφ(∂u/∂t + (u·∇)u) - 2μ∇·(φD(u)) + ρgφ∇η`.
    pub fn momentum_residual(&self, x: Point, t: f64) -> [f64; 2] {
        let [s, sx, sy, sxx, sxy] = sine_bump(x);
        let (a, b, _, db) = Self::amplitudes(t);
        let phi = self.zeta + a * s;
        let (px, py) = (a * sx, a * sy);
        let (w, wx, wy, wxx, wxy) = (b * s, b * sx, b * sy, b * sxx, b * sxy);
        let wyy = wxx;
        let inertia = self.rho * phi * (db * s + w * (wx + wy));
        let div1 = px * wx + phi * wxx + py * (wx + wy) / 2.0 + phi * (wxy + wyy) / 2.0;
        let div2 = px * (wx + wy) / 2.0 + phi * (wxx + wxy) / 2.0 + py * wy + phi * wyy;
        let grav = self.rho * self.g * phi;
        [
            inertia - 2.0 * self.mu * div1 + grav * px,
            inertia - 2.0 * self.mu * div2 + grav * py,
        ]
    }
}

impl Forcing for Manufactured {
    fn mass_source(&self, x: Point, t: f64) -> f64 {
        self.mass_residual(x, t)
    }

    fn momentum_source(&self, x: Point, t: f64) -> [f64; 2] {
        self.momentum_residual(x, t)
    }

    fn boundary_velocity(&self, x: Point, t: f64) -> Option<[f64; 2]> {
        Some(self.u(x, t))
    }
}

/// Open sides of the Gaussian-drop basin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DropCase {
    /// Closed basin.
    A,
    /// Bottom open.
    B,
    /// Bottom and right open.
    C,
    /// Bottom, right and top open.
    D,
    /// All sides open.
    E,
}

impl DropCase {
    pub const ALL: [DropCase; 5] = [DropCase::A, DropCase::B, DropCase::C, DropCase::D, DropCase::E];

    pub fn labels(self) -> SideLabels {
        let open = self.open_sides();
        let pick = |k: usize, label: u8| if k < open { label } else { 0 };
        // Sides open in the order bottom, right, top, left.
        SideLabels { bottom: pick(0, 1), right: pick(1, 2), top: pick(2, 3), left: pick(3, 4) }
    }

    pub fn open_sides(self) -> usize {
        match self {
            DropCase::A => 0,
            DropCase::B => 1,
            DropCase::C => 2,
            DropCase::D => 3,
            DropCase::E => 4,
        }
    }

    pub fn letter(self) -> char {
        ['a', 'b', 'c', 'd', 'e'][self.open_sides()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gaussian {
    pub amplitude: f64,
    pub center: Point,
    pub rate: f64,
}

impl Gaussian {
    pub fn eval(&self, x: Point) -> f64 {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        self.amplitude * (-self.rate * (d[0] * d[0] + d[1] * d[1])).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ScenarioKind {
    /// Manufactured solution, closed unit square.
    Ex1,
    /// Manufactured solution, bottom side open.
    Ex2,
    /// Gaussian drop in `(0,10)²`, unit constants.
    Ex3(DropCase),
    /// Gaussian drop in `(0,10)²`, all sides open, oceanic constants.
    CaseI,
    /// Bay of Bengal; `open[k]` keeps boundary label `k+1` as transmission.
    Bay { extended: bool, open: [bool; 3] },
    /// Gaussian drop on a user mesh.
    Custom,
}

impl ScenarioKind {
    pub fn parse(id: &str) -> Result<Self> {
        let all_open = [true; 3];
        Ok(match id {
            "ex1" => ScenarioKind::Ex1,
            "ex2" => ScenarioKind::Ex2,
            "ex3a" => ScenarioKind::Ex3(DropCase::A),
            "ex3b" => ScenarioKind::Ex3(DropCase::B),
            "ex3c" => ScenarioKind::Ex3(DropCase::C),
            "ex3d" => ScenarioKind::Ex3(DropCase::D),
            "ex3e" => ScenarioKind::Ex3(DropCase::E),
            "case1" => ScenarioKind::CaseI,
            "bay" => ScenarioKind::Bay { extended: false, open: all_open },
            "bay_extended" => ScenarioKind::Bay { extended: true, open: all_open },
            "custom" => ScenarioKind::Custom,
            other => return Err(Error::Input(format!("unknown scenario '{other}'"))),
        })
    }

    pub fn id(&self) -> String {
        match self {
            ScenarioKind::Ex1 => "ex1".into(),
            ScenarioKind::Ex2 => "ex2".into(),
            ScenarioKind::Ex3(c) => format!("ex3{}", c.letter()),
            ScenarioKind::CaseI => "case1".into(),
            ScenarioKind::Bay { extended: false, .. } => "bay".into(),
            ScenarioKind::Bay { extended: true, .. } => "bay_extended".into(),
            ScenarioKind::Custom => "custom".into(),
        }
    }

    fn is_manufactured(&self) -> bool {
        matches!(self, ScenarioKind::Ex1 | ScenarioKind::Ex2)
    }
}

/// Everything needed to build a run; `None` fields take the scenario default.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Subdivisions per side for square domains.
    pub n: usize,
    pub mesh_path: Option<PathBuf>,
    pub order: Order,
    pub c0: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    /// Interior node jitter as a fraction of the grid spacing.
    pub perturbation: Option<f64>,
    pub seed: u64,
    /// Physical constants for `custom`; ignored otherwise.
    pub physics: Option<Physics>,
    /// Initial bump for `custom`; ignored otherwise.
    pub gaussian: Option<Gaussian>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Physics {
    pub rho: f64,
    pub mu: f64,
    pub g: f64,
    pub zeta: f64,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            n: 8,
            mesh_path: None,
            order: Order::Second,
            c0: None,
            dt: None,
            t_final: None,
            perturbation: None,
            seed: 0,
            physics: None,
            gaussian: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_order(mut self, order: Order) -> Self {
        self.order = order;
        self
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = Some(c0);
        self
    }
}

/// Shipped Bay of Bengal meshes, relative to the workspace root.
pub const BAY_MESH: &str = "data/bay/bay.smf";
pub const BAY_EXTENDED_MESH: &str = "data/bay/bay_extended.smf";

/// Grid spacing used by the time-step rule `Δt = 0.25 √h` on square domains.
pub fn representative_h(n: usize) -> f64 {
    1.0 / n as f64
}

pub fn default_dt(n: usize) -> f64 {
    0.25 * representative_h(n).sqrt()
}

/// Initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum InitialData {
    Manufactured(Manufactured),
    /// `η⁰` Gaussian, `u⁰ = 0`.
    Drop(Gaussian),
}

impl InitialData {
    pub fn phi0(&self, x: Point, zeta: f64) -> f64 {
        match self {
            InitialData::Manufactured(m) => m.phi(x, 0.0),
            InitialData::Drop(g) => zeta + g.eval(x),
        }
    }

    pub fn u0(&self, x: Point) -> [f64; 2] {
        match self {
            InitialData::Manufactured(m) => m.u(x, 0.0),
            InitialData::Drop(_) => [0.0; 2],
        }
    }
}

/// A resolved, ready-to-run problem.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub mesh: TriMesh,
    pub boundary: BoundaryPartition,
    pub params: SweParams,
    pub initial: InitialData,
    /// Exact solution, for manufactured cases.
    pub exact: Option<Manufactured>,
    /// Grid spacing entering the time-step rule (`NaN` for file meshes).
    pub h_rule: f64,
}

fn bay_path(config: &ScenarioConfig, extended: bool) -> PathBuf {
    if let Some(p) = &config.mesh_path {
        return p.clone();
    }
    let rel = if extended { BAY_EXTENDED_MESH } else { BAY_MESH };
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel);
    if root.exists() {
        root
    } else {
        PathBuf::from(rel)
    }
}

pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    let unit = Physics { rho: 1.0, mu: 1.0, g: 1.0, zeta: 1.0 };
    let drop = Gaussian { amplitude: 1e-3, center: [5.0, 5.0], rate: 100.0 };
    let square = |side: f64, labels: SideLabels, default_jitter: f64| {
        let jitter = config.perturbation.unwrap_or(default_jitter);
        gen_square_mesh(side, config.n, jitter, config.seed, labels)
    };

    let (mesh, physics, initial, t_final, default_dt, h_rule) = match &config.kind {
        ScenarioKind::Ex1 | ScenarioKind::Ex2 => {
            let labels = if config.kind == ScenarioKind::Ex2 {
                SideLabels { bottom: 1, right: 0, top: 0, left: 0 }
            } else {
                SideLabels::uniform(0)
            };
            let m = Manufactured::default();
            let h = representative_h(config.n);
            (square(1.0, labels, 0.0)?, unit, InitialData::Manufactured(m), 1.0, default_dt(config.n), h)
        }
        ScenarioKind::Ex3(case) => {
            let h = representative_h(config.n);
            (square(10.0, case.labels(), 0.0)?, unit, InitialData::Drop(drop), 100.0, default_dt(config.n), h)
        }
        ScenarioKind::CaseI => {
            let ocean = Physics { rho: 1e12, mu: 1.0, g: 9.8e-3, zeta: 1.0 };
            let h = representative_h(config.n);
            let labels = DropCase::E.labels();
            (square(10.0, labels, 0.0)?, ocean, InitialData::Drop(drop), 100.0, default_dt(config.n), h)
        }
        ScenarioKind::Bay { extended, open } => {
            let base = load_mesh(bay_path(config, *extended))?;
            let open = *open;
            let mesh = base.relabeled(|l| if (1..=3).contains(&l) && open[l as usize - 1] { l } else { 0 });
            let ocean = Physics { rho: 1e12, mu: 1.0, g: 9.8e-3, zeta: 2.0 };
            let shift = if *extended { 100.0 } else { 0.0 };
            let bump = Gaussian { amplitude: 0.01, center: [559.56, 430.02 + shift], rate: 0.04 };
            (mesh, ocean, InitialData::Drop(bump), 5000.0, 0.2, f64::NAN)
        }
        ScenarioKind::Custom => {
            let path = config
                .mesh_path
                .as_ref()
                .ok_or_else(|| Error::Input("custom scenario needs a mesh path".into()))?;
            let physics = config.physics.unwrap_or(unit);
            let bump = config
                .gaussian
                .ok_or_else(|| Error::Input("custom scenario needs an initial gaussian".into()))?;
            let t = config
                .t_final
                .ok_or_else(|| Error::Input("custom scenario needs T".into()))?;
            let dt = config.dt.ok_or_else(|| Error::Input("custom scenario needs dt".into()))?;
            (load_mesh(path)?, physics, InitialData::Drop(bump), t, dt, f64::NAN)
        }
    };

    let params = SweParams {
        rho: physics.rho,
        mu: physics.mu,
        g: physics.g,
        zeta: physics.zeta,
        c0: config.c0.unwrap_or(0.9),
        dt: config.dt.unwrap_or(default_dt),
        t_final: config.t_final.unwrap_or(t_final),
        order: config.order,
    };
    params.validate()?;
    let boundary = compute_boundary_normals(&mesh)?;
    let exact = match initial {
        InitialData::Manufactured(m) if config.kind.is_manufactured() => Some(m),
        _ => None,
    };
    Ok(Scenario { config: config.clone(), mesh, boundary, params, initial, exact, h_rule })
}

impl Scenario {
    pub fn forcing(&self) -> &dyn Forcing {
        match &self.exact {
            Some(m) => m,
            None => &NoForcing,
        }
    }

    pub fn init_state(&self, lg: &LagrangeGalerkin<'_>) -> Result<SweState> {
        let zeta = self.params.zeta;
        lg.init_state(|x| self.initial.phi0(x, zeta), |x| self.initial.u0(x))
    }

    /// Runs to the final time, forwarding every state to `observer`.
    pub fn run(&self, observer: impl FnMut(&SweState, Option<&StepInfo>) -> Result<()>) -> Result<RunReport> {
        let lg = LagrangeGalerkin::new(&self.mesh, &self.boundary, self.params, self.forcing())?;
        let s0 = self.init_state(&lg)?;
        lg.run(s0, observer)
    }

    /// Runs a manufactured case and measures `E0`, `E1` of `η` and `u`
    /// against the interpolated exact solution over `n = 0..N_T`.
    pub fn run_errors(&self) -> Result<(ErrorRecord, RunReport)> {
        let exact = self
            .exact
            .ok_or_else(|| Error::Input(format!("scenario {} has no exact solution", self.config.kind.id())))?;
        let mut acc = [
            ErrorAccumulator::new(ErrorNorm::E0),
            ErrorAccumulator::new(ErrorNorm::E0),
            ErrorAccumulator::new(ErrorNorm::E1),
            ErrorAccumulator::new(ErrorNorm::E1),
        ];
        let mesh = &self.mesh;
        let report = self.run(|s, _| {
            let eta = interpolate(mesh, |x| exact.eta(x, s.time))?;
            let u = interpolate_vector(mesh, |x| exact.u(x, s.time))?;
            acc[0].push_scalar(mesh, &s.eta, &eta);
            acc[1].push_vector(mesh, &s.u, &u);
            acc[2].push_scalar(mesh, &s.eta, &eta);
            acc[3].push_vector(mesh, &s.u, &u);
            Ok(())
        })?;
        let record = ErrorRecord {
            n: self.config.n,
            h: self.h_rule,
            dt: self.params.dt,
            e0_eta: acc[0].value()?,
            e0_u: acc[1].value()?,
            e1_eta: acc[2].value()?,
            e1_u: acc[3].value()?,
        };
        Ok((record, report))
    }
}

/// Error table over a list of resolutions with `Δt = 0.25 √h`.
pub fn eoc_study(base: &ScenarioConfig, ns: &[usize]) -> Result<Vec<ErrorRecord>> {
    ns.iter()
        .map(|&n| {
            let mut cfg = base.clone();
            cfg.n = n;
            cfg.dt = None;
            build_scenario(&cfg)?.run_errors().map(|(r, _)| r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C0Sweep {
    /// `(c0, ‖η_h‖_{ℓ²(L²)})` in input order.
    pub rows: Vec<(f64, f64)>,
    pub argmin: f64,
}

impl C0Sweep {
    /// True when the sampled curve decreases then increases (ties allowed).
    pub fn is_unimodal(&self) -> bool {
        let v: Vec<f64> = self.rows.iter().map(|r| r.1).collect();
        let k = v.iter().enumerate().fold(0, |m, (i, &x)| if x < v[m] { i } else { m });
        v[..=k].windows(2).all(|w| w[1] <= w[0]) && v[k..].windows(2).all(|w| w[1] >= w[0])
    }
}

/// One full run per `c0`, scoring each by `‖η_h‖_{ℓ²(L²)}` over `n = 1..N_T`.
pub fn sweep_c0(base: &ScenarioConfig, values: &[f64]) -> Result<C0Sweep> {
    if values.is_empty() {
        return Err(Error::Input("c0 sweep needs at least one value".into()));
    }
    let norms = par::map_collect(values, |&c0| -> Result<f64> {
        let mut cfg = base.clone();
        cfg.c0 = Some(c0);
        let sc = build_scenario(&cfg)?;
        let report = sc.run(|_, _| Ok(()))?;
        Ok(l2_l2_norm(report.l2_eta(), sc.params.dt))
    });
    let mut rows = Vec::with_capacity(values.len());
    for (&c0, norm) in values.iter().zip(norms) {
        rows.push((c0, norm?));
    }
    let argmin = rows.iter().fold(rows[0], |best, &r| if r.1 < best.1 { r } else { best }).0;
    Ok(C0Sweep { rows, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_ids_round_trip() {
        for id in ["ex1", "ex2", "ex3a", "ex3b", "ex3c", "ex3d", "ex3e", "case1", "bay", "bay_extended", "custom"] {
            assert_eq!(ScenarioKind::parse(id).unwrap().id(), id);
        }
        assert!(ScenarioKind::parse("ex5").is_err());
    }

    #[test]
    fn drop_cases_open_sides() {
        assert_eq!(DropCase::A.labels(), SideLabels::uniform(0));
        let c = DropCase::C.labels();
        assert_eq!((c.bottom, c.right, c.top, c.left), (1, 2, 0, 0));
        let e = DropCase::E.labels();
        assert!([e.bottom, e.right, e.top, e.left].iter().all(|&l| l > 0));
    }

    #[test]
    fn manufactured_initial_height() {
        let m = Manufactured::default();
        let x = [0.3, 0.8];
        let s = (PI * 0.3).sin() * (PI * 0.8).sin();
        assert!((m.phi(x, 0.0) - (1.0 + s * 2.0 / 8.0)).abs() < 1e-15);
        assert!((m.u(x, 0.0)[1] - s * 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn first_manufactured_time_step() {
        let sc = build_scenario(&ScenarioConfig::new(ScenarioKind::Ex1)).unwrap();
        assert!((sc.params.dt - 8.84e-2).abs() < 5e-5);
        assert_eq!(sc.params.num_steps(), 11);
        assert!(sc.boundary.dirichlet_nodes().len() == 32);
    }

    #[test]
    fn closed_basin_constrains_every_boundary_node() {
        let sc = build_scenario(&ScenarioConfig::new(ScenarioKind::Ex3(DropCase::A)).with_n(10)).unwrap();
        assert!(!sc.boundary.has_transmission());
        assert_eq!(sc.boundary.dirichlet_nodes().len(), 40);
        assert_eq!(sc.params.t_final, 100.0);
    }

    #[test]
    fn single_value_sweep() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::CaseI).with_n(4);
        cfg.t_final = Some(1.0);
        let sweep = sweep_c0(&cfg, &[0.9]).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        assert_eq!(sweep.argmin, 0.9);
        assert!(sweep.is_unimodal());
        assert!(sweep_c0(&cfg, &[]).is_err());
    }

    #[test]
    fn unimodality() {
        let s = |v: &[f64]| C0Sweep { rows: v.iter().map(|&x| (0.0, x)).collect(), argmin: 0.0 };
        assert!(s(&[3.0, 2.0, 1.0, 2.0]).is_unimodal());
        assert!(s(&[1.0, 2.0]).is_unimodal());
        assert!(!s(&[1.0, 2.0, 1.5, 3.0]).is_unimodal());
    }
}
