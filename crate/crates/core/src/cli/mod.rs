//! Config-driven commands behind the `lgswe` binary.
//!
//! Every command writes into `out_dir`: `run` produces `timeseries.csv`,
//! optional `snap_<step>.vtk` files and `run.json`; `eoc` produces `eoc.csv`;
//! `sweep-c0` produces `c0_sweep.csv`. All three write `run.json`.

mod config;
mod vtk;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub use config::{IniDoc, RunConfig};
pub use vtk::write_vtk;

use crate::diagnostics::{eoc, ErrorRecord};
use crate::error::{Error, Result};
use crate::par;
use crate::scenarios::{build_scenario, eoc_study, sweep_c0, C0Sweep, Scenario, ScenarioConfig};
use crate::scheme::{Order, RunReport, COMPOSED_QUADRATURE_DEGREE};
use crate::solver::DEFAULT_TOL;

pub const EOC_HEADER: &str =
    "order,n,dt,e0_eta,eoc_e0_eta,e0_u,eoc_e0_u,e1_eta,eoc_e1_eta,e1_u,eoc_e1_u";
pub const C0_HEADER: &str = "c0,l2l2_eta";

/// What `cmd_run` produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub snapshots: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs `f` single-threaded when `deterministic` is set.
fn maybe_serial<T: Send>(deterministic: bool, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if deterministic {
        par::serial(f)
    } else {
        f()
    }
}

pub fn cmd_run(rc: &RunConfig) -> Result<RunOutcome> {
    std::fs::create_dir_all(&rc.out_dir)?;
    maybe_serial(rc.deterministic, || {
        let sc = build_scenario(&rc.scenario)?;
        let mut snapshots = Vec::new();
        let report = sc.run(|s, _| {
            if let Some(every) = rc.snapshot_every {
                if s.step % every == 0 {
                    let path = rc.out_dir.join(format!("snap_{}.vtk", s.step));
                    let mut w = create(&path)?;
                    write_vtk(&mut w, &sc.mesh, &s.eta, &s.u, &format!("eta and u at t = {:.6e}", s.time))?;
                    w.flush()?;
                    snapshots.push(path);
                }
            }
            Ok(())
        })?;
        let mut w = create(&rc.out_dir.join("timeseries.csv"))?;
        report.series.write_csv(&mut w)?;
        w.flush()?;
        let results = json!({
            "steps": report.steps(),
            "initial": report.initial,
            "final": report.series.last(),
            "first_clipped_step": report.first_clipped_step(),
            "total_clipped_feet": report.total_clipped(),
            "max_cg_iterations": report.max_cg_iterations(),
            "snapshots": snapshots.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect::<Vec<_>>(),
        });
        write_json(rc, "run", Some(&sc), results)?;
        Ok(RunOutcome { report, snapshots })
    })
}

/// Convergence tables for every configured order.
pub fn cmd_eoc(rc: &RunConfig) -> Result<Vec<(Order, Vec<ErrorRecord>)>> {
    if rc.eoc_ns.is_empty() {
        return Err(Error::Input("eoc needs at least one N".into()));
    }
    std::fs::create_dir_all(&rc.out_dir)?;
    maybe_serial(rc.deterministic, || {
        let mut tables = Vec::new();
        for &order in &rc.eoc_orders {
            let base = rc.scenario.clone().with_order(order);
            tables.push((order, eoc_study(&base, &rc.eoc_ns)?));
        }
        let mut w = create(&rc.out_dir.join("eoc.csv"))?;
        write_eoc_csv(&mut w, &tables)?;
        w.flush()?;
        let results: Vec<Value> = tables
            .iter()
            .map(|(o, rows)| json!({ "order": o.as_int(), "rows": rows }))
            .collect();
        let sc = build_scenario(&rc.scenario)?;
        write_json(rc, "eoc", Some(&sc), json!({ "n_list": rc.eoc_ns, "tables": results }))?;
        Ok(tables)
    })
}

pub fn cmd_sweep_c0(rc: &RunConfig) -> Result<C0Sweep> {
    std::fs::create_dir_all(&rc.out_dir)?;
    maybe_serial(rc.deterministic, || {
        let sweep = sweep_c0(&rc.scenario, &rc.c0_values)?;
        let mut w = create(&rc.out_dir.join("c0_sweep.csv"))?;
        write_c0_csv(&mut w, &sweep)?;
        w.flush()?;
        let sc = build_scenario(&rc.scenario)?;
        let results = json!({ "rows": sweep.rows, "argmin": sweep.argmin, "unimodal": sweep.is_unimodal() });
        write_json(rc, "sweep-c0", Some(&sc), results)?;
        Ok(sweep)
    })
}

pub fn write_eoc_csv(mut w: impl Write, tables: &[(Order, Vec<ErrorRecord>)]) -> std::io::Result<()> {
    writeln!(w, "{EOC_HEADER}")?;
    for (order, rows) in tables {
        for (i, r) in rows.iter().enumerate() {
            let rate = |f: fn(&ErrorRecord) -> f64| match i {
                0 => String::new(),
                _ => format!("{:.16e}", eoc(f(&rows[i - 1]), f(r), rows[i - 1].dt, r.dt)),
            };
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{},{:.16e},{},{:.16e},{},{:.16e},{}",
                order.as_int(),
                r.n,
                r.dt,
                r.e0_eta,
                rate(|r| r.e0_eta),
                r.e0_u,
                rate(|r| r.e0_u),
                r.e1_eta,
                rate(|r| r.e1_eta),
                r.e1_u,
                rate(|r| r.e1_u),
            )?;
        }
    }
    Ok(())
}

pub fn write_c0_csv(mut w: impl Write, sweep: &C0Sweep) -> std::io::Result<()> {
    writeln!(w, "{C0_HEADER}")?;
    for (c0, norm) in &sweep.rows {
        writeln!(w, "{c0},{norm:.16e}")?;
    }
    Ok(())
}

/// Resolved parameters plus the discretisation choices a reader needs to
/// reproduce a run.
pub fn run_metadata(command: &str, config: &ScenarioConfig, sc: Option<&Scenario>) -> Value {
    let mut v = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": config.kind.id(),
        "config": config,
        "scheme": {
            "order": config.order.as_int(),
            "startup": "first step of the two-step scheme uses the one-step scheme",
            "velocity_extrapolation": "u* = 2 u^{n-1} - u^{n-2}",
            "height_unknown": "eta, with phi = eta + zeta",
        },
        "quadrature_degrees": {
            "composed_terms": COMPOSED_QUADRATURE_DEGREE,
            "mass": "exact",
            "weighted_mass": 4,
            "viscous": "exact",
            "pressure_gradient": 3,
            "sources": 5,
            "energies": 5,
        },
        "clipping_policy": "feet leaving the domain are moved to the first boundary crossing of the segment from the quadrature point; the Jacobian weight keeps the source element's value",
        "transmission": {
            "relation": "u = c0 sqrt(g zeta) (eta / phi) n",
            "phi_floor": "1e-8 zeta",
            "normal": "length-weighted average of adjacent transmission edge normals",
            "shared_nodes": "a node touching a Dirichlet edge is Dirichlet; a node on two transmission segments is filed under the lower label",
        },
        "solver": {
            "method": "Jacobi-preconditioned conjugate gradient",
            "relative_tolerance": DEFAULT_TOL,
            "max_iterations": "10 x unknowns",
            "constraints": "symmetric elimination",
        },
    });
    if let Some(sc) = sc {
        v["params"] = json!(sc.params);
        v["steps"] = json!(sc.params.num_steps());
        v["mesh"] = json!({
            "vertices": sc.mesh.num_vertices(),
            "triangles": sc.mesh.num_triangles(),
            "dirichlet_nodes": sc.boundary.dirichlet_nodes().len(),
            "transmission_nodes": sc.boundary.transmission().count(),
        });
    }
    v
}

fn write_json(rc: &RunConfig, command: &str, sc: Option<&Scenario>, results: Value) -> Result<()> {
    let mut v = run_metadata(command, &rc.scenario, sc);
    v["deterministic"] = json!(rc.deterministic);
    v["seed"] = json!(rc.scenario.seed);
    v["snapshot_every"] = json!(rc.snapshot_every);
    v["results"] = results;
    let mut w = create(&rc.out_dir.join("run.json"))?;
    serde_json::to_writer_pretty(&mut w, &v).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
