//! Browser bindings: a Gaussian drop in the 10 x 10 square with selectable
//! open sides, plus a small convergence study on the manufactured problem.

use lgswe::scenarios::{build_scenario, eoc_study, DropCase, Scenario, ScenarioConfig, ScenarioKind};
use lgswe::scheme::{LagrangeGalerkin, Order, SweState};
use wasm_bindgen::prelude::*;

fn js_err(e: lgswe::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn drop_case(letter: &str) -> Result<DropCase, JsError> {
    DropCase::ALL
        .into_iter()
        .find(|c| c.letter().to_string() == letter)
        .ok_or_else(|| JsError::new(&format!("unknown case '{letter}'")))
}

fn record(sc: &Scenario, state: &SweState, mass: &mut Vec<f64>, l2: &mut Vec<f64>) {
    mass.push(lgswe::diagnostics::mass(&sc.mesh, &state.eta));
    l2.push(lgswe::diagnostics::l2_norm(&sc.mesh, &state.eta));
}

#[wasm_bindgen]
pub struct DropSim {
    scenario: Scenario,
    state: SweState,
    mass: Vec<f64>,
    l2: Vec<f64>,
}

#[wasm_bindgen]
impl DropSim {
    /// `case` is one of `a`..`e`; `n` cells per side.
    #[wasm_bindgen(constructor)]
    pub fn new(case: &str, n: usize, c0: f64, second_order: bool) -> Result<DropSim, JsError> {
        let order = if second_order { Order::Second } else { Order::First };
        let cfg = ScenarioConfig::new(ScenarioKind::Ex3(drop_case(case)?)).with_n(n).with_c0(c0).with_order(order);
        let scenario = build_scenario(&cfg).map_err(js_err)?;
        let state = {
            let lg = LagrangeGalerkin::new(&scenario.mesh, &scenario.boundary, scenario.params, scenario.forcing())
                .map_err(js_err)?;
            scenario.init_state(&lg).map_err(js_err)?
        };
        let mut sim = DropSim { scenario, state, mass: Vec::new(), l2: Vec::new() };
        sim.record();
        Ok(sim)
    }

    fn record(&mut self) {
        record(&self.scenario, &self.state, &mut self.mass, &mut self.l2);
    }

    /// Advances `steps` time increments.
    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        let DropSim { scenario: sc, state, mass, l2 } = self;
        let lg = LagrangeGalerkin::new(&sc.mesh, &sc.boundary, sc.params, sc.forcing()).map_err(js_err)?;
        for _ in 0..steps {
            *state = lg.step(state).map_err(js_err)?.0;
            record(sc, state, mass, l2);
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn dt(&self) -> f64 {
        self.scenario.params.dt
    }

    /// Vertex coordinates, interleaved `x0, y0, x1, ...`.
    pub fn vertices(&self) -> Vec<f64> {
        self.scenario.mesh.vertices().iter().flatten().copied().collect()
    }

    pub fn triangles(&self) -> Vec<u32> {
        self.scenario.mesh.triangles().iter().flatten().map(|&i| i as u32).collect()
    }

    pub fn eta(&self) -> Vec<f64> {
        self.state.eta.values().to_vec()
    }

    /// `∫η` at every stored level, starting from `t = 0`.
    pub fn mass_series(&self) -> Vec<f64> {
        self.mass.clone()
    }

    pub fn l2_series(&self) -> Vec<f64> {
        self.l2.clone()
    }
}

/// Example 1 errors on `N = 4, 8, .., 4·2^(levels-1)`.
/// Rows of `[n, dt, e0_eta, e0_u]`, flattened.
#[wasm_bindgen]
pub fn eoc_table(second_order: bool, levels: usize) -> Result<Vec<f64>, JsError> {
    let order = if second_order { Order::Second } else { Order::First };
    let ns: Vec<usize> = (0..levels.clamp(2, 4)).map(|k| 4 << k).collect();
    let rows = eoc_study(&ScenarioConfig::new(ScenarioKind::Ex1).with_order(order), &ns).map_err(js_err)?;
    Ok(rows.iter().flat_map(|r| [r.n as f64, r.dt, r.e0_eta, r.e0_u]).collect())
}
