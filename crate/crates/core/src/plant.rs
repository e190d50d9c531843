//! Plant network validation and whole-system exergy analysis.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::components::{
    compressor_balance, generic_balance, hx_balance, turbine_balance, ComponentKind, ExergyBalance,
};
use crate::error::{Error, Result};
use crate::fluid_state::{exergy_flow, DeadState, FluidRef, StatePoint, REFERENCE_TOLERANCE_KJ_KG};

const MASS_BALANCE_REL_TOL: f64 = 1e-6;

/// Declares which streams and shaft machines cross the system boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemBoundary {
    pub in_streams: Vec<String>,
    pub out_streams: Vec<String>,
    pub shaft: Shaft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shaft {
    pub producers: Vec<String>,
    pub consumers: Vec<String>,
}

/// Validated network of state points and components.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantGraph {
    states: IndexMap<String, StatePoint>,
    components: IndexMap<String, ComponentKind>,
    boundary: SystemBoundary,
    dead_state: DeadState,
    fluid_refs: IndexMap<String, FluidRef>,
}

/// One mass-balance defect found by [`PlantGraph::validate_mass_balance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassBalanceViolation {
    pub component_id: String,
    pub inflow_kg_s: f64,
    pub outflow_kg_s: f64,
}

impl MassBalanceViolation {
    pub fn imbalance_kg_s(&self) -> f64 {
        self.inflow_kg_s - self.outflow_kg_s
    }
}

impl std::fmt::Display for MassBalanceViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "component `{}`: mass inflow {} kg/s != outflow {} kg/s (imbalance {} kg/s)",
            self.component_id,
            self.inflow_kg_s,
            self.outflow_kg_s,
            self.imbalance_kg_s()
        )
    }
}

impl PlantGraph {
    /// Build and structurally validate a plant network.
    ///
    /// Checks that every port resolves to a state, every state is wired to at
    /// least one port, boundary references resolve, in/out streams are
    /// disjoint, and junction ports share a single thermodynamic state.
    pub fn new(
        states: IndexMap<String, StatePoint>,
        components: IndexMap<String, ComponentKind>,
        boundary: SystemBoundary,
        dead_state: DeadState,
        fluid_refs: IndexMap<String, FluidRef>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyPlant);
        }
        let mut referenced: std::collections::HashSet<&str> = std::collections::HashSet::new();
        for (id, kind) in &components {
            for port in kind.port_state_ids() {
                if !states.contains_key(port) {
                    return Err(Error::UnknownState {
                        id: id.clone(),
                        state_id: port.to_string(),
                    });
                }
                referenced.insert(port);
            }
        }
        for id in states.keys() {
            if !referenced.contains(id.as_str()) {
                return Err(Error::OrphanState { id: id.clone() });
            }
        }
        for sid in boundary.in_streams.iter().chain(&boundary.out_streams) {
            if !states.contains_key(sid) {
                return Err(Error::UnknownState {
                    id: "boundary".to_string(),
                    state_id: sid.clone(),
                });
            }
        }
        for sid in &boundary.in_streams {
            if boundary.out_streams.contains(sid) {
                return Err(Error::Validation(vec![format!(
                    "boundary stream `{sid}` appears in both in_streams and out_streams"
                )]));
            }
        }
        for cid in boundary.shaft.producers.iter().chain(&boundary.shaft.consumers) {
            match components.get(cid) {
                Some(ComponentKind::Turbine { .. }) | Some(ComponentKind::Compressor { .. }) => {}
                Some(_) | None => return Err(Error::UnknownComponent { id: cid.clone() }),
            }
        }
        let plant = Self {
            states,
            components,
            boundary,
            dead_state,
            fluid_refs,
        };
        plant.check_junction_states()?;
        Ok(plant)
    }

    pub fn states(&self) -> &IndexMap<String, StatePoint> {
        &self.states
    }

    pub fn components(&self) -> &IndexMap<String, ComponentKind> {
        &self.components
    }

    pub fn boundary(&self) -> &SystemBoundary {
        &self.boundary
    }

    pub fn dead_state(&self) -> &DeadState {
        &self.dead_state
    }

    pub fn fluid_refs(&self) -> &IndexMap<String, FluidRef> {
        &self.fluid_refs
    }

    fn state(&self, id: &str) -> &StatePoint {
        // ids were resolved during construction
        &self.states[id]
    }

    /// Splitter and merger ports must carry the same fluid at the same
    /// thermodynamic state; only mass flow differs between them.
    fn check_junction_states(&self) -> Result<()> {
        for (id, kind) in &self.components {
            let ports = match kind {
                ComponentKind::Splitter { .. } | ComponentKind::Merger { .. } => {
                    kind.port_state_ids()
                }
                _ => continue,
            };
            let first = self.state(ports[0]);
            for port in &ports[1..] {
                let other = self.state(port);
                if other.fluid_id != first.fluid_id {
                    return Err(Error::FluidMismatch {
                        id: id.clone(),
                        left: first.fluid_id.clone(),
                        right: other.fluid_id.clone(),
                    });
                }
                let dh = (other.h_kj_kg - first.h_kj_kg).abs();
                let ds = (other.s_kj_kgk - first.s_kj_kgk).abs() * self.dead_state.t0_k;
                let de = (other.eps_kj_kg - first.eps_kj_kg).abs();
                if dh.max(ds).max(de) > REFERENCE_TOLERANCE_KJ_KG {
                    return Err(Error::Validation(vec![format!(
                        "junction `{id}`: ports `{}` and `{port}` are not at the same \
                         thermodynamic state",
                        ports[0]
                    )]));
                }
            }
        }
        Ok(())
    }

    /// Check `sum(mdot_in) == sum(mdot_out)` at every splitter, merger and
    /// two-port component. Violations are returned, not thrown.
    pub fn validate_mass_balance(&self) -> Vec<MassBalanceViolation> {
        let mut violations = Vec::new();
        let mut check = |id: &str, inflow: f64, outflow: f64| {
            let scale = inflow.abs().max(outflow.abs()).max(1.0);
            if (inflow - outflow).abs() > MASS_BALANCE_REL_TOL * scale {
                violations.push(MassBalanceViolation {
                    component_id: id.to_string(),
                    inflow_kg_s: inflow,
                    outflow_kg_s: outflow,
                });
            }
        };
        for (id, kind) in &self.components {
            match kind {
                ComponentKind::HeatExchanger {
                    hot_in,
                    hot_out,
                    cold_in,
                    cold_out,
                } => {
                    check(
                        &format!("{id} (hot leg)"),
                        self.state(hot_in).mdot_kg_s,
                        self.state(hot_out).mdot_kg_s,
                    );
                    check(
                        &format!("{id} (cold leg)"),
                        self.state(cold_in).mdot_kg_s,
                        self.state(cold_out).mdot_kg_s,
                    );
                }
                ComponentKind::Turbine { inlet, outlet }
                | ComponentKind::Compressor { inlet, outlet } => {
                    check(id, self.state(inlet).mdot_kg_s, self.state(outlet).mdot_kg_s);
                }
                ComponentKind::Splitter { inlet, outlets } => {
                    let out: f64 = outlets.iter().map(|o| self.state(o).mdot_kg_s).sum();
                    check(id, self.state(inlet).mdot_kg_s, out);
                }
                ComponentKind::Merger { inlets, outlet } => {
                    let inflow: f64 = inlets.iter().map(|i| self.state(i).mdot_kg_s).sum();
                    check(id, inflow, self.state(outlet).mdot_kg_s);
                }
            }
        }
        violations
    }

    /// Net shaft power: turbine production minus compressor consumption.
    ///
    /// The flag is set when the shaft consumes more than it produces.
    pub fn useful_power(&self) -> Result<(f64, bool)> {
        let mut produced = 0.0;
        for id in &self.boundary.shaft.producers {
            match &self.components[id] {
                ComponentKind::Turbine { inlet, outlet } => {
                    produced +=
                        crate::components::turbine_power(id, self.state(inlet), self.state(outlet))?;
                }
                _ => return Err(Error::UnknownComponent { id: id.clone() }),
            }
        }
        let mut consumed = 0.0;
        for id in &self.boundary.shaft.consumers {
            match &self.components[id] {
                ComponentKind::Compressor { inlet, outlet } => {
                    consumed += crate::components::compressor_power(
                        id,
                        self.state(inlet),
                        self.state(outlet),
                    )?;
                }
                _ => return Err(Error::UnknownComponent { id: id.clone() }),
            }
        }
        let useful = produced - consumed;
        Ok((useful, useful < 0.0))
    }

    /// Whole-system balance over the declared boundary.
    ///
    /// `eta_functional` is useful power over the net boundary exergy decrease;
    /// `eta_gross` is total exergy output over total input.
    pub fn system_balance(&self) -> Result<SystemBalance> {
        let violations = self.validate_mass_balance();
        if !violations.is_empty() {
            return Err(Error::Validation(
                violations.iter().map(|v| v.to_string()).collect(),
            ));
        }
        let (useful, net_consuming) = self.useful_power()?;
        let streams_in: f64 = self
            .boundary
            .in_streams
            .iter()
            .map(|id| exergy_flow(self.state(id)))
            .sum();
        let streams_out: f64 = self
            .boundary
            .out_streams
            .iter()
            .map(|id| exergy_flow(self.state(id)))
            .sum();
        let ex_in = streams_in;
        let ex_out = streams_out + useful;
        let denom = streams_in - streams_out;
        if !(denom > 0.0) {
            return Err(Error::ZeroNetBoundaryExergy { denom_kw: denom });
        }
        Ok(SystemBalance {
            balance: ExergyBalance {
                ex_in_kw: ex_in,
                ex_out_kw: ex_out,
                ex_d_kw: ex_in - ex_out,
                eta_x: useful / denom,
            },
            eta_gross: ex_out / ex_in,
            useful_power_kw: useful,
            net_consuming_shaft: net_consuming,
        })
    }

    /// Compare the component destruction sum against the whole-system value.
    ///
    /// The residual is diagnostic; it vanishes by telescoping whenever every
    /// internal exergy flow appears once as an input and once as an output.
    pub fn destruction_closure(&self) -> Result<(f64, f64, f64)> {
        let report = self.analyze()?;
        let sum: f64 = report.components.iter().map(|c| c.ex_d_kw).sum();
        let whole = report.system.ex_d_kw;
        Ok((sum, whole, sum - whole))
    }

    /// Evaluate every component balance plus the whole-system analysis.
    pub fn analyze(&self) -> Result<ExergyReport> {
        let mut exchangers = Vec::new();
        let mut machines = Vec::new();
        let mut junctions = Vec::new();
        for (id, kind) in &self.components {
            match kind {
                ComponentKind::HeatExchanger {
                    hot_in,
                    hot_out,
                    cold_in,
                    cold_out,
                } => {
                    let row = match hx_balance(
                        id,
                        self.state(hot_in),
                        self.state(hot_out),
                        self.state(cold_in),
                        self.state(cold_out),
                    ) {
                        Ok(b) => ComponentResult::from_balance(id, kind.label(), b, None),
                        // efficiency is undefined when the hot leg gains
                        // exergy (possible at shifted dead states), but the
                        // destruction term is still well-defined
                        Err(Error::DegenerateBalance { .. }) => {
                            let ex_in = exergy_flow(self.state(hot_in))
                                - exergy_flow(self.state(hot_out));
                            let ex_out = exergy_flow(self.state(cold_out))
                                - exergy_flow(self.state(cold_in));
                            ComponentResult {
                                id: id.clone(),
                                kind: kind.label().to_string(),
                                ex_in_kw: ex_in,
                                ex_out_kw: ex_out,
                                ex_d_kw: ex_in - ex_out,
                                eta_x: None,
                                power_kw: None,
                            }
                        }
                        Err(other) => return Err(other),
                    };
                    exchangers.push(row);
                }
                ComponentKind::Turbine { inlet, outlet } => {
                    let (b, power) = turbine_balance(id, self.state(inlet), self.state(outlet))?;
                    machines.push(ComponentResult::from_balance(id, kind.label(), b, Some(power)));
                }
                ComponentKind::Compressor { inlet, outlet } => {
                    let (b, power) = compressor_balance(id, self.state(inlet), self.state(outlet))?;
                    machines.push(ComponentResult::from_balance(id, kind.label(), b, Some(power)));
                }
                ComponentKind::Splitter { .. } | ComponentKind::Merger { .. } => {
                    // loss-free by construction: same specific state on every port
                    let ports = kind.port_state_ids();
                    let (ins, outs): (Vec<&str>, Vec<&str>) = match kind {
                        ComponentKind::Splitter { inlet, outlets } => (
                            vec![inlet.as_str()],
                            outlets.iter().map(String::as_str).collect(),
                        ),
                        ComponentKind::Merger { inlets, outlet } => (
                            inlets.iter().map(String::as_str).collect(),
                            vec![outlet.as_str()],
                        ),
                        _ => unreachable!("{ports:?}"),
                    };
                    let ex_in: f64 = ins.iter().map(|p| exergy_flow(self.state(p))).sum();
                    let ex_out: f64 = outs.iter().map(|p| exergy_flow(self.state(p))).sum();
                    junctions.push(ComponentResult {
                        id: id.clone(),
                        kind: kind.label().to_string(),
                        ex_in_kw: ex_in,
                        ex_out_kw: ex_out,
                        ex_d_kw: 0.0,
                        eta_x: Some(1.0),
                        power_kw: None,
                    });
                }
            }
        }
        // deterministic row order regardless of map iteration order
        for group in [&mut exchangers, &mut machines, &mut junctions] {
            group.sort_by(|a, b| a.id.cmp(&b.id));
        }
        let system = self.system_balance()?;
        let mut components = exchangers;
        components.append(&mut machines);
        components.append(&mut junctions);
        let component_sum: f64 = components.iter().map(|c| c.ex_d_kw).sum();
        Ok(ExergyReport {
            dead_state: self.dead_state,
            components,
            useful_power_kw: system.useful_power_kw,
            net_consuming_shaft: system.net_consuming_shaft,
            system: SystemResult {
                ex_in_kw: system.balance.ex_in_kw,
                ex_out_kw: system.balance.ex_out_kw,
                ex_d_kw: system.balance.ex_d_kw,
                eta_functional: system.balance.eta_x,
                eta_gross: system.eta_gross,
                component_sum_kw: component_sum,
                closure_residual_kw: component_sum - system.balance.ex_d_kw,
            },
        })
    }
}

/// Whole-system balance with both efficiency forms.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemBalance {
    pub balance: ExergyBalance,
    pub eta_gross: f64,
    pub useful_power_kw: f64,
    pub net_consuming_shaft: bool,
}

/// One row of the analysis: a component's balance and, for turbomachinery,
/// its mechanical power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentResult {
    pub id: String,
    pub kind: String,
    pub ex_in_kw: f64,
    pub ex_out_kw: f64,
    pub ex_d_kw: f64,
    /// `None` when the balance is degenerate (non-positive driving exergy).
    pub eta_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub power_kw: Option<f64>,
}

impl ComponentResult {
    fn from_balance(id: &str, kind: &str, b: ExergyBalance, power_kw: Option<f64>) -> Self {
        Self {
            id: id.to_string(),
            kind: kind.to_string(),
            ex_in_kw: b.ex_in_kw,
            ex_out_kw: b.ex_out_kw,
            ex_d_kw: b.ex_d_kw,
            eta_x: Some(b.eta_x),
            power_kw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemResult {
    pub ex_in_kw: f64,
    pub ex_out_kw: f64,
    pub ex_d_kw: f64,
    pub eta_functional: f64,
    pub eta_gross: f64,
    pub component_sum_kw: f64,
    pub closure_residual_kw: f64,
}

/// Full analysis output: per-component rows (exchangers, then turbomachinery,
/// then junctions) and the whole-system block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExergyReport {
    pub dead_state: DeadState,
    pub components: Vec<ComponentResult>,
    pub useful_power_kw: f64,
    pub net_consuming_shaft: bool,
    pub system: SystemResult,
}

impl ExergyReport {
    pub fn component(&self, id: &str) -> Option<&ComponentResult> {
        self.components.iter().find(|c| c.id == id)
    }
}

/// Cross-check a component row against the general balance with `X_H = 0`.
pub fn cross_check_generic(plant: &PlantGraph, result: &ComponentResult) -> Option<f64> {
    let kind = plant.components().get(&result.id)?;
    let flow = |id: &str| exergy_flow(&plant.states()[id]);
    let ex_d = match kind {
        ComponentKind::HeatExchanger {
            hot_in,
            hot_out,
            cold_in,
            cold_out,
        } => generic_balance(
            &[flow(hot_in), flow(cold_in)],
            &[flow(hot_out), flow(cold_out)],
            0.0,
            0.0,
            0.0,
        ),
        ComponentKind::Turbine { inlet, outlet } => generic_balance(
            &[flow(inlet)],
            &[flow(outlet)],
            0.0,
            result.power_kw.unwrap_or(0.0),
            0.0,
        ),
        ComponentKind::Compressor { inlet, outlet } => generic_balance(
            &[flow(inlet)],
            &[flow(outlet)],
            result.power_kw.unwrap_or(0.0),
            0.0,
            0.0,
        ),
        ComponentKind::Splitter { inlet, outlets } => {
            let ins = vec![flow(inlet)];
            let outs: Vec<f64> = outlets.iter().map(|o| flow(o)).collect();
            generic_balance(&ins, &outs, 0.0, 0.0, 0.0)
        }
        ComponentKind::Merger { inlets, outlet } => {
            let ins: Vec<f64> = inlets.iter().map(|i| flow(i)).collect();
            generic_balance(&ins, &[flow(outlet)], 0.0, 0.0, 0.0)
        }
    };
    Some(ex_d)
}
