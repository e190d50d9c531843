//! Plant-definition file ingestion (JSON) and validation diagnostics.
//!
//! Units are fixed by field-name suffix: temperatures in degC, pressures in
//! kPa, mass flow in kg/s, enthalpy and exergy in kJ/kg, entropy in
//! kJ/(kg K). Temperatures are converted to K on load.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::components::ComponentKind;
use crate::error::{Error, Result};
use crate::fluid_state::{
    celsius_to_kelvin, derive_fluid_ref, specific_exergy, DeadState, FluidRef, PropertyTable,
    ReferenceForm, StatePoint, REFERENCE_TOLERANCE_KJ_KG,
};
use crate::plant::{PlantGraph, SystemBoundary};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantFile {
    pub dead_state: DeadStateSection,
    pub fluids: Vec<FluidSection>,
    pub states: Vec<StateSection>,
    pub components: Vec<ComponentSection>,
    pub boundary: SystemBoundary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub property_tables: Vec<TableSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeadStateSection {
    pub pressure_kpa: f64,
    pub temperature_c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluidSection {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSection>,
}

/// Dead-state reference data: either the full pair or the combined constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSection {
    Enthalpy { h0: f64, s0: f64 },
    Combined { k0: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSection {
    pub id: String,
    pub fluid: String,
    pub t_c: f64,
    pub p_kpa: f64,
    pub mdot_kg_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_kj_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_kj_kgk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_kj_kg: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSection {
    pub id: String,
    #[serde(flatten)]
    pub kind: ComponentKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSection {
    pub fluid: String,
    pub grid: Vec<GridSample>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSample {
    pub p_kpa: f64,
    pub t_c: f64,
    pub h_kj_kg: f64,
    pub s_kj_kgk: f64,
}

/// A plant plus the property tables that came with its file.
#[derive(Debug, Clone)]
pub struct LoadedPlant {
    pub plant: PlantGraph,
    pub tables: IndexMap<String, PropertyTable>,
}

/// Parse a plant file without semantic validation.
pub fn parse_plant_file(path: &Path) -> Result<PlantFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_plant_str(&text, &path.display().to_string())
}

pub fn parse_plant_str(text: &str, origin: &str) -> Result<PlantFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Load and fully validate a plant file.
pub fn load_plant(path: &Path) -> Result<LoadedPlant> {
    let file = parse_plant_file(path)?;
    build_plant(&file)
}

pub fn load_plant_str(text: &str, origin: &str) -> Result<LoadedPlant> {
    build_plant(&parse_plant_str(text, origin)?)
}

fn check_unique<'a>(section: &str, ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId {
                section: section.to_string(),
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

fn build_tables(file: &PlantFile) -> Result<IndexMap<String, PropertyTable>> {
    let mut tables = IndexMap::new();
    for section in &file.property_tables {
        let samples: Vec<(f64, f64, f64, f64)> = section
            .grid
            .iter()
            .map(|g| (g.p_kpa, celsius_to_kelvin(g.t_c), g.h_kj_kg, g.s_kj_kgk))
            .collect();
        let table = PropertyTable::from_samples(&section.fluid, &samples)?;
        tables.insert(section.fluid.clone(), table);
    }
    Ok(tables)
}

/// Turn a parsed file into a validated [`PlantGraph`].
///
/// Specific exergy per state comes from the supplied `eps` column, the fluid
/// reference, or a property table, in that precedence. A fluid without an
/// explicit reference gets one derived from its `eps` column.
pub fn build_plant(file: &PlantFile) -> Result<LoadedPlant> {
    check_unique("fluids", file.fluids.iter().map(|f| f.id.as_str()))?;
    check_unique("states", file.states.iter().map(|s| s.id.as_str()))?;
    check_unique("components", file.components.iter().map(|c| c.id.as_str()))?;

    let dead_state = DeadState::new(
        file.dead_state.pressure_kpa,
        celsius_to_kelvin(file.dead_state.temperature_c),
    )?;
    let tables = build_tables(file)?;

    // raw states with h/s resolved (from the file or a property table)
    let mut raw: Vec<(StateSection, f64, f64)> = Vec::with_capacity(file.states.len());
    for section in &file.states {
        if !file.fluids.iter().any(|f| f.id == section.fluid) {
            return Err(Error::UnknownFluid {
                id: section.id.clone(),
                fluid_id: section.fluid.clone(),
            });
        }
        let (h, s) = match (section.h_kj_kg, section.s_kj_kgk) {
            (Some(h), Some(s)) => (h, s),
            _ => match tables.get(&section.fluid) {
                Some(table) => table.lookup(section.p_kpa, celsius_to_kelvin(section.t_c))?,
                None => {
                    return Err(Error::InvalidState {
                        id: section.id.clone(),
                        reason: format!(
                            "h and s are missing and no property table covers fluid `{}`",
                            section.fluid
                        ),
                    })
                }
            },
        };
        raw.push((section.clone(), h, s));
    }

    // one reference per fluid: explicit, derived from eps, or from a table
    let mut fluid_refs: IndexMap<String, FluidRef> = IndexMap::new();
    for fluid in &file.fluids {
        let fluid_ref = match &fluid.reference {
            Some(ReferenceSection::Enthalpy { h0, s0 }) => FluidRef {
                fluid_id: fluid.id.clone(),
                form: ReferenceForm::Enthalpy { h0: *h0, s0: *s0 },
            },
            Some(ReferenceSection::Combined { k0 }) => FluidRef {
                fluid_id: fluid.id.clone(),
                form: ReferenceForm::Combined {
                    k0: *k0,
                    t0_k: dead_state.t0_k,
                },
            },
            None => {
                let seeded: Vec<StatePoint> = raw
                    .iter()
                    .filter(|(sec, _, _)| sec.fluid == fluid.id && sec.eps_kj_kg.is_some())
                    .map(|(sec, h, s)| {
                        StatePoint::new(
                            sec.id.clone(),
                            sec.fluid.clone(),
                            celsius_to_kelvin(sec.t_c),
                            sec.p_kpa,
                            sec.mdot_kg_s,
                            *h,
                            *s,
                            sec.eps_kj_kg.unwrap(),
                        )
                    })
                    .collect::<Result<_>>()?;
                if !seeded.is_empty() {
                    let refs: Vec<&StatePoint> = seeded.iter().collect();
                    derive_fluid_ref(&fluid.id, &refs, &dead_state)?.0
                } else if let Some(table) = tables.get(&fluid.id) {
                    let (h0, s0) = table.lookup(dead_state.p0_kpa, dead_state.t0_k)?;
                    FluidRef {
                        fluid_id: fluid.id.clone(),
                        form: ReferenceForm::Enthalpy { h0, s0 },
                    }
                } else {
                    return Err(Error::Validation(vec![format!(
                        "fluid `{}` has no reference, no eps column and no property table; \
                         specific exergy cannot be computed",
                        fluid.id
                    )]));
                }
            }
        };
        fluid_refs.insert(fluid.id.clone(), fluid_ref);
    }

    let mut states: IndexMap<String, StatePoint> = IndexMap::new();
    for (section, h, s) in &raw {
        let fluid_ref = &fluid_refs[&section.fluid];
        let computed = specific_exergy(*h, *s, fluid_ref, &dead_state)?;
        let eps = match section.eps_kj_kg {
            Some(supplied) => {
                if (supplied - computed).abs() > REFERENCE_TOLERANCE_KJ_KG {
                    return Err(Error::ExergyMismatch {
                        id: section.id.clone(),
                        supplied_kj_kg: supplied,
                        computed_kj_kg: computed,
                        limit_kj_kg: REFERENCE_TOLERANCE_KJ_KG,
                    });
                }
                supplied
            }
            None => computed,
        };
        let state = StatePoint::new(
            section.id.clone(),
            section.fluid.clone(),
            celsius_to_kelvin(section.t_c),
            section.p_kpa,
            section.mdot_kg_s,
            *h,
            *s,
            eps,
        )?;
        states.insert(section.id.clone(), state);
    }

    let mut components: IndexMap<String, ComponentKind> = IndexMap::new();
    for section in &file.components {
        components.insert(section.id.clone(), section.kind.clone());
    }

    let plant = PlantGraph::new(
        states,
        components,
        file.boundary.clone(),
        dead_state,
        fluid_refs,
    )?;
    Ok(LoadedPlant { plant, tables })
}

/// Collect all validation findings for a parsed file without failing fast.
///
/// Used by the `validate` command: mass-balance defects, eps inconsistencies,
/// port mismatches, duplicate and dangling ids are all listed together.
pub fn diagnose(file: &PlantFile) -> Vec<String> {
    let mut findings = Vec::new();

    for (section, ids) in [
        (
            "fluids",
            file.fluids.iter().map(|f| f.id.clone()).collect::<Vec<_>>(),
        ),
        ("states", file.states.iter().map(|s| s.id.clone()).collect()),
        (
            "components",
            file.components.iter().map(|c| c.id.clone()).collect(),
        ),
    ] {
        let mut seen = std::collections::HashSet::new();
        for id in ids {
            if !seen.insert(id.clone()) {
                findings.push(format!("duplicate {section} id `{id}`"));
            }
        }
    }

    let state_ids: std::collections::HashSet<&str> =
        file.states.iter().map(|s| s.id.as_str()).collect();
    for component in &file.components {
        for port in component.kind.port_state_ids() {
            if !state_ids.contains(port) {
                findings.push(format!(
                    "component `{}` references unknown state `{port}`",
                    component.id
                ));
            }
        }
    }
    for sid in file
        .boundary
        .in_streams
        .iter()
        .chain(&file.boundary.out_streams)
    {
        if !state_ids.contains(sid.as_str()) {
            findings.push(format!("boundary references unknown state `{sid}`"));
        }
    }
    for state in &file.states {
        if !file.fluids.iter().any(|f| f.id == state.fluid) {
            findings.push(format!(
                "state `{}` references unknown fluid `{}`",
                state.id, state.fluid
            ));
        }
    }

    let t0 = celsius_to_kelvin(file.dead_state.temperature_c);

    // reference consistency: per fluid, h - T0*s - eps must be one constant.
    // The median residual is the robust baseline, so a single corrupted eps
    // is attributed to its own state.
    for fluid in &file.fluids {
        let rows: Vec<(&StateSection, f64)> = file
            .states
            .iter()
            .filter(|s| s.fluid == fluid.id)
            .filter_map(|s| match (s.h_kj_kg, s.s_kj_kgk, s.eps_kj_kg) {
                (Some(h), Some(sv), Some(eps)) => Some((s, h - t0 * sv - eps)),
                _ => None,
            })
            .collect();
        if rows.len() < 2 {
            continue;
        }
        let mut residuals: Vec<f64> = rows.iter().map(|(_, r)| *r).collect();
        residuals.sort_by(f64::total_cmp);
        let median = residuals[residuals.len() / 2];
        let baseline = match &fluid.reference {
            Some(ReferenceSection::Combined { k0 }) => *k0,
            Some(ReferenceSection::Enthalpy { h0, s0 }) => h0 - t0 * s0,
            None => median,
        };
        for (state, residual) in &rows {
            if (residual - baseline).abs() > REFERENCE_TOLERANCE_KJ_KG {
                findings.push(format!(
                    "state `{}`: specific exergy is inconsistent with fluid `{}` reference \
                     (residual deviates by {:.4} kJ/kg)",
                    state.id,
                    fluid.id,
                    (residual - baseline).abs()
                ));
            }
        }
    }

    // mass balance and junction port checks need a graph; reuse the strict
    // builder on a copy with eps columns dropped so an eps defect reported
    // above does not mask flow defects.
    let mut flow_file = file.clone();
    for state in &mut flow_file.states {
        state.eps_kj_kg = None;
        if state.h_kj_kg.is_none() {
            state.h_kj_kg = Some(0.0);
            state.s_kj_kgk = Some(0.0);
        }
    }
    for fluid in &mut flow_file.fluids {
        if fluid.reference.is_none() {
            fluid.reference = Some(ReferenceSection::Combined { k0: 0.0 });
        }
    }
    match build_plant(&flow_file) {
        Ok(loaded) => {
            for violation in loaded.plant.validate_mass_balance() {
                findings.push(violation.to_string());
            }
        }
        Err(err) => {
            // structural errors not already reported above (e.g. port fluid
            // mismatches, junction state mismatches)
            let msg = err.to_string();
            if !findings.iter().any(|f| msg.contains(f.as_str())) {
                findings.push(msg);
            }
        }
    }

    findings
}
