//! Report rendering and dead-state sensitivity sweeps.

use std::fmt::Write as _;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluid_state::{specific_exergy, DeadState, FluidRef, PropertyTable, ReferenceForm};
use crate::plant::{ExergyReport, PlantGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Render a report deterministically in the requested format.
///
/// The table format rounds to the 2-decimal reporting precision of the input
/// data; CSV and JSON carry full-precision values.
pub fn render_report(report: &ExergyReport, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Table => render_table(report),
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
    })
}

fn render_table(report: &ExergyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Exergy analysis at dead state p0 = {} kPa, T0 = {} K",
        report.dead_state.p0_kpa, report.dead_state.t0_k
    );
    let groups = [
        ("Heat exchangers", vec!["heat_exchanger"]),
        ("Turbomachinery", vec!["turbine", "compressor"]),
        ("Junctions", vec!["splitter", "merger"]),
    ];
    for (title, kinds) in groups {
        let rows: Vec<_> = report
            .components
            .iter()
            .filter(|c| kinds.contains(&c.kind.as_str()))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(out, "\n{title}");
        let _ = writeln!(
            out,
            "  {:<10} {:>12} {:>12} {:>12} {:>10} {:>12}",
            "id", "ex_in [kW]", "ex_out [kW]", "ex_d [kW]", "eta_x [%]", "P [kW]"
        );
        for row in rows {
            let power = row
                .power_kw
                .map(|p| format!("{p:.2}"))
                .unwrap_or_else(|| "-".to_string());
            let eta = row
                .eta_x
                .map(|e| format!("{:.2}", e * 100.0))
                .unwrap_or_else(|| "-".to_string());
            let _ = writeln!(
                out,
                "  {:<10} {:>12.2} {:>12.2} {:>12.2} {:>10} {:>12}",
                row.id, row.ex_in_kw, row.ex_out_kw, row.ex_d_kw, eta, power
            );
        }
    }
    let s = &report.system;
    let _ = writeln!(out, "\nWhole system");
    let _ = writeln!(out, "  exergy input               {:>12.2} kW", s.ex_in_kw);
    let _ = writeln!(out, "  exergy output              {:>12.2} kW", s.ex_out_kw);
    let _ = writeln!(out, "  exergy destruction         {:>12.2} kW", s.ex_d_kw);
    let _ = writeln!(
        out,
        "  useful power               {:>12.2} kW{}",
        report.useful_power_kw,
        if report.net_consuming_shaft {
            "  (warning: net-consuming shaft)"
        } else {
            ""
        }
    );
    let _ = writeln!(
        out,
        "  functional efficiency      {:>12.2} %",
        s.eta_functional * 100.0
    );
    let _ = writeln!(
        out,
        "  gross efficiency           {:>12.2} %",
        s.eta_gross * 100.0
    );
    let _ = writeln!(
        out,
        "  component destruction sum  {:>12.2} kW",
        s.component_sum_kw
    );
    let _ = writeln!(
        out,
        "  closure residual           {:>12.2e} kW",
        s.closure_residual_kw
    );
    out
}

fn render_csv(report: &ExergyReport) -> String {
    let mut out = String::from("id,kind,ex_in_kw,ex_out_kw,ex_d_kw,eta_x,power_kw\n");
    for row in &report.components {
        let power = row.power_kw.map(|p| p.to_string()).unwrap_or_default();
        let eta = row.eta_x.map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.id, row.kind, row.ex_in_kw, row.ex_out_kw, row.ex_d_kw, eta, power
        );
    }
    let s = &report.system;
    let _ = writeln!(
        out,
        "system,whole_system,{},{},{},{},{}",
        s.ex_in_kw, s.ex_out_kw, s.ex_d_kw, s.eta_functional, report.useful_power_kw
    );
    let _ = writeln!(
        out,
        "system_gross,whole_system,{},{},{},{},",
        s.ex_in_kw, s.ex_out_kw, s.ex_d_kw, s.eta_gross
    );
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// `h0`, `s0` pinned at their supplied values for every swept `T0`.
    FixedReference,
    /// `h0(p0, T0)`, `s0(p0, T0)` re-read from the property table per point.
    TableEvaluated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t0_k: f64,
    pub report: ExergyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub mode: SweepMode,
    pub p0_kpa: f64,
    pub points: Vec<SweepPoint>,
}

fn sweep_mode(
    plant: &PlantGraph,
    tables: &IndexMap<String, PropertyTable>,
) -> Result<SweepMode> {
    if plant
        .fluid_refs()
        .keys()
        .all(|fluid| tables.contains_key(fluid))
    {
        return Ok(SweepMode::TableEvaluated);
    }
    for (fluid, fluid_ref) in plant.fluid_refs() {
        if !matches!(fluid_ref.form, ReferenceForm::Enthalpy { .. }) && !tables.contains_key(fluid)
        {
            return Err(Error::UnsweepableFluid {
                fluid_id: fluid.clone(),
            });
        }
    }
    Ok(SweepMode::FixedReference)
}

/// Re-evaluate every state's specific exergy at a different dead state.
pub fn reevaluate_at(
    plant: &PlantGraph,
    tables: &IndexMap<String, PropertyTable>,
    dead_state: DeadState,
) -> Result<PlantGraph> {
    let mode = sweep_mode(plant, tables)?;
    let mut fluid_refs = IndexMap::new();
    for (fluid, fluid_ref) in plant.fluid_refs() {
        let form = match mode {
            SweepMode::TableEvaluated => {
                let (h0, s0) = tables[fluid].lookup(dead_state.p0_kpa, dead_state.t0_k)?;
                ReferenceForm::Enthalpy { h0, s0 }
            }
            SweepMode::FixedReference => fluid_ref.form.clone(),
        };
        fluid_refs.insert(
            fluid.clone(),
            FluidRef {
                fluid_id: fluid.clone(),
                form,
            },
        );
    }
    let mut states = plant.states().clone();
    for state in states.values_mut() {
        state.eps_kj_kg = specific_exergy(
            state.h_kj_kg,
            state.s_kj_kgk,
            &fluid_refs[&state.fluid_id],
            &dead_state,
        )?;
    }
    PlantGraph::new(
        states,
        plant.components().clone(),
        plant.boundary().clone(),
        dead_state,
        fluid_refs,
    )
}

/// Run the full analysis at each `T0`, holding `p0` fixed.
///
/// Temperatures must be strictly increasing. The point at the plant's own
/// dead state reuses the direct analysis unchanged.
pub fn sweep_dead_state(
    plant: &PlantGraph,
    tables: &IndexMap<String, PropertyTable>,
    t0_values_k: &[f64],
    p0_kpa: f64,
) -> Result<SweepSeries> {
    if t0_values_k.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::UnorderedSweep);
    }
    let mode = sweep_mode(plant, tables)?;
    let mut points = Vec::with_capacity(t0_values_k.len());
    for &t0 in t0_values_k {
        let baseline = plant.dead_state();
        let report = if t0 == baseline.t0_k && p0_kpa == baseline.p0_kpa {
            plant.analyze()?
        } else {
            reevaluate_at(plant, tables, DeadState::new(p0_kpa, t0)?)?.analyze()?
        };
        points.push(SweepPoint { t0_k: t0, report });
    }
    Ok(SweepSeries {
        mode,
        p0_kpa,
        points,
    })
}

/// Render a sweep series; per-point whole-system summaries for the text
/// formats, the full series for JSON.
pub fn render_sweep(series: &SweepSeries, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(series).expect("series serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "t0_k,ex_in_kw,ex_out_kw,ex_d_kw,eta_functional,eta_gross,useful_power_kw,closure_residual_kw\n",
            );
            for p in &series.points {
                let s = &p.report.system;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    p.t0_k,
                    s.ex_in_kw,
                    s.ex_out_kw,
                    s.ex_d_kw,
                    s.eta_functional,
                    s.eta_gross,
                    p.report.useful_power_kw,
                    s.closure_residual_kw
                );
            }
            out
        }
        OutputFormat::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "Dead-state sweep at p0 = {} kPa ({} mode)",
                series.p0_kpa,
                match series.mode {
                    SweepMode::FixedReference => "fixed-reference",
                    SweepMode::TableEvaluated => "table-evaluated",
                }
            );
            let _ = writeln!(
                out,
                "  {:>8} {:>12} {:>12} {:>12} {:>10} {:>10} {:>12}",
                "T0 [K]", "ex_in [kW]", "ex_out [kW]", "ex_d [kW]", "eta_f [%]", "eta_g [%]", "P_use [kW]"
            );
            for p in &series.points {
                let s = &p.report.system;
                let _ = writeln!(
                    out,
                    "  {:>8.2} {:>12.2} {:>12.2} {:>12.2} {:>10.2} {:>10.2} {:>12.2}",
                    p.t0_k,
                    s.ex_in_kw,
                    s.ex_out_kw,
                    s.ex_d_kw,
                    s.eta_functional * 100.0,
                    s.eta_gross * 100.0,
                    p.report.useful_power_kw
                );
            }
            out
        }
    })
}
