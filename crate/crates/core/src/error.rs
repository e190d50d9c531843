use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dead state requires T0 > 0 K and p0 > 0 kPa (got T0 = {t0_k} K, p0 = {p0_kpa} kPa)")]
    InvalidDeadState { t0_k: f64, p0_kpa: f64 },

    #[error("state `{id}`: {reason}")]
    InvalidState { id: String, reason: String },

    #[error(
        "fluid `{fluid_id}`: combined reference constant is pinned to T0 = {defined_t0_k} K \
         and cannot be evaluated at T0 = {requested_t0_k} K"
    )]
    NonSeparableReference {
        fluid_id: String,
        defined_t0_k: f64,
        requested_t0_k: f64,
    },

    #[error("fluid `{fluid_id}`: no states with h, s and eps available to derive a reference")]
    EmptyReferenceDerivation { fluid_id: String },

    #[error(
        "fluid `{fluid_id}`: reference residual spread {spread_kj_kg:.4} kJ/kg exceeds \
         {limit_kj_kg} kJ/kg; input data is inconsistent"
    )]
    InconsistentReference {
        fluid_id: String,
        spread_kj_kg: f64,
        limit_kj_kg: f64,
    },

    #[error(
        "state `{id}`: supplied specific exergy {supplied_kj_kg} kJ/kg differs from computed \
         {computed_kj_kg:.4} kJ/kg by more than {limit_kj_kg} kJ/kg"
    )]
    ExergyMismatch {
        id: String,
        supplied_kj_kg: f64,
        computed_kj_kg: f64,
        limit_kj_kg: f64,
    },

    #[error("exergy of heat transfer requires T > 0 K (got {t_k} K)")]
    NonPositiveTemperature { t_k: f64 },

    #[error("property table for fluid `{fluid_id}`: {reason}")]
    InvalidPropertyTable { fluid_id: String, reason: String },

    #[error(
        "property lookup (p = {p_kpa} kPa, T = {t_k} K) outside the grid of fluid `{fluid_id}`; \
         no extrapolation"
    )]
    OutsideTable {
        fluid_id: String,
        p_kpa: f64,
        t_k: f64,
    },

    #[error("component `{id}`: mass flow mismatch between ports ({left} kg/s vs {right} kg/s)")]
    MassFlowMismatch { id: String, left: f64, right: f64 },

    #[error("component `{id}`: fluid mismatch between ports (`{left}` vs `{right}`)")]
    FluidMismatch {
        id: String,
        left: String,
        right: String,
    },

    #[error("component `{id}`: exergy input {ex_in_kw:.4} kW is not positive; efficiency undefined")]
    DegenerateBalance { id: String, ex_in_kw: f64 },

    #[error(
        "component `{id}`: exergy efficiency {eta_pct:.2}% exceeds 100%; input data violates \
         the second law"
    )]
    SecondLawViolation { id: String, eta_pct: f64 },

    #[error("component `{id}` references unknown state `{state_id}`")]
    UnknownState { id: String, state_id: String },

    #[error("boundary references unknown component `{id}`")]
    UnknownComponent { id: String },

    #[error("state `{id}` is not wired to any component port")]
    OrphanState { id: String },

    #[error("duplicate {section} id `{id}`")]
    DuplicateId { section: String, id: String },

    #[error("state `{id}` references unknown fluid `{fluid_id}`")]
    UnknownFluid { id: String, fluid_id: String },

    #[error("plant has no components")]
    EmptyPlant,

    #[error("plant failed validation:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),

    #[error("whole-system efficiency denominator is not positive ({denom_kw:.4} kW)")]
    ZeroNetBoundaryExergy { denom_kw: f64 },

    #[error("fluid `{fluid_id}` has neither an (h0, s0) reference nor a property table; cannot sweep the dead state")]
    UnsweepableFluid { fluid_id: String },

    #[error("sweep temperatures must be strictly increasing")]
    UnorderedSweep,

    #[error("unknown output format `{0}`; expected table, csv or json")]
    UnknownFormat(String),

    #[error("failed to read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in `{path}` at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
