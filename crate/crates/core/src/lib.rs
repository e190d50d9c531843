//! Second-law (exergy) analysis of thermodynamic plants declared as networks
//! of fluid state points and components.
//!
//! A plant is a graph of numbered stream states (each carrying temperature,
//! pressure, mass flow, enthalpy, entropy and specific exergy) wired through
//! heat exchangers, turbines, compressors and loss-free junctions. The engine
//! validates the network, evaluates every component's exergy balance, and
//! reports whole-system destruction, useful power and both efficiency forms.
//! It analyzes given states; it does not solve cycles or evaluate equations
//! of state.
//!
//! The crate ships an embedded reference dataset (a marine waste-heat
//! recovery CO2 closed-cycle gas turbine plant) under [`reference`], and a
//! CLI (`exergy analyze | sweep | validate`) on top of the library.

pub mod components;
pub mod error;
pub mod fluid_state;
pub mod plant;
pub mod plant_file;
pub mod reference;
pub mod report;

pub use error::{Error, Result};
pub use fluid_state::{DeadState, FluidRef, PropertyTable, StatePoint};
pub use plant::{ExergyReport, PlantGraph};
pub use report::{OutputFormat, SweepSeries};
