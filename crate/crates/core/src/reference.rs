//! Embedded reference dataset: the 24-state, 14-component marine waste-heat
//! recovery CO2 closed-cycle plant, shipped with the crate so analyses and
//! tests run hermetically.

use crate::error::Result;
use crate::plant::PlantGraph;
use crate::plant_file::{load_plant_str, LoadedPlant};

pub const REFERENCE_PLANT_JSON: &str = include_str!("../data/reference_plant.json");

pub fn load() -> Result<LoadedPlant> {
    load_plant_str(REFERENCE_PLANT_JSON, "embedded reference plant")
}

pub fn plant() -> Result<PlantGraph> {
    Ok(load()?.plant)
}
