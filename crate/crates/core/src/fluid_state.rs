//! Fluid state points, the dead-state reference and per-stream exergy.
//!
//! Specific exergy of a stream is `(h - h0) - T0 * (s - s0)` relative to the
//! ambient (dead) state. The engine never evaluates an equation of state:
//! enthalpy and entropy are supplied by the plant file or interpolated from a
//! user-provided property table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `h - T0*s - eps` consistency, reflecting 2-decimal input data.
pub const REFERENCE_TOLERANCE_KJ_KG: f64 = 0.05;

pub const CELSIUS_OFFSET: f64 = 273.15;

pub fn celsius_to_kelvin(t_c: f64) -> f64 {
    t_c + CELSIUS_OFFSET
}

/// Ambient reference condition at which stream exergy is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeadState {
    pub p0_kpa: f64,
    pub t0_k: f64,
}

impl DeadState {
    pub fn new(p0_kpa: f64, t0_k: f64) -> Result<Self> {
        if !(t0_k > 0.0) || !(p0_kpa > 0.0) || !t0_k.is_finite() || !p0_kpa.is_finite() {
            return Err(Error::InvalidDeadState { t0_k, p0_kpa });
        }
        Ok(Self { p0_kpa, t0_k })
    }
}

impl Default for DeadState {
    /// 100 kPa, 288.15 K (1 bar, 15 degC).
    fn default() -> Self {
        Self {
            p0_kpa: 100.0,
            t0_k: 288.15,
        }
    }
}

/// Dead-state reference data for one fluid.
///
/// Either the full `(h0, s0)` pair, or only the combination `k0 = h0 - T0*s0`
/// that specific exergy actually depends on. The combined form is pinned to
/// the `T0` it was derived at and cannot be re-evaluated elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReferenceForm {
    Enthalpy { h0: f64, s0: f64 },
    Combined { k0: f64, t0_k: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidRef {
    pub fluid_id: String,
    pub form: ReferenceForm,
}

impl FluidRef {
    /// Resolve the combined constant `h0 - T0*s0` at the given dead state.
    pub fn k0_at(&self, dead_state: &DeadState) -> Result<f64> {
        match &self.form {
            ReferenceForm::Enthalpy { h0, s0 } => Ok(h0 - dead_state.t0_k * s0),
            ReferenceForm::Combined { k0, t0_k } => {
                if (t0_k - dead_state.t0_k).abs() > 1e-9 {
                    Err(Error::NonSeparableReference {
                        fluid_id: self.fluid_id.clone(),
                        defined_t0_k: *t0_k,
                        requested_t0_k: dead_state.t0_k,
                    })
                } else {
                    Ok(*k0)
                }
            }
        }
    }
}

/// One numbered fluid stream of the plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub id: String,
    pub fluid_id: String,
    pub t_k: f64,
    pub p_kpa: f64,
    pub mdot_kg_s: f64,
    pub h_kj_kg: f64,
    pub s_kj_kgk: f64,
    pub eps_kj_kg: f64,
}

impl StatePoint {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: impl Into<String>,
        fluid_id: impl Into<String>,
        t_k: f64,
        p_kpa: f64,
        mdot_kg_s: f64,
        h_kj_kg: f64,
        s_kj_kgk: f64,
        eps_kj_kg: f64,
    ) -> Result<Self> {
        let id = id.into();
        if !(t_k > 0.0) {
            return Err(Error::InvalidState {
                id,
                reason: format!("temperature {t_k} K is not above absolute zero"),
            });
        }
        if !(p_kpa > 0.0) {
            return Err(Error::InvalidState {
                id,
                reason: format!("pressure {p_kpa} kPa is not positive"),
            });
        }
        if !(mdot_kg_s >= 0.0) {
            return Err(Error::InvalidState {
                id,
                reason: format!("mass flow rate {mdot_kg_s} kg/s is negative"),
            });
        }
        Ok(Self {
            id,
            fluid_id: fluid_id.into(),
            t_k,
            p_kpa,
            mdot_kg_s,
            h_kj_kg,
            s_kj_kgk,
            eps_kj_kg,
        })
    }
}

/// Specific exergy of a stream: `(h - h0) - T0 * (s - s0)`.
pub fn specific_exergy(
    h_kj_kg: f64,
    s_kj_kgk: f64,
    fluid_ref: &FluidRef,
    dead_state: &DeadState,
) -> Result<f64> {
    let k0 = fluid_ref.k0_at(dead_state)?;
    Ok(h_kj_kg - dead_state.t0_k * s_kj_kgk - k0)
}

/// Total exergy flow of a stream in kW: `mdot * eps`.
pub fn exergy_flow(state: &StatePoint) -> f64 {
    state.mdot_kg_s * state.eps_kj_kg
}

/// Derive a combined-form fluid reference from states that carry `eps`.
///
/// Inverts the specific-exergy relation: `k0 = mean(h - T0*s - eps)` over the
/// given states. The max-min spread of that quantity is returned alongside;
/// a spread above [`REFERENCE_TOLERANCE_KJ_KG`] signals inconsistent input.
pub fn derive_fluid_ref(
    fluid_id: &str,
    states: &[&StatePoint],
    dead_state: &DeadState,
) -> Result<(FluidRef, f64)> {
    let residuals: Vec<f64> = states
        .iter()
        .filter(|s| s.fluid_id == fluid_id)
        .map(|s| s.h_kj_kg - dead_state.t0_k * s.s_kj_kgk - s.eps_kj_kg)
        .collect();
    if residuals.is_empty() {
        return Err(Error::EmptyReferenceDerivation {
            fluid_id: fluid_id.to_string(),
        });
    }
    let k0 = residuals.iter().sum::<f64>() / residuals.len() as f64;
    let spread = residuals.iter().cloned().fold(f64::MIN, f64::max)
        - residuals.iter().cloned().fold(f64::MAX, f64::min);
    if spread > REFERENCE_TOLERANCE_KJ_KG {
        return Err(Error::InconsistentReference {
            fluid_id: fluid_id.to_string(),
            spread_kj_kg: spread,
            limit_kj_kg: REFERENCE_TOLERANCE_KJ_KG,
        });
    }
    Ok((
        FluidRef {
            fluid_id: fluid_id.to_string(),
            form: ReferenceForm::Combined {
                k0,
                t0_k: dead_state.t0_k,
            },
        },
        spread,
    ))
}

/// Exergy transfer by heat `Q` crossing the boundary at temperature `T`:
/// `(1 - T0/T) * Q`.
pub fn exergy_of_heat(q_kw: f64, t_k: f64, dead_state: &DeadState) -> Result<f64> {
    if !(t_k > 0.0) {
        return Err(Error::NonPositiveTemperature { t_k });
    }
    Ok((1.0 - dead_state.t0_k / t_k) * q_kw)
}

/// Rectangular p-T grid of (h, s) samples for one fluid.
///
/// Stands in for external property software; queries are answered by bilinear
/// interpolation, exact at grid nodes, with no extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyTable {
    pub fluid_id: String,
    pressures_kpa: Vec<f64>,
    temperatures_k: Vec<f64>,
    // row-major over (pressure, temperature)
    h_kj_kg: Vec<f64>,
    s_kj_kgk: Vec<f64>,
}

impl PropertyTable {
    /// Build from unordered `(p, T, h, s)` samples that must form a full
    /// rectangular grid, strictly monotone on both axes.
    pub fn from_samples(fluid_id: &str, samples: &[(f64, f64, f64, f64)]) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidPropertyTable {
            fluid_id: fluid_id.to_string(),
            reason: reason.to_string(),
        };
        if samples.is_empty() {
            return Err(invalid("no samples"));
        }
        let mut pressures: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let mut temperatures: Vec<f64> = samples.iter().map(|s| s.1).collect();
        pressures.sort_by(f64::total_cmp);
        pressures.dedup();
        temperatures.sort_by(f64::total_cmp);
        temperatures.dedup();
        if pressures.len() * temperatures.len() != samples.len() {
            return Err(invalid("samples do not form a rectangular p-T grid"));
        }
        let np = pressures.len();
        let nt = temperatures.len();
        let mut h = vec![f64::NAN; np * nt];
        let mut s = vec![f64::NAN; np * nt];
        for &(p, t, hv, sv) in samples {
            let i = pressures.iter().position(|&x| x == p).unwrap();
            let j = temperatures.iter().position(|&x| x == t).unwrap();
            if !h[i * nt + j].is_nan() {
                return Err(invalid("duplicate (p, T) sample"));
            }
            h[i * nt + j] = hv;
            s[i * nt + j] = sv;
        }
        if h.iter().any(|v| v.is_nan()) {
            return Err(invalid("samples do not cover the full rectangular grid"));
        }
        Ok(Self {
            fluid_id: fluid_id.to_string(),
            pressures_kpa: pressures,
            temperatures_k: temperatures,
            h_kj_kg: h,
            s_kj_kgk: s,
        })
    }

    /// Bilinear lookup of `(h, s)` at `(p, T)`. Errors outside the grid.
    pub fn lookup(&self, p_kpa: f64, t_k: f64) -> Result<(f64, f64)> {
        let (i, wp) = Self::bracket(&self.pressures_kpa, p_kpa).ok_or(Error::OutsideTable {
            fluid_id: self.fluid_id.clone(),
            p_kpa,
            t_k,
        })?;
        let (j, wt) = Self::bracket(&self.temperatures_k, t_k).ok_or(Error::OutsideTable {
            fluid_id: self.fluid_id.clone(),
            p_kpa,
            t_k,
        })?;
        let nt = self.temperatures_k.len();
        let blend = |grid: &[f64]| {
            let v00 = grid[i * nt + j];
            let v01 = grid[i * nt + j + 1];
            let v10 = grid[(i + 1) * nt + j];
            let v11 = grid[(i + 1) * nt + j + 1];
            (1.0 - wp) * ((1.0 - wt) * v00 + wt * v01) + wp * ((1.0 - wt) * v10 + wt * v11)
        };
        Ok((blend(&self.h_kj_kg), blend(&self.s_kj_kgk)))
    }

    /// Find the cell containing `x`; returns (lower index, weight in [0, 1]).
    fn bracket(axis: &[f64], x: f64) -> Option<(usize, f64)> {
        let n = axis.len();
        if x < axis[0] || x > axis[n - 1] {
            return None;
        }
        if n == 1 {
            return Some((0, 0.0));
        }
        let i = match axis.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let w = (x - axis[i]) / (axis[i + 1] - axis[i]);
        Some((i, w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air_ref() -> FluidRef {
        FluidRef {
            fluid_id: "air".into(),
            form: ReferenceForm::Combined {
                k0: -694.97,
                t0_k: 288.15,
            },
        }
    }

    #[test]
    fn specific_exergy_matches_reference_row() {
        let ds = DeadState::default();
        let eps = specific_exergy(953.85, 4.9019, &air_ref(), &ds).unwrap();
        assert!((eps - 236.34).abs() < 0.02, "eps = {eps}");
    }

    #[test]
    fn specific_exergy_co2_row() {
        let ds = DeadState::default();
        let co2 = FluidRef {
            fluid_id: "co2".into(),
            form: ReferenceForm::Combined {
                k0: -283.63,
                t0_k: 288.15,
            },
        };
        let eps = specific_exergy(298.80, 1.3226, &co2, &ds).unwrap();
        assert!((eps - 201.33).abs() < 0.02, "eps = {eps}");
    }

    #[test]
    fn dead_state_has_zero_exergy() {
        let ds = DeadState::default();
        let (h0, s0) = (400.0, 2.0);
        let fr = FluidRef {
            fluid_id: "x".into(),
            form: ReferenceForm::Enthalpy { h0, s0 },
        };
        assert_eq!(specific_exergy(h0, s0, &fr, &ds).unwrap(), 0.0);
    }

    #[test]
    fn combined_reference_rejects_foreign_t0() {
        let ds = DeadState::new(100.0, 300.0).unwrap();
        let err = specific_exergy(953.85, 4.9019, &air_ref(), &ds).unwrap_err();
        assert!(matches!(err, Error::NonSeparableReference { .. }));
    }

    #[test]
    fn exergy_flow_is_mdot_times_eps() {
        let s = StatePoint::new("1", "air", 805.0, 104.3, 93.8, 953.85, 4.9019, 236.34).unwrap();
        assert!((exergy_flow(&s) - 22168.69).abs() < 0.01);
        let z = StatePoint::new("z", "air", 805.0, 104.3, 0.0, 953.85, 4.9019, 236.34).unwrap();
        assert_eq!(exergy_flow(&z), 0.0);
    }

    #[test]
    fn heat_exergy_carnot_factor() {
        let ds = DeadState::default();
        assert_eq!(exergy_of_heat(100.0, ds.t0_k, &ds).unwrap(), 0.0);
        let x = exergy_of_heat(100.0, 2.0 * ds.t0_k, &ds).unwrap();
        assert!((x - 50.0).abs() < 1e-12);
        assert_eq!(exergy_of_heat(0.0, 400.0, &ds).unwrap(), 0.0);
        assert!(exergy_of_heat(10.0, -5.0, &ds).is_err());
    }

    #[test]
    fn derive_reference_rejects_empty_and_inconsistent() {
        let ds = DeadState::default();
        assert!(matches!(
            derive_fluid_ref("air", &[], &ds),
            Err(Error::EmptyReferenceDerivation { .. })
        ));
        let a = StatePoint::new("1", "air", 805.0, 104.3, 93.8, 953.85, 4.9019, 236.34).unwrap();
        let mut b = a.clone();
        b.id = "2".into();
        b.eps_kj_kg += 1.0; // breaks the shared reference constant
        let refs: Vec<&StatePoint> = vec![&a, &b];
        assert!(matches!(
            derive_fluid_ref("air", &refs, &ds),
            Err(Error::InconsistentReference { .. })
        ));
    }

    #[test]
    fn state_invariants_enforced() {
        assert!(StatePoint::new("1", "air", -1.0, 104.3, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(StatePoint::new("1", "air", 300.0, 0.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(StatePoint::new("1", "air", 300.0, 104.3, -1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn table_exact_at_nodes_and_linear_between() {
        let samples = [
            (100.0, 300.0, 10.0, 1.0),
            (100.0, 400.0, 20.0, 2.0),
            (200.0, 300.0, 30.0, 3.0),
            (200.0, 400.0, 40.0, 4.0),
        ];
        let t = PropertyTable::from_samples("x", &samples).unwrap();
        for &(p, tk, h, s) in &samples {
            assert_eq!(t.lookup(p, tk).unwrap(), (h, s));
        }
        // midpoint of an h-linear edge
        let (h, _) = t.lookup(100.0, 350.0).unwrap();
        assert!((h - 15.0).abs() < 1e-12);
        // constant field stays constant
        let flat = [
            (100.0, 300.0, 7.0, 1.0),
            (100.0, 400.0, 7.0, 2.0),
            (200.0, 300.0, 7.0, 3.0),
            (200.0, 400.0, 7.0, 4.0),
        ];
        let tf = PropertyTable::from_samples("x", &flat).unwrap();
        let (h, _) = tf.lookup(150.0, 350.0).unwrap();
        assert!((h - 7.0).abs() < 1e-12);
        assert!(matches!(
            t.lookup(50.0, 350.0),
            Err(Error::OutsideTable { .. })
        ));
    }

    #[test]
    fn table_rejects_ragged_grid() {
        let samples = [
            (100.0, 300.0, 10.0, 1.0),
            (100.0, 400.0, 20.0, 2.0),
            (200.0, 300.0, 30.0, 3.0),
        ];
        assert!(PropertyTable::from_samples("x", &samples).is_err());
    }
}
