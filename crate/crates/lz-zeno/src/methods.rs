//! Method dispatch shared by the CLI and the test suites.

use crate::adiabatic::{analytic_seed, optimize_large_gamma};
use crate::antiadiabatic::optimize_small_gamma;
use crate::dp_exact::{optimize_dp, GridSpec};
use crate::error::{LzError, Result};
use crate::lz_core::{Coupling, EvolutionTable};
use crate::objective::{
    delta_phi_from_propagator, transition_probability, upper_bound, Diagnostics,
    MeasurementSchedule, Method, OptimizationResult,
};

/// Method requested by the user; `Auto` routes small gamma to the
/// anti-adiabatic pipeline and everything else to the adiabatic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    Dp,
    Antiadiabatic,
    Adiabatic,
}

impl std::str::FromStr for MethodChoice {
    type Err = LzError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "dp" => Ok(Self::Dp),
            "antiadiabatic" => Ok(Self::Antiadiabatic),
            "adiabatic" => Ok(Self::Adiabatic),
            other => Err(LzError::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// The gamma threshold below which `Auto` selects the small-gamma pipeline.
pub const AUTO_GAMMA_SPLIT: f64 = 0.5;

impl MethodChoice {
    pub fn resolve(self, gamma: f64) -> Method {
        match self {
            MethodChoice::Dp => Method::Dp,
            MethodChoice::Antiadiabatic => Method::Antiadiabatic,
            MethodChoice::Adiabatic => Method::Adiabatic,
            MethodChoice::Auto => {
                if gamma <= AUTO_GAMMA_SPLIT {
                    Method::Antiadiabatic
                } else {
                    Method::Adiabatic
                }
            }
        }
    }
}

/// Dense-table extent wide enough for the small-gamma schedules (reference
/// instants reach |t| ~ 7.1) plus refinement headroom.
const SMALL_GAMMA_EXTENT: f64 = 12.0;
const TABLE_STEP: f64 = 0.01;

/// Build the evolution table an optimizer for (gamma, n) needs.
pub fn evolution_table_for(c: &Coupling, n: usize) -> Result<EvolutionTable> {
    let mut extent = SMALL_GAMMA_EXTENT;
    if c.gamma() > 0.0 && n >= 1 {
        let seed = analytic_seed(c, n)?;
        let reach = seed
            .schedule
            .instants()
            .iter()
            .zip(seed.radii.iter())
            .map(|(t, r)| t.abs() + r.min(2.0 * std::f64::consts::PI / c.gamma().sqrt()))
            .fold(0.0, f64::max);
        extent = extent.max(reach + 2.0);
    }
    EvolutionTable::build(c, extent, TABLE_STEP)
}

/// Run one optimization. `n = 0` evaluates the bare transition probability.
pub fn optimize(
    c: &Coupling,
    n: usize,
    method: MethodChoice,
    rng_seed: u64,
    grid: &GridSpec,
) -> Result<OptimizationResult> {
    let resolved = method.resolve(c.gamma());
    if n == 0 {
        let schedule = MeasurementSchedule::new(*c, Vec::new())?;
        let probability = transition_probability(&schedule)?;
        let bound = upper_bound(0, delta_phi_from_propagator(c)?)?;
        return Ok(OptimizationResult {
            schedule,
            probability,
            method: resolved,
            bound,
            diagnostics: Diagnostics { converged: true, ..Default::default() },
        });
    }
    if c.gamma() == 0.0 {
        // Degenerate coupling: populations never change, P = 1 regardless.
        let schedule = MeasurementSchedule::new(*c, vec![0.0; n])?;
        let probability = transition_probability(&schedule)?;
        return Ok(OptimizationResult {
            schedule,
            probability,
            method: resolved,
            bound: 1.0,
            diagnostics: Diagnostics { converged: true, ..Default::default() },
        });
    }
    match resolved {
        Method::Dp => optimize_dp(c, n, grid),
        Method::Antiadiabatic => {
            let table = evolution_table_for(c, n)?;
            optimize_small_gamma(&table, n)
        }
        Method::Adiabatic => {
            let table = evolution_table_for(c, n)?;
            optimize_large_gamma(&table, n, rng_seed)
        }
    }
}

/// Same as [`optimize`] but reusing a prebuilt table for the asymptotic
/// methods (the DP method still builds its own grid-aligned table).
pub fn optimize_with_table(
    table: &EvolutionTable,
    n: usize,
    method: MethodChoice,
    rng_seed: u64,
    grid: &GridSpec,
) -> Result<OptimizationResult> {
    let c = table.coupling();
    let resolved = method.resolve(c.gamma());
    if n == 0 {
        return optimize(c, 0, method, rng_seed, grid);
    }
    match resolved {
        Method::Dp => optimize_dp(c, n, grid),
        Method::Antiadiabatic => optimize_small_gamma(table, n),
        Method::Adiabatic => optimize_large_gamma(table, n, rng_seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_routing() {
        assert_eq!(MethodChoice::Auto.resolve(0.1), Method::Antiadiabatic);
        assert_eq!(MethodChoice::Auto.resolve(0.5), Method::Antiadiabatic);
        assert_eq!(MethodChoice::Auto.resolve(0.51), Method::Adiabatic);
        assert_eq!(MethodChoice::Dp.resolve(0.1), Method::Dp);
        assert!("bogus".parse::<MethodChoice>().is_err());
        assert_eq!("dp".parse::<MethodChoice>().unwrap(), MethodChoice::Dp);
    }

    #[test]
    fn zero_measurements_returns_lz_value() {
        let c = Coupling::new(1.0).unwrap();
        let res =
            optimize(&c, 0, MethodChoice::Auto, 7, &GridSpec::default_range()).unwrap();
        assert!(res.schedule.is_empty());
        assert!((res.probability - (-2.0 * std::f64::consts::PI).exp()).abs() < 1e-4);
        assert!((res.probability - res.bound).abs() < 1e-3);
    }
}
