//! Adiabaticity of the tracked qubit levels.
//!
//! β = |ħ⟨m|∂H₀/∂t|n⟩ / (E_m − E_n)²|, with ∂H₀/∂t = V_S ω sin(kz − ωt)
//! evaluated analytically. In natural units ħ = 1 and β is the same number.

use serde::Serialize;

use crate::eigensolver::{matrix_element, EigenPair, Grid, LevelTrajectory};
use crate::params::{DerivedScales, DeviceConfig};
use crate::potential::DevicePotential;
use crate::{Error, Result};

/// Splittings below this (natural units) count as degenerate.
pub const MIN_SPLITTING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticityReport {
    /// SI seconds.
    pub time: f64,
    pub level_m: usize,
    pub level_n: usize,
    pub beta: f64,
    /// E_m − E_n, natural units.
    pub splitting: f64,
}

/// β for an arbitrary time-derivative operator `dv_dt(z)`, natural units.
pub fn adiabaticity_beta_with<F>(pair_m: &EigenPair, pair_n: &EigenPair, grid: &Grid, dv_dt: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let splitting = pair_m.energy - pair_n.energy;
    if splitting.abs() <= MIN_SPLITTING {
        return Err(Error::DegenerateSplitting(splitting));
    }
    let num = matrix_element(pair_m, pair_n, dv_dt, grid)?;
    Ok((num / (splitting * splitting)).abs())
}

/// β at natural time `t` for the device potential.
pub fn adiabaticity_beta(
    pair_m: &EigenPair,
    pair_n: &EigenPair,
    t: f64,
    grid: &Grid,
    potential: &DevicePotential,
) -> Result<f64> {
    adiabaticity_beta_with(pair_m, pair_n, grid, |z| potential.time_derivative(z, t))
}

/// Same as [`adiabaticity_beta`] with ∂H/∂t replaced by the central
/// difference (V(t + δ) − V(t − δ))/2δ.
pub fn adiabaticity_beta_finite_difference(
    pair_m: &EigenPair,
    pair_n: &EigenPair,
    t: f64,
    delta: f64,
    grid: &Grid,
    potential: &DevicePotential,
) -> Result<f64> {
    adiabaticity_beta_with(pair_m, pair_n, grid, |z| {
        (potential.eval(z, t + delta) - potential.eval(z, t - delta)) / (2.0 * delta)
    })
}

/// β(t) between tracked levels 0 and 1 at every trajectory sample.
pub fn adiabaticity_sweep(
    trajectory: &LevelTrajectory,
    config: &DeviceConfig,
    scales: &DerivedScales,
    grid: &Grid,
) -> Result<Vec<AdiabaticityReport>> {
    let potential = DevicePotential::natural(config, scales);
    let units = scales.units();
    trajectory
        .times
        .iter()
        .zip(&trajectory.levels)
        .map(|(&t_si, levels)| {
            if levels.len() < 2 {
                return Err(Error::LevelCount { requested: 2, dim: levels.len() });
            }
            let (m, n) = (&levels[1], &levels[0]);
            let beta = adiabaticity_beta(m, n, units.time_from_si(t_si), grid, &potential)?;
            Ok(AdiabaticityReport {
                time: t_si,
                level_m: 1,
                level_n: 0,
                beta,
                splitting: m.energy - n.energy,
            })
        })
        .collect()
}

pub fn max_beta(reports: &[AdiabaticityReport]) -> f64 {
    reports.iter().map(|r| r.beta).fold(0.0, f64::max)
}
