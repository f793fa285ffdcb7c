//! The single-qubit pipeline evaluated over one SAW period and at the
//! representative time t*.

use num_complex::Complex64;
use serde::Serialize;

use crate::adiabatic::{adiabaticity_sweep, max_beta, AdiabaticityReport};
use crate::dynamics::{
    extract_rabi_period, integrate_rabi, rabi_coefficients, rabi_coefficients_literal, RabiParameters, RabiPeriod,
    RabiTrajectory,
};
use crate::eigensolver::{
    classify_bound, device_grid, period_samples, strongest_confinement, track_levels, BoundClass, Grid, LevelTrajectory,
};
use crate::params::{derive_scales, DerivedScales, DeviceConfig, PhysicalConstants};
use crate::potential::DevicePotential;
use crate::twoqubit::{dot_matrix_elements, ZMatrixElements};
use crate::{Execution, Result};

/// Default number of samples over the SAW period.
pub const PERIOD_SAMPLES: usize = 64;
/// Default grid size.
pub const GRID_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    pub grid_points: usize,
    pub period_samples: usize,
    /// Levels tracked over the period (at least 2).
    pub levels: usize,
    pub execution: Execution,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self { grid_points: GRID_POINTS, period_samples: PERIOD_SAMPLES, levels: 3, execution: Execution::default() }
    }
}

#[derive(Debug, Clone)]
pub struct QubitAnalysis {
    pub config: DeviceConfig,
    pub scales: DerivedScales,
    pub grid: Grid,
    pub trajectory: LevelTrajectory,
    pub t_star_index: usize,
    pub beta: Vec<AdiabaticityReport>,
}

/// SI summary of the levels at t*.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentativeLevels {
    pub t_star_s: f64,
    pub energies_j: Vec<f64>,
    pub splitting_j: f64,
    pub beta: f64,
    pub max_beta: f64,
    pub bound: Vec<BoundClass>,
    pub z_elements: ZMatrixElements,
}

impl QubitAnalysis {
    pub fn run(config: &DeviceConfig, constants: &PhysicalConstants, settings: &AnalysisSettings) -> Result<Self> {
        let scales = derive_scales(config, constants)?;
        let grid = device_grid(config, settings.grid_points)?;
        let times = period_samples(&scales, settings.period_samples);
        let trajectory = track_levels(&times, config, &scales, &grid, settings.levels.max(2), settings.execution)?;
        let t_star = representative_time(config, constants, settings)?;
        let t_star_index = times.iter().position(|&t| t == t_star).unwrap_or(0);
        let beta = adiabaticity_sweep(&trajectory, config, &scales, &grid)?;
        Ok(Self { config: *config, scales, grid, trajectory, t_star_index, beta })
    }

    /// Like [`QubitAnalysis::run`] but solving only the single SI time `t`,
    /// which then plays the role of t*.
    pub fn run_at(config: &DeviceConfig, constants: &PhysicalConstants, settings: &AnalysisSettings, t: f64) -> Result<Self> {
        let scales = derive_scales(config, constants)?;
        let grid = device_grid(config, settings.grid_points)?;
        let trajectory = track_levels(&[t], config, &scales, &grid, settings.levels.max(2), settings.execution)?;
        let beta = adiabaticity_sweep(&trajectory, config, &scales, &grid)?;
        Ok(Self { config: *config, scales, grid, trajectory, t_star_index: 0, beta })
    }

    /// Solve only at t*, chosen among `settings.period_samples` samples.
    pub fn run_representative(config: &DeviceConfig, constants: &PhysicalConstants, settings: &AnalysisSettings) -> Result<Self> {
        let t = representative_time(config, constants, settings)?;
        Self::run_at(config, constants, settings, t)
    }

    pub fn t_star(&self) -> f64 {
        self.trajectory.times[self.t_star_index]
    }

    /// Energy of tracked level `n` at t*, J.
    pub fn energy(&self, n: usize) -> f64 {
        self.scales.units().energy_to_si(self.trajectory.levels[self.t_star_index][n].energy)
    }

    pub fn splitting(&self) -> f64 {
        self.energy(1) - self.energy(0)
    }

    pub fn beta_star(&self) -> f64 {
        self.beta[self.t_star_index].beta
    }

    pub fn max_beta(&self) -> f64 {
        max_beta(&self.beta)
    }

    /// Position elements of the qubit levels at t*, m.
    pub fn z_elements(&self) -> Result<ZMatrixElements> {
        let lv = &self.trajectory.levels[self.t_star_index];
        Ok(dot_matrix_elements(&lv[0], &lv[1], &self.grid)?.scaled(self.scales.natural_length))
    }

    pub fn bound_classes(&self) -> Result<Vec<BoundClass>> {
        let w = self.trajectory.windows[self.t_star_index];
        self.trajectory.levels[self.t_star_index].iter().map(|p| classify_bound(p, &self.grid, w.center, w.width)).collect()
    }

    pub fn representative(&self) -> Result<RepresentativeLevels> {
        let n = self.trajectory.levels[self.t_star_index].len();
        Ok(RepresentativeLevels {
            t_star_s: self.t_star(),
            energies_j: (0..n).map(|i| self.energy(i)).collect(),
            splitting_j: self.splitting(),
            beta: self.beta_star(),
            max_beta: self.max_beta(),
            bound: self.bound_classes()?,
            z_elements: self.z_elements()?,
        })
    }

    /// Two-level drive parameters at t* with resonant ω = ω₁ − ω₀.
    /// `literal` selects the cosh²-denominator coupling.
    pub fn rabi_parameters(&self, constants: &PhysicalConstants, literal: bool) -> Result<RabiParameters> {
        let lv = &self.trajectory.levels[self.t_star_index];
        let rate = self.scales.drive_amplitude(&self.config) / constants.hbar;
        let d = if literal {
            rabi_coefficients_literal(&lv[0], &lv[1], rate, 1.0, &self.grid)?
        } else {
            rabi_coefficients(&lv[0], &lv[1], rate, 1.0, &self.grid)?
        };
        let omega0 = self.energy(0) / constants.hbar;
        let omega1 = self.energy(1) / constants.hbar;
        Ok(RabiParameters { omega0, omega1, omega_drive: omega1 - omega0, d })
    }
}

/// t* in SI seconds: the sample of strongest confinement over one period.
pub fn representative_time(config: &DeviceConfig, constants: &PhysicalConstants, settings: &AnalysisSettings) -> Result<f64> {
    let scales = derive_scales(config, constants)?;
    let grid = device_grid(config, settings.grid_points)?;
    let times = period_samples(&scales, settings.period_samples);
    let units = scales.units();
    let natural: Vec<f64> = times.iter().map(|&t| units.time_from_si(t)).collect();
    let potential = DevicePotential::natural(config, &scales);
    Ok(times[strongest_confinement(&potential, &grid, &natural)])
}

/// Integrate from |0⟩ over `duration` at the default step.
pub fn rabi_run(params: &RabiParameters, duration: f64, max_samples: usize) -> Result<RabiTrajectory> {
    integrate_rabi(params, duration, params.default_step(), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), max_samples)
}

/// Four bare Rabi cycles 2π/|D₀₁|, or `fallback` when D₀₁ = 0.
pub fn default_rabi_duration(params: &RabiParameters, fallback: f64) -> f64 {
    let d01 = params.d[0][1].abs();
    if d01 > 0.0 {
        4.0 * 2.0 * std::f64::consts::PI / d01
    } else {
        fallback
    }
}

pub fn rabi_period(params: &RabiParameters, duration: f64) -> Result<(RabiPeriod, RabiTrajectory)> {
    let traj = rabi_run(params, duration, 20_000)?;
    Ok((extract_rabi_period(&traj)?, traj))
}
