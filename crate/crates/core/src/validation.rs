//! Built-in oracle suite and comparison against the published numbers.
//!
//! Oracles have closed-form answers and decide pass/fail. Published-number
//! comparisons are reported alongside but never fail the suite.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::adiabatic::{adiabaticity_beta, adiabaticity_beta_finite_difference};
use crate::analysis::{default_rabi_duration, rabi_period, AnalysisSettings, QubitAnalysis};
use crate::dynamics::{integrate_rabi, rwa_population, RabiParameters};
use crate::eigensolver::{build_hamiltonian, device_grid, solve_lowest, track_levels, Grid};
use crate::params::{derive_scales, thermal_ratio, DeviceConfig, PhysicalConstants, PRINTED_MASS_RATIO, STANDARD_GAAS_MASS_RATIO};
use crate::potential::{coulomb_force, coulomb_potential_exact, coulomb_potential_quadratic, DevicePotential};
use crate::{Execution, Result};

/// Relative tolerance on oracle eigenvalues.
pub const SPECTRUM_TOLERANCE: f64 = 1e-4;
pub const EXPECTED_ORDER: f64 = 2.0;
pub const ORDER_TOLERANCE: f64 = 0.1;

/// Published values.
pub mod reference {
    /// ħω of the qubit, J.
    pub const SPLITTING: f64 = 8.3667e-23;
    pub const E0: f64 = -3.57e-23;
    pub const E1: f64 = 4.80e-23;
    pub const BETA: f64 = 0.0289;
    /// Rabi period, s.
    pub const RABI_PERIOD: f64 = 0.32e-9;
    /// SAW transit time t = T, s.
    pub const TRANSIT_TIME: f64 = 0.34e-9;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    /// NaN (null in JSON) when the computation itself failed.
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl OracleCheck {
    fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, passed: measured <= tolerance, note: None }
    }

    fn within(name: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: (measured - target).abs() <= tolerance,
            note: Some(format!("target {target}")),
        }
    }

    fn failed(name: &str, tolerance: f64, err: &crate::Error) -> Self {
        Self { name: name.into(), measured: f64::NAN, tolerance, passed: false, note: Some(err.to_string()) }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Pöschl–Teller well −U₀ sech²(z) with U₀ = s(s+1), s = 3, in units
/// where the kinetic term is −∂²: E_n = −(s − n)².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoschlTellerResult {
    pub relative_errors: Vec<f64>,
    /// log₂ of the error ratio between `n` and `2n − 1` points (h halved).
    pub orders: Vec<f64>,
}

pub const POSCHL_TELLER_DEPTH: f64 = 12.0;

pub fn poschl_teller_energy(depth: f64, n: usize) -> f64 {
    let s = 0.5 * (-1.0 + (1.0 + 4.0 * depth).sqrt());
    -(s - n as f64).powi(2)
}

fn poschl_teller_errors(n_points: usize) -> Result<Vec<f64>> {
    let g = Grid::new(-10.0, 10.0, n_points)?;
    let h = build_hamiltonian(&g, |z| -POSCHL_TELLER_DEPTH / z.cosh().powi(2), 1.0)?;
    let p = solve_lowest(&h, 3, &g)?;
    Ok(p.iter().enumerate().map(|(n, e)| rel(e.energy, poschl_teller_energy(POSCHL_TELLER_DEPTH, n))).collect())
}

pub fn poschl_teller_oracle(n_points: usize) -> Result<PoschlTellerResult> {
    let coarse = poschl_teller_errors(n_points)?;
    let fine = poschl_teller_errors(2 * n_points - 1)?;
    let orders = coarse.iter().zip(&fine).map(|(c, f)| (c / f).log2()).collect();
    Ok(PoschlTellerResult { relative_errors: coarse, orders })
}

/// Free particle between walls at one spacing outside the grid ends,
/// width L = (n + 1)h: E_n = (nπ/L)². Worst relative error of levels 1–3.
pub fn box_oracle(n_points: usize) -> Result<f64> {
    let g = Grid::new(0.0, 1.0, n_points)?;
    let h = build_hamiltonian(&g, |_| 0.0, 1.0)?;
    let p = solve_lowest(&h, 3, &g)?;
    let width = (n_points + 1) as f64 * g.spacing;
    Ok(p.iter().enumerate().map(|(i, e)| rel(e.energy, ((i + 1) as f64 * PI / width).powi(2))).fold(0.0, f64::max))
}

/// V = z² with −∂² kinetic term: levels 2n + 1, spacing 2. Worst relative
/// deviation of the four spacings among the lowest five levels.
pub fn harmonic_oracle(n_points: usize) -> Result<f64> {
    let g = Grid::new(-10.0, 10.0, n_points)?;
    let h = build_hamiltonian(&g, |z| z * z, 1.0)?;
    let p = solve_lowest(&h, 5, &g)?;
    Ok(p.windows(2).map(|w| rel(w[1].energy - w[0].energy, 2.0)).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RwaOracleResult {
    pub max_abs_error: f64,
    pub norm_drift: f64,
}

/// Resonant synthetic two-level problem with D₀₁/ω = 10⁻⁴ against
/// sin²(D₀₁t/2), over one Rabi period.
pub fn rwa_oracle() -> Result<RwaOracleResult> {
    let ratio = 1e-4;
    let p = RabiParameters { omega0: 0.0, omega1: 1.0, omega_drive: 1.0, d: [[0.0, ratio], [ratio, 0.0]] };
    let traj = integrate_rabi(&p, 2.0 * PI / ratio, p.default_step(), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), 5000)?;
    let max_abs_error = traj
        .times
        .iter()
        .zip(&traj.p1)
        .map(|(&t, &p1)| (p1 - rwa_population(ratio, 0.0, t)).abs())
        .fold(0.0, f64::max);
    Ok(RwaOracleResult { max_abs_error, norm_drift: traj.norm_drift })
}

/// Relative gap between the analytic-derivative β and the central
/// difference of the potential with δ = T/10⁶, default device at 0.17 ns.
pub fn finite_difference_beta_oracle(n_points: usize) -> Result<f64> {
    let cfg = DeviceConfig::default();
    let s = derive_scales(&cfg, &PhysicalConstants::CODATA)?;
    let g = device_grid(&cfg, n_points)?;
    let p = DevicePotential::natural(&cfg, &s);
    let t_si = 0.17e-9;
    let traj = track_levels(&[t_si], &cfg, &s, &g, 2, Execution::Sequential)?;
    let (m, n) = (&traj.levels[0][1], &traj.levels[0][0]);
    let t = s.units().time_from_si(t_si);
    let exact = adiabaticity_beta(m, n, t, &g, &p)?;
    let fd = adiabaticity_beta_finite_difference(m, n, t, p.period() / 1e6, &g, &p)?;
    Ok(rel(fd, exact))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoulombOracleResult {
    /// Least-squares log-log slope of |V_quad − V_exact|/V_exact over
    /// z/d ∈ [10⁻³, 10⁻¹].
    pub slope: f64,
    /// Worst relative gap between dV/dz of the exact potential (central
    /// difference) and the closed-form force.
    pub force_error: f64,
}

pub fn coulomb_oracle() -> CoulombOracleResult {
    let k = PhysicalConstants::CODATA;
    let d = 1e-6;
    let pts: Vec<(f64, f64)> = (0..=20)
        .map(|i| {
            let u = 10f64.powf(-3.0 + 0.1 * i as f64);
            let exact = coulomb_potential_exact(u * d, d, &k);
            let quad = coulomb_potential_quadratic(u * d, d, &k);
            (u.ln(), ((quad - exact) / exact).abs().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let force_error = [1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0]
        .iter()
        .map(|&u| {
            let z = u * d;
            let h = 1e-5 * z;
            // the closed-form force is dV/dz with z = z_l − z_u
            let dv = (coulomb_potential_exact(z + h, d, &k) - coulomb_potential_exact(z - h, d, &k)) / (2.0 * h);
            rel(dv, coulomb_force(0.0, z, d, &k))
        })
        .fold(0.0, f64::max);
    CoulombOracleResult { slope, force_error }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublishedCheck {
    pub name: String,
    pub mass_ratio: f64,
    pub computed: f64,
    pub reference: f64,
    pub criterion: String,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub grid_points: usize,
    pub oracles: Vec<OracleCheck>,
    pub convergence_order: f64,
    pub passed: bool,
    pub published: Vec<PublishedCheck>,
    /// Mass ratio whose qubit splitting lands within 25% of the published
    /// ħω, if any.
    pub splitting_mass_ratio: Option<f64>,
}

/// Every oracle at `n_points` grid points (the device and two-level
/// oracles are grid independent or use their own settings).
pub fn run_oracles(n_points: usize, exec: Execution) -> (Vec<OracleCheck>, f64) {
    let jobs: Vec<usize> = (0..6).collect();
    let groups: Vec<Vec<OracleCheck>> = exec.map(&jobs, |&job| match job {
        0 => match poschl_teller_oracle(n_points) {
            Ok(r) => {
                let mut v: Vec<OracleCheck> = r
                    .relative_errors
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| OracleCheck::at_most(&format!("poschl_teller_level_{i}"), e, SPECTRUM_TOLERANCE))
                    .collect();
                v.extend(
                    r.orders
                        .iter()
                        .enumerate()
                        .map(|(i, &o)| OracleCheck::within(&format!("poschl_teller_order_{i}"), o, EXPECTED_ORDER, ORDER_TOLERANCE)),
                );
                v
            }
            Err(e) => vec![OracleCheck::failed("poschl_teller", SPECTRUM_TOLERANCE, &e)],
        },
        1 => vec![match box_oracle(n_points) {
            Ok(e) => OracleCheck::at_most("particle_in_box", e, SPECTRUM_TOLERANCE),
            Err(e) => OracleCheck::failed("particle_in_box", SPECTRUM_TOLERANCE, &e),
        }],
        2 => vec![match harmonic_oracle(n_points) {
            Ok(e) => OracleCheck::at_most("harmonic_spacing", e, SPECTRUM_TOLERANCE),
            Err(e) => OracleCheck::failed("harmonic_spacing", SPECTRUM_TOLERANCE, &e),
        }],
        3 => match rwa_oracle() {
            Ok(r) => vec![
                OracleCheck::at_most("rwa_population", r.max_abs_error, 1e-3),
                OracleCheck::at_most("rabi_norm_drift", r.norm_drift, 1e-8),
            ],
            Err(e) => vec![OracleCheck::failed("rwa_population", 1e-3, &e)],
        },
        4 => vec![match finite_difference_beta_oracle(n_points) {
            Ok(e) => OracleCheck::at_most("beta_finite_difference", e, 1e-5),
            Err(e) => OracleCheck::failed("beta_finite_difference", 1e-5, &e),
        }],
        _ => {
            let c = coulomb_oracle();
            vec![
                OracleCheck::within("coulomb_quadratic_slope", c.slope, 2.0, 0.05),
                OracleCheck::at_most("coulomb_force_derivative", c.force_error, 1e-8),
            ]
        }
    });
    let checks: Vec<OracleCheck> = groups.into_iter().flatten().collect();
    let order = checks.iter().find(|c| c.name == "poschl_teller_order_0").map_or(f64::NAN, |c| c.measured);
    (checks, order)
}

fn relative_check(name: &str, mass: f64, computed: f64, reference: f64, tol: f64) -> PublishedCheck {
    PublishedCheck {
        name: name.into(),
        mass_ratio: mass,
        computed,
        reference,
        criterion: format!("within {}%", tol * 100.0),
        agrees: rel(computed, reference) <= tol,
    }
}

/// Published-number comparisons for one effective mass.
pub fn published_checks(mass_ratio: f64, settings: &AnalysisSettings) -> Result<Vec<PublishedCheck>> {
    let k = PhysicalConstants::CODATA;
    let cfg = DeviceConfig::default().with_mass_ratio(mass_ratio);
    let a = QubitAnalysis::run(&cfg, &k, settings)?;
    let m = mass_ratio;
    let splitting = a.splitting();
    let beta = a.beta_star();
    let mut out = vec![
        relative_check("qubit_splitting_j", m, splitting, reference::SPLITTING, 0.25),
        relative_check("ground_energy_j", m, a.energy(0), reference::E0, 0.25),
        relative_check("excited_energy_j", m, a.energy(1), reference::E1, 0.25),
        PublishedCheck {
            name: "beta_at_t_star".into(),
            mass_ratio: m,
            computed: beta,
            reference: reference::BETA,
            criterion: "within a factor of 2".into(),
            agrees: beta >= 0.5 * reference::BETA && beta <= 2.0 * reference::BETA,
        },
        PublishedCheck {
            name: "max_beta".into(),
            mass_ratio: m,
            computed: a.max_beta(),
            reference: 1.0,
            criterion: "below".into(),
            agrees: a.max_beta() < 1.0,
        },
    ];
    let classes = a.bound_classes()?;
    if let Some(third) = classes.get(2) {
        out.push(PublishedCheck {
            name: "third_level_mass_fraction".into(),
            mass_ratio: m,
            computed: third.mass_fraction,
            reference: crate::eigensolver::BOUND_FRACTION,
            criterion: "below (third level escapes)".into(),
            agrees: !third.bound,
        });
    }
    let params = a.rabi_parameters(&k, false)?;
    let (period, _) = rabi_period(&params, default_rabi_duration(&params, 4e-9))?;
    out.push(relative_check("rabi_period_s", m, period.period, reference::RABI_PERIOD, 0.25));
    out.push(PublishedCheck {
        name: "rabi_period_within_transit".into(),
        mass_ratio: m,
        computed: period.period,
        reference: reference::TRANSIT_TIME,
        criterion: "below".into(),
        agrees: period.period <= reference::TRANSIT_TIME,
    });
    let thermal = thermal_ratio(&cfg, &k, splitting)?;
    out.push(PublishedCheck {
        name: "thermal_over_splitting".into(),
        mass_ratio: m,
        computed: thermal.ratio,
        reference: 1.0,
        criterion: "below".into(),
        agrees: thermal.ratio < 1.0,
    });
    Ok(out)
}

/// Oracles decide `passed`; the published-number section is informational
/// and is skipped when `with_published` is false.
pub fn run_validation(n_points: usize, with_published: bool, exec: Execution) -> ValidationReport {
    let (oracles, convergence_order) = run_oracles(n_points, exec);
    let passed = oracles.iter().all(|c| c.passed);
    let mut published = Vec::new();
    if with_published {
        let settings = AnalysisSettings { execution: exec, ..AnalysisSettings::default() };
        for m in [PRINTED_MASS_RATIO, STANDARD_GAAS_MASS_RATIO] {
            match published_checks(m, &settings) {
                Ok(v) => published.extend(v),
                Err(e) => published.push(PublishedCheck {
                    name: format!("pipeline_error: {e}"),
                    mass_ratio: m,
                    computed: f64::NAN,
                    reference: f64::NAN,
                    criterion: "runs".into(),
                    agrees: false,
                }),
            }
        }
    }
    let splitting_mass_ratio = published.iter().find(|c| c.name == "qubit_splitting_j" && c.agrees).map(|c| c.mass_ratio);
    ValidationReport { grid_points: n_points, oracles, convergence_order, passed, published, splitting_mass_ratio }
}
