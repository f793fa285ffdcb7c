use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use flyqubit::analysis::{default_rabi_duration, rabi_run, representative_time, AnalysisSettings, QubitAnalysis};
use flyqubit::dynamics::{extract_rabi_period, resonance_scan, resonance_shift, PeriodMethod};
use flyqubit::eigensolver::{classify_bound, device_grid, device_hamiltonian, well_levels, well_window};
use flyqubit::params::{derive_scales, thermal_ratio, DerivedScales, DeviceConfig, PhysicalConstants};
use flyqubit::potential::DevicePotential;
use flyqubit::twoqubit::{
    coulomb_pauli_coefficients, fixture, full_interaction_trajectory, gate_fidelity, gate_time_for_iswap,
    interaction_matrix, iswap_propagator, projected_quadratic_matrix, quadratic_expansion_warning,
    quadrature_quadratic_matrix, relative_deviation, rwa_hamiltonian, default_interaction_step,
    full_interaction_propagator, PauliCoefficients, ZMatrixElements, DETUNING_THRESHOLD,
};
use flyqubit::validation::run_validation;
use flyqubit::Execution;
use serde::Serialize;

use crate::output::{number, Columns, Outputs, UnitSystem};
use crate::Failure;

const NS: f64 = 1e-9;
const RABI_ROWS: usize = 10_000;
const FIDELITY_ROWS: usize = 200;

pub struct Context {
    config: DeviceConfig,
    scales: DerivedScales,
    constants: PhysicalConstants,
    units: UnitSystem,
    cols: Columns,
    out: Outputs,
    started: Instant,
}

impl Context {
    pub fn new(config: DeviceConfig, out: &Path, units: UnitSystem) -> Result<Self, Failure> {
        let constants = PhysicalConstants::CODATA;
        let scales = derive_scales(&config, &constants)?;
        Ok(Self {
            config,
            scales,
            constants,
            units,
            cols: Columns::new(units, &scales),
            out: Outputs::new(out)?,
            started: Instant::now(),
        })
    }

    fn settings(&self, grid_points: usize, samples: usize, levels: usize) -> AnalysisSettings {
        AnalysisSettings { grid_points, period_samples: samples, levels, execution: Execution::default() }
    }

    fn finish(self, name: &str) -> Result<(), Failure> {
        let wall = self.started.elapsed().as_secs_f64();
        self.out.finish(name, &self.config, &self.scales, self.units, wall)
    }
}

#[derive(Serialize)]
struct NaturalScales {
    length_m: f64,
    energy_j: f64,
    time_s: f64,
    v0: f64,
    v_s: f64,
    k: f64,
    omega_saw: f64,
    period: f64,
}

#[derive(Serialize)]
struct DeriveSummary<'a> {
    config: &'a DeviceConfig,
    si: &'a DerivedScales,
    natural: NaturalScales,
    t_star_s: f64,
    qubit_splitting_j: f64,
    thermal_energy_j: f64,
    thermal_over_splitting: f64,
}

pub fn derive(mut ctx: Context) -> Result<(), Failure> {
    let s = ctx.scales;
    let u = s.units();
    let settings = ctx.settings(flyqubit::analysis::GRID_POINTS, flyqubit::analysis::PERIOD_SAMPLES, 2);
    let t_star = representative_time(&ctx.config, &ctx.constants, &settings)?;
    let a = QubitAnalysis::run_at(&ctx.config, &ctx.constants, &settings, t_star)?;
    let thermal = thermal_ratio(&ctx.config, &ctx.constants, a.splitting())?;
    let summary = DeriveSummary {
        config: &ctx.config,
        si: &s,
        natural: NaturalScales {
            length_m: u.length,
            energy_j: u.energy,
            time_s: u.time,
            v0: u.energy_from_si(s.v0),
            v_s: u.energy_from_si(s.v_s),
            k: s.k * u.length,
            omega_saw: s.omega_saw * u.time,
            period: u.time_from_si(s.period),
        },
        t_star_s: t_star,
        qubit_splitting_j: a.splitting(),
        thermal_energy_j: thermal.thermal_energy,
        thermal_over_splitting: thermal.ratio,
    };
    ctx.out.json("scales.json", &summary)?;
    println!("SAW period        {:.6e} s", s.period);
    println!("V0                {:.6e} J ({:.6e} natural)", s.v0, u.energy_from_si(s.v0));
    println!("k_B T             {:.6e} J", thermal.thermal_energy);
    println!("qubit splitting   {:.6e} J at t* = {:.6e} s", a.splitting(), t_star);
    println!("k_B T / splitting {:.6e}", thermal.ratio);
    ctx.finish("derive")
}

pub fn levels(mut ctx: Context, times_ns: &[f64], count: usize, grid_points: usize) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::Config("--levels must be at least 1".into()));
    }
    let grid = device_grid(&ctx.config, grid_points)?;
    let potential = DevicePotential::natural(&ctx.config, &ctx.scales);
    let units = ctx.scales.units();
    let solved = Execution::default().map(times_ns, |&t_ns| {
        let t = units.time_from_si(t_ns * NS);
        let h = device_hamiltonian(&potential, &grid, t)?;
        let window = well_window(&potential, &grid, t);
        let (pairs, _) = well_levels(&h, &grid, &window, count)?;
        let classes = pairs
            .iter()
            .map(|p| classify_bound(p, &grid, window.center, window.width))
            .collect::<flyqubit::Result<Vec<_>>>()?;
        Ok::<_, flyqubit::Error>((t, pairs, classes))
    });
    let c = ctx.cols;
    for (i, (result, &t_ns)) in solved.into_iter().zip(times_ns).enumerate() {
        let (t, pairs, classes) = result.map_err(|e| Failure::from(e).with_context(&format!("t = {t_ns} ns")))?;
        let t_si = t_ns * NS;
        ctx.out.csv(
            &format!("potential_t{i}.csv"),
            &[c.length_header(), c.energy_header("V")],
            grid.points().map(|z| vec![number(c.length_nat(z)), number(c.energy_nat(potential.eval(z, t)))]),
        )?;
        let header = [c.time_header(), "level_index".into(), c.energy_header("energy"), "bound_flag".into(), "mass_fraction".into()];
        let rows = pairs.iter().zip(&classes).enumerate().map(|(n, (p, b))| {
            vec![number(c.time_si(t_si)), n.to_string(), number(c.energy_nat(p.energy)), u8::from(b.bound).to_string(), number(b.mass_fraction)]
        });
        ctx.out.csv(&format!("levels_t{i}.csv"), &header, rows)?;
        for (n, p) in pairs.iter().enumerate() {
            ctx.out.csv(
                &format!("wavefunction_t{i}_n{n}.csv"),
                &[c.length_header(), c.psi_header()],
                grid.points().zip(&p.wavefunction).map(|(z, &psi)| vec![number(c.length_nat(z)), number(c.psi_nat(psi))]),
            )?;
        }
        let listing: Vec<String> = pairs
            .iter()
            .zip(&classes)
            .map(|(p, b)| format!("{:.4e} J{}", units.energy_to_si(p.energy), if b.bound { "" } else { " (unbound)" }))
            .collect();
        println!("t = {t_ns} ns: {}", listing.join(", "));
    }
    ctx.finish("levels")
}

#[derive(Serialize)]
struct Couplings {
    d00: f64,
    d01: f64,
    d11: f64,
}

impl From<[[f64; 2]; 2]> for Couplings {
    fn from(d: [[f64; 2]; 2]) -> Self {
        Self { d00: d[0][0], d01: d[0][1], d11: d[1][1] }
    }
}

#[derive(Serialize)]
struct RabiSummary {
    status: &'static str,
    rabi_period_s: Option<f64>,
    period_method: Option<PeriodMethod>,
    resonance_rad_per_s: f64,
    drive_rad_per_s: f64,
    resonance_shift_rad_per_s: Option<f64>,
    #[serde(rename = "D00")]
    d00: f64,
    #[serde(rename = "D01")]
    d01: f64,
    #[serde(rename = "D11")]
    d11: f64,
    omega0_rad_per_s: f64,
    omega1_rad_per_s: f64,
    norm_drift: f64,
    max_p1: f64,
    rwa_ceiling: f64,
    duration_s: f64,
    t_star_s: f64,
    saw_period_s: f64,
    within_transit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    literal_coefficients: Option<Couplings>,
}

pub fn rabi(mut ctx: Context, duration_ns: Option<f64>, detuning: f64, literal: bool, grid_points: usize, samples: usize) -> Result<(), Failure> {
    let a = QubitAnalysis::run_representative(&ctx.config, &ctx.constants, &ctx.settings(grid_points, samples, 2))?;
    let bare = a.rabi_parameters(&ctx.constants, false)?;
    let d01 = bare.d[0][1].abs();
    let params = bare.with_drive(bare.resonance() + detuning * d01);
    let duration = match duration_ns {
        Some(ns) if ns > 0.0 => ns * NS,
        Some(ns) => return Err(Failure::Config(format!("--duration must be > 0, got {ns}"))),
        None => default_rabi_duration(&params, 1.0 * NS).max(1.0 * NS),
    };
    let traj = rabi_run(&params, duration, RABI_ROWS)?;
    let period = extract_rabi_period(&traj).ok();
    let shift = if d01 > 0.0 {
        let offsets: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.05 * d01).collect();
        let scan = resonance_scan(&bare, &offsets, 1.5 * 2.0 * PI / d01, 4000, Execution::default())?;
        resonance_shift(&scan)
    } else {
        None
    };
    let literal_coefficients = if literal { Some(a.rabi_parameters(&ctx.constants, true)?.d.into()) } else { None };
    let c = ctx.cols;
    let header = [c.time_header(), "re_c0".into(), "im_c0".into(), "re_c1".into(), "im_c1".into(), "p0".into(), "p1".into()];
    let rows = (0..traj.times.len()).map(|i| {
        vec![
            number(c.time_si(traj.times[i])),
            number(traj.c0[i].re),
            number(traj.c0[i].im),
            number(traj.c1[i].re),
            number(traj.c1[i].im),
            number(traj.p0[i]),
            number(traj.p1[i]),
        ]
    });
    ctx.out.csv("rabi_trajectory.csv", &header, rows)?;
    let max_p1 = traj.p1.iter().copied().fold(0.0, f64::max);
    let summary = RabiSummary {
        status: if period.is_some() { "ok" } else { "no_oscillation" },
        rabi_period_s: period.map(|p| p.period),
        period_method: period.map(|p| p.method),
        resonance_rad_per_s: bare.resonance(),
        drive_rad_per_s: params.omega_drive,
        resonance_shift_rad_per_s: shift,
        d00: params.d[0][0],
        d01: params.d[0][1],
        d11: params.d[1][1],
        omega0_rad_per_s: params.omega0,
        omega1_rad_per_s: params.omega1,
        norm_drift: traj.norm_drift,
        max_p1,
        rwa_ceiling: 1.0 / (1.0 + detuning * detuning),
        duration_s: duration,
        t_star_s: a.t_star(),
        saw_period_s: ctx.scales.period,
        within_transit: period.map(|p| p.period <= ctx.scales.period),
        literal_coefficients,
    };
    ctx.out.json("rabi_summary.json", &summary)?;
    match period {
        Some(p) => println!("Rabi period {:.6e} s ({:?}), max p1 {max_p1:.6}", p.period, p.method),
        None => println!("no oscillation (max p1 {max_p1:.3e})"),
    }
    ctx.finish("rabi")
}

#[derive(Serialize)]
struct BetaSummary {
    t_star_s: f64,
    beta_t_star: f64,
    max_beta: f64,
    adiabatic: bool,
    samples: usize,
    min_overlap: Vec<f64>,
}

pub fn adiabaticity(mut ctx: Context, grid_points: usize, samples: usize) -> Result<(), Failure> {
    let a = QubitAnalysis::run(&ctx.config, &ctx.constants, &ctx.settings(grid_points, samples, 2))?;
    let c = ctx.cols;
    let header = [c.time_header(), "beta".into(), c.energy_header("E0"), c.energy_header("E1"), c.energy_header("splitting")];
    let rows = a.beta.iter().zip(&a.trajectory.levels).map(|(r, lv)| {
        vec![
            number(c.time_si(r.time)),
            number(r.beta),
            number(c.energy_nat(lv[0].energy)),
            number(c.energy_nat(lv[1].energy)),
            number(c.energy_nat(r.splitting)),
        ]
    });
    ctx.out.csv("beta.csv", &header, rows)?;
    let summary = BetaSummary {
        t_star_s: a.t_star(),
        beta_t_star: a.beta_star(),
        max_beta: a.max_beta(),
        adiabatic: a.max_beta() < 1.0,
        samples: a.beta.len(),
        min_overlap: a.trajectory.min_overlap.clone(),
    };
    ctx.out.json("beta_summary.json", &summary)?;
    println!("beta(t*) {:.6e}, max beta {:.6e}", summary.beta_t_star, summary.max_beta);
    ctx.finish("adiabaticity")
}

pub struct TwoQubitOptions {
    pub d: Option<f64>,
    pub t_max: Option<f64>,
    pub fixture: bool,
    pub lower_delay: f64,
    pub grid_points: usize,
    pub samples: usize,
}

#[derive(Serialize)]
struct Coefficients {
    cu_z: f64,
    cl_z: f64,
    cu_x: f64,
    cl_x: f64,
    c_zz: f64,
    c_xx: f64,
    c_zx: f64,
    c_xz: f64,
}

impl From<&PauliCoefficients> for Coefficients {
    fn from(c: &PauliCoefficients) -> Self {
        Self { cu_z: c.cu_z, cl_z: c.cl_z, cu_x: c.cu_x, cl_x: c.cl_x, c_zz: c.c_zz, c_xx: c.c_xx, c_zx: c.c_zx, c_xz: c.c_xz }
    }
}

#[derive(Serialize)]
struct TwoQubitSummary {
    source: &'static str,
    d_m: f64,
    z_elements_u: ZMatrixElements,
    z_elements_l: ZMatrixElements,
    coefficients: Coefficients,
    lambda_u: f64,
    lambda_l: f64,
    czz_over_cxx: f64,
    quoted_czz_over_cxx: f64,
    discrepancy_documented: bool,
    gate_time_s: f64,
    rwa_fidelity: f64,
    relative_detuning: f64,
    reconstruction_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_level_truncation_deviation: Option<f64>,
    iswap_matrix: Vec<Vec<[f64; 2]>>,
    warnings: Vec<String>,
}

pub fn twoqubit(mut ctx: Context, opt: TwoQubitOptions) -> Result<(), Failure> {
    let d = opt.d.unwrap_or(ctx.config.channel_separation);
    if !(d.is_finite() && d > 0.0) {
        return Err(Failure::Config(format!("--d must be finite and > 0, got {d}")));
    }
    let k = ctx.constants;
    let (zu, zl, splittings, truncation) = if opt.fixture {
        let w = fixture::QUBIT_SPLITTING;
        (fixture::UPPER, fixture::LOWER, [w, w], None)
    } else {
        let settings = ctx.settings(opt.grid_points, opt.samples, 2);
        let upper = QubitAnalysis::run_representative(&ctx.config, &k, &settings)?;
        let t_l = (upper.t_star() + opt.lower_delay * NS).rem_euclid(ctx.scales.period);
        let lower = QubitAnalysis::run_at(&ctx.config, &k, &settings, t_l)?;
        let (zu, zl) = (upper.z_elements()?, lower.z_elements()?);
        let lu = &upper.trajectory.levels[0];
        let ll = &lower.trajectory.levels[0];
        let quad = quadrature_quadratic_matrix([&lu[0], &lu[1]], [&ll[0], &ll[1]], &upper.grid, ctx.scales.natural_length, d, &k)?;
        let proj = projected_quadratic_matrix(&zu, &zl, d, &k);
        (zu, zl, [upper.splitting(), lower.splitting()], Some(relative_deviation(&proj, &quad)))
    };
    let coeffs = coulomb_pauli_coefficients(&zu, &zl, d, splittings, &k)?;
    let mut warnings = Vec::new();
    if let Some(w) = rwa_hamiltonian(&coeffs, DETUNING_THRESHOLD).warning {
        warnings.push(w);
    }
    if let Some(w) = quadratic_expansion_warning(&zu, &zl, d) {
        warnings.push(w);
    }
    let gate_time = gate_time_for_iswap(&coeffs, k.hbar)?;
    let t_max = match opt.t_max {
        Some(ns) if ns > 0.0 => ns * NS,
        Some(ns) => return Err(Failure::Config(format!("--t-max must be > 0, got {ns}"))),
        None => gate_time,
    };
    let step = default_interaction_step(&coeffs, gate_time.min(t_max), k.hbar);
    let at_gate = full_interaction_propagator(&coeffs, gate_time, step, k.hbar)?;
    let rwa_fidelity = gate_fidelity(&at_gate, &iswap_propagator(&coeffs, gate_time, k.hbar));
    let traj = full_interaction_trajectory(&coeffs, t_max, step, FIDELITY_ROWS, k.hbar)?;
    let c = ctx.cols;
    let rows = std::iter::once(vec![number(0.0), number(1.0)]).chain(
        traj.iter().map(|(t, u)| vec![number(c.time_si(*t)), number(gate_fidelity(u, &iswap_propagator(&coeffs, *t, k.hbar)))]),
    );
    ctx.out.csv("fidelity.csv", &[c.time_header(), "fidelity".into()], rows)?;
    let iswap = iswap_propagator(&coeffs, gate_time, k.hbar);
    let ratio = coeffs.zz_over_xx();
    let summary = TwoQubitSummary {
        source: if opt.fixture { "fixture" } else { "eigensolver" },
        d_m: d,
        z_elements_u: zu,
        z_elements_l: zl,
        coefficients: (&coeffs).into(),
        lambda_u: coeffs.lambda_u,
        lambda_l: coeffs.lambda_l,
        czz_over_cxx: ratio,
        quoted_czz_over_cxx: fixture::QUOTED_ZZ_OVER_XX,
        discrepancy_documented: (ratio / fixture::QUOTED_ZZ_OVER_XX - 1.0).abs() > 0.01,
        gate_time_s: gate_time,
        rwa_fidelity,
        relative_detuning: coeffs.relative_detuning(),
        reconstruction_deviation: relative_deviation(&interaction_matrix(&coeffs), &projected_quadratic_matrix(&zu, &zl, d, &k)),
        two_level_truncation_deviation: truncation,
        iswap_matrix: (0..4).map(|i| (0..4).map(|j| [iswap.matrix[(i, j)].re, iswap.matrix[(i, j)].im]).collect()).collect(),
        warnings,
    };
    ctx.out.json("twoqubit.json", &summary)?;
    println!("|C_zz/C_xx| = {ratio:.4e} (quoted {:.1e})", fixture::QUOTED_ZZ_OVER_XX);
    println!("iSWAP time {gate_time:.6e} s, RWA fidelity {rwa_fidelity:.8}");
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    ctx.finish("twoqubit")
}

pub fn validate(mut ctx: Context, grid_points: usize, skip_published: bool, self_test: bool) -> Result<(), Failure> {
    let n = if self_test { 64 } else { grid_points };
    let report = run_validation(n, !(skip_published || self_test), Execution::default());
    ctx.out.json("validation.json", &report)?;
    for c in &report.oracles {
        println!("{} {:<28} measured {:.3e} tolerance {:.1e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured, c.tolerance);
    }
    for p in &report.published {
        println!(
            "{} {:<28} m*={} computed {:.4e} reference {:.4e} ({})",
            if p.agrees { "AGREE" } else { "DIFFER" },
            p.name,
            p.mass_ratio,
            p.computed,
            p.reference,
            p.criterion
        );
    }
    let failed: Vec<&str> = report.oracles.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let outcome = if self_test {
        if failed.iter().any(|n| n.starts_with("poschl_teller_order")) {
            println!("self-test: coarse grid rejected as expected");
            Ok(())
        } else {
            Err(Failure::Validation("coarse grid passed the convergence oracles".into()))
        }
    } else if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(failed.join(", ")))
    };
    ctx.finish("validate")?;
    outcome
}
