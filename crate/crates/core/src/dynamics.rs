//! Microwave-driven two-level amplitude dynamics.
//!
//! The amplitudes C₀, C₁ of the two tracked levels obey
//!
//! ```text
//! dC₀/dt = −iω₀C₀ − i cos(ωt)(D₀₀C₀ + D₀₁C₁)
//! dC₁/dt = −iω₁C₁ − i cos(ωt)(D₁₀C₀ + D₁₁C₁)
//! ```
//!
//! with D_ij = (V_e/ħ)⟨i|sech²(z/a)|j⟩. Everything here is in SI (s, rad/s).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::eigensolver::{matrix_element, EigenPair, Grid};
use crate::potential::sech2;
use crate::{Error, Execution, Result};

/// Tolerance on |C₀|² + |C₁|² − 1 for the initial state.
pub const INITIAL_NORM_TOLERANCE: f64 = 1e-10;
/// Peak population below which no oscillation is reported.
pub const MIN_OSCILLATION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiParameters {
    pub omega0: f64,
    pub omega1: f64,
    pub omega_drive: f64,
    pub d: [[f64; 2]; 2],
}

impl RabiParameters {
    /// Bare resonance ω₁ − ω₀.
    pub fn resonance(&self) -> f64 {
        self.omega1 - self.omega0
    }

    pub fn with_drive(mut self, omega_drive: f64) -> Self {
        self.omega_drive = omega_drive;
        self
    }

    fn fastest(&self) -> f64 {
        self.omega0.abs().max(self.omega1.abs()).max(self.omega_drive.abs())
    }

    /// Largest accepted step, 2π/(200·max|ω|).
    pub fn max_step(&self) -> f64 {
        2.0 * PI / (200.0 * self.fastest())
    }

    /// Default step, 2π/(1000·max|ω|).
    pub fn default_step(&self) -> f64 {
        2.0 * PI / (1000.0 * self.fastest())
    }
}

/// D_ij = rate·⟨i|sech²(z/a)|j⟩ where `rate` = V_e/ħ in rad/s and `a` is
/// in grid length units.
pub fn rabi_coefficients(psi0: &EigenPair, psi1: &EigenPair, rate: f64, a: f64, grid: &Grid) -> Result<[[f64; 2]; 2]> {
    let f = |z: f64| sech2(z / a);
    let d00 = rate * matrix_element(psi0, psi0, f, grid)?;
    let d01 = rate * matrix_element(psi0, psi1, f, grid)?;
    let d11 = rate * matrix_element(psi1, psi1, f, grid)?;
    Ok([[d00, d01], [d01, d11]])
}

/// The coupling with the cosh² element in the denominator,
/// D_ij = rate/⟨i|cosh²(z/a)|j⟩. Kept only for side-by-side output.
pub fn rabi_coefficients_literal(psi0: &EigenPair, psi1: &EigenPair, rate: f64, a: f64, grid: &Grid) -> Result<[[f64; 2]; 2]> {
    let f = |z: f64| (z / a).cosh().powi(2);
    let pairs = [psi0, psi1];
    let mut d = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let m = matrix_element(pairs[i], pairs[j], f, grid)?;
            if m == 0.0 {
                return Err(Error::ZeroCoupling);
            }
            d[i][j] = rate / m;
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RabiTrajectory {
    pub times: Vec<f64>,
    pub c0: Vec<Complex64>,
    pub c1: Vec<Complex64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    /// max |p₀ + p₁ − 1| over every integration step, recorded or not.
    pub norm_drift: f64,
    /// 2π/ω of the drive, used to smooth the counter-rotating ripple.
    pub drive_period: f64,
}

impl RabiTrajectory {
    /// Every `stride`-th sample, always keeping the last one.
    pub fn downsample(&self, max_samples: usize) -> RabiTrajectory {
        let n = self.times.len();
        let stride = n.div_ceil(max_samples.max(1)).max(1);
        let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
        if idx.last() != Some(&(n - 1)) && n > 0 {
            idx.push(n - 1);
        }
        RabiTrajectory {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            c0: idx.iter().map(|&i| self.c0[i]).collect(),
            c1: idx.iter().map(|&i| self.c1[i]).collect(),
            p0: idx.iter().map(|&i| self.p0[i]).collect(),
            p1: idx.iter().map(|&i| self.p1[i]).collect(),
            norm_drift: self.norm_drift,
            drive_period: self.drive_period,
        }
    }
}

fn rhs(p: &RabiParameters, t: f64, c: [Complex64; 2]) -> [Complex64; 2] {
    let i = Complex64::i();
    let drive = (p.omega_drive * t).cos();
    let [[d00, d01], [d10, d11]] = p.d;
    [
        -i * (p.omega0 * c[0] + drive * (d00 * c[0] + d01 * c[1])),
        -i * (p.omega1 * c[1] + drive * (d10 * c[0] + d11 * c[1])),
    ]
}

fn axpy(c: [Complex64; 2], k: [Complex64; 2], h: f64) -> [Complex64; 2] {
    [c[0] + k[0] * h, c[1] + k[1] * h]
}

/// Classical RK4 from t = 0 to `t_end` in equal steps no longer than `dt`,
/// recording at most `max_samples` (plus the endpoints) evenly strided
/// samples.
pub fn integrate_rabi(
    params: &RabiParameters,
    t_end: f64,
    dt: f64,
    initial: (Complex64, Complex64),
    max_samples: usize,
) -> Result<RabiTrajectory> {
    let bound = params.max_step();
    if !(dt > 0.0) || dt > bound {
        return Err(Error::StepSize { dt, bound });
    }
    if !(t_end > 0.0) {
        return Err(Error::NonPositive("t_end"));
    }
    let norm0 = initial.0.norm_sqr() + initial.1.norm_sqr();
    if (norm0 - 1.0).abs() > INITIAL_NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm0));
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let stride = steps.div_ceil(max_samples.max(1)).max(1);
    let capacity = steps / stride + 2;
    let mut traj = RabiTrajectory {
        times: Vec::with_capacity(capacity),
        c0: Vec::with_capacity(capacity),
        c1: Vec::with_capacity(capacity),
        p0: Vec::with_capacity(capacity),
        p1: Vec::with_capacity(capacity),
        norm_drift: 0.0,
        drive_period: if params.omega_drive != 0.0 { 2.0 * PI / params.omega_drive.abs() } else { 0.0 },
    };
    let record = |traj: &mut RabiTrajectory, t: f64, c: [Complex64; 2]| {
        traj.times.push(t);
        traj.c0.push(c[0]);
        traj.c1.push(c[1]);
        traj.p0.push(c[0].norm_sqr());
        traj.p1.push(c[1].norm_sqr());
    };
    let mut c = [initial.0, initial.1];
    record(&mut traj, 0.0, c);
    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = rhs(params, t, c);
        let k2 = rhs(params, t + 0.5 * h, axpy(c, k1, 0.5 * h));
        let k3 = rhs(params, t + 0.5 * h, axpy(c, k2, 0.5 * h));
        let k4 = rhs(params, t + h, axpy(c, k3, h));
        for n in 0..2 {
            c[n] += (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]) * (h / 6.0);
        }
        let drift = (c[0].norm_sqr() + c[1].norm_sqr() - norm0).abs();
        traj.norm_drift = traj.norm_drift.max(drift);
        if (step + 1) % stride == 0 || step + 1 == steps {
            record(&mut traj, (step + 1) as f64 * h, c);
        }
    }
    Ok(traj)
}

/// Textbook two-level population (Ω²/(Ω²+Δ²))·sin²(√(Ω²+Δ²)·t/2).
pub fn rwa_population(omega: f64, detuning: f64, t: f64) -> f64 {
    let w2 = omega * omega + detuning * detuning;
    if w2 == 0.0 {
        return 0.0;
    }
    omega * omega / w2 * (0.5 * w2.sqrt() * t).sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodMethod {
    /// Signal starts near zero; period is twice the time to the first maximum.
    DoubledFirstMaximum,
    /// Spacing between the first two maxima.
    MaximumSpacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiPeriod {
    pub period: f64,
    pub method: PeriodMethod,
}

/// Centred moving average over `width` samples (shrinking at the edges).
fn boxcar(x: &[f64], width: usize) -> Vec<f64> {
    if width <= 1 {
        return x.to_vec();
    }
    let half = width / 2;
    let mut prefix = Vec::with_capacity(x.len() + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(x.len());
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Vertex of the parabola through three equally spaced samples, as an
/// offset in samples from the middle one.
fn parabola_offset(y0: f64, y1: f64, y2: f64) -> f64 {
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        0.0
    } else {
        (0.5 * (y0 - y2) / denom).clamp(-1.0, 1.0)
    }
}

fn maxima_above(y: &[f64], threshold: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < y.len() {
        if y[i] >= threshold && (i == 0 || y[i] >= y[i - 1]) && y[i] > y[i + 1] {
            out.push(i);
            // skip past this lobe before accepting another maximum
            while i + 1 < y.len() && y[i] >= threshold {
                i += 1;
            }
        }
        i += 1;
    }
    out
}

/// Rabi period of p₁(t), after smoothing the drive-frequency ripple with a
/// one-drive-period boxcar.
pub fn extract_rabi_period(traj: &RabiTrajectory) -> Result<RabiPeriod> {
    let n = traj.times.len();
    let peak = traj.p1.iter().copied().fold(0.0, f64::max);
    if n < 3 || peak < MIN_OSCILLATION {
        return Err(Error::NoOscillation(peak));
    }
    let spacing = (traj.times[n - 1] - traj.times[0]) / (n - 1) as f64;
    let width = if traj.drive_period > 0.0 { (traj.drive_period / spacing).round() as usize } else { 1 };
    let smooth = boxcar(&traj.p1, width);
    let top = smooth.iter().copied().fold(0.0, f64::max);
    let threshold = 0.9 * top;
    let refine = |i: usize| {
        if i == 0 {
            traj.times[0]
        } else {
            traj.times[i] + spacing * parabola_offset(smooth[i - 1], smooth[i], smooth[i + 1])
        }
    };
    let maxima = maxima_above(&smooth, threshold);
    if traj.p1[0] < MIN_OSCILLATION {
        let first = *maxima.first().ok_or(Error::NoOscillation(peak))?;
        Ok(RabiPeriod { period: 2.0 * (refine(first) - traj.times[0]), method: PeriodMethod::DoubledFirstMaximum })
    } else {
        match maxima[..] {
            [a, b, ..] => Ok(RabiPeriod { period: refine(b) - refine(a), method: PeriodMethod::MaximumSpacing }),
            _ => Err(Error::NoOscillation(peak)),
        }
    }
}

/// Peak of the smoothed p₁ after integrating from |0⟩ at each drive
/// frequency `resonance + offset`.
pub fn resonance_scan(
    params: &RabiParameters,
    offsets: &[f64],
    t_end: f64,
    max_samples: usize,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    exec.try_map(offsets, |&off| {
        let p = params.with_drive(params.resonance() + off);
        let traj = integrate_rabi(&p, t_end, p.default_step(), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), max_samples)?;
        let width = (traj.drive_period / (t_end / (traj.times.len() - 1) as f64)).round() as usize;
        let peak = boxcar(&traj.p1, width).into_iter().fold(0.0, f64::max);
        Ok((off, peak))
    })
}

/// Offset of the scan maximum, refined by a parabola through its
/// neighbours. Requires evenly spaced offsets.
pub fn resonance_shift(scan: &[(f64, f64)]) -> Option<f64> {
    let (i, _) = scan.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    if i == 0 || i + 1 == scan.len() {
        return Some(scan[i].0);
    }
    let step = scan[i + 1].0 - scan[i].0;
    Some(scan[i].0 + step * parabola_offset(scan[i - 1].1, scan[i].1, scan[i + 1].1))
}
