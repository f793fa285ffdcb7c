//! Potential-energy functions of the channel, the SAW, the microwave drive
//! and the inter-channel Coulomb interaction.
//!
//! All evaluators are pure pointwise functions of `(z, t)`; grid sampling
//! lives in [`crate::eigensolver`].

use serde::Serialize;

use crate::params::{DerivedScales, DeviceConfig, PhysicalConstants};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSample {
    pub z: f64,
    pub t: f64,
    pub value: f64,
}

/// 1/cosh²(x), the gate and drive profile.
pub fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// V0 / cosh²(z/a).
pub fn gate_potential(z: f64, scales: &DerivedScales, a: f64) -> f64 {
    scales.v0 * sech2(z / a)
}

/// V_S cos(kz − ωt).
pub fn saw_potential(z: f64, t: f64, scales: &DerivedScales) -> f64 {
    scales.v_s * (scales.k * z - scales.omega_saw * t).cos()
}

pub fn effective_potential(z: f64, t: f64, scales: &DerivedScales, a: f64) -> f64 {
    gate_potential(z, scales, a) + saw_potential(z, t, scales)
}

/// V_e cos(ω_d t) / cosh²(z/a).
pub fn drive_potential(z: f64, t: f64, v_e: f64, omega_drive: f64, a: f64) -> f64 {
    v_e * (omega_drive * t).cos() * sech2(z / a)
}

/// ∂V_SAW/∂t = V_S ω sin(kz − ωt).
pub fn saw_potential_time_derivative(z: f64, t: f64, scales: &DerivedScales) -> f64 {
    scales.v_s * scales.omega_saw * (scales.k * z - scales.omega_saw * t).sin()
}

/// Longitudinal Coulomb force between electrons at `z_u` and `z_l` in
/// channels a distance `d` apart.
pub fn coulomb_force(z_u: f64, z_l: f64, d: f64, constants: &PhysicalConstants) -> f64 {
    let dz = z_l - z_u;
    let r2 = d * d + dz * dz;
    constants.coulomb_constant_e2() * dz / (r2 * r2.sqrt())
}

/// −(e²/4πε₀d)[1/√(1 + (z/d)²) − 1] with z = z_l − z_u.
pub fn coulomb_potential_exact(z: f64, d: f64, constants: &PhysicalConstants) -> f64 {
    let u = z / d;
    let s = (1.0 + u * u).sqrt();
    // 1 − 1/s = u²/(s(1 + s)) avoids cancellation at small u
    constants.coulomb_constant_e2() / d * (u * u / (s * (1.0 + s)))
}

/// e² z² / (8πε₀ d³).
pub fn coulomb_potential_quadratic(z: f64, d: f64, constants: &PhysicalConstants) -> f64 {
    0.5 * constants.coulomb_constant_e2() * z * z / (d * d * d)
}

/// The instantaneous channel potential with all parameters fixed in one
/// unit system (SI or natural), for grid sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DevicePotential {
    pub v0: f64,
    pub v_s: f64,
    pub k: f64,
    pub omega: f64,
    pub a: f64,
}

impl DevicePotential {
    pub fn si(config: &DeviceConfig, scales: &DerivedScales) -> Self {
        Self {
            v0: scales.v0,
            v_s: scales.v_s,
            k: scales.k,
            omega: scales.omega_saw,
            a: config.a,
        }
    }

    pub fn natural(config: &DeviceConfig, scales: &DerivedScales) -> Self {
        let u = scales.units();
        Self {
            v0: u.energy_from_si(scales.v0),
            v_s: u.energy_from_si(scales.v_s),
            k: scales.k * u.length,
            omega: scales.omega_saw * u.time,
            a: u.length_from_si(config.a),
        }
    }

    pub fn gate(&self, z: f64) -> f64 {
        self.v0 * sech2(z / self.a)
    }

    pub fn saw(&self, z: f64, t: f64) -> f64 {
        self.v_s * (self.k * z - self.omega * t).cos()
    }

    pub fn eval(&self, z: f64, t: f64) -> f64 {
        self.gate(z) + self.saw(z, t)
    }

    pub fn time_derivative(&self, z: f64, t: f64) -> f64 {
        self.v_s * self.omega * (self.k * z - self.omega * t).sin()
    }

    pub fn sample(&self, z: f64, t: f64) -> PotentialSample {
        PotentialSample { z, t, value: self.eval(z, t) }
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k
    }

    /// Position of the SAW trough (kz − ωt = π mod 2π) carrying the dot that
    /// enters the channel at z = −λ/2 when t = 0 and leaves at z = +λ/2 when
    /// t = T. Times are reduced modulo the period.
    pub fn tracked_trough(&self, t: f64) -> f64 {
        let period = self.period();
        let phase = (t / period).rem_euclid(1.0);
        // t = T is reported as the exit point rather than wrapped to entry
        let phase = if (phase < 1e-12 || phase > 1.0 - 1e-12) && t > 0.0 { 1.0 } else { phase };
        self.wavelength() * (phase - 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_scales;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn defaults() -> (DeviceConfig, DerivedScales, PhysicalConstants) {
        let c = PhysicalConstants::CODATA;
        let cfg = DeviceConfig::default();
        (cfg, derive_scales(&cfg, &c).unwrap(), c)
    }

    #[test]
    fn gate_barrier_shape() {
        let (cfg, s, _) = defaults();
        assert_eq!(gate_potential(0.0, &s, cfg.a), s.v0);
        assert!(gate_potential(10.0 * cfg.a, &s, cfg.a) < 1e-8 * s.v0);
        assert!(gate_potential(-10.0 * cfg.a, &s, cfg.a) < 1e-8 * s.v0);
        let c1 = 1.0f64.cosh();
        assert_relative_eq!(gate_potential(cfg.a, &s, cfg.a), s.v0 / (c1 * c1), max_relative = 1e-15);
        assert_relative_eq!(gate_potential(cfg.a, &s, cfg.a) / s.v0, 0.419974341614026, max_relative = 1e-12);
    }

    #[test]
    fn saw_wave_values() {
        let (_, s, _) = defaults();
        assert_eq!(saw_potential(0.0, 0.0, &s), s.v_s);
        let quarter = 0.25 * 2.0 * PI / s.k;
        assert!(saw_potential(quarter, 0.0, &s).abs() < 1e-15 * s.v_s);
        let z = 0.123e-6;
        let t = 0.04e-9;
        assert_relative_eq!(saw_potential(z, t + s.period, &s), saw_potential(z, t, &s), max_relative = 1e-12);
    }

    #[test]
    fn effective_potential_is_sum() {
        let (cfg, s, _) = defaults();
        assert_relative_eq!(effective_potential(0.0, 0.0, &s, cfg.a), s.v0 + s.v_s, max_relative = 1e-15);
        let s0 = derive_scales(&cfg.with_gamma(0.0), &PhysicalConstants::CODATA).unwrap();
        for &(z, t) in &[(0.1e-6, 0.0), (-0.7e-6, 0.2e-9), (1.3e-6, 0.31e-9)] {
            assert_eq!(effective_potential(z, t, &s0, cfg.a), gate_potential(z, &s0, cfg.a));
        }
    }

    #[test]
    fn drive_values() {
        let (cfg, s, _) = defaults();
        let v_e = s.drive_amplitude(&cfg);
        let w = 2.5e12;
        for &z in &[-1e-6, 0.0, 0.3e-6] {
            assert!(drive_potential(z, PI / (2.0 * w), v_e, w, cfg.a).abs() < 1e-15 * v_e);
        }
        assert_eq!(drive_potential(0.0, 0.0, v_e, w, cfg.a), v_e);
        assert_relative_eq!(v_e, 0.05 * s.v0, max_relative = 1e-15);
    }

    #[test]
    fn saw_derivative_matches_finite_difference() {
        let (_, s, _) = defaults();
        assert_eq!(saw_potential_time_derivative(0.0, 0.0, &s), 0.0);
        let t_quarter = -PI / 2.0 / s.omega_saw; // kz − ωt = π/2 at z = 0
        assert_relative_eq!(saw_potential_time_derivative(0.0, t_quarter, &s), s.v_s * s.omega_saw, max_relative = 1e-12);
        let dt = s.period / 1e6;
        for &(z, t) in &[(0.11e-6, 0.03e-9), (-0.42e-6, 0.17e-9), (0.9e-6, 0.29e-9)] {
            let fd = (saw_potential(z, t + dt, &s) - saw_potential(z, t - dt, &s)) / (2.0 * dt);
            assert_relative_eq!(fd, saw_potential_time_derivative(z, t, &s), max_relative = 1e-6);
        }
    }

    #[test]
    fn coulomb_force_symmetry_and_decay() {
        let (_, _, c) = defaults();
        let d = 1e-6;
        assert_eq!(coulomb_force(0.3e-6, 0.3e-6, d, &c), 0.0);
        let f = coulomb_force(0.1e-6, 0.45e-6, d, &c);
        assert_eq!(coulomb_force(0.45e-6, 0.1e-6, d, &c), -f);
        let ratio = coulomb_force(0.0, 100.0 * d, d, &c) / coulomb_force(0.0, 200.0 * d, d, &c);
        assert!((ratio - 4.0).abs() < 1e-3, "{ratio}");
    }

    #[test]
    fn coulomb_exact_limits_and_derivative() {
        let (_, _, c) = defaults();
        let d = 1e-6;
        let e2 = c.coulomb_constant_e2();
        assert_eq!(coulomb_potential_exact(0.0, d, &c), 0.0);
        assert_relative_eq!(coulomb_potential_exact(1e9 * d, d, &c), e2 / d, max_relative = 1e-8);
        // dV/dz at z = z_l − z_u equals the force on the lower electron's
        // coordinate difference
        for &z in &[0.05e-6, 0.4e-6, 2.0e-6] {
            let h = 1e-4 * z;
            let dv = (coulomb_potential_exact(z + h, d, &c) - coulomb_potential_exact(z - h, d, &c)) / (2.0 * h);
            assert_relative_eq!(dv, coulomb_force(0.0, z, d, &c), max_relative = 1e-8);
        }
    }

    #[test]
    fn quadratic_overestimates_at_unit_ratio() {
        let (_, _, c) = defaults();
        let d = 1e-6;
        assert_eq!(coulomb_potential_quadratic(0.0, d, &c), 0.0);
        let q = coulomb_potential_quadratic(d, d, &c);
        let e = coulomb_potential_exact(d, d, &c);
        assert!(e > 0.0 && q > e);
        let z = 0.01 * d;
        let rel = (coulomb_potential_quadratic(z, d, &c) - coulomb_potential_exact(z, d, &c)) / coulomb_potential_exact(z, d, &c);
        assert!(rel.abs() <= 1e-4);
    }

    #[test]
    fn tracked_trough_moves_across_channel() {
        let (cfg, s, _) = defaults();
        let p = DevicePotential::si(&cfg, &s);
        assert_relative_eq!(p.tracked_trough(0.0), -0.5e-6, max_relative = 1e-12);
        assert!(p.tracked_trough(0.5 * s.period).abs() < 1e-18);
        assert_relative_eq!(p.tracked_trough(s.period), 0.5e-6, max_relative = 1e-12);
        // the trough is a SAW minimum
        let t = 0.1e-9;
        let z = p.tracked_trough(t);
        assert_relative_eq!(p.saw(z, t), -s.v_s, max_relative = 1e-10);
    }

    proptest::proptest! {
        #[test]
        fn gate_parity(z in -5e-6f64..5e-6) {
            let (cfg, s, _) = defaults();
            proptest::prop_assert_eq!(gate_potential(z, &s, cfg.a), gate_potential(-z, &s, cfg.a));
        }

        #[test]
        fn saw_periodicity(z in -2e-6f64..2e-6, t in 0.0f64..1e-9) {
            let (cfg, s, _) = defaults();
            let v = saw_potential(z, t, &s);
            let tol = 1e-12 * s.v_s;
            proptest::prop_assert!((saw_potential(z + cfg.saw_wavelength, t, &s) - v).abs() <= tol);
            proptest::prop_assert!((saw_potential(z, t + s.period, &s) - v).abs() <= tol);
        }

        #[test]
        fn coulomb_antisymmetry(zu in -3e-6f64..3e-6, zl in -3e-6f64..3e-6) {
            let c = PhysicalConstants::CODATA;
            proptest::prop_assert_eq!(coulomb_force(zu, zl, 1e-6, &c), -coulomb_force(zl, zu, 1e-6, &c));
        }

        #[test]
        fn coulomb_exact_nonnegative_monotone(z in 0.0f64..1e-5, dz in 0.0f64..1e-6) {
            let c = PhysicalConstants::CODATA;
            let v = coulomb_potential_exact(z, 1e-6, &c);
            proptest::prop_assert!(v >= 0.0);
            proptest::prop_assert!(coulomb_potential_exact(-z, 1e-6, &c) == v);
            proptest::prop_assert!(coulomb_potential_exact(z + dz, 1e-6, &c) >= v);
        }
    }
}
