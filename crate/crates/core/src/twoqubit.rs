//! Coulomb-coupled pair of flying qubits.
//!
//! Two-qubit matrices use the basis |11⟩, |10⟩, |01⟩, |00⟩, the Kronecker
//! product of the upper dot (first) and the lower dot, each ordered
//! (|1⟩, |0⟩). In that order σz = diag(1, −1) and σ⁺ = |1⟩⟨0| is the upper
//! right entry. Energies are J, lengths m, times s.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::eigensolver::{matrix_element, EigenPair, Grid};
use crate::params::PhysicalConstants;
use crate::{Error, Execution, Result};

pub type Matrix4c = Matrix4<Complex64>;

/// Default bound on |λ_u − λ_l|/min(|λ_u|, |λ_l|) before the RWA
/// Hamiltonian carries a warning.
pub const DETUNING_THRESHOLD: f64 = 1e-3;
/// Largest dot extent, as a fraction of d, for which the quadratic
/// expansion is considered valid.
pub const QUADRATIC_VALIDITY: f64 = 0.3;

/// Position matrix elements of one dot in its two lowest levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZMatrixElements {
    pub z00: f64,
    pub z11: f64,
    pub z01: f64,
}

impl ZMatrixElements {
    fn sum(&self) -> f64 {
        self.z00 + self.z11
    }

    fn diff(&self) -> f64 {
        self.z11 - self.z00
    }

    /// Position operator restricted to the qubit, (|1⟩, |0⟩) order.
    pub fn operator(&self) -> Matrix2<f64> {
        Matrix2::new(self.z11, self.z01, self.z01, self.z00)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { z00: self.z00 * factor, z11: self.z11 * factor, z01: self.z01 * factor }
    }
}

/// Published matrix elements for the two channels together with the
/// coefficient ratio and the splitting quoted alongside them.
pub mod fixture {
    use super::ZMatrixElements;

    pub const UPPER: ZMatrixElements = ZMatrixElements { z00: -5.6186e-7, z11: -5.6975e-7, z01: -5.6431e-8 };
    pub const LOWER: ZMatrixElements = ZMatrixElements { z00: -5.3594e-7, z11: -5.4418e-7, z01: -5.6607e-8 };
    /// Quoted |C_zz/C_xx|.
    pub const QUOTED_ZZ_OVER_XX: f64 = 1.3e-3;
    /// Quoted qubit splitting ħω, J.
    pub const QUBIT_SPLITTING: f64 = 8.3667e-23;
    /// A length of 2.981×10⁻² µm quoted next to the matrix elements. It does
    /// not enter any coefficient and is kept for reference only.
    pub const UNUSED_LENGTH: f64 = 2.981e-8;
}

pub fn dot_matrix_elements(psi0: &EigenPair, psi1: &EigenPair, grid: &Grid) -> Result<ZMatrixElements> {
    let z = |z: f64| z;
    Ok(ZMatrixElements {
        z00: matrix_element(psi0, psi0, z, grid)?,
        z11: matrix_element(psi1, psi1, z, grid)?,
        z01: matrix_element(psi0, psi1, z, grid)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliCoefficients {
    pub cu_z: f64,
    pub cl_z: f64,
    pub cu_x: f64,
    pub cl_x: f64,
    pub c_zz: f64,
    pub c_xx: f64,
    pub c_zx: f64,
    pub c_xz: f64,
    /// ħω_j/2 + C_j^z.
    pub lambda_u: f64,
    pub lambda_l: f64,
}

impl PauliCoefficients {
    pub fn zeros() -> Self {
        Self {
            cu_z: 0.0,
            cl_z: 0.0,
            cu_x: 0.0,
            cl_x: 0.0,
            c_zz: 0.0,
            c_xx: 0.0,
            c_zx: 0.0,
            c_xz: 0.0,
            lambda_u: 0.0,
            lambda_l: 0.0,
        }
    }

    pub fn zz_over_xx(&self) -> f64 {
        (self.c_zz / self.c_xx).abs()
    }

    /// Scale the eight coupling coefficients, keeping λ_u and λ_l fixed.
    pub fn scale_couplings(&self, factor: f64) -> Self {
        Self {
            cu_z: self.cu_z * factor,
            cl_z: self.cl_z * factor,
            cu_x: self.cu_x * factor,
            cl_x: self.cl_x * factor,
            c_zz: self.c_zz * factor,
            c_xx: self.c_xx * factor,
            c_zx: self.c_zx * factor,
            c_xz: self.c_xz * factor,
            ..*self
        }
    }

    pub fn with_lambdas(self, lambda_u: f64, lambda_l: f64) -> Self {
        Self { lambda_u, lambda_l, ..self }
    }

    /// |λ_u − λ_l| / min(|λ_u|, |λ_l|).
    pub fn relative_detuning(&self) -> f64 {
        (self.lambda_u - self.lambda_l).abs() / self.lambda_u.abs().min(self.lambda_l.abs())
    }

    fn max_lambda(&self) -> f64 {
        self.lambda_u.abs().max(self.lambda_l.abs())
    }
}

/// The eight coefficients of the quadratic Coulomb term for dots separated
/// by `d`, with qubit splittings `hbar_omega = [ħω_u, ħω_l]`.
pub fn coulomb_pauli_coefficients(
    zu: &ZMatrixElements,
    zl: &ZMatrixElements,
    d: f64,
    hbar_omega: [f64; 2],
    constants: &PhysicalConstants,
) -> Result<PauliCoefficients> {
    if !(d > 0.0) {
        return Err(Error::NonPositive("channel separation"));
    }
    // e²/(4πε₀d³)
    let k = constants.coulomb_constant_e2() / d.powi(3);
    let cu_z = k / 4.0 * (zu.sum() - zl.sum()) * zu.diff();
    let cl_z = k / 4.0 * (zl.sum() - zu.sum()) * zl.diff();
    Ok(PauliCoefficients {
        cu_z,
        cl_z,
        cu_x: k / 2.0 * (zu.sum() - zl.sum()) * zu.z01,
        cl_x: k / 2.0 * (zl.sum() - zu.sum()) * zl.z01,
        c_zz: -k / 4.0 * zu.diff() * zl.diff(),
        c_xx: -k * zu.z01 * zl.z01,
        c_zx: -k / 2.0 * zu.diff() * zl.z01,
        c_xz: -k / 2.0 * zl.diff() * zu.z01,
        lambda_u: 0.5 * hbar_omega[0] + cu_z,
        lambda_l: 0.5 * hbar_omega[1] + cl_z,
    })
}

fn sigma_z() -> Matrix2<Complex64> {
    Matrix2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0))
}

fn sigma_plus() -> Matrix2<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    Matrix2::new(z, Complex64::new(1.0, 0.0), z, z)
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4c {
    Matrix4c::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Static coupling operator Σ C·σσ of the interaction, identity part
/// excluded, as a real 4×4 matrix.
pub fn interaction_matrix(c: &PauliCoefficients) -> Matrix4<f64> {
    let sz = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let sx = Matrix2::new(0.0, 1.0, 1.0, 0.0);
    let id = Matrix2::identity();
    let k = |a: &Matrix2<f64>, b: &Matrix2<f64>| a.kronecker(b).fixed_view::<4, 4>(0, 0).into_owned();
    k(&sz, &id) * c.cu_z
        + k(&id, &sz) * c.cl_z
        + k(&sx, &id) * c.cu_x
        + k(&id, &sx) * c.cl_x
        + k(&sz, &sz) * c.c_zz
        + k(&sx, &sx) * c.c_xx
        + k(&sz, &sx) * c.c_zx
        + k(&sx, &sz) * c.c_xz
}

fn traceless(m: Matrix4<f64>) -> Matrix4<f64> {
    let shift = m.trace() / 4.0;
    m - Matrix4::identity() * shift
}

/// e²(Z_u − Z_l)²/(8πε₀d³) built from the qubit-restricted position
/// operators, with its trace removed. Equals [`interaction_matrix`] when
/// the coefficients come from the same elements.
pub fn projected_quadratic_matrix(zu: &ZMatrixElements, zl: &ZMatrixElements, d: f64, constants: &PhysicalConstants) -> Matrix4<f64> {
    let kappa = 0.5 * constants.coulomb_constant_e2() / d.powi(3);
    let id = Matrix2::identity();
    let rel = zu.operator().kronecker(&id) - id.kronecker(&zl.operator());
    let rel: Matrix4<f64> = rel.fixed_view::<4, 4>(0, 0).into_owned();
    traceless(rel * rel * kappa)
}

/// Product-state matrix elements ⟨i_u j_l| e²(z_u − z_l)²/(8πε₀d³) |k_u l_l⟩
/// by quadrature over the full wavefunctions (including the levels outside
/// the qubit through ⟨i|z²|k⟩), trace removed. `grid_u` lengths in m.
pub fn quadrature_quadratic_matrix(
    upper: [&EigenPair; 2],
    lower: [&EigenPair; 2],
    grid: &Grid,
    length_scale: f64,
    d: f64,
    constants: &PhysicalConstants,
) -> Result<Matrix4<f64>> {
    let kappa = 0.5 * constants.coulomb_constant_e2() / d.powi(3);
    // qubit order (|1⟩, |0⟩)
    let elements = |pair: [&EigenPair; 2], f: &dyn Fn(f64) -> f64| -> Result<Matrix2<f64>> {
        let p = [pair[1], pair[0]];
        let mut m = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = matrix_element(p[i], p[j], f, grid)?;
            }
        }
        Ok(m)
    };
    let z = |x: f64| x * length_scale;
    let z2 = |x: f64| (x * length_scale).powi(2);
    let (zu, zl) = (elements(upper, &z)?, elements(lower, &z)?);
    let (zu2, zl2) = (elements(upper, &z2)?, elements(lower, &z2)?);
    let id = Matrix2::identity();
    let m = zu2.kronecker(&id) + id.kronecker(&zl2) - zu.kronecker(&zl) * 2.0;
    Ok(traceless(m.fixed_view::<4, 4>(0, 0).into_owned() * kappa))
}

/// max|A − B| / max|B|.
pub fn relative_deviation(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).amax() / b.amax()
}

/// Rough extent max|z_l − z_u| of the pair: separation of the level
/// centroids plus both transition dipoles.
pub fn pair_extent(zu: &ZMatrixElements, zl: &ZMatrixElements) -> f64 {
    0.5 * (zu.sum() - zl.sum()).abs() + zu.z01.abs() + zl.z01.abs()
}

pub fn quadratic_expansion_warning(zu: &ZMatrixElements, zl: &ZMatrixElements, d: f64) -> Option<String> {
    let extent = pair_extent(zu, zl);
    (extent > QUADRATIC_VALIDITY * d).then(|| {
        format!("dot extent {extent:.3e} m exceeds {QUADRATIC_VALIDITY}·d = {:.3e} m; quadratic Coulomb expansion is doubtful", QUADRATIC_VALIDITY * d)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwaHamiltonian {
    pub matrix: Matrix4c,
    pub warning: Option<String>,
}

/// C_xx(σ_u⁺σ_l⁻ + σ_u⁻σ_l⁺), warning when the qubits are detuned by more
/// than `threshold` relative.
pub fn rwa_hamiltonian(c: &PauliCoefficients, threshold: f64) -> RwaHamiltonian {
    let mut matrix = Matrix4c::zeros();
    matrix[(1, 2)] = Complex64::new(c.c_xx, 0.0);
    matrix[(2, 1)] = Complex64::new(c.c_xx, 0.0);
    let detuning = c.relative_detuning();
    let warning = (!(detuning <= threshold))
        .then(|| format!("relative detuning |λ_u − λ_l|/min|λ| = {detuning:.3e} exceeds {threshold:.1e}"));
    RwaHamiltonian { matrix, warning }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMethod {
    RwaClosedForm,
    TimeOrderedFull,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitPropagator {
    pub matrix: Matrix4c,
    pub method: PropagatorMethod,
}

impl TwoQubitPropagator {
    /// ‖U†U − I‖_max.
    pub fn unitarity_error(&self) -> f64 {
        let e = self.matrix.adjoint() * self.matrix - Matrix4c::identity();
        e.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Closed-form exchange propagator with ξ = t·C_xx/ħ.
pub fn iswap_propagator(c: &PauliCoefficients, t: f64, hbar: f64) -> TwoQubitPropagator {
    iswap_from_angle(t * c.c_xx / hbar)
}

pub fn iswap_from_angle(xi: f64) -> TwoQubitPropagator {
    let mut m = Matrix4c::identity();
    let (s, co) = xi.sin_cos();
    m[(1, 1)] = Complex64::new(co, 0.0);
    m[(2, 2)] = Complex64::new(co, 0.0);
    m[(1, 2)] = Complex64::new(0.0, -s);
    m[(2, 1)] = Complex64::new(0.0, -s);
    TwoQubitPropagator { matrix: m, method: PropagatorMethod::RwaClosedForm }
}

/// (π/2)·ħ/|C_xx|.
pub fn gate_time_for_iswap(c: &PauliCoefficients, hbar: f64) -> Result<f64> {
    if c.c_xx == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    Ok(0.5 * PI * hbar / c.c_xx.abs())
}

/// Interaction-picture Hamiltonian H_I(t), J.
pub fn interaction_hamiltonian(c: &PauliCoefficients, t: f64, hbar: f64) -> Matrix4c {
    let sz = sigma_z();
    let sp = sigma_plus();
    let sm = sp.adjoint();
    let id = Matrix2::identity();
    let pu = Complex64::from_polar(1.0, 2.0 * t * c.lambda_u / hbar);
    let pl = Complex64::from_polar(1.0, 2.0 * t * c.lambda_l / hbar);
    let plus_u = kron(&sp, &id) * pu;
    let plus_l = kron(&id, &sp) * pl;
    let x_u = plus_u + plus_u.adjoint();
    let x_l = plus_l + plus_l.adjoint();
    let z_u = kron(&sz, &id);
    let z_l = kron(&id, &sz);
    // σ_u^± σ_l^± with the combined phases
    let pp = kron(&sp, &sp) * (pu * pl);
    let pm = kron(&sp, &sm) * (pu * pl.conj());
    let xx = pp + pp.adjoint() + pm + pm.adjoint();
    let r = |x: f64| Complex64::new(x, 0.0);
    z_u * z_l * r(c.c_zz)
        + x_u * r(c.cu_x)
        + x_l * r(c.cl_x)
        + xx * r(c.c_xx)
        + z_u * x_l * r(c.c_zx)
        + x_u * z_l * r(c.c_xz)
}

/// exp(−i·H·τ) by a Taylor series summed to rounding, with scaling and
/// squaring when |Hτ| is not small. Over 10⁵–10⁶ steps this keeps the
/// product unitary to ~10⁻¹¹, where both a Padé approximant and a
/// Hermitian eigendecomposition drift several times further.
fn expm_hermitian(h: &Matrix4c, tau: f64) -> Matrix4c {
    let a = h * Complex64::new(0.0, -tau);
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * 4.0;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = a * Complex64::new(0.5f64.powi(squarings), 0.0);
    let mut term = Matrix4c::identity();
    let mut sum = Matrix4c::identity();
    for k in 1..40 {
        term = term * a * Complex64::new(1.0 / k as f64, 0.0);
        sum += term;
        if term.iter().all(|z| z.norm() < 1e-20) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Largest accepted step ħ/(200·max|λ|).
pub fn max_interaction_step(c: &PauliCoefficients, hbar: f64) -> f64 {
    let l = c.max_lambda();
    if l == 0.0 {
        f64::INFINITY
    } else {
        hbar / (200.0 * l)
    }
}

/// Default step: the bound ħ/(200·max|λ|), or a thousandth of `t` for λ = 0.
pub fn default_interaction_step(c: &PauliCoefficients, t: f64, hbar: f64) -> f64 {
    max_interaction_step(c, hbar).min(t / 1000.0)
}

/// Time-ordered product of exact midpoint exponentials of H_I, sampled
/// `samples` times (evenly in step count, endpoint included).
pub fn full_interaction_trajectory(
    c: &PauliCoefficients,
    t: f64,
    dt: f64,
    samples: usize,
    hbar: f64,
) -> Result<Vec<(f64, TwoQubitPropagator)>> {
    let bound = max_interaction_step(c, hbar);
    if !(dt > 0.0) || dt > bound {
        return Err(Error::StepSize { dt, bound });
    }
    if !(t >= 0.0) {
        return Err(Error::NonPositive("evolution time"));
    }
    let steps = ((t / dt).ceil() as usize).max(1);
    let h = t / steps as f64;
    let stride = steps.div_ceil(samples.max(1)).max(1);
    let mut u = Matrix4c::identity();
    let mut out = Vec::with_capacity(steps / stride + 1);
    let wrap = |m: &Matrix4c| TwoQubitPropagator { matrix: *m, method: PropagatorMethod::TimeOrderedFull };
    for k in 0..steps {
        let hk = interaction_hamiltonian(c, (k as f64 + 0.5) * h, hbar);
        u = expm_hermitian(&hk, h / hbar) * u;
        if (k + 1) % stride == 0 || k + 1 == steps {
            out.push(((k + 1) as f64 * h, wrap(&u)));
        }
    }
    Ok(out)
}

pub fn full_interaction_propagator(c: &PauliCoefficients, t: f64, dt: f64, hbar: f64) -> Result<TwoQubitPropagator> {
    let traj = full_interaction_trajectory(c, t, dt, 1, hbar)?;
    Ok(traj.into_iter().last().expect("at least one step").1)
}

/// |Tr(U_a†U_b)|/4.
pub fn gate_fidelity(a: &TwoQubitPropagator, b: &TwoQubitPropagator) -> f64 {
    (a.matrix.adjoint() * b.matrix).trace().norm() / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityPoint {
    /// |C_xx|/max|λ|.
    pub coupling_ratio: f64,
    pub gate_time: f64,
    pub fidelity: f64,
}

/// Full-vs-closed-form fidelity at the iSWAP time, with the couplings of
/// `base` rescaled so that |C_xx|/max|λ| takes each value of `ratios`.
pub fn rwa_fidelity_sweep(base: &PauliCoefficients, ratios: &[f64], hbar: f64, exec: Execution) -> Result<Vec<FidelityPoint>> {
    if base.c_xx == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    exec.try_map(ratios, |&r| {
        let c = base.scale_couplings(r * base.max_lambda() / base.c_xx.abs());
        let t = gate_time_for_iswap(&c, hbar)?;
        let full = full_interaction_propagator(&c, t, default_interaction_step(&c, t, hbar), hbar)?;
        Ok(FidelityPoint { coupling_ratio: r, gate_time: t, fidelity: gate_fidelity(&full, &iswap_propagator(&c, t, hbar)) })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::{build_hamiltonian, solve_lowest};
    use approx::assert_relative_eq;

    const HBAR: f64 = PhysicalConstants::CODATA.hbar;

    fn fixture_coefficients(d: f64) -> PauliCoefficients {
        let w = fixture::QUBIT_SPLITTING;
        coulomb_pauli_coefficients(&fixture::UPPER, &fixture::LOWER, d, [w, w], &PhysicalConstants::CODATA).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn oscillator(center: f64) -> (Grid, Vec<EigenPair>) {
        let g = Grid::new(-10.0, 10.0, 2000).unwrap();
        let h = build_hamiltonian(&g, |z| (z - center).powi(2), 1.0).unwrap();
        let p = solve_lowest(&h, 3, &g).unwrap();
        (g, p)
    }

    #[test]
    fn symmetric_well_elements() {
        let (g, p) = oscillator(0.7);
        let z = dot_matrix_elements(&p[0], &p[1], &g).unwrap();
        assert!((z.z00 - 0.7).abs() < 1e-8 && (z.z11 - 0.7).abs() < 1e-8);
        assert_relative_eq!(z.z01.abs(), 0.5f64.sqrt(), max_relative = 1e-4);
    }

    #[test]
    fn fixture_ratio_and_gate_time() {
        let co = fixture_coefficients(1e-6);
        assert_relative_eq!(co.zz_over_xx(), 5.087e-3, max_relative = 1e-3);
        assert!(co.zz_over_xx() < 1e-2);
        let t = gate_time_for_iswap(&co, HBAR).unwrap();
        assert_relative_eq!(t, 2.2470e-10, max_relative = 1e-3);
    }

    #[test]
    fn identical_dots_cancel_single_qubit_terms() {
        let w = fixture::QUBIT_SPLITTING;
        let co = coulomb_pauli_coefficients(&fixture::UPPER, &fixture::UPPER, 1e-6, [w, w], &PhysicalConstants::CODATA).unwrap();
        assert_eq!([co.cu_z, co.cl_z, co.cu_x, co.cl_x], [0.0; 4]);
        assert!(co.c_xx != 0.0);
    }

    #[test]
    fn vanishing_dipole_kills_exchange() {
        let w = fixture::QUBIT_SPLITTING;
        let zu = ZMatrixElements { z01: 0.0, ..fixture::UPPER };
        let co = coulomb_pauli_coefficients(&zu, &fixture::LOWER, 1e-6, [w, w], &PhysicalConstants::CODATA).unwrap();
        assert_eq!(co.c_xx, 0.0);
        assert_eq!(co.c_xz, 0.0);
        assert_eq!(co.cu_x, 0.0);
        assert!(matches!(gate_time_for_iswap(&co, HBAR), Err(Error::ZeroCoupling)));
    }

    #[test]
    fn swapping_dots_exchanges_single_qubit_terms() {
        let w = fixture::QUBIT_SPLITTING;
        let k = PhysicalConstants::CODATA;
        let a = coulomb_pauli_coefficients(&fixture::UPPER, &fixture::LOWER, 1e-6, [w, w], &k).unwrap();
        let b = coulomb_pauli_coefficients(&fixture::LOWER, &fixture::UPPER, 1e-6, [w, w], &k).unwrap();
        assert_eq!((a.cu_z, a.cl_z, a.cu_x, a.cl_x), (b.cl_z, b.cu_z, b.cl_x, b.cu_x));
        assert_eq!((a.c_zz, a.c_xx), (b.c_zz, b.c_xx));
        assert_eq!((a.c_zx, a.c_xz), (b.c_xz, b.c_zx));
    }

    #[test]
    fn inverse_cube_law() {
        let a = fixture_coefficients(1e-6);
        let b = fixture_coefficients(2e-6);
        for (x, y) in [
            (a.cu_z, b.cu_z),
            (a.cl_z, b.cl_z),
            (a.cu_x, b.cu_x),
            (a.cl_x, b.cl_x),
            (a.c_zz, b.c_zz),
            (a.c_xx, b.c_xx),
            (a.c_zx, b.c_zx),
            (a.c_xz, b.c_xz),
        ] {
            assert_relative_eq!(x, 8.0 * y, max_relative = 1e-12);
        }
        assert!(coulomb_pauli_coefficients(&fixture::UPPER, &fixture::LOWER, 0.0, [1.0, 1.0], &PhysicalConstants::CODATA).is_err());
    }

    #[test]
    fn coefficients_reconstruct_projected_quadratic_form() {
        let k = PhysicalConstants::CODATA;
        let co = fixture_coefficients(1e-6);
        let direct = projected_quadratic_matrix(&fixture::UPPER, &fixture::LOWER, 1e-6, &k);
        assert!(relative_deviation(&interaction_matrix(&co), &direct) < 1e-12);
    }

    #[test]
    fn quadrature_matches_in_closed_two_level_space() {
        // a displaced pair of oscillators in units of 0.1 µm: z couples
        // 0 and 1 to level 2, so the full quadrature differs from the
        // qubit-restricted form only through ⟨i|z²|k⟩
        let scale = 1e-7;
        let k = PhysicalConstants::CODATA;
        let (g, pu) = oscillator(-2.0);
        let (_, pl) = oscillator(-1.5);
        let zu = dot_matrix_elements(&pu[0], &pu[1], &g).unwrap().scaled(scale);
        let zl = dot_matrix_elements(&pl[0], &pl[1], &g).unwrap().scaled(scale);
        let co = coulomb_pauli_coefficients(&zu, &zl, 1e-6, [1e-23, 1e-23], &k).unwrap();
        let quad = quadrature_quadratic_matrix([&pu[0], &pu[1]], [&pl[0], &pl[1]], &g, scale, 1e-6, &k).unwrap();
        let proj = projected_quadratic_matrix(&zu, &zl, 1e-6, &k);
        assert!(relative_deviation(&interaction_matrix(&co), &proj) < 1e-8);
        // the cross term is exact; only the single-dot z² parts differ
        let dev = relative_deviation(&proj, &quad);
        assert!(dev > 1e-3 && dev < 1.0, "{dev}");
    }

    #[test]
    fn rwa_matrix_structure() {
        let co = fixture_coefficients(1e-6);
        let h = rwa_hamiltonian(&co, DETUNING_THRESHOLD);
        assert_eq!(h.matrix[(1, 2)], c(co.c_xx, 0.0));
        assert_eq!(h.matrix, h.matrix.adjoint());
        assert!((0..4).all(|i| h.matrix[(i, i)] == c(0.0, 0.0)));
        // the fixture's C_u^z ≠ C_l^z detunes the pair by just over 1e-3
        assert!(h.warning.is_some());
        assert!(rwa_hamiltonian(&co.with_lambdas(4e-23, 4e-23), DETUNING_THRESHOLD).warning.is_none());
        let zero = rwa_hamiltonian(&PauliCoefficients::zeros().with_lambdas(1.0, 1.0), DETUNING_THRESHOLD);
        assert_eq!(zero.matrix, Matrix4c::zeros());
        let detuned = rwa_hamiltonian(&co.with_lambdas(1.0, 1.1), DETUNING_THRESHOLD);
        assert!(detuned.warning.is_some());
    }

    #[test]
    fn iswap_algebra() {
        assert_eq!(iswap_from_angle(0.0).matrix, Matrix4c::identity());
        let u = iswap_from_angle(0.5 * PI).matrix;
        // column |10⟩ → −i|01⟩
        assert!((u[(2, 1)] - c(0.0, -1.0)).norm() < 1e-15 && u[(1, 1)].norm() < 1e-15);
        assert!((u[(1, 2)] - c(0.0, -1.0)).norm() < 1e-15);
        assert_eq!((u[(0, 0)], u[(3, 3)]), (c(1.0, 0.0), c(1.0, 0.0)));
        for (a, b) in [(0.3, 1.1), (-0.7, 2.9), (5.0, 0.01)] {
            let p = iswap_from_angle(a).matrix * iswap_from_angle(b).matrix;
            let err = (p - iswap_from_angle(a + b).matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12);
            assert!(iswap_from_angle(a).unitarity_error() < 1e-10);
        }
    }

    #[test]
    fn gate_time_inverse_in_coupling() {
        let co = fixture_coefficients(1e-6);
        let t1 = gate_time_for_iswap(&co, HBAR).unwrap();
        let t2 = gate_time_for_iswap(&co.scale_couplings(2.0), HBAR).unwrap();
        assert_relative_eq!(t1, 2.0 * t2, max_relative = 1e-15);
        let u = iswap_propagator(&co, t1, HBAR);
        assert_relative_eq!(u.matrix[(1, 2)].im.abs(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_coefficients_give_identity() {
        let co = PauliCoefficients::zeros().with_lambdas(1e-23, 1e-23);
        let u = full_interaction_propagator(&co, 1e-10, max_interaction_step(&co, HBAR), HBAR).unwrap();
        assert!((u.matrix - Matrix4c::identity()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn pure_exchange_reduces_to_closed_form_block() {
        let mut co = PauliCoefficients::zeros().with_lambdas(4e-23, 4e-23);
        co.c_xx = 4e-26;
        let t = gate_time_for_iswap(&co, HBAR).unwrap();
        let full = full_interaction_propagator(&co, t, max_interaction_step(&co, HBAR), HBAR).unwrap();
        let rwa = iswap_propagator(&co, t, HBAR);
        for i in 1..3 {
            for j in 1..3 {
                assert!((full.matrix[(i, j)] - rwa.matrix[(i, j)]).norm() < 1e-8);
            }
            for j in [0, 3] {
                assert!(full.matrix[(i, j)].norm() < 1e-12 && full.matrix[(j, i)].norm() < 1e-12, "{}", full.matrix);
            }
        }
        assert!(full.unitarity_error() < 1e-10);
    }

    #[test]
    fn step_bound_enforced() {
        let co = fixture_coefficients(1e-6);
        let bound = max_interaction_step(&co, HBAR);
        assert!(matches!(full_interaction_propagator(&co, 1e-10, 2.0 * bound, HBAR), Err(Error::StepSize { .. })));
    }

    #[test]
    fn fidelity_cases() {
        let u = iswap_from_angle(0.4);
        assert_relative_eq!(gate_fidelity(&u, &u), 1.0, max_relative = 1e-15);
        let phased = TwoQubitPropagator { matrix: u.matrix * Complex64::from_polar(1.0, 1.3), ..u.clone() };
        assert_relative_eq!(gate_fidelity(&u, &phased), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gate_fidelity(&iswap_from_angle(0.0), &iswap_from_angle(0.5 * PI)), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn fidelity_falls_with_coupling_strength() {
        let base = fixture_coefficients(1e-6).with_lambdas(4.18e-23, 4.18e-23);
        let ratios = [1e-2, 1.78e-2, 3.16e-2, 5.62e-2, 1e-1];
        let pts = rwa_fidelity_sweep(&base, &ratios, HBAR, Execution::default()).unwrap();
        assert!(pts.windows(2).all(|w| w[1].fidelity <= w[0].fidelity));
        assert!(pts[0].fidelity > 0.99);
        let seq = rwa_fidelity_sweep(&base, &ratios[..2], HBAR, Execution::Sequential).unwrap();
        assert_eq!(seq[..], pts[..2]);
    }
}
