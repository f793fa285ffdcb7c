//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for selected
//! eigenvalues, inverse iteration for the eigenvectors.

use crate::{Error, Result};

/// Finite-difference Hamiltonian on a uniform grid. A single off-diagonal
/// array stores both triangles, so the operator is symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    off_sq: Vec<f64>,
    norm_inf: f64,
}

const MAX_BISECTION: usize = 256;
const MAX_INVERSE_ITER: usize = 8;

impl TridiagonalHamiltonian {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        let n = diagonal.len();
        if n == 0 || off_diagonal.len() + 1 != n {
            return Err(Error::InvalidGrid(format!(
                "diagonal length {n} with off-diagonal length {}",
                off_diagonal.len()
            )));
        }
        if let Some((index, &value)) = diagonal.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinitePotential { index, value });
        }
        let off_sq = off_diagonal.iter().map(|e| e * e).collect();
        let mut norm_inf = 0.0f64;
        for i in 0..n {
            let left = if i > 0 { off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { off_diagonal[i].abs() } else { 0.0 };
            norm_inf = norm_inf.max(diagonal[i].abs() + left + right);
        }
        Ok(Self { diagonal, off_diagonal, off_sq, norm_inf })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn norm_inf(&self) -> f64 {
        self.norm_inf
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        let pad = 2.0 * f64::EPSILON * self.norm_inf.max(f64::MIN_POSITIVE);
        (lo - pad, hi + pad)
    }

    /// Number of eigenvalues strictly below `x` (count of negative LDLᵀ
    /// pivots of T − xI).
    pub fn sturm_count(&self, x: f64) -> usize {
        let guard = f64::EPSILON * f64::EPSILON * self.norm_inf.max(f64::MIN_POSITIVE);
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = (self.diagonal[i] - x) - self.off_sq[i - 1] / q;
            }
            if q.abs() < guard {
                q = -guard;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.dim() {
            return Err(Error::LevelCount { requested: index + 1, dim: self.dim() });
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..MAX_BISECTION {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Convergence { level: index, iterations: MAX_BISECTION, residual: hi - lo })
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off_diagonal[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let hv = self.apply(v);
        dot(v, &hv) / dot(v, v)
    }

    /// ‖Tv − λv‖/‖v‖.
    pub fn residual(&self, v: &[f64], lambda: f64) -> f64 {
        let hv = self.apply(v);
        let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - lambda * b).powi(2)).sum();
        (r / dot(v, v)).sqrt()
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diagonal[i];
            if i + 1 < n {
                m[i][i + 1] = self.off_diagonal[i];
                m[i + 1][i] = self.off_diagonal[i];
            }
        }
        m
    }

    fn cluster_tolerance(&self) -> f64 {
        1e-5 * self.norm_inf
    }

    fn residual_target(&self) -> f64 {
        64.0 * f64::EPSILON * self.norm_inf
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LU factorization with partial pivoting of T − σI.
struct ShiftedLu {
    /// U main diagonal, first and second superdiagonals.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    /// L multipliers.
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(h: &TridiagonalHamiltonian, sigma: f64) -> Self {
        let n = h.dim();
        let tiny = f64::EPSILON * h.norm_inf.max(f64::MIN_POSITIVE);
        let mut d: Vec<f64> = h.diagonal.iter().map(|x| x - sigma).collect();
        let mut du: Vec<f64> = h.off_diagonal.clone();
        let mut dl: Vec<f64> = h.off_diagonal.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                l[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                // swap rows i and i+1
                let f = d[i] / dl[i];
                d[i] = dl[i];
                l[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = true;
            }
            dl[i] = 0.0;
        }
        for x in d.iter_mut() {
            if x.abs() < tiny {
                *x = if *x < 0.0 { -tiny } else { tiny };
            }
        }
        Self { u0: d, u1: du, u2: du2, l, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }
}

fn start_vector(n: usize, level: usize) -> Vec<f64> {
    // splitmix64 stream; deterministic per level
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (level as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 + 0.5
        })
        .collect()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Unit-norm eigenvector with its eigenvalue and 0-based spectral index.
#[derive(Debug, Clone)]
pub(crate) struct RawPair {
    pub index: usize,
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Computes eigenpairs in increasing spectral order, keeping earlier
/// vectors of the current cluster for reorthogonalization.
pub(crate) struct EigenSweep<'a> {
    h: &'a TridiagonalHamiltonian,
    next: usize,
    cluster: Vec<RawPair>,
}

impl<'a> EigenSweep<'a> {
    /// Starts at spectral index `start`, backing up over any cluster that
    /// straddles it so the first returned vector is properly orthogonalized.
    pub fn starting_at(h: &'a TridiagonalHamiltonian, start: usize) -> Result<Self> {
        let mut sweep = Self { h, next: start, cluster: Vec::new() };
        if start > 0 && start < h.dim() {
            let tol = h.cluster_tolerance();
            let mut first = start;
            let mut upper = h.eigenvalue(start)?;
            while first > 0 {
                let below = h.eigenvalue(first - 1)?;
                if upper - below > tol {
                    break;
                }
                first -= 1;
                upper = below;
            }
            sweep.next = first;
            while sweep.next < start {
                sweep.advance()?;
            }
        }
        Ok(sweep)
    }

    pub fn exhausted(&self) -> bool {
        self.next >= self.h.dim()
    }

    pub fn advance(&mut self) -> Result<RawPair> {
        let h = self.h;
        let index = self.next;
        if index >= h.dim() {
            return Err(Error::LevelCount { requested: index + 1, dim: h.dim() });
        }
        let lambda = h.eigenvalue(index)?;
        if let Some(last) = self.cluster.last() {
            if lambda - last.value > h.cluster_tolerance() {
                self.cluster.clear();
            }
        }
        let lu = ShiftedLu::factor(h, lambda);
        let mut v = start_vector(h.dim(), index);
        let target = h.residual_target();
        let mut value = lambda;
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_INVERSE_ITER {
            lu.solve(&mut v);
            normalize(&mut v);
            for other in &self.cluster {
                let c = dot(&v, &other.vector);
                v.iter_mut().zip(&other.vector).for_each(|(x, y)| *x -= c * y);
            }
            normalize(&mut v);
            value = h.rayleigh_quotient(&v);
            residual = h.residual(&v, value);
            if residual <= target {
                break;
            }
        }
        if residual > target {
            return Err(Error::Convergence { level: index, iterations: MAX_INVERSE_ITER, residual });
        }
        // largest-magnitude component positive
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) });
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let pair = RawPair { index, value, vector: v };
        self.cluster.push(pair.clone());
        self.next += 1;
        Ok(pair)
    }
}
