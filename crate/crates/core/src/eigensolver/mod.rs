//! Instantaneous spectrum of the channel Hamiltonian on a uniform grid.
//!
//! Discretization is the 3-point central difference with Dirichlet
//! boundaries (ψ = 0 one spacing outside each end of the grid).

mod tracking;
mod tridiag;

pub use tracking::{
    device_grid, device_hamiltonian, period_samples, strongest_confinement, track_levels,
    track_with, well_levels, well_window, InstantLevels, LevelTrajectory, WellWindow,
    LOCALIZED_FRACTION,
};
pub use tridiag::TridiagonalHamiltonian;

use serde::Serialize;
use tridiag::{EigenSweep, RawPair};

use crate::{Error, Result};

/// Bound-state mass-fraction threshold.
pub const BOUND_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
    pub spacing: f64,
}

impl Grid {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        if !(z_min.is_finite() && z_max.is_finite()) || z_min >= z_max {
            return Err(Error::InvalidGrid(format!("degenerate extent [{z_min}, {z_max}]")));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points, got {n_points}")));
        }
        Ok(Self {
            z_min,
            z_max,
            n_points,
            spacing: (z_max - z_min) / (n_points - 1) as f64,
        })
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.z_max
        } else {
            self.z_min + i as f64 * self.spacing
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Index range of points inside `[lo, hi]`.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let first = ((lo - self.z_min) / self.spacing).ceil().max(0.0) as usize;
        let last = ((hi - self.z_min) / self.spacing).floor();
        let end = if last < 0.0 { 0 } else { (last as usize + 1).min(self.n_points) };
        first.min(end)..end
    }
}

pub fn build_grid(z_min: f64, z_max: f64, n_points: usize) -> Result<Grid> {
    Grid::new(z_min, z_max, n_points)
}

/// Energy eigenvalue with a grid wavefunction normalized so that
/// Σ|ψᵢ|²·h = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub energy: f64,
    pub wavefunction: Vec<f64>,
    pub index: usize,
}

impl EigenPair {
    pub(crate) fn from_raw(raw: RawPair, grid: &Grid) -> Self {
        let scale = 1.0 / grid.spacing.sqrt();
        Self {
            energy: raw.value,
            wavefunction: raw.vector.into_iter().map(|x| x * scale).collect(),
            index: raw.index,
        }
    }

    pub fn norm(&self, grid: &Grid) -> f64 {
        self.wavefunction.iter().map(|x| x * x).sum::<f64>() * grid.spacing
    }
}

/// Assemble −κ d²/dz² + V(z) with κ = ħ²/(2m*) in the caller's units
/// (κ = 1 in natural units).
pub fn build_hamiltonian<V>(grid: &Grid, potential: V, kinetic: f64) -> Result<TridiagonalHamiltonian>
where
    V: Fn(f64) -> f64,
{
    let h2 = grid.spacing * grid.spacing;
    let diagonal: Vec<f64> = grid.points().map(|z| 2.0 * kinetic / h2 + potential(z)).collect();
    let off_diagonal = vec![-kinetic / h2; grid.n_points - 1];
    TridiagonalHamiltonian::new(diagonal, off_diagonal)
}

/// The `count` lowest eigenpairs, energies nondecreasing.
pub fn solve_lowest(h: &TridiagonalHamiltonian, count: usize, grid: &Grid) -> Result<Vec<EigenPair>> {
    if count == 0 || count > h.dim() {
        return Err(Error::LevelCount { requested: count, dim: h.dim() });
    }
    if h.dim() != grid.n_points {
        return Err(Error::GridMismatch { left: h.dim(), right: grid.n_points });
    }
    let mut sweep = EigenSweep::starting_at(h, 0)?;
    (0..count).map(|_| sweep.advance().map(|r| EigenPair::from_raw(r, grid))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundClass {
    pub bound: bool,
    pub mass_fraction: f64,
}

/// Probability inside `well_center ± well_width/2`.
pub fn window_fraction(pair: &EigenPair, grid: &Grid, well_center: f64, well_width: f64) -> Result<f64> {
    if !(well_width > 0.0) {
        return Err(Error::NonPositive("well width"));
    }
    let lo = well_center - 0.5 * well_width;
    let hi = well_center + 0.5 * well_width;
    if lo < grid.z_min || hi > grid.z_max {
        return Err(Error::WindowOutsideGrid { lo, hi });
    }
    let range = grid.index_range(lo, hi);
    Ok(pair.wavefunction[range].iter().map(|x| x * x).sum::<f64>() * grid.spacing)
}

pub fn classify_bound(pair: &EigenPair, grid: &Grid, well_center: f64, well_width: f64) -> Result<BoundClass> {
    let mass_fraction = window_fraction(pair, grid, well_center, well_width)?;
    Ok(BoundClass { bound: mass_fraction >= BOUND_FRACTION, mass_fraction })
}

/// ⟨bra| f |ket⟩ = Σ ψ_bra(zᵢ) f(zᵢ) ψ_ket(zᵢ) h.
pub fn matrix_element<F>(bra: &EigenPair, ket: &EigenPair, f: F, grid: &Grid) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let n = grid.n_points;
    if bra.wavefunction.len() != n || ket.wavefunction.len() != n {
        return Err(Error::GridMismatch { left: bra.wavefunction.len(), right: ket.wavefunction.len() });
    }
    let s: f64 = grid
        .points()
        .zip(bra.wavefunction.iter().zip(&ket.wavefunction))
        .map(|(z, (a, b))| a * f(z) * b)
        .sum();
    Ok(s * grid.spacing)
}
