//! Levels of the tracked moving dot and their continuation in time.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::tridiag::{dot, EigenSweep, RawPair, TridiagonalHamiltonian};
use super::{build_hamiltonian, EigenPair, Grid};
use crate::params::{DerivedScales, DeviceConfig};
use crate::potential::DevicePotential;
use crate::{Error, Execution, Result};

/// A state belongs to the tracked well when at least this much of its
/// probability lies inside the well window.
pub const LOCALIZED_FRACTION: f64 = 0.5;
/// Minimum aligned overlap between consecutive samples.
pub const CONTINUITY_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellWindow {
    pub center: f64,
    pub width: f64,
}

impl WellWindow {
    pub fn lo(&self) -> f64 {
        self.center - 0.5 * self.width
    }
    pub fn hi(&self) -> f64 {
        self.center + 0.5 * self.width
    }
}

/// Default device grid in natural units: [−2λ, 2λ].
pub fn device_grid(config: &DeviceConfig, n_points: usize) -> Result<Grid> {
    let half = 2.0 * config.saw_wavelength / config.a;
    Grid::new(-half, half, n_points)
}

/// Natural-unit Hamiltonian of the channel at time `t` (natural units).
pub fn device_hamiltonian(potential: &DevicePotential, grid: &Grid, t: f64) -> Result<TridiagonalHamiltonian> {
    build_hamiltonian(grid, |z| potential.eval(z, t), 1.0)
}

/// Window of width λ around the SAW trough of the tracked dot, re-centred
/// on the grid minimum of the effective potential within ±λ/4.
pub fn well_window(potential: &DevicePotential, grid: &Grid, t: f64) -> WellWindow {
    let lambda = potential.wavelength();
    let trough = potential.tracked_trough(t);
    let range = grid.index_range(trough - 0.25 * lambda, trough + 0.25 * lambda);
    let center = range
        .map(|i| grid.point(i))
        .fold((trough, f64::INFINITY), |(bz, bv), z| {
            let v = potential.eval(z, t);
            if v < bv {
                (z, v)
            } else {
                (bz, bv)
            }
        })
        .0;
    WellWindow { center, width: lambda }
}

/// The lowest `count` eigenstates localized in `window`, in energy order,
/// with their window mass fractions. Near-degenerate groups (gap below
/// the solver's resolution) are rotated to diagonalize the window
/// projector, which picks the well-localized basis of the subspace.
pub fn well_levels(
    h: &TridiagonalHamiltonian,
    grid: &Grid,
    window: &WellWindow,
    count: usize,
) -> Result<(Vec<EigenPair>, Vec<f64>)> {
    if window.lo() < grid.z_min || window.hi() > grid.z_max {
        return Err(Error::WindowOutsideGrid { lo: window.lo(), hi: window.hi() });
    }
    let range = grid.index_range(window.lo(), window.hi());
    let floor = range
        .clone()
        .map(|i| h.diagonal[i] + 2.0 * h.off_diagonal[0])
        .fold(f64::INFINITY, f64::min);
    let degenerate = (1e-10f64).max(64.0 * f64::EPSILON * h.norm_inf());
    let window_mass = |v: &[f64]| v[range.clone()].iter().map(|x| x * x).sum::<f64>();

    // two guard levels below the window floor
    let mut sweep = EigenSweep::starting_at(h, h.sturm_count(floor).saturating_sub(2))?;
    let mut levels = Vec::with_capacity(count);
    let mut fractions = Vec::with_capacity(count);
    let mut group: Vec<RawPair> = Vec::new();

    let flush = |group: &mut Vec<RawPair>, levels: &mut Vec<EigenPair>, fractions: &mut Vec<f64>| {
        for raw in localize(std::mem::take(group), &range) {
            let f = window_mass(&raw.vector);
            if f >= LOCALIZED_FRACTION && levels.len() < count {
                let mut pair = EigenPair::from_raw(raw, grid);
                pair.index = levels.len();
                levels.push(pair);
                fractions.push(f);
            }
        }
    };

    while levels.len() < count && !sweep.exhausted() {
        let raw = sweep.advance()?;
        if let Some(last) = group.last() {
            if raw.value - last.value > degenerate {
                flush(&mut group, &mut levels, &mut fractions);
            }
        }
        group.push(raw);
    }
    flush(&mut group, &mut levels, &mut fractions);
    if levels.len() < count {
        return Err(Error::InsufficientLevels { wanted: count, found: levels.len(), time: f64::NAN });
    }
    Ok((levels, fractions))
}

fn localize(group: Vec<RawPair>, range: &std::ops::Range<usize>) -> Vec<RawPair> {
    if group.len() < 2 {
        return group;
    }
    let m = group.len();
    let proj = DMatrix::from_fn(m, m, |i, j| dot(&group[i].vector[range.clone()], &group[j].vector[range.clone()]));
    let eig = SymmetricEigen::new(proj);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let n = group[0].vector.len();
    order
        .iter()
        .enumerate()
        .map(|(slot, &col)| {
            let mut v = vec![0.0; n];
            for (j, g) in group.iter().enumerate() {
                let c = eig.eigenvectors[(j, col)];
                v.iter_mut().zip(&g.vector).for_each(|(x, y)| *x += c * y);
            }
            let value = group.iter().enumerate().map(|(j, g)| eig.eigenvectors[(j, col)].powi(2) * g.value).sum();
            let (imax, _) = v
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) });
            if v[imax] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            RawPair { index: group[slot].index, value, vector: v }
        })
        .collect()
}

/// Levels at one time sample, in energy order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstantLevels {
    pub levels: Vec<EigenPair>,
    pub window: WellWindow,
    pub fractions: Vec<f64>,
}

/// Time-ordered levels with identities aligned across samples.
///
/// `levels[i][n]` is tracked level `n` at `times[i]`; `continuity_map[i][n]`
/// is its energy-order position at that time. Energies and wavefunctions are
/// in the units of the solve closure (natural units for the device).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTrajectory {
    pub times: Vec<f64>,
    pub levels: Vec<Vec<EigenPair>>,
    pub continuity_map: Vec<Vec<usize>>,
    pub windows: Vec<WellWindow>,
    pub fractions: Vec<Vec<f64>>,
    /// Per tracked level, the smallest overlap between consecutive samples.
    pub min_overlap: Vec<f64>,
}

impl LevelTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn best_assignment(overlap: &[Vec<f64>]) -> Vec<usize> {
    let n = overlap.len();
    if n > 8 {
        // greedy for large sets
        let mut used = vec![false; n];
        return overlap
            .iter()
            .map(|row| {
                let j = (0..n)
                    .filter(|&j| !used[j])
                    .max_by(|&a, &b| row[a].total_cmp(&row[b]))
                    .expect("free column");
                used[j] = true;
                j
            })
            .collect();
    }
    fn search(row: usize, overlap: &[Vec<f64>], used: &mut Vec<bool>, cur: &mut Vec<usize>, score: f64, best: &mut (f64, Vec<usize>)) {
        if row == overlap.len() {
            if score > best.0 {
                *best = (score, cur.clone());
            }
            return;
        }
        for j in 0..overlap.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                search(row + 1, overlap, used, cur, score + overlap[row][j], best);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    search(0, overlap, &mut vec![false; n], &mut Vec::new(), 0.0, &mut best);
    best.1
}

/// Solve every sample (concurrently under `exec`), then fold over time
/// order aligning identities by maximal overlap and fixing signs so that
/// consecutive overlaps are positive.
pub fn track_with<F>(times: &[f64], grid: &Grid, exec: Execution, solve: F) -> Result<LevelTrajectory>
where
    F: Fn(f64) -> Result<InstantLevels> + Sync + Send,
{
    let increasing = times.windows(2).all(|w| w[1] > w[0]);
    let decreasing = times.windows(2).all(|w| w[1] < w[0]);
    if times.is_empty() || !(increasing || decreasing) {
        return Err(Error::NonMonotoneTimes);
    }
    let solved = exec.try_map(times, |&t| solve(t))?;
    let count = solved[0].levels.len();
    let mut traj = LevelTrajectory {
        times: times.to_vec(),
        levels: Vec::with_capacity(times.len()),
        continuity_map: Vec::with_capacity(times.len()),
        windows: Vec::with_capacity(times.len()),
        fractions: Vec::with_capacity(times.len()),
        min_overlap: vec![1.0; count],
    };
    for (step, inst) in solved.into_iter().enumerate() {
        let map: Vec<usize> = match traj.levels.last() {
            None => (0..count).collect(),
            Some(prev) => {
                let prev: &Vec<EigenPair> = prev;
                let overlap: Vec<Vec<f64>> = prev
                    .iter()
                    .map(|p| inst.levels.iter().map(|c| (dot(&p.wavefunction, &c.wavefunction) * grid.spacing).abs()).collect())
                    .collect();
                let map = best_assignment(&overlap);
                for (level, &j) in map.iter().enumerate() {
                    let o = overlap[level][j];
                    if o < CONTINUITY_FLOOR {
                        return Err(Error::ContinuityLoss { level, step: step - 1, next: step, overlap: o });
                    }
                    traj.min_overlap[level] = traj.min_overlap[level].min(o);
                }
                map
            }
        };
        let mut aligned: Vec<EigenPair> = map.iter().map(|&j| inst.levels[j].clone()).collect();
        if let Some(prev) = traj.levels.last() {
            for (cur, p) in aligned.iter_mut().zip(prev.iter()) {
                if dot(&cur.wavefunction, &p.wavefunction) < 0.0 {
                    cur.wavefunction.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        traj.fractions.push(map.iter().map(|&j| inst.fractions[j]).collect());
        traj.levels.push(aligned);
        traj.continuity_map.push(map);
        traj.windows.push(inst.window);
    }
    Ok(traj)
}

/// Levels of the tracked moving dot at SI times `times`.
pub fn track_levels(
    times: &[f64],
    config: &DeviceConfig,
    scales: &DerivedScales,
    grid: &Grid,
    count: usize,
    exec: Execution,
) -> Result<LevelTrajectory> {
    let potential = DevicePotential::natural(config, scales);
    let units = scales.units();
    track_with(times, grid, exec, |t_si| {
        let t = units.time_from_si(t_si);
        let h = device_hamiltonian(&potential, grid, t)?;
        let window = well_window(&potential, grid, t);
        let (levels, fractions) = well_levels(&h, grid, &window, count).map_err(|e| match e {
            Error::InsufficientLevels { wanted, found, .. } => Error::InsufficientLevels { wanted, found, time: t_si },
            other => other,
        })?;
        Ok(InstantLevels { levels, window, fractions })
    })
}

/// `n` midpoint samples of one SAW period, (i + ½)·T/n, SI seconds.
pub fn period_samples(scales: &DerivedScales, n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) * scales.period / n as f64).collect()
}

/// Index of the sample with the deepest tracked well, where depth is the
/// channel barrier crest (max of V over |z| ≤ a) minus the window minimum.
/// Ties within 1e-9 relative go to the earliest sample.
pub fn strongest_confinement(potential: &DevicePotential, grid: &Grid, times_natural: &[f64]) -> usize {
    let channel = grid.index_range(-potential.a, potential.a);
    let depths: Vec<f64> = times_natural
        .iter()
        .map(|&t| {
            let w = well_window(potential, grid, t);
            let crest = channel.clone().map(|i| potential.eval(grid.point(i), t)).fold(f64::NEG_INFINITY, f64::max);
            let floor = grid
                .index_range(w.lo(), w.hi())
                .map(|i| potential.eval(grid.point(i), t))
                .fold(f64::INFINITY, f64::min);
            crest - floor
        })
        .collect();
    let best = depths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    depths
        .iter()
        .position(|&d| d >= best - 1e-9 * best.abs())
        .unwrap_or(0)
}
