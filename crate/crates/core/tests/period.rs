use flyqubit::analysis::{AnalysisSettings, QubitAnalysis};
use flyqubit::eigensolver::{device_grid, track_levels};
use flyqubit::params::{derive_scales, DeviceConfig, PhysicalConstants};
use flyqubit::Execution;

const K: PhysicalConstants = PhysicalConstants::CODATA;

fn period_times(cfg: &DeviceConfig, n: usize) -> Vec<f64> {
    let s = derive_scales(cfg, &K).unwrap();
    (0..n).map(|i| s.period * i as f64 / n as f64).collect()
}

#[test]
fn sixty_four_samples_keep_levels_continuous() {
    let cfg = DeviceConfig::default();
    let s = derive_scales(&cfg, &K).unwrap();
    let grid = device_grid(&cfg, 4096).unwrap();
    let traj = track_levels(&period_times(&cfg, 64), &cfg, &s, &grid, 3, Execution::default()).unwrap();
    for (n, &o) in traj.min_overlap.iter().enumerate() {
        assert!(o >= 0.9, "level {n}: min overlap {o}");
    }
}

#[test]
fn reversed_times_give_reversed_trajectory() {
    let cfg = DeviceConfig::default();
    let s = derive_scales(&cfg, &K).unwrap();
    let grid = device_grid(&cfg, 1024).unwrap();
    let times = period_times(&cfg, 64);
    let forward = track_levels(&times, &cfg, &s, &grid, 2, Execution::Sequential).unwrap();
    let rev: Vec<f64> = times.iter().rev().copied().collect();
    let backward = track_levels(&rev, &cfg, &s, &grid, 2, Execution::Sequential).unwrap();
    for (i, j) in (0..times.len()).zip((0..times.len()).rev()) {
        for n in 0..2 {
            let (a, b) = (forward.levels[i][n].energy, backward.levels[j][n].energy);
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "sample {i} level {n}: {a} vs {b}");
        }
    }
}

#[test]
fn parallel_and_sequential_tracking_agree() {
    let cfg = DeviceConfig::default();
    let s = derive_scales(&cfg, &K).unwrap();
    let grid = device_grid(&cfg, 1024).unwrap();
    let times = period_times(&cfg, 32);
    let a = track_levels(&times, &cfg, &s, &grid, 2, Execution::Sequential).unwrap();
    let b = track_levels(&times, &cfg, &s, &grid, 2, Execution::default()).unwrap();
    for (x, y) in a.levels.iter().flatten().zip(b.levels.iter().flatten()) {
        assert_eq!(x.energy.to_bits(), y.energy.to_bits());
    }
}

// A SAW-confined well is near harmonic: ΔE² ∝ V_S and ⟨1|z|0⟩ ∝ V_S^(-1/4),
// so β ∝ V_S^(-1/4) and doubling the amplitude lowers it.
#[test]
fn stronger_saw_lowers_max_beta() {
    let settings = AnalysisSettings { grid_points: 2048, ..AnalysisSettings::default() };
    let beta = |gamma: f64| {
        QubitAnalysis::run(&DeviceConfig::default().with_gamma(gamma), &K, &settings).unwrap().max_beta()
    };
    let (half, full) = (beta(0.5), beta(1.0));
    assert!(full < half, "max beta at gamma 1 {full} vs 0.5 {half}");
}
