use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use flyqubit::params::{DerivedScales, DeviceConfig};
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    Si,
    Natural,
}

/// Column conversion from the core's natural units or from SI.
#[derive(Debug, Clone, Copy)]
pub struct Columns {
    pub system: UnitSystem,
    pub length: f64,
    pub energy: f64,
    pub time: f64,
}

impl Columns {
    pub fn new(system: UnitSystem, scales: &DerivedScales) -> Self {
        Self { system, length: scales.natural_length, energy: scales.natural_energy, time: scales.natural_time }
    }

    fn si(&self) -> bool {
        self.system == UnitSystem::Si
    }

    fn header(&self, si: &str, natural: &str) -> String {
        if self.si() { si.into() } else { natural.into() }
    }

    pub fn time_header(&self) -> String {
        self.header("t_s", "t_nat")
    }

    pub fn length_header(&self) -> String {
        self.header("z_m", "z_nat")
    }

    /// `name` with the unit suffix, e.g. energy_J / energy_nat.
    pub fn energy_header(&self, name: &str) -> String {
        self.header(&format!("{name}_J"), &format!("{name}_nat"))
    }

    pub fn psi_header(&self) -> String {
        self.header("psi_per_sqrt_m", "psi_nat")
    }

    pub fn time_si(&self, t: f64) -> f64 {
        if self.si() { t } else { t / self.time }
    }

    pub fn length_nat(&self, z: f64) -> f64 {
        if self.si() { z * self.length } else { z }
    }

    pub fn energy_nat(&self, e: f64) -> f64 {
        if self.si() { e * self.energy } else { e }
    }

    /// ψ is normalized over z; in SI it carries 1/√m.
    pub fn psi_nat(&self, psi: f64) -> f64 {
        if self.si() { psi / self.length.sqrt() } else { psi }
    }
}

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Collects output files and writes them under one directory.
pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn csv(&mut self, name: &str, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Failure::io(&path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(header).map_err(|e| Failure::io(&path, e))?;
        for row in rows {
            w.write_record(&row).map_err(|e| Failure::io(&path, e))?;
        }
        w.flush().map_err(|e| Failure::io(&path, e))?;
        self.written.push(name.into());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
        text.push('\n');
        let mut f = fs::File::create(&path).map_err(|e| Failure::io(&path, e))?;
        f.write_all(text.as_bytes()).map_err(|e| Failure::io(&path, e))?;
        self.written.push(name.into());
        Ok(())
    }

    /// The manifest is the only file carrying volatile fields.
    pub fn finish(mut self, subcommand: &str, config: &DeviceConfig, scales: &DerivedScales, units: UnitSystem, wall_time: f64) -> Result<(), Failure> {
        let mut outputs = self.written.clone();
        outputs.push("run_manifest.json".into());
        let manifest = RunManifest {
            subcommand,
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            derived_scales: scales,
            units,
            outputs,
            wall_time_s: wall_time,
        };
        self.json("run_manifest.json", &manifest)
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    tool_version: &'a str,
    config: &'a DeviceConfig,
    derived_scales: &'a DerivedScales,
    units: UnitSystem,
    outputs: Vec<String>,
    wall_time_s: f64,
}
