//! Zeno subspace report: rotating spectrum, degeneracy classes and the
//! torus picture of the drive resonances.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use zeno_core::model::FrameSpec;
use zeno_core::zeno::{self, SpectrumTable, TorusCoordinates, ZenoPartition};
use zeno_core::Mode;

use crate::config::{RunSpec, ScenarioConfig};
use crate::csv::num;
use crate::error::{Result, ScenarioError};

#[derive(Clone, Debug)]
pub struct ZenoReport {
    /// Frame of the spectrum (see [`report_frame`]).
    pub frame: FrameSpec,
    /// Wrapping periods of the torus.
    pub periods: FrameSpec,
    pub spectrum: SpectrumTable,
    pub tolerance: f64,
    pub partition: ZenoPartition,
    pub torus: TorusCoordinates,
}

/// Frame of the first tone on each mode. An undriven mode is left in the
/// lab frame, so its levels are not folded together by a wrapping that no
/// drive provides.
pub fn report_frame(spec: &RunSpec) -> FrameSpec {
    let first = |mode: Mode| spec.drives.iter().find(|d| d.mode == mode).map_or(0.0, |d| d.frequency);
    FrameSpec::new(first(Mode::Optical), first(Mode::Mechanical))
}

pub fn analyse(spec: &RunSpec) -> Result<ZenoReport> {
    let frame = report_frame(spec);
    let spectrum = zeno::rotating_spectrum(&spec.params, &frame, spec.space);
    let range = spectrum.range();
    let tolerance = spec.zeno_relative_tolerance * if range > 0.0 { range } else { 1.0 };
    let partition = zeno::detect_subspaces(&spectrum, tolerance)?;
    // torus periods fall back to the bare frequencies of undriven modes
    let drive = FrameSpec::from_drives(&spec.params, &spec.drives);
    let torus = zeno::torus_coordinates(&spec.params, drive.optical, drive.mechanical, spec.space)?;
    Ok(ZenoReport {
        frame,
        periods: drive,
        spectrum,
        tolerance,
        partition,
        torus,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntryJson {
    pub n: usize,
    pub m: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub units: String,
    pub frame_internal: [f64; 2],
    pub cutoffs: [usize; 2],
    pub entries: Vec<SpectrumEntryJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassJson {
    pub id: usize,
    pub eigenvalue: f64,
    /// `[n, m]` pairs.
    pub members: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub tolerance: f64,
    pub class_count: usize,
    pub classes: Vec<ClassJson>,
}

impl ZenoReport {
    pub fn spectrum_json(&self) -> SpectrumJson {
        SpectrumJson {
            units: "angular frequency in units of the internal rate unit".into(),
            frame_internal: [self.frame.optical, self.frame.mechanical],
            cutoffs: [self.spectrum.space.cutoff_a, self.spectrum.space.cutoff_b],
            entries: self
                .spectrum
                .entries
                .iter()
                .map(|e| SpectrumEntryJson {
                    n: e.n,
                    m: e.m,
                    value: e.value,
                })
                .collect(),
        }
    }

    pub fn partition_json(&self) -> PartitionJson {
        PartitionJson {
            tolerance: self.tolerance,
            class_count: self.partition.len(),
            classes: (0..self.partition.len())
                .map(|id| ClassJson {
                    id,
                    eigenvalue: self.partition.classes[id].eigenvalue,
                    members: self
                        .partition
                        .members_as_levels(id)
                        .into_iter()
                        .map(|(n, m)| [n, m])
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn torus_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# basis states on the drive torus; x, y in internal rate units, angles in radians\n");
        let _ = writeln!(
            out,
            "# periods: optical {} , mechanical {}",
            num(self.periods.optical),
            num(self.periods.mechanical)
        );
        out.push_str("n,m,x,y,theta1,theta2,class_id\n");
        for p in &self.torus.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.n,
                p.m,
                num(p.x),
                num(p.y),
                num(p.theta1),
                num(p.theta2),
                self.partition.class_of_state(p.n, p.m)
            );
        }
        out
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| ScenarioError::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| ScenarioError::Parse {
        what: "report".into(),
        reason: e.to_string(),
    })?;
    s.push('\n');
    Ok(s)
}

/// Writes `spectrum.json`, `partition.json` and `torus.csv` into `dir`.
pub fn write_report(report: &ZenoReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| ScenarioError::io(dir, e))?;
    write(&dir.join("spectrum.json"), &to_json(&report.spectrum_json())?)?;
    write(&dir.join("partition.json"), &to_json(&report.partition_json())?)?;
    write(&dir.join("torus.csv"), &report.torus_csv())
}

/// Report for a scenario. Sweeps only change amplitudes, so the first run
/// stands for all of them.
pub fn zeno_report(cfg: &ScenarioConfig, out: &Path) -> Result<ZenoReport> {
    let specs = cfg.resolve()?;
    let report = analyse(&specs[0])?;
    write_report(&report, out)?;
    Ok(report)
}
