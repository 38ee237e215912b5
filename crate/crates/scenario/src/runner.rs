//! Runs resolved scenarios and writes their outputs.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use zeno_core::fock::partial_trace_mechanical;
use zeno_core::lindblad::{self, Diagnostics, LindbladModel};
use zeno_core::model::{FrameSpec, RotatingHamiltonian};
use zeno_core::observables::{self, WignerGrid};
use zeno_core::{DensityMatrix, Mode};

use crate::config::{RunSpec, ScenarioConfig};
use crate::csv::{self, ProbabilityTable};
use crate::error::{Result, ScenarioError};
use crate::report;

pub const SUMMARY_VERSION: u32 = 1;

/// Numerical result of one run, before any file is written.
#[derive(Clone, Debug)]
pub struct Simulation {
    /// Recorded times in units of 1/g.
    pub times: Vec<f64>,
    /// Mechanical populations over the full cutoff at each recorded time.
    pub populations: Vec<Vec<f64>>,
    pub final_state: DensityMatrix,
    /// Reduced mechanical state at the final time.
    pub final_mechanical: DensityMatrix,
    pub wigner: WignerGrid,
    pub fidelity: f64,
    pub negativity_volume: f64,
    pub diagnostics: Diagnostics,
}

impl Simulation {
    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().map_or(&[], Vec::as_slice)
    }

    /// `P_n` at every recorded time.
    pub fn series(&self, n: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p.get(n).copied().unwrap_or(0.0)).collect()
    }
}

/// Integrates one run from the joint ground state.
pub fn simulate(spec: &RunSpec) -> Result<Simulation> {
    let frame = FrameSpec::from_drives(&spec.params, &spec.drives);
    let h = RotatingHamiltonian::new(&spec.params, &spec.drives, &frame, spec.space);
    let model = LindbladModel::thermal(&spec.params, &h, spec.space)?;
    let traj = lindblad::evolve(&model, &DensityMatrix::ground(spec.space), &spec.integrator)?;
    let reduced = partial_trace_mechanical(&traj.final_state)?;
    let wigner = observables::wigner(&reduced, &spec.grid)?;
    Ok(Simulation {
        fidelity: observables::fidelity_fock(&reduced, spec.fidelity_target)?,
        negativity_volume: observables::negativity_volume(&wigner),
        times: traj.times,
        populations: traj.populations,
        final_state: traj.final_state,
        final_mechanical: reduced,
        wigner,
        diagnostics: traj.diagnostics,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub rate_unit_rad_per_s: f64,
    pub time_unit_s: f64,
    pub rate_unit: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub omega: f64,
    pub mechanical_omega: f64,
    pub g: f64,
    pub chi: f64,
    pub kappa: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    /// Angular frequencies in the internal rate unit.
    pub internal: RateSet,
    /// The same values as ordinary frequencies in Hz.
    pub hz_over_2pi: RateSet,
    pub thermal_occupation_optical: f64,
    pub thermal_occupation_mechanical: f64,
    pub bose_einstein_optical: Option<f64>,
    pub bose_einstein_mechanical: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveReport {
    pub mode: String,
    pub amplitude_internal: f64,
    pub frequency_internal: f64,
    pub amplitude_hz_over_2pi: f64,
    pub frequency_hz_over_2pi: f64,
    /// Tone frequency minus the frame frequency of its mode.
    pub offset_from_frame_internal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorReport {
    pub dt: f64,
    pub dt_s: f64,
    pub steps: usize,
    pub t_final: f64,
    pub t_final_s: f64,
    pub record_stride: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub target: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerReport {
    pub min: f64,
    pub max: f64,
    pub integral: f64,
    pub negativity_volume: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub cutoff_optical: usize,
    pub cutoff_mechanical: usize,
    /// Time step of the enlarged run, refined if the base step was unstable there.
    pub dt: f64,
    /// `|ΔP_n|` for n up to the base mechanical cutoff, then `|Δfidelity|`.
    pub deltas: Vec<f64>,
    /// Absent when the enlarged run failed.
    pub max_delta: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the enlarged run itself failed.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub summary_version: u32,
    pub label: String,
    /// `ok` or `convergence_failed`.
    pub status: String,
    pub units: Units,
    pub params: ResolvedParams,
    pub frame_internal: [f64; 2],
    pub drives: Vec<DriveReport>,
    pub cutoffs: [usize; 2],
    pub integrator: IntegratorReport,
    pub final_probabilities: Vec<f64>,
    pub one_minus_p0_p1: f64,
    pub fidelity: FidelityReport,
    pub wigner: WignerReport,
    pub diagnostics: DiagnosticsReport,
    pub convergence: Option<ConvergenceReport>,
    /// Explicit config that reproduces this run.
    pub config: ScenarioConfig,
}

fn rate_set(p: &zeno_core::model::SystemParams, scale: f64) -> RateSet {
    RateSet {
        omega: p.omega * scale,
        mechanical_omega: p.mechanical_omega * scale,
        g: p.g * scale,
        chi: p.chi * scale,
        kappa: p.kappa * scale,
        gamma: p.gamma * scale,
    }
}

/// Largest shift of the reported observables between two runs.
pub fn convergence_deltas(base: &Simulation, enlarged: &Simulation, levels: usize) -> Vec<f64> {
    let a = base.final_populations();
    let b = enlarged.final_populations();
    let mut deltas: Vec<f64> = (0..=levels).map(|n| (a[n] - b[n]).abs()).collect();
    deltas.push((base.fidelity - enlarged.fidelity).abs());
    deltas
}

/// Step refinements tried when the enlarged run exceeds the RK4 stability
/// bound: larger cutoffs widen the spectrum of the generator.
pub const CONVERGENCE_REFINEMENTS: u32 = 2;

/// Runs the cutoff-increment check for `spec`.
pub fn check_convergence(spec: &RunSpec, base: &Simulation) -> Option<ConvergenceReport> {
    let check = spec.convergence?;
    let mut bigger = spec.enlarged(check.increment);
    let mut attempt = 0;
    let result = loop {
        info!(
            "{}: convergence run at cutoffs ({}, {}), dt = {:e}",
            spec.label, bigger.space.cutoff_a, bigger.space.cutoff_b, bigger.integrator.dt
        );
        match simulate(&bigger) {
            Err(ScenarioError::Core(zeno_core::Error::IntegratorUnstable { .. })) if attempt < CONVERGENCE_REFINEMENTS => {
                attempt += 1;
                bigger = bigger.refined();
            }
            other => break other,
        }
    };
    let mut report = ConvergenceReport {
        cutoff_optical: bigger.space.cutoff_a,
        cutoff_mechanical: bigger.space.cutoff_b,
        dt: bigger.integrator.dt,
        deltas: Vec::new(),
        max_delta: None,
        tolerance: check.tolerance,
        passed: false,
        error: None,
    };
    match result {
        Ok(sim) => {
            let deltas = convergence_deltas(base, &sim, spec.space.cutoff_b);
            let max_delta = deltas.iter().copied().fold(0.0, f64::max);
            report.passed = max_delta < check.tolerance;
            report.max_delta = Some(max_delta);
            report.deltas = deltas;
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    Some(report)
}

pub fn summarize(spec: &RunSpec, sim: &Simulation, convergence: Option<ConvergenceReport>) -> Summary {
    let unit = spec.unit_rad_per_s;
    let hz = unit / (2.0 * std::f64::consts::PI);
    let frame = FrameSpec::from_drives(&spec.params, &spec.drives);
    let finals = sim.final_populations();
    let passed = convergence.as_ref().is_none_or(|c| c.passed);
    Summary {
        summary_version: SUMMARY_VERSION,
        label: spec.label.clone(),
        status: if passed { "ok" } else { "convergence_failed" }.to_string(),
        units: Units {
            rate_unit_rad_per_s: unit,
            time_unit_s: 1.0 / unit,
            rate_unit: if spec.params.g == 0.0 { "2pi x 1 MHz" } else { "g" }.to_string(),
        },
        params: ResolvedParams {
            internal: rate_set(&spec.params, 1.0),
            hz_over_2pi: rate_set(&spec.params, hz),
            thermal_occupation_optical: spec.params.thermal_optical,
            thermal_occupation_mechanical: spec.params.thermal_mechanical,
            bose_einstein_optical: spec.bose_einstein.map(|b| b.0),
            bose_einstein_mechanical: spec.bose_einstein.map(|b| b.1),
        },
        frame_internal: [frame.optical, frame.mechanical],
        drives: spec
            .drives
            .iter()
            .map(|d| DriveReport {
                mode: match d.mode {
                    Mode::Optical => "optical",
                    Mode::Mechanical => "mechanical",
                }
                .to_string(),
                amplitude_internal: d.amplitude,
                frequency_internal: d.frequency,
                amplitude_hz_over_2pi: d.amplitude * hz,
                frequency_hz_over_2pi: d.frequency * hz,
                offset_from_frame_internal: d.frequency - frame.frequency(d.mode),
            })
            .collect(),
        cutoffs: [spec.space.cutoff_a, spec.space.cutoff_b],
        integrator: IntegratorReport {
            dt: sim.diagnostics.dt,
            dt_s: sim.diagnostics.dt / unit,
            steps: sim.diagnostics.steps,
            t_final: spec.integrator.t_final,
            t_final_s: spec.integrator.t_final / unit,
            record_stride: spec.integrator.record_stride,
        },
        final_probabilities: finals[..=spec.probabilities_up_to].to_vec(),
        one_minus_p0_p1: 1.0 - finals[0] - finals[1],
        fidelity: FidelityReport {
            target: spec.fidelity_target,
            value: sim.fidelity,
        },
        wigner: WignerReport {
            min: sim.wigner.min(),
            max: sim.wigner.max(),
            integral: sim.wigner.integral(),
            negativity_volume: sim.negativity_volume,
            points: sim.wigner.x.len() * sim.wigner.p.len(),
        },
        diagnostics: DiagnosticsReport {
            max_trace_drift: sim.diagnostics.max_trace_drift,
            min_eigenvalue: sim.diagnostics.min_eigenvalue,
            max_hermiticity_defect: sim.diagnostics.max_hermiticity_defect,
        },
        convergence,
        config: spec.config.clone(),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| ScenarioError::io(path, e))
}

/// Writes `probabilities.csv`, `wigner_final.csv` and `summary.json`.
pub fn write_outputs(dir: &Path, spec: &RunSpec, sim: &Simulation, summary: &Summary) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| ScenarioError::io(dir, e))?;
    let table = ProbabilityTable {
        times: sim.times.iter().map(|&t| spec.seconds(t)).collect(),
        rows: sim
            .populations
            .iter()
            .map(|p| p[..=spec.probabilities_up_to].to_vec())
            .collect(),
    };
    write(&dir.join("probabilities.csv"), &csv::write_probabilities(&table, spec.seconds(1.0)))?;
    write(&dir.join("wigner_final.csv"), &csv::write_wigner(&sim.wigner))?;
    let mut json = serde_json::to_string_pretty(summary).map_err(|e| ScenarioError::Parse {
        what: "summary".into(),
        reason: e.to_string(),
    })?;
    json.push('\n');
    write(&dir.join("summary.json"), &json)
}

/// Outcome of one run that produced files.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub label: String,
    pub dir: PathBuf,
    pub summary: Summary,
}

impl RunOutcome {
    pub fn converged(&self) -> bool {
        self.summary.status == "ok"
    }
}

/// Simulates, checks convergence and writes every output of one run.
pub fn run_spec(spec: &RunSpec, dir: &Path) -> Result<RunOutcome> {
    info!("{}: integrating {} steps at cutoffs ({}, {})", spec.label, spec.integrator.steps(), spec.space.cutoff_a, spec.space.cutoff_b);
    let sim = simulate(spec)?;
    let convergence = check_convergence(spec, &sim);
    let summary = summarize(spec, &sim, convergence);
    write_outputs(dir, spec, &sim, &summary)?;
    if spec.zeno_report {
        report::write_report(&report::analyse(spec)?, dir)?;
    }
    if summary.status != "ok" {
        warn!("{}: cutoff convergence check failed", spec.label);
    }
    Ok(RunOutcome {
        label: spec.label.clone(),
        dir: dir.to_path_buf(),
        summary,
    })
}

/// Results of every run of a scenario, in config order.
#[derive(Debug)]
pub struct ScenarioOutcome {
    pub runs: Vec<(String, Result<RunOutcome>)>,
}

impl ScenarioOutcome {
    /// 0 when every run finished and converged; otherwise the most severe
    /// run status (3 for numerical failures).
    pub fn exit_code(&self) -> i32 {
        self.runs
            .iter()
            .map(|(_, r)| match r {
                Ok(o) if o.converged() => 0,
                Ok(_) => 3,
                Err(e) => e.exit_code(),
            })
            .max()
            .unwrap_or(0)
    }

    /// First failure, for reporting.
    pub fn first_error(&self) -> Option<String> {
        self.runs.iter().find_map(|(label, r)| match r {
            Err(e) => Some(format!("{label}: {e}")),
            Ok(o) if !o.converged() => {
                let c = o.summary.convergence.as_ref()?;
                Some(match &c.error {
                    Some(msg) => format!("{label}: convergence run failed: {msg}"),
                    None => ScenarioError::Convergence {
                        label: label.clone(),
                        delta: c.max_delta.unwrap_or(f64::INFINITY),
                        tolerance: c.tolerance,
                    }
                    .to_string(),
                })
            }
            Ok(_) => None,
        })
    }
}

/// Resolves `cfg` and executes its runs in parallel. A single run writes
/// into `out`; several runs write into `out/<label>/`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<ScenarioOutcome> {
    let specs = cfg.resolve()?;
    let single = specs.len() == 1;
    let dirs: Vec<PathBuf> = specs
        .iter()
        .map(|s| if single { out.to_path_buf() } else { out.join(&s.label) })
        .collect();
    let results: Vec<Result<RunOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .zip(&dirs)
            .map(|(spec, dir)| scope.spawn(move || run_spec(spec, dir)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    });
    Ok(ScenarioOutcome {
        runs: specs.into_iter().map(|s| s.label).zip(results).collect(),
    })
}
