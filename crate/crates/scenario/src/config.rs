//! Scenario configuration.
//!
//! Configs are TOML documents whose keys may be written flat with dots
//! (`params.g_hz_over_2pi = 2.7e6`) or as tables. Every field is optional so
//! that a file can layer on top of a preset; [`ScenarioConfig::resolve`]
//! fills defaults, converts to internal units and expands sweeps into runs.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use log::info;
use serde::{Deserialize, Serialize};
use zeno_core::lindblad::{IntegratorConfig, Recording};
use zeno_core::model::{self, BlockadeTarget, DriveTone, SystemParams};
use zeno_core::observables::GridAxes;
use zeno_core::{HilbertSpec, Mode};

use crate::error::{Result, ScenarioError};
use crate::presets;

/// Rate unit used when `g = 0`: 2π × 1 MHz.
pub const FALLBACK_UNIT_RAD_PER_S: f64 = 2.0 * PI * 1e6;

pub const DEFAULT_CUTOFF_OPTICAL: usize = 5;
pub const DEFAULT_CUTOFF_MECHANICAL: usize = 7;
pub const DEFAULT_DT_PER_PERIOD: u32 = 200;
pub const DEFAULT_T_FINAL_TIMES_G: f64 = 8.0 * PI;
pub const DEFAULT_RECORD_STRIDE: usize = 1;
pub const DEFAULT_FIDELITY_TARGET: usize = 1;
pub const DEFAULT_CONVERGENCE_INCREMENT: usize = 2;
pub const DEFAULT_CONVERGENCE_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_WIGNER_MIN: f64 = -4.0;
pub const DEFAULT_WIGNER_MAX: f64 = 4.0;
pub const DEFAULT_WIGNER_POINTS: usize = 81;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Optical,
    Mechanical,
}

impl From<ModeName> for Mode {
    fn from(m: ModeName) -> Mode {
        match m {
            ModeName::Optical => Mode::Optical,
            ModeName::Mechanical => Mode::Mechanical,
        }
    }
}

impl fmt::Display for ModeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeName::Optical => "optical",
            ModeName::Mechanical => "mechanical",
        })
    }
}

/// Physical parameters; frequencies and rates are ordinary frequencies
/// (value/2π) in Hz.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_hz_over_2pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mechanical_omega_hz_over_2pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_hz_over_2pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_hz_over_2pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_hz_over_2pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_hz_over_2pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
    /// Replaces the Bose-Einstein value computed from `temperature_k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal_occupation_optical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal_occupation_mechanical: Option<f64>,
}

/// One drive tone. Exactly one amplitude key and one frequency key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub mode: ModeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_over_g: Option<f64>,
    /// Input power in watts, converted with the mode's decay rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz_over_2pi: Option<f64>,
    /// Offset from the driven mode's bare frequency, in units of g.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_over_g: Option<f64>,
    /// Blockade frequency for this many quanta of the other mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blockade_count: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One run per value, replacing the amplitude of the first optical tone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_amplitudes_over_g: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mechanical: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    /// Steps per coupling period 2π/|g|.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_per_period: Option<u32>,
    /// Final time as the dimensionless product g·t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final_times_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities_up_to: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeno_report: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_target: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabled: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub increment: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZenoSection {
    /// Degeneracy tolerance relative to the spectral range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drives: Option<Vec<DriveSection>>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub cutoffs: CutoffSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub outputs: OutputSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub zeno: ZenoSection,
}

macro_rules! overlay {
    ($section:literal, $base:expr, $over:expr, [$($field:ident),* $(,)?]) => {
        $(
            if let Some(v) = &$over.$field {
                if $base.$field.as_ref() != Some(v) {
                    info!(
                        "override {}.{} = {:?} (was {:?})",
                        $section,
                        stringify!($field),
                        v,
                        $base.$field
                    );
                }
                $base.$field = Some(v.clone());
            }
        )*
    };
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse {
            what: "TOML config".into(),
            reason: e.to_string(),
        })
    }

    /// Accepts a config serialized as JSON, or a `summary.json` whose
    /// `config` member holds the resolved config of the run.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let parse_err = |e: serde_json::Error| ScenarioError::Parse {
            what: "JSON config".into(),
            reason: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(parse_err)?;
        let inner = match value.get("config") {
            Some(c) if value.get("summary_version").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(parse_err)
    }

    /// Picks the parser by extension: `.json` or TOML otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        let mut cfg = presets::preset(name)?;
        cfg.preset = Some(name.to_string());
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| ScenarioError::Parse {
            what: "config for TOML output".into(),
            reason: e.to_string(),
        })
    }

    /// Layers every field set in `over` on top of `self`, logging each change.
    pub fn overlay(&mut self, over: &ScenarioConfig) {
        let (b, o) = (&mut self.params, &over.params);
        overlay!(
            "params",
            b,
            o,
            [
                omega_hz_over_2pi,
                mechanical_omega_hz_over_2pi,
                g_hz_over_2pi,
                chi_hz_over_2pi,
                kappa_hz_over_2pi,
                gamma_hz_over_2pi,
                temperature_k,
                thermal_occupation_optical,
                thermal_occupation_mechanical,
            ]
        );
        if let Some(d) = &over.drives {
            if self.drives.as_ref() != Some(d) {
                info!("override drives with {} explicit tone(s)", d.len());
            }
            self.drives = Some(d.clone());
        }
        overlay!("sweep", self.sweep, over.sweep, [optical_amplitudes_over_g]);
        overlay!("cutoffs", self.cutoffs, over.cutoffs, [optical, mechanical]);
        overlay!(
            "integrator",
            self.integrator,
            over.integrator,
            [dt_per_period, t_final_times_g, record_stride]
        );
        overlay!(
            "outputs",
            self.outputs,
            over.outputs,
            [
                probabilities_up_to,
                wigner_min,
                wigner_max,
                wigner_points,
                zeno_report,
                fidelity_target,
            ]
        );
        overlay!("convergence", self.convergence, over.convergence, [enabled, increment, tolerance]);
        overlay!("zeno", self.zeno, over.zeno, [relative_tolerance]);
    }

    /// The preset (if named) with this config's explicit fields on top.
    pub fn effective(&self) -> Result<ScenarioConfig> {
        match &self.preset {
            Some(name) => {
                let mut base = ScenarioConfig::from_preset(name)?;
                base.overlay(self);
                Ok(base)
            }
            None => Ok(self.clone()),
        }
    }

    /// Expands the config into fully specified runs.
    pub fn resolve(&self) -> Result<Vec<RunSpec>> {
        let cfg = self.effective()?;
        let amplitudes = match &cfg.sweep.optical_amplitudes_over_g {
            None => None,
            Some(v) if v.is_empty() => return Err(ScenarioError::validation("sweep.optical_amplitudes_over_g is empty")),
            Some(v) => Some(v.clone()),
        };
        let base_label = cfg.preset.clone().unwrap_or_else(|| "run".to_string());
        let mut runs = Vec::new();
        match amplitudes {
            None => runs.push(resolve_single(&cfg, base_label)?),
            Some(values) => {
                let mut cfg = cfg.clone();
                cfg.sweep.optical_amplitudes_over_g = None;
                let drives = cfg.drives.clone().unwrap_or_default();
                let first = drives
                    .iter()
                    .position(|d| d.mode == ModeName::Optical)
                    .ok_or_else(|| ScenarioError::validation("sweep needs an optical drive"))?;
                for value in values {
                    let mut run = cfg.clone();
                    let mut d = drives.clone();
                    d[first].amplitude_over_g = Some(value);
                    d[first].power_w = None;
                    run.drives = Some(d);
                    runs.push(resolve_single(&run, format!("e_over_g_{value}"))?);
                }
            }
        }
        let mut labels: Vec<&str> = runs.iter().map(|r| r.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(ScenarioError::validation("sweep values must be distinct"));
        }
        Ok(runs)
    }
}

/// Cutoff-increment re-run settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceCheck {
    pub increment: usize,
    pub tolerance: f64,
}

/// A single fully resolved run in internal units (rate unit = g).
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub label: String,
    /// Explicit config reproducing exactly this run.
    pub config: ScenarioConfig,
    /// Internal rate unit in rad/s.
    pub unit_rad_per_s: f64,
    pub params: SystemParams,
    /// Bose-Einstein occupations at the configured temperature, if one was given.
    pub bose_einstein: Option<(f64, f64)>,
    pub drives: Vec<DriveTone>,
    pub space: HilbertSpec,
    pub integrator: IntegratorConfig,
    pub probabilities_up_to: usize,
    pub grid: GridAxes,
    pub zeno_report: bool,
    pub fidelity_target: usize,
    pub convergence: Option<ConvergenceCheck>,
    pub zeno_relative_tolerance: f64,
}

impl RunSpec {
    pub fn seconds(&self, t: f64) -> f64 {
        t / self.unit_rad_per_s
    }

    /// Same run with both cutoffs raised by `by`.
    pub fn enlarged(&self, by: usize) -> RunSpec {
        let mut out = self.clone();
        out.space = self.space.enlarged(by);
        out.config.cutoffs.optical = Some(out.space.cutoff_a);
        out.config.cutoffs.mechanical = Some(out.space.cutoff_b);
        out
    }

    /// Same run with the time step halved.
    pub fn refined(&self) -> RunSpec {
        let mut out = self.clone();
        out.integrator.dt = self.integrator.dt / 2.0;
        let per_period = self.config.integrator.dt_per_period.unwrap_or(DEFAULT_DT_PER_PERIOD);
        out.config.integrator.dt_per_period = Some(per_period.saturating_mul(2));
        out
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ScenarioError::validation(format!("{name} must be finite")))
    }
}

fn required(name: &str, v: Option<f64>) -> Result<f64> {
    finite(name, v.ok_or_else(|| ScenarioError::validation(format!("missing {name}")))?)
}

fn non_negative(name: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ScenarioError::validation(format!("{name} = {v} must be non-negative")))
    }
}

fn resolve_single(cfg: &ScenarioConfig, label: String) -> Result<RunSpec> {
    let p = &cfg.params;
    let omega_hz = required("params.omega_hz_over_2pi", p.omega_hz_over_2pi)?;
    let mech_hz = required("params.mechanical_omega_hz_over_2pi", p.mechanical_omega_hz_over_2pi)?;
    let g_hz = required("params.g_hz_over_2pi", p.g_hz_over_2pi)?;
    let chi_hz = finite("params.chi_hz_over_2pi", p.chi_hz_over_2pi.unwrap_or(0.0))?;
    let kappa_hz = non_negative("params.kappa_hz_over_2pi", required("params.kappa_hz_over_2pi", p.kappa_hz_over_2pi)?)?;
    let gamma_hz = non_negative("params.gamma_hz_over_2pi", required("params.gamma_hz_over_2pi", p.gamma_hz_over_2pi)?)?;
    if omega_hz <= 0.0 || mech_hz <= 0.0 {
        return Err(ScenarioError::validation("mode frequencies must be positive"));
    }

    let unit = if g_hz == 0.0 {
        FALLBACK_UNIT_RAD_PER_S
    } else {
        2.0 * PI * g_hz.abs()
    };
    let internal = |hz: f64| 2.0 * PI * hz / unit;

    let bose_einstein = match p.temperature_k {
        Some(t) => {
            let t = non_negative("params.temperature_k", t)?;
            Some((
                model::thermal_occupation(2.0 * PI * omega_hz, t)?,
                model::thermal_occupation(2.0 * PI * mech_hz, t)?,
            ))
        }
        None => None,
    };
    let pick = |name: &str, explicit: Option<f64>, computed: Option<f64>| -> Result<f64> {
        match (explicit, computed) {
            (Some(v), _) => non_negative(name, v),
            (None, Some(v)) => Ok(v),
            (None, None) => Err(ScenarioError::validation(format!(
                "{name} needs either params.temperature_k or an explicit value"
            ))),
        }
    };
    let thermal_optical = pick(
        "params.thermal_occupation_optical",
        p.thermal_occupation_optical,
        bose_einstein.map(|b| b.0),
    )?;
    let thermal_mechanical = pick(
        "params.thermal_occupation_mechanical",
        p.thermal_occupation_mechanical,
        bose_einstein.map(|b| b.1),
    )?;

    let params = SystemParams {
        omega: internal(omega_hz),
        mechanical_omega: internal(mech_hz),
        g: internal(g_hz),
        chi: internal(chi_hz),
        kappa: internal(kappa_hz),
        gamma: internal(gamma_hz),
        thermal_optical,
        thermal_mechanical,
    };
    params.validate()?;

    let sections = cfg.drives.clone().unwrap_or_default();
    let mut drives = Vec::with_capacity(sections.len());
    for (i, d) in sections.iter().enumerate() {
        drives.push(resolve_drive(i, d, &params, unit)?);
    }

    let cutoff_a = cfg.cutoffs.optical.unwrap_or(DEFAULT_CUTOFF_OPTICAL);
    let cutoff_b = cfg.cutoffs.mechanical.unwrap_or(DEFAULT_CUTOFF_MECHANICAL);
    if cutoff_a == 0 || cutoff_b == 0 {
        return Err(ScenarioError::validation("cutoffs must be at least 1"));
    }
    if (cutoff_a + 1) * (cutoff_b + 1) > 1024 {
        return Err(ScenarioError::validation("composite dimension above 1024 is not supported"));
    }
    let space = HilbertSpec::new(cutoff_a, cutoff_b);

    let per_period = cfg.integrator.dt_per_period.unwrap_or(DEFAULT_DT_PER_PERIOD);
    if per_period == 0 {
        return Err(ScenarioError::validation("integrator.dt_per_period must be positive"));
    }
    let t_final = cfg.integrator.t_final_times_g.unwrap_or(DEFAULT_T_FINAL_TIMES_G);
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(ScenarioError::validation("integrator.t_final_times_g must be positive"));
    }
    let record_stride = cfg.integrator.record_stride.unwrap_or(DEFAULT_RECORD_STRIDE);
    if record_stride == 0 {
        return Err(ScenarioError::validation("integrator.record_stride must be positive"));
    }
    let integrator = IntegratorConfig {
        dt: 2.0 * PI / f64::from(per_period),
        t_final,
        record_stride,
        recording: Recording::Lean,
    };
    integrator.validate()?;

    let up_to = cfg.outputs.probabilities_up_to.unwrap_or(cutoff_b);
    if up_to > cutoff_b {
        return Err(ScenarioError::validation(format!(
            "outputs.probabilities_up_to = {up_to} exceeds the mechanical cutoff {cutoff_b}"
        )));
    }
    let fidelity_target = cfg.outputs.fidelity_target.unwrap_or(DEFAULT_FIDELITY_TARGET);
    if fidelity_target > cutoff_b {
        return Err(ScenarioError::validation(format!(
            "outputs.fidelity_target = {fidelity_target} exceeds the mechanical cutoff {cutoff_b}"
        )));
    }
    let wmin = cfg.outputs.wigner_min.unwrap_or(DEFAULT_WIGNER_MIN);
    let wmax = cfg.outputs.wigner_max.unwrap_or(DEFAULT_WIGNER_MAX);
    let wpoints = cfg.outputs.wigner_points.unwrap_or(DEFAULT_WIGNER_POINTS);
    if wpoints > 2001 {
        return Err(ScenarioError::validation("outputs.wigner_points is limited to 2001"));
    }
    let grid = GridAxes::uniform(wmin, wmax, wpoints)
        .map_err(|e| ScenarioError::validation(format!("wigner grid: {e}")))?;

    let enabled = cfg.convergence.enabled.unwrap_or(true);
    let increment = cfg.convergence.increment.unwrap_or(DEFAULT_CONVERGENCE_INCREMENT);
    let tolerance = cfg.convergence.tolerance.unwrap_or(DEFAULT_CONVERGENCE_TOLERANCE);
    if increment == 0 || increment > 16 {
        return Err(ScenarioError::validation("convergence.increment must be in 1..=16"));
    }
    if !(tolerance > 0.0) || !tolerance.is_finite() {
        return Err(ScenarioError::validation("convergence.tolerance must be positive"));
    }
    let convergence = enabled.then_some(ConvergenceCheck { increment, tolerance });

    let zeno_relative_tolerance = cfg
        .zeno
        .relative_tolerance
        .unwrap_or(zeno_core::zeno::DEFAULT_RELATIVE_TOLERANCE);
    if !(zeno_relative_tolerance > 0.0) || !zeno_relative_tolerance.is_finite() {
        return Err(ScenarioError::validation("zeno.relative_tolerance must be positive"));
    }

    let explicit = ScenarioConfig {
        preset: None,
        params: ParamsSection {
            chi_hz_over_2pi: Some(chi_hz),
            thermal_occupation_optical: Some(thermal_optical),
            thermal_occupation_mechanical: Some(thermal_mechanical),
            ..cfg.params.clone()
        },
        drives: Some(sections),
        sweep: SweepSection::default(),
        cutoffs: CutoffSection {
            optical: Some(cutoff_a),
            mechanical: Some(cutoff_b),
        },
        integrator: IntegratorSection {
            dt_per_period: Some(per_period),
            t_final_times_g: Some(t_final),
            record_stride: Some(record_stride),
        },
        outputs: OutputSection {
            probabilities_up_to: Some(up_to),
            wigner_min: Some(wmin),
            wigner_max: Some(wmax),
            wigner_points: Some(wpoints),
            zeno_report: Some(cfg.outputs.zeno_report.unwrap_or(false)),
            fidelity_target: Some(fidelity_target),
        },
        convergence: ConvergenceSection {
            enabled: Some(enabled),
            increment: Some(increment),
            tolerance: Some(tolerance),
        },
        zeno: ZenoSection {
            relative_tolerance: Some(zeno_relative_tolerance),
        },
    };

    Ok(RunSpec {
        label,
        config: explicit,
        unit_rad_per_s: unit,
        params,
        bose_einstein,
        drives,
        space,
        integrator,
        probabilities_up_to: up_to,
        grid,
        zeno_report: cfg.outputs.zeno_report.unwrap_or(false),
        fidelity_target,
        convergence,
        zeno_relative_tolerance,
    })
}

fn resolve_drive(i: usize, d: &DriveSection, params: &SystemParams, unit: f64) -> Result<DriveTone> {
    let ctx = |msg: &str| ScenarioError::validation(format!("drives[{i}]: {msg}"));
    let mode = Mode::from(d.mode);
    let frequency = match (d.frequency_hz_over_2pi, d.detuning_over_g, d.blockade_count) {
        (Some(f), None, None) => 2.0 * PI * finite("frequency_hz_over_2pi", f)? / unit,
        (None, Some(det), None) => params.frequency(mode) + finite("detuning_over_g", det)?,
        (None, None, Some(count)) => {
            let target = match mode {
                Mode::Optical => BlockadeTarget::Phonons(count),
                Mode::Mechanical => BlockadeTarget::Photons(count),
            };
            model::blockade_frequency(params, target)
        }
        _ => {
            return Err(ctx(
                "give exactly one of frequency_hz_over_2pi, detuning_over_g, blockade_count",
            ))
        }
    };
    if !(frequency > 0.0) {
        return Err(ctx("drive frequency must be positive"));
    }
    let amplitude = match (d.amplitude_over_g, d.power_w) {
        (Some(a), None) => non_negative("amplitude_over_g", a)?,
        (None, Some(p)) => {
            let decay = match mode {
                Mode::Optical => params.kappa,
                Mode::Mechanical => params.gamma,
            };
            model::amplitude_from_power(p, decay * unit, frequency * unit)? / unit
        }
        _ => return Err(ctx("give exactly one of amplitude_over_g, power_w")),
    };
    Ok(DriveTone::new(mode, amplitude, frequency)?)
}
