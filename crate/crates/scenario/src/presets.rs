//! Built-in scenarios.
//!
//! Every preset uses the same device: a 5 GHz cavity, a 65 MHz mechanical
//! mode, g/2π = 2.7 MHz and baths at 20 mK. The bath occupations are pinned
//! to N̄ = 6.46e-6 and M̄ = 0.267 rather than derived from the temperature.

use crate::config::{DriveSection, ModeName, ParamsSection, ScenarioConfig, SweepSection};
use crate::error::{Result, ScenarioError};

pub const NAMES: [&str; 5] = [
    "blockade-two-phonon",
    "qubit-blockade",
    "perturbed-two-phonon",
    "perturbed-qubit",
    "multitone-fock",
];

/// χ/2π of the perturbed presets, in Hz.
pub const PERTURBING_CHI_HZ: f64 = 0.2e6;

fn device(chi_hz: f64, kappa_hz: f64) -> ParamsSection {
    ParamsSection {
        omega_hz_over_2pi: Some(5e9),
        mechanical_omega_hz_over_2pi: Some(65e6),
        g_hz_over_2pi: Some(2.7e6),
        chi_hz_over_2pi: Some(chi_hz),
        kappa_hz_over_2pi: Some(kappa_hz),
        gamma_hz_over_2pi: Some(10e3),
        temperature_k: Some(0.02),
        thermal_occupation_optical: Some(6.46e-6),
        thermal_occupation_mechanical: Some(0.267),
    }
}

fn optical_blockade(amplitude: f64, phonons: u32) -> DriveSection {
    DriveSection {
        mode: ModeName::Optical,
        amplitude_over_g: Some(amplitude),
        power_w: None,
        frequency_hz_over_2pi: None,
        detuning_over_g: None,
        blockade_count: Some(phonons),
    }
}

fn resonant_mechanical(amplitude: f64) -> DriveSection {
    DriveSection {
        mode: ModeName::Mechanical,
        amplitude_over_g: Some(amplitude),
        power_w: None,
        frequency_hz_over_2pi: None,
        detuning_over_g: Some(0.0),
        blockade_count: None,
    }
}

fn single_tone(chi_hz: f64, phonons: u32, sweep: Option<Vec<f64>>) -> ScenarioConfig {
    ScenarioConfig {
        params: device(chi_hz, 64.8e3),
        drives: Some(vec![optical_blockade(0.75, phonons), resonant_mechanical(0.065)]),
        sweep: SweepSection {
            optical_amplitudes_over_g: sweep,
        },
        ..ScenarioConfig::default()
    }
}

/// Physics fields of a preset (the `preset` key itself is left unset).
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let amplitudes = || Some(vec![0.0, 0.25, 0.75]);
    let cfg = match name {
        "blockade-two-phonon" => single_tone(0.0, 2, amplitudes()),
        "qubit-blockade" => single_tone(0.0, 1, None),
        "perturbed-two-phonon" => single_tone(PERTURBING_CHI_HZ, 2, amplitudes()),
        "perturbed-qubit" => single_tone(PERTURBING_CHI_HZ, 1, None),
        "multitone-fock" => ScenarioConfig {
            params: device(0.0, 6.48e3),
            drives: Some(vec![
                optical_blockade(0.075, 1),
                optical_blockade(0.497, 2),
                resonant_mechanical(0.0497),
            ]),
            ..ScenarioConfig::default()
        },
        other => return Err(ScenarioError::UnknownPreset(other.to_string())),
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zeno_core::Mode;

    #[test]
    fn every_preset_resolves() {
        for name in NAMES {
            let runs = ScenarioConfig::from_preset(name).unwrap().resolve().unwrap();
            let expected = if name.ends_with("two-phonon") { 3 } else { 1 };
            assert_eq!(runs.len(), expected, "{name}");
        }
    }

    #[test]
    fn blockade_frequencies_follow_the_presets() {
        let r = &ScenarioConfig::from_preset("perturbed-two-phonon").unwrap().resolve().unwrap()[2];
        let chi = r.params.chi;
        assert!((chi - 0.2 / 2.7).abs() < 1e-12);
        assert!((r.drives[0].frequency - r.params.omega - 2.0 - 4.0 * chi).abs() < 1e-10);
        assert_eq!(r.drives[0].amplitude, 0.75);

        let r = &ScenarioConfig::from_preset("multitone-fock").unwrap().resolve().unwrap()[0];
        assert_eq!(r.params.chi, 0.0);
        assert!((r.params.kappa - 6.48e3 / 2.7e6).abs() < 1e-15);
        let optical: Vec<_> = r.drives.iter().filter(|d| d.mode == Mode::Optical).collect();
        assert!((optical[1].frequency - optical[0].frequency - 1.0).abs() < 1e-10);
        assert_eq!(r.params.thermal_mechanical, 0.267);
        assert_eq!(r.params.thermal_optical, 6.46e-6);
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(preset("fig9"), Err(ScenarioError::UnknownPreset(_))));
    }
}
