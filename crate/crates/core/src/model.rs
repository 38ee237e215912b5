//! System parameters, drives and Hamiltonian construction.
//!
//! Frequencies inside [`SystemParams`], [`DriveTone`] and [`FrameSpec`] share
//! one angular-frequency unit chosen by the caller (ħ = 1). Physical-unit
//! helpers ([`thermal_occupation`], [`amplitude_from_power`]) take SI values.

use log::warn;

use crate::fock::{self, HilbertSpec, Mode, Operator};
use crate::{Error, Result, C64};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Bose-Einstein occupation `1 / (exp(ħω / k_B T) − 1)`.
///
/// `frequency` is an angular frequency in rad/s, `temperature` in kelvin.
pub fn thermal_occupation(frequency: f64, temperature: f64) -> Result<f64> {
    if !(frequency > 0.0) || !frequency.is_finite() {
        return Err(Error::invalid("frequency", format!("{frequency} must be positive")));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid("temperature", format!("{temperature} must be non-negative")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * frequency / (BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

fn check_drive_inputs(decay: f64, drive_frequency: f64) -> Result<()> {
    if !(drive_frequency > 0.0) || !drive_frequency.is_finite() {
        return Err(Error::invalid(
            "drive_frequency",
            format!("{drive_frequency} must be positive"),
        ));
    }
    if !(decay >= 0.0) || !decay.is_finite() {
        return Err(Error::invalid("decay", format!("{decay} must be non-negative")));
    }
    Ok(())
}

/// Drive amplitude `√(2 P γ / ħ ω_drive)` in rad/s from an input power in watts.
pub fn amplitude_from_power(power: f64, decay: f64, drive_frequency: f64) -> Result<f64> {
    check_drive_inputs(decay, drive_frequency)?;
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::invalid("power", format!("{power} must be non-negative")));
    }
    Ok((2.0 * power * decay / (HBAR * drive_frequency)).sqrt())
}

/// Inverse of [`amplitude_from_power`].
pub fn power_from_amplitude(amplitude: f64, decay: f64, drive_frequency: f64) -> Result<f64> {
    check_drive_inputs(decay, drive_frequency)?;
    if !(decay > 0.0) {
        return Err(Error::invalid("decay", "must be positive to invert the amplitude"));
    }
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::invalid("amplitude", format!("{amplitude} must be non-negative")));
    }
    Ok(amplitude * amplitude * HBAR * drive_frequency / (2.0 * decay))
}

/// Mode frequencies, couplings, decay rates and bath occupations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Optical resonance ω.
    pub omega: f64,
    /// Mechanical resonance Ω.
    pub mechanical_omega: f64,
    /// Cross-Kerr coupling g.
    pub g: f64,
    /// Coefficient χ of `a†a (b†b)²`; zero when absent.
    pub chi: f64,
    /// Optical energy decay rate κ.
    pub kappa: f64,
    /// Mechanical energy decay rate γ.
    pub gamma: f64,
    /// Mean thermal occupation N̄ of the optical bath.
    pub thermal_optical: f64,
    /// Mean thermal occupation M̄ of the mechanical bath.
    pub thermal_mechanical: f64,
}

impl SystemParams {
    /// Rejects negative or non-finite entries; warns on an unusual frequency ordering.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega", self.omega),
            ("mechanical_omega", self.mechanical_omega),
            ("g", self.g),
            ("chi", self.chi),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("thermal_optical", self.thermal_optical),
            ("thermal_mechanical", self.thermal_mechanical),
        ];
        for (name, value) in fields {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::invalid(name, format!("{value} must be finite and non-negative")));
            }
        }
        if !(self.omega > self.mechanical_omega && self.mechanical_omega > self.g) {
            warn!(
                "unusual frequency ordering: omega = {}, Omega = {}, g = {}",
                self.omega, self.mechanical_omega, self.g
            );
        }
        Ok(())
    }

    pub fn frequency(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Optical => self.omega,
            Mode::Mechanical => self.mechanical_omega,
        }
    }

    /// The same system with the two modes exchanged (only meaningful for χ = 0).
    pub fn swapped(&self) -> Self {
        SystemParams {
            omega: self.mechanical_omega,
            mechanical_omega: self.omega,
            kappa: self.gamma,
            gamma: self.kappa,
            thermal_optical: self.thermal_mechanical,
            thermal_mechanical: self.thermal_optical,
            ..*self
        }
    }
}

/// A coherent drive `i·amplitude·(ô† e^{−iωt} − ô e^{iωt})` on one mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveTone {
    pub mode: Mode,
    pub amplitude: f64,
    pub frequency: f64,
}

impl DriveTone {
    pub fn new(mode: Mode, amplitude: f64, frequency: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::invalid("amplitude", format!("{amplitude} must be non-negative")));
        }
        if !frequency.is_finite() {
            return Err(Error::invalid("frequency", "must be finite"));
        }
        Ok(DriveTone {
            mode,
            amplitude,
            frequency,
        })
    }
}

/// Rotating frame `U(t) = exp(−i(ω_a a†a + ω_b b†b)t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameSpec {
    pub optical: f64,
    pub mechanical: f64,
}

impl FrameSpec {
    pub fn new(optical: f64, mechanical: f64) -> Self {
        FrameSpec { optical, mechanical }
    }

    /// Frame rotating with the first tone on each mode; an undriven mode
    /// keeps its bare frequency.
    pub fn from_drives(params: &SystemParams, drives: &[DriveTone]) -> Self {
        let first = |mode: Mode| {
            drives
                .iter()
                .find(|d| d.mode == mode)
                .map_or(params.frequency(mode), |d| d.frequency)
        };
        FrameSpec::new(first(Mode::Optical), first(Mode::Mechanical))
    }

    pub fn frequency(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Optical => self.optical,
            Mode::Mechanical => self.mechanical,
        }
    }

    /// Optical detuning Δ = ω − ω_frame.
    pub fn optical_detuning(&self, params: &SystemParams) -> f64 {
        params.omega - self.optical
    }

    /// Mechanical detuning δ = Ω − Ω_frame.
    pub fn mechanical_detuning(&self, params: &SystemParams) -> f64 {
        params.mechanical_omega - self.mechanical
    }
}

/// Rotating-frame eigenfrequency of |n⟩⊗|m⟩ without drives:
/// `Δn + δm + g·n·m + χ·n·m²`.
pub fn spectrum_value(params: &SystemParams, frame: &FrameSpec, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    frame.optical_detuning(params) * n
        + frame.mechanical_detuning(params) * m
        + params.g * n * m
        + params.chi * n * m * m
}

/// Which excitation number a drive should seal off.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockadeTarget {
    /// Mechanical drive resonant only when the optical mode holds `N` photons.
    Photons(u32),
    /// Optical drive resonant only when the mechanical mode holds `M` phonons.
    Phonons(u32),
}

/// `Ω + gN` for a photon target, `ω + Mg + M²χ` for a phonon target.
pub fn blockade_frequency(params: &SystemParams, target: BlockadeTarget) -> f64 {
    match target {
        BlockadeTarget::Photons(n) => params.mechanical_omega + params.g * f64::from(n),
        BlockadeTarget::Phonons(m) => {
            let m = f64::from(m);
            params.omega + params.g * m + params.chi * m * m
        }
    }
}

/// Time dependence `amplitude · e^{i·frequency·t}` of a Hamiltonian term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficient {
    pub amplitude: C64,
    pub frequency: f64,
}

impl Coefficient {
    pub fn constant(value: C64) -> Self {
        Coefficient {
            amplitude: value,
            frequency: 0.0,
        }
    }

    pub fn at(&self, t: f64) -> C64 {
        if self.frequency == 0.0 {
            self.amplitude
        } else {
            self.amplitude * C64::from_polar(1.0, self.frequency * t)
        }
    }
}

/// One summand `c(t)·Ô` of a Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTerm {
    pub coefficient: Coefficient,
    pub operator: Operator,
}

/// Rotating-frame Hamiltonian split into its static number-conserving part
/// and the drive terms.
#[derive(Clone, Debug)]
pub struct RotatingHamiltonian {
    drift: Operator,
    drives: Vec<HamiltonianTerm>,
}

impl RotatingHamiltonian {
    pub fn new(params: &SystemParams, drives: &[DriveTone], frame: &FrameSpec, space: HilbertSpec) -> Self {
        let entries: Vec<f64> = space
            .basis()
            .map(|(n, m)| spectrum_value(params, frame, n, m))
            .collect();
        let drift = Operator::diagonal(space, &entries).expect("sized by construction");

        let mut terms = Vec::with_capacity(2 * drives.len());
        for tone in drives {
            let offset = tone.frequency - frame.frequency(tone.mode);
            let lower = fock::annihilation(space, tone.mode);
            let raise = lower.adjoint();
            let amp = C64::new(0.0, tone.amplitude);
            terms.push(HamiltonianTerm {
                coefficient: Coefficient {
                    amplitude: amp,
                    frequency: -offset,
                },
                operator: raise,
            });
            terms.push(HamiltonianTerm {
                coefficient: Coefficient {
                    amplitude: -amp,
                    frequency: offset,
                },
                operator: lower,
            });
        }
        RotatingHamiltonian { drift, drives: terms }
    }

    /// Number-conserving part: the measurement Hamiltonian in the rotating frame.
    pub fn drift(&self) -> &Operator {
        &self.drift
    }

    /// Drive part at time `t`: the observed Hamiltonian.
    pub fn drive_at(&self, t: f64) -> Operator {
        let mut m = self.drift.matrix() * C64::new(0.0, 0.0);
        for term in &self.drives {
            m += term.operator.matrix() * term.coefficient.at(t);
        }
        Operator::new(self.drift.space(), m).expect("same space")
    }

    pub fn at(&self, t: f64) -> Operator {
        &self.drift + &self.drive_at(t)
    }

    pub fn is_time_independent(&self) -> bool {
        self.drives.iter().all(|t| t.coefficient.frequency == 0.0)
    }

    /// All summands, drift first, for integrators that assemble H(t) themselves.
    pub fn terms(&self) -> Vec<HamiltonianTerm> {
        let mut out = vec![HamiltonianTerm {
            coefficient: Coefficient::constant(C64::new(1.0, 0.0)),
            operator: self.drift.clone(),
        }];
        out.extend(self.drives.iter().cloned());
        out
    }
}

/// `Δ′a†a + δ′b†b + g a†a b†b + χ a†a (b†b)² + Σ drives` at time `t`.
pub fn hamiltonian_rotating(
    params: &SystemParams,
    drives: &[DriveTone],
    frame: &FrameSpec,
    space: HilbertSpec,
    t: f64,
) -> Operator {
    RotatingHamiltonian::new(params, drives, frame, space).at(t)
}
