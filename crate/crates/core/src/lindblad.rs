//! Thermal Lindblad master equation with a fixed-step RK4 integrator.
//!
//! `dρ/dt = −i[H(t), ρ] + Σ_k r_k D[L_k]ρ`, `D[L]ρ = LρL† − ½{L†L, ρ}`.
//!
//! The right-hand side is assembled from sparse copies of the Hamiltonian
//! terms and jump operators: ladder and number operators have O(d) nonzeros,
//! so one evaluation costs O(d²) instead of the O(d³) of dense products.

use crate::fock::{self, partial_trace_mechanical, DensityMatrix, HilbertSpec, Mode, Operator, Space};
use crate::model::{HamiltonianTerm, RotatingHamiltonian, SystemParams};
use crate::{CMatrix, Error, Result, C64};

/// Trace drift tolerated between checkpoints.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Most negative eigenvalue tolerated at a checkpoint.
pub const NEGATIVITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
struct SparseOp {
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    entries.push((i, j, v));
                }
            }
        }
        SparseOp { entries }
    }

    /// `out += scale · self · rho`.
    fn mul_acc(&self, scale: C64, rho: &CMatrix, out: &mut CMatrix) {
        let d = rho.ncols();
        for &(i, j, v) in &self.entries {
            let f = scale * v;
            for c in 0..d {
                out[(i, c)] += f * rho[(j, c)];
            }
        }
    }

    /// `out += scale · self · rho · self†`.
    fn sandwich_acc(&self, scale: C64, rho: &CMatrix, out: &mut CMatrix) {
        for &(i, j, v) in &self.entries {
            let f = scale * v;
            for &(k, l, w) in &self.entries {
                out[(i, k)] += f * rho[(j, l)] * w.conj();
            }
        }
    }
}

#[derive(Clone, Debug)]
struct SparseTerm {
    amplitude: C64,
    frequency: f64,
    op: SparseOp,
}

/// Collapse channel `rate · D[operator]`.
#[derive(Clone, Debug)]
pub struct CollapseChannel {
    pub operator: Operator,
    pub rate: f64,
}

/// Time-dependent Hamiltonian plus collapse channels on one space.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    space: Space,
    terms: Vec<HamiltonianTerm>,
    channels: Vec<CollapseChannel>,
    sparse_terms: Vec<SparseTerm>,
    sparse_channels: Vec<(f64, SparseOp)>,
    /// `−½ Σ r L†L`.
    damping: SparseOp,
}

impl LindbladModel {
    pub fn new(space: impl Into<Space>, terms: Vec<HamiltonianTerm>, channels: Vec<CollapseChannel>) -> Result<Self> {
        let space = space.into();
        for t in &terms {
            check(space, t.operator.space())?;
        }
        let mut damping = CMatrix::zeros(space.dim(), space.dim());
        for ch in &channels {
            check(space, ch.operator.space())?;
            if !(ch.rate >= 0.0) || !ch.rate.is_finite() {
                return Err(Error::invalid("rate", format!("{} must be non-negative", ch.rate)));
            }
            let l = ch.operator.matrix();
            damping -= l.adjoint() * l * C64::new(0.5 * ch.rate, 0.0);
        }
        let sparse_terms = terms
            .iter()
            .map(|t| SparseTerm {
                amplitude: t.coefficient.amplitude,
                frequency: t.coefficient.frequency,
                op: SparseOp::from_dense(t.operator.matrix()),
            })
            .collect();
        let sparse_channels = channels
            .iter()
            .filter(|c| c.rate > 0.0)
            .map(|c| (c.rate, SparseOp::from_dense(c.operator.matrix())))
            .collect();
        Ok(LindbladModel {
            space,
            terms,
            channels,
            sparse_terms,
            sparse_channels,
            damping: SparseOp::from_dense(&damping),
        })
    }

    /// Rotating-frame drive Hamiltonian with the four thermal channels
    /// κ(N̄+1)·a, κN̄·a†, γ(M̄+1)·b, γM̄·b†.
    pub fn thermal(params: &SystemParams, hamiltonian: &RotatingHamiltonian, space: HilbertSpec) -> Result<Self> {
        let a = fock::annihilation(space, Mode::Optical);
        let b = fock::annihilation(space, Mode::Mechanical);
        let channels = vec![
            CollapseChannel {
                operator: a.clone(),
                rate: params.kappa * (params.thermal_optical + 1.0),
            },
            CollapseChannel {
                operator: a.adjoint(),
                rate: params.kappa * params.thermal_optical,
            },
            CollapseChannel {
                operator: b.clone(),
                rate: params.gamma * (params.thermal_mechanical + 1.0),
            },
            CollapseChannel {
                operator: b.adjoint(),
                rate: params.gamma * params.thermal_mechanical,
            },
        ];
        LindbladModel::new(space, hamiltonian.terms(), channels)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn channels(&self) -> &[CollapseChannel] {
        &self.channels
    }

    /// Dense H(t).
    pub fn hamiltonian_at(&self, t: f64) -> Operator {
        let d = self.space.dim();
        let mut m = CMatrix::zeros(d, d);
        for term in &self.terms {
            m += term.operator.matrix() * term.coefficient.at(t);
        }
        Operator::new(self.space, m).expect("same space")
    }

    /// Writes dρ/dt into `out` (overwritten).
    fn rhs_into(&self, rho: &CMatrix, t: f64, out: &mut CMatrix) {
        out.fill(C64::new(0.0, 0.0));
        // X = (−iH − ½Σ r L†L) ρ + ½ Σ r L ρ L†, then dρ/dt = X + X†.
        let minus_i = C64::new(0.0, -1.0);
        for term in &self.sparse_terms {
            let c = if term.frequency == 0.0 {
                term.amplitude
            } else {
                term.amplitude * C64::from_polar(1.0, term.frequency * t)
            };
            term.op.mul_acc(minus_i * c, rho, out);
        }
        self.damping.mul_acc(C64::new(1.0, 0.0), rho, out);
        for (rate, op) in &self.sparse_channels {
            op.sandwich_acc(C64::new(0.5 * rate, 0.0), rho, out);
        }
        let d = out.nrows();
        for j in 0..d {
            for i in 0..=j {
                let s = out[(i, j)] + out[(j, i)].conj();
                out[(i, j)] = s;
                out[(j, i)] = s.conj();
            }
        }
    }
}

fn check(expected: Space, found: Space) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SpaceMismatch {
            left: expected.to_string(),
            right: found.to_string(),
        })
    }
}

/// `L ρ L† − ½{ρ, L†L}` by dense products.
pub fn dissipator(op: &Operator, rho: &DensityMatrix) -> Result<CMatrix> {
    check(op.space(), rho.space())?;
    let l = op.matrix();
    let ld = l.adjoint();
    let r = rho.matrix();
    let ldl = &ld * l;
    Ok(l * r * &ld - (r * &ldl + &ldl * r) * C64::new(0.5, 0.0))
}

/// `−i[H(t), ρ] + Σ r D[L]ρ`.
pub fn rhs(model: &LindbladModel, rho: &DensityMatrix, t: f64) -> Result<CMatrix> {
    check(model.space, rho.space())?;
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    model.rhs_into(rho.matrix(), t, &mut out);
    Ok(out)
}

/// What to keep at each recorded time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recording {
    /// Every recorded density matrix.
    Full,
    /// Only the populations (mechanical populations for a two-mode state).
    Lean,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record every `record_stride`-th step (the final step is always recorded).
    pub record_stride: usize,
    pub recording: Recording,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        IntegratorConfig {
            dt,
            t_final,
            record_stride: 1,
            recording: Recording::Lean,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::invalid("t_final", format!("{} must be positive", self.t_final)));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of steps; the step is shrunk so that they tile `t_final` exactly.
    pub fn steps(&self) -> usize {
        let n = (self.t_final / self.dt).round();
        if (n * self.dt - self.t_final).abs() <= 1e-9 * self.t_final {
            (n as usize).max(1)
        } else {
            ((self.t_final / self.dt).ceil() as usize).max(1)
        }
    }
}

/// Numerical health of a run, gathered at the checkpoints.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_defect: f64,
    pub steps: usize,
    pub dt: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Filled in [`Recording::Full`] mode only.
    pub states: Vec<DensityMatrix>,
    /// Populations per recorded time (mechanical populations for two-mode states).
    pub populations: Vec<Vec<f64>>,
    pub final_state: DensityMatrix,
    pub diagnostics: Diagnostics,
}

fn populations(rho: &DensityMatrix) -> Vec<f64> {
    let reduced = match rho.space() {
        Space::Composite(_) => partial_trace_mechanical(rho).expect("composite state"),
        Space::Single { .. } => rho.clone(),
    };
    (0..reduced.dim()).map(|i| reduced.population(i)).collect()
}

/// Integrates from `rho0` to `cfg.t_final` with classic fixed-step RK4.
///
/// At every checkpoint the trace drift must stay below [`TRACE_DRIFT_TOL`]
/// and the smallest eigenvalue above −[`NEGATIVITY_TOL`]; the trace is then
/// renormalised. Violations abort with [`Error::IntegratorUnstable`].
pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check(model.space, rho0.space())?;
    rho0.validate()?;

    let steps = cfg.steps();
    let dt = cfg.t_final / steps as f64;
    let d = rho0.dim();
    let space = rho0.space();

    let mut rho = rho0.matrix().clone();
    let mut k1 = CMatrix::zeros(d, d);
    let mut k2 = CMatrix::zeros(d, d);
    let mut k3 = CMatrix::zeros(d, d);
    let mut k4 = CMatrix::zeros(d, d);
    let mut tmp = CMatrix::zeros(d, d);

    let mut diagnostics = Diagnostics {
        max_trace_drift: 0.0,
        min_eigenvalue: rho0.min_eigenvalue(),
        max_hermiticity_defect: rho0.hermiticity_defect(),
        steps,
        dt,
    };
    let mut times = vec![0.0];
    let mut states = Vec::new();
    if cfg.recording == Recording::Full {
        states.push(rho0.clone());
    }
    let mut pops = vec![populations(rho0)];
    let mut last = rho0.clone();

    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        model.rhs_into(&rho, t, &mut k1);
        tmp.copy_from(&rho);
        axpy(&mut tmp, half, &k1);
        model.rhs_into(&tmp, t + 0.5 * dt, &mut k2);
        tmp.copy_from(&rho);
        axpy(&mut tmp, half, &k2);
        model.rhs_into(&tmp, t + 0.5 * dt, &mut k3);
        tmp.copy_from(&rho);
        axpy(&mut tmp, full, &k3);
        model.rhs_into(&tmp, t + dt, &mut k4);

        k2 += &k3;
        k1 += &k4;
        axpy(&mut k1, two, &k2);
        axpy(&mut rho, sixth, &k1);

        if step % cfg.record_stride == 0 || step == steps {
            let now = step as f64 * dt;
            let state = checkpoint(&mut rho, space, now, &mut diagnostics)?;
            times.push(now);
            pops.push(populations(&state));
            if cfg.recording == Recording::Full {
                states.push(state.clone());
            }
            last = state;
        }
    }

    Ok(Trajectory {
        times,
        states,
        populations: pops,
        final_state: last,
        diagnostics,
    })
}

/// `y += a x`
fn axpy(y: &mut CMatrix, a: C64, x: &CMatrix) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += a * xi;
    }
}

fn checkpoint(rho: &mut CMatrix, space: Space, time: f64, diag: &mut Diagnostics) -> Result<DensityMatrix> {
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::IntegratorUnstable {
            time,
            reason: "non-finite density matrix".into(),
        });
    }
    let tr = rho.trace();
    let drift = (tr - C64::new(1.0, 0.0)).norm();
    diag.max_trace_drift = diag.max_trace_drift.max(drift);
    if drift >= TRACE_DRIFT_TOL {
        return Err(Error::IntegratorUnstable {
            time,
            reason: format!("trace drift {drift:e}"),
        });
    }
    *rho /= tr;
    let state = DensityMatrix::from_parts(space, rho.clone());
    let min_eig = state.min_eigenvalue();
    let herm = state.hermiticity_defect();
    diag.min_eigenvalue = diag.min_eigenvalue.min(min_eig);
    diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(herm);
    if min_eig < -NEGATIVITY_TOL {
        return Err(Error::IntegratorUnstable {
            time,
            reason: format!("minimum eigenvalue {min_eig:e}"),
        });
    }
    if herm > fock::STATE_HERMITICITY_TOL {
        return Err(Error::IntegratorUnstable {
            time,
            reason: format!("Hermiticity defect {herm:e}"),
        });
    }
    Ok(state)
}
