//! Fock populations, fidelities and Wigner functions of single-mode states.
//!
//! Wigner convention: `W(α) = (2/π) Σ_k (−1)^k ⟨k|D†(α) ρ D(α)|k⟩` with the
//! standard displacement `D(α) = exp(α a† − α* a)`, `α = x + i p`, so that
//! `∫∫ W dx dp = 1` and the vacuum peaks at `W(0) = 2/π`.

use std::f64::consts::FRAC_2_PI;

use nalgebra::DMatrix;

use crate::fock::{DensityMatrix, Space};
use crate::{CVector, Error, Result, C64};

fn single_cutoff(rho: &DensityMatrix) -> Result<usize> {
    match rho.space() {
        Space::Single { cutoff } => Ok(cutoff),
        Space::Composite(_) => Err(Error::InvalidState(
            "expected a single-mode (reduced) state".into(),
        )),
    }
}

/// `P_n = ⟨n|ρ|n⟩` for `n = 0..=up_to`.
pub fn fock_probabilities(rho: &DensityMatrix, up_to: usize) -> Result<Vec<f64>> {
    let cutoff = single_cutoff(rho)?;
    if up_to > cutoff {
        return Err(Error::LevelOutOfRange { level: up_to, cutoff });
    }
    Ok((0..=up_to).map(|n| rho.population(n)).collect())
}

/// Fidelity with the Fock state |n⟩, i.e. `⟨n|ρ|n⟩`.
pub fn fidelity_fock(rho: &DensityMatrix, n: usize) -> Result<f64> {
    let cutoff = single_cutoff(rho)?;
    if n > cutoff {
        return Err(Error::LevelOutOfRange { level: n, cutoff });
    }
    Ok(rho.population(n))
}

/// Quadrature axes of a phase-space grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAxes {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl GridAxes {
    /// `points × points` grid on `[min, max]²`.
    pub fn uniform(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::invalid("grid", format!("bounds [{min}, {max}] are not an interval")));
        }
        if points < 2 {
            return Err(Error::invalid("grid", "needs at least two points per axis"));
        }
        let step = (max - min) / (points - 1) as f64;
        let axis: Vec<f64> = (0..points).map(|i| min + step * i as f64).collect();
        Ok(GridAxes {
            x: axis.clone(),
            p: axis,
        })
    }
}

impl Default for GridAxes {
    /// `[−4, 4]²` with 81 points per axis.
    fn default() -> Self {
        GridAxes::uniform(-4.0, 4.0, 81).expect("valid default grid")
    }
}

/// Wigner function sampled on a grid; `values[(ip, ix)] = W(x[ix], p[ip])`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub values: DMatrix<f64>,
}

/// Per-point cell widths used for Riemann sums.
fn cell_widths(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n < 2 {
        return vec![1.0; n];
    }
    (0..n)
        .map(|i| match i {
            0 => axis[1] - axis[0],
            i if i == n - 1 => axis[n - 1] - axis[n - 2],
            i => 0.5 * (axis[i + 1] - axis[i - 1]),
        })
        .collect()
}

impl WignerGrid {
    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[(ip, ix)]
    }

    fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        let wx = cell_widths(&self.x);
        let wp = cell_widths(&self.p);
        let mut total = 0.0;
        for (ip, dp) in wp.iter().enumerate() {
            for (ix, dx) in wx.iter().enumerate() {
                total += f(self.values[(ip, ix)]) * dx * dp;
            }
        }
        total
    }

    /// Riemann sum of W over the grid.
    pub fn integral(&self) -> f64 {
        self.weighted_sum(|w| w)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(x, p)` of the largest sample.
    pub fn argmax(&self) -> (f64, f64) {
        let (mut best, mut at) = (f64::NEG_INFINITY, (0, 0));
        for ip in 0..self.p.len() {
            for ix in 0..self.x.len() {
                if self.values[(ip, ix)] > best {
                    best = self.values[(ip, ix)];
                    at = (ix, ip);
                }
            }
        }
        (self.x[at.0], self.p[at.1])
    }
}

/// Evaluates the displaced-parity Wigner function of a single-mode state.
///
/// `D(α)|k⟩` is generated by the exact recursion
/// `D|k+1⟩ = (a† − α*) D|k⟩ / √(k+1)` starting from the coherent state, so
/// no truncated matrix exponential enters; the parity sum runs until the
/// displaced number states have left the support of ρ.
pub fn wigner(rho: &DensityMatrix, axes: &GridAxes) -> Result<WignerGrid> {
    let cutoff = single_cutoff(rho)?;
    if axes.x.iter().chain(&axes.p).any(|v| !v.is_finite()) {
        return Err(Error::invalid("grid", "axes must be finite"));
    }
    let mut values = DMatrix::zeros(axes.p.len(), axes.x.len());
    for (ip, &p) in axes.p.iter().enumerate() {
        for (ix, &x) in axes.x.iter().enumerate() {
            values[(ip, ix)] = wigner_point(rho, cutoff, C64::new(x, p));
        }
    }
    Ok(WignerGrid {
        x: axes.x.clone(),
        p: axes.p.clone(),
        values,
    })
}

/// W at a single phase-space point.
pub fn wigner_at(rho: &DensityMatrix, alpha: C64) -> Result<f64> {
    let cutoff = single_cutoff(rho)?;
    Ok(wigner_point(rho, cutoff, alpha))
}

fn wigner_point(rho: &DensityMatrix, cutoff: usize, alpha: C64) -> f64 {
    let d = cutoff + 1;
    let r2 = alpha.norm_sqr();
    let radius = r2.sqrt();
    // ⟨n|α⟩ for n ≤ cutoff
    let mut v = CVector::zeros(d);
    v[0] = C64::new((-0.5 * r2).exp(), 0.0);
    for n in 1..d {
        v[n] = v[n - 1] * alpha / (n as f64).sqrt();
    }
    let last = (r2 + 12.0 * radius + cutoff as f64 + 40.0).ceil() as usize;
    let ac = alpha.conj();
    let m = rho.matrix();
    let mut total = 0.0;
    let mut next = CVector::zeros(d);
    for k in 0..=last {
        let q = (v.adjoint() * m * &v)[(0, 0)].re;
        total += if k % 2 == 0 { q } else { -q };
        let scale = 1.0 / ((k + 1) as f64).sqrt();
        for n in 0..d {
            let raised = if n > 0 { v[n - 1] * (n as f64).sqrt() } else { C64::new(0.0, 0.0) };
            next[n] = (raised - ac * v[n]) * scale;
        }
        std::mem::swap(&mut v, &mut next);
    }
    FRAC_2_PI * total
}

/// Riemann sum of `max(−W, 0)` over the grid.
pub fn negativity_volume(w: &WignerGrid) -> f64 {
    w.weighted_sum(|v| (-v).max(0.0))
}
