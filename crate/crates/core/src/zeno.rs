//! Invariant Zeno subspaces of the number-conserving Hamiltonian.
//!
//! The measurement Hamiltonian is diagonal in the number basis, so its
//! eigenspaces are spanned by basis states sharing one rotating-frame
//! eigenfrequency. Projectors are therefore diagonal 0/1 matrices.

use std::f64::consts::TAU;

use crate::fock::{HilbertSpec, Operator, Space};
use crate::model::{spectrum_value, FrameSpec, SystemParams};
use crate::{CMatrix, Error, Result, C64};

/// Relative degeneracy tolerance applied to the spectral range.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub n: usize,
    pub m: usize,
    pub value: f64,
}

/// Rotating-frame eigenfrequencies, one entry per basis state in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    pub space: HilbertSpec,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumTable {
    /// Builds a table from explicit values given in basis order.
    pub fn from_values(space: HilbertSpec, values: &[f64]) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: values.len(),
            });
        }
        let entries = space
            .basis()
            .zip(values)
            .map(|((n, m), &value)| SpectrumEntry { n, m, value })
            .collect();
        Ok(SpectrumTable { space, entries })
    }

    pub fn value(&self, n: usize, m: usize) -> f64 {
        self.entries[self.space.index(n, m)].value
    }

    /// `max − min` over all entries.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .entries
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
                (lo.min(e.value), hi.max(e.value))
            });
        hi - lo
    }

    /// `1e-9 ×` the spectral range, or `1e-9` for a flat spectrum.
    pub fn default_tolerance(&self) -> f64 {
        let range = self.range();
        if range > 0.0 {
            DEFAULT_RELATIVE_TOLERANCE * range
        } else {
            DEFAULT_RELATIVE_TOLERANCE
        }
    }
}

/// `Δn + δm + g·n·m + χ·n·m²` over every kept `(n, m)`.
pub fn rotating_spectrum(params: &SystemParams, frame: &FrameSpec, space: HilbertSpec) -> SpectrumTable {
    let entries = space
        .basis()
        .map(|(n, m)| SpectrumEntry {
            n,
            m,
            value: spectrum_value(params, frame, n, m),
        })
        .collect();
    SpectrumTable { space, entries }
}

/// One eigenspace of the measurement Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct ZenoClass {
    pub eigenvalue: f64,
    /// Composite basis indices, ascending.
    pub members: Vec<usize>,
    pub projector: Operator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZenoPartition {
    pub space: HilbertSpec,
    pub classes: Vec<ZenoClass>,
    /// Class id of every basis index.
    class_of: Vec<usize>,
}

impl ZenoPartition {
    /// Builds a partition from explicit member lists.
    pub fn from_classes(space: HilbertSpec, groups: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let dim = space.dim();
        let mut class_of = vec![usize::MAX; dim];
        let mut classes = Vec::with_capacity(groups.len());
        for (id, (eigenvalue, mut members)) in groups.into_iter().enumerate() {
            members.sort_unstable();
            let mut diag = vec![0.0; dim];
            for &i in &members {
                if i >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: i + 1 });
                }
                if class_of[i] != usize::MAX {
                    return Err(Error::invalid("partition", format!("basis index {i} appears twice")));
                }
                class_of[i] = id;
                diag[i] = 1.0;
            }
            classes.push(ZenoClass {
                eigenvalue,
                members,
                projector: Operator::diagonal(space, &diag)?,
            });
        }
        if let Some(missing) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::invalid("partition", format!("basis index {missing} is not covered")));
        }
        Ok(ZenoPartition {
            space,
            classes,
            class_of,
        })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, index: usize) -> usize {
        self.class_of[index]
    }

    /// Class containing `(n, m)`.
    pub fn class_of_state(&self, n: usize, m: usize) -> usize {
        self.class_of[self.space.index(n, m)]
    }

    /// Members of a class as `(n, m)` pairs.
    pub fn members_as_levels(&self, class: usize) -> Vec<(usize, usize)> {
        self.classes[class]
            .members
            .iter()
            .map(|&i| self.space.levels(i))
            .collect()
    }

    /// `Σ_j P_j A P_j`: keeps the blocks lying inside one class.
    pub fn project(&self, op: &Operator) -> Result<Operator> {
        self.check(op)?;
        let m = CMatrix::from_fn(op.dim(), op.dim(), |i, j| {
            if self.class_of[i] == self.class_of[j] {
                op.matrix()[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Operator::new(self.space, m)
    }

    /// Probability weight of a state vector outside class `class`.
    pub fn weight_outside(&self, class: usize, psi: &crate::CVector) -> f64 {
        psi.iter()
            .enumerate()
            .filter(|(i, _)| self.class_of[*i] != class)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    fn check(&self, op: &Operator) -> Result<()> {
        if op.space() != Space::Composite(self.space) {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: op.dim(),
            });
        }
        Ok(())
    }
}

/// Groups basis states whose eigenfrequencies lie within `tol` of the first
/// (lowest) member of their group.
pub fn detect_subspaces(spectrum: &SpectrumTable, tol: f64) -> Result<ZenoPartition> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::invalid("tol", format!("{tol} must be positive")));
    }
    let mut order: Vec<usize> = (0..spectrum.entries.len()).collect();
    order.sort_by(|&a, &b| {
        spectrum.entries[a]
            .value
            .total_cmp(&spectrum.entries[b].value)
            .then(a.cmp(&b))
    });

    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for idx in order {
        let value = spectrum.entries[idx].value;
        match groups.last_mut() {
            Some((anchor, members)) if value - *anchor < tol => members.push(idx),
            _ => groups.push((value, vec![idx])),
        }
    }
    // Class order follows the lowest member so that reports read in basis order.
    groups.sort_by_key(|(_, members)| members.iter().copied().min().unwrap_or(0));
    ZenoPartition::from_classes(spectrum.space, groups)
}

/// `K·H_meas + Σ_j P_j H_obs P_j`.
pub fn zeno_hamiltonian(partition: &ZenoPartition, h_obs: &Operator, h_meas: &Operator, k: f64) -> Result<Operator> {
    partition.check(h_meas)?;
    let projected = partition.project(h_obs)?;
    Ok(&h_meas.scale(C64::new(k, 0.0)) + &projected)
}

/// Leading finite-coupling corrections to the Zeno dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct NonadiabaticTerms {
    /// `Σ_n Σ_{k≠n} P_k H P_n / (η_k − η_n)`; anti-Hermitian for Hermitian H.
    pub first_order: Operator,
    /// `Σ_n Σ_{k≠n} P_n H P_k H P_n / (η_n − η_k)`, the 1/K effective Hamiltonian.
    pub second_order: Operator,
}

/// Rejects partitions whose classes share an eigenvalue.
pub fn nonadiabatic_correction(partition: &ZenoPartition, h_obs: &Operator) -> Result<NonadiabaticTerms> {
    partition.check(h_obs)?;
    for (a, ca) in partition.classes.iter().enumerate() {
        for (b, cb) in partition.classes.iter().enumerate().skip(a + 1) {
            if ca.eigenvalue == cb.eigenvalue {
                return Err(Error::DegenerateClasses {
                    first: a,
                    second: b,
                    eigenvalue: ca.eigenvalue,
                });
            }
        }
    }
    let eta = |i: usize| partition.classes[partition.class_of[i]].eigenvalue;
    let h = h_obs.matrix();
    let dim = h.nrows();

    let first = CMatrix::from_fn(dim, dim, |i, j| {
        if partition.class_of[i] == partition.class_of[j] {
            C64::new(0.0, 0.0)
        } else {
            h[(i, j)] / (eta(i) - eta(j))
        }
    });

    let second = CMatrix::from_fn(dim, dim, |i, j| {
        if partition.class_of[i] != partition.class_of[j] {
            return C64::new(0.0, 0.0);
        }
        let own = partition.class_of[i];
        (0..dim)
            .filter(|&l| partition.class_of[l] != own)
            .map(|l| h[(i, l)] * h[(l, j)] / (eta(i) - eta(l)))
            .sum()
    });

    Ok(NonadiabaticTerms {
        first_order: Operator::new(partition.space, first)?,
        second_order: Operator::new(partition.space, second)?,
    })
}

/// Position of one basis state on the drive torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    pub n: usize,
    pub m: usize,
    /// Planar coordinates with `x + y = E_nm`.
    pub x: f64,
    pub y: f64,
    pub theta1: f64,
    pub theta2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusCoordinates {
    pub space: HilbertSpec,
    pub points: Vec<TorusPoint>,
}

impl TorusCoordinates {
    pub fn point(&self, n: usize, m: usize) -> &TorusPoint {
        &self.points[self.space.index(n, m)]
    }
}

/// Fractional part folded into `[0, 1)`, with values within rounding of 1 sent to 0.
fn wrapped_fraction(value: f64) -> f64 {
    let f = value - value.floor();
    if f >= 1.0 - 1e-12 {
        0.0
    } else {
        f
    }
}

/// Rolls the eigenvalue plane onto a torus with periods `optical_drive`
/// and `mechanical_drive`.
///
/// The planar split is `x = (ω + g·m + χ·m²)·n`, `y = Ω·m`; states that the
/// drives couple resonantly coalesce to one torus point.
pub fn torus_coordinates(
    params: &SystemParams,
    optical_drive: f64,
    mechanical_drive: f64,
    space: HilbertSpec,
) -> Result<TorusCoordinates> {
    for (name, f) in [("optical_drive", optical_drive), ("mechanical_drive", mechanical_drive)] {
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("{f} must be positive"),
            });
        }
    }
    let points = space
        .basis()
        .map(|(n, m)| {
            let (nf, mf) = (n as f64, m as f64);
            let x = (params.omega + params.g * mf + params.chi * mf * mf) * nf;
            let y = params.mechanical_omega * mf;
            TorusPoint {
                n,
                m,
                x,
                y,
                theta1: TAU * wrapped_fraction(x / optical_drive),
                theta2: TAU * wrapped_fraction(y / mechanical_drive),
            }
        })
        .collect();
    Ok(TorusCoordinates { space, points })
}
