//! Truncated Fock-space algebra for one or two bosonic modes.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::{CMatrix, CVector, Error, Result, C64};

/// Hermiticity tolerance of a valid density matrix (absolute).
pub const STATE_HERMITICITY_TOL: f64 = 1e-10;
/// Trace tolerance of a valid density matrix.
pub const STATE_TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue accepted for a valid density matrix.
pub const STATE_POSITIVITY_TOL: f64 = 1e-8;

/// Relative tolerance used when an operator is asserted to be Hermitian.
const OPERATOR_HERMITICITY_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Optical,
    Mechanical,
}

impl Mode {
    pub fn other(self) -> Mode {
        match self {
            Mode::Optical => Mode::Mechanical,
            Mode::Mechanical => Mode::Optical,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Optical => f.write_str("optical"),
            Mode::Mechanical => f.write_str("mechanical"),
        }
    }
}

/// Truncation of the composite space: photons `0..=cutoff_a`, phonons `0..=cutoff_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    pub cutoff_a: usize,
    pub cutoff_b: usize,
}

impl HilbertSpec {
    pub const fn new(cutoff_a: usize, cutoff_b: usize) -> Self {
        HilbertSpec { cutoff_a, cutoff_b }
    }

    pub fn dim(&self) -> usize {
        (self.cutoff_a + 1) * (self.cutoff_b + 1)
    }

    pub fn cutoff(&self, mode: Mode) -> usize {
        match mode {
            Mode::Optical => self.cutoff_a,
            Mode::Mechanical => self.cutoff_b,
        }
    }

    /// Composite index of |n⟩⊗|m⟩.
    pub fn index(&self, n: usize, m: usize) -> usize {
        debug_assert!(n <= self.cutoff_a && m <= self.cutoff_b);
        n * (self.cutoff_b + 1) + m
    }

    /// Inverse of [`HilbertSpec::index`]: `(n, m)`.
    pub fn levels(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.dim());
        (index / (self.cutoff_b + 1), index % (self.cutoff_b + 1))
    }

    /// Basis states `(n, m)` in index order.
    pub fn basis(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim()).map(move |i| self.levels(i))
    }

    /// Both cutoffs raised by `step`.
    pub fn enlarged(&self, step: usize) -> Self {
        HilbertSpec::new(self.cutoff_a + step, self.cutoff_b + step)
    }

    /// The same space with the two modes swapped.
    pub fn swapped(&self) -> Self {
        HilbertSpec::new(self.cutoff_b, self.cutoff_a)
    }
}

impl fmt::Display for HilbertSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "two-mode({}, {})", self.cutoff_a, self.cutoff_b)
    }
}

/// The space an operator or state acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Composite(HilbertSpec),
    Single { cutoff: usize },
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Composite(spec) => spec.dim(),
            Space::Single { cutoff } => cutoff + 1,
        }
    }

    pub fn composite(&self) -> Option<HilbertSpec> {
        match self {
            Space::Composite(spec) => Some(*spec),
            Space::Single { .. } => None,
        }
    }
}

impl From<HilbertSpec> for Space {
    fn from(spec: HilbertSpec) -> Self {
        Space::Composite(spec)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Composite(spec) => spec.fmt(f),
            Space::Single { cutoff } => write!(f, "single-mode({cutoff})"),
        }
    }
}

fn check_space(left: Space, right: Space) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::SpaceMismatch {
            left: left.to_string(),
            right: right.to_string(),
        })
    }
}

/// Dense operator on a tagged space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: impl Into<Space>, matrix: CMatrix) -> Result<Self> {
        let space = space.into();
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator { space, matrix })
    }

    pub(crate) fn from_parts(space: Space, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Operator { space, matrix }
    }

    pub fn zeros(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        Operator::from_parts(space, CMatrix::zeros(d, d))
    }

    pub fn identity(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        Operator::from_parts(space, CMatrix::identity(d, d))
    }

    /// Diagonal operator from real entries in basis order.
    pub fn diagonal(space: impl Into<Space>, entries: &[f64]) -> Result<Self> {
        let space = space.into();
        if entries.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: entries.len(),
            });
        }
        let diag = CVector::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0)));
        Ok(Operator::from_parts(space, CMatrix::from_diagonal(&diag)))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_parts(self.space, self.matrix.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator::from_parts(self.space, &self.matrix * factor)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A − A†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= OPERATOR_HERMITICITY_REL_TOL * self.max_abs()
    }

    /// Returns the operator if it passes the Hermiticity check.
    pub fn assert_hermitian(self) -> Result<Self> {
        if self.is_hermitian() {
            Ok(self)
        } else {
            Err(Error::invalid(
                "operator",
                format!("not Hermitian (defect {:e})", self.hermiticity_defect()),
            ))
        }
    }

    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        check_space(self.space, other.space)?;
        Ok(Operator::from_parts(self.space, &self.matrix + &other.matrix))
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Operator> {
        check_space(self.space, other.space)?;
        Ok(Operator::from_parts(self.space, &self.matrix * &other.matrix))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        check_space(self.space, other.space)?;
        Ok(Operator::from_parts(
            self.space,
            &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        ))
    }

    /// Largest entry-wise difference to `other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.space, other.space, "operator spaces differ");
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential `exp(self)`.
    pub fn exp(&self) -> Operator {
        Operator::from_parts(self.space, self.matrix.exp())
    }

    pub fn apply(&self, psi: &CVector) -> Result<CVector> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        Ok(&self.matrix * psi)
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator spaces differ")
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator::from_parts(self.space, &self.matrix - &rhs.matrix)
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator spaces differ")
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

/// Single-mode matrices on `0..=cutoff`.
pub mod single {
    use super::*;

    pub fn annihilation_matrix(cutoff: usize) -> CMatrix {
        let d = cutoff + 1;
        let mut a = CMatrix::zeros(d, d);
        for k in 1..d {
            a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
        }
        a
    }

    pub fn annihilation(cutoff: usize) -> Operator {
        Operator::from_parts(Space::Single { cutoff }, annihilation_matrix(cutoff))
    }

    pub fn creation(cutoff: usize) -> Operator {
        annihilation(cutoff).adjoint()
    }

    pub fn number(cutoff: usize) -> Operator {
        let entries: Vec<f64> = (0..=cutoff).map(|k| k as f64).collect();
        Operator::diagonal(Space::Single { cutoff }, &entries).expect("sized by construction")
    }

    /// `exp(α* a − α a†)` on the truncated space.
    pub fn displacement(cutoff: usize, alpha: C64) -> Operator {
        let a = annihilation_matrix(cutoff);
        let generator = &a * alpha.conj() - a.adjoint() * alpha;
        Operator::from_parts(Space::Single { cutoff }, generator.exp())
    }

    /// Basis vector |n⟩.
    pub fn fock_vector(cutoff: usize, n: usize) -> Result<CVector> {
        if n > cutoff {
            return Err(Error::LevelOutOfRange { level: n, cutoff });
        }
        let mut v = CVector::zeros(cutoff + 1);
        v[n] = C64::new(1.0, 0.0);
        Ok(v)
    }
}

/// Lifts a single-mode matrix onto `mode` of the composite space.
pub fn embed(space: HilbertSpec, mode: Mode, local: &CMatrix) -> Result<Operator> {
    let expected = space.cutoff(mode) + 1;
    if local.nrows() != expected || local.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: local.nrows(),
        });
    }
    let matrix = match mode {
        Mode::Optical => local.kronecker(&CMatrix::identity(space.cutoff_b + 1, space.cutoff_b + 1)),
        Mode::Mechanical => CMatrix::identity(space.cutoff_a + 1, space.cutoff_a + 1).kronecker(local),
    };
    Ok(Operator::from_parts(space.into(), matrix))
}

/// `â ⊗ 𝟙` or `𝟙 ⊗ b̂`.
pub fn annihilation(space: HilbertSpec, mode: Mode) -> Operator {
    embed(space, mode, &single::annihilation_matrix(space.cutoff(mode))).expect("sized by construction")
}

pub fn creation(space: HilbertSpec, mode: Mode) -> Operator {
    annihilation(space, mode).adjoint()
}

/// Number operator of one mode, built directly on the diagonal.
pub fn number(space: HilbertSpec, mode: Mode) -> Operator {
    let entries: Vec<f64> = space
        .basis()
        .map(|(n, m)| match mode {
            Mode::Optical => n as f64,
            Mode::Mechanical => m as f64,
        })
        .collect();
    Operator::diagonal(space, &entries).expect("sized by construction")
}

/// Cross-Kerr operator `a†a b†b`: diagonal with entry `n·m`.
pub fn tensor_number_product(space: HilbertSpec) -> Operator {
    let entries: Vec<f64> = space.basis().map(|(n, m)| (n * m) as f64).collect();
    Operator::diagonal(space, &entries).expect("sized by construction")
}

/// Projector |n⟩⟨n| ⊗ |m⟩⟨m|.
pub fn basis_projector(space: HilbertSpec, n: usize, m: usize) -> Operator {
    let mut entries = vec![0.0; space.dim()];
    entries[space.index(n, m)] = 1.0;
    Operator::diagonal(space, &entries).expect("sized by construction")
}

/// Displacement `exp(α* ô − α ô†)` on `mode`, identity on the other mode.
///
/// Exact only up to truncation: keep `|α|²` well below the targeted cutoff.
pub fn displacement(space: HilbertSpec, mode: Mode, alpha: C64) -> Operator {
    let local = single::displacement(space.cutoff(mode), alpha).into_matrix();
    embed(space, mode, &local).expect("sized by construction")
}

/// Density matrix with validated invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: Space,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(space: impl Into<Space>, matrix: CMatrix) -> Result<Self> {
        let op = Operator::new(space, matrix)?;
        DensityMatrix::from_raw(op.space, op.matrix)
    }

    pub(crate) fn from_parts(space: Space, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        DensityMatrix { space, matrix }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Vacuum of every mode.
    pub fn ground(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        let mut m = CMatrix::zeros(d, d);
        m[(0, 0)] = C64::new(1.0, 0.0);
        DensityMatrix::from_parts(space, m)
    }

    /// Single-mode Fock state |n⟩⟨n|.
    pub fn fock(cutoff: usize, n: usize) -> Result<Self> {
        let v = single::fock_vector(cutoff, n)?;
        Ok(DensityMatrix::from_parts(Space::Single { cutoff }, &v * v.adjoint()))
    }

    /// |ψ⟩⟨ψ| with ψ normalised first.
    pub fn from_pure(space: impl Into<Space>, psi: &CVector) -> Result<Self> {
        let space = space.into();
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: psi.len(),
            });
        }
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        let v = psi / C64::new(norm, 0.0);
        Ok(DensityMatrix::from_parts(space, &v * v.adjoint()))
    }

    /// Single-mode thermal state with mean occupation `nbar`, truncated and renormalised.
    pub fn thermal(cutoff: usize, nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::invalid("nbar", format!("{nbar} must be finite and non-negative")));
        }
        let ratio = nbar / (1.0 + nbar);
        let weights: Vec<f64> = (0..=cutoff).map(|k| ratio.powi(k as i32)).collect();
        let total: f64 = weights.iter().sum();
        let entries: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let op = Operator::diagonal(Space::Single { cutoff }, &entries)?;
        Ok(DensityMatrix::from_parts(op.space, op.matrix))
    }

    pub fn maximally_mixed(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        DensityMatrix::from_parts(space, CMatrix::identity(d, d) / C64::new(d as f64, 0.0))
    }

    /// ρ_A ⊗ ρ_B from two single-mode states.
    pub fn product(optical: &DensityMatrix, mechanical: &DensityMatrix) -> Result<Self> {
        match (optical.space, mechanical.space) {
            (Space::Single { cutoff: ca }, Space::Single { cutoff: cb }) => Ok(DensityMatrix::from_parts(
                HilbertSpec::new(ca, cb).into(),
                optical.matrix.kronecker(&mechanical.matrix),
            )),
            _ => Err(Error::InvalidState("product expects two single-mode states".into())),
        }
    }

    /// Applies `U ρ U†`.
    pub fn conjugate_by(&self, unitary: &Operator) -> Result<Self> {
        check_space(self.space, unitary.space())?;
        let m = unitary.matrix() * &self.matrix * unitary.matrix().adjoint();
        Ok(DensityMatrix::from_parts(self.space, m))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        Operator::from_parts(self.space, self.matrix.clone()).hermiticity_defect()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_part(&self.matrix)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Diagonal element ⟨i|ρ|i⟩.
    pub fn population(&self, index: usize) -> f64 {
        self.matrix[(index, index)].re
    }

    /// ⟨ψ|ρ|ψ⟩ for a normalised ψ.
    pub fn expectation_pure(&self, psi: &CVector) -> f64 {
        (psi.adjoint() * &self.matrix * psi)[(0, 0)].re
    }

    /// Tr(ρ O).
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        check_space(self.space, op.space())?;
        Ok((&self.matrix * op.matrix()).trace())
    }

    fn from_raw(space: Space, matrix: CMatrix) -> Result<Self> {
        let rho = DensityMatrix::from_parts(space, matrix);
        rho.validate()?;
        Ok(rho)
    }

    /// Checks the density-matrix invariants.
    pub fn validate(&self) -> Result<()> {
        if self.matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = self.hermiticity_defect();
        if herm > STATE_HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("Hermiticity defect {herm:e}")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min_eig:e}")));
        }
        Ok(())
    }
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// ρ_B = Tr_A ρ on the mechanical mode.
pub fn partial_trace_mechanical(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let spec = rho
        .space()
        .composite()
        .ok_or_else(|| Error::InvalidState("partial trace needs a two-mode state".into()))?;
    let db = spec.cutoff_b + 1;
    let mut reduced = CMatrix::zeros(db, db);
    for n in 0..=spec.cutoff_a {
        let base = n * db;
        for j in 0..db {
            for i in 0..db {
                reduced[(i, j)] += rho.matrix[(base + i, base + j)];
            }
        }
    }
    Ok(DensityMatrix::from_parts(Space::Single { cutoff: spec.cutoff_b }, reduced))
}

/// ρ_A = Tr_B ρ on the optical mode.
pub fn partial_trace_optical(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let spec = rho
        .space()
        .composite()
        .ok_or_else(|| Error::InvalidState("partial trace needs a two-mode state".into()))?;
    let da = spec.cutoff_a + 1;
    let mut reduced = CMatrix::zeros(da, da);
    for j in 0..da {
        for i in 0..da {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..=spec.cutoff_b {
                acc += rho.matrix[(spec.index(i, m), spec.index(j, m))];
            }
            reduced[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts(Space::Single { cutoff: spec.cutoff_a }, reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn optical_annihilation_on_minimal_space() {
        let space = HilbertSpec::new(1, 1);
        let a = annihilation(space, Mode::Optical);
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                let (ni, mi) = space.levels(i);
                let (nj, mj) = space.levels(j);
                let expected = if ni == 0 && nj == 1 && mi == mj { 1.0 } else { 0.0 };
                assert_eq!(a.matrix()[(i, j)], c(expected), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn ladder_element_sqrt_two() {
        let space = HilbertSpec::new(2, 0);
        let a = annihilation(space, Mode::Optical);
        let v = a.matrix()[(space.index(1, 0), space.index(2, 0))];
        assert!((v.re - 2f64.sqrt()).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn optical_number_diagonal_in_index_order() {
        let space = HilbertSpec::new(2, 1);
        let a = annihilation(space, Mode::Optical);
        let n = &a.adjoint() * &a;
        let diag: Vec<f64> = (0..space.dim()).map(|i| n.matrix()[(i, i)].re).collect();
        // agrees with the index formula
        for (i, (nn, _)) in space.basis().enumerate() {
            assert!((diag[i] - nn as f64).abs() < 1e-14);
        }
        assert!(n.max_abs_diff(&number(space, Mode::Optical)) < 1e-15);
    }

    #[test]
    fn cross_kerr_entries() {
        let space = HilbertSpec::new(3, 4);
        let o = tensor_number_product(space);
        for m in 0..=4 {
            assert_eq!(o.matrix()[(space.index(0, m), space.index(0, m))], c(0.0));
        }
        assert_eq!(o.matrix()[(space.index(2, 3), space.index(2, 3))], c(6.0));
        let na = number(space, Mode::Optical);
        let nb = number(space, Mode::Mechanical);
        assert!(o.max_abs_diff(&(&na * &nb)) < 1e-15);
        for (n, m) in space.basis() {
            let p = basis_projector(space, n, m);
            assert_eq!(o.commutator(&p).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho_a = DensityMatrix::thermal(2, 0.4).unwrap();
        let rho_b = DensityMatrix::from_pure(
            Space::Single { cutoff: 3 },
            &CVector::from_vec(vec![c(0.5), C64::new(0.0, 0.5), c(0.5), C64::new(0.3, -0.2)]),
        )
        .unwrap();
        let rho = DensityMatrix::product(&rho_a, &rho_b).unwrap();
        let reduced = partial_trace_mechanical(&rho).unwrap();
        assert_eq!(reduced.space(), Space::Single { cutoff: 3 });
        assert!((reduced.matrix() - rho_b.matrix()).iter().all(|z| z.norm() < 1e-15));
        let reduced_a = partial_trace_optical(&rho).unwrap();
        assert!((reduced_a.matrix() - rho_a.matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn partial_trace_of_ground_and_mixed_states() {
        let space = HilbertSpec::new(3, 2);
        let reduced = partial_trace_mechanical(&DensityMatrix::ground(space)).unwrap();
        assert_eq!(reduced, DensityMatrix::ground(Space::Single { cutoff: 2 }));

        let reduced = partial_trace_mechanical(&DensityMatrix::maximally_mixed(space)).unwrap();
        let expected = DensityMatrix::maximally_mixed(Space::Single { cutoff: 2 });
        assert!((reduced.matrix() - expected.matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn partial_trace_rejects_single_mode() {
        assert!(partial_trace_mechanical(&DensityMatrix::fock(3, 1).unwrap()).is_err());
    }

    #[test]
    fn displacement_zero_is_identity() {
        let space = HilbertSpec::new(4, 3);
        let d = displacement(space, Mode::Mechanical, C64::new(0.0, 0.0));
        assert!(d.max_abs_diff(&Operator::identity(space)) < 1e-15);
    }

    #[test]
    fn displaced_vacuum_overlap() {
        // ⟨0|α⟩ = exp(−|α|²/2): oracle from the coherent-state series
        let alpha = C64::from_polar(0.5, 0.7);
        let series: f64 = (0..60)
            .map(|k| {
                let mut term = 1.0;
                for j in 1..=k {
                    term *= 0.25 / j as f64;
                }
                term
            })
            .sum();
        let oracle = 1.0 / series;
        assert!((oracle - (-0.25f64).exp()).abs() < 1e-14);

        let space = HilbertSpec::new(10, 1);
        let d = displacement(space, Mode::Optical, alpha);
        let amp = d.matrix()[(0, 0)];
        assert!((amp.norm_sqr() - oracle).abs() < 1e-6);
    }

    #[test]
    fn displacement_inverse() {
        let space = HilbertSpec::new(12, 12);
        for alpha in [C64::new(1.0, 0.0), C64::from_polar(0.8, 2.1), C64::new(0.0, -0.6)] {
            for mode in [Mode::Optical, Mode::Mechanical] {
                let prod = &displacement(space, mode, alpha) * &displacement(space, mode, -alpha);
                assert!(prod.max_abs_diff(&Operator::identity(space)) < 1e-8);
            }
        }
    }

    #[test]
    fn commutator_identity_below_top_level() {
        let space = HilbertSpec::new(4, 3);
        for mode in [Mode::Optical, Mode::Mechanical] {
            let a = annihilation(space, mode);
            let comm = a.commutator(&a.adjoint()).unwrap();
            let top = space.cutoff(mode);
            for (i, (n, m)) in space.basis().enumerate() {
                let level = if mode == Mode::Optical { n } else { m };
                let expected = if level == top { -(top as f64) } else { 1.0 };
                assert!((comm.matrix()[(i, i)].re - expected).abs() < 1e-12);
            }
            let off: f64 = (0..space.dim())
                .flat_map(|i| (0..space.dim()).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| comm.matrix()[(i, j)].norm())
                .fold(0.0, f64::max);
            assert_eq!(off, 0.0);
        }
    }

    #[test]
    fn identity_tensor_identity() {
        let space = HilbertSpec::new(2, 3);
        let id_a = embed(space, Mode::Optical, &CMatrix::identity(3, 3)).unwrap();
        assert_eq!(id_a, Operator::identity(space));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(Space::Single { cutoff: 1 }, bad_trace).is_err());
        let mut negative = CMatrix::zeros(2, 2);
        negative[(0, 0)] = c(1.5);
        negative[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(Space::Single { cutoff: 1 }, negative).is_err());
        let mut non_herm = CMatrix::identity(2, 2) * c(0.5);
        non_herm[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(Space::Single { cutoff: 1 }, non_herm).is_err());
        let ok = DensityMatrix::new(Space::Single { cutoff: 1 }, CMatrix::identity(2, 2) * c(0.5));
        assert!(ok.is_ok());
    }

    #[test]
    fn operator_hermiticity_flag() {
        let space = HilbertSpec::new(2, 2);
        let a = annihilation(space, Mode::Optical);
        assert!(!a.is_hermitian());
        assert!(a.clone().assert_hermitian().is_err());
        let x = &a + &a.adjoint();
        assert!(x.assert_hermitian().is_ok());
    }

    proptest! {
        #[test]
        fn index_round_trip(ca in 0usize..12, cb in 0usize..12, seed in 0usize..10_000) {
            let space = HilbertSpec::new(ca, cb);
            let i = seed % space.dim();
            let (n, m) = space.levels(i);
            prop_assert!(n <= ca && m <= cb);
            prop_assert_eq!(space.index(n, m), i);
        }

        #[test]
        fn partial_trace_preserves_trace(entries in proptest::collection::vec(-1.0f64..1.0, 2 * 12 * 12)) {
            let space = HilbertSpec::new(2, 3);
            let d = space.dim();
            let g = CMatrix::from_fn(d, d, |i, j| C64::new(entries[i * d + j], entries[d * d + i * d + j]));
            let m = hermitian_part(&(&g * g.adjoint()));
            let tr = m.trace().re;
            prop_assume!(tr > 1e-6);
            let rho = DensityMatrix::new(space, m / c(tr)).unwrap();
            let reduced = partial_trace_mechanical(&rho).unwrap();
            prop_assert!((reduced.trace() - c(1.0)).norm() < 1e-12);
            prop_assert_eq!(reduced.hermiticity_defect(), 0.0);
        }
    }
}
