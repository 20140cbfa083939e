//! Dense finite-dimensional states, measurements and unitaries.
//!
//! All types validate their invariants on construction and are immutable
//! afterwards. Tolerances live in [`tolerance`].

mod eigen;
pub mod random;

pub use eigen::{eigh, HermitianEigen};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub mod tolerance {
    /// Validity checks on type invariants.
    pub const VALID: f64 = 1e-9;
    /// Derived equalities (equivalence, decompositions).
    pub const EQUAL: f64 = 1e-8;
    /// Born probabilities above `-CLAMP` are clamped to zero.
    pub const CLAMP: f64 = 1e-12;
    /// Largest total Hilbert-space dimension any operation may produce.
    pub const MAX_DIM: usize = 1 << 12;
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn check_capacity(dim: usize) -> Result<()> {
    if dim == 0 || dim > tolerance::MAX_DIM {
        return Err(Error::Capacity {
            dim,
            max: tolerance::MAX_DIM,
        });
    }
    Ok(())
}

fn max_hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        check_capacity(amplitudes.len())?;
        let amps = CVector::from_vec(amplitudes);
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > tolerance::VALID {
            return Err(Error::invalid("ket", format!("squared norm {norm_sqr} is not 1")));
        }
        Ok(Ket { amps })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::invalid("ket", "zero vector"));
        }
        Ket::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Shape(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut v = vec![c(0.0, 0.0); dim];
        v[index] = c(1.0, 0.0);
        Ket::new(v)
    }

    pub fn zero() -> Self {
        Ket {
            amps: CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
        }
    }

    pub fn one() -> Self {
        Ket {
            amps: CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        }
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Ket {
            amps: CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]),
        }
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Ket {
            amps: CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]),
        }
    }

    pub fn plus_i() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Ket {
            amps: CVector::from_vec(vec![c(h, 0.0), c(0.0, h)]),
        }
    }

    pub fn minus_i() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Ket {
            amps: CVector::from_vec(vec![c(h, 0.0), c(0.0, -h)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Ket) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amps * self.amps.adjoint(),
        }
    }

    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        check_capacity(self.dim().saturating_mul(other.dim()))?;
        Ok(Ket {
            amps: self.amps.kronecker(&other.amps),
        })
    }
}

/// Trace-one positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Shape(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_capacity(matrix.nrows())?;
        let defect = max_hermitian_defect(&matrix);
        if defect > tolerance::VALID {
            return Err(Error::invalid(
                "density operator",
                format!("not Hermitian (max |M - M^dagger| = {defect:.3e})"),
            ));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > tolerance::VALID || tr.im.abs() > tolerance::VALID {
            return Err(Error::invalid("density operator", format!("trace {tr} is not 1")));
        }
        let min = eigh(&matrix).min_value();
        if min < -tolerance::VALID {
            return Err(Error::invalid(
                "density operator",
                format!("minimum eigenvalue {min:.3e} is negative"),
            ));
        }
        Ok(DensityOperator {
            matrix: hermitize(&matrix),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_capacity(dim)?;
        Ok(DensityOperator {
            matrix: CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0),
        })
    }

    pub fn from_ket(ket: &Ket) -> Self {
        ket.projector()
    }

    /// Diagonal density matrix from real probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let diag = CVector::from_iterator(probs.len(), probs.iter().map(|&p| c(p, 0.0)));
        DensityOperator::new(CMatrix::from_diagonal(&diag))
    }

    /// Convex combination `sum_i w_i rho_i`.
    pub fn mixture(terms: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::invalid("mixture", "no terms"))?;
        let dim = first.1.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, rho) in terms {
            if rho.dim() != dim {
                return Err(Error::Shape(format!("mixture of dims {dim} and {}", rho.dim())));
            }
            acc += rho.matrix() * c(*w, 0.0);
        }
        DensityOperator::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - tolerance::VALID
    }

    pub fn eigen(&self) -> HermitianEigen {
        eigh(&self.matrix)
    }

    /// Leading eigenvector under the canonical phase convention.
    pub fn principal_ket(&self) -> Ket {
        let pairs = self.eigen().descending_canonical(1e-12);
        Ket {
            amps: CVector::from_vec(pairs[0].1.clone()),
        }
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with(&self, ket: &Ket) -> Result<f64> {
        if ket.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "fidelity between dims {} and {}",
                self.dim(),
                ket.dim()
            )));
        }
        let v = &self.matrix * ket.amplitudes();
        Ok(ket.amplitudes().dotc(&v).re)
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        check_capacity(self.dim().saturating_mul(other.dim()))?;
        Ok(DensityOperator {
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Conjugation `U rho U^dagger`.
    pub fn evolve(&self, u: &Unitary) -> Result<DensityOperator> {
        if u.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "unitary dim {} on state dim {}",
                u.dim(),
                self.dim()
            )));
        }
        Ok(DensityOperator {
            matrix: hermitize(&(u.matrix() * &self.matrix * u.matrix().adjoint())),
        })
    }

    /// Wraps a matrix that is valid by construction (products and partial
    /// traces of valid states), only Hermitizing away rounding.
    pub(crate) fn from_trusted(matrix: CMatrix) -> DensityOperator {
        DensityOperator {
            matrix: hermitize(&matrix),
        }
    }
}

/// Kronecker product of two values of the same kind.
pub trait Tensor: Sized {
    fn tensor_with(&self, other: &Self) -> Result<Self>;
}

impl Tensor for Ket {
    fn tensor_with(&self, other: &Self) -> Result<Self> {
        self.tensor(other)
    }
}

impl Tensor for DensityOperator {
    fn tensor_with(&self, other: &Self) -> Result<Self> {
        self.tensor(other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor_with(b)
}

/// Partial trace of a raw square matrix over the factors not in `keep`.
/// Kept factors appear in ascending index order.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != m.nrows() || m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "factor dims {dims:?} inconsistent with matrix {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Shape(format!("subsystem index {bad} out of range")));
    }
    let kept_dim: usize = keep_sorted.iter().map(|&k| dims[k]).product();

    // Split every full index into (kept, traced) multi-indices.
    let mut kidx = vec![0usize; total];
    let mut tidx = vec![0usize; total];
    for (i, (ki, ti)) in kidx.iter_mut().zip(tidx.iter_mut()).enumerate() {
        let mut rem = i;
        let mut digits = vec![0usize; dims.len()];
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let (mut k, mut t) = (0usize, 0usize);
        for (f, &d) in digits.iter().enumerate() {
            if keep_sorted.binary_search(&f).is_ok() {
                k = k * dims[f] + d;
            } else {
                t = t * dims[f] + d;
            }
        }
        *ki = k;
        *ti = t;
    }

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for i in 0..total {
        for j in 0..total {
            if tidx[i] == tidx[j] {
                out[(kidx[i], kidx[j])] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityOperator, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
    Ok(DensityOperator::from_trusted(partial_trace_matrix(
        rho.matrix(),
        dims,
        keep,
    )?))
}

/// Outcome probabilities `Tr(E_k rho)`.
pub fn born_probabilities(rho: &DensityOperator, povm: &Povm) -> Result<Vec<f64>> {
    if rho.dim() != povm.dim() {
        return Err(Error::Shape(format!(
            "state dim {} measured by POVM on dim {}",
            rho.dim(),
            povm.dim()
        )));
    }
    povm.effects
        .iter()
        .map(|e| {
            let p = trace(&(e * rho.matrix())).re;
            if !(-tolerance::CLAMP..=1.0 + tolerance::CLAMP).contains(&p) {
                Err(Error::invalid(
                    "probability",
                    format!("Born probability {p:.3e} outside [0, 1]"),
                ))
            } else {
                Ok(p.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "trace distance between dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix() - b.matrix();
    Ok(trace_norm(&diff) / 2.0)
}

/// Sum of absolute eigenvalues of the Hermitian part of `m`.
pub fn trace_norm(m: &CMatrix) -> f64 {
    eigh(m).values.iter().map(|l| l.abs()).sum()
}

/// Positive operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let first = effects.first().ok_or_else(|| Error::invalid("POVM", "no effects"))?;
        let dim = first.nrows();
        check_capacity(dim)?;
        let mut sum = CMatrix::zeros(dim, dim);
        for (k, e) in effects.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::Shape(format!("effect {k} is not {dim}x{dim}")));
            }
            if max_hermitian_defect(e) > tolerance::VALID {
                return Err(Error::invalid("POVM", format!("effect {k} is not Hermitian")));
            }
            let min = eigh(e).min_value();
            if min < -tolerance::VALID {
                return Err(Error::invalid(
                    "POVM",
                    format!("effect {k} has negative eigenvalue {min:.3e}"),
                ));
            }
            sum += e;
        }
        let defect = (sum - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > tolerance::VALID {
            return Err(Error::invalid(
                "POVM",
                format!("effects do not sum to identity (max deviation {defect:.3e})"),
            ));
        }
        Ok(Povm {
            dim,
            effects: effects.iter().map(hermitize).collect(),
        })
    }

    /// Projective measurement onto an orthonormal basis.
    pub fn from_basis(basis: &[Ket]) -> Result<Self> {
        Povm::new(basis.iter().map(|k| k.projector().matrix).collect())
    }

    pub fn computational(dim: usize) -> Result<Self> {
        let basis: Vec<Ket> = (0..dim).map(|i| Ket::basis(dim, i)).collect::<Result<_>>()?;
        Povm::from_basis(&basis)
    }

    /// Computational-basis measurement of one factor of a product space,
    /// identity elsewhere.
    pub fn on_factor(dims: &[usize], factor: usize) -> Result<Self> {
        if factor >= dims.len() {
            return Err(Error::Shape(format!("factor {factor} out of range for {dims:?}")));
        }
        let before: usize = dims[..factor].iter().product();
        let after: usize = dims[factor + 1..].iter().product();
        let d = dims[factor];
        let effects = (0..d)
            .map(|k| {
                let mut proj = CMatrix::zeros(d, d);
                proj[(k, k)] = c(1.0, 0.0);
                CMatrix::identity(before, before)
                    .kronecker(&proj)
                    .kronecker(&CMatrix::identity(after, after))
            })
            .collect();
        Povm::new(effects)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }
}

/// Unitary operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: CMatrix,
}

impl Unitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Shape("unitary must be square".into()));
        }
        check_capacity(matrix.nrows())?;
        let n = matrix.nrows();
        let defect = (matrix.adjoint() * &matrix - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > tolerance::VALID {
            return Err(Error::invalid(
                "unitary",
                format!("U^dagger U deviates from identity by {defect:.3e}"),
            ));
        }
        Ok(Unitary { matrix })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_capacity(dim)?;
        Ok(Unitary {
            matrix: CMatrix::identity(dim, dim),
        })
    }

    /// Two-qubit swap.
    pub fn swap() -> Self {
        let mut m = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(i, j)] = c(1.0, 0.0);
        }
        Unitary { matrix: m }
    }

    /// Controlled-NOT with the first qubit as control.
    pub fn cnot() -> Self {
        let mut m = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(i, j)] = c(1.0, 0.0);
        }
        Unitary { matrix: m }
    }

    /// Controlled-NOT with the second qubit as control.
    pub fn cnot_reversed() -> Self {
        let mut m = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
            m[(i, j)] = c(1.0, 0.0);
        }
        Unitary { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Unitary) -> Result<Unitary> {
        if self.dim() != other.dim() {
            return Err(Error::Shape("composing unitaries of different dims".into()));
        }
        Ok(Unitary {
            matrix: &self.matrix * &other.matrix,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn ket_tensor_basis() {
        let k = Ket::zero().tensor(&Ket::one()).unwrap();
        let expect = [0.0, 1.0, 0.0, 0.0];
        for (z, e) in k.amplitudes().iter().zip(expect) {
            assert_eq!(*z, c(e, 0.0));
        }
    }

    #[test]
    fn plus_tensor_plus_is_uniform() {
        let k = tensor(&Ket::plus(), &Ket::plus()).unwrap();
        // oracle: each entry is (1/sqrt2)(1/sqrt2)
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for z in k.amplitudes().iter() {
            assert!((z - c(h * h, 0.0)).norm() < 1e-15);
            assert!((z.re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn mixed_tensor_mixed() {
        let half = DensityOperator::maximally_mixed(2).unwrap();
        let quarter = half.tensor(&half).unwrap();
        assert!(close(
            quarter.matrix(),
            DensityOperator::maximally_mixed(4).unwrap().matrix(),
            1e-15
        ));
    }

    #[test]
    fn capacity_error() {
        let big = DensityOperator::maximally_mixed(64).unwrap();
        let bigger = big.tensor(&big).unwrap();
        assert!(matches!(
            bigger.tensor(&DensityOperator::maximally_mixed(2).unwrap()),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(Ket::new(Vec::new()), Err(Error::Capacity { .. })));
    }

    #[test]
    fn rejects_invalid_states() {
        assert!(Ket::new(vec![c(0.9, 0.0), c(0.0, 0.0)]).is_err());
        let not_herm = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(DensityOperator::new(not_herm).is_err());
        let trace2 = CMatrix::identity(2, 2);
        assert!(DensityOperator::new(trace2).is_err());
        let neg = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(DensityOperator::new(neg), Err(Error::Invalid { .. })));
        let not_unitary = CMatrix::identity(2, 2) * c(2.0, 0.0);
        assert!(Unitary::new(not_unitary).is_err());
        let bad_povm = vec![CMatrix::identity(2, 2), CMatrix::identity(2, 2)];
        assert!(Povm::new(bad_povm).is_err());
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = Ket::zero().tensor(&Ket::one()).unwrap().projector();
        let b = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(close(b.matrix(), Ket::one().projector().matrix(), 1e-15));
    }

    #[test]
    fn partial_trace_singlet_is_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = Ket::new(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]).unwrap();
        let b = partial_trace(&singlet.projector(), &[2, 2], &[1]).unwrap();
        assert!(close(
            b.matrix(),
            DensityOperator::maximally_mixed(2).unwrap().matrix(),
            1e-15
        ));
    }

    #[test]
    fn partial_trace_shape_errors() {
        let rho = DensityOperator::maximally_mixed(4).unwrap();
        assert!(matches!(partial_trace(&rho, &[2, 3], &[0]), Err(Error::Shape(_))));
        assert!(matches!(partial_trace(&rho, &[2, 2], &[2]), Err(Error::Shape(_))));
    }

    #[test]
    fn born_examples() {
        let z = Povm::computational(2).unwrap();
        let p = born_probabilities(&Ket::plus().projector(), &z).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = born_probabilities(&Ket::zero().projector(), &z).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
        // |<+|0>|^2 = |<-|0>|^2 = 1/2
        let x = Povm::from_basis(&[Ket::plus(), Ket::minus()]).unwrap();
        let p = born_probabilities(&Ket::zero().projector(), &x).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert!(matches!(
            born_probabilities(&DensityOperator::maximally_mixed(4).unwrap(), &z),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = Ket::zero().projector();
        let one = Ket::one().projector();
        let plus = Ket::plus().projector();
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        assert!(trace_distance(&plus, &plus).unwrap().abs() < 1e-14);
        // oracle: |0><0| - |+><+| = [[1/2,-1/2],[-1/2,-1/2]], eigenvalues +-1/sqrt2
        let expect = std::f64::consts::FRAC_1_SQRT_2;
        assert!((trace_distance(&zero, &plus).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn on_factor_marginal() {
        let m = Povm::on_factor(&[2, 2], 0).unwrap();
        let rho = Ket::one().tensor(&Ket::plus()).unwrap().projector();
        let p = born_probabilities(&rho, &m).unwrap();
        assert!((p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn named_unitaries_are_valid() {
        for u in [Unitary::swap(), Unitary::cnot(), Unitary::cnot_reversed()] {
            Unitary::new(u.matrix().clone()).unwrap();
        }
    }
}
