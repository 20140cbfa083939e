use crate::error::{Error, Result};
use crate::quantum::{c, check_capacity, tolerance, CMatrix, DensityOperator, Ket};

/// Linear CPTP map in Kraus form, `rho -> sum_k K rho K^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::invalid("channel", "no Kraus operators"))?;
        let (dout, din) = first.shape();
        check_capacity(din)?;
        check_capacity(dout)?;
        let mut sum = CMatrix::zeros(din, din);
        for k in &kraus {
            if k.shape() != (dout, din) {
                return Err(Error::Shape("Kraus operators differ in shape".into()));
            }
            sum += k.adjoint() * k;
        }
        let defect = (sum - CMatrix::identity(din, din))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > tolerance::VALID {
            return Err(Error::invalid(
                "channel",
                format!("not trace preserving (defect {defect:.3e})"),
            ));
        }
        Ok(KrausChannel { kraus })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        KrausChannel::new(vec![CMatrix::identity(dim, dim)])
    }

    /// Qubit identity that appends an untouched `|0>` ancilla; a linear
    /// stand-in with the Brun box's input and output shapes.
    pub fn identity_with_ancilla() -> Self {
        let zero = Ket::zero();
        let k = CMatrix::identity(2, 2).kronecker(zero.amplitudes());
        KrausChannel { kraus: vec![k] }
    }

    pub fn dim_in(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim_in() {
            return Err(Error::Shape(format!(
                "channel expects dim {}, got {}",
                self.dim_in(),
                rho.dim()
            )));
        }
        let mut out = CMatrix::zeros(self.dim_out(), self.dim_out());
        for k in &self.kraus {
            out += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityOperator::from_trusted(out))
    }

    /// Applies the map to an arbitrary (not necessarily positive) operator.
    pub fn apply_operator(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out(), self.dim_out());
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }

    /// Unnormalized Choi matrix `sum_ij |i><j| (x) Phi(|i><j|)`.
    pub fn choi(&self) -> CMatrix {
        let din = self.dim_in();
        let mut out = CMatrix::zeros(din * self.dim_out(), din * self.dim_out());
        for i in 0..din {
            for j in 0..din {
                let mut unit = CMatrix::zeros(din, din);
                unit[(i, j)] = c(1.0, 0.0);
                out += unit.kronecker(&self.apply_operator(&unit));
            }
        }
        out
    }
}
