//! Deutsch-model closed timelike curve.
//!
//! The chronology-respecting system interacts with a CTC system through a
//! unitary `U` on `system (x) ctc`. Consistency requires the CTC state to be
//! a fixed point of `L(tau) = Tr_sys[U (rho (x) tau) U^dagger]`; the system
//! output is `Tr_ctc[U (rho (x) tau*) U^dagger]`.
//!
//! Among possibly many fixed points we return the Cesaro mean of the
//! iterates of `L` started from the maximally mixed state. The mean over
//! `2^k` iterates is computed by repeated doubling on the superoperator
//! matrix, `A_{2N} = A_N (I + S^N) / 2`, so slowly mixing maps cost only a
//! logarithmic number of steps.

use crate::error::{Error, Result};
use crate::quantum::{c, partial_trace_matrix, trace_norm, CMatrix, CVector, DensityOperator, Unitary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSettings {
    /// Target for `||L(tau) - tau||_1`.
    pub tolerance: f64,
    /// Maximum doubling steps; the mean covers `2^max_doublings` iterates.
    pub max_doublings: usize,
}

impl Default for FixedPointSettings {
    fn default() -> Self {
        FixedPointSettings {
            tolerance: 1e-10,
            max_doublings: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeutschBoxConfig {
    unitary: Unitary,
    ctc_dim: usize,
    fixed_point: FixedPointSettings,
}

impl DeutschBoxConfig {
    pub fn new(unitary: Unitary, ctc_dim: usize, fixed_point: FixedPointSettings) -> Result<Self> {
        if ctc_dim == 0 || !unitary.dim().is_multiple_of(ctc_dim) || unitary.dim() == ctc_dim {
            return Err(Error::invalid(
                "Deutsch box",
                format!("unitary dim {} is not system dim x ctc dim {ctc_dim}", unitary.dim()),
            ));
        }
        if fixed_point.tolerance.is_nan() || fixed_point.tolerance <= 0.0 {
            return Err(Error::invalid("Deutsch box", "fixed-point tolerance must be positive"));
        }
        Ok(DeutschBoxConfig {
            unitary,
            ctc_dim,
            fixed_point,
        })
    }

    pub fn unitary(&self) -> &Unitary {
        &self.unitary
    }

    pub fn ctc_dim(&self) -> usize {
        self.ctc_dim
    }

    pub fn system_dim(&self) -> usize {
        self.unitary.dim() / self.ctc_dim
    }

    pub fn fixed_point(&self) -> FixedPointSettings {
        self.fixed_point
    }

    fn check_input(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.system_dim() {
            return Err(Error::Shape(format!(
                "Deutsch box expects system dim {}, got {}",
                self.system_dim(),
                rho.dim()
            )));
        }
        Ok(())
    }

    fn joint(&self, rho_in: &CMatrix, tau: &CMatrix) -> CMatrix {
        let u = self.unitary.matrix();
        u * rho_in.kronecker(tau) * u.adjoint()
    }

    /// Matrix of `L` acting on row-major vectorized CTC operators.
    fn superoperator(&self, rho_in: &DensityOperator) -> Result<CMatrix> {
        let d = self.ctc_dim;
        let dims = [self.system_dim(), d];
        let mut s = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut unit = CMatrix::zeros(d, d);
                unit[(i, j)] = c(1.0, 0.0);
                let image = partial_trace_matrix(&self.joint(rho_in.matrix(), &unit), &dims, &[1])?;
                for r in 0..d {
                    for col in 0..d {
                        s[(r * d + col, i * d + j)] = image[(r, col)];
                    }
                }
            }
        }
        Ok(s)
    }
}

fn unvec(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |r, col| v[r * d + col])
}

/// Removes round-off that breaks `Tr L(X) = Tr X`; repeated squaring would
/// otherwise amplify it geometrically.
fn trace_preserving(mut m: CMatrix, d: usize) -> CMatrix {
    let n = d * d;
    for col in 0..n {
        let want = if col / d == col % d { 1.0 } else { 0.0 };
        let have: crate::quantum::C64 = (0..d).map(|k| m[(k * d + k, col)]).sum();
        let fix = (c(want, 0.0) - have) / c(d as f64, 0.0);
        for k in 0..d {
            m[(k * d + k, col)] += fix;
        }
    }
    m
}

/// Canonical CTC fixed point for input `rho_in`.
pub fn deutsch_fixed_point(config: &DeutschBoxConfig, rho_in: &DensityOperator) -> Result<DensityOperator> {
    config.check_input(rho_in)?;
    let d = config.ctc_dim;
    let s = config.superoperator(rho_in)?;
    let start = CVector::from_fn(d * d, |k, _| {
        if k / d == k % d {
            c(1.0 / d as f64, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });

    let n = d * d;
    let identity = CMatrix::identity(n, n);
    let mut mean = identity.clone();
    let mut power = s.clone();
    let mut residual = f64::INFINITY;
    for step in 0..=config.fixed_point.max_doublings {
        let tau = &mean * &start;
        let moved = &s * &tau;
        residual = trace_norm(&unvec(&(&moved - &tau), d));
        if residual <= config.fixed_point.tolerance {
            return DensityOperator::new(unvec(&tau, d)).map_err(|_| Error::Convergence {
                iterations: step,
                residual,
            });
        }
        mean = trace_preserving(&mean * (&identity + &power) * c(0.5, 0.0), d);
        power = trace_preserving(&power * &power, d);
    }
    Err(Error::Convergence {
        iterations: config.fixed_point.max_doublings,
        residual,
    })
}

/// System output `Tr_ctc[U (rho (x) tau*) U^dagger]`.
pub fn deutsch_apply(config: &DeutschBoxConfig, rho_in: &DensityOperator) -> Result<DensityOperator> {
    let tau = deutsch_fixed_point(config, rho_in)?;
    let dims = [config.system_dim(), config.ctc_dim];
    let out = partial_trace_matrix(&config.joint(rho_in.matrix(), tau.matrix()), &dims, &[0])?;
    DensityOperator::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random, trace_distance, Ket};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(u: Unitary) -> DeutschBoxConfig {
        DeutschBoxConfig::new(u, 2, FixedPointSettings::default()).unwrap()
    }

    #[test]
    fn swap_fixes_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = cfg(Unitary::swap());
        for _ in 0..10 {
            let rho = random::density(2, 2, &mut rng).unwrap();
            let tau = deutsch_fixed_point(&config, &rho).unwrap();
            assert!(trace_distance(&tau, &rho).unwrap() < 1e-9);
            let out = deutsch_apply(&config, &rho).unwrap();
            assert!(trace_distance(&out, &rho).unwrap() < 1e-9);
        }
    }

    #[test]
    fn identity_gives_maximally_mixed_ctc() {
        let config = cfg(Unitary::identity(4).unwrap());
        let rho = Ket::plus().projector();
        let tau = deutsch_fixed_point(&config, &rho).unwrap();
        assert_eq!(tau, DensityOperator::maximally_mixed(2).unwrap());
        assert!(trace_distance(&deutsch_apply(&config, &rho).unwrap(), &rho).unwrap() < 1e-14);
    }

    #[test]
    fn cnot_on_one_conjugates_by_x() {
        let config = cfg(Unitary::cnot());
        let tau = deutsch_fixed_point(&config, &Ket::one().projector()).unwrap();
        assert!(trace_distance(&tau, &DensityOperator::maximally_mixed(2).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_bad_dims_and_reports_nonconvergence() {
        assert!(DeutschBoxConfig::new(Unitary::swap(), 3, FixedPointSettings::default()).is_err());
        let config = DeutschBoxConfig::new(
            Unitary::swap(),
            2,
            FixedPointSettings {
                tolerance: 1e-10,
                max_doublings: 3,
            },
        )
        .unwrap();
        let err = deutsch_fixed_point(&config, &Ket::zero().projector()).unwrap_err();
        match err {
            Error::Convergence { iterations, residual } => {
                assert_eq!(iterations, 3);
                // mean of 8 iterates: (I/2 + 7|0><0|)/8, residual ||(|0><0| - I/2)/8||_1 = 1/8
                assert!((residual - 0.125).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(deutsch_apply(&config, &DensityOperator::maximally_mixed(3).unwrap()).is_err());
    }
}
