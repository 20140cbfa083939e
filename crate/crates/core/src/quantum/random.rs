//! Seeded random states, unitaries and channels for tests and calibration.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, DensityOperator, Ket, Unitary, C64};
use crate::boxes::KrausChannel;
use crate::error::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Ket> {
    Ket::normalized((0..dim).map(|_| gaussian(rng)).collect())
}

/// Haar-random unitary: Householder QR of a complex Ginibre matrix, with
/// the phases of `diag(R)` moved into `Q`.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Unitary> {
    let qr = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng)).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Unitary::new(q)
}

/// Random density operator `G G^dagger / Tr` with `G` of shape dim x rank.
pub fn density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityOperator::new(m / c(tr, 0.0))
}

/// Random CPTP map `dim_in -> dim_out` via a Haar unitary on the input
/// dilated by an environment, followed by tracing out the environment.
pub fn channel<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, env_dim: usize, rng: &mut R) -> Result<KrausChannel> {
    // Stinespring isometry: dim_in -> dim_out * env_dim, first dim_in columns of a unitary.
    let total = dim_out * env_dim;
    assert!(total >= dim_in, "dilation too small");
    let u = unitary(total, rng)?;
    let kraus = (0..env_dim)
        .map(|e| CMatrix::from_fn(dim_out, dim_in, |r, col| u.matrix()[(r * env_dim + e, col)]))
        .collect();
    KrausChannel::new(kraus)
}
