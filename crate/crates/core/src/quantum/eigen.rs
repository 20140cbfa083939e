//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot entry with a diagonal
//! unitary, then applies the real symmetric Jacobi rotation. Converges
//! quadratically; residuals are at the level of machine precision times the
//! matrix norm for the sizes used here (dim <= 64).

use super::{CMatrix, C64};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) V^dagger`, values ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

/// Diagonalizes the Hermitian part `(A + A^dagger)/2` of a square matrix.
pub fn eigh(matrix: &CMatrix) -> HermitianEigen {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "eigh requires a square matrix");
    let mut a = (matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
    let mut v = CMatrix::identity(n, n);

    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * norm.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip entries already negligible against both diagonal entries.
    if b < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / b;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let phase_conj = phase.conj();
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase_conj * s;
    let g_qq = phase_conj * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

impl HermitianEigen {
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Reconstructs `f(A) = V diag(f(values)) V^dagger`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let fl = f(lambda);
            if fl == 0.0 {
                continue;
            }
            let col = self.vectors.column(k);
            out += (col * col.adjoint()) * C64::new(fl, 0.0);
        }
        out
    }

    /// Eigenpairs sorted by descending eigenvalue, each eigenvector rotated so
    /// its first non-negligible amplitude is real and positive. Ties within
    /// `tie_tol` are ordered lexicographically by the phase-fixed amplitudes.
    pub fn descending_canonical(&self, tie_tol: f64) -> Vec<(f64, Vec<C64>)> {
        let n = self.values.len();
        let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
            .map(|k| {
                let mut col: Vec<C64> = self.vectors.column(k).iter().copied().collect();
                if let Some(lead) = col.iter().find(|z| z.norm() > 1e-12).copied() {
                    let fix = lead.conj() / lead.norm();
                    for z in col.iter_mut() {
                        *z *= fix;
                    }
                }
                (self.values[k], col)
            })
            .collect();
        pairs.sort_by(|a, b| {
            if (a.0 - b.0).abs() > tie_tol {
                return b.0.total_cmp(&a.0);
            }
            for (x, y) in a.1.iter().zip(&b.1) {
                let ord = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        });
        pairs
    }
}
