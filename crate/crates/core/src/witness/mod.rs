//! Linear explainability of operational statistics.
//!
//! A [`StatsTable`] records `p(k|P,M)` with rows keyed by preparation label,
//! so distinct preparations may share an input density. [`fit_linear_map`]
//! finds the trace-preserving linear map that best reproduces the table in
//! least squares; a residual that cannot be driven to zero means no linear
//! quantum description exists.
//!
//! Maps are parameterized by a real matrix `T` in orthonormal Hermitian
//! operator bases whose first element is `I/sqrt(d)`. Trace preservation
//! then fixes the first row of `T` and the remaining rows are solved for.

mod format;

pub use format::{parse_stats, write_stats};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::boxes::{apply_box, NonlinearBox};
use crate::error::{Error, Result};
use crate::preparations::{classify_membership, linearly_equivalent, Preparation};
use crate::quantum::{born_probabilities, c, eigh, tolerance, trace_distance, CMatrix, DensityOperator, Ket, Povm};

#[derive(Debug, Clone, PartialEq)]
pub struct StatsTable {
    preparations: Vec<(String, DensityOperator)>,
    measurements: Vec<(String, Povm)>,
    /// Indexed `[preparation][measurement][outcome]`.
    probabilities: Vec<Vec<Vec<f64>>>,
    /// Shots per `(preparation, measurement)` in sampled mode.
    sample_counts: Option<Vec<Vec<u64>>>,
}

impl StatsTable {
    pub fn new(
        preparations: Vec<(String, DensityOperator)>,
        measurements: Vec<(String, Povm)>,
        probabilities: Vec<Vec<Vec<f64>>>,
        sample_counts: Option<Vec<Vec<u64>>>,
    ) -> Result<Self> {
        let bad = |msg: String| Error::invalid("stats table", msg);
        if preparations.is_empty() || measurements.is_empty() {
            return Err(bad("needs at least one preparation and one measurement".into()));
        }
        let din = preparations[0].1.dim();
        let dout = measurements[0].1.dim();
        if preparations.iter().any(|(_, r)| r.dim() != din) {
            return Err(bad("input densities differ in dimension".into()));
        }
        if measurements.iter().any(|(_, m)| m.dim() != dout) {
            return Err(bad("measurements differ in dimension".into()));
        }
        for list in [
            preparations.iter().map(|(l, _)| l).collect::<Vec<_>>(),
            measurements.iter().map(|(l, _)| l).collect::<Vec<_>>(),
        ] {
            let mut sorted = list.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != list.len() {
                return Err(bad("duplicate labels".into()));
            }
        }
        if probabilities.len() != preparations.len() {
            return Err(Error::Shape("probability rows do not match preparations".into()));
        }
        for (pi, row) in probabilities.iter().enumerate() {
            if row.len() != measurements.len() {
                return Err(Error::Shape(format!("row {pi} has {} measurements", row.len())));
            }
            for (mi, dist) in row.iter().enumerate() {
                if dist.len() != measurements[mi].1.outcomes() {
                    return Err(Error::Shape(format!(
                        "cell ({}, {}) has {} outcomes, expected {}",
                        preparations[pi].0,
                        measurements[mi].0,
                        dist.len(),
                        measurements[mi].1.outcomes()
                    )));
                }
                let total: f64 = dist.iter().sum();
                let slack = if sample_counts.is_some() { 0.0 } else { tolerance::VALID };
                if dist.iter().any(|p| !(*p >= -slack && *p <= 1.0 + slack)) {
                    return Err(bad(format!(
                        "cell ({}, {}) has probabilities outside [0, 1]",
                        preparations[pi].0, measurements[mi].0
                    )));
                }
                let slack = if sample_counts.is_some() {
                    1e-12
                } else {
                    tolerance::VALID
                };
                if (total - 1.0).abs() > slack {
                    return Err(bad(format!(
                        "cell ({}, {}) sums to {total}",
                        preparations[pi].0, measurements[mi].0
                    )));
                }
            }
        }
        if let Some(counts) = &sample_counts {
            if counts.len() != preparations.len() || counts.iter().any(|r| r.len() != measurements.len()) {
                return Err(Error::Shape("sample counts do not match the table".into()));
            }
            for (pi, row) in counts.iter().enumerate() {
                for (mi, &n) in row.iter().enumerate() {
                    if n == 0 {
                        return Err(bad("zero sample count".into()));
                    }
                    for &p in &probabilities[pi][mi] {
                        let hits = p * n as f64;
                        if (hits - hits.round()).abs() > 1e-6 {
                            return Err(bad(format!("frequency {p} is not a multiple of 1/{n}")));
                        }
                    }
                }
            }
        }
        Ok(StatsTable {
            preparations,
            measurements,
            probabilities,
            sample_counts,
        })
    }

    /// Exact statistics of `b` on `preps`. Each row's input density is the
    /// preparation's operational density, the state linear theory assigns.
    pub fn from_box(b: &NonlinearBox, preps: &[Preparation], measurements: &[(String, Povm)]) -> Result<Self> {
        let mut probabilities = Vec::with_capacity(preps.len());
        for p in preps {
            let out = apply_box(b, p)?;
            let row = measurements
                .iter()
                .map(|(_, m)| born_probabilities(&out, m))
                .collect::<Result<Vec<_>>>()?;
            probabilities.push(row);
        }
        StatsTable::new(
            preps
                .iter()
                .map(|p| (p.label().to_string(), p.operational_density().clone()))
                .collect(),
            measurements.to_vec(),
            probabilities,
            None,
        )
    }

    /// Exact statistics of a linear map given as a closure on densities.
    pub fn from_map(
        inputs: &[(String, DensityOperator)],
        measurements: &[(String, Povm)],
        map: impl Fn(&DensityOperator) -> Result<DensityOperator>,
    ) -> Result<Self> {
        let mut probabilities = Vec::with_capacity(inputs.len());
        for (_, rho) in inputs {
            let out = map(rho)?;
            probabilities.push(
                measurements
                    .iter()
                    .map(|(_, m)| born_probabilities(&out, m))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        StatsTable::new(inputs.to_vec(), measurements.to_vec(), probabilities, None)
    }

    /// Multinomial resampling with `shots` per cell.
    pub fn sample<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Result<Self> {
        if shots == 0 {
            return Err(Error::invalid("stats table", "zero shots"));
        }
        let mut probabilities = Vec::with_capacity(self.probabilities.len());
        for row in &self.probabilities {
            let mut new_row = Vec::with_capacity(row.len());
            for dist in row {
                let mut remaining = shots;
                let mut mass = 1.0f64;
                let mut freqs = Vec::with_capacity(dist.len());
                for (k, &p) in dist.iter().enumerate() {
                    let hits = if k + 1 == dist.len() || remaining == 0 {
                        remaining
                    } else {
                        let q = (p / mass).clamp(0.0, 1.0);
                        Binomial::new(remaining, q)
                            .map_err(|e| Error::invalid("stats table", e.to_string()))?
                            .sample(rng)
                    };
                    remaining -= hits;
                    mass -= p;
                    freqs.push(hits as f64 / shots as f64);
                }
                new_row.push(freqs);
            }
            probabilities.push(new_row);
        }
        StatsTable::new(
            self.preparations.clone(),
            self.measurements.clone(),
            probabilities,
            Some(vec![vec![shots; self.measurements.len()]; self.preparations.len()]),
        )
    }

    pub fn preparations(&self) -> &[(String, DensityOperator)] {
        &self.preparations
    }

    pub fn measurements(&self) -> &[(String, Povm)] {
        &self.measurements
    }

    pub fn probabilities(&self) -> &[Vec<Vec<f64>>] {
        &self.probabilities
    }

    pub fn sample_counts(&self) -> Option<&[Vec<u64>]> {
        self.sample_counts.as_deref()
    }

    pub fn is_sampled(&self) -> bool {
        self.sample_counts.is_some()
    }

    pub fn dim_in(&self) -> usize {
        self.preparations[0].1.dim()
    }

    pub fn dim_out(&self) -> usize {
        self.measurements[0].1.dim()
    }

    /// Three-sigma binomial tolerance, `3 max sqrt(p(1-p)/N)` over all cells.
    pub fn sampling_tolerance(&self) -> Option<f64> {
        let counts = self.sample_counts.as_ref()?;
        let mut worst = 0.0f64;
        for (pi, row) in self.probabilities.iter().enumerate() {
            for (mi, dist) in row.iter().enumerate() {
                let n = counts[pi][mi] as f64;
                for &p in dist {
                    worst = worst.max((p * (1.0 - p) / n).sqrt());
                }
            }
        }
        Some(3.0 * worst)
    }
}

/// Orthonormal Hermitian basis of `d x d` matrices, `I/sqrt(d)` first.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = vec![CMatrix::identity(d, d) * c(1.0 / (d as f64).sqrt(), 0.0)];
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for k in 0..l {
            m[(k, k)] = c(1.0 / norm, 0.0);
        }
        m[(l, l)] = c(-(l as f64) / norm, 0.0);
        basis.push(m);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..d {
        for l in (k + 1)..d {
            let mut s = CMatrix::zeros(d, d);
            s[(k, l)] = c(h, 0.0);
            s[(l, k)] = c(h, 0.0);
            basis.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(k, l)] = c(0.0, -h);
            a[(l, k)] = c(0.0, h);
            basis.push(a);
        }
    }
    basis
}

/// `Tr(A B)` for Hermitian arguments (real part).
fn hs(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b).diagonal().iter().map(|z| z.re).sum()
}

fn coords(basis: &[CMatrix], m: &CMatrix) -> Vec<crate::quantum::C64> {
    basis.iter().map(|g| (g * m).diagonal().iter().sum()).collect()
}

/// Eigenvalues of a normal matrix `A^T A` at or below this (relative to the
/// largest) are treated as zero.
const NORMAL_RANK_TOL: f64 = 1e-12;

fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| c(x, 0.0))
}

/// Minimum-norm least-squares solution of `A x = b` through the
/// eigendecomposition of `A^T A`.
fn min_norm_lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = eigh(&complexify(&(a.transpose() * a)));
    let atb = complexify(&(a.transpose() * b));
    let top = eig.values.iter().cloned().fold(0.0, f64::max);
    let mut x = CMatrix::zeros(a.ncols(), 1);
    for (k, &l) in eig.values.iter().enumerate() {
        if l > NORMAL_RANK_TOL * top {
            let v = eig.vectors.column(k);
            x += v * (v.adjoint() * &atb) / c(l, 0.0);
        }
    }
    x.map(|z| z.re)
}

/// Least-squares trace-preserving linear map.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    dim_in: usize,
    dim_out: usize,
    /// Real coefficients, `out_basis x in_basis`.
    coefficients: DMatrix<f64>,
    /// Max absolute deviation over all cells.
    pub residual: f64,
    /// Minimum eigenvalue of the Choi matrix `sum |i><j| (x) L(|i><j|)`.
    pub choi_min_eig: f64,
}

impl LinearFit {
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Whether the fit reproduces the data within `tol` and its trace-one
    /// Choi state `J / dim_in` has no eigenvalue below `-tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.residual <= tol && self.choi_min_eig / self.dim_in as f64 >= -tol
    }

    /// Applies the fitted map to any operator on the input space.
    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        let gin = hermitian_basis(self.dim_in);
        let gout = hermitian_basis(self.dim_out);
        let r = coords(&gin, m);
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for (b, hb) in gout.iter().enumerate() {
            let mut coef = c(0.0, 0.0);
            for (a, ra) in r.iter().enumerate() {
                coef += ra * self.coefficients[(b, a)];
            }
            out += hb * coef;
        }
        out
    }

    /// Matrix acting on row-major vectorized operators,
    /// `dim_out^2 x dim_in^2`.
    pub fn superoperator(&self) -> CMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut s = CMatrix::zeros(dout * dout, din * din);
        for i in 0..din {
            for j in 0..din {
                let mut unit = CMatrix::zeros(din, din);
                unit[(i, j)] = c(1.0, 0.0);
                let img = self.apply(&unit);
                for r in 0..dout {
                    for col in 0..dout {
                        s[(r * dout + col, i * din + j)] = img[(r, col)];
                    }
                }
            }
        }
        s
    }

    pub fn choi(&self) -> CMatrix {
        let din = self.dim_in;
        let mut out = CMatrix::zeros(din * self.dim_out, din * self.dim_out);
        for i in 0..din {
            for j in 0..din {
                let mut unit = CMatrix::zeros(din, din);
                unit[(i, j)] = c(1.0, 0.0);
                out += unit.kronecker(&self.apply(&unit));
            }
        }
        out
    }
}

/// Fits a trace-preserving linear map to the table.
pub fn fit_linear_map(t: &StatsTable) -> Result<LinearFit> {
    let (din, dout) = (t.dim_in(), t.dim_out());
    let gin = hermitian_basis(din);
    let gout = hermitian_basis(dout);
    let nin = din * din;
    let nout = dout * dout;

    let input_coords: Vec<Vec<f64>> = t
        .preparations
        .iter()
        .map(|(_, rho)| gin.iter().map(|g| hs(g, rho.matrix())).collect())
        .collect();

    let gram = DMatrix::from_fn(input_coords.len(), nin, |i, a| input_coords[i][a]);
    let normal = eigh(&complexify(&(gram.transpose() * &gram)));
    let top = normal.values.iter().cloned().fold(0.0, f64::max);
    let rank = normal.values.iter().filter(|&&l| l > NORMAL_RANK_TOL * top).count();
    if rank < nin {
        return Err(Error::Rank { rank, required: nin });
    }

    let fixed = (din as f64 / dout as f64).sqrt();
    let unknowns = (nout - 1) * nin;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut targets: Vec<f64> = Vec::new();
    for (pi, r) in input_coords.iter().enumerate() {
        for (mi, (_, povm)) in t.measurements.iter().enumerate() {
            for (k, effect) in povm.effects().iter().enumerate() {
                let e: Vec<f64> = gout.iter().map(|h| hs(effect, h)).collect();
                let mut row = vec![0.0; unknowns];
                for b in 1..nout {
                    for a in 0..nin {
                        row[(b - 1) * nin + a] = e[b] * r[a];
                    }
                }
                rows.push(row);
                targets.push(t.probabilities[pi][mi][k] - e[0] * fixed * r[0]);
            }
        }
    }
    let solution = if unknowns == 0 {
        DMatrix::zeros(0, 1)
    } else {
        let design = DMatrix::from_fn(rows.len(), unknowns, |i, j| rows[i][j]);
        let rhs = DMatrix::from_column_slice(targets.len(), 1, &targets);
        min_norm_lstsq(&design, &rhs)
    };

    let mut coefficients = DMatrix::zeros(nout, nin);
    coefficients[(0, 0)] = fixed;
    for b in 1..nout {
        for a in 0..nin {
            coefficients[(b, a)] = solution[((b - 1) * nin + a, 0)];
        }
    }

    let mut fit = LinearFit {
        dim_in: din,
        dim_out: dout,
        coefficients,
        residual: 0.0,
        choi_min_eig: 0.0,
    };

    let mut residual = 0.0f64;
    for (pi, (_, rho)) in t.preparations.iter().enumerate() {
        let out = fit.apply(rho.matrix());
        for (mi, (_, povm)) in t.measurements.iter().enumerate() {
            for (k, effect) in povm.effects().iter().enumerate() {
                let predicted = hs(effect, &out);
                residual = residual.max((predicted - t.probabilities[pi][mi][k]).abs());
            }
        }
    }
    fit.residual = residual;
    fit.choi_min_eig = eigh(&fit.choi()).min_value();
    Ok(fit)
}

/// Whether the table admits a linear quantum explanation within `tol`.
/// Defaults: the three-sigma binomial rule in sampled mode, 1e-8 otherwise.
pub fn is_linear_explainable(t: &StatsTable, tol: Option<f64>) -> Result<bool> {
    let tol = tol.or_else(|| t.sampling_tolerance()).unwrap_or(tolerance::EQUAL);
    Ok(fit_linear_map(t)?.within(tol))
}

/// Output distance of two linearly equivalent member preparations.
pub fn affinity_violation(b: &NonlinearBox, pair: (&Preparation, &Preparation)) -> Result<f64> {
    let (p1, p2) = pair;
    if !linearly_equivalent(p1, p2)? {
        return Err(Error::Misuse(format!(
            "'{}' and '{}' are not linearly equivalent",
            p1.label(),
            p2.label()
        )));
    }
    for p in [p1, p2] {
        if !classify_membership(p, b.membership()) {
            return Err(Error::Misuse(format!(
                "'{}' is not a member of the verifying set",
                p.label()
            )));
        }
    }
    trace_distance(&apply_box(b, p1)?, &apply_box(b, p2)?)
}

/// The six Pauli eigenstates `|0>, |1>, |+>, |->, |+i>, |-i>`.
pub fn pauli_inputs() -> Vec<(String, DensityOperator)> {
    [
        ("z+", Ket::zero()),
        ("z-", Ket::one()),
        ("x+", Ket::plus()),
        ("x-", Ket::minus()),
        ("y+", Ket::plus_i()),
        ("y-", Ket::minus_i()),
    ]
    .into_iter()
    .map(|(l, k)| (l.to_string(), k.projector()))
    .collect()
}

fn pauli_bases() -> [(&'static str, [Ket; 2]); 3] {
    [
        ("x", [Ket::plus(), Ket::minus()]),
        ("y", [Ket::plus_i(), Ket::minus_i()]),
        ("z", [Ket::zero(), Ket::one()]),
    ]
}

/// Projective X, Y, Z measurements on a qubit.
pub fn pauli_measurements() -> Vec<(String, Povm)> {
    pauli_bases()
        .into_iter()
        .map(|(l, b)| (l.to_string(), Povm::from_basis(&b).expect("orthonormal")))
        .collect()
}

/// Product Pauli-basis measurements on `n` qubits, `3^n` settings labelled
/// like `"xz"`; together they are tomographically complete.
pub fn pauli_product_measurements(n: usize) -> Result<Vec<(String, Povm)>> {
    let mut settings: Vec<(String, Vec<Ket>)> = vec![(String::new(), vec![Ket::new(vec![c(1.0, 0.0)])?])];
    for _ in 0..n {
        let mut next = Vec::with_capacity(settings.len() * 3);
        for (label, kets) in &settings {
            for (name, basis) in pauli_bases() {
                let mut product = Vec::with_capacity(kets.len() * 2);
                for k in kets {
                    for b in &basis {
                        product.push(k.tensor(b)?);
                    }
                }
                next.push((format!("{label}{name}"), product));
            }
        }
        settings = next;
    }
    settings
        .into_iter()
        .map(|(l, kets)| Ok((l, Povm::from_basis(&kets)?)))
        .collect()
}

/// Computational-basis measurement of each output factor separately.
pub fn factor_measurements(dims: &[usize]) -> Result<Vec<(String, Povm)>> {
    (0..dims.len())
        .map(|f| Ok((format!("q{f}"), Povm::on_factor(dims, f)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::KrausChannel;
    use crate::quantum::{random, Unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_orthonormal() {
        for d in 1..5 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((hs(x, y) - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn identity_channel_fits_exactly() {
        let t = StatsTable::from_map(&pauli_inputs(), &pauli_measurements(), |r| Ok(r.clone())).unwrap();
        let fit = fit_linear_map(&t).unwrap();
        assert!(fit.residual < 1e-9);
        assert!(fit.choi_min_eig >= -1e-9);
        let ident = KrausChannel::identity(2).unwrap();
        assert!((fit.choi() - ident.choi()).norm() < 1e-9);
        assert!(is_linear_explainable(&t, Some(1e-8)).unwrap());
    }

    #[test]
    fn unitary_rotation_fits_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random::unitary(2, &mut rng).unwrap();
        let t = StatsTable::from_map(&pauli_inputs(), &pauli_measurements(), |r| r.evolve(&u)).unwrap();
        let fit = fit_linear_map(&t).unwrap();
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn superoperator_of_identity() {
        let t = StatsTable::from_map(&pauli_inputs(), &pauli_measurements(), |r| Ok(r.clone())).unwrap();
        let s = fit_linear_map(&t).unwrap().superoperator();
        assert!((s - CMatrix::identity(4, 4)).norm() < 1e-9);
    }

    #[test]
    fn rank_error_names_deficiency() {
        let inputs: Vec<_> = pauli_inputs().into_iter().take(4).collect(); // no Y component
        let t = StatsTable::from_map(&inputs, &pauli_measurements(), |r| Ok(r.clone())).unwrap();
        assert_eq!(fit_linear_map(&t).unwrap_err(), Error::Rank { rank: 3, required: 4 });
    }

    #[test]
    fn one_dimensional_output_has_nothing_to_fit() {
        let inputs = vec![
            ("a".to_string(), Ket::zero().projector()),
            ("b".to_string(), Ket::plus().projector()),
            ("c".to_string(), Ket::plus_i().projector()),
            ("d".to_string(), Ket::one().projector()),
        ];
        let trivial = vec![("m".to_string(), Povm::computational(1).unwrap())];
        let t = StatsTable::new(inputs, trivial, vec![vec![vec![1.0]]; 4], None).unwrap();
        let fit = fit_linear_map(&t).unwrap();
        assert!(fit.residual < 1e-12);
        assert!((fit.choi_min_eig - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_validation() {
        let inputs = pauli_inputs();
        let meas = pauli_measurements();
        let bad_row = vec![vec![vec![0.7, 0.7]; 3]; 6];
        assert!(StatsTable::new(inputs.clone(), meas.clone(), bad_row, None).is_err());
        let mut dup = inputs.clone();
        dup[1].0 = dup[0].0.clone();
        let ok = vec![vec![vec![0.5, 0.5]; 3]; 6];
        assert!(StatsTable::new(dup, meas.clone(), ok.clone(), None).is_err());
        let counts = Some(vec![vec![3u64; 3]; 6]);
        assert!(StatsTable::new(inputs, meas, ok, counts).is_err()); // 0.5 is not k/3
    }

    #[test]
    fn sampling_is_normalized_and_seeded() {
        let t = StatsTable::from_map(&pauli_inputs(), &pauli_measurements(), |r| Ok(r.clone())).unwrap();
        let a = t.sample(1000, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = t.sample(1000, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_sampled());
        assert!(a.sampling_tolerance().unwrap() > 0.0);
    }

    #[test]
    fn nonunitary_channel_choi_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = random::channel(2, 2, 2, &mut rng).unwrap();
        let t = StatsTable::from_map(&pauli_inputs(), &pauli_measurements(), |r| ch.apply(r)).unwrap();
        let fit = fit_linear_map(&t).unwrap();
        assert!(fit.residual < 1e-9);
        assert!(fit.choi_min_eig > -1e-9);
        let _ = Unitary::swap();
    }
}
