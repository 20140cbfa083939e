//! Remote preparation of arbitrary ensemble decompositions.
//!
//! Given `sigma_B = sum_i p_i rho_i`, [`hjw_assemblage`] builds the canonical
//! purification of `sigma_B` and a POVM on the purifying system whose outcome
//! `i` occurs with probability `p_i` and leaves `B` in `rho_i`.
//!
//! Construction: refine every member into rank-one pieces
//! `v = sqrt(p_i mu) f` (eigenpairs of `rho_i`), so `sum v v^dagger = sigma_B`.
//! With `|Psi> = sum_k sqrt(lambda_k) |k>_A |e_k>_B`, the vectors
//! `a_k = conj(<e_k|v>) / sqrt(lambda_k)` satisfy `(<a| (x) I)|Psi> = v` and
//! `sum a a^dagger = I_A`; the effect for outcome `i` sums the pieces of
//! member `i`.

use crate::error::{Error, Result};
use crate::quantum::{
    c, eigh, partial_trace_matrix, tolerance, trace_distance, CMatrix, CVector, DensityOperator, Ket, Povm,
};

/// Eigenvalues at or below this are treated as outside the support.
const RANK_TOL: f64 = 1e-12;
/// Default cap on the number of ensemble members.
pub const MAX_MEMBERS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDecomposition {
    sigma: DensityOperator,
    members: Vec<(f64, DensityOperator)>,
}

impl EnsembleDecomposition {
    pub fn new(sigma: DensityOperator, members: Vec<(f64, DensityOperator)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Decomposition("no members".into()));
        }
        let mut total = 0.0;
        let mut avg = CMatrix::zeros(sigma.dim(), sigma.dim());
        for (i, (p, rho)) in members.iter().enumerate() {
            if p.is_nan() || *p <= 0.0 {
                return Err(Error::Decomposition(format!("member {i} has weight {p}")));
            }
            if rho.dim() != sigma.dim() {
                return Err(Error::Decomposition(format!("member {i} has dim {}", rho.dim())));
            }
            total += p;
            avg += rho.matrix() * c(*p, 0.0);
        }
        if (total - 1.0).abs() > tolerance::VALID {
            return Err(Error::Decomposition(format!("weights sum to {total}")));
        }
        let gap = (avg - sigma.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if gap > tolerance::EQUAL {
            return Err(Error::Decomposition(format!(
                "weighted average differs from sigma by {gap:.3e}"
            )));
        }
        Ok(EnsembleDecomposition { sigma, members })
    }

    /// Decomposition of the members' own weighted average.
    pub fn of_members(members: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let terms: Vec<(f64, &DensityOperator)> = members.iter().map(|(p, r)| (*p, r)).collect();
        let sigma = DensityOperator::mixture(&terms).map_err(|e| Error::Decomposition(e.to_string()))?;
        EnsembleDecomposition::new(sigma, members)
    }

    pub fn sigma(&self) -> &DensityOperator {
        &self.sigma
    }

    pub fn members(&self) -> &[(f64, DensityOperator)] {
        &self.members
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringAssemblage {
    state_ab: DensityOperator,
    dim_a: usize,
    povm_a: Povm,
    heralded: Vec<(f64, Option<DensityOperator>)>,
}

impl SteeringAssemblage {
    /// Assemblage produced by measuring `povm_a` on the first factor of `state_ab`.
    pub fn from_measurement(state_ab: DensityOperator, dim_a: usize, povm_a: Povm) -> Result<Self> {
        if dim_a == 0 || !state_ab.dim().is_multiple_of(dim_a) || povm_a.dim() != dim_a {
            return Err(Error::Shape(format!(
                "POVM on dim {} does not fit state dim {} with A dim {dim_a}",
                povm_a.dim(),
                state_ab.dim()
            )));
        }
        let heralded = (0..povm_a.outcomes())
            .map(|i| match conditional(&state_ab, dim_a, &povm_a, i) {
                Ok((p, rho)) => Ok((p, Some(rho))),
                Err(Error::UndefinedConditional { .. }) => Ok((0.0, None)),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        Ok(SteeringAssemblage {
            state_ab,
            dim_a,
            povm_a,
            heralded,
        })
    }

    pub fn state_ab(&self) -> &DensityOperator {
        &self.state_ab
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.state_ab.dim() / self.dim_a
    }

    pub fn povm_a(&self) -> &Povm {
        &self.povm_a
    }

    /// `(probability, conditional state)` per outcome; the state is `None`
    /// for zero-probability outcomes.
    pub fn heralded(&self) -> &[(f64, Option<DensityOperator>)] {
        &self.heralded
    }

    /// Bob's marginal, which no choice of Alice's measurement can change.
    pub fn marginal_b(&self) -> Result<DensityOperator> {
        let m = partial_trace_matrix(self.state_ab.matrix(), &[self.dim_a, self.dim_b()], &[1])?;
        DensityOperator::new(m)
    }
}

fn conditional(
    state_ab: &DensityOperator,
    dim_a: usize,
    povm_a: &Povm,
    outcome: usize,
) -> Result<(f64, DensityOperator)> {
    let effect = povm_a
        .effects()
        .get(outcome)
        .ok_or_else(|| Error::Shape(format!("outcome {outcome} out of range")))?;
    let dim_b = state_ab.dim() / dim_a;
    let lifted = effect.kronecker(&CMatrix::identity(dim_b, dim_b));
    let m = lifted * state_ab.matrix();
    let prob: f64 = m.diagonal().iter().map(|z| z.re).sum();
    if prob <= 1e-14 {
        return Err(Error::UndefinedConditional { outcome });
    }
    let reduced = partial_trace_matrix(&m, &[dim_a, dim_b], &[1])? / c(prob, 0.0);
    let herm = (&reduced + reduced.adjoint()) * c(0.5, 0.0);
    Ok((prob, DensityOperator::new(herm)?))
}

/// Probability of `outcome` and Bob's conditional state.
pub fn steer(assemblage: &SteeringAssemblage, outcome: usize) -> Result<(f64, DensityOperator)> {
    conditional(&assemblage.state_ab, assemblage.dim_a, &assemblage.povm_a, outcome)
}

/// Canonical purification `sum_k sqrt(lambda_k) |k>_A |e_k>_B` over the
/// support of `sigma`, eigenvalues descending. Returns the ket on `A (x) B`
/// and `dim A = rank(sigma)`.
pub fn purify(sigma: &DensityOperator) -> (Ket, usize) {
    let support = support_eigenpairs(sigma);
    let dim_a = support.len();
    let dim_b = sigma.dim();
    let mut amps = vec![c(0.0, 0.0); dim_a * dim_b];
    for (k, (lambda, vec)) in support.iter().enumerate() {
        let s = lambda.sqrt();
        for (b, z) in vec.iter().enumerate() {
            amps[k * dim_b + b] = z * s;
        }
    }
    let ket = Ket::normalized(amps).expect("a density operator has nonzero support");
    (ket, dim_a)
}

fn support_eigenpairs(sigma: &DensityOperator) -> Vec<(f64, Vec<crate::quantum::C64>)> {
    sigma
        .eigen()
        .descending_canonical(tolerance::VALID)
        .into_iter()
        .filter(|(l, _)| *l > RANK_TOL)
        .collect()
}

/// Rank-one refinement of a member: vectors `v` with `sum v v^dagger = rho`.
fn rank_one_pieces(rho: &DensityOperator) -> Vec<CVector> {
    if rho.is_pure() {
        let m = rho.matrix();
        let j = (0..rho.dim())
            .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
            .expect("dim > 0");
        let scale = m[(j, j)].re.sqrt();
        return vec![m.column(j).into_owned() / c(scale, 0.0)];
    }
    let eig = eigh(rho.matrix());
    eig.values
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > RANK_TOL)
        .map(|(k, &mu)| eig.vectors.column(k).into_owned() * c(mu.sqrt(), 0.0))
        .collect()
}

/// Purification of `sigma_B` plus a POVM on `A` that remotely prepares the
/// decomposition.
pub fn hjw_assemblage(d: &EnsembleDecomposition) -> Result<SteeringAssemblage> {
    hjw_assemblage_with_cap(d, MAX_MEMBERS)
}

pub fn hjw_assemblage_with_cap(d: &EnsembleDecomposition, max_members: usize) -> Result<SteeringAssemblage> {
    if d.members.len() > max_members {
        return Err(Error::Decomposition(format!(
            "{} members exceed the cap of {max_members}",
            d.members.len()
        )));
    }
    let support = support_eigenpairs(&d.sigma);
    let dim_a = support.len();
    let eig_vecs: Vec<CVector> = support.iter().map(|(_, v)| CVector::from_vec(v.clone())).collect();

    let mut effects = Vec::with_capacity(d.members.len());
    for (p, rho) in &d.members {
        let mut effect = CMatrix::zeros(dim_a, dim_a);
        for piece in rank_one_pieces(rho) {
            let v = piece * c(p.sqrt(), 0.0);
            let a = CVector::from_fn(dim_a, |k, _| eig_vecs[k].dotc(&v).conj() / c(support[k].0.sqrt(), 0.0));
            effect += &a * a.adjoint();
        }
        effects.push(effect);
    }

    // Symmetric renormalization absorbs the slack allowed in the
    // decomposition invariant so the effects sum to the identity exactly.
    let sum: CMatrix = effects.iter().fold(CMatrix::zeros(dim_a, dim_a), |acc, e| acc + e);
    let inv_sqrt = eigh(&sum).map_values(|l| if l > RANK_TOL { 1.0 / l.sqrt() } else { 0.0 });
    let effects: Vec<CMatrix> = effects.iter().map(|e| &inv_sqrt * e * &inv_sqrt).collect();
    let povm = Povm::new(effects)?;

    let (ket, _) = purify(&d.sigma);
    SteeringAssemblage::from_measurement(ket.projector(), dim_a, povm)
}

/// `(|01> - |10>)/sqrt2`.
pub fn singlet() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ket::new(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]).expect("normalized")
}

/// Largest trace distance between the assemblage's heralded states and the
/// decomposition's members, and largest probability deviation.
pub fn reproduction_error(a: &SteeringAssemblage, d: &EnsembleDecomposition) -> Result<(f64, f64)> {
    let mut worst_p = 0.0f64;
    let mut worst_d = 0.0f64;
    for (i, (p, rho)) in d.members.iter().enumerate() {
        let (q, state) = steer(a, i)?;
        worst_p = worst_p.max((p - q).abs());
        worst_d = worst_d.max(trace_distance(rho, &state)?);
    }
    Ok((worst_p, worst_d))
}
