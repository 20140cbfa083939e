use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::local_preparation;
use crate::boxes::{apply_box, NonlinearBox};
use crate::error::{Error, Result};
use crate::quantum::{born_probabilities, Ket, Povm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveStrategy {
    /// Re-prepare exactly the state the box identified.
    Resend,
    /// Re-prepare the identified bit, always in the psi basis.
    FixedBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub n_bits: u64,
    pub strategy: EveStrategy,
    pub eve_bit_accuracy: f64,
    pub eve_basis_accuracy: f64,
    pub induced_qber: f64,
    pub sifted_key_fraction: f64,
    pub sifted_bits: u64,
}

fn sample<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Intercept-resend attack on BB84 with Eve holding `b`. Alice's states are
/// local deterministic preparations recorded just before the box acts.
pub fn run_bb84_attack(b: &NonlinearBox, n_bits: u64, seed: u64, strategy: EveStrategy) -> Result<AttackReport> {
    let config = b
        .brun_config()
        .ok_or_else(|| Error::Misuse("the BB84 attack needs a Brun or Kent box".into()))?
        .clone();
    let bases: [&[Ket; 2]; 2] = [config.psi(), config.phi()];
    let bob_povms = [Povm::from_basis(config.psi())?, Povm::from_basis(config.phi())?];
    let eve_readout = Povm::computational(4)?;

    // The box's action is fixed per input, so compute the four readouts once.
    let mut readouts = Vec::with_capacity(4);
    for (which, ket) in config.domain() {
        let prep = local_preparation(b, which.name(), ket)?;
        readouts.push(born_probabilities(&apply_box(b, &prep)?, &eve_readout)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut bit_hits, mut basis_hits, mut sifted, mut errors) = (0u64, 0u64, 0u64, 0u64);
    for _ in 0..n_bits {
        let basis = rng.random_range(0..2usize);
        let bit = rng.random_range(0..2usize);
        let outcome = sample(&readouts[2 * basis + bit], &mut rng);
        let (eve_basis, eve_bit) = (outcome >> 1, outcome & 1);
        bit_hits += u64::from(eve_bit == bit);
        basis_hits += u64::from(eve_basis == basis);

        let resend_basis = match strategy {
            EveStrategy::Resend => eve_basis,
            EveStrategy::FixedBasis => 0,
        };
        let forwarded = bases[resend_basis][eve_bit].projector();

        let bob_basis = rng.random_range(0..2usize);
        let bob_bit = sample(&born_probabilities(&forwarded, &bob_povms[bob_basis])?, &mut rng);
        if bob_basis == basis {
            sifted += 1;
            errors += u64::from(bob_bit != bit);
        }
    }
    Ok(AttackReport {
        n_bits,
        strategy,
        eve_bit_accuracy: ratio(bit_hits, n_bits),
        eve_basis_accuracy: ratio(basis_hits, n_bits),
        induced_qber: ratio(errors, sifted),
        sifted_key_fraction: ratio(sifted, n_bits),
        sifted_bits: sifted,
    })
}
