use crate::error::{Error, Result};
use crate::quantum::{tolerance, DensityOperator, Ket};

/// How the box acts on pure inputs outside its four domain states.
#[derive(Debug, Clone, PartialEq)]
pub enum Completion {
    /// Out-of-domain pure inputs are a domain error.
    Strict,
    /// Extra pure-state entries, tried after the domain states, and an
    /// optional fallback output for anything else.
    Custom {
        entries: Vec<(Ket, DensityOperator)>,
        fallback: Option<DensityOperator>,
    },
}

/// Two non-identical orthonormal qubit bases. The box sends
/// `psi_i -> |0>|i>` and `phi_i -> |1>|i>`: the first output qubit names the
/// basis, the second the index. The ancilla `|0>` is internal.
#[derive(Debug, Clone, PartialEq)]
pub struct BrunBoxConfig {
    psi: [Ket; 2],
    phi: [Ket; 2],
    completion: Completion,
}

impl BrunBoxConfig {
    pub fn new(psi: [Ket; 2], phi: [Ket; 2], completion: Completion) -> Result<Self> {
        for (name, basis) in [("psi", &psi), ("phi", &phi)] {
            if basis.iter().any(|k| k.dim() != 2) {
                return Err(Error::invalid(
                    "Brun box",
                    format!("{name} basis vectors must be qubits"),
                ));
            }
            let overlap = basis[0].inner(&basis[1])?.norm();
            if overlap > tolerance::VALID {
                return Err(Error::invalid(
                    "Brun box",
                    format!("{name} basis is not orthonormal (|<0|1>| = {overlap:.3e})"),
                ));
            }
        }
        let mut any_partial = false;
        for a in &psi {
            for b in &phi {
                let ov = a.inner(b)?.norm();
                if ov > 1e-6 && ov < 1.0 - 1e-6 {
                    any_partial = true;
                }
            }
        }
        if !any_partial {
            return Err(Error::invalid(
                "Brun box",
                "psi and phi bases coincide up to relabeling and phases",
            ));
        }
        if let Completion::Custom { entries, fallback } = &completion {
            for (k, out) in entries {
                if k.dim() != 2 || out.dim() != 4 {
                    return Err(Error::invalid(
                        "Brun box",
                        "custom entries map qubits to two-qubit states",
                    ));
                }
            }
            if fallback.as_ref().is_some_and(|f| f.dim() != 4) {
                return Err(Error::invalid("Brun box", "custom fallback must be a two-qubit state"));
            }
        }
        Ok(BrunBoxConfig { psi, phi, completion })
    }

    /// psi = computational, phi = {|+>, |->}.
    pub fn bb84() -> Self {
        BrunBoxConfig::new(
            [Ket::zero(), Ket::one()],
            [Ket::plus(), Ket::minus()],
            Completion::Strict,
        )
        .expect("BB84 bases are valid")
    }

    pub fn with_completion(mut self, completion: Completion) -> Result<Self> {
        self.completion = completion;
        BrunBoxConfig::new(self.psi, self.phi, self.completion)
    }

    pub fn psi(&self) -> &[Ket; 2] {
        &self.psi
    }

    pub fn phi(&self) -> &[Ket; 2] {
        &self.phi
    }

    pub fn completion(&self) -> &Completion {
        &self.completion
    }

    /// The four domain states with their (basis bit, index bit) labels.
    pub fn domain(&self) -> [(DomainState, &Ket); 4] {
        [
            (DomainState::Psi0, &self.psi[0]),
            (DomainState::Psi1, &self.psi[1]),
            (DomainState::Phi0, &self.phi[0]),
            (DomainState::Phi1, &self.phi[1]),
        ]
    }

    pub fn domain_state(&self, which: DomainState) -> &Ket {
        match which {
            DomainState::Psi0 => &self.psi[0],
            DomainState::Psi1 => &self.psi[1],
            DomainState::Phi0 => &self.phi[0],
            DomainState::Phi1 => &self.phi[1],
        }
    }

    /// Which domain state `ket` is, if any.
    pub fn identify(&self, ket: &Ket) -> Result<Option<DomainState>> {
        for (which, k) in self.domain() {
            if k.fidelity(ket)? >= 1.0 - tolerance::VALID {
                return Ok(Some(which));
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DomainState {
    Psi0,
    Psi1,
    Phi0,
    Phi1,
}

impl DomainState {
    pub const ALL: [DomainState; 4] = [
        DomainState::Psi0,
        DomainState::Psi1,
        DomainState::Phi0,
        DomainState::Phi1,
    ];

    /// Output bits `(first, second)` assigned by the map.
    pub fn output_bits(self) -> (usize, usize) {
        match self {
            DomainState::Psi0 => (0, 0),
            DomainState::Psi1 => (0, 1),
            DomainState::Phi0 => (1, 0),
            DomainState::Phi1 => (1, 1),
        }
    }

    /// Index of the two-qubit computational outcome the map produces.
    pub fn output_index(self) -> usize {
        let (a, b) = self.output_bits();
        2 * a + b
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainState::Psi0 => "psi0",
            DomainState::Psi1 => "psi1",
            DomainState::Phi0 => "phi0",
            DomainState::Phi1 => "phi1",
        }
    }
}

fn output_state(which: DomainState) -> DensityOperator {
    Ket::basis(4, which.output_index()).expect("index < 4").projector()
}

/// The box map on a pure one-qubit input; the ancilla is implicit.
pub fn brun_apply_pure(config: &BrunBoxConfig, input: &Ket) -> Result<DensityOperator> {
    if input.dim() != 2 {
        return Err(Error::Shape(format!("Brun box takes a qubit, got dim {}", input.dim())));
    }
    if let Some(which) = config.identify(input)? {
        return Ok(output_state(which));
    }
    match &config.completion {
        Completion::Strict => Err(Error::Domain(
            "input is none of the four domain states and completion is strict".into(),
        )),
        Completion::Custom { entries, fallback } => {
            for (k, out) in entries {
                if k.fidelity(input)? >= 1.0 - tolerance::VALID {
                    return Ok(out.clone());
                }
            }
            fallback
                .clone()
                .ok_or_else(|| Error::Domain("input matches no domain state or custom entry".into()))
        }
    }
}

/// Action on a density operator: pure inputs follow the map, mixed inputs
/// pass through with the ancilla untouched.
pub fn brun_apply_state(config: &BrunBoxConfig, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != 2 {
        return Err(Error::Shape(format!("Brun box takes a qubit, got dim {}", rho.dim())));
    }
    if rho.is_pure() {
        brun_apply_pure(config, &rho.principal_ket())
    } else {
        passthrough(rho)
    }
}

/// `rho (x) |0><0|`.
pub(crate) fn passthrough(rho: &DensityOperator) -> Result<DensityOperator> {
    rho.tensor(&Ket::zero().projector())
}
