use super::FiniteEnsemble;
use crate::error::{out_of_range, Result};
use crate::linalg::{kron, CMatrix, UnitaryMatrix, C64};
use crate::stabilizer::{clifford_unitary, Gate, Tableau};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReferenceDesign {
    /// Uniform over `{I, X, Y, Z}^{⊗n}`: an exact 1-design.
    Pauli { qubits: usize },
    /// Uniform over the 24 single-qubit Cliffords: an exact 3-design.
    SingleQubitClifford,
}

pub fn reference_design(kind: ReferenceDesign) -> Result<FiniteEnsemble> {
    match kind {
        ReferenceDesign::Pauli { qubits } => pauli_group(qubits),
        ReferenceDesign::SingleQubitClifford => clifford_group(1),
    }
}

pub fn pauli_group(n: usize) -> Result<FiniteEnsemble> {
    if !(1..=4).contains(&n) {
        return Err(out_of_range("Pauli design qubit count", n, "1..=4"));
    }
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    let singles = [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ];
    let mut elements = vec![CMatrix::identity(1, 1)];
    for _ in 0..n {
        elements = elements.iter().flat_map(|e| singles.iter().map(move |s| kron(e, s))).collect();
    }
    FiniteEnsemble::uniform(elements.into_iter().map(UnitaryMatrix::from_trusted).collect())
}

/// The `n`-qubit Clifford group modulo phase, by closure of the tableau under
/// `H`, `S` and nearest-neighbour `CX`.
pub fn clifford_group(n: usize) -> Result<FiniteEnsemble> {
    if !(1..=2).contains(&n) {
        return Err(out_of_range("Clifford group qubit count", n, "1..=2"));
    }
    let mut gens: Vec<Gate> = (0..n).flat_map(|q| [Gate::H(q), Gate::S(q)]).collect();
    gens.extend((1..n).map(|q| Gate::Cx(q - 1, q)));
    let start = Tableau::identity(n)?;
    let mut seen = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for &g in &gens {
            let next = t.clone().then(g)?;
            if seen.insert(next.clone()) {
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    let unitaries = order.iter().map(clifford_unitary).collect::<Result<Vec<_>>>()?;
    FiniteEnsemble::uniform(unitaries)
}
