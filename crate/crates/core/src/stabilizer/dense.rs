use super::{measurement_support, Pauli, Tableau};
use crate::error::{out_of_range, Result};
use crate::linalg::{CMatrix, CVector, UnitaryMatrix, C64};

/// Largest qubit count for dense expansion.
pub const DENSE_MAX_QUBITS: usize = 14;

const I_POWERS: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

fn apply_pauli(p: &Pauli, v: &CVector) -> CVector {
    let mut out = CVector::zeros(v.len());
    for (b, amp) in v.iter().enumerate() {
        if *amp != C64::new(0.0, 0.0) {
            let (target, k) = p.act_on_basis(b as u64);
            out[target as usize] += I_POWERS[k as usize] * amp;
        }
    }
    out
}

/// Dense amplitudes of `C|0ⁿ⟩` (global phase fixed so that the smallest
/// support element has a positive real amplitude).
pub fn stabilizer_state(t: &Tableau) -> Result<CVector> {
    let n = t.n();
    if n > DENSE_MAX_QUBITS {
        return Err(out_of_range("qubit count for dense expansion", n, "<= 14"));
    }
    let start = measurement_support(t).offset();
    let mut psi = CVector::zeros(1 << n);
    psi[start as usize] = C64::new(1.0, 0.0);
    for g in t.stabilizers() {
        psi = (&psi + apply_pauli(g, &psi)) * C64::new(0.5, 0.0);
    }
    let first = psi.iter().position(|a| a.norm() > 1e-12).expect("projector image is nonzero");
    let phase = psi[first] / psi[first].norm();
    let norm = psi.norm();
    Ok(psi.map(|a| a / (phase * norm)))
}

/// Dense unitary of the Clifford, up to global phase: column `x` is
/// `∏ D_j^{x_j} C|0ⁿ⟩` with `D_j` the destabilizers.
pub fn clifford_unitary(t: &Tableau) -> Result<UnitaryMatrix> {
    let n = t.n();
    let phi = stabilizer_state(t)?;
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut col = phi.clone();
        for (j, d) in t.destabilizers().iter().enumerate() {
            if x >> j & 1 == 1 {
                col = apply_pauli(d, &col);
            }
        }
        m.set_column(x, &col);
    }
    Ok(UnitaryMatrix::from_trusted(m))
}
