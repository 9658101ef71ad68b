use serde::{Deserialize, Serialize};

/// `i^phase · σ(x, z)` where `σ` places `X`, `Z` or `Y` (both bits set) on each
/// qubit. Qubit `j` is bit `j` of both masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { x: 0, z: 0, phase: 0 };

    pub fn new(x: u64, z: u64, phase: u8) -> Self {
        Pauli { x, z, phase: phase & 3 }
    }

    pub fn x_on(q: usize) -> Self {
        Pauli::new(1 << q, 0, 0)
    }

    pub fn z_on(q: usize) -> Self {
        Pauli::new(0, 1 << q, 0)
    }

    /// Hermitian Paulis carry a real sign.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn commutes_with(&self, other: &Pauli) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Pauli) -> Pauli {
        let (x1, z1, x2, z2) = (self.x, self.z, other.x, other.z);
        let y1 = x1 & z1;
        let xo = x1 & !z1;
        let zo = !x1 & z1;
        let plus = (y1 & z2 & !x2).count_ones() + (xo & z2 & x2).count_ones() + (zo & x2 & !z2).count_ones();
        let minus = (y1 & x2 & !z2).count_ones() + (xo & z2 & !x2).count_ones() + (zo & x2 & z2).count_ones();
        let phase = (self.phase as i64 + other.phase as i64 + plus as i64 - minus as i64).rem_euclid(4) as u8;
        Pauli { x: x1 ^ x2, z: z1 ^ z2, phase }
    }

    /// `P|b⟩ = i^phase · i^{|x∧z|} · (−1)^{z·b} |b ⊕ x⟩`; returns the target
    /// index and the power of `i` multiplying it.
    pub fn act_on_basis(&self, b: u64) -> (u64, u8) {
        let sign = 2 * ((self.z & b).count_ones() % 2);
        let k = self.phase as u32 + (self.x & self.z).count_ones() + sign;
        (b ^ self.x, (k % 4) as u8)
    }
}
