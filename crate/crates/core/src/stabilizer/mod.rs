//! Clifford tableaux over `n ≤ 63` qubits.
//!
//! Row `j < n` holds the destabilizer `C X_j C†` and row `n + j` the
//! stabilizer `C Z_j C†`, both as Hermitian [`Pauli`]s.

mod dense;
mod gamma;
mod pauli;
mod random;
mod support;

pub use dense::{clifford_unitary, stabilizer_state};
pub use gamma::{full_support_probability, full_support_probability_exact, gamma_state, GammaParams};
pub use pauli::Pauli;
pub use random::random_clifford;
pub use support::{measurement_support, sample_measurement, AffineSupport};

use crate::error::{out_of_range, Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_QUBITS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    rows: Vec<Pauli>,
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(out_of_range("qubit count", n, "1..=63"))
    }
}

impl Tableau {
    pub fn identity(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let rows = (0..n).map(Pauli::x_on).chain((0..n).map(Pauli::z_on)).collect();
        Ok(Tableau { n, rows })
    }

    pub fn hadamard_all(n: usize) -> Result<Self> {
        (0..n).try_fold(Self::identity(n)?, |t, q| t.then(Gate::H(q)))
    }

    /// Builds a tableau from `2n` Hermitian rows, checking the symplectic
    /// commutation relations.
    pub fn from_rows(n: usize, rows: Vec<Pauli>) -> Result<Self> {
        check_qubits(n)?;
        if rows.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, found: rows.len() });
        }
        let mask = low_mask(n);
        if rows.iter().any(|p| !p.is_hermitian() || p.x & !mask != 0 || p.z & !mask != 0) {
            return Err(Error::InvalidArgument("tableau rows must be Hermitian Paulis on n qubits".into()));
        }
        let t = Tableau { n, rows };
        if !t.is_symplectic() {
            return Err(Error::InvalidArgument("tableau rows violate the symplectic relations".into()));
        }
        Ok(t)
    }

    pub(crate) fn from_rows_unchecked(n: usize, rows: Vec<Pauli>) -> Self {
        debug_assert_eq!(rows.len(), 2 * n);
        Tableau { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Pauli] {
        &self.rows
    }

    pub fn destabilizers(&self) -> &[Pauli] {
        &self.rows[..self.n]
    }

    pub fn stabilizers(&self) -> &[Pauli] {
        &self.rows[self.n..]
    }

    /// Destabilizers pairwise commute, stabilizers pairwise commute, and
    /// destabilizer `i` anticommutes with stabilizer `j` exactly when `i = j`.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|a| {
            (a + 1..2 * n).all(|b| {
                let anticommute = !self.rows[a].commutes_with(&self.rows[b]);
                anticommute == (a < n && b == a + n)
            })
        })
    }

    /// `C P C†`.
    pub fn conjugate(&self, p: &Pauli) -> Pauli {
        let mut out = Pauli::new(0, 0, p.phase + (p.x & p.z).count_ones() as u8 % 4);
        for q in 0..self.n {
            if p.x >> q & 1 == 1 {
                out = out.mul(&self.rows[q]);
            }
        }
        for q in 0..self.n {
            if p.z >> q & 1 == 1 {
                out = out.mul(&self.rows[self.n + q]);
            }
        }
        out
    }

    /// Tableau of `G · C`.
    pub fn then(mut self, gate: Gate) -> Result<Self> {
        let n = self.n;
        let check = |q: usize| if q < n { Ok(()) } else { Err(out_of_range("qubit index", q, "< n")) };
        match gate {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Z(q) => check(q)?,
            Gate::Cx(a, b) | Gate::Cz(a, b) => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::InvalidArgument("two-qubit gate needs distinct qubits".into()));
                }
            }
        }
        for row in &mut self.rows {
            apply_gate(row, gate);
        }
        Ok(self)
    }

    /// Tableau of `self · other` (apply `other` first).
    pub fn compose(&self, other: &Tableau) -> Result<Tableau> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let rows = other.rows.iter().map(|p| self.conjugate(p)).collect();
        Ok(Tableau { n: self.n, rows })
    }
}

fn bit(v: u64, q: usize) -> u64 {
    v >> q & 1
}

fn apply_gate(p: &mut Pauli, gate: Gate) {
    let sign = |p: &mut Pauli, flip: u64| {
        if flip & 1 == 1 {
            p.phase ^= 2;
        }
    };
    match gate {
        Gate::H(q) => {
            let (x, z) = (bit(p.x, q), bit(p.z, q));
            sign(p, x & z);
            p.x = p.x & !(1 << q) | z << q;
            p.z = p.z & !(1 << q) | x << q;
        }
        Gate::S(q) => {
            let (x, z) = (bit(p.x, q), bit(p.z, q));
            sign(p, x & z);
            p.z ^= x << q;
        }
        Gate::X(q) => sign(p, bit(p.z, q)),
        Gate::Z(q) => sign(p, bit(p.x, q)),
        Gate::Cx(c, t) => {
            let (xc, zc, xt, zt) = (bit(p.x, c), bit(p.z, c), bit(p.x, t), bit(p.z, t));
            sign(p, xc & zt & (xt ^ zc ^ 1));
            p.x ^= xc << t;
            p.z ^= zt << c;
        }
        Gate::Cz(a, b) => {
            apply_gate(p, Gate::H(b));
            apply_gate(p, Gate::Cx(a, b));
            apply_gate(p, Gate::H(b));
        }
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableauJson {
    n: usize,
    x: Vec<String>,
    z: Vec<String>,
    signs: String,
}

fn parse_hex(s: &str) -> std::result::Result<u128, String> {
    u128::from_str_radix(s, 16).map_err(|e| format!("bad hex '{s}': {e}"))
}

impl Serialize for Tableau {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let signs = self
            .rows
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, p)| acc | (p.is_negative() as u128) << i);
        TableauJson {
            n: self.n,
            x: self.rows.iter().map(|p| format!("{:x}", p.x)).collect(),
            z: self.rows.iter().map(|p| format!("{:x}", p.z)).collect(),
            signs: format!("{signs:x}"),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tableau {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TableauJson::deserialize(d)?;
        if raw.x.len() != 2 * raw.n || raw.z.len() != 2 * raw.n {
            return Err(D::Error::custom("expected 2n rows in both x and z"));
        }
        let signs = parse_hex(&raw.signs).map_err(D::Error::custom)?;
        let mut rows = Vec::with_capacity(2 * raw.n);
        for (i, (x, z)) in raw.x.iter().zip(&raw.z).enumerate() {
            let x = parse_hex(x).map_err(D::Error::custom)?;
            let z = parse_hex(z).map_err(D::Error::custom)?;
            if x > u64::MAX as u128 || z > u64::MAX as u128 {
                return Err(D::Error::custom("row wider than 64 bits"));
            }
            rows.push(Pauli::new(x as u64, z as u64, 2 * (signs >> i & 1) as u8));
        }
        Tableau::from_rows(raw.n, rows).map_err(D::Error::custom)
    }
}
