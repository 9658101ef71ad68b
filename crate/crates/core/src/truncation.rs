//! Phase rounding for diagonal oracles and exact checks of how far the
//! rounded oracles move a circuit in diamond distance.

use crate::budget::MemoryBudget;
use crate::error::{out_of_range, Error, Result};
use crate::linalg::{
    check_same_dim, diamond_distance_from_eigenvalues, diamond_distance_unitaries, UnitaryMatrix, C64,
};
use crate::seed::RandomSeed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// Largest input width stored as an explicit table.
pub const MAX_EXPLICIT_BITS: u32 = 20;
/// Largest input width accepted by the exact distance check.
pub const MAX_EXACT_BITS: u32 = 12;
/// Largest rounding precision; keeps `(k+1)`-bit codes inside a `u64`.
pub const MAX_ROUND_BITS: u32 = 52;
/// Largest circuit width that is materialized densely.
pub const MAX_CIRCUIT_QUBITS: u32 = 10;

fn in_phase_range(x: f64) -> bool {
    x > -1.0 && x <= 1.0
}

fn check_round_bits(k: u32) -> Result<()> {
    if k > MAX_ROUND_BITS {
        return Err(out_of_range("k", k, "<= 52"));
    }
    Ok(())
}

fn round_unchecked(x: f64, k: u32) -> f64 {
    if !in_phase_range(x) {
        return f64::NAN;
    }
    let scale = (k as f64).exp2();
    let r = (scale * x + 0.5).floor() / scale;
    // e^{-iπ} = e^{iπ}: keep the result inside (−1, 1].
    if r <= -1.0 {
        r + 2.0
    } else {
        r
    }
}

/// `2^{-k}·round(2^k·x)` with ties rounded up. A result of −1 is reported as
/// the equivalent phase 1.
pub fn round_k(x: f64, k: u32) -> Result<f64> {
    check_round_bits(k)?;
    if !in_phase_range(x) {
        return Err(out_of_range("phase", x, "(-1, 1]"));
    }
    Ok(round_unchecked(x, k))
}

/// Distance between two phases on the circle `ℝ / 2ℤ`.
pub fn circular_deviation(a: f64, b: f64) -> f64 {
    let diff = (a - b).rem_euclid(2.0);
    diff.min(2.0 - diff)
}

/// `(k+1)`-bit two's-complement code of a `k`-rounded phase.
pub fn fixed_point_code(rounded: f64, k: u32) -> Result<u64> {
    check_round_bits(k)?;
    let scaled = rounded * (k as f64).exp2();
    if !in_phase_range(rounded) || scaled.fract() != 0.0 {
        return Err(out_of_range("rounded phase", rounded, "a multiple of 2^-k in (-1, 1]"));
    }
    let modulus = 1u64 << (k + 1);
    Ok((scaled as i64).rem_euclid(modulus as i64) as u64)
}

/// Inverse of [`fixed_point_code`].
pub fn decode_fixed_point(code: u64, k: u32) -> Result<f64> {
    check_round_bits(k)?;
    let half = 1u64 << k;
    if code >= half << 1 {
        return Err(out_of_range("code", code, "< 2^(k+1)"));
    }
    let j = if code <= half { code as i64 } else { code as i64 - (half << 1) as i64 };
    Ok(j as f64 / (k as f64).exp2())
}

type PhaseFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum PhaseTable {
    Explicit(Vec<f64>),
    Function(PhaseFn),
}

/// Phases `f: {0,1}^m → (−1, 1]` of the diagonal unitary `Σ_x e^{iπ f(x)}|x⟩⟨x|`.
#[derive(Clone)]
pub struct DiagonalPhase {
    m: u32,
    table: PhaseTable,
}

impl fmt::Debug for DiagonalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.table {
            PhaseTable::Explicit(v) => f.debug_struct("DiagonalPhase").field("m", &self.m).field("phases", v).finish(),
            PhaseTable::Function(_) => f.debug_struct("DiagonalPhase").field("m", &self.m).finish_non_exhaustive(),
        }
    }
}

impl PartialEq for DiagonalPhase {
    fn eq(&self, other: &Self) -> bool {
        match (&self.table, &other.table) {
            (PhaseTable::Explicit(a), PhaseTable::Explicit(b)) => self.m == other.m && a == b,
            _ => false,
        }
    }
}

impl DiagonalPhase {
    pub fn explicit(m: u32, phases: Vec<f64>) -> Result<Self> {
        if m > MAX_EXPLICIT_BITS {
            return Err(out_of_range("m", m, "<= 20 for an explicit table"));
        }
        if phases.len() != 1usize << m {
            return Err(Error::DimensionMismatch { expected: 1 << m, found: phases.len() });
        }
        if let Some(&bad) = phases.iter().find(|&&x| !in_phase_range(x)) {
            return Err(out_of_range("phase", bad, "(-1, 1]"));
        }
        Ok(Self { m, table: PhaseTable::Explicit(phases) })
    }

    /// Lazily evaluated phases; values are range-checked when read.
    pub fn from_fn(m: u32, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if m > 63 {
            return Err(out_of_range("m", m, "<= 63"));
        }
        Ok(Self { m, table: PhaseTable::Function(Arc::new(f)) })
    }

    pub fn zero(m: u32) -> Result<Self> {
        if m > MAX_EXPLICIT_BITS {
            return Err(out_of_range("m", m, "<= 20 for an explicit table"));
        }
        Self::explicit(m, vec![0.0; 1 << m])
    }

    /// Independent phases uniform on `(−1, 1]`.
    pub fn random(m: u32, seed: RandomSeed) -> Result<Self> {
        if m > MAX_EXPLICIT_BITS {
            return Err(out_of_range("m", m, "<= 20 for an explicit table"));
        }
        let mut rng = seed.rng();
        let phases = (0..1u64 << m).map(|_| 1.0 - 2.0 * rng.random::<f64>()).collect();
        Self::explicit(m, phases)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn value(&self, x: u64) -> Result<f64> {
        if self.m < 64 && x >> self.m != 0 {
            return Err(out_of_range("input", x, "< 2^m"));
        }
        let v = match &self.table {
            PhaseTable::Explicit(p) => p[x as usize],
            PhaseTable::Function(f) => f(x),
        };
        if !in_phase_range(v) {
            return Err(out_of_range("phase", v, "(-1, 1]"));
        }
        Ok(v)
    }

    pub fn explicit_values(&self) -> Option<&[f64]> {
        match &self.table {
            PhaseTable::Explicit(p) => Some(p),
            PhaseTable::Function(_) => None,
        }
    }

    fn require_explicit(&self, max_bits: u32) -> Result<&[f64]> {
        if self.m > max_bits {
            return Err(out_of_range("m", self.m, "small enough for exact evaluation"));
        }
        self.explicit_values()
            .ok_or_else(|| Error::InvalidArgument("phases must be an explicit table".into()))
    }

    /// The diagonal unitary `D_f`.
    pub fn unitary(&self, budget: &MemoryBudget) -> Result<UnitaryMatrix> {
        let phases = self.require_explicit(MAX_CIRCUIT_QUBITS)?;
        budget.check("diagonal unitary", (phases.len() as u128).pow(2), 16)?;
        let entries: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, PI * p)).collect();
        UnitaryMatrix::diagonal(&entries)
    }
}

/// A rounded phase function together with its classical output width `k+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPhase {
    pub phase: DiagonalPhase,
    pub output_bits: u32,
}

impl TruncatedPhase {
    /// The classical function `{0,1}^m → {0,1}^{k+1}` realizing the phases.
    pub fn code(&self, x: u64) -> Result<u64> {
        fixed_point_code(self.phase.value(x)?, self.output_bits - 1)
    }
}

/// Pointwise [`round_k`].
pub fn truncate_diagonal(f: &DiagonalPhase, k: u32) -> Result<TruncatedPhase> {
    check_round_bits(k)?;
    let phase = match &f.table {
        PhaseTable::Explicit(p) => {
            let rounded = p.iter().map(|&x| round_unchecked(x, k)).collect();
            DiagonalPhase { m: f.m, table: PhaseTable::Explicit(rounded) }
        }
        PhaseTable::Function(g) => {
            let g = Arc::clone(g);
            DiagonalPhase { m: f.m, table: PhaseTable::Function(Arc::new(move |x| round_unchecked(g(x), k))) }
        }
    };
    Ok(TruncatedPhase { phase, output_bits: k + 1 })
}

/// An exact distance together with the bound it is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub distance: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(distance: f64, bound: f64) -> Self {
        Self { distance, bound, holds: distance <= bound }
    }
}

/// Exact `‖D_f − D_{⌊f⌉_k}‖⋄` against `2^{−k}π`. Both unitaries are diagonal,
/// so the spectrum of `D_f†D_g` is read off directly.
pub fn diag_truncation_distance(f: &DiagonalPhase, k: u32) -> Result<BoundCheck> {
    let phases = f.require_explicit(MAX_EXACT_BITS)?;
    let rounded = truncate_diagonal(f, k)?;
    let rounded = rounded.phase.explicit_values().expect("explicit input stays explicit");
    let eigs: Vec<C64> = phases
        .iter()
        .zip(rounded)
        .map(|(&a, &b)| C64::from_polar(1.0, PI * (b - a)))
        .collect();
    let distance = if eigs.len() == 1 { 0.0 } else { diamond_distance_from_eigenvalues(&eigs) };
    Ok(BoundCheck::new(distance, (-(k as f64)).exp2() * PI))
}

/// One step of a [`DiagonalOracleCircuit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CircuitOp {
    Layer { matrix: UnitaryMatrix },
    /// Oracle `index` on qubits `offset .. offset + m` (qubit `j` is bit `j`).
    Oracle { index: usize, offset: u32 },
}

/// Fixed layers interleaved with calls to diagonal oracles, applied in order.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOracleCircuit {
    qubits: u32,
    oracles: Vec<DiagonalPhase>,
    ops: Vec<CircuitOp>,
}

impl DiagonalOracleCircuit {
    pub fn new(qubits: u32, oracles: Vec<DiagonalPhase>, ops: Vec<CircuitOp>) -> Result<Self> {
        if qubits > MAX_CIRCUIT_QUBITS {
            return Err(out_of_range("qubits", qubits, "<= 10"));
        }
        let dim = 1usize << qubits;
        let mut calls = 0;
        for op in &ops {
            match op {
                CircuitOp::Layer { matrix } => check_same_dim(dim, matrix.dim())?,
                CircuitOp::Oracle { index, offset } => {
                    let oracle = oracles
                        .get(*index)
                        .ok_or_else(|| out_of_range("oracle index", *index, "< number of oracles"))?;
                    if offset + oracle.m() > qubits {
                        return Err(out_of_range("oracle offset", offset, "offset + m <= qubits"));
                    }
                    calls += 1;
                }
            }
        }
        if oracles.len() > calls {
            return Err(Error::InvalidArgument(format!(
                "{} oracles but only {calls} oracle calls",
                oracles.len()
            )));
        }
        Ok(Self { qubits, oracles, ops })
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn oracles(&self) -> &[DiagonalPhase] {
        &self.oracles
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    /// Number of oracle calls `s`.
    pub fn calls(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, CircuitOp::Oracle { .. })).count()
    }

    /// Appends `other` after `self`; oracle indices of `other` are shifted.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.qubits, found: 1 << other.qubits });
        }
        let shift = self.oracles.len();
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().map(|op| match op {
            CircuitOp::Oracle { index, offset } => CircuitOp::Oracle { index: index + shift, offset: *offset },
            layer => layer.clone(),
        }));
        let mut oracles = self.oracles.clone();
        oracles.extend(other.oracles.iter().cloned());
        Self::new(self.qubits, oracles, ops)
    }

    /// Same circuit with every oracle replaced by its `k`-truncation.
    pub fn truncated(&self, k: u32) -> Result<Self> {
        let oracles = self
            .oracles
            .iter()
            .map(|f| truncate_diagonal(f, k).map(|t| t.phase))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { qubits: self.qubits, oracles, ops: self.ops.clone() })
    }

    /// Dense product of all steps, the first op acting first.
    pub fn materialize(&self, budget: &MemoryBudget) -> Result<UnitaryMatrix> {
        let dim = 1usize << self.qubits;
        budget.check("circuit unitary", 2 * (dim as u128).pow(2), 16)?;
        let mut u = UnitaryMatrix::identity(dim).into_matrix();
        for op in &self.ops {
            match op {
                CircuitOp::Layer { matrix } => u = matrix.matrix() * u,
                CircuitOp::Oracle { index, offset } => {
                    let oracle = &self.oracles[*index];
                    let mask = (1u64 << oracle.m()) - 1;
                    for row in 0..dim {
                        let local = (row as u64 >> offset) & mask;
                        let phase = C64::from_polar(1.0, PI * oracle.value(local)?);
                        u.row_mut(row).iter_mut().for_each(|z| *z *= phase);
                    }
                }
            }
        }
        Ok(UnitaryMatrix::from_trusted(u))
    }

    /// Reads `{"qubits": n, "oracles": [{"m":.., "phases": [..]}], "ops": [..]}`.
    pub fn load(path: &Path) -> Result<Self> {
        let manifest: CircuitManifest = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        let oracles = manifest
            .oracles
            .into_iter()
            .map(|o| DiagonalPhase::explicit(o.m, o.phases))
            .collect::<Result<Vec<_>>>()?;
        Self::new(manifest.qubits, oracles, manifest.ops)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let oracles = self
            .oracles
            .iter()
            .map(|o| {
                o.explicit_values()
                    .map(|p| OracleManifest { m: o.m(), phases: p.to_vec() })
                    .ok_or_else(|| Error::InvalidArgument("only explicit phases can be saved".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let manifest = CircuitManifest { qubits: self.qubits, oracles, ops: self.ops.clone() };
        serde_json::to_writer_pretty(std::io::BufWriter::new(std::fs::File::create(path)?), &manifest)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleManifest {
    m: u32,
    phases: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitManifest {
    qubits: u32,
    oracles: Vec<OracleManifest>,
    ops: Vec<CircuitOp>,
}

/// Exact distance between a circuit and its truncated version, checked
/// against `s·2^{−k}π`.
pub fn circuit_truncation_bound(c: &DiagonalOracleCircuit, k: u32, budget: &MemoryBudget) -> Result<BoundCheck> {
    let original = c.materialize(budget)?;
    let truncated = c.truncated(k)?.materialize(budget)?;
    let distance = diamond_distance_unitaries(&original, &truncated)?;
    Ok(BoundCheck::new(distance, c.calls() as f64 * (-(k as f64)).exp2() * PI))
}

/// `m + ⌈log₂ s⌉ + max(0, ⌈log₂ log₂(s/ε + c)⌉)`.
pub fn equivalent_binary_input_length(m: u32, calls: u64, epsilon: f64, const_c: f64) -> Result<u32> {
    if calls == 0 {
        return Err(out_of_range("s", calls, ">= 1"));
    }
    if !(epsilon > 0.0) {
        return Err(out_of_range("epsilon", epsilon, "> 0"));
    }
    if !(const_c >= 0.0) {
        return Err(out_of_range("const_c", const_c, ">= 0"));
    }
    let log_s = ceil_log2(calls);
    let inner = (calls as f64 / epsilon + const_c).log2();
    let loglog = if inner > 1.0 { inner.log2().ceil() as u32 } else { 0 };
    Ok(m + log_s + loglog)
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Packing of several output-width-`ℓ_i` functions into one function with
/// `⌈log₂ Σℓ_i⌉` extra input bits selecting the output bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchLayout {
    pub total_outputs: u64,
    pub switch_bits: u32,
    /// First packed output index of each function.
    pub offsets: Vec<u64>,
}

impl SwitchLayout {
    /// Input width of the packed function for base input width `m`.
    pub fn input_bits(&self, m: u32) -> u32 {
        m + self.switch_bits
    }

    /// `(function, output bit)` selected by switch value `j`.
    pub fn locate(&self, j: u64) -> Option<(usize, u64)> {
        if j >= self.total_outputs {
            return None;
        }
        let f = self.offsets.partition_point(|&o| o <= j) - 1;
        Some((f, j - self.offsets[f]))
    }
}

pub fn switch_bit_layout(widths: &[u64]) -> Result<SwitchLayout> {
    if widths.is_empty() || widths.contains(&0) {
        return Err(Error::InvalidArgument("need at least one function of positive width".into()));
    }
    let mut offsets = Vec::with_capacity(widths.len());
    let mut total = 0u64;
    for &w in widths {
        offsets.push(total);
        total += w;
    }
    Ok(SwitchLayout { total_outputs: total, switch_bits: ceil_log2(total), offsets })
}
