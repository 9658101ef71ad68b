//! Support-size and input-length calculators. Everything is evaluated in
//! log-space so that `t = 2^κ` style arguments never overflow.

use crate::error::{out_of_range, Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};
use std::f64::consts::{E, LN_2};

/// Binomials with at most this many factors are summed term by term.
const EXACT_BINOM_TERMS: u64 = 4096;

/// Below this `1 − δ` the large-`t` input-length bound (`m_design_2`) is not reported.
pub const MIN_DESIGN_GAP: f64 = 0.5;

/// A nonnegative real stored as its natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: Self = Self(f64::NEG_INFINITY);

    pub fn from_ln(ln: f64) -> Self {
        Self(ln)
    }

    pub fn new(x: f64) -> Self {
        Self(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log2(self) -> f64 {
        self.0 / LN_2
    }

    /// The value itself; `inf` once it exceeds `f64::MAX`.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

/// Caller-tunable constants. The defaults of 1 are placeholders, not known values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundParams {
    pub c_diamond: f64,
    pub c_design: f64,
    pub additive_slack: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self { c_diamond: 1.0, c_design: 1.0, additive_slack: 1.0 }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_diamond > 0.0) {
            return Err(out_of_range("c_diamond", self.c_diamond, "> 0"));
        }
        if !(self.c_design > 0.0) {
            return Err(out_of_range("c_design", self.c_design, "> 0"));
        }
        if !self.additive_slack.is_finite() {
            return Err(out_of_range("additive_slack", self.additive_slack, "finite"));
        }
        Ok(())
    }
}

/// `ln C(n, k)`.
pub fn ln_binom(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k <= EXACT_BINOM_TERMS {
        (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
    } else {
        ln_binomial(n, k)
    }
}

fn check_dim(d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(())
}

fn check_delta(delta: f64, allow_one: bool) -> Result<()> {
    let ok = if allow_one { (0.0..=1.0).contains(&delta) } else { (0.0..1.0).contains(&delta) };
    if !ok {
        return Err(out_of_range("delta", delta, if allow_one { "[0, 1]" } else { "[0, 1)" }));
    }
    Ok(())
}

/// The two branches of the earlier support-size bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSupportBound {
    /// `(1−δ)·C(d+t−1, t)²`
    pub symmetric_branch: LogReal,
    /// `d^{2t} / ((1+δ)·t!)`
    pub tensor_branch: LogReal,
}

impl PriorSupportBound {
    pub fn bound(&self) -> LogReal {
        self.symmetric_branch.max(self.tensor_branch)
    }
}

pub fn prior_support_branches(d: u64, t: u64, delta: f64) -> Result<PriorSupportBound> {
    check_dim(d)?;
    check_delta(delta, true)?;
    let symmetric = (1.0 - delta).ln() + 2.0 * ln_binom(d + t - 1, t);
    let tensor = 2.0 * t as f64 * (d as f64).ln() - (1.0 + delta).ln() - ln_factorial(t);
    Ok(PriorSupportBound { symmetric_branch: LogReal(symmetric), tensor_branch: LogReal(tensor) })
}

/// `max{(1−δ)C(d+t−1,t)², d^{2t}/((1+δ)t!)}`.
pub fn prior_support_bound(d: u64, t: u64, delta: f64) -> Result<LogReal> {
    Ok(prior_support_branches(d, t, delta)?.bound())
}

/// `((2−2δ)/(3+δ))·(C t / (d² ln(4/(1−δ))))^{(d²−1)/2}`.
pub fn improved_support_bound(d: u64, t: f64, delta: f64, c_design: f64) -> Result<LogReal> {
    check_dim(d)?;
    check_delta(delta, false)?;
    if !(t > 0.0) {
        return Err(out_of_range("t", t, "> 0"));
    }
    if !(c_design > 0.0) {
        return Err(out_of_range("c_design", c_design, "> 0"));
    }
    let d2 = (d * d) as f64;
    let prefactor = ((2.0 - 2.0 * delta) / (3.0 + delta)).ln();
    let base = (c_design * t).ln() - d2.ln() - (4.0 / (1.0 - delta)).ln().ln();
    Ok(LogReal(prefactor + (d2 - 1.0) / 2.0 * base))
}

/// Lower bounds on the oracle input length `m`; `None` marks a formula
/// outside its regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputLengthBounds {
    /// `log t + loglog(d²/t) − slack`, needs `t < d²`.
    pub m_design_1: Option<f64>,
    /// `2 log d + loglog(t/d²) − slack`, needs `t > d²` and `1 − δ ≥ 1/2`.
    pub m_design_2: Option<f64>,
    /// `2 log d + loglog(1/ε) − slack`, needs `ε < 1`.
    pub m_net: Option<f64>,
}

fn loglog2(x: f64) -> Option<f64> {
    (x > 1.0).then(|| x.log2().log2())
}

pub fn rom_input_length_bounds(
    d: u64,
    t: f64,
    delta: f64,
    epsilon: f64,
    additive_slack: f64,
) -> Result<InputLengthBounds> {
    check_dim(d)?;
    check_delta(delta, true)?;
    if !(t > 0.0) {
        return Err(out_of_range("t", t, "> 0"));
    }
    if !(epsilon > 0.0) {
        return Err(out_of_range("epsilon", epsilon, "> 0"));
    }
    let d2 = (d * d) as f64;
    let log_d = (d as f64).log2();
    let m_design_1 = loglog2(d2 / t).map(|ll| t.log2() + ll - additive_slack);
    let m_design_2 = if 1.0 - delta >= MIN_DESIGN_GAP {
        loglog2(t / d2).map(|ll| 2.0 * log_d + ll - additive_slack)
    } else {
        None
    };
    let m_net = loglog2(1.0 / epsilon).map(|ll| 2.0 * log_d + ll - additive_slack);
    Ok(InputLengthBounds { m_design_1, m_design_2, m_net })
}

/// Cost of indexing an exact `2^κ`-design by reading the oracle bit by bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrivialRomPru {
    /// `log₂ C(d²+t−1, d²−1)²`
    pub support_size_log2: f64,
    /// Queries, one per index bit.
    pub q: f64,
    /// Oracle input length `log₂ q`.
    pub m: f64,
    /// `2(d²−1)·log₂(e(d²+t−1)/(d²−1))`
    pub q_upper: f64,
}

pub fn trivial_rompru_params(d: u64, kappa: u32) -> Result<TrivialRomPru> {
    if d < 2 {
        return Err(out_of_range("d", d, ">= 2"));
    }
    if kappa > 63 {
        return Err(out_of_range("kappa", kappa, "<= 63"));
    }
    let t = 1u64 << kappa;
    let d2 = d * d;
    let support_size_log2 = 2.0 * ln_binom(d2 + t - 1, d2 - 1) / LN_2;
    let q_upper = 2.0 * (d2 - 1) as f64 * (E * (d2 + t - 1) as f64 / (d2 - 1) as f64).log2();
    Ok(TrivialRomPru { support_size_log2, q: support_size_log2, m: support_size_log2.log2(), q_upper })
}

/// Parameters of a ROM-PRU instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RomPruParams {
    pub d: u64,
    pub kappa: u32,
    /// Construction query complexity.
    pub q: f64,
    /// Oracle input length.
    pub m: f64,
    pub alpha_impl: f64,
    /// Adversary query budget.
    pub t: f64,
    pub delta: f64,
}

impl RomPruParams {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(out_of_range("d", self.d, ">= 2"));
        }
        for (what, x) in [("q", self.q), ("m", self.m), ("alpha_impl", self.alpha_impl), ("t", self.t), ("delta", self.delta)] {
            if !(x >= 0.0) {
                return Err(out_of_range(what, x, ">= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalabilityReport {
    /// `q·m ≤ (log₂ d · κ)^{poly_budget}`
    pub efficient: bool,
    /// `α ≤ 2^{−κ}`
    pub accurate: bool,
    /// `t ≥ 2^κ` and `δ ≤ 2^{−κ}`
    pub secure: bool,
    pub scalable: bool,
    /// The `(t, δ)` diamond-design parameters implied by the security guarantee.
    pub implied_design: (f64, f64),
}

pub fn scalable_check(p: &RomPruParams, poly_budget: f64) -> Result<ScalabilityReport> {
    p.validate()?;
    let kappa = p.kappa as f64;
    let cap = ((p.d as f64).log2() * kappa).powf(poly_budget);
    let threshold = (-kappa).exp2();
    let efficient = p.q * p.m <= cap;
    let accurate = p.alpha_impl <= threshold;
    let secure = p.t >= kappa.exp2() && p.delta <= threshold;
    Ok(ScalabilityReport {
        efficient,
        accurate,
        secure,
        scalable: efficient && accurate && secure,
        implied_design: (p.t, p.delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn prior_bound_examples() {
        assert!(close(prior_support_bound(2, 1, 0.0).unwrap().value(), 4.0, 1e-12));
        let b = prior_support_branches(4, 3, 0.0).unwrap();
        assert!(close(b.symmetric_branch.value(), 400.0, 1e-12));
        assert!(close(b.tensor_branch.value(), 4096.0 / 6.0, 1e-12));
        assert!(close(b.bound().value(), 682.666_666_666_666_6, 1e-12));
        let one = prior_support_branches(3, 2, 1.0).unwrap();
        assert_eq!(one.symmetric_branch, LogReal::ZERO);
        assert!(close(one.tensor_branch.value(), 81.0 / 4.0, 1e-12));
        assert!(prior_support_bound(2, 1, 1.5).is_err());
    }

    #[test]
    fn huge_arguments_stay_finite_in_log_space() {
        let b = prior_support_bound(1 << 20, 1 << 30, 0.0).unwrap();
        assert!(b.ln().is_finite() && b.value().is_infinite());
        assert!(improved_support_bound(1 << 10, 1e30, 0.5, 1.0).unwrap().ln().is_finite());
    }

    #[test]
    fn improved_bound_examples() {
        let t = 4.0 * 4f64.ln() * E;
        let b = improved_support_bound(2, t, 0.0, 1.0).unwrap();
        assert!(close(b.value(), 2.0 / 3.0 * 1.5f64.exp(), 1e-12));
        let near_one = improved_support_bound(2, 100.0, 1.0 - 1e-12, 1.0).unwrap();
        assert!(near_one.value() < 1e-10);
        assert!(improved_support_bound(2, 10.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn log_space_matches_big_integers() {
        for d in 1u64..=4 {
            for t in 0u64..=20 {
                let binom = BigUint::from(binom_exact(d + t - 1, t));
                let sym = (&binom * &binom).to_string().parse::<f64>().unwrap();
                let tensor_num = BigUint::from(d).pow(2 * t as u32).to_string().parse::<f64>().unwrap();
                let fact = (1..=t).fold(BigUint::from(1u32), |acc, i| acc * i).to_string().parse::<f64>().unwrap();
                let b = prior_support_branches(d, t, 0.0).unwrap();
                assert!(close(b.symmetric_branch.value(), sym, 1e-9), "d={d} t={t}");
                assert!(close(b.tensor_branch.value(), tensor_num / fact, 1e-9), "d={d} t={t}");
            }
        }
    }

    fn binom_exact(n: u64, k: u64) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn ln_binom_switches_branches_smoothly() {
        let exact = ln_binom(10_000, EXACT_BINOM_TERMS);
        let gamma = ln_binomial(10_000, EXACT_BINOM_TERMS);
        assert!(close(exact, gamma, 1e-10));
        assert_eq!(ln_binom(3, 5), f64::NEG_INFINITY);
        assert_eq!(ln_binom(7, 0), 0.0);
    }

    #[test]
    fn input_length_examples() {
        let d = 64u64;
        let at_d = rom_input_length_bounds(d, d as f64, 0.0, 0.5, 1.0).unwrap();
        assert!(close(at_d.m_design_1.unwrap(), 6.0 + 6f64.log2() - 1.0, 1e-12));
        let boundary = rom_input_length_bounds(d, (d * d) as f64, 0.0, 0.5, 1.0).unwrap();
        assert!(boundary.m_design_1.is_none() && boundary.m_design_2.is_none());
        let big = rom_input_length_bounds(1 << 10, 1.0, 0.0, (-16f64).exp2(), 0.0).unwrap();
        assert!(close(big.m_net.unwrap(), 24.0, 1e-12));
        let above = rom_input_length_bounds(4, 1e6, 0.9, 0.5, 0.0).unwrap();
        assert!(above.m_design_2.is_none());
        assert!(rom_input_length_bounds(4, 1e6, 0.1, 0.5, 0.0).unwrap().m_design_2.is_some());
        assert!(rom_input_length_bounds(4, 2.0, 0.0, 1.0, 0.0).unwrap().m_net.is_none());
    }

    #[test]
    fn trivial_construction_examples() {
        let p = trivial_rompru_params(2, 0).unwrap();
        assert!(close(p.support_size_log2, 4.0, 1e-12));
        assert!(close(p.q, 4.0, 1e-12));
        assert!(close(p.m, 2.0, 1e-12));
        // t = 2: C(5, 3)² = 100.
        assert!(close(trivial_rompru_params(2, 1).unwrap().support_size_log2, 100f64.log2(), 1e-12));
        let p = trivial_rompru_params(4, 10).unwrap();
        assert!(close(p.q_upper, 30.0 * (E * 1039.0 / 15.0).log2(), 1e-12));
        assert!(p.q <= p.q_upper);
        let mut last = 0.0;
        for kappa in 0..40 {
            let s = trivial_rompru_params(8, kappa).unwrap().support_size_log2;
            assert!(s > last);
            last = s;
        }
    }

    #[test]
    fn scalability_examples() {
        let triv = trivial_rompru_params(1 << 10, 10).unwrap();
        let params = RomPruParams { d: 1 << 10, kappa: 10, q: triv.q, m: triv.m, alpha_impl: 0.0, t: 1024.0, delta: 0.0 };
        let r = scalable_check(&params, 2.0).unwrap();
        assert!(!r.efficient && r.secure && r.accurate && !r.scalable);

        let d = 1u64 << 20;
        let t = (d as f64).sqrt();
        for kappa in [8u32, 10, 12] {
            let p = RomPruParams { d, kappa, q: 1.0, m: 1.0, alpha_impl: 0.0, t, delta: 0.0 };
            assert_eq!(scalable_check(&p, 2.0).unwrap().scalable, (kappa as f64).exp2() <= t);
        }
        let tiny = RomPruParams { d: 4, kappa: 3, q: 1.0, m: 1.0, alpha_impl: 0.0, t: 8.0, delta: 0.0 };
        let r = scalable_check(&tiny, 1.0).unwrap();
        assert!(r.scalable);
        assert_eq!(r.implied_design, (8.0, 0.0));
    }

    proptest! {
        #[test]
        fn improved_bound_increases_in_t(d in 2u64..6, t1 in 1.0f64..1e6, t2 in 1.0f64..1e6, delta in 0.0f64..0.9) {
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(improved_support_bound(d, lo, delta, 1.0).unwrap() <= improved_support_bound(d, hi, delta, 1.0).unwrap());
        }

        #[test]
        fn ln_binom_symmetric(n in 0u64..5000, k in 0u64..5000) {
            prop_assume!(k <= n);
            prop_assert!((ln_binom(n, k) - ln_binom(n, n - k)).abs() < 1e-9);
        }
    }
}
