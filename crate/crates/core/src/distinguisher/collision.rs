use super::oracle::MeasurementOracle;
use crate::error::{out_of_range, Error, Result};
use crate::seed::RandomSeed;
use serde::{Deserialize, Serialize};

/// `Σ_{i<j} 1{x_i = x_j}`.
pub fn collision_count(outcomes: &[u64]) -> Result<u64> {
    if outcomes.len() < 2 {
        return Err(out_of_range("outcome count", outcomes.len(), ">= 2"));
    }
    let mut sorted = outcomes.to_vec();
    sorted.sort_unstable();
    Ok(sorted
        .chunk_by(|a, b| a == b)
        .map(|run| {
            let c = run.len() as u64;
            c * (c - 1) / 2
        })
        .sum())
}

pub fn binomial2(t: u64) -> f64 {
    (t * t.saturating_sub(1)) as f64 / 2.0
}

/// How per-block collision counts are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockEstimator {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherParams {
    pub t: u64,
    pub k_blocks: u64,
    pub alpha: f64,
    pub d: u64,
    #[serde(default)]
    pub estimator: BlockEstimator,
}

impl DistinguisherParams {
    pub const DEFAULT_ALPHA: f64 = 0.25;
    pub const ASYMPTOTIC_BLOCKS: u64 = 100_000;
    pub const TEST_BLOCKS: u64 = 1_000;

    pub fn new(d: u64, t: u64, k_blocks: u64, alpha: f64) -> Result<Self> {
        let p = DistinguisherParams { t, k_blocks, alpha, d, estimator: BlockEstimator::Mean };
        p.validate()?;
        Ok(p)
    }

    /// `t = ⌈√d⌉`, `α = 1/4`, with the given number of blocks.
    pub fn standard(d: u64, k_blocks: u64) -> Result<Self> {
        let mut t = (d as f64).sqrt().ceil() as u64;
        while t * t < d {
            t += 1;
        }
        while t > 1 && (t - 1) * (t - 1) >= d {
            t -= 1;
        }
        Self::new(d, t.max(2), k_blocks, Self::DEFAULT_ALPHA)
    }

    pub fn with_estimator(mut self, estimator: BlockEstimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 2 {
            return Err(out_of_range("copies per block t", self.t, ">= 2"));
        }
        if self.k_blocks < 1 {
            return Err(out_of_range("block count", self.k_blocks, ">= 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(out_of_range("threshold alpha", self.alpha, "> 0"));
        }
        if self.d < 1 {
            return Err(Error::ZeroDimension);
        }
        Ok(())
    }

    /// Expected collisions per block for a Haar state: `C(t,2)·2/(d+1)`.
    pub fn center(&self) -> f64 {
        binomial2(self.t) * 2.0 / (self.d as f64 + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Haar,
    #[serde(rename = "PFC")]
    Pfc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub params: DistinguisherParams,
    pub blocks: Vec<u64>,
    #[serde(rename = "M")]
    pub m: f64,
    pub center: f64,
    pub verdict: Verdict,
    pub seed: RandomSeed,
    /// Haar-state reference `μ = C(t,2)·2/(d+1)`.
    pub mu_ref: f64,
    /// Haar-state reference `τ = t²p + 2t³q` with `p = 2/(d+1)`,
    /// `q = 6/((d+1)(d+2))`.
    pub tau_ref: f64,
}

/// Collision test: `k_blocks` blocks of `t` measurements each, all from the
/// same hidden state; "Haar" iff the block statistic lies within `α` of
/// `C(t,2)·2/(d+1)`.
pub fn run_collision_distinguisher(
    oracle: &mut dyn MeasurementOracle,
    params: &DistinguisherParams,
    seed: RandomSeed,
) -> Result<CollisionReport> {
    params.validate()?;
    let mut block = vec![0u64; params.t as usize];
    let mut blocks = Vec::with_capacity(params.k_blocks as usize);
    for _ in 0..params.k_blocks {
        for slot in block.iter_mut() {
            *slot = oracle.measure()?;
        }
        blocks.push(collision_count(&block)?);
    }
    let m = match params.estimator {
        BlockEstimator::Mean => blocks.iter().sum::<u64>() as f64 / blocks.len() as f64,
        BlockEstimator::Median => median(&blocks),
    };
    let center = params.center();
    let verdict = if (m - center).abs() <= params.alpha { Verdict::Haar } else { Verdict::Pfc };
    let d = params.d as f64;
    let haar = concentration_reference(params.t, 2.0 / (d + 1.0), 6.0 / ((d + 1.0) * (d + 2.0)), params.alpha, params.k_blocks)?;
    Ok(CollisionReport { params: *params, blocks, m, center, verdict, seed, mu_ref: haar.mu, tau_ref: haar.tau })
}

fn median(xs: &[u64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReference {
    pub mu: f64,
    pub tau: f64,
    /// Chebyshev bound `τ/(k·β²)` on `Pr[|M − μ| ≥ β]` for the block mean.
    pub failure_bound: f64,
}

/// `μ = C(t,2)·p`, `τ = t²p + 2t³q`, where `p = Σ p_x²` and `q = Σ p_x³` are
/// the two- and three-way collision probabilities of the outcome
/// distribution.
pub fn concentration_reference(t: u64, p: f64, q: f64, beta: f64, k_blocks: u64) -> Result<ConcentrationReference> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || q > p {
        return Err(Error::InvalidArgument(format!("need 0 <= q <= p <= 1, got p={p}, q={q}")));
    }
    if !(beta > 0.0) {
        return Err(out_of_range("beta", beta, "> 0"));
    }
    if k_blocks == 0 {
        return Err(out_of_range("block count", k_blocks, ">= 1"));
    }
    let tf = t as f64;
    let tau = tf * tf * p + 2.0 * tf.powi(3) * q;
    Ok(ConcentrationReference {
        mu: binomial2(t) * p,
        tau,
        failure_bound: tau / (k_blocks as f64 * beta * beta),
    })
}

/// Exact mean and variance of the per-block collision count for i.i.d. draws
/// with collision probabilities `p = Σ p_x²`, `q = Σ p_x³`.
pub fn collision_count_moments(t: u64, p: f64, q: f64) -> (f64, f64) {
    let pairs = binomial2(t);
    let triples = (t * t.saturating_sub(1) * t.saturating_sub(2)) as f64 / 6.0;
    let disjoint = pairs * binomial2(t.saturating_sub(2));
    let var = pairs * p + 6.0 * triples * q + disjoint * p * p - pairs * pairs * p * p;
    (pairs * p, var)
}

#[cfg(test)]
mod tests {
    use super::super::oracle::{ListOracle, UrnOracle};
    use super::*;
    use proptest::prelude::*;

    struct Constant;
    impl MeasurementOracle for Constant {
        fn dim(&self) -> u64 {
            1 << 20
        }
        fn measure(&mut self) -> Result<u64> {
            Ok(42)
        }
    }

    struct Uniform(crate::seed::SeededRng, u64);
    impl MeasurementOracle for Uniform {
        fn dim(&self) -> u64 {
            self.1
        }
        fn measure(&mut self) -> Result<u64> {
            Ok(rand::Rng::random_range(&mut self.0, 0..self.1))
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(collision_count(&[5, 5, 9]).unwrap(), 1);
        assert_eq!(collision_count(&[3; 7]).unwrap(), 21);
        assert!(collision_count(&[1]).is_err());
    }

    proptest! {
        #[test]
        fn matches_pairwise_enumeration(xs in proptest::collection::vec(0u64..4, 2..12)) {
            let brute = (0..xs.len()).flat_map(|i| (i + 1..xs.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| xs[i] == xs[j]).count() as u64;
            prop_assert_eq!(collision_count(&xs).unwrap(), brute);
        }

        #[test]
        fn relabeling_preserves_counts(xs in proptest::collection::vec(0u64..8, 2..20), shift in 1u64..1000) {
            let mapped: Vec<u64> = xs.iter().map(|x| x.wrapping_mul(2 * shift + 1) ^ shift).collect();
            prop_assert_eq!(collision_count(&xs).unwrap(), collision_count(&mapped).unwrap());
        }
    }

    #[test]
    fn standard_parameters_at_d1024() {
        let p = DistinguisherParams::standard(1024, 1000).unwrap();
        assert_eq!(p.t, 32);
        assert!((p.center() - 992.0 / 1025.0).abs() < 1e-12);
        assert_eq!(DistinguisherParams::standard(1000, 1).unwrap().t, 32);
        assert_eq!(DistinguisherParams::standard(2, 1).unwrap().t, 2);
        assert!(DistinguisherParams::new(4, 1, 1, 0.25).is_err());
        assert!(DistinguisherParams::new(4, 2, 0, 0.25).is_err());
        assert!(DistinguisherParams::new(4, 2, 1, 0.0).is_err());
    }

    #[test]
    fn constant_oracle_is_flagged() {
        let p = DistinguisherParams::standard(1 << 20, 10).unwrap();
        let r = run_collision_distinguisher(&mut Constant, &p, RandomSeed::new(0)).unwrap();
        assert_eq!(r.m, binomial2(p.t));
        assert_eq!(r.verdict, Verdict::Pfc);
        assert!(r.blocks.iter().all(|&b| b as f64 == binomial2(p.t)));
    }

    #[test]
    fn exhausted_oracle_errors() {
        let p = DistinguisherParams::new(4, 3, 2, 0.25).unwrap();
        let mut o = ListOracle::new(4, vec![0, 1, 2, 3]);
        assert!(matches!(run_collision_distinguisher(&mut o, &p, RandomSeed::new(0)), Err(Error::OracleExhausted(4))));
    }

    #[test]
    fn uniform_oracle_mean_is_pairs_over_d() {
        let d = 1u64 << 12;
        let p = DistinguisherParams::new(d, 64, 4000, 0.25).unwrap();
        let mut o = Uniform(RandomSeed::new(3).rng(), d);
        let r = run_collision_distinguisher(&mut o, &p, RandomSeed::new(3)).unwrap();
        let (mean, var) = collision_count_moments(64, 1.0 / d as f64, 1.0 / (d * d) as f64);
        let se = (var / 4000.0).sqrt();
        assert!((r.m - mean).abs() < 4.0 * se, "{} vs {mean}", r.m);
        // The uniform distribution collides at rate 1/d, about half the Haar
        // rate 2/(d+1): the gap C(t,2)(2/(d+1) − 1/d) ≈ 0.49 exceeds α.
        assert_eq!(r.verdict, Verdict::Pfc);
    }

    #[test]
    fn median_estimator_and_report_fields() {
        let p = DistinguisherParams::standard(1024, 200).unwrap().with_estimator(BlockEstimator::Median);
        let mut o = UrnOracle::new(1024, RandomSeed::new(4)).unwrap();
        let r = run_collision_distinguisher(&mut o, &p, RandomSeed::new(4)).unwrap();
        assert_eq!(r.blocks.len(), 200);
        assert_eq!(r.m.fract() * 2.0, (r.m.fract() * 2.0).round());
        assert!((r.mu_ref - r.center).abs() < 1e-12);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["params", "blocks", "M", "center", "verdict", "seed"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn concentration_reference_values() {
        let r = concentration_reference(3, 1.0, 1.0, 1.0, 1).unwrap();
        assert_eq!((r.mu, r.tau), (3.0, 63.0));
        let z = concentration_reference(5, 0.0, 0.0, 0.5, 10).unwrap();
        assert_eq!((z.mu, z.tau, z.failure_bound), (0.0, 0.0, 0.0));
        let full = concentration_reference(3, 1.0 / 8.0, 1.0 / 64.0, 0.25, 100).unwrap();
        assert!((full.mu - 3.0 / 8.0).abs() < 1e-15);
        assert!(concentration_reference(3, 0.1, 0.2, 1.0, 1).is_err());
        assert!(concentration_reference(3, 0.1, 0.0, 0.0, 1).is_err());
    }

    /// All `d^t` outcome sequences with their probabilities.
    fn exact_distribution(probs: &[f64], t: u32) -> Vec<(u64, f64)> {
        let d = probs.len() as u64;
        (0..d.pow(t))
            .map(|mut code| {
                let mut xs = Vec::new();
                let mut pr = 1.0;
                for _ in 0..t {
                    let x = code % d;
                    code /= d;
                    pr *= probs[x as usize];
                    xs.push(x);
                }
                (collision_count(&xs).unwrap(), pr)
            })
            .collect()
    }

    #[test]
    fn exact_moments_and_tau_bound_by_enumeration() {
        let mut rng = RandomSeed::new(12).rng();
        for d in 1..=8usize {
            for t in 2..=4u32 {
                for _ in 0..3 {
                    let raw: Vec<f64> = (0..d).map(|_| rand::Rng::random::<f64>(&mut rng) + 0.05).collect();
                    let total: f64 = raw.iter().sum();
                    let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
                    let p: f64 = probs.iter().map(|x| x * x).sum();
                    let q: f64 = probs.iter().map(|x| x * x * x).sum();
                    let dist = exact_distribution(&probs, t);
                    let mean: f64 = dist.iter().map(|(m, pr)| *m as f64 * pr).sum();
                    let var: f64 = dist.iter().map(|(m, pr)| (*m as f64 - mean).powi(2) * pr).sum();
                    let (mu, formula_var) = collision_count_moments(t as u64, p, q);
                    assert!((mean - mu).abs() < 1e-12);
                    assert!((var - formula_var).abs() < 1e-10);
                    let reference = concentration_reference(t as u64, p, q, 1.0, 1).unwrap();
                    assert!(var <= reference.tau + 1e-12);
                }
            }
        }
    }

    #[test]
    fn chebyshev_deviation_rate_holds_empirically() {
        // Fixed distribution over d = 16 outcomes; block means of k = 20 blocks
        // of t = 4 draws, deviation β = 0.5.
        let probs: Vec<f64> = (1..=16).map(|i| i as f64 / 136.0).collect();
        let p: f64 = probs.iter().map(|x| x * x).sum();
        let q: f64 = probs.iter().map(|x| x * x * x).sum();
        let (t, k, beta) = (4u64, 20u64, 0.5);
        let bound = concentration_reference(t, p, q, beta, k).unwrap();
        let dist = rand::distr::weighted::WeightedIndex::new(&probs).unwrap();
        let mut rng = RandomSeed::new(5).rng();
        let runs = 20_000;
        let mut deviations = 0;
        for _ in 0..runs {
            let mut total = 0u64;
            for _ in 0..k {
                let xs: Vec<u64> = (0..t).map(|_| rand::distr::Distribution::sample(&dist, &mut rng) as u64).collect();
                total += collision_count(&xs).unwrap();
            }
            if (total as f64 / k as f64 - bound.mu).abs() >= beta {
                deviations += 1;
            }
        }
        let rate = deviations as f64 / runs as f64;
        assert!(rate < bound.failure_bound, "{rate} vs {}", bound.failure_bound);
    }
}
