use crate::error::{out_of_range, Result};
use crate::nets::{exposure_estimate, min_diamond_distance, CoverageReport, NetSpec};
use crate::seed::RandomSeed;
use crate::tomography::{naive_process_tomography, ChannelOracle};
use serde::{Deserialize, Serialize};

/// Decision rule applied to a reconstruction: far from the whole net.
pub fn net_membership_decision(u_hat: &crate::linalg::UnitaryMatrix, net: &NetSpec, epsilon: f64) -> Result<bool> {
    let (dist, _) = min_diamond_distance(u_hat, net)?;
    Ok(dist > 2.0 * epsilon / 3.0)
}

/// Learns the hidden unitary to accuracy `ε/3` (failure `η₀`) and reports
/// `true` when the estimate is more than `2ε/3` from every net element.
pub fn net_membership_distinguisher(
    oracle: &mut ChannelOracle,
    net: &NetSpec,
    epsilon: f64,
    eta0: f64,
    seed: RandomSeed,
) -> Result<bool> {
    if !(epsilon > 0.0) {
        return Err(out_of_range("epsilon", epsilon, "> 0"));
    }
    let estimate = naive_process_tomography(oracle, epsilon / 3.0, eta0, seed)?;
    net_membership_decision(&estimate.u_hat, net, epsilon)
}

/// Where the Haar acceptance rate of [`net_membership_distinguisher`] must
/// land. A unitary exposed at radius `ε` is accepted whenever tomography
/// succeeds, and acceptance after a successful run forces exposure at radius
/// `ε/3`, so the rate lies in `[(1−η₀)·η_ε, η_{ε/3} + η₀]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceBracket {
    pub exposure: CoverageReport,
    pub inner_exposure: CoverageReport,
    pub lower: f64,
    pub upper: f64,
}

impl AcceptanceBracket {
    /// Bracket widened by the exposure confidence intervals.
    pub fn contains_with_slack(&self, rate: f64, slack: f64) -> bool {
        let lower = self.lower - self.exposure.half_width - slack;
        let upper = self.upper + self.inner_exposure.half_width + slack;
        (lower..=upper).contains(&rate)
    }
}

pub fn net_membership_acceptance_bracket(
    net: &NetSpec,
    epsilon: f64,
    eta0: f64,
    samples: u64,
    seed: RandomSeed,
) -> Result<AcceptanceBracket> {
    let exposure = exposure_estimate(net, epsilon, samples, seed.fork("outer"))?;
    let inner_exposure = exposure_estimate(net, epsilon / 3.0, samples, seed.fork("inner"))?;
    Ok(AcceptanceBracket {
        exposure,
        inner_exposure,
        lower: (1.0 - eta0) * exposure.eta_hat,
        upper: (inner_exposure.eta_hat + eta0).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, UnitaryMatrix, C64};
    use crate::stats::WilsonInterval;
    use rayon::prelude::*;

    #[test]
    fn exact_reconstructions_decide_by_triangle_inequality() {
        let net = NetSpec::haar_random(2, 10, RandomSeed::new(1)).unwrap();
        assert!(!net_membership_decision(&net.elements()[3], &net, 0.3).unwrap());
        let singleton = NetSpec::new(vec![UnitaryMatrix::identity(2)]).unwrap();
        let z = UnitaryMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
        assert!(net_membership_decision(&z, &singleton, 1.0).unwrap());
    }

    #[test]
    fn member_is_rejected_with_tomography() {
        let net = NetSpec::haar_random(2, 5, RandomSeed::new(2)).unwrap();
        for i in 0..5 {
            let mut oracle = ChannelOracle::new(net.elements()[i].clone());
            assert!(!net_membership_distinguisher(&mut oracle, &net, 0.6, 0.1, RandomSeed::new(10 + i as u64)).unwrap());
        }
    }

    #[test]
    fn haar_acceptance_rate_lies_in_bracket() {
        let (eps, eta0, trials) = (1.2, 0.1, 200u64);
        let net = NetSpec::haar_random(2, 50, RandomSeed::new(3)).unwrap();
        let seed = RandomSeed::new(4);
        let accepted: u64 = (0..trials)
            .into_par_iter()
            .map(|i| {
                let s = seed.derive(i);
                let hidden = haar_unitary(2, s.fork("hidden")).unwrap();
                let mut oracle = ChannelOracle::new(hidden);
                u64::from(net_membership_distinguisher(&mut oracle, &net, eps, eta0, s.fork("tomography")).unwrap())
            })
            .sum();
        let rate = WilsonInterval::at_95(accepted, trials);
        let bracket = net_membership_acceptance_bracket(&net, eps, eta0, 2000, RandomSeed::new(5)).unwrap();
        println!("rate {:.3} bracket [{:.3}, {:.3}]", rate.estimate, bracket.lower, bracket.upper);
        assert!(bracket.lower > 0.0 && bracket.upper < 1.0, "vacuous bracket");
        assert!(bracket.contains_with_slack(rate.estimate, rate.half_width()));
    }
}
