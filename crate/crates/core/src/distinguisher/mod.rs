//! Distinguishers against hidden unitaries: the collision test on
//! computational-basis samples, a generic advantage harness, and a
//! tomography-based membership test against a net.

mod advantage;
mod collision;
mod net_membership;
mod oracle;

pub use advantage::{acceptance_count, estimate_advantage, AdvantageReport, CollisionTest, OracleTest, SingleShotTest};
pub use collision::{
    binomial2, collision_count, collision_count_moments, concentration_reference, run_collision_distinguisher,
    BlockEstimator, CollisionReport, ConcentrationReference, DistinguisherParams, Verdict,
};
pub use net_membership::{
    net_membership_acceptance_bracket, net_membership_decision, net_membership_distinguisher, AcceptanceBracket,
};
pub use oracle::{
    BoxedOracle, DenseHaarOracle, HaarDenseSource, HaarUrnSource, ListOracle, MeasurementOracle, OracleSource,
    PfcSource, UnitaryOracle, UrnOracle,
};
