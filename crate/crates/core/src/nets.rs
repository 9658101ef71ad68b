//! Finite nets over `U(d)`: nearest-element search, Monte Carlo exposure,
//! composition and product covering.

use crate::budget::MemoryBudget;
use crate::ensembles::{EnsembleSpec, FiniteEnsemble};
use crate::error::{out_of_range, Error, Result};
use crate::linalg::diamond::diamond_distance_2x2;
use crate::linalg::{check_same_dim, diamond_distance_unitaries, haar_unitary, io, UnitaryMatrix, C64};
use crate::seed::RandomSeed;
use crate::stats::WilsonInterval;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A nonempty list of unitaries of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct NetSpec {
    dim: usize,
    elements: Vec<UnitaryMatrix>,
}

impl NetSpec {
    pub fn new(elements: Vec<UnitaryMatrix>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::EmptyNet)?.dim();
        for u in &elements {
            check_same_dim(dim, u.dim())?;
        }
        Ok(Self { dim, elements })
    }

    /// The support of a finite ensemble (weights are dropped).
    pub fn from_ensemble(ensemble: &FiniteEnsemble) -> Self {
        Self { dim: ensemble.dim(), elements: ensemble.unitaries().to_vec() }
    }

    /// `count` independent Haar unitaries.
    pub fn haar_random(d: usize, count: usize, seed: RandomSeed) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyNet);
        }
        let elements = (0..count as u64)
            .map(|i| haar_unitary(d, seed.derive(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[UnitaryMatrix] {
        &self.elements
    }

    /// Reads a manifest `{"dim": d, "matrices": [...]}` or
    /// `{"dim": d, "ensemble": "other.json"}`; paths are relative to the
    /// manifest. Matrix files ending in `.bin` use the binary layout, all
    /// others JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let manifest: NetManifest = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let net = match (manifest.matrices, manifest.ensemble) {
            (Some(refs), None) => {
                let elements = refs
                    .iter()
                    .map(|r| {
                        let p = base.join(r);
                        let m = if p.extension().is_some_and(|e| e == "bin") {
                            io::read_binary(std::io::BufReader::new(std::fs::File::open(&p)?))?
                        } else {
                            io::load_json(&p)?
                        };
                        UnitaryMatrix::new(m)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(elements)?
            }
            (None, Some(ensemble)) => match EnsembleSpec::load(&base.join(ensemble))? {
                EnsembleSpec::Finite(e) => Self::from_ensemble(&e),
                EnsembleSpec::Generated { .. } => {
                    return Err(Error::InvalidArgument("a net needs a finite ensemble".into()))
                }
            },
            _ => {
                return Err(Error::InvalidArgument(
                    "net manifest needs exactly one of `matrices` or `ensemble`".into(),
                ))
            }
        };
        check_same_dim(manifest.dim, net.dim)?;
        Ok(net)
    }

    /// Writes the manifest plus `<stem>-<i>.bin` per element.
    pub fn save(&self, path: &Path) -> Result<()> {
        let base = path.parent().unwrap_or(Path::new("."));
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("net");
        let mut refs = Vec::with_capacity(self.len());
        for (i, u) in self.elements.iter().enumerate() {
            let name = format!("{stem}-{i}.bin");
            io::write_binary(u.matrix(), std::io::BufWriter::new(std::fs::File::create(base.join(&name))?))?;
            refs.push(name);
        }
        let manifest = NetManifest { dim: self.dim, matrices: Some(refs), ensemble: None };
        serde_json::to_writer_pretty(std::io::BufWriter::new(std::fs::File::create(path)?), &manifest)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetManifest {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrices: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ensemble: Option<String>,
}

/// Monte Carlo estimate of the Haar measure left uncovered at radius `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub epsilon: f64,
    pub eta_hat: f64,
    pub samples: u64,
    pub half_width: f64,
    pub interval: WilsonInterval,
    pub vol_hat: f64,
}

type Fixed2 = [C64; 4];

fn fixed2(u: &UnitaryMatrix) -> Fixed2 {
    let m = u.matrix();
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

fn adjoint2(a: &Fixed2) -> Fixed2 {
    [a[0].conj(), a[2].conj(), a[1].conj(), a[3].conj()]
}

fn mul2(a: &Fixed2, b: &Fixed2) -> Fixed2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// `tr(AB)` for row-major `2 × 2` arrays.
fn trace_product2(a: &Fixed2, b: &Fixed2) -> C64 {
    a[0] * b[0] + a[1] * b[2] + a[2] * b[1] + a[3] * b[3]
}

/// Closest net element in diamond distance and its index (first on ties).
pub fn min_diamond_distance(u: &UnitaryMatrix, net: &NetSpec) -> Result<(f64, usize)> {
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    check_same_dim(net.dim, u.dim())?;
    let mut best = (f64::INFINITY, 0);
    if net.dim == 2 {
        let ud = adjoint2(&fixed2(u));
        for (i, v) in net.elements.iter().enumerate() {
            let dist = diamond_distance_2x2(mul2(&ud, &fixed2(v)));
            if dist < best.0 {
                best = (dist, i);
            }
        }
    } else {
        for (i, v) in net.elements.iter().enumerate() {
            let dist = diamond_distance_unitaries(u, v)?;
            if dist < best.0 {
                best = (dist, i);
            }
        }
    }
    Ok(best)
}

/// Fraction of `samples` Haar unitaries farther than `epsilon` from every
/// net element. Sample `i` is drawn from `seed.derive(i)`.
pub fn exposure_estimate(net: &NetSpec, epsilon: f64, samples: u64, seed: RandomSeed) -> Result<CoverageReport> {
    if samples == 0 {
        return Err(out_of_range("samples", 0, ">= 1"));
    }
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    let exposed = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = haar_unitary(net.dim, seed.derive(i))?;
            let (dist, _) = min_diamond_distance(&u, net)?;
            Ok(u64::from(dist > epsilon))
        })
        .sum::<Result<u64>>()?;
    let interval = WilsonInterval::at_95(exposed, samples);
    Ok(CoverageReport {
        epsilon,
        eta_hat: interval.estimate,
        samples,
        half_width: interval.half_width(),
        interval,
        vol_hat: 1.0 - interval.estimate,
    })
}

/// All products `V₁·V₂†`, ordered with the `n1` index major.
pub fn compose_nets(n1: &NetSpec, n2: &NetSpec, budget: &MemoryBudget) -> Result<NetSpec> {
    check_same_dim(n1.dim, n2.dim)?;
    let d = n1.dim as u128;
    budget.check("composed net", n1.len() as u128 * n2.len() as u128, d * d * 16)?;
    let mut elements = Vec::with_capacity(n1.len() * n2.len());
    for v1 in &n1.elements {
        for v2 in &n2.elements {
            elements.push(UnitaryMatrix::from_trusted(v1.matrix() * v2.matrix().adjoint()));
        }
    }
    NetSpec::new(elements)
}

/// Elementwise adjoints.
pub fn dagger_net(net: &NetSpec) -> NetSpec {
    NetSpec { dim: net.dim, elements: net.elements.iter().map(UnitaryMatrix::adjoint).collect() }
}

/// Result of the exhaustive pair search in [`cover_with_product`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCover {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
}

/// Exhaustive search for the pair minimizing `‖V₁V₂† − U‖⋄` over `net × net`.
/// Ties resolve to the lexicographically first `(first, second)`.
pub fn cover_with_product(u: &UnitaryMatrix, net: &NetSpec, budget: &MemoryBudget) -> Result<ProductCover> {
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    check_same_dim(net.dim, u.dim())?;
    let n = net.len() as u128;
    let d = net.dim as u128;
    budget.check("product cover search", n * n, d * d * 16)?;
    if net.dim == 2 {
        return Ok(cover_with_product_2x2(u, net));
    }
    let mut best = ProductCover { first: 0, second: 0, distance: f64::INFINITY };
    for (i, v1) in net.elements.iter().enumerate() {
        for (j, v2) in net.elements.iter().enumerate() {
            let product = UnitaryMatrix::from_trusted(v1.matrix() * v2.matrix().adjoint());
            let dist = diamond_distance_unitaries(&product, u)?;
            if dist < best.distance {
                best = ProductCover { first: i, second: j, distance: dist };
            }
        }
    }
    Ok(best)
}

/// For `W = U†V₁V₂†` the distance is `sqrt(4 − |tr W|²)`, so the search
/// maximizes `|tr(A_i B_j)|²` with `A_i = U†V_i`, `B_j = V_j†` and evaluates
/// the exact distance once for the winner.
fn cover_with_product_2x2(u: &UnitaryMatrix, net: &NetSpec) -> ProductCover {
    let ud = adjoint2(&fixed2(u));
    let left: Vec<Fixed2> = net.elements.iter().map(|v| mul2(&ud, &fixed2(v))).collect();
    let right: Vec<Fixed2> = net.elements.iter().map(|v| adjoint2(&fixed2(v))).collect();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, a) in left.iter().enumerate() {
        for (j, b) in right.iter().enumerate() {
            let overlap = trace_product2(a, b).norm_sqr();
            if overlap > best.0 {
                best = (overlap, i, j);
            }
        }
    }
    let (_, first, second) = best;
    ProductCover { first, second, distance: diamond_distance_2x2(mul2(&left[first], &right[second])) }
}

/// `(1 − η)(c⋄/ε)^{d²−1}`.
pub fn net_size_lower_bound(d: usize, epsilon: f64, eta: f64, c_diamond: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if !(epsilon > 0.0) {
        return Err(out_of_range("epsilon", epsilon, "> 0"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(out_of_range("eta", eta, "[0, 1]"));
    }
    if !(c_diamond > 0.0) {
        return Err(out_of_range("c_diamond", c_diamond, "> 0"));
    }
    let exponent = (d * d - 1) as f64;
    Ok((1.0 - eta) * (c_diamond / epsilon).powf(exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z_gate() -> UnitaryMatrix {
        UnitaryMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap()
    }

    fn budget() -> MemoryBudget {
        MemoryBudget::default()
    }

    #[test]
    fn nearest_element_examples() {
        let id = UnitaryMatrix::identity(2);
        let z = z_gate();
        let singleton = NetSpec::new(vec![id.clone()]).unwrap();
        assert_eq!(min_diamond_distance(&z, &singleton).unwrap(), (2.0, 0));
        let pair = NetSpec::new(vec![id.clone(), z.clone()]).unwrap();
        let (dist, idx) = min_diamond_distance(&z, &pair).unwrap();
        assert!(dist < 1e-12);
        assert_eq!(idx, 1);
        let dup = NetSpec::new(vec![z.clone(), id.clone(), z.clone()]).unwrap();
        assert_eq!(min_diamond_distance(&z, &dup).unwrap().1, 0);
        assert!(NetSpec::new(vec![]).is_err());
        assert!(min_diamond_distance(&UnitaryMatrix::identity(3), &singleton).is_err());
    }

    #[test]
    fn fast_path_agrees_with_general_distance() {
        let net = NetSpec::haar_random(2, 50, RandomSeed::new(1)).unwrap();
        for s in 0..20 {
            let u = haar_unitary(2, RandomSeed::new(100 + s)).unwrap();
            let (dist, idx) = min_diamond_distance(&u, &net).unwrap();
            let general = net
                .elements()
                .iter()
                .map(|v| diamond_distance_unitaries(&u, v).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!((dist - general).abs() < 1e-12);
            assert!((diamond_distance_unitaries(&u, &net.elements()[idx]).unwrap() - dist).abs() < 1e-12);
        }
    }

    #[test]
    fn exposure_extremes() {
        let net = NetSpec::haar_random(2, 10, RandomSeed::new(2)).unwrap();
        let full = exposure_estimate(&net, 2.0, 200, RandomSeed::new(3)).unwrap();
        assert_eq!(full.eta_hat, 0.0);
        assert_eq!(full.vol_hat, 1.0);
        let none = exposure_estimate(&net, 0.0, 200, RandomSeed::new(3)).unwrap();
        assert_eq!(none.eta_hat, 1.0);
        assert!(exposure_estimate(&net, 0.5, 0, RandomSeed::new(3)).is_err());
    }

    #[test]
    fn exposure_is_reproducible_and_monotone() {
        let small = NetSpec::haar_random(2, 30, RandomSeed::new(4)).unwrap();
        let mut bigger = small.elements().to_vec();
        bigger.extend(NetSpec::haar_random(2, 30, RandomSeed::new(5)).unwrap().elements().iter().cloned());
        let bigger = NetSpec::new(bigger).unwrap();
        let seed = RandomSeed::new(6);
        let a = exposure_estimate(&small, 0.8, 400, seed).unwrap();
        assert_eq!(a, exposure_estimate(&small, 0.8, 400, seed).unwrap());
        // Common random numbers make both monotonicity checks exact.
        assert!(exposure_estimate(&small, 1.0, 400, seed).unwrap().eta_hat <= a.eta_hat);
        assert!(exposure_estimate(&bigger, 0.8, 400, seed).unwrap().eta_hat <= a.eta_hat);
    }

    #[test]
    fn composition_and_dagger() {
        let id = NetSpec::new(vec![UnitaryMatrix::identity(2)]).unwrap();
        let c = compose_nets(&id, &id, &budget()).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c.elements()[0].matrix() - UnitaryMatrix::identity(2).matrix()).norm() < 1e-15);
        let n1 = NetSpec::haar_random(2, 4, RandomSeed::new(7)).unwrap();
        let n2 = NetSpec::haar_random(2, 3, RandomSeed::new(8)).unwrap();
        let c = compose_nets(&n1, &n2, &budget()).unwrap();
        assert_eq!(c.len(), 12);
        let expected = n1.elements()[2].mul(&n2.elements()[1].adjoint()).unwrap();
        assert!((c.elements()[2 * 3 + 1].matrix() - expected.matrix()).norm() < 1e-12);
        assert!(compose_nets(&n1, &n2, &MemoryBudget::new(100)).is_err());
        let dag = dagger_net(&n1);
        assert_eq!(dagger_net(&dag), n1);
    }

    #[test]
    fn product_cover_examples() {
        let z = z_gate();
        let id = UnitaryMatrix::identity(2);
        let net = NetSpec::new(vec![z.clone(), id.clone()]).unwrap();
        let cover = cover_with_product(&z, &net, &budget()).unwrap();
        assert!(cover.distance < 1e-12);
        let product = net.elements()[cover.first].mul(&net.elements()[cover.second].adjoint()).unwrap();
        assert!(diamond_distance_unitaries(&product, &z).unwrap() < 1e-12);

        let singleton = NetSpec::new(vec![id.clone()]).unwrap();
        for s in 0..5 {
            let u = haar_unitary(2, RandomSeed::new(s)).unwrap();
            let cover = cover_with_product(&u, &singleton, &budget()).unwrap();
            assert!((cover.distance - diamond_distance_unitaries(&u, &id).unwrap()).abs() < 1e-12);
        }
        assert!(cover_with_product(&z, &net, &MemoryBudget::new(10)).is_err());
    }

    #[test]
    fn product_cover_fast_path_matches_general_search() {
        let net = NetSpec::haar_random(2, 12, RandomSeed::new(9)).unwrap();
        for s in 0..5 {
            let u = haar_unitary(2, RandomSeed::new(50 + s)).unwrap();
            let fast = cover_with_product(&u, &net, &budget()).unwrap();
            let mut best = f64::INFINITY;
            for v1 in net.elements() {
                for v2 in net.elements() {
                    let p = v1.mul(&v2.adjoint()).unwrap();
                    best = best.min(diamond_distance_unitaries(&p, &u).unwrap());
                }
            }
            assert!((fast.distance - best).abs() < 1e-9);
        }
        let net3 = NetSpec::haar_random(3, 6, RandomSeed::new(10)).unwrap();
        let u = haar_unitary(3, RandomSeed::new(11)).unwrap();
        let cover = cover_with_product(&u, &net3, &budget()).unwrap();
        let p = net3.elements()[cover.first].mul(&net3.elements()[cover.second].adjoint()).unwrap();
        assert!((diamond_distance_unitaries(&p, &u).unwrap() - cover.distance).abs() < 1e-12);
    }

    #[test]
    fn manifest_round_trip() {
        let dir = std::env::temp_dir().join(format!("prubench-net-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let net = NetSpec::haar_random(2, 3, RandomSeed::new(12)).unwrap();
        let path = dir.join("net.json");
        net.save(&path).unwrap();
        assert_eq!(NetSpec::load(&path).unwrap(), net);

        let ens = crate::ensembles::clifford_group(1).unwrap();
        EnsembleSpec::Finite(ens.clone()).save(&dir.join("cliff.json")).unwrap();
        std::fs::write(dir.join("ref.json"), r#"{"dim": 2, "ensemble": "cliff.json"}"#).unwrap();
        assert_eq!(NetSpec::load(&dir.join("ref.json")).unwrap().len(), 24);
        std::fs::write(dir.join("bad.json"), r#"{"dim": 3, "ensemble": "cliff.json"}"#).unwrap();
        assert!(NetSpec::load(&dir.join("bad.json")).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn size_bound_values() {
        assert_eq!(net_size_lower_bound(2, 0.5, 0.0, 1.0).unwrap(), 8.0);
        assert_eq!(net_size_lower_bound(2, 0.3, 1.0, 1.0).unwrap(), 0.0);
        assert!(net_size_lower_bound(2, 0.0, 0.0, 1.0).is_err());
        assert!(net_size_lower_bound(2, 0.1, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn size_bound_decreases_in_epsilon(d in 2usize..5, e1 in 0.01f64..2.0, e2 in 0.01f64..2.0, eta in 0.0f64..0.99) {
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            prop_assert!(net_size_lower_bound(d, lo, eta, 1.0).unwrap() >= net_size_lower_bound(d, hi, eta, 1.0).unwrap());
        }
    }
}
