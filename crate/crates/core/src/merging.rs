//! Greedy merging of the sample-induced partition into a piecewise
//! hypothesis.
//!
//! Each round pairs neighbouring intervals, scores every union by how badly
//! its best fit matches the data, keeps the worst-scoring pairs split and
//! merges the rest.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ak::AkData;
use crate::discrete::{discrete_initial_partition, DiscreteData, DiscreteInterval};
use crate::empirical::{a1_error, flatten, initial_partition, EmpiricalDistribution};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::{rescale_to_canonical, Polynomial};
use crate::projection::{
    cut_lp_projection, find_polynomial, AkGeometry, Canonical, DiscreteCanonical,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeConfig {
    /// Number of pieces of the target class.
    pub t: usize,
    /// Piece budget factor; the output has at most `2 alpha t` pieces.
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub degree: usize,
    /// Constant in front of the sample-size formula.
    #[serde(default = "one")]
    pub c_vc: f64,
}

fn one() -> f64 {
    1.0
}

impl MergeConfig {
    pub fn new(t: usize, alpha: f64, epsilon: f64, delta: f64, degree: usize) -> Self {
        MergeConfig {
            t,
            alpha,
            epsilon,
            delta,
            degree,
            c_vc: 1.0,
        }
    }

    /// `(t, alpha)` for a fixed budget of pieces.
    pub fn for_pieces(pieces: usize, alpha: f64, degree: usize) -> Self {
        let t = ((pieces as f64 / (2.0 * alpha)).floor() as usize).max(1);
        MergeConfig::new(t, alpha, 0.1, 0.1, degree)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) {
            return Err(Error::Config(format!(
                "alpha must exceed 2, got {}",
                self.alpha
            )));
        }
        if self.t == 0 {
            return Err(Error::Config("t must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config("epsilon and delta must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn budget(&self) -> f64 {
        2.0 * self.alpha * self.t as f64
    }

    pub fn kept_pairs(&self) -> usize {
        (self.alpha * self.t as f64).ceil() as usize
    }

    /// Tolerance handed to the oracles.
    pub fn oracle_tolerance(&self) -> f64 {
        self.epsilon / self.budget()
    }

    fn vc_terms(&self) -> f64 {
        (2.0 * self.alpha + 1.0) * (self.degree + 1) as f64 * self.t as f64
            + (1.0 / self.delta).ln()
    }

    /// Accuracy reachable with `n` samples; inverse of [`required_samples`].
    pub fn epsilon_for(&self, n: usize) -> f64 {
        (self.c_vc * self.vc_terms() / n as f64).sqrt()
    }
}

pub fn required_samples(cfg: &MergeConfig) -> usize {
    (cfg.c_vc * cfg.vc_terms() / (cfg.epsilon * cfg.epsilon)).ceil() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub enum PieceFunction {
    Poly(Polynomial),
    /// Point mass on a singleton piece.
    Atom(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisPiece {
    pub interval: Interval,
    pub func: PieceFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseHypothesis {
    pub domain: Interval,
    pub degree: usize,
    pub pieces: Vec<HypothesisPiece>,
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    left: f64,
    right: f64,
    #[serde(default = "yes")]
    left_closed: bool,
    #[serde(default = "yes")]
    right_closed: bool,
    #[serde(default)]
    coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atom: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
struct HypothesisJson {
    domain: [f64; 2],
    degree: usize,
    pieces: Vec<PieceJson>,
}

impl PiecewiseHypothesis {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Density value at `x`, ignoring atoms.
    pub fn density(&self, x: f64) -> f64 {
        for p in &self.pieces {
            if p.interval.contains(x) {
                return match &p.func {
                    PieceFunction::Poly(q) => q.eval(x),
                    PieceFunction::Atom(_) => 0.0,
                };
            }
        }
        0.0
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pieces.iter().filter_map(|p| match p.func {
            PieceFunction::Atom(m) => Some((p.interval.left, m)),
            _ => None,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match &p.func {
                PieceFunction::Poly(q) => q.integrate(p.interval.left, p.interval.right),
                PieceFunction::Atom(m) => *m,
            })
            .sum()
    }

    pub fn min_value(&self) -> f64 {
        let mut m = f64::INFINITY;
        for p in &self.pieces {
            if let PieceFunction::Poly(q) = &p.func {
                for i in 0..=200 {
                    let x = p.interval.left + p.interval.length() * i as f64 / 200.0;
                    m = m.min(q.eval(x));
                }
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let (coeffs, atom) = match &p.func {
                    PieceFunction::Poly(q) => (q.coeffs.clone(), None),
                    PieceFunction::Atom(m) => (Vec::new(), Some(*m)),
                };
                PieceJson {
                    left: p.interval.left,
                    right: p.interval.right,
                    left_closed: p.interval.left_closed,
                    right_closed: p.interval.right_closed,
                    coeffs,
                    atom,
                }
            })
            .collect();
        let h = HypothesisJson {
            domain: [self.domain.left, self.domain.right],
            degree: self.degree,
            pieces,
        };
        serde_json::to_string_pretty(&h).expect("hypothesis serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: HypothesisJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let pieces = h
            .pieces
            .into_iter()
            .map(|p| {
                let interval = Interval::new(p.left, p.right, p.left_closed, p.right_closed);
                let func = match p.atom {
                    Some(m) => PieceFunction::Atom(m),
                    None => PieceFunction::Poly(Polynomial::new(p.coeffs, interval)),
                };
                HypothesisPiece { interval, func }
            })
            .collect();
        Ok(PiecewiseHypothesis {
            domain: Interval::closed(h.domain[0], h.domain[1]),
            degree: h.degree,
            pieces,
        })
    }
}

/// Sizes of the partition before each round and after the last one.
#[derive(Clone, Debug, Default)]
pub struct MergeTrace {
    pub sizes: Vec<usize>,
}

impl MergeTrace {
    pub fn rounds(&self) -> usize {
        self.sizes.len().saturating_sub(1)
    }
}

/// The shared merge loop. `score` returns the error of the best fit on a
/// candidate union; unions without samples score 0 and always merge.
fn merge_loop<P, J, E, S>(
    mut parts: Vec<P>,
    cfg: &MergeConfig,
    join: J,
    is_empty: E,
    score: S,
) -> Result<(Vec<P>, MergeTrace)>
where
    P: Copy + Send + Sync,
    J: Fn(&P, &P) -> P + Sync,
    E: Fn(&P) -> bool + Sync,
    S: Fn(&P) -> Result<f64> + Sync,
{
    let budget = cfg.budget();
    let kept = cfg.kept_pairs();
    let mut trace = MergeTrace {
        sizes: vec![parts.len()],
    };
    while parts.len() as f64 > budget {
        let s = parts.len();
        let pairs = s / 2;
        let candidates: Vec<P> = (0..pairs)
            .map(|i| join(&parts[2 * i], &parts[2 * i + 1]))
            .collect();
        let errors: Vec<f64> = candidates
            .par_iter()
            .map(|c| if is_empty(c) { Ok(0.0) } else { score(c) })
            .collect::<Result<_>>()?;
        // at least one pair must merge for the loop to make progress
        let keep = kept.min(pairs - 1);
        let mut order: Vec<usize> = (0..pairs).collect();
        let by_error = |a: &usize, b: &usize| errors[*b].total_cmp(&errors[*a]).then(a.cmp(b));
        if keep > 0 && keep < pairs {
            order.select_nth_unstable_by(keep - 1, by_error);
        }
        let mut split = vec![false; pairs];
        for &i in &order[..keep] {
            split[i] = true;
        }
        let mut next = Vec::with_capacity(s - pairs + keep);
        for i in 0..pairs {
            if split[i] {
                next.push(parts[2 * i]);
                next.push(parts[2 * i + 1]);
            } else {
                next.push(candidates[i]);
            }
        }
        if s % 2 == 1 {
            next.push(parts[s - 1]);
        }
        assert!(next.len() < s && next.len() <= s.div_ceil(2) + kept);
        if s > 4 * kept + 4 {
            assert!(4 * next.len() < 3 * s);
        }
        parts = next;
        trace.sizes.push(parts.len());
    }
    Ok((parts, trace))
}

fn histogram_piece(f: &EmpiricalDistribution, j: &Interval) -> Result<HypothesisPiece> {
    let func = if j.is_singleton() {
        PieceFunction::Atom(f.mass(j))
    } else {
        PieceFunction::Poly(Polynomial::constant(flatten(f, j)?, *j))
    };
    Ok(HypothesisPiece { interval: *j, func })
}

/// Histogram with at most `2 alpha t` pieces, scored by A1 errors of
/// flattenings.
pub fn construct_histogram(
    f: &EmpiricalDistribution,
    cfg: &MergeConfig,
) -> Result<PiecewiseHypothesis> {
    Ok(construct_histogram_traced(f, cfg)?.0)
}

pub fn construct_histogram_traced(
    f: &EmpiricalDistribution,
    cfg: &MergeConfig,
) -> Result<(PiecewiseHypothesis, MergeTrace)> {
    cfg.validate()?;
    let parts = initial_partition(f).pieces;
    let (parts, trace) = merge_loop(
        parts,
        cfg,
        |a, b| a.join(b),
        |j| f.count(j) == 0,
        |j| Ok(a1_error(f, j)),
    )?;
    let pieces = parts
        .iter()
        .map(|j| histogram_piece(f, j))
        .collect::<Result<_>>()?;
    Ok((
        PiecewiseHypothesis {
            domain: f.domain(),
            degree: 0,
            pieces,
        },
        trace,
    ))
}

/// A projection oracle and the matching computation oracle.
pub trait MergeOracle: Sync {
    /// A fit on `j` whose distance to the data is within `eta` of the best.
    fn project(&self, f: &EmpiricalDistribution, j: &Interval, eta: f64) -> Result<PieceFunction>;
    /// The distance between `h` and the data on `j`, to within `eta`.
    fn compute(
        &self,
        f: &EmpiricalDistribution,
        h: &PieceFunction,
        j: &Interval,
        eta: f64,
    ) -> Result<f64>;
    fn project_and_compute(
        &self,
        f: &EmpiricalDistribution,
        j: &Interval,
        eta: f64,
    ) -> Result<(PieceFunction, f64)> {
        let h = self.project(f, j, eta)?;
        let e = self.compute(f, &h, j, eta)?;
        Ok((h, e))
    }
}

/// Flattening and its A1 error. `compute` assumes `h` is the flattening.
pub struct HistogramOracles;

impl MergeOracle for HistogramOracles {
    fn project(&self, f: &EmpiricalDistribution, j: &Interval, _eta: f64) -> Result<PieceFunction> {
        Ok(histogram_piece(f, j)?.func)
    }

    fn compute(
        &self,
        f: &EmpiricalDistribution,
        _h: &PieceFunction,
        j: &Interval,
        _eta: f64,
    ) -> Result<f64> {
        Ok(a1_error(f, j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Bisection over the target distance with an ellipsoid feasibility test.
    Ellipsoid,
    /// Cutting-plane LP over the same separation oracle.
    CuttingLp,
}

/// Degree-`d` nonnegative polynomial fits scored by the A_{d+1} distance.
pub struct PolynomialOracles {
    pub degree: usize,
    pub solver: Solver,
}

impl PolynomialOracles {
    pub fn new(degree: usize, solver: Solver) -> Self {
        PolynomialOracles { degree, solver }
    }
}

/// Fits a nonnegative polynomial on `j`; intervals whose mass is at most
/// `eta` get the zero function, which is then within `eta` of optimal.
pub fn projection_oracle(
    f: &EmpiricalDistribution,
    j: &Interval,
    eta: f64,
    degree: usize,
    solver: Solver,
) -> Result<(PieceFunction, f64)> {
    if j.is_singleton() {
        return Ok((PieceFunction::Atom(f.mass(j)), 0.0));
    }
    let mass = f.mass(j);
    if mass <= eta {
        return Ok((PieceFunction::Poly(Polynomial::zero(*j)), mass));
    }
    let (g, map, mass) = rescale_to_canonical(f, j)?;
    let geom = Canonical::new(&g, degree);
    let k = degree + 1;
    let eta_c = eta / mass;
    let q = match solver {
        Solver::Ellipsoid => find_polynomial(&geom, k, eta_c)?.coeffs,
        Solver::CuttingLp => cut_lp_projection(&geom, k, eta_c)?.0,
    };
    let err = mass * geom.ak_cut(&q, k)?.value;
    Ok((
        PieceFunction::Poly(map.density_from_canonical(&q, mass, *j)),
        err,
    ))
}

/// A_{d+1} distance between `h` and the data on `j`.
pub fn computation_oracle(
    f: &EmpiricalDistribution,
    h: &PieceFunction,
    j: &Interval,
    degree: usize,
) -> Result<f64> {
    let k = degree + 1;
    match h {
        PieceFunction::Atom(m) => Ok((m - f.mass(j)).abs()),
        PieceFunction::Poly(p) => {
            if f.count(j) == 0 || j.length() <= 0.0 {
                return Ok(AkData::new(f, j).solve(&p.coeffs, k)?.value);
            }
            let (g, map, mass) = rescale_to_canonical(f, j)?;
            let q = map.density_to_canonical(p, mass);
            let geom = Canonical::new(&g, q.len() - 1);
            Ok(mass * geom.ak_cut(&q, k)?.value)
        }
    }
}

impl MergeOracle for PolynomialOracles {
    fn project(&self, f: &EmpiricalDistribution, j: &Interval, eta: f64) -> Result<PieceFunction> {
        Ok(projection_oracle(f, j, eta, self.degree, self.solver)?.0)
    }

    fn compute(
        &self,
        f: &EmpiricalDistribution,
        h: &PieceFunction,
        j: &Interval,
        _eta: f64,
    ) -> Result<f64> {
        computation_oracle(f, h, j, self.degree)
    }

    fn project_and_compute(
        &self,
        f: &EmpiricalDistribution,
        j: &Interval,
        eta: f64,
    ) -> Result<(PieceFunction, f64)> {
        projection_oracle(f, j, eta, self.degree, self.solver)
    }
}

/// Merging driven by an arbitrary oracle pair; the oracles are called with
/// tolerance `epsilon / (2 alpha t)`.
pub fn general_merging<O: MergeOracle>(
    f: &EmpiricalDistribution,
    cfg: &MergeConfig,
    oracles: &O,
) -> Result<PiecewiseHypothesis> {
    Ok(general_merging_traced(f, cfg, oracles)?.0)
}

/// Solver fits keyed by interval. Late rounds mostly revisit unions that
/// were already scored, and the final pieces were all scored once.
struct FitCache<K, V>(Mutex<HashMap<K, (V, f64)>>);

impl<K, V> Default for FitCache<K, V> {
    fn default() -> Self {
        FitCache(Mutex::new(HashMap::new()))
    }
}

impl<K: Eq + Hash, V: Clone> FitCache<K, V> {
    fn get_or(&self, key: K, fit: impl FnOnce() -> Result<(V, f64)>) -> Result<(V, f64)> {
        if let Some(hit) = self.0.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let out = fit()?;
        self.0.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }
}

pub fn general_merging_traced<O: MergeOracle>(
    f: &EmpiricalDistribution,
    cfg: &MergeConfig,
    oracles: &O,
) -> Result<(PiecewiseHypothesis, MergeTrace)> {
    cfg.validate()?;
    let eta = cfg.oracle_tolerance();
    let parts = initial_partition(f).pieces;
    let cache = FitCache::default();
    let fit = |j: &Interval| {
        if f.mass(j) <= eta {
            return oracles.project_and_compute(f, j, eta);
        }
        let key = (
            j.left.to_bits(),
            j.right.to_bits(),
            j.left_closed,
            j.right_closed,
        );
        cache.get_or(key, || oracles.project_and_compute(f, j, eta))
    };
    let (parts, trace) = merge_loop(
        parts,
        cfg,
        |a, b| a.join(b),
        |j| f.count(j) == 0,
        |j| Ok(fit(j)?.1),
    )?;
    let pieces = parts
        .iter()
        .map(|j| {
            Ok(HypothesisPiece {
                interval: *j,
                func: fit(j)?.0,
            })
        })
        .collect::<Result<_>>()?;
    Ok((
        PiecewiseHypothesis {
            domain: f.domain(),
            degree: cfg.degree,
            pieces,
        },
        trace,
    ))
}

/// A piece of a hypothesis on the integers: the probability of `i` is
/// `mass * q(z_i)` with `z` the canonical coordinate of the piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePiece {
    pub interval: DiscreteInterval,
    pub mass: f64,
    pub canonical_coeffs: Vec<f64>,
}

impl DiscretePiece {
    pub fn pmf(&self, i: i64) -> f64 {
        if i < self.interval.lo || i > self.interval.hi {
            return 0.0;
        }
        let z = self.interval.to_canonical(i);
        self.mass
            * self
                .canonical_coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, &c| acc * z + c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteHypothesis {
    pub n_max: i64,
    pub degree: usize,
    pub pieces: Vec<DiscretePiece>,
}

impl DiscreteHypothesis {
    pub fn pmf(&self, i: i64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.interval.hi < i);
        self.pieces.get(idx).map_or(0.0, |p| p.pmf(i))
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}

fn discrete_fit(
    f: &EmpiricalDistribution,
    j: &DiscreteInterval,
    eta: f64,
    degree: usize,
    solver: Solver,
) -> Result<(DiscretePiece, f64)> {
    let mass = f.mass(&j.as_interval());
    let zero = DiscretePiece {
        interval: *j,
        mass: 0.0,
        canonical_coeffs: vec![0.0],
    };
    if mass == 0.0 {
        return Ok((zero, 0.0));
    }
    let data = DiscreteData::new(f, *j, degree + 1);
    let k = degree + 1;
    if degree == 0 {
        let q = vec![1.0 / j.len() as f64];
        let err = mass * data.ak_cut(&q, 1)?.value;
        return Ok((
            DiscretePiece {
                interval: *j,
                mass,
                canonical_coeffs: q,
            },
            err,
        ));
    }
    if mass <= eta {
        return Ok((zero, mass));
    }
    let geom = DiscreteCanonical::new(data, degree);
    let eta_c = eta / mass;
    let q = match solver {
        Solver::Ellipsoid => find_polynomial(&geom, k, eta_c)?.coeffs,
        Solver::CuttingLp => cut_lp_projection(&geom, k, eta_c)?.0,
    };
    let err = mass * geom.ak_cut(&q, k)?.value;
    Ok((
        DiscretePiece {
            interval: *j,
            mass,
            canonical_coeffs: q,
        },
        err,
    ))
}

/// Merging over the integers `1..=n_max`; `f` must hold integer samples.
pub fn discrete_merging(
    f: &EmpiricalDistribution,
    n_max: i64,
    cfg: &MergeConfig,
    solver: Solver,
) -> Result<(DiscreteHypothesis, MergeTrace)> {
    cfg.validate()?;
    if f.samples()
        .iter()
        .any(|x| x.fract() != 0.0 || *x < 1.0 || *x > n_max as f64)
    {
        return Err(Error::Config(format!(
            "discrete mode needs integer samples in 1..={n_max}"
        )));
    }
    let eta = cfg.oracle_tolerance();
    let parts = discrete_initial_partition(f, n_max);
    let cache = FitCache::default();
    let fit = |j: &DiscreteInterval| {
        if f.mass(&j.as_interval()) <= eta {
            return discrete_fit(f, j, eta, cfg.degree, solver);
        }
        cache.get_or((j.lo, j.hi), || discrete_fit(f, j, eta, cfg.degree, solver))
    };
    let (parts, trace) = merge_loop(
        parts,
        cfg,
        |a, b| a.join(b),
        |j| f.count(&j.as_interval()) == 0,
        |j| Ok(fit(j)?.1),
    )?;
    let pieces = parts.iter().map(|j| Ok(fit(j)?.0)).collect::<Result<_>>()?;
    Ok((
        DiscreteHypothesis {
            n_max,
            degree: cfg.degree,
            pieces,
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::build_empirical;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, seed: u64) -> EmpiricalDistribution {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        build_empirical(&xs, Interval::closed(0.0, 1.0)).unwrap()
    }

    fn l1_to_uniform(h: &PiecewiseHypothesis) -> f64 {
        let mut err: f64 = h.atoms().map(|(_, m)| m).sum();
        for p in &h.pieces {
            if let PieceFunction::Poly(q) = &p.func {
                err += (q.coeffs[0] - 1.0).abs() * p.interval.length();
            }
        }
        err
    }

    #[test]
    fn sample_count_formula() {
        let mut cfg = MergeConfig::new(40, 4.0, 0.00983, 0.999999, 1);
        cfg.c_vc = 1.0 / 9.0;
        let n = required_samples(&cfg);
        assert!((n as f64 - 830_000.0).abs() / 830_000.0 < 0.01, "{n}");
        let base = required_samples(&MergeConfig::new(4, 4.0, 0.1, 0.1, 0));
        assert!(required_samples(&MergeConfig::new(4, 4.0, 0.1, 0.001, 0)) > base);
        let halved = required_samples(&MergeConfig::new(4, 4.0, 0.05, 0.1, 0));
        assert!((halved as f64 / base as f64 - 4.0).abs() < 0.01);
    }

    #[test]
    fn config_validation() {
        assert!(MergeConfig::new(4, 2.0, 0.1, 0.1, 0).validate().is_err());
        assert!(MergeConfig::new(0, 4.0, 0.1, 0.1, 0).validate().is_err());
        assert!(MergeConfig::new(4, 4.0, 1.5, 0.1, 0).validate().is_err());
        assert_eq!(MergeConfig::for_pieces(80, 4.0, 0).t, 10);
    }

    #[test]
    fn equal_samples_collapse() {
        let f = build_empirical(&[0.4; 50], Interval::closed(0.0, 1.0)).unwrap();
        let (h, trace) =
            construct_histogram_traced(&f, &MergeConfig::new(1, 2.5, 0.1, 0.1, 0)).unwrap();
        assert_eq!(trace.rounds(), 0);
        assert_eq!(h.len(), 3);
        assert_eq!(h.atoms().collect::<Vec<_>>(), vec![(0.4, 1.0)]);
        assert_eq!(h.density(0.2), 0.0);
    }

    #[test]
    fn uniform_histogram() {
        let f = uniform(100_000, 1);
        let cfg = MergeConfig::new(4, 4.0, 0.1, 0.1, 0);
        let (h, trace) = construct_histogram_traced(&f, &cfg).unwrap();
        assert!(h.len() <= 32);
        assert!((h.total_mass() - 1.0).abs() < 1e-9);
        let eps = ((2.0 * 4.0 + 1.0) * 4.0 * 20f64.ln() / 1e5).sqrt();
        assert!(l1_to_uniform(&h) <= 5.0 * eps);
        let bound = (2.0 * 100_000.0 + 1.0f64).ln() / (4.0f64 / 3.0).ln();
        assert!(trace.rounds() as f64 <= bound.ceil());
    }

    #[test]
    fn histogram_oracles_reproduce_histogram() {
        for seed in 0..5 {
            let f = uniform(2000, seed);
            let cfg = MergeConfig::new(3, 3.0, 0.1, 0.1, 0);
            assert_eq!(
                construct_histogram(&f, &cfg).unwrap(),
                general_merging(&f, &cfg, &HistogramOracles).unwrap()
            );
        }
    }

    #[test]
    fn contraction_and_round_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let n = rng.random_range(1..3000);
            let f = uniform(n, rng.random());
            let cfg = MergeConfig::new(
                rng.random_range(1..6),
                rng.random_range(2.1..6.0),
                0.1,
                0.1,
                0,
            );
            let (h, trace) = construct_histogram_traced(&f, &cfg).unwrap();
            assert!(h.len() as f64 <= cfg.budget());
            let bound = ((2 * n + 1) as f64).ln() / (4.0f64 / 3.0).ln();
            assert!(trace.rounds() as f64 <= bound.ceil().max(1.0));
        }
    }

    #[test]
    fn json_round_trip() {
        let f = uniform(500, 3);
        let h = construct_histogram(&f, &MergeConfig::new(2, 4.0, 0.1, 0.1, 0)).unwrap();
        assert_eq!(PiecewiseHypothesis::from_json(&h.to_json()).unwrap(), h);
    }

    #[test]
    fn linear_pieces_on_a_ramp() {
        // density 2x on [0, 1]
        let n = 20_000;
        let xs: Vec<f64> = (0..n)
            .map(|i| ((i as f64 + 0.5) / n as f64).sqrt())
            .collect();
        let f = build_empirical(&xs, Interval::closed(0.0, 1.0)).unwrap();
        let cfg = MergeConfig::new(1, 3.0, 0.05, 0.1, 1);
        let h = general_merging(&f, &cfg, &PolynomialOracles::new(1, Solver::CuttingLp)).unwrap();
        assert!(h.len() <= 6);
        assert!(h.min_value() >= 0.0);
        let err: f64 = (0..1000)
            .map(|i| {
                let x = (i as f64 + 0.5) / 1000.0;
                (h.density(x) - 2.0 * x).abs() / 1000.0
            })
            .sum();
        assert!(err < 0.05, "{err}");
    }

    #[test]
    fn oracle_pair_on_flattening_matches_a1() {
        let f = uniform(300, 4);
        let j = Interval::closed(0.1, 0.7);
        let h = PieceFunction::Poly(Polynomial::constant(flatten(&f, &j).unwrap(), j));
        let v = computation_oracle(&f, &h, &j, 0).unwrap();
        assert!((v - a1_error(&f, &j)).abs() < 1e-9);
        let empty = Interval::closed(2.0, 3.0);
        let g = build_empirical(&[0.5], Interval::closed(0.0, 4.0)).unwrap();
        let (fit, err) = projection_oracle(&g, &empty, 0.01, 1, Solver::Ellipsoid).unwrap();
        assert_eq!(err, 0.0);
        assert_eq!(fit, PieceFunction::Poly(Polynomial::zero(empty)));
    }

    #[test]
    fn discrete_histogram_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..3000)
            .map(|_| rng.random_range(1..=200i64) as f64)
            .collect();
        let f = build_empirical(&xs, Interval::closed(1.0, 200.0)).unwrap();
        let cfg = MergeConfig::new(2, 3.0, 0.1, 0.1, 0);
        let (h, trace) = discrete_merging(&f, 200, &cfg, Solver::CuttingLp).unwrap();
        assert!(h.len() as f64 <= cfg.budget());
        assert!(trace.sizes.windows(2).all(|w| w[1] < w[0]));
        let total: f64 = (1..=200).map(|i| h.pmf(i)).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let l1: f64 = (1..=200).map(|i| (h.pmf(i) - 1.0 / 200.0).abs()).sum();
        assert!(l1 < 0.2, "{l1}");
    }

    #[test]
    fn discrete_linear_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        // pmf proportional to i on 1..=100
        let weights: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let total: f64 = weights.iter().sum();
        let xs: Vec<f64> = (0..5000)
            .map(|_| {
                let mut u = rng.random::<f64>() * total;
                let mut i = 0;
                while u > weights[i] {
                    u -= weights[i];
                    i += 1;
                }
                (i + 1) as f64
            })
            .collect();
        let f = build_empirical(&xs, Interval::closed(1.0, 100.0)).unwrap();
        let cfg = MergeConfig::new(1, 3.0, 0.05, 0.1, 1);
        let (h, _) = discrete_merging(&f, 100, &cfg, Solver::CuttingLp).unwrap();
        assert!(h.len() <= 6);
        let l1: f64 = (1..=100).map(|i| (h.pmf(i) - i as f64 / total).abs()).sum();
        assert!(l1 < 0.15, "{l1}");
        assert!((1..=100).all(|i| h.pmf(i) >= 0.0));
    }
}
