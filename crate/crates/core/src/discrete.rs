//! Distributions on the integers `1..=N`: flattening, exact power sums,
//! nonnegativity on integer points and the Ak reduction with integer gaps.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ak::{discrete_ak, WeightedSequence};
use crate::empirical::EmpiricalDistribution;
use crate::error::Result;
use crate::interval::Interval;
use crate::poly::{horner, Polynomial};
use crate::projection::AkCut;
use crate::roots::{approx_real_roots, canonical};

/// The integers `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteInterval {
    pub lo: i64,
    pub hi: i64,
}

impl DiscreteInterval {
    pub fn new(lo: i64, hi: i64) -> Self {
        DiscreteInterval { lo, hi }
    }

    pub fn len(&self) -> i64 {
        (self.hi - self.lo + 1).max(0)
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn as_interval(&self) -> Interval {
        Interval::closed(self.lo as f64, self.hi as f64)
    }

    pub fn join(&self, next: &DiscreteInterval) -> DiscreteInterval {
        DiscreteInterval::new(self.lo, next.hi)
    }

    /// Affine map onto `[-1, 1]`: `z = (2i - lo - hi) / max(hi - lo, 1)`.
    pub fn to_canonical(&self, i: i64) -> f64 {
        (2 * i - self.lo - self.hi) as f64 / self.width()
    }

    fn width(&self) -> f64 {
        (self.hi - self.lo).max(1) as f64
    }
}

/// Per-point mass of the flattening of `f` over `j`.
pub fn discrete_flatten(f: &EmpiricalDistribution, j: DiscreteInterval) -> f64 {
    if j.is_empty() {
        return 0.0;
    }
    f.mass(&j.as_interval()) / j.len() as f64
}

/// `sum_{i=1}^{n} i^m` for `m = 0..=j`, from the telescoping identity
/// `(n+1)^(j+1) - 1 = sum_m C(j+1, m) S_m(n)`.
fn power_sums_from_one(n: u64, j: u32) -> Vec<BigInt> {
    let n_big = BigInt::from(n);
    let mut out: Vec<BigInt> = Vec::with_capacity(j as usize + 1);
    for m in 0..=j {
        let mut acc = num_traits::pow(&n_big + 1u32, m as usize + 1) - BigInt::one();
        let mut binom = BigInt::one();
        for (t, s) in out.iter().enumerate() {
            // binom = C(m + 1, t)
            acc -= &binom * s;
            binom = binom * BigInt::from(m + 1 - t as u32) / BigInt::from(t as u32 + 1);
        }
        out.push(acc / BigInt::from(m + 1));
    }
    out
}

/// Exact `sum_{i=lo}^{hi} i^j`; zero when `lo > hi`.
pub fn power_sum_exact(lo: i64, hi: i64, j: u32) -> BigInt {
    if lo > hi {
        return BigInt::zero();
    }
    let pos = |a: i64, b: i64| -> BigInt {
        // sum over a..=b with 1 <= a <= b
        let upper = &power_sums_from_one(b as u64, j)[j as usize];
        let lower = &power_sums_from_one(a as u64 - 1, j)[j as usize];
        upper - lower
    };
    let mut total = BigInt::zero();
    if hi >= 1 {
        total += pos(lo.max(1), hi);
    }
    if lo <= 0 && hi >= 0 && j == 0 {
        total += 1;
    }
    if lo <= -1 {
        let s = pos((-hi).max(1), -lo);
        total += if j.is_multiple_of(2) { s } else { -s };
    }
    total
}

pub fn prefix_power_sum(lo: i64, hi: i64, j: u32) -> f64 {
    power_sum_exact(lo, hi, j).to_f64().unwrap_or(f64::INFINITY)
}

/// Moments `sum_{i=a}^{b} z_i^t` for `t < dim`, where `z` is the canonical
/// coordinate of `j`.
fn canonical_moments(j: DiscreteInterval, a: i64, b: i64, dim: usize) -> Vec<f64> {
    if a > b {
        return vec![0.0; dim];
    }
    let s = BigInt::from(j.lo + j.hi);
    let w = j.width();
    let raw: Vec<BigInt> = (0..dim as u32).map(|t| power_sum_exact(a, b, t)).collect();
    (0..dim)
        .map(|t| {
            // sum_i (2i - s)^t expanded binomially
            let mut acc = BigInt::zero();
            let mut binom = BigInt::one();
            for u in 0..=t {
                let term = &binom
                    * num_traits::pow(BigInt::from(2), u)
                    * num_traits::pow(-&s, t - u)
                    * &raw[u];
                acc += term;
                binom = binom * BigInt::from(t - u) / BigInt::from(u + 1);
            }
            acc.to_f64().unwrap_or(f64::INFINITY) / w.powi(t as i32)
        })
        .collect()
}

/// Nonnegativity of `p` on the integers of `j`, with `p` in the original
/// integer coordinate. Returns the most negative point found.
pub fn discrete_test_nonneg(p: &Polynomial, j: DiscreteInterval) -> Option<i64> {
    let w = j.width() / 2.0;
    let c = 0.5 * (j.lo + j.hi) as f64;
    let q = p.compose_affine(w, c);
    test_nonneg_canonical(&q, j)
}

/// Same test for coefficients in the canonical coordinate of `j`.
pub fn test_nonneg_canonical(q: &[f64], j: DiscreteInterval) -> Option<i64> {
    if j.is_empty() {
        return None;
    }
    let half = j.width() / 2.0;
    // precision 1/4 in the integer coordinate
    let roots = approx_real_roots(&canonical(q), 0.0, 0.25 / half);
    let mut best: Option<(i64, f64)> = None;
    let mut consider = |i: i64| {
        if i < j.lo || i > j.hi {
            return;
        }
        let v = horner(q, j.to_canonical(i));
        if v < 0.0 && best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    };
    consider(j.lo);
    consider(j.hi);
    for z in roots.approx_roots {
        let x = (0.5 * (j.lo + j.hi) as f64 + z * half).round() as i64;
        for i in x - 3..=x + 3 {
            consider(i);
        }
    }
    best.map(|(i, _)| i)
}

/// Integer samples inside one interval, prepared for the Ak reduction in
/// the canonical coordinate with unit mass.
#[derive(Clone, Debug)]
pub struct DiscreteData {
    pub interval: DiscreteInterval,
    positions: Vec<i64>,
    masses: Vec<f64>,
    gap_rows: Vec<Vec<f64>>,
    dim: usize,
}

impl DiscreteData {
    pub fn new(f: &EmpiricalDistribution, j: DiscreteInterval, dim: usize) -> Self {
        let r = f.atom_range(&j.as_interval());
        let total: usize = r.clone().map(|i| f.multiplicity(i)).sum();
        let positions: Vec<i64> = f.positions()[r.clone()].iter().map(|&x| x as i64).collect();
        let masses = r
            .map(|i| f.multiplicity(i) as f64 / total.max(1) as f64)
            .collect();
        let mut gap_rows = Vec::with_capacity(positions.len() + 1);
        let mut prev = j.lo - 1;
        for &x in &positions {
            gap_rows.push(canonical_moments(j, prev + 1, x - 1, dim));
            prev = x;
        }
        gap_rows.push(canonical_moments(j, prev + 1, j.hi, dim));
        DiscreteData {
            interval: j,
            positions,
            masses,
            gap_rows,
            dim,
        }
    }

    pub fn point(&self, i: i64) -> f64 {
        self.interval.to_canonical(i)
    }

    pub fn test_nonneg(&self, c: &[f64]) -> Option<i64> {
        test_nonneg_canonical(c, self.interval)
    }

    fn atom_row(&self, i: usize) -> Vec<f64> {
        let z = self.point(self.positions[i]);
        let mut pw = 1.0;
        (0..self.dim)
            .map(|_| {
                let v = pw;
                pw *= z;
                v
            })
            .collect()
    }

    fn row(&self, idx: usize) -> Vec<f64> {
        if idx.is_multiple_of(2) {
            self.gap_rows[idx / 2].clone()
        } else {
            self.atom_row(idx / 2)
        }
    }

    /// Entries alternate gap sums and atom values minus atom masses.
    pub fn sequence(&self, c: &[f64]) -> Vec<f64> {
        let dot = |r: &[f64]| r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
        let mut out = Vec::with_capacity(2 * self.positions.len() + 1);
        for i in 0..self.positions.len() {
            out.push(dot(&self.gap_rows[i]));
            out.push(horner(c, self.point(self.positions[i])) - self.masses[i]);
        }
        out.push(dot(self.gap_rows.last().unwrap()));
        out
    }

    pub fn ak_cut(&self, c: &[f64], k: usize) -> Result<AkCut> {
        let seq = WeightedSequence::new(self.sequence(c))?;
        let sel = discrete_ak(&seq, k)?;
        let mut normal = vec![0.0; self.dim];
        let mut mass_term = 0.0;
        for &(a, b) in &sel.intervals {
            let sign = seq.weights[a..=b].iter().sum::<f64>().signum();
            for idx in a..=b {
                for (n, v) in normal.iter_mut().zip(self.row(idx)) {
                    *n += sign * v;
                }
                if idx % 2 == 1 {
                    mass_term += sign * self.masses[idx / 2];
                }
            }
        }
        Ok(AkCut {
            value: sel.value,
            normal,
            mass_term,
        })
    }

    pub fn total_form(&self, dim: usize) -> Vec<f64> {
        canonical_moments(self.interval, self.interval.lo, self.interval.hi, dim)
    }
}

/// Integer gaps and singletons induced by the samples on `1..=n_max`.
pub fn discrete_initial_partition(f: &EmpiricalDistribution, n_max: i64) -> Vec<DiscreteInterval> {
    let mut out = Vec::new();
    let mut prev = 0i64;
    for &x in f.positions() {
        let x = x as i64;
        if x > prev + 1 {
            out.push(DiscreteInterval::new(prev + 1, x - 1));
        }
        out.push(DiscreteInterval::new(x, x));
        prev = x;
    }
    if n_max > prev {
        out.push(DiscreteInterval::new(prev + 1, n_max));
    }
    out
}
