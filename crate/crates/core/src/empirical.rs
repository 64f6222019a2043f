//! Empirical distributions, the sample-induced initial partition, flattenings
//! and A1 errors.

use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Sorted samples on a closed domain, each carrying weight `1/n`.
///
/// Distinct sample positions are kept alongside prefix counts so that the
/// mass of any interval is two binary searches away.
#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    domain: Interval,
    positions: Vec<f64>,
    cum: Vec<usize>,
}

pub fn build_empirical(samples: &[f64], domain: Interval) -> Result<EmpiricalDistribution> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    for &x in &sorted {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        if !domain.contains(x) {
            return Err(Error::OutsideDomain {
                x,
                a: domain.left,
                b: domain.right,
            });
        }
    }
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalDistribution::from_sorted(sorted, domain))
}

/// Reads one decimal per line; blank lines are skipped.
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_samples(&text)
}

pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: {:?}", line_no + 1, line)))?;
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        out.push(x);
    }
    Ok(out)
}

impl EmpiricalDistribution {
    fn from_sorted(samples: Vec<f64>, domain: Interval) -> Self {
        let mut positions = Vec::new();
        let mut cum = vec![0usize];
        for (i, &x) in samples.iter().enumerate() {
            if positions.last() != Some(&x) {
                positions.push(x);
                cum.push(i + 1);
            } else {
                *cum.last_mut().unwrap() = i + 1;
            }
        }
        EmpiricalDistribution {
            samples,
            domain,
            positions,
            cum,
        }
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Distinct sample positions in increasing order.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Number of samples at the `i`-th distinct position.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.cum[i + 1] - self.cum[i]
    }

    /// Indices into [`positions`](Self::positions) of the atoms inside `j`.
    pub fn atom_range(&self, j: &Interval) -> Range<usize> {
        let p = &self.positions;
        let lo = if j.left_closed {
            p.partition_point(|&x| x < j.left)
        } else {
            p.partition_point(|&x| x <= j.left)
        };
        let hi = if j.right_closed {
            p.partition_point(|&x| x <= j.right)
        } else {
            p.partition_point(|&x| x < j.right)
        };
        lo..hi.max(lo)
    }

    pub fn count(&self, j: &Interval) -> usize {
        let r = self.atom_range(j);
        self.cum[r.end] - self.cum[r.start]
    }

    pub fn mass(&self, j: &Interval) -> f64 {
        self.count(j) as f64 / self.n() as f64
    }

    /// Samples inside `j`, in order.
    pub fn samples_in(&self, j: &Interval) -> &[f64] {
        let r = self.atom_range(j);
        &self.samples[self.cum[r.start]..self.cum[r.end]]
    }
}

/// Ordered, disjoint intervals covering a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalPartition {
    pub pieces: Vec<Interval>,
}

impl IntervalPartition {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}

/// Gaps and singletons induced by the samples. Repeated samples share one
/// singleton and empty gaps are left out.
pub fn initial_partition(f: &EmpiricalDistribution) -> IntervalPartition {
    let d = f.domain;
    let mut pieces = Vec::with_capacity(2 * f.positions.len() + 1);
    let mut prev: Option<f64> = None;
    for &x in &f.positions {
        let gap = match prev {
            None => Interval::new(d.left, x, d.left_closed, false),
            Some(p) => Interval::open(p, x),
        };
        if !gap.is_empty() {
            pieces.push(gap);
        }
        pieces.push(Interval::point(x));
        prev = Some(x);
    }
    let last = Interval::new(
        prev.unwrap_or(d.left),
        d.right,
        prev.is_none() && d.left_closed,
        d.right_closed,
    );
    if !last.is_empty() {
        pieces.push(last);
    }
    IntervalPartition { pieces }
}

/// Constant density with the same mass as `f` on `j`. For a singleton the
/// returned value is the atom mass itself.
pub fn flatten(f: &EmpiricalDistribution, j: &Interval) -> Result<f64> {
    if j.is_singleton() {
        return Ok(f.mass(j));
    }
    if j.length() <= 0.0 {
        return Err(Error::ZeroLength(j.left, j.right));
    }
    Ok(f.mass(j) / j.length())
}

/// A1 distance between `f` and its flattening on `j`.
///
/// Walks the cumulative discrepancy between the empirical mass and the
/// flattened mass; the answer is its range over all left and right limits.
pub fn a1_error(f: &EmpiricalDistribution, j: &Interval) -> f64 {
    if j.is_singleton() || j.is_empty() || j.length() <= 0.0 {
        return 0.0;
    }
    let r = f.atom_range(j);
    if r.is_empty() {
        return 0.0;
    }
    let n = f.n() as f64;
    let total = (f.cum[r.end] - f.cum[r.start]) as f64 / n;
    let c = total / j.length();
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut seen = 0usize;
    for i in r {
        let x = f.positions[i];
        let before = seen as f64 / n - c * (x - j.left);
        seen += f.multiplicity(i);
        let after = seen as f64 / n - c * (x - j.left);
        lo = lo.min(before);
        hi = hi.max(after);
    }
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(samples: &[f64]) -> EmpiricalDistribution {
        build_empirical(samples, Interval::closed(0.0, 1.0)).unwrap()
    }

    /// Max of |f(M) - flattened(M)| over subintervals with endpoints at
    /// samples or the ends of `j`, trying both inclusion flags.
    fn brute_a1(f: &EmpiricalDistribution, j: &Interval) -> f64 {
        let c = flatten(f, j).unwrap();
        let mut pts = vec![j.left, j.right];
        pts.extend(f.samples_in(j).iter().copied());
        let mut best = 0.0f64;
        for &a in &pts {
            for &b in &pts {
                if a > b {
                    continue;
                }
                for lc in [false, true] {
                    for rc in [false, true] {
                        let m = Interval::new(a, b, lc, rc);
                        if m.is_empty() {
                            continue;
                        }
                        let count = f.samples_in(j).iter().filter(|&&x| m.contains(x)).count();
                        let diff = count as f64 / f.n() as f64 - c * (b - a);
                        best = best.max(diff.abs());
                    }
                }
            }
        }
        best
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            build_empirical(&[], Interval::closed(0.0, 1.0)),
            Err(Error::EmptySamples)
        ));
        assert!(matches!(
            build_empirical(&[1.5], Interval::closed(0.0, 1.0)),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(matches!(
            build_empirical(&[f64::NAN], Interval::closed(0.0, 1.0)),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn masses() {
        let f = unit(&[0.5]);
        assert_eq!(f.n(), 1);
        assert_eq!(f.mass(&Interval::closed(0.0, 1.0)), 1.0);
        let f = unit(&[0.8, 0.2, 0.8]);
        assert!((f.mass(&Interval::closed(0.7, 1.0)) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.mass(&Interval::open(0.2, 0.8)), 0.0);
        assert_eq!(f.count(&Interval::new(0.2, 0.8, true, false)), 1);
    }

    #[test]
    fn uniform_mass_half() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let f = unit(&xs);
        // binomial std-dev is 0.005; 0.02 is four of them
        assert!((f.mass(&Interval::closed(0.0, 0.5)) - 0.5).abs() < 0.02);
    }

    #[test]
    fn partition_shapes() {
        let p = initial_partition(&unit(&[0.5]));
        assert_eq!(
            p.pieces,
            vec![
                Interval::new(0.0, 0.5, true, false),
                Interval::point(0.5),
                Interval::new(0.5, 1.0, false, true)
            ]
        );
        assert_eq!(initial_partition(&unit(&[0.3, 0.7])).len(), 5);
        assert_eq!(initial_partition(&unit(&[0.5, 0.5])).len(), 3);
        assert_eq!(initial_partition(&unit(&[0.0, 1.0])).len(), 3);
    }

    #[test]
    fn flatten_examples() {
        let f = build_empirical(&[0.1, 0.2, 0.7, 0.9], Interval::closed(-1.0, 1.0)).unwrap();
        assert_eq!(flatten(&f, &Interval::closed(0.0, 0.5)).unwrap(), 1.0);
        assert_eq!(flatten(&f, &Interval::closed(0.3, 0.5)).unwrap(), 0.0);
        assert_eq!(flatten(&f, &Interval::closed(-1.0, 1.0)).unwrap(), 0.5);
        assert!(flatten(&f, &Interval::open(0.3, 0.3)).is_err());
        assert_eq!(flatten(&f, &Interval::point(0.7)).unwrap(), 0.25);
    }

    #[test]
    fn a1_examples() {
        // values produced by brute_a1 and frozen
        let j = Interval::closed(0.0, 1.0);
        assert!((a1_error(&unit(&[0.5]), &j) - 1.0).abs() < 1e-15);
        assert!((a1_error(&unit(&[0.25, 0.75]), &j) - 0.5).abs() < 1e-15);
        assert!((brute_a1(&unit(&[0.5]), &j) - 1.0).abs() < 1e-15);
        assert!((brute_a1(&unit(&[0.25, 0.75]), &j) - 0.5).abs() < 1e-15);
        assert_eq!(a1_error(&unit(&[0.9]), &Interval::closed(0.0, 0.5)), 0.0);
    }

    #[test]
    fn partition_flattening_reproduces_mass() {
        let f = unit(&[0.1, 0.4, 0.4, 0.95]);
        for piece in initial_partition(&f).pieces {
            let c = flatten(&f, &piece).unwrap();
            let m = if piece.is_singleton() {
                c
            } else {
                c * piece.length()
            };
            assert_eq!(m, f.mass(&piece));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn a1_matches_brute_force(
                xs in proptest::collection::vec(0.0f64..1.0, 1..10),
                a in 0.0f64..0.5,
                w in 0.05f64..0.5,
                lc: bool,
                rc: bool,
            ) {
                let f = unit(&xs);
                let j = Interval::new(a, a + w, lc, rc);
                let fast = a1_error(&f, &j);
                prop_assert!((fast - brute_a1(&f, &j)).abs() < 1e-12);
                prop_assert!(fast <= 2.0 * f.mass(&j) + 1e-12);
            }

            #[test]
            fn partition_covers_domain(xs in proptest::collection::vec(0.0f64..=1.0, 1..30)) {
                let f = unit(&xs);
                let p = initial_partition(&f);
                prop_assert_eq!(p.pieces.first().unwrap().left, 0.0);
                prop_assert_eq!(p.pieces.last().unwrap().right, 1.0);
                for w in p.pieces.windows(2) {
                    prop_assert_eq!(w[0].right, w[1].left);
                    prop_assert!(w[0].right_closed != w[1].left_closed);
                }
                let total: usize = p.pieces.iter().map(|j| f.count(j)).sum();
                prop_assert_eq!(total, f.n());
            }
        }
    }
}
