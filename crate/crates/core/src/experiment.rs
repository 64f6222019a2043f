//! Synthetic mixtures, seeded sampling, L1 evaluation and estimation sweeps.

use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF};

use crate::empirical::build_empirical;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::merging::{
    construct_histogram, general_merging, MergeConfig, PieceFunction, PiecewiseHypothesis,
    PolynomialOracles, Solver,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    Beta {
        a: f64,
        b: f64,
    },
    /// Shape and rate.
    Gamma {
        shape: f64,
        rate: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    /// Linear interpolation of `ys` at the knots `xs`, zero outside;
    /// rescaled to unit mass.
    PiecewiseLinear {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    #[serde(flatten)]
    pub family: Family,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureDensity {
    components: Vec<Component>,
}

impl<'de> Deserialize<'de> for MixtureDensity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            components: Vec<Component>,
        }
        let raw = Raw::deserialize(d)?;
        MixtureDensity::new(raw.components).map_err(serde::de::Error::custom)
    }
}

fn pwl_area(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
        .sum()
}

fn bad(msg: &str) -> Error {
    Error::Config(msg.to_string())
}

impl Family {
    fn validate(&mut self) -> Result<()> {
        match self {
            Family::Gaussian { variance, .. } if !(*variance > 0.0) => {
                Err(bad("gaussian variance must be positive"))
            }
            Family::Beta { a, b } if !(*a > 0.0 && *b > 0.0) => {
                Err(bad("beta shapes must be positive"))
            }
            Family::Gamma { shape, rate } if !(*shape > 0.0 && *rate > 0.0) => {
                Err(bad("gamma shape and rate must be positive"))
            }
            Family::Uniform { low, high } if !(*low < *high) => {
                Err(bad("uniform needs low < high"))
            }
            Family::PiecewiseLinear { xs, ys } => {
                if xs.len() < 2 || xs.len() != ys.len() {
                    return Err(bad("piecewise linear needs matching knots and values"));
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) || ys.iter().any(|y| !(*y >= 0.0)) {
                    return Err(bad(
                        "piecewise linear needs increasing knots and nonnegative values",
                    ));
                }
                let area = pwl_area(xs, ys);
                if !(area > 0.0) {
                    return Err(bad("piecewise linear density has zero area"));
                }
                ys.iter_mut().for_each(|y| *y /= area);
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Family::Gaussian { mean, variance } => {
                statrs::distribution::Normal::new(*mean, variance.sqrt())
                    .unwrap()
                    .pdf(x)
            }
            Family::Beta { a, b } => {
                if !(0.0..=1.0).contains(&x) {
                    0.0
                } else {
                    statrs::distribution::Beta::new(*a, *b).unwrap().pdf(x)
                }
            }
            Family::Gamma { shape, rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    statrs::distribution::Gamma::new(*shape, *rate)
                        .unwrap()
                        .pdf(x)
                }
            }
            Family::Uniform { low, high } => {
                if x >= *low && x <= *high {
                    1.0 / (high - low)
                } else {
                    0.0
                }
            }
            Family::PiecewiseLinear { xs, ys } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&k| k <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                ys[i - 1] + t * (ys[i] - ys[i - 1])
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Family::Gaussian { mean, variance } => {
                statrs::distribution::Normal::new(*mean, variance.sqrt())
                    .unwrap()
                    .cdf(x)
            }
            Family::Beta { a, b } => statrs::distribution::Beta::new(*a, *b)
                .unwrap()
                .cdf(x.clamp(0.0, 1.0)),
            Family::Gamma { shape, rate } => statrs::distribution::Gamma::new(*shape, *rate)
                .unwrap()
                .cdf(x.max(0.0)),
            Family::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            Family::PiecewiseLinear { xs, ys } => {
                let mut acc = 0.0;
                for i in 1..xs.len() {
                    if x <= xs[i - 1] {
                        break;
                    }
                    let r = x.min(xs[i]);
                    acc += 0.5 * (ys[i - 1] + self.pdf(r)) * (r - xs[i - 1]);
                }
                acc
            }
        }
    }

    /// Points where the pdf is not smooth.
    fn kinks(&self) -> Vec<f64> {
        match self {
            Family::Gaussian { .. } => vec![],
            Family::Beta { .. } => vec![0.0, 1.0],
            Family::Gamma { .. } => vec![0.0],
            Family::Uniform { low, high } => vec![*low, *high],
            Family::PiecewiseLinear { xs, .. } => xs.clone(),
        }
    }

    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Family::Gaussian { mean, variance } => rand_distr::Normal::new(*mean, variance.sqrt())
                .unwrap()
                .sample(rng),
            Family::Beta { a, b } => rand_distr::Beta::new(*a, *b).unwrap().sample(rng),
            Family::Gamma { shape, rate } => rand_distr::Gamma::new(*shape, 1.0 / rate)
                .unwrap()
                .sample(rng),
            Family::Uniform { low, high } => rng.random_range(*low..*high),
            Family::PiecewiseLinear { xs, ys } => {
                let mut u = rng.random::<f64>();
                for i in 1..xs.len() {
                    let (w, y0, y1) = (xs[i] - xs[i - 1], ys[i - 1], ys[i]);
                    let m = 0.5 * (y0 + y1) * w;
                    if u < m || i == xs.len() - 1 {
                        // invert y0 s + (y1 - y0) s^2 / (2 w) = u on [0, w]
                        let a = 0.5 * (y1 - y0) / w;
                        let s = if a.abs() < 1e-14 * y0.max(1e-300) {
                            u / y0
                        } else {
                            let disc = (y0 * y0 + 4.0 * a * u.min(m)).max(0.0);
                            2.0 * u.min(m) / (y0 + disc.sqrt())
                        };
                        return xs[i - 1] + s.clamp(0.0, w);
                    }
                    u -= m;
                }
                unreachable!()
            }
        }
    }
}

impl MixtureDensity {
    pub fn new(mut components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(bad("mixture needs at least one component"));
        }
        for c in &mut components {
            if !(c.weight >= 0.0) {
                return Err(bad("mixture weights must be nonnegative"));
            }
            c.family.validate()?;
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(bad("mixture weights must sum to 1"));
        }
        Ok(MixtureDensity { components })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `0.5 N(-0.6, 0.09) + 0.5 N(0.5, 0.04)`.
    pub fn gmm() -> Self {
        MixtureDensity::new(vec![
            Component {
                weight: 0.5,
                family: Family::Gaussian {
                    mean: -0.6,
                    variance: 0.09,
                },
            },
            Component {
                weight: 0.5,
                family: Family::Gaussian {
                    mean: 0.5,
                    variance: 0.04,
                },
            },
        ])
        .unwrap()
    }

    /// `0.6 Beta(2, 10) + 0.4 Beta(8, 3)`.
    pub fn beta_mixture() -> Self {
        MixtureDensity::new(vec![
            Component {
                weight: 0.6,
                family: Family::Beta { a: 2.0, b: 10.0 },
            },
            Component {
                weight: 0.4,
                family: Family::Beta { a: 8.0, b: 3.0 },
            },
        ])
        .unwrap()
    }

    /// `0.4 Gamma(3, rate 2) + 0.6 Gamma(12, rate 2)`.
    pub fn gamma_mixture() -> Self {
        MixtureDensity::new(vec![
            Component {
                weight: 0.4,
                family: Family::Gamma {
                    shape: 3.0,
                    rate: 2.0,
                },
            },
            Component {
                weight: 0.6,
                family: Family::Gamma {
                    shape: 12.0,
                    rate: 2.0,
                },
            },
        ])
        .unwrap()
    }

    pub fn uniform(low: f64, high: f64) -> Self {
        MixtureDensity::new(vec![Component {
            weight: 1.0,
            family: Family::Uniform { low, high },
        }])
        .unwrap()
    }

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "gmm" | "gaussian" => Ok(Self::gmm()),
            "beta" => Ok(Self::beta_mixture()),
            "gamma" => Ok(Self::gamma_mixture()),
            "uniform" => Ok(Self::uniform(0.0, 1.0)),
            _ => Err(Error::Config(format!("unknown density {name:?}"))),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| c.weight * c.family.pdf(x))
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| c.weight * c.family.cdf(x))
            .sum()
    }

    fn kinks(&self) -> Vec<f64> {
        self.components
            .iter()
            .flat_map(|c| c.family.kinks())
            .collect()
    }

    /// `n` draws; the stream is fixed by `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cum: Vec<f64> = self
            .components
            .iter()
            .scan(0.0, |s, c| {
                *s += c.weight;
                Some(*s)
            })
            .collect();
        (0..n)
            .map(|_| {
                let u = rng.random::<f64>() * cum[cum.len() - 1];
                let i = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
                self.components[i].family.sample(&mut rng)
            })
            .collect()
    }
}

fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-13 * (1.0 + a.abs()) {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
    )
}

/// Adaptive Simpson integral of `f` over `[a, b]` to absolute accuracy `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    // a fixed first split keeps narrow features from hiding between nodes
    let parts = 16;
    let h = (b - a) / parts as f64;
    let mut total = 0.0;
    for i in 0..parts {
        let (x0, x1) = (
            a + h * i as f64,
            if i + 1 == parts {
                b
            } else {
                a + h * (i + 1) as f64
            },
        );
        let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += simpson_rec(&f, x0, x1, f0, fm, f1, whole, tol / parts as f64, 40)
            .ok_or(Error::Quadrature(x0, x1))?;
    }
    Ok(total)
}

/// `||h - f||_1` for a hypothesis with atoms: the density part is
/// integrated between the joint breakpoints, mass of `f` outside the
/// hypothesis domain counts in full, and so does the mass of every atom.
pub fn l1_error(h: &PiecewiseHypothesis, density: &MixtureDensity) -> Result<f64> {
    let (lo, hi) = (h.domain.left, h.domain.right);
    let mut err = density.cdf(lo) + (1.0 - density.cdf(hi)).max(0.0);
    err += h.atoms().map(|(_, m)| m.abs()).sum::<f64>();
    let kinks = density.kinks();
    // relative accuracy 1e-4 on an error that is at least of order 1e-3
    let tol = 1e-7 / (h.len().max(1) as f64);
    for p in &h.pieces {
        let (a, b) = (p.interval.left, p.interval.right);
        if b <= a {
            continue;
        }
        let mut cuts: Vec<f64> = kinks.iter().copied().filter(|&x| x > a && x < b).collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        let g = |x: f64| match &p.func {
            PieceFunction::Poly(q) => (q.eval(x) - density.pdf(x)).abs(),
            PieceFunction::Atom(_) => density.pdf(x),
        };
        for w in cuts.windows(2) {
            err += integrate(g, w[0], w[1], tol)?;
        }
    }
    Ok(err)
}

/// How one trial turns samples into a hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSpec {
    pub pieces: usize,
    pub degree: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Accuracy fed to the oracles; defaults to the value the sample size
    /// supports.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_solver")]
    pub solver: Solver,
}

fn default_alpha() -> f64 {
    4.0
}

fn default_solver() -> Solver {
    Solver::CuttingLp
}

impl FitSpec {
    pub fn histogram() -> Self {
        FitSpec {
            pieces: 80,
            degree: 0,
            alpha: 4.0,
            epsilon: None,
            solver: Solver::CuttingLp,
        }
    }

    pub fn linear() -> Self {
        FitSpec {
            pieces: 40,
            degree: 1,
            alpha: 4.0,
            epsilon: None,
            solver: Solver::CuttingLp,
        }
    }

    pub fn config(&self, n: usize) -> MergeConfig {
        let mut cfg = MergeConfig::for_pieces(self.pieces, self.alpha, self.degree);
        cfg.epsilon = self
            .epsilon
            .unwrap_or_else(|| cfg.epsilon_for(n.max(1)).min(0.5));
        cfg
    }
}

/// Fits `samples` on their sampled range. Returns the hypothesis and the
/// time spent merging in milliseconds, excluding sorting.
pub fn fit_samples(samples: &[f64], spec: &FitSpec) -> Result<(PiecewiseHypothesis, f64)> {
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| {
            (l.min(x), h.max(x))
        });
    let f = build_empirical(samples, Interval::closed(lo, hi))?;
    let cfg = spec.config(samples.len());
    let start = Instant::now();
    let h = if spec.degree == 0 {
        construct_histogram(&f, &cfg)?
    } else {
        general_merging(&f, &cfg, &PolynomialOracles::new(spec.degree, spec.solver))?
    };
    Ok((h, start.elapsed().as_secs_f64() * 1e3))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub seed: u64,
    pub pieces: usize,
    pub degree: usize,
    pub fit_ms: f64,
    pub l1_error: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DensitySpec {
    Named(String),
    Mixture(MixtureDensity),
}

impl DensitySpec {
    pub fn resolve(&self) -> Result<MixtureDensity> {
        match self {
            DensitySpec::Named(s) => MixtureDensity::named(s),
            DensitySpec::Mixture(m) => Ok(m.clone()),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct SweepConfig {
    pub density: DensitySpec,
    #[serde(flatten)]
    pub fit: FitSpec,
    pub grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Threads used for trials. More than one makes `fit_ms` compete for
    /// cores.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

fn default_trials() -> u64 {
    20
}

impl SweepConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SweepConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        if cfg.grid.is_empty() || cfg.grid.contains(&0) || cfg.trials == 0 || cfg.workers == 0 {
            return Err(bad("grid sizes, trial count and workers must be positive"));
        }
        cfg.fit.config(1).validate()?;
        cfg.density.resolve()?;
        Ok(cfg)
    }
}

/// Samples, fits and scores every `(n, seed)` pair. Rows come out in grid
/// then seed order whatever the worker count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, |_| {})
}

pub fn run_sweep_with(cfg: &SweepConfig, mut on_row: impl FnMut(&SweepRow)) -> Result<SweepResult> {
    let density = cfg.density.resolve()?;
    let trial = |n: usize, seed: u64| -> Result<SweepRow> {
        let samples = density.sample(n, seed);
        let (h, fit_ms) = fit_samples(&samples, &cfg.fit)?;
        Ok(SweepRow {
            n,
            seed,
            pieces: h.len(),
            degree: cfg.fit.degree,
            fit_ms,
            l1_error: l1_error(&h, &density)?,
        })
    };
    let jobs: Vec<(usize, u64)> = cfg
        .grid
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |r| (n, cfg.seed + r)))
        .collect();
    let mut rows = Vec::with_capacity(jobs.len());
    if cfg.workers <= 1 {
        for (n, seed) in jobs {
            let row = trial(n, seed)?;
            on_row(&row);
            rows.push(row);
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        let (tx, rx) = std::sync::mpsc::channel();
        let mut pending: Vec<Option<SweepRow>> = vec![None; jobs.len()];
        let mut next = 0;
        std::thread::scope(|scope| -> Result<()> {
            let jobs = &jobs;
            let trial = &trial;
            let pool = &pool;
            scope.spawn(move || {
                pool.install(|| {
                    jobs.par_iter()
                        .enumerate()
                        .for_each_with(tx, |tx, (i, &(n, seed))| {
                            let _ = tx.send((i, trial(n, seed)));
                        })
                })
            });
            for (i, row) in rx {
                pending[i] = Some(row?);
                while next < pending.len() {
                    let Some(row) = pending[next].take() else {
                        break;
                    };
                    on_row(&row);
                    rows.push(row);
                    next += 1;
                }
            }
            Ok(())
        })?;
    }
    Ok(SweepResult { rows })
}

impl SweepResult {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// `(n, median l1, median fit_ms)` per grid point, in grid order.
    pub fn medians(&self) -> Vec<(usize, f64, f64)> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let pick = |f: fn(&SweepRow) -> f64| {
                    median(self.rows.iter().filter(|r| r.n == n).map(f).collect())
                };
                (n, pick(|r| r.l1_error), pick(|r| r.fit_ms))
            })
            .collect()
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merging::HypothesisPiece;
    use crate::poly::Polynomial;

    fn hyp(pieces: Vec<(f64, f64, Vec<f64>)>) -> PiecewiseHypothesis {
        let domain = Interval::closed(pieces[0].0, pieces[pieces.len() - 1].1);
        PiecewiseHypothesis {
            domain,
            degree: 1,
            pieces: pieces
                .into_iter()
                .map(|(a, b, c)| {
                    let iv = Interval::closed(a, b);
                    HypothesisPiece {
                        interval: iv,
                        func: PieceFunction::Poly(Polynomial::new(c, iv)),
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn mixtures_integrate_to_one() {
        for m in [
            MixtureDensity::gmm(),
            MixtureDensity::beta_mixture(),
            MixtureDensity::gamma_mixture(),
        ] {
            let (a, b) = match m.components()[0].family {
                Family::Gaussian { .. } => (-4.0, 4.0),
                Family::Beta { .. } => (0.0, 1.0),
                _ => (0.0, 40.0),
            };
            let total = integrate(|x| m.pdf(x), a, b, 1e-9).unwrap();
            assert!((total - 1.0).abs() < 1e-6, "{total}");
            assert!((m.cdf(b) - m.cdf(a) - total).abs() < 1e-6);
        }
    }

    #[test]
    fn uniform_sample_mean() {
        let xs = MixtureDensity::uniform(0.0, 1.0).sample(10_000, 3);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn degenerate_weights_and_determinism() {
        let m = MixtureDensity::new(vec![
            Component {
                weight: 1.0,
                family: Family::Uniform {
                    low: 2.0,
                    high: 3.0,
                },
            },
            Component {
                weight: 0.0,
                family: Family::Uniform {
                    low: 10.0,
                    high: 11.0,
                },
            },
        ])
        .unwrap();
        assert!(m.sample(1000, 1).iter().all(|x| (2.0..3.0).contains(x)));
        let g = MixtureDensity::gmm();
        assert_eq!(g.sample(500, 9), g.sample(500, 9));
        assert_ne!(g.sample(500, 9), g.sample(500, 10));
    }

    #[test]
    fn invalid_parameters() {
        let one = |family| {
            MixtureDensity::new(vec![Component {
                weight: 1.0,
                family,
            }])
        };
        assert!(one(Family::Gaussian {
            mean: 0.0,
            variance: 0.0
        })
        .is_err());
        assert!(one(Family::Uniform {
            low: 1.0,
            high: 1.0
        })
        .is_err());
        assert!(one(Family::PiecewiseLinear {
            xs: vec![0.0, 1.0],
            ys: vec![0.0, 0.0]
        })
        .is_err());
        assert!(MixtureDensity::new(vec![Component {
            weight: 0.5,
            family: Family::Beta { a: 1.0, b: 1.0 }
        }])
        .is_err());
    }

    #[test]
    fn piecewise_linear_sampling_matches_cdf() {
        let m = MixtureDensity::new(vec![Component {
            weight: 1.0,
            family: Family::PiecewiseLinear {
                xs: vec![0.0, 0.5, 2.0],
                ys: vec![0.0, 3.0, 1.0],
            },
        }])
        .unwrap();
        assert!((m.cdf(2.0) - 1.0).abs() < 1e-12);
        let xs = m.sample(100_000, 4);
        for q in [0.25, 0.5, 1.0, 1.5] {
            let frac = xs.iter().filter(|&&x| x <= q).count() as f64 / xs.len() as f64;
            assert!((frac - m.cdf(q)).abs() < 0.01, "{q} {frac} {}", m.cdf(q));
        }
    }

    #[test]
    fn l1_examples() {
        // density 2x on [0, 1]
        let ramp = MixtureDensity::new(vec![Component {
            weight: 1.0,
            family: Family::PiecewiseLinear {
                xs: vec![0.0, 1.0],
                ys: vec![0.0, 2.0],
            },
        }])
        .unwrap();
        assert!(
            l1_error(
                &hyp(vec![(0.0, 0.5, vec![0.0, 2.0]), (0.5, 1.0, vec![0.0, 2.0])]),
                &ramp
            )
            .unwrap()
                < 1e-6
        );
        assert!((l1_error(&hyp(vec![(0.0, 1.0, vec![0.0])]), &ramp).unwrap() - 1.0).abs() < 1e-6);
        let half = MixtureDensity::uniform(0.0, 0.5);
        assert!((l1_error(&hyp(vec![(0.0, 1.0, vec![1.0])]), &half).unwrap() - 1.0).abs() < 1e-6);
        // mass outside the hypothesis domain counts
        let uni = MixtureDensity::uniform(0.0, 1.0);
        assert!((l1_error(&hyp(vec![(0.0, 0.5, vec![2.0])]), &uni).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn l1_of_uniform_fit_to_gaussian_by_grid() {
        let g = MixtureDensity::gmm();
        let h = hyp(vec![(-1.0, 1.0, vec![0.5])]);
        let m = 200_000;
        let grid: f64 = (0..m)
            .map(|i| {
                let x = -1.0 + 2.0 * (i as f64 + 0.5) / m as f64;
                (0.5 - g.pdf(x)).abs() * 2.0 / m as f64
            })
            .sum::<f64>()
            + g.cdf(-1.0)
            + 1.0
            - g.cdf(1.0);
        assert!((l1_error(&h, &g).unwrap() - grid).abs() < 1e-6);
    }

    #[test]
    fn config_parsing() {
        let cfg = SweepConfig::parse(
            "density = \"gmm\"\npieces = 80\ndegree = 0\ngrid = [1000, 2000]\ntrials = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.fit.alpha, 4.0);
        assert_eq!(cfg.grid, vec![1000, 2000]);
        let json = r#"{"density": {"components": [{"weight": 1, "family": "uniform", "low": 0, "high": 1}]},
                       "pieces": 40, "degree": 1, "grid": [500], "trials": 1}"#;
        assert!(SweepConfig::parse(json).is_ok());
        assert!(
            SweepConfig::parse("density = \"nope\"\npieces = 8\ndegree = 0\ngrid = [10]").is_err()
        );
        assert!(SweepConfig::parse(
            "density = \"gmm\"\npieces = 8\ndegree = 0\ngrid = [10]\nalpha = 1.5"
        )
        .is_err());
        assert!(SweepConfig::parse("density = ").is_err());
    }

    #[test]
    fn sweep_is_reproducible() {
        let cfg = SweepConfig::parse(
            "density = \"beta\"\npieces = 16\ndegree = 0\ngrid = [2000, 4000]\ntrials = 3\n",
        )
        .unwrap();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.rows.len(), 6);
        let strip = |r: &SweepResult| {
            r.rows
                .iter()
                .map(|r| (r.n, r.seed, r.pieces, r.l1_error.to_bits()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert!(a
            .to_csv()
            .starts_with("n,seed,pieces,degree,fit_ms,l1_error\n"));
        assert!(a
            .rows
            .iter()
            .all(|r| r.pieces <= 16 && r.l1_error > 0.0 && r.l1_error < 1.0));

        let mut par = cfg.clone();
        par.workers = 3;
        let mut seen = Vec::new();
        let c = run_sweep_with(&par, |r| seen.push((r.n, r.seed))).unwrap();
        assert_eq!(strip(&a), strip(&c));
        assert_eq!(
            seen,
            a.rows.iter().map(|r| (r.n, r.seed)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1e4, 1e5, 1e6]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n.powf(-0.5)))
            .collect();
        assert!((log_log_slope(&pts) + 0.5).abs() < 1e-12);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
    }
}
