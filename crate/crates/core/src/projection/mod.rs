//! Fitting a nonnegative polynomial that minimizes the Ak distance to an
//! empirical distribution on the canonical domain.
//!
//! The feasible set `{c : p_c >= 0, ||p_c - f||_Ak <= tau}` is convex and is
//! accessed only through a separation oracle. Two solvers consume it: the
//! ellipsoid method inside a binary search over `tau`, and an LP over the
//! accumulated cuts.

mod ellipsoid;
mod lp;
mod search;

pub use ellipsoid::{cutting_plane_solve, iteration_cap, SolveOutcome};
pub use lp::CutLp;
pub use search::{
    cut_lp_projection, find_polynomial, find_polynomial_observed, FeasibilityParams, FindReport,
};

use crate::ak::AkData;
use crate::discrete::DiscreteData;
use crate::empirical::EmpiricalDistribution;
use crate::error::Result;
use crate::interval::Interval;
use crate::roots::{canonical, test_nonneg, NonnegResult};

/// `normal . c' <= offset` for every feasible `c'`, while the query point
/// has `normal . c > offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SepResult {
    Yes,
    Cut(Hyperplane),
}

/// Linear form of the best Ak selection at a query point: the distance there
/// is `normal . c - mass_term`, and the same form bounds the distance of
/// every other `c'` from below.
#[derive(Clone, Debug)]
pub struct AkCut {
    pub value: f64,
    pub normal: Vec<f64>,
    pub mass_term: f64,
}

/// What the solvers need to know about the data: a nonnegativity test and
/// the Ak distance as a supporting linear form.
pub trait AkGeometry {
    /// Number of coefficients, `d + 1`.
    fn dim(&self) -> usize;
    /// A normal `y` with `y . c' <= 0` for all nonnegative `c'` and
    /// `y . c > mu/2`, if `c` fails the test.
    fn nonneg_cut(&self, c: &[f64], mu: f64) -> Option<Vec<f64>>;
    fn ak_cut(&self, c: &[f64], k: usize) -> Result<AkCut>;
    /// Integral (or sum) of `p_c` over the whole domain, as a linear form.
    fn total_form(&self) -> Vec<f64>;
}

/// Continuous data already moved onto `[-1, 1]` with unit mass.
pub struct Canonical {
    dim: usize,
    data: AkData,
}

impl Canonical {
    pub fn new(f: &EmpiricalDistribution, degree: usize) -> Self {
        Canonical {
            dim: degree + 1,
            data: AkData::new(f, &Interval::closed(-1.0, 1.0)),
        }
    }
}

fn moments(a: f64, b: f64, dim: usize) -> Vec<f64> {
    let (mut pa, mut pb) = (a, b);
    (0..dim)
        .map(|j| {
            let v = (pb - pa) / (j + 1) as f64;
            pa *= a;
            pb *= b;
            v
        })
        .collect()
}

impl AkGeometry for Canonical {
    fn dim(&self) -> usize {
        self.dim
    }

    fn nonneg_cut(&self, c: &[f64], mu: f64) -> Option<Vec<f64>> {
        match test_nonneg(&canonical(c), mu) {
            NonnegResult::Ok => None,
            NonnegResult::Witness(x) => {
                let mut y = Vec::with_capacity(self.dim);
                let mut pw = 1.0;
                for _ in 0..self.dim {
                    y.push(-pw);
                    pw *= x;
                }
                Some(y)
            }
        }
    }

    fn ak_cut(&self, c: &[f64], k: usize) -> Result<AkCut> {
        let res = self.data.solve(c, k)?;
        let mut normal = vec![0.0; self.dim];
        let mut mass_term = 0.0;
        for iv in &res.intervals {
            let m = moments(iv.interval.left, iv.interval.right, self.dim);
            for (n, v) in normal.iter_mut().zip(m) {
                *n += iv.sign * v;
            }
            mass_term += iv.sign * iv.mass;
        }
        Ok(AkCut {
            value: res.value,
            normal,
            mass_term,
        })
    }

    fn total_form(&self) -> Vec<f64> {
        moments(-1.0, 1.0, self.dim)
    }
}

/// Integer data on `[lo, hi]`, with polynomials evaluated at the points
/// `z = (2i - lo - hi) / (hi - lo)`.
pub struct DiscreteCanonical {
    dim: usize,
    data: DiscreteData,
}

impl DiscreteCanonical {
    pub fn new(data: DiscreteData, degree: usize) -> Self {
        DiscreteCanonical {
            dim: degree + 1,
            data,
        }
    }
}

impl AkGeometry for DiscreteCanonical {
    fn dim(&self) -> usize {
        self.dim
    }

    fn nonneg_cut(&self, c: &[f64], _mu: f64) -> Option<Vec<f64>> {
        let i = self.data.test_nonneg(c)?;
        let z = self.data.point(i);
        let mut pw = 1.0;
        Some(
            (0..self.dim)
                .map(|_| {
                    let v = -pw;
                    pw *= z;
                    v
                })
                .collect(),
        )
    }

    fn ak_cut(&self, c: &[f64], k: usize) -> Result<AkCut> {
        self.data.ak_cut(c, k)
    }

    fn total_form(&self) -> Vec<f64> {
        self.data.total_form(self.dim)
    }
}

/// Separation for the set of nonnegative `c` within Ak distance `tau`.
pub fn separate<G: AkGeometry + ?Sized>(
    geom: &G,
    c: &[f64],
    tau: f64,
    k: usize,
    mu: f64,
) -> Result<SepResult> {
    if let Some(normal) = geom.nonneg_cut(c, mu) {
        return Ok(SepResult::Cut(Hyperplane {
            normal,
            offset: 0.0,
        }));
    }
    ak_separate(geom, c, tau, k)
}

/// The Ak half of [`separate`]; assumes `p_c >= -mu`.
pub fn ak_separate<G: AkGeometry + ?Sized>(
    geom: &G,
    c: &[f64],
    tau: f64,
    k: usize,
) -> Result<SepResult> {
    let cut = geom.ak_cut(c, k)?;
    if cut.value <= tau {
        return Ok(SepResult::Yes);
    }
    Ok(SepResult::Cut(Hyperplane {
        normal: cut.normal,
        offset: tau + cut.mass_term,
    }))
}

/// Separation oracle on canonical continuous data.
pub fn sep_oracle(
    c: &[f64],
    tau: f64,
    k: usize,
    f: &EmpiricalDistribution,
    mu: f64,
) -> Result<SepResult> {
    separate(&Canonical::new(f, c.len() - 1), c, tau, k, mu)
}

pub fn ak_separator(
    c: &[f64],
    tau: f64,
    k: usize,
    f: &EmpiricalDistribution,
    _mu: f64,
) -> Result<SepResult> {
    ak_separate(&Canonical::new(f, c.len() - 1), c, tau, k)
}
