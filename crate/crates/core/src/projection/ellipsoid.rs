//! Deep-cut ellipsoid method as a canonical separation-oracle solver: the
//! first point the oracle accepts is returned unchanged.

use super::SepResult;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Point(Vec<f64>),
    Infeasible,
}

/// Worst-case number of central cuts needed to shrink a ball of radius
/// `2^l` in dimension `n` below the volume of a ball of radius `2^-l`.
pub fn iteration_cap(n: usize, l: f64) -> usize {
    let n = n as f64;
    (2.0 * (n + 1.0) * n * 2.0 * l * std::f64::consts::LN_2).ceil() as usize + 100
}

/// Searches the ball of radius `2^l` around the origin in dimension `dim`.
///
/// Returns `Infeasible` once the remaining ellipsoid is too small to contain
/// a ball of radius `2^-l`, or as soon as a cut leaves nothing of it.
pub fn cutting_plane_solve(
    oracle: &mut dyn FnMut(&[f64]) -> Result<SepResult>,
    dim: usize,
    l: f64,
) -> Result<SolveOutcome> {
    if dim == 1 {
        return bisect(oracle, l);
    }
    let n = dim as f64;
    let r2 = 4f64.powf(l);
    let mut c = vec![0.0; dim];
    let mut p: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { r2 } else { 0.0 }).collect())
        .collect();
    // log det of P, compared against the ball of radius 2^-l
    let mut logdet = n * r2.ln();
    let floor = -2.0 * n * l * std::f64::consts::LN_2;
    let cap = iteration_cap(dim, l);
    for _ in 0..cap {
        let h = match oracle(&c)? {
            SepResult::Yes => return Ok(SolveOutcome::Point(c)),
            SepResult::Cut(h) => h,
        };
        let pa: Vec<f64> = (0..dim)
            .map(|i| (0..dim).map(|j| p[i][j] * h.normal[j]).sum())
            .collect();
        let g2: f64 = h.normal.iter().zip(&pa).map(|(a, b)| a * b).sum();
        if g2 <= 0.0 {
            return Ok(SolveOutcome::Infeasible);
        }
        let g = g2.sqrt();
        let at_c: f64 = h.normal.iter().zip(&c).map(|(a, b)| a * b).sum();
        let alpha = ((at_c - h.offset) / g).max(0.0);
        if alpha >= 1.0 {
            return Ok(SolveOutcome::Infeasible);
        }
        let step = (1.0 + n * alpha) / (n + 1.0);
        for i in 0..dim {
            c[i] -= step * pa[i] / g;
        }
        let scale = n * n * (1.0 - alpha * alpha) / (n * n - 1.0);
        let beta = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
        for i in 0..dim {
            for j in 0..dim {
                p[i][j] = scale * (p[i][j] - beta * pa[i] * pa[j] / g2);
            }
        }
        for i in 0..dim {
            for j in 0..i {
                let s = 0.5 * (p[i][j] + p[j][i]);
                p[i][j] = s;
                p[j][i] = s;
            }
        }
        logdet += n * scale.ln() + (1.0 - beta).ln();
        if logdet < floor {
            return Ok(SolveOutcome::Infeasible);
        }
    }
    Err(Error::IterationCap(cap))
}

/// One-dimensional case: the ellipsoid is an interval and each cut halves
/// it or better.
fn bisect(oracle: &mut dyn FnMut(&[f64]) -> Result<SepResult>, l: f64) -> Result<SolveOutcome> {
    let r = 2f64.powf(l);
    let (mut lo, mut hi) = (-r, r);
    let min_width = 2.0 * 2f64.powf(-l);
    let cap = iteration_cap(1, l);
    for _ in 0..cap {
        let c = 0.5 * (lo + hi);
        let h = match oracle(&[c])? {
            SepResult::Yes => return Ok(SolveOutcome::Point(vec![c])),
            SepResult::Cut(h) => h,
        };
        let a = h.normal[0];
        if a > 0.0 {
            hi = hi.min(h.offset / a);
        } else if a < 0.0 {
            lo = lo.max(h.offset / a);
        } else {
            return Ok(SolveOutcome::Infeasible);
        }
        if hi - lo < min_width {
            return Ok(SolveOutcome::Infeasible);
        }
    }
    Err(Error::IterationCap(cap))
}
