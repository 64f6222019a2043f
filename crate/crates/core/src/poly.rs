//! Polynomials in the monomial basis, affine rescaling to the canonical
//! domain, and the coefficient bound for nonnegative polynomials of bounded
//! mass.

use serde::{Deserialize, Serialize};

use crate::empirical::{build_empirical, EmpiricalDistribution};
use crate::error::{Error, Result};
use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    /// `c_0, ..., c_d`.
    pub coeffs: Vec<f64>,
    pub domain: Interval,
}

const TREE_THRESHOLD: usize = 512;

impl Polynomial {
    pub fn new(coeffs: Vec<f64>, domain: Interval) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Polynomial { coeffs, domain }
    }

    pub fn constant(c: f64, domain: Interval) -> Self {
        Self::new(vec![c], domain)
    }

    pub fn zero(domain: Interval) -> Self {
        Self::constant(0.0, domain)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    /// Values at every point of `xs`.
    pub fn multipoint_eval(&self, xs: &[f64]) -> Vec<f64> {
        if xs.len() > TREE_THRESHOLD && self.degree() > TREE_THRESHOLD {
            subproduct_eval(&self.coeffs, xs)
        } else {
            xs.iter().map(|&x| self.eval(x)).collect()
        }
    }

    pub fn derivative(&self) -> Polynomial {
        let c: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::new(c, self.domain)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Polynomial {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(0.0);
        c.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i + 1) as f64),
        );
        Polynomial::new(c, self.domain)
    }

    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let p = self.antiderivative();
        p.eval(b) - p.eval(a)
    }

    /// Coefficients of `x -> self(a*x + b)`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Vec<f64> {
        let d = self.coeffs.len();
        let mut out = vec![0.0; d];
        for &c in self.coeffs.iter().rev() {
            // out <- out * (a x + b) + c
            for i in (0..d).rev() {
                let prev = if i > 0 { out[i - 1] } else { 0.0 };
                out[i] = out[i] * b + prev * a;
            }
            out[0] += c;
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Maps original coordinates into the canonical ones: `z = scale*x + shift`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    /// The map sending `j` onto `[-1, 1]`.
    pub fn to_canonical(j: &Interval) -> Result<Self> {
        let w = j.length();
        if w <= 0.0 {
            return Err(Error::ZeroLength(j.left, j.right));
        }
        let scale = 2.0 / w;
        Ok(AffineMap {
            scale,
            shift: -1.0 - scale * j.left,
        })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }

    pub fn invert(&self, z: f64) -> f64 {
        (z - self.shift) / self.scale
    }

    /// Turns a unit-mass density `q` on the canonical domain into a density on
    /// the original interval carrying total mass `mass`.
    pub fn density_from_canonical(&self, q: &[f64], mass: f64, domain: Interval) -> Polynomial {
        let qp = Polynomial::new(q.to_vec(), Interval::closed(-1.0, 1.0));
        let mut c = qp.compose_affine(self.scale, self.shift);
        let factor = mass * self.scale;
        c.iter_mut().for_each(|x| *x *= factor);
        Polynomial::new(c, domain)
    }

    /// Inverse of [`density_from_canonical`](Self::density_from_canonical).
    pub fn density_to_canonical(&self, p: &Polynomial, mass: f64) -> Vec<f64> {
        let mut c = p.compose_affine(1.0 / self.scale, -self.shift / self.scale);
        let factor = 1.0 / (mass * self.scale);
        c.iter_mut().for_each(|x| *x *= factor);
        c
    }
}

/// The empirical distribution restricted to `j`, moved onto `[-1, 1]` and
/// renormalized to unit mass, together with the map and the mass of `j`.
pub fn rescale_to_canonical(
    f: &EmpiricalDistribution,
    j: &Interval,
) -> Result<(EmpiricalDistribution, AffineMap, f64)> {
    let inside = f.samples_in(j);
    if inside.is_empty() {
        return Err(Error::ZeroMass);
    }
    let map = AffineMap::to_canonical(j)?;
    let zs: Vec<f64> = inside
        .iter()
        .map(|&x| map.apply(x).clamp(-1.0, 1.0))
        .collect();
    let g = build_empirical(&zs, Interval::closed(-1.0, 1.0))?;
    Ok((g, map, inside.len() as f64 / f.n() as f64))
}

/// Upper bound on `|c_i|` for a nonnegative degree-`d` polynomial on
/// `[-1, 1]` whose integral is at most `alpha`.
pub fn coeff_bound(d: usize, alpha: f64) -> f64 {
    alpha * ((d + 1) * (d + 1)) as f64 * (2f64.sqrt() + 1.0).powi(d as i32)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem_monic(a: &[f64], m: &[f64]) -> Vec<f64> {
    let dm = m.len() - 1;
    if a.len() <= dm {
        return a.to_vec();
    }
    let mut r = a.to_vec();
    for i in (dm..r.len()).rev() {
        let q = r[i];
        if q != 0.0 {
            for j in 0..=dm {
                r[i - dm + j] -= q * m[j];
            }
        }
    }
    r.truncate(dm);
    r
}

/// Evaluation by reducing modulo the products of `(x - x_i)` down a balanced
/// tree.
pub(crate) fn subproduct_eval(c: &[f64], xs: &[f64]) -> Vec<f64> {
    fn rec(c: &[f64], xs: &[f64], out: &mut Vec<f64>) {
        if xs.len() <= 8 {
            out.extend(xs.iter().map(|&x| horner(c, x)));
            return;
        }
        let (l, r) = xs.split_at(xs.len() / 2);
        for half in [l, r] {
            let m = half
                .iter()
                .fold(vec![1.0], |acc, &x| poly_mul(&acc, &[-x, 1.0]));
            rec(&poly_rem_monic(c, &m), half, out);
        }
    }
    let mut out = Vec::with_capacity(xs.len());
    rec(c, xs, &mut out);
    out
}
