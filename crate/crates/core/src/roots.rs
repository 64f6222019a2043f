//! Real roots on `[-1, 1]` and an approximate nonnegativity test.
//!
//! Roots are isolated with Sturm sequences and refined by bisection.

use crate::interval::Interval;
use crate::poly::{horner, Polynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct RootReport {
    pub approx_roots: Vec<f64>,
    pub precision: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NonnegResult {
    Ok,
    /// A point where the polynomial is below `-mu/2`.
    Witness(f64),
}

/// Drops the leading terms whose coefficients are all below `nu/(2d)`.
pub fn truncate(p: &Polynomial, nu: f64) -> Polynomial {
    let d = p.degree();
    if d == 0 {
        return p.clone();
    }
    let cut = nu / (2.0 * d as f64);
    match p.coeffs.iter().rposition(|c| c.abs() >= cut) {
        Some(top) => Polynomial::new(p.coeffs[..=top].to_vec(), p.domain),
        None => Polynomial::zero(p.domain),
    }
}

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    c
}

fn normalize(c: &mut [f64]) {
    let m = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        c.iter_mut().for_each(|x| *x /= m);
    }
}

fn rem(a: &[f64], b: &[f64]) -> Vec<f64> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let lead = b[db];
    for i in (db..r.len()).rev() {
        let q = r[i] / lead;
        for j in 0..=db {
            r[i - db + j] -= q * b[j];
        }
    }
    r.truncate(db.max(1));
    if db == 0 {
        r[0] = 0.0;
    }
    r
}

struct Sturm {
    chain: Vec<Vec<f64>>,
}

impl Sturm {
    fn new(c: &[f64]) -> Self {
        let mut p0 = c.to_vec();
        normalize(&mut p0);
        let mut p1: Vec<f64> = p0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| x * i as f64)
            .collect();
        normalize(&mut p1);
        let mut chain = vec![p0, p1];
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if b.len() == 1 {
                break;
            }
            let mut r: Vec<f64> = rem(a, b).into_iter().map(|x| -x).collect();
            let scale = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if scale <= 1e-11 {
                break;
            }
            // zero out coefficients lost to cancellation
            r.iter_mut().for_each(|x| {
                if x.abs() <= 1e-13 {
                    *x = 0.0
                }
            });
            let mut r = trim(r);
            normalize(&mut r);
            chain.push(r);
        }
        Sturm { chain }
    }

    fn changes(&self, x: f64) -> i32 {
        let mut count = 0;
        let mut last = 0.0f64;
        for c in &self.chain {
            let v = horner(c, x);
            if v != 0.0 {
                if last != 0.0 && (v > 0.0) != (last > 0.0) {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }
}

/// Approximate real roots in `[-1, 1]` of `p` truncated at `nu`; every such
/// root lies within `mu` of a reported point.
pub fn approx_real_roots(p: &Polynomial, nu: f64, mu: f64) -> RootReport {
    let q = trim(truncate(p, nu).coeffs);
    let mut roots = Vec::new();
    if q.len() < 2 {
        return RootReport {
            approx_roots: roots,
            precision: mu,
        };
    }
    let sturm = Sturm::new(&q);
    let f = |x: f64| horner(&q, x);
    let (a0, b0) = (-1.0 - mu / 2.0, 1.0 + mu / 2.0);
    let mut stack = vec![(a0, b0, sturm.changes(a0), sturm.changes(b0))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let (fa, fb) = (f(a), f(b));
        let crossing = fa * fb < 0.0;
        let count = (va - vb).max(crossing as i32);
        if count <= 0 {
            continue;
        }
        if b - a <= mu {
            roots.push(0.5 * (a + b));
            continue;
        }
        if count == 1 && crossing {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > mu {
                let m = 0.5 * (lo + hi);
                let fm = f(m);
                if fm == 0.0 {
                    lo = m;
                    hi = m;
                    break;
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            roots.push(0.5 * (lo + hi));
            continue;
        }
        let m = 0.5 * (a + b);
        let vm = sturm.changes(m);
        stack.push((m, b, vm, vb));
        stack.push((a, m, va, vm));
    }
    roots.sort_by(f64::total_cmp);
    RootReport {
        approx_roots: roots,
        precision: mu,
    }
}

/// Approximate nonnegativity test on `[-1, 1]`.
///
/// Returns a witness `x` with `p(x) < -mu/2` whenever `p` dips below `-mu`
/// somewhere; may return either answer in between.
pub fn test_nonneg(p: &Polynomial, mu: f64) -> NonnegResult {
    let d = p.degree();
    let mut best = (-1.0, p.eval(-1.0));
    let mut consider = |x: f64| {
        let v = p.eval(x);
        if v < best.1 {
            best = (x, v);
        }
    };
    consider(1.0);
    if d >= 2 {
        let alpha = p.max_abs_coeff().max(f64::MIN_POSITIVE);
        let r = truncate(p, mu / 2.0);
        let nu1 = mu / (4.0 * alpha * (d * (d + 1)) as f64);
        for x in approx_real_roots(&r.derivative(), 0.0, nu1).approx_roots {
            consider(x.clamp(-1.0, 1.0));
        }
    }
    if best.1 < -mu / 2.0 {
        NonnegResult::Witness(best.0)
    } else {
        NonnegResult::Ok
    }
}

pub(crate) fn canonical(c: &[f64]) -> Polynomial {
    Polynomial::new(c.to_vec(), Interval::closed(-1.0, 1.0))
}
