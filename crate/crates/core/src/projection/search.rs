use super::ellipsoid::{cutting_plane_solve, SolveOutcome};
use super::lp::CutLp;
use super::{separate, AkGeometry, SepResult};
use crate::error::{Error, Result};
use crate::poly::coeff_bound;

/// Parameters of one feasibility query.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityParams {
    pub tau: f64,
    pub d: usize,
    pub k: usize,
    pub eta_prime: f64,
    /// The search ball has radius `2^l`; sets that are nonempty at the
    /// queried `tau` contain a ball of radius `2^-l`.
    pub l: f64,
}

impl FeasibilityParams {
    pub fn new(d: usize, k: usize, eta: f64) -> Self {
        let eta_prime = eta / 15.0;
        let df = d as f64;
        let stated = df * (2f64.sqrt() + 1.0).log2() + 1.5 * df.max(1.0).log2() + 2.0;
        // a ball holding every nonnegative polynomial with integral <= 3
        let ball = ((df + 1.0).sqrt() * coeff_bound(d, 3.0)).log2();
        let lower = (4.0 * (df + 1.0) / (2.0 * eta_prime)).log2();
        FeasibilityParams {
            tau: 0.0,
            d,
            k,
            eta_prime,
            l: stated.max(ball).max(lower),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FindReport {
    pub coeffs: Vec<f64>,
    pub tau_lower: f64,
    pub tau_upper: f64,
    /// `(tau_lower, tau_upper)` after every bisection step.
    pub trace: Vec<(f64, f64)>,
    pub oracle_calls: usize,
}

/// Nonnegative polynomial within `eta` of the smallest Ak distance to the
/// canonical data, by bisection over `tau` with an ellipsoid feasibility
/// test at each step.
pub fn find_polynomial<G: AkGeometry + ?Sized>(geom: &G, k: usize, eta: f64) -> Result<FindReport> {
    find_polynomial_observed(geom, k, eta, &mut |_, _, _| {})
}

/// [`find_polynomial`] reporting every oracle answer as `(tau, query, answer)`.
pub fn find_polynomial_observed<G: AkGeometry + ?Sized>(
    geom: &G,
    k: usize,
    eta: f64,
    observer: &mut dyn FnMut(f64, &[f64], &SepResult),
) -> Result<FindReport> {
    let params = FeasibilityParams::new(geom.dim() - 1, k, eta);
    let ep = params.eta_prime;
    let mut calls = 0usize;
    let mut run = |tau: f64, calls: &mut usize| -> Result<SolveOutcome> {
        let mut oracle = |c: &[f64]| {
            *calls += 1;
            let r = separate(geom, c, tau, k, ep)?;
            observer(tau, c, &r);
            Ok(r)
        };
        cutting_plane_solve(&mut oracle, geom.dim(), params.l)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut trace = vec![(lo, hi)];
    while hi - lo >= ep {
        let mid = 0.5 * (lo + hi);
        match run(mid + 2.0 * ep, &mut calls)? {
            SolveOutcome::Point(_) => hi = mid,
            SolveOutcome::Infeasible => lo = mid,
        }
        trace.push((lo, hi));
    }
    let mut coeffs = match run(hi + 10.0 * ep, &mut calls)? {
        SolveOutcome::Point(c) => c,
        SolveOutcome::Infeasible => {
            return Err(Error::Config(
                "final feasibility query found no polynomial".into(),
            ));
        }
    };
    coeffs[0] += ep;
    Ok(FindReport {
        coeffs,
        tau_lower: lo,
        tau_upper: hi,
        trace,
        oracle_calls: calls,
    })
}

/// Nonnegative polynomial within `eta` of the smallest Ak distance, found by
/// minimizing `tau` over the cuts collected so far and adding the cut of
/// each LP solution until the LP bound and the best certified distance are
/// within `eta`. Returns the coefficients and an upper bound on their
/// distance that exceeds the true distance by at most `eta`.
pub fn cut_lp_projection<G: AkGeometry + ?Sized>(
    geom: &G,
    k: usize,
    eta: f64,
) -> Result<(Vec<f64>, f64)> {
    let dim = geom.dim();
    let mu = eta / 8.0;
    let mut lp = CutLp::new(dim + 1, dim, coeff_bound(dim - 1, 3.0));
    let total = geom.total_form();
    for s in [1.0, -1.0] {
        let mut row: Vec<f64> = total.iter().map(|v| s * v).collect();
        row.push(-1.0);
        lp.add(&row, s);
    }
    let mut best = (vec![0.0; dim], 1.0);
    for _ in 0..400 {
        let x = lp.solve()?;
        let (c, lower) = (&x[..dim], x[dim]);
        if let Some(y) = geom.nonneg_cut(c, mu) {
            let mut row = y;
            row.push(0.0);
            lp.add(&row, 0.0);
            continue;
        }
        let cut = geom.ak_cut(c, k)?;
        // lifting by mu makes p nonnegative; the lift and the possible
        // negativity each cost at most 2 mu of distance
        let upper = cut.value + 4.0 * mu;
        if upper < best.1 {
            let mut lifted = c.to_vec();
            lifted[0] += mu;
            best = (lifted, upper);
        }
        if best.1 - lower <= eta {
            break;
        }
        let mut row = cut.normal;
        row.push(-1.0);
        lp.add(&row, cut.mass_term);
    }
    Ok(best)
}
