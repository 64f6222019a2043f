//! Small dense linear programs `min x[obj] s.t. G x <= h` with free
//! variables, solved by the primal simplex method on the dual problem.
//!
//! Rows can be appended between solves; the previous basis stays dual
//! feasible, so re-solving usually takes a handful of pivots.

use crate::error::{Error, Result};

pub struct CutLp {
    n: usize,
    obj: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

impl CutLp {
    /// Starts with the box `|x_i| <= bound` for every variable except the
    /// objective, which is constrained to `0 <= x[obj] <= bound`.
    pub fn new(n: usize, obj: usize, bound: f64) -> Self {
        let mut lp = CutLp {
            n,
            obj,
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
        };
        for i in 0..n {
            let mut up = vec![0.0; n];
            up[i] = 1.0;
            lp.push_raw(up, bound);
            let mut down = vec![0.0; n];
            down[i] = -1.0;
            lp.push_raw(down, if i == obj { 0.0 } else { bound });
        }
        // x[obj] >= 0 carries the objective; the other variables sit on
        // their upper bounds
        lp.basis = (0..n)
            .map(|i| if i == obj { 2 * i + 1 } else { 2 * i })
            .collect();
        lp
    }

    fn push_raw(&mut self, row: Vec<f64>, rhs: f64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Adds `row . x <= rhs`, scaled to a unit normal.
    pub fn add(&mut self, row: &[f64], rhs: f64) {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return;
        }
        self.push_raw(row.iter().map(|v| v / norm).collect(), rhs / norm);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn basis_matrix_t(&self) -> Vec<Vec<f64>> {
        // columns of A_B are the basic rows of G, so A_B = G_B^T
        (0..self.n)
            .map(|r| self.basis.iter().map(|&j| self.rows[j][r]).collect())
            .collect()
    }

    /// Returns an optimal `x`.
    pub fn solve(&mut self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut b = vec![0.0; n];
        b[self.obj] = -1.0;
        for iter in 0..20_000 {
            let gb: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.rows[j].clone()).collect();
            let hb: Vec<f64> = self.basis.iter().map(|&j| self.rhs[j]).collect();
            let x = solve_dense(gb, hb)
                .ok_or_else(|| Error::Config("singular simplex basis".into()))?;
            // entering row: most violated primal constraint, or the first
            // violated one once degenerate cycling becomes possible
            let bland = iter > 60;
            let mut enter: Option<(usize, f64)> = None;
            for (j, row) in self.rows.iter().enumerate() {
                let slack = self.rhs[j] - row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
                if slack < -1e-10 {
                    match enter {
                        None => enter = Some((j, slack)),
                        Some((_, s)) if !bland && slack < s => enter = Some((j, slack)),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _)) = enter else {
                return Ok(x);
            };
            let at = self.basis_matrix_t();
            let y = solve_dense(at.clone(), b.clone())
                .ok_or_else(|| Error::Config("singular simplex basis".into()))?;
            let u = solve_dense(at, self.rows[j].clone())
                .ok_or_else(|| Error::Config("singular simplex basis".into()))?;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..n {
                if u[i] > 1e-12 {
                    let ratio = y[i].max(0.0) / u[i];
                    let better = match leave {
                        None => true,
                        Some((l, r)) => {
                            ratio < r - 1e-15
                                || (ratio <= r + 1e-15 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((i, _)) = leave else {
                return Err(Error::Config("cutting-plane program is infeasible".into()));
            };
            self.basis[i] = j;
        }
        Err(Error::Config("simplex pivot limit reached".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Optimum over all vertices formed by `n` tight constraints.
    fn vertex_enumeration(rows: &[Vec<f64>], rhs: &[f64], obj: usize) -> f64 {
        let n = rows[0].len();
        let m = rows.len();
        let mut best = f64::INFINITY;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
            let b: Vec<f64> = idx.iter().map(|&i| rhs[i]).collect();
            if let Some(x) = solve_dense(a, b) {
                let ok = rows
                    .iter()
                    .zip(rhs)
                    .all(|(r, &h)| r.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= h + 1e-9);
                if ok {
                    best = best.min(x[obj]);
                }
            }
            // next combination
            let mut k = n;
            loop {
                if k == 0 {
                    return best;
                }
                k -= 1;
                if idx[k] < m - n + k {
                    idx[k] += 1;
                    for t in k + 1..n {
                        idx[t] = idx[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let n = rng.random_range(2..=4);
            let obj = n - 1;
            let mut lp = CutLp::new(n, obj, 5.0);
            // random cuts tau >= a.x + b, all satisfied by x = 0, tau = 5
            for _ in 0..rng.random_range(1..8) {
                let mut row: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                row[obj] = -1.0;
                let rhs = rng.random_range(-1.0..1.0f64).min(4.0);
                lp.add(&row, rhs);
            }
            let x = lp.solve().unwrap();
            let want = vertex_enumeration(&lp.rows, &lp.rhs, obj);
            assert!((x[obj] - want).abs() < 1e-9, "{} vs {}", x[obj], want);
            // warm restart after one more cut
            let mut row: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            row[obj] = -1.0;
            lp.add(&row, 0.5);
            let x = lp.solve().unwrap();
            let want = vertex_enumeration(&lp.rows, &lp.rhs, obj);
            assert!((x[obj] - want).abs() < 1e-9);
        }
    }
}
