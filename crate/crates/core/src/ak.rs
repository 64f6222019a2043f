//! Ak norms of real sequences and Ak distances between a polynomial and an
//! empirical distribution.
//!
//! The distance is reduced to a sequence problem: the interval is cut at the
//! distinct sample positions, gaps contribute the integral of the polynomial
//! and atoms contribute minus their empirical mass. An optimal selection of
//! at most `k` disjoint index intervals then maps back to real intervals.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::{horner, Polynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSequence {
    pub weights: Vec<f64>,
}

impl WeightedSequence {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySequence);
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(WeightedSequence { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Disjoint index intervals, 0-based and inclusive, in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSelection {
    pub intervals: Vec<(usize, usize)>,
    pub value: f64,
}

impl IntervalSelection {
    fn from_intervals(w: &[f64], mut intervals: Vec<(usize, usize)>) -> Self {
        intervals.sort_unstable();
        let value = intervals
            .iter()
            .map(|&(a, b)| w[a..=b].iter().sum::<f64>().abs())
            .sum();
        IntervalSelection { intervals, value }
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Starts of maximal equal-sign runs. Zeros join the run to their right;
/// trailing zeros join the last run.
fn sign_runs(w: &[f64]) -> (Vec<u32>, Vec<f64>) {
    let mut starts: Vec<u32> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    let mut last_sign = 0i8;
    let mut pending: Option<usize> = None;
    for (i, &x) in w.iter().enumerate() {
        let s = sign(x);
        if s == 0 {
            pending.get_or_insert(i);
            continue;
        }
        let start = pending.take().unwrap_or(i);
        if s == last_sign {
            *sums.last_mut().unwrap() += x;
        } else {
            starts.push(start as u32);
            sums.push(x);
            last_sign = s;
        }
    }
    if starts.is_empty() {
        starts.push(0);
        sums.push(0.0);
    }
    (starts, sums)
}

/// Queue entry ordered by absolute weight, then index. Entries whose key no
/// longer matches their node are skipped when popped.
fn entry(w: f64, id: usize) -> Reverse<u128> {
    Reverse((u128::from(w.abs().to_bits()) << 32) | id as u128)
}

/// Linked list of live nodes over the collapsed runs. A node is named by the
/// first run it covers and extends up to the next live node; dead nodes
/// carry a NaN weight.
struct Chain {
    nodes: Vec<Node>,
    head: u32,
    /// Last run covered by the last live node.
    tail_end: u32,
}

#[derive(Clone, Copy)]
struct Node {
    w: f64,
    prev: u32,
    next: u32,
}

const NIL: u32 = u32::MAX;

impl Chain {
    fn new(sums: Vec<f64>) -> Self {
        let m = sums.len();
        let nodes = sums
            .into_iter()
            .enumerate()
            .map(|(i, w)| Node {
                w,
                prev: if i == 0 { NIL } else { i as u32 - 1 },
                next: if i + 1 == m { NIL } else { i as u32 + 1 },
            })
            .collect();
        Chain {
            nodes,
            head: 0,
            tail_end: m as u32 - 1,
        }
    }

    fn alive(&self, id: usize) -> bool {
        !self.nodes[id].w.is_nan()
    }

    fn end(&self, id: usize) -> usize {
        match self.nodes[id].next {
            NIL => self.tail_end as usize,
            n => n as usize - 1,
        }
    }

    fn key(&self, id: usize) -> u128 {
        entry(self.nodes[id].w, id).0
    }

    /// Below both neighbours in `(|w|, index)` order.
    fn is_local_min(&self, id: usize) -> bool {
        let Node { prev, next, .. } = self.nodes[id];
        let key = self.key(id);
        (prev == NIL || key < self.key(prev as usize))
            && (next == NIL || key < self.key(next as usize))
    }

    fn live_ids(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(Some(self.head).filter(|&i| i != NIL), |&i| {
            Some(self.nodes[i as usize].next).filter(|&n| n != NIL)
        })
        .map(|i| i as usize)
    }

    fn unlink(&mut self, id: usize) {
        let Node {
            prev: p, next: n, ..
        } = self.nodes[id];
        if p != NIL {
            self.nodes[p as usize].next = n;
            if n == NIL {
                self.tail_end = id as u32 - 1;
            }
        } else {
            self.head = n;
        }
        if n != NIL {
            self.nodes[n as usize].prev = p;
        }
        self.nodes[id].w = f64::NAN;
    }

    /// Applies one step to the minimum node `id`; returns the merged node if
    /// a merge happened.
    fn step(&mut self, id: usize) -> Option<(usize, usize)> {
        let Node {
            prev: p,
            next: n,
            w,
        } = self.nodes[id];
        if p == NIL || n == NIL {
            self.unlink(id);
            return None;
        }
        let (p, n) = (p as usize, n as usize);
        let right = self.nodes[n];
        let left = &mut self.nodes[p];
        left.w += w + right.w;
        left.next = right.next;
        if right.next != NIL {
            self.nodes[right.next as usize].prev = p as u32;
        }
        self.nodes[id].w = f64::NAN;
        self.nodes[n].w = f64::NAN;
        Some((p, n))
    }
}

/// Sequences longer than this are thinned by threshold sweeps before the
/// queue takes over.
const BATCH_MIN: usize = 256;

/// Optimal selection of at most `k` disjoint intervals maximizing the sum of
/// absolute interval weights.
///
/// Equal-sign runs are collapsed first. Then the interval of smallest
/// absolute weight (lowest index on ties) is repeatedly merged with both
/// neighbours, or dropped if it sits at either end. The sum of the `k`
/// heaviest nodes never decreases while at least `k` nodes survive a step,
/// so the answer is read off once `k + 1` nodes are left (all of them but
/// the lightest) or `k` are (all of them).
pub fn discrete_ak(seq: &WeightedSequence, k: usize) -> Result<IntervalSelection> {
    discrete_ak_sweeping_above(seq, k, BATCH_MIN)
}

fn discrete_ak_sweeping_above(
    seq: &WeightedSequence,
    k: usize,
    batch_min: usize,
) -> Result<IntervalSelection> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let w = &seq.weights;
    let (starts, sums) = sign_runs(w);
    let m = sums.len();
    let run_span = |first: usize, last: usize| {
        let b = if last + 1 < m {
            starts[last + 1] as usize - 1
        } else {
            w.len() - 1
        };
        let a = if first == 0 {
            0
        } else {
            starts[first] as usize
        };
        (a, b)
    };

    if m <= k {
        let intervals = (0..m)
            .filter(|&i| sums[i] != 0.0)
            .map(|i| run_span(i, i))
            .collect();
        return Ok(IntervalSelection::from_intervals(w, intervals));
    }

    let mut chain = Chain::new(sums);
    let mut live = m;
    // Steps on nodes below a threshold commute as long as each is taken at a
    // local minimum, so everything below the threshold is cleared in one
    // sweep and the result is the state the queue reaches at the same point
    // (exactly so when merged weights round the same in either order).
    // Exactly q nodes start below the q-th key and each step clears at
    // least one, so at least k + 2 nodes survive.
    let mut bits: Vec<u64> = Vec::new();
    let mut work: Vec<u32> = Vec::new();
    while live > batch_min.max(4 * k + 8) {
        let q = (live - k - 2) / 2;
        bits.clear();
        bits.extend(chain.live_ids().map(|i| chain.nodes[i].w.abs().to_bits()));
        let theta_bits = *bits.select_nth_unstable(q).1;
        // ties on the q-th weight are broken by id, which is chain order
        let below = bits[..q].iter().filter(|&&b| b < theta_bits).count();
        let theta_id = chain
            .live_ids()
            .filter(|&i| chain.nodes[i].w.abs().to_bits() == theta_bits)
            .nth(q - below)
            .unwrap();
        let theta = chain.key(theta_id);
        work.clear();
        work.extend(
            chain
                .live_ids()
                .filter(|&i| chain.key(i) < theta)
                .map(|i| i as u32),
        );
        while let Some(id) = work.pop() {
            let id = id as usize;
            // dead nodes carry NaN, whose bits sit above every finite weight
            if chain.key(id) >= theta || !chain.is_local_min(id) {
                continue;
            }
            let Node { prev, next, .. } = chain.nodes[id];
            match chain.step(id) {
                None => {
                    live -= 1;
                    work.extend([prev, next].into_iter().filter(|&i| i != NIL));
                }
                Some((p, _)) => {
                    live -= 2;
                    let Node { prev, next, .. } = chain.nodes[p];
                    work.push(p as u32);
                    work.extend([prev, next].into_iter().filter(|&i| i != NIL));
                }
            }
        }
    }
    drop(bits);
    drop(work);

    // remaining nodes in sorted order; merged nodes go through a heap
    let mut initial: Vec<u128> = chain.live_ids().map(|i| chain.key(i)).collect();
    initial.sort_unstable();
    let mut cursor = 0;
    let mut merged: BinaryHeap<Reverse<u128>> = BinaryHeap::new();
    let lightest = loop {
        if live <= k {
            break usize::MAX;
        }
        let e = match (initial.get(cursor), merged.peek()) {
            (Some(&a), Some(&Reverse(b))) if b < a => merged.pop().unwrap().0,
            (Some(&a), _) => {
                cursor += 1;
                a
            }
            (None, Some(_)) => merged.pop().unwrap().0,
            (None, None) => unreachable!("every live node is queued"),
        };
        let id = (e & u128::from(u32::MAX)) as usize;
        if !chain.alive(id) || (e >> 32) as u64 != chain.nodes[id].w.abs().to_bits() {
            continue;
        }
        if live == k + 1 {
            break id;
        }
        match chain.step(id) {
            None => live -= 1,
            Some((p, _)) => {
                merged.push(entry(chain.nodes[p].w, p));
                live -= 2;
                let Node { prev, next, w } = chain.nodes[p];
                debug_assert!(prev == NIL || sign(chain.nodes[prev as usize].w) != sign(w));
                debug_assert!(next == NIL || sign(chain.nodes[next as usize].w) != sign(w));
            }
        }
    };

    let mut intervals = Vec::with_capacity(k);
    for u in chain.live_ids() {
        if u != lightest && chain.nodes[u].w != 0.0 {
            intervals.push(run_span(u, chain.end(u)));
        }
    }
    Ok(IntervalSelection::from_intervals(w, intervals))
}

/// Largest sequence accepted by [`brute_force_ak`].
pub const BRUTE_FORCE_MAX_LEN: usize = 24;

/// Exact optimum by dynamic programming over prefixes, tracking how many
/// intervals are used and the sign of the interval currently open.
pub fn brute_force_ak(seq: &WeightedSequence, k: usize) -> Result<IntervalSelection> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let w = &seq.weights;
    let r = w.len();
    if r == 0 {
        return Err(Error::EmptySequence);
    }
    if r > BRUTE_FORCE_MAX_LEN {
        return Err(Error::TooLong(r));
    }
    // state: (used, open) with open 0 = none, 1 = positive, 2 = negative
    const NEG: f64 = f64::NEG_INFINITY;
    let states = (k + 1) * 3;
    let idx = |used: usize, open: usize| used * 3 + open;
    let mut val = vec![vec![NEG; states]; r + 1];
    let mut from = vec![vec![usize::MAX; states]; r + 1];
    val[0][idx(0, 0)] = 0.0;
    for i in 0..r {
        for used in 0..=k {
            for open in 0..3 {
                let v = val[i][idx(used, open)];
                if v == NEG {
                    continue;
                }
                let mut relax = |u: usize, o: usize, nv: f64| {
                    let s = idx(u, o);
                    if nv > val[i + 1][s] {
                        val[i + 1][s] = nv;
                        from[i + 1][s] = idx(used, open);
                    }
                };
                // leave position i outside every interval
                relax(used, 0, v);
                // extend the open interval
                if open == 1 {
                    relax(used, 1, v + w[i]);
                }
                if open == 2 {
                    relax(used, 2, v - w[i]);
                }
                // open a new interval at i
                if used < k {
                    relax(used + 1, 1, v + w[i]);
                    relax(used + 1, 2, v - w[i]);
                }
            }
        }
    }
    let mut best = idx(0, 0);
    for s in 0..states {
        if val[r][s] > val[r][best] {
            best = s;
        }
    }
    // walk back to recover intervals
    let mut intervals = Vec::new();
    let mut s = best;
    let mut end: Option<usize> = None;
    for i in (1..=r).rev() {
        let prev = from[i][s];
        let (used, open) = (s / 3, s % 3);
        let (pused, popen) = (prev / 3, prev % 3);
        if open != 0 {
            if end.is_none() {
                end = Some(i - 1);
            }
            if pused < used || popen == 0 {
                intervals.push((i - 1, end.take().unwrap()));
            }
        }
        s = prev;
    }
    let mut sel = IntervalSelection::from_intervals(w, intervals);
    sel.intervals
        .retain(|&(a, b)| w[a..=b].iter().sum::<f64>() != 0.0);
    Ok(sel)
}

/// Ak norm for every `k` in `1..=k_max`, by the same recurrence as
/// [`brute_force_ak`] but without interval recovery.
pub fn brute_force_ak_values(w: &[f64], k_max: usize) -> Vec<f64> {
    const NEG: f64 = f64::NEG_INFINITY;
    // best[used][open]
    let mut cur = vec![[NEG; 3]; k_max + 1];
    cur[0][0] = 0.0;
    for &x in w {
        let mut nxt = vec![[NEG; 3]; k_max + 1];
        for used in 0..=k_max {
            for open in 0..3 {
                let v = cur[used][open];
                if v == NEG {
                    continue;
                }
                let n0 = &mut nxt[used][0];
                *n0 = n0.max(v);
                if open == 1 {
                    nxt[used][1] = nxt[used][1].max(v + x);
                }
                if open == 2 {
                    nxt[used][2] = nxt[used][2].max(v - x);
                }
                if used < k_max {
                    nxt[used + 1][1] = nxt[used + 1][1].max(v + x);
                    nxt[used + 1][2] = nxt[used + 1][2].max(v - x);
                }
            }
        }
        cur = nxt;
    }
    let mut out = Vec::with_capacity(k_max);
    let mut running = 0.0f64;
    for row in cur.iter().skip(1) {
        running = running.max(row.iter().copied().fold(NEG, f64::max));
        out.push(running);
    }
    out
}

/// Samples of an empirical distribution inside an interval, ready for the
/// sequence reduction.
#[derive(Clone, Debug)]
pub struct AkData {
    pub interval: Interval,
    /// Distinct sample positions inside the interval.
    pub positions: Vec<f64>,
    /// Empirical mass at each position.
    pub atoms: Vec<f64>,
}

/// A real interval chosen by the Ak computation together with the sign of
/// `p(I) - f(I)` on it.
#[derive(Clone, Debug, PartialEq)]
pub struct AkInterval {
    pub interval: Interval,
    pub sign: f64,
    /// Empirical mass inside the interval.
    pub mass: f64,
}

#[derive(Clone, Debug)]
pub struct AkResult {
    pub value: f64,
    pub intervals: Vec<AkInterval>,
    pub selection: IntervalSelection,
}

impl AkData {
    pub fn new(f: &EmpiricalDistribution, j: &Interval) -> Self {
        let r = f.atom_range(j);
        let n = f.n() as f64;
        AkData {
            interval: *j,
            positions: f.positions()[r.clone()].to_vec(),
            atoms: r.map(|i| f.multiplicity(i) as f64 / n).collect(),
        }
    }

    /// Gap integrals of `p` interleaved with negated atom masses; length
    /// `2s + 1` for `s` distinct positions.
    pub fn sequence(&self, coeffs: &[f64]) -> Vec<f64> {
        let anti = Polynomial::new(coeffs.to_vec(), self.interval).antiderivative();
        let s = self.positions.len();
        let mut out = Vec::with_capacity(2 * s + 1);
        let mut prev = horner(&anti.coeffs, self.interval.left);
        for i in 0..s {
            let cur = horner(&anti.coeffs, self.positions[i]);
            out.push(cur - prev);
            out.push(-self.atoms[i]);
            prev = cur;
        }
        out.push(horner(&anti.coeffs, self.interval.right) - prev);
        out
    }

    /// Real interval covered by the index interval `[a, b]` of
    /// [`sequence`](Self::sequence). Gaps exclude their bounding samples and
    /// atoms include theirs.
    pub fn to_interval(&self, a: usize, b: usize) -> Interval {
        let j = &self.interval;
        let x = |i: usize| self.positions[i];
        let (left, left_closed) = if a % 2 == 1 {
            (x(a / 2), true)
        } else if a == 0 {
            (j.left, j.left_closed)
        } else {
            (x(a / 2 - 1), false)
        };
        let s = self.positions.len();
        let (right, right_closed) = if b % 2 == 1 {
            (x(b / 2), true)
        } else if b / 2 == s {
            (j.right, j.right_closed)
        } else {
            (x(b / 2), false)
        };
        Interval::new(left, right, left_closed, right_closed)
    }

    pub fn solve(&self, coeffs: &[f64], k: usize) -> Result<AkResult> {
        let seq = WeightedSequence::new(self.sequence(coeffs))?;
        let selection = discrete_ak(&seq, k)?;
        let intervals = selection
            .intervals
            .iter()
            .map(|&(a, b)| {
                let sum: f64 = seq.weights[a..=b].iter().sum();
                let mass = (a..=b)
                    .filter(|i| i % 2 == 1)
                    .map(|i| self.atoms[i / 2])
                    .sum();
                AkInterval {
                    interval: self.to_interval(a, b),
                    sign: sum.signum(),
                    mass,
                }
            })
            .collect();
        Ok(AkResult {
            value: selection.value,
            intervals,
            selection,
        })
    }
}

pub fn build_discrete_sequence(
    p: &Polynomial,
    f: &EmpiricalDistribution,
    j: &Interval,
) -> WeightedSequence {
    WeightedSequence {
        weights: AkData::new(f, j).sequence(&p.coeffs),
    }
}

/// Ak distance between `p` and `f` on `j`, with the maximizing intervals.
///
/// Exact when `p` is nonnegative on `j`; if `p >= -mu` the value is within
/// `2 mu` of the true distance.
pub fn compute_ak(
    p: &Polynomial,
    f: &EmpiricalDistribution,
    j: &Interval,
    k: usize,
    _mu: f64,
) -> Result<AkResult> {
    AkData::new(f, j).solve(&p.coeffs, k)
}
