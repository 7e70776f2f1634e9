//! Transfer of sequences and weights to functions on the line.
//!
//! A sequence `b` becomes the step function `f = b_k` on `[k - 1/4, k + 1/4]`
//! and zero elsewhere. A weight becomes either the quarter-linear function
//! (`w_k` on `[k - 1/4, k + 1/4]`, linear in between) or the half-step
//! function (`w_k` on `[k - 1/2, k + 1/2)`). Everything below is evaluated
//! in closed form: integrals of `|f|^p w` are sums of trapezoids, and the
//! maximal and singular operators reduce to logarithms and averages
//! evaluated at finitely many candidate points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{self, holds, DoublingSearch, Exactness};
use crate::params::{EvalPlan, MorreyParams};
use crate::seq::{Seq, Weight};
use crate::transforms;

/// Step function: `values[i]` on `[breakpoints[i], breakpoints[i+1]]`,
/// zero outside `[first, last]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstFn {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidParameter(
                "need n+1 breakpoints for n piece values".into(),
            ));
        }
        if breakpoints.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidParameter("breakpoints must increase strictly".into()));
        }
        Ok(PiecewiseConstFn { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn last(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn negated(&self) -> Self {
        PiecewiseConstFn {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Index of the piece containing `x` in its half-open `[a, b)`.
    fn piece_right(&self, x: f64) -> Option<usize> {
        if x < self.first() || x >= self.last() {
            return None;
        }
        Some(self.breakpoints.partition_point(|&t| t <= x) - 1)
    }

    /// Index of the piece containing `x` in `(a, b]`.
    fn piece_left(&self, x: f64) -> Option<usize> {
        if x <= self.first() || x > self.last() {
            return None;
        }
        Some(self.breakpoints.partition_point(|&t| t < x) - 1)
    }

    /// `f(x+)`.
    pub fn value_right(&self, x: f64) -> f64 {
        self.piece_right(x).map_or(0.0, |i| self.values[i])
    }

    /// `f(x-)`.
    pub fn value_left(&self, x: f64) -> f64 {
        self.piece_left(x).map_or(0.0, |i| self.values[i])
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.value_right(x)
    }

    fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(ab, &v)| (ab[0], ab[1], v))
    }

    /// `int_{-inf}^{x} |f|`.
    fn abs_cumulative(&self, x: f64) -> f64 {
        self.pieces()
            .take_while(|&(a, _, _)| a < x)
            .map(|(a, b, v)| v.abs() * (b.min(x) - a))
            .sum()
    }

    /// `int_a^c |f(t)|^p w(t) dt` for `a <= c`.
    pub fn weighted_power_integral(&self, wfn: &PiecewiseLinearFn, p: f64, a: f64, c: f64) -> f64 {
        self.pieces()
            .filter(|&(_, _, v)| v != 0.0)
            .map(|(x0, x1, v)| {
                let lo = x0.max(a);
                let hi = x1.min(c);
                if hi > lo {
                    v.abs().powf(p) * wfn.integral(lo, hi)
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// Continuous piecewise-linear function through `(knots[i], knot_values[i])`,
/// constant beyond the first and last knot. Repeated knots encode jumps;
/// the value at a jump is the right limit.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFn {
    knots: Vec<f64>,
    knot_values: Vec<f64>,
}

impl PiecewiseLinearFn {
    pub fn new(knots: Vec<f64>, knot_values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != knot_values.len() {
            return Err(Error::InvalidParameter("knots and values must pair up".into()));
        }
        if knots.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::InvalidParameter("knots must be nondecreasing".into()));
        }
        if let Some(&v) = knot_values.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::NonPositiveWeight { index: 0, value: v });
        }
        Ok(PiecewiseLinearFn { knots, knot_values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.knot_values
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if x < self.knots[0] {
            return self.knot_values[0];
        }
        if x >= self.knots[n - 1] {
            return self.knot_values[n - 1];
        }
        let i = self.knots.partition_point(|&t| t <= x) - 1;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let (y0, y1) = (self.knot_values[i], self.knot_values[i + 1]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `int_a^b w` in closed form (trapezoids on each linear segment).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let n = self.knots.len();
        let mut total = 0.0;
        let (first, last) = (self.knots[0], self.knots[n - 1]);
        if a < first {
            total += self.knot_values[0] * (b.min(first) - a);
        }
        if b > last {
            total += self.knot_values[n - 1] * (b - a.max(last));
        }
        for i in 0..n - 1 {
            let (x0, x1) = (self.knots[i], self.knots[i + 1]);
            let lo = x0.max(a);
            let hi = x1.min(b);
            if hi > lo {
                let ylo = self.segment_value(i, lo);
                let yhi = self.segment_value(i, hi);
                total += 0.5 * (ylo + yhi) * (hi - lo);
            }
        }
        total
    }

    fn segment_value(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let (y0, y1) = (self.knot_values[i], self.knot_values[i + 1]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Whether the function is constant on `[a, b]`.
    fn is_constant_on(&self, a: f64, b: f64) -> bool {
        let va = self.value_at(a);
        let inside = self
            .knots
            .iter()
            .zip(&self.knot_values)
            .filter(|(&x, _)| x >= a && x <= b)
            .all(|(_, &y)| y == va);
        inside && self.value_at(b) == va
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightStyle {
    /// `w_k` on `[k - 1/4, k + 1/4]`, linear in between.
    QuarterLinear,
    /// `w_k` on `[k - 1/2, k + 1/2)`.
    HalfStep,
}

/// `f = b_k` on `[k - 1/4, k + 1/4]` for each stored index, zero elsewhere.
pub fn embed_sequence(b: &Seq) -> PiecewiseConstFn {
    let mut breakpoints = Vec::with_capacity(2 * b.len());
    let mut values = Vec::with_capacity(2 * b.len());
    for (k, v) in b.iter() {
        let k = k as f64;
        if k > b.lo() as f64 {
            values.push(0.0);
        }
        breakpoints.push(k - 0.25);
        breakpoints.push(k + 0.25);
        values.push(v);
    }
    PiecewiseConstFn { breakpoints, values }
}

pub fn embed_weight(w: &Weight, style: WeightStyle) -> PiecewiseLinearFn {
    let mut knots = Vec::with_capacity(2 * w.values().len());
    let mut knot_values = Vec::with_capacity(2 * w.values().len());
    let half = match style {
        WeightStyle::QuarterLinear => 0.25,
        WeightStyle::HalfStep => 0.5,
    };
    for (i, &v) in w.values().iter().enumerate() {
        let k = (w.lo() + i as i64) as f64;
        knots.push(k - half);
        knot_values.push(v);
        knots.push(k + half);
        knot_values.push(v);
    }
    PiecewiseLinearFn { knots, knot_values }
}

/// `(Mf)(x) = sup_{y != x} (1/(y-x)) int_x^y |f|`.
///
/// On a piece where `|f|` is constant the average over `[x, y]` is a
/// linear-fractional, hence monotone, function of `y`, so the sup is attained
/// at a breakpoint or in the limit `y -> x+-`, where it equals `|f(x+-)|`.
/// Beyond the outermost breakpoints the average only decays.
pub fn continuous_maximal(f: &PiecewiseConstFn, x: f64) -> f64 {
    let fx = f.abs_cumulative(x);
    let mut best = f.value_right(x).abs().max(f.value_left(x).abs());
    let mut acc = 0.0;
    let mut prev = f.first();
    // Cumulative |f| at each breakpoint, computed in one left-to-right pass.
    for (i, &t) in f.breakpoints.iter().enumerate() {
        if i > 0 {
            acc += f.values[i - 1].abs() * (t - prev);
        }
        prev = t;
        if t != x {
            best = best.max((acc - fx).abs() / (t - x).abs());
        }
    }
    best
}

/// `int_{[a,b] \ (x - eps, x + eps)} dy / (x - y)` for `eps > 0`.
fn kernel_piece(a: f64, b: f64, x: f64, eps: f64) -> f64 {
    let mut total = 0.0;
    let left_end = b.min(x - eps);
    if left_end > a {
        total += ((x - a) / (x - left_end)).ln();
    }
    let right_start = a.max(x + eps);
    if b > right_start {
        total -= ((b - x) / (right_start - x)).ln();
    }
    total
}

/// `int_{|x - y| > eps} f(y) / (x - y) dy` in closed form.
pub fn truncated_singular_integral(f: &PiecewiseConstFn, x: f64, eps: f64) -> f64 {
    f.pieces()
        .filter(|&(_, _, v)| v != 0.0)
        .map(|(a, b, v)| v * kernel_piece(a, b, x, eps))
        .sum()
}

/// The `eps -> 0+` limit of the truncated integral; infinite when `f` jumps
/// at `x`, where the truncations diverge like `(f(x+) - f(x-)) ln eps`.
fn principal_value(f: &PiecewiseConstFn, x: f64) -> f64 {
    if f.value_left(x) != f.value_right(x) {
        return f64::INFINITY;
    }
    let lx = |y: f64| (x - y).abs().ln();
    f.pieces()
        .filter(|&(_, _, v)| v != 0.0)
        .map(|(a, b, v)| {
            // Pieces ending or starting at x contribute a `ln eps` term that
            // cancels against its neighbor because f is continuous at x.
            let la = if a == x { 0.0 } else { lx(a) };
            let lb = if b == x { 0.0 } else { lx(b) };
            v * (la - lb)
        })
        .sum()
}

/// `S(f)(x) = sup_{eps > 0} |int_{|x-y| > eps} f(y) / (x - y) dy|`.
///
/// The derivative of the truncated integral in `eps` is
/// `(f(x+eps) - f(x-eps)) / eps`, whose sign can only change when `x +- eps`
/// crosses a breakpoint. Between those candidate radii the truncation is
/// monotone, so `|.|` peaks at a candidate or at `eps -> 0+`; it tends to 0
/// as `eps -> inf`.
pub fn continuous_singular(f: &PiecewiseConstFn, x: f64) -> f64 {
    let mut best = principal_value(f, x).abs();
    if best.is_infinite() {
        return best;
    }
    for &t in &f.breakpoints {
        let eps = (x - t).abs();
        if eps > 0.0 {
            best = best.max(truncated_singular_integral(f, x, eps).abs());
        }
    }
    best
}

/// Candidate grid for the continuous Morrey sup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorreySearch {
    /// Each gap between consecutive breakpoints is split into this many
    /// equal parts (1 = breakpoints only).
    pub refine: usize,
}

impl Default for MorreySearch {
    fn default() -> Self {
        MorreySearch { refine: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousNormValue {
    pub value: f64,
    pub exactness: Exactness,
    /// Interval `(a, c)` attaining the value.
    pub witness: (f64, f64),
}

/// `sup_B (int_B |f|^p w)^{1/p} / (int_B w)^lambda` over intervals `B`.
///
/// Endpoints run over the breakpoints of `f`, the knots of `w` inside the
/// support of `f`, and the refinement grid. When `w` is constant on every
/// nonzero piece of `f`, both integrals are linear in each endpoint on each
/// cell (or the numerator is constant and the denominator increasing), and
/// `t -> (A + a t)^{1/p} (D + d t)^{-lambda}` has at most one interior
/// critical point, a minimum. The sup is then attained at candidate
/// endpoints and the value is exact. Otherwise it is a lower bound.
pub fn continuous_weighted_morrey_norm(
    f: &PiecewiseConstFn,
    wfn: &PiecewiseLinearFn,
    params: MorreyParams,
    search: MorreySearch,
) -> Result<ContinuousNormValue> {
    if search.refine == 0 {
        return Err(Error::Empty("continuous Morrey candidate set"));
    }
    let (lo, hi) = (f.first(), f.last());
    let mut base: Vec<f64> = f.breakpoints.clone();
    base.extend(wfn.knots.iter().copied().filter(|&t| t > lo && t < hi));
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    base.dedup();
    let mut points = Vec::with_capacity(base.len() * search.refine);
    for pair in base.windows(2) {
        for s in 0..search.refine {
            points.push(pair[0] + (pair[1] - pair[0]) * s as f64 / search.refine as f64);
        }
    }
    points.push(hi);

    let p = params.p();
    let mut num_cum = vec![0.0; points.len()];
    let mut den_cum = vec![0.0; points.len()];
    for i in 1..points.len() {
        let (a, c) = (points[i - 1], points[i]);
        num_cum[i] = num_cum[i - 1] + f.weighted_power_integral(wfn, p, a, c);
        den_cum[i] = den_cum[i - 1] + wfn.integral(a, c);
    }

    let mut best = (0.0f64, (points[0], points[0]));
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let num = (num_cum[j] - num_cum[i]).max(0.0);
            let den = den_cum[j] - den_cum[i];
            if num == 0.0 || den <= 0.0 {
                continue;
            }
            let ratio = num.powf(1.0 / p) / den.powf(params.lambda());
            if ratio > best.0 {
                best = (ratio, (points[i], points[j]));
            }
        }
    }

    let aligned = f
        .pieces()
        .filter(|&(_, _, v)| v != 0.0)
        .all(|(a, b, _)| wfn.is_constant_on(a, b));
    Ok(ContinuousNormValue {
        value: best.0,
        exactness: if aligned {
            Exactness::Exact
        } else {
            Exactness::LowerBound
        },
        witness: best.1,
    })
}

/// Half the length of an embedded piece: the largest overlap of an interval
/// with a single piece of `f`.
pub const PIECE_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingNormRow {
    /// `||f||_{M_{lambda,p,w}}`.
    pub lhs: f64,
    /// `overlap^{1/p - lambda} D^lambda ||b||_{m_{lambda,p,w}}`.
    pub rhs: f64,
    pub overlap: f64,
    pub doubling_d: f64,
    pub sequence_norm: f64,
    pub pass: bool,
}

/// Checks `||f||_{M_{lambda,p,w}} <= overlap^{1/p-lambda} D^lambda ||b||_{m_{lambda,p,w}}`
/// for the quarter-linear embedding of `(b, w)`.
pub fn embedding_norm_check(
    b: &Seq,
    w: &Weight,
    params: MorreyParams,
    doubling: DoublingSearch,
) -> Result<EmbeddingNormRow> {
    let d = norms::doubling_constant(w, doubling)?.value;
    let plan = EvalPlan::around(b, 1);
    let sequence_norm = norms::weighted_morrey_norm(b, w, params, &plan)?.value;
    let f = embed_sequence(b);
    let wfn = embed_weight(w, WeightStyle::QuarterLinear);
    let lhs = continuous_weighted_morrey_norm(&f, &wfn, params, MorreySearch::default())?.value;
    let rhs = PIECE_OVERLAP.powf(params.gap()) * d.powf(params.lambda()) * sequence_norm;
    Ok(EmbeddingNormRow {
        lhs,
        rhs,
        overlap: PIECE_OVERLAP,
        doubling_d: d,
        sequence_norm,
        pass: holds(lhs, rhs),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationRow {
    pub j: i64,
    pub x: f64,
    /// `(Tb)_j`.
    pub truncated: f64,
    pub singular: f64,
    pub maximal: f64,
    /// `2 S(f)(x) + 4 (Mf)(x)`.
    pub rhs: f64,
    pub pass: bool,
}

/// Checks `(Tb)_j <= 2 S(f)(x) + 4 (Mf)(x)` at `samples` interior points
/// `x in (j - 1/4, j + 1/4)` for every `j` in `[j_lo, j_hi]`.
pub fn pointwise_domination_check(b: &Seq, j_lo: i64, j_hi: i64, samples: usize) -> Result<Vec<DominationRow>> {
    if samples == 0 || j_hi < j_lo {
        return Err(Error::Empty("domination sample grid"));
    }
    let plan = EvalPlan::new(j_lo.min(b.lo()), j_hi.max(b.hi()))?;
    let t = transforms::truncated_maximal(b, &plan)?;
    let f = embed_sequence(b);
    let mut rows = Vec::with_capacity((j_hi - j_lo + 1) as usize * samples);
    for j in j_lo..=j_hi {
        for s in 0..samples {
            let x = j as f64 - 0.25 + 0.5 * (s as f64 + 0.5) / samples as f64;
            let singular = continuous_singular(&f, x);
            let maximal = continuous_maximal(&f, x);
            let truncated = t.get(j);
            let rhs = 2.0 * singular + 4.0 * maximal;
            rows.push(DominationRow {
                j,
                x,
                truncated,
                singular,
                maximal,
                rhs,
                pass: holds(truncated, rhs),
            });
        }
    }
    Ok(rows)
}
