//! The discrete Hilbert transform `(Hb)_n = sum_{m != n} b_m / (n - m)`,
//! its maximal truncations, and level-set counts.
//!
//! For a finitely supported `b` the defining sum is finite at every `n`, so
//! each value is computed exactly (up to rounding); no principal-value limit
//! is involved. Values are produced on an evaluation window and carry a
//! uniform bound for everything outside it.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::params::{EvalPlan, TailPolicy};
use crate::seq::Seq;

/// Transform values on an evaluation window plus a bound on `|(Hb)_n|` for
/// every `n` outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub values: Seq,
    pub tail_bound: f64,
}

impl TransformResult {
    /// `(n, (Hb)_n)` over the window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter()
    }

    pub fn get(&self, n: i64) -> f64 {
        self.values.get(n)
    }
}

/// `(Hb)_n` by direct summation in increasing `m`.
///
/// Every routine that needs bit-identical agreement with the naive
/// transform goes through this function.
pub fn hilbert_at(b: &Seq, n: i64) -> f64 {
    let mut acc = 0.0;
    for (m, v) in b.iter() {
        if m != n {
            acc += v / (n - m) as f64;
        }
    }
    acc
}

fn edge_distances(b: &Seq, plan: &EvalPlan) -> (i64, i64) {
    (b.lo() - plan.eval_lo + 1, plan.eval_hi + 1 - b.hi())
}

/// Sum with Neumaier compensation; used to decide mean-zero-ness.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn is_mean_zero(b: &Seq) -> bool {
    compensated_sum(b.values()) == 0.0
}

/// First absolute moment `sum |b_m| |m - c|` about a weighted median `c` of
/// `|b|`, which minimizes it over the support.
fn first_moment(b: &Seq) -> f64 {
    let total = b.l1_norm();
    let mut acc = 0.0;
    let mut center = b.lo();
    for (m, v) in b.iter() {
        acc += v.abs();
        if 2.0 * acc >= total {
            center = m;
            break;
        }
    }
    b.iter().map(|(m, v)| v.abs() * (m - center).abs() as f64).sum()
}

/// Uniform bound on `|(Hb)_n|` for `n` outside the plan's window.
///
/// Always `||b||_1 / d` with `d` the distance from the window edge to the
/// support. Under [`TailPolicy::AnalyticTail`] and `sum b = 0` the tighter
/// `A / d^2` is used, where `A` is the first absolute moment of `b` about a
/// support point `c`: `(Hb)_n = sum b_m (m - c) / ((n - m)(n - c))`.
pub fn tail_bound(b: &Seq, plan: &EvalPlan) -> f64 {
    let (dl, dr) = edge_distances(b, plan);
    let d = dl.min(dr).max(1) as f64;
    let basic = b.l1_norm() / d;
    if plan.tail_policy == TailPolicy::AnalyticTail && is_mean_zero(b) {
        basic.min(first_moment(b) / (d * d))
    } else {
        basic
    }
}

/// Upper bound on `sum_{n outside window} |(Hb)_n|` for mean-zero `b`.
///
/// Each side is `A * sum_{j >= d} 1/j^2 <= A / (d - 1/2)` (midpoint rule on
/// the convex `1/x^2`). Returns `+inf` when `b` is not mean-zero, where
/// the tail is not summable.
pub fn l1_tail_bound(b: &Seq, plan: &EvalPlan) -> f64 {
    if !is_mean_zero(b) {
        return f64::INFINITY;
    }
    let (dl, dr) = edge_distances(b, plan);
    let a = first_moment(b);
    a / (dl as f64 - 0.5) + a / (dr as f64 - 0.5)
}

/// Upper bound on `sum_{n outside window} |(Hb)_n|^p` for `p > 1`, from
/// `|(Hb)_n| <= ||b||_1 / dist(n, support)`.
pub fn lp_tail_bound(b: &Seq, plan: &EvalPlan, p: f64) -> f64 {
    if p <= 1.0 {
        return f64::INFINITY;
    }
    let (dl, dr) = edge_distances(b, plan);
    let side = |d: i64| (d as f64 - 0.5).powf(1.0 - p) / (p - 1.0);
    b.l1_norm().powf(p) * (side(dl) + side(dr))
}

/// Hilbert transform by direct summation; `O(window * support)`.
pub fn hilbert_naive(b: &Seq, plan: &EvalPlan) -> Result<TransformResult> {
    plan.require_support(b)?;
    let values = (plan.eval_lo..=plan.eval_hi).map(|n| hilbert_at(b, n)).collect();
    Ok(TransformResult {
        values: Seq::from_window(plan.eval_lo, values)?,
        tail_bound: tail_bound(b, plan),
    })
}

/// Hilbert transform as a linear convolution with the kernel slice
/// `k -> 1/k` (zero at `k = 0`), evaluated with a zero-padded FFT.
///
/// The kernel covers offsets `[eval_lo - hi, eval_hi - lo]`, `K = W + L - 1`
/// entries for window length `W` and support length `L`. The outputs needed
/// sit at linear-convolution indices `[L - 1, L + W - 2]`, which no circular
/// alias reaches once the transform length is at least `K`.
pub fn hilbert_fast(b: &Seq, plan: &EvalPlan) -> Result<TransformResult> {
    plan.require_support(b)?;
    let support_len = b.len();
    let window_len = plan.len();
    let kernel_len = window_len + support_len - 1;
    let kmin = plan.eval_lo - b.hi();
    let size = kernel_len.next_power_of_two();

    let mut signal = vec![Complex::new(0.0, 0.0); size];
    for (slot, &v) in signal.iter_mut().zip(b.values()) {
        slot.re = v;
    }
    let mut kernel = vec![Complex::new(0.0, 0.0); size];
    for (j, slot) in kernel.iter_mut().take(kernel_len).enumerate() {
        let k = kmin + j as i64;
        if k != 0 {
            slot.re = 1.0 / k as f64;
        }
    }

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    forward.process(&mut signal);
    forward.process(&mut kernel);
    for (s, k) in signal.iter_mut().zip(&kernel) {
        *s *= k;
    }
    inverse.process(&mut signal);

    let scale = 1.0 / size as f64;
    let values = signal[support_len - 1..support_len - 1 + window_len]
        .iter()
        .map(|c| c.re * scale)
        .collect();
    Ok(TransformResult {
        values: Seq::from_window(plan.eval_lo, values)?,
        tail_bound: tail_bound(b, plan),
    })
}

/// `(Tb)_n = sup_{k >= 1} | sum_{|n - m| >= k} b_m / (n - m) |` on the window.
///
/// Pairing the terms at distance `d` gives `t(d) = (b_{n-d} - b_{n+d}) / d`,
/// and each truncation is a suffix sum of `t`. Suffix sums are accumulated
/// from the farthest support point inward. Early exit: for `n` outside the
/// support every `t(d)` with `d < dist(n, support)` vanishes, so the
/// remaining truncations all repeat the full sum and the loop stops there.
/// The `k = 1` truncation is taken from [`hilbert_at`], so `(Tb)_n >= |(Hb)_n|`
/// holds exactly against the naive transform.
pub fn truncated_maximal(b: &Seq, plan: &EvalPlan) -> Result<Seq> {
    plan.require_support(b)?;
    let values = (plan.eval_lo..=plan.eval_hi)
        .map(|n| truncated_maximal_at(b, n))
        .collect();
    Seq::from_window(plan.eval_lo, values)
}

fn truncated_maximal_at(b: &Seq, n: i64) -> f64 {
    let far = (n - b.lo()).max(b.hi() - n);
    let near = if n < b.lo() {
        b.lo() - n
    } else if n > b.hi() {
        n - b.hi()
    } else {
        0
    };
    let mut best = hilbert_at(b, n).abs();
    let mut suffix = 0.0;
    let mut d = far;
    while d >= 2 && d >= near {
        suffix += (b.get(n - d) - b.get(n + d)) / d as f64;
        best = best.max(suffix.abs());
        d -= 1;
    }
    best
}

/// Number of window indices with `|s_n| > level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelCount {
    pub count: usize,
    /// Indices outside the window may also exceed the level, so `count` is
    /// only a lower bound on the full distribution function.
    pub lower_bound: bool,
}

/// The distribution function `#{n : |(Hb)_n| > level}` restricted to the
/// evaluation window of `result`.
pub fn distribution_function(result: &TransformResult, level: f64) -> Result<LevelCount> {
    if !(level > 0.0) {
        return Err(Error::InvalidParameter(format!("level {level} must be > 0")));
    }
    let count = result.values.values().iter().filter(|v| v.abs() > level).count();
    Ok(LevelCount {
        count,
        lower_bound: result.tail_bound > level,
    })
}
