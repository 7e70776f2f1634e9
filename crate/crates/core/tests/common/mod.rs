#![allow(dead_code)]

use dhm_core::embedding::PiecewiseConstFn;
use dhm_core::seq::{Seq, Weight};
use dhm_core::MorreyParams;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform values in `[-1, 1]` on a random window of length `1..=max_len`
/// whose left end lies in `[-offset_range, offset_range]`.
pub fn random_seq(rng: &mut ChaCha8Rng, max_len: usize, offset_range: i64) -> Seq {
    let len = rng.random_range(1..=max_len);
    let lo = rng.random_range(-offset_range..=offset_range);
    let values = (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Seq::from_window(lo, values).unwrap()
}

/// Direct double loop: `((Hb)_n, sum_m |b_m / (n - m)|)`.
pub fn hilbert_oracle(b: &Seq, n: i64) -> (f64, f64) {
    let mut total = 0.0;
    let mut scale = 0.0;
    for (m, v) in b.iter() {
        if m != n {
            let term = v / (n - m) as f64;
            total += term;
            scale += term.abs();
        }
    }
    (total, scale)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Sup of the Morrey ratio over every window `|k - m| <= n` with
/// `|m| <= 64` and `n <= 64` (at most 129 points), summed directly.
pub fn morrey_oracle(b: &Seq, w: &Weight, params: MorreyParams) -> f64 {
    let p = params.p();
    let mut best = 0.0f64;
    for m in -64..=64i64 {
        for n in 0..=64i64 {
            let num: f64 = (m - n..=m + n)
                .map(|k| b.get(k).abs().powf(p) * w.get(k).unwrap())
                .sum();
            let den: f64 = (m - n..=m + n).map(|k| w.get(k).unwrap()).sum();
            best = best.max(num.powf(1.0 / p) / den.powf(params.lambda()));
        }
    }
    best
}

const STEP: f64 = 1e-4;

/// Value of `f` on the open piece containing `y`.
pub fn f_at(f: &PiecewiseConstFn, y: f64) -> f64 {
    let bp = f.breakpoints();
    match bp.iter().rposition(|&t| t <= y) {
        Some(i) if i + 1 < bp.len() => f.values()[i],
        _ => 0.0,
    }
}

/// Composite Simpson on `[a, b]` with step close to `STEP`.
pub fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = (((b - a) / STEP).ceil() as usize).max(2) & !1;
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for i in 1..n {
        s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `int_{|x-y| > eps} f(y) / (x - y) dy` by Simpson on each smooth stretch,
/// the excised interval removed.
pub fn truncated_quadrature(f: &PiecewiseConstFn, x: f64, eps: f64) -> f64 {
    let bp = f.breakpoints();
    let mut total = 0.0;
    for i in 0..bp.len() - 1 {
        let v = f.values()[i];
        if v == 0.0 {
            continue;
        }
        let (a, b) = (bp[i], bp[i + 1]);
        let kernel = |y: f64| v / (x - y);
        total += simpson(kernel, a, b.min(x - eps));
        total += simpson(kernel, a.max(x + eps), b);
    }
    total
}

/// `S(f)(x)` as the largest truncation over a dense radius grid that also
/// contains every radius at which `x +- eps` meets a breakpoint.
pub fn singular_oracle(f: &PiecewiseConstFn, x: f64) -> f64 {
    let mut radii: Vec<f64> = f
        .breakpoints()
        .iter()
        .map(|&t| (t - x).abs())
        .filter(|&r| r > 0.0)
        .collect();
    let far = radii.iter().cloned().fold(0.0, f64::max);
    let mut r = 1e-3;
    while r < far {
        radii.push(r);
        r += 0.01;
    }
    radii
        .into_iter()
        .map(|eps| truncated_quadrature(f, x, eps).abs())
        .fold(0.0, f64::max)
}

/// `M(f)(x)` from the cumulative integral of `|f|` by Simpson on a dense
/// grid that contains the breakpoints.
pub fn maximal_oracle(f: &PiecewiseConstFn, x: f64) -> f64 {
    let bp = f.breakpoints();
    let (lo, hi) = (bp[0] - 1.0, bp[bp.len() - 1] + 1.0);
    let mut nodes: Vec<f64> = bp.to_vec();
    let mut y = lo;
    while y <= hi {
        nodes.push(y);
        y += 0.01;
    }
    nodes.push(x);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let xi = nodes.iter().position(|&t| t == x).unwrap();
    let mut best = f_at(f, x).abs().max(f_at(f, x - 1e-12).abs());
    let mut acc = 0.0;
    for j in xi + 1..nodes.len() {
        let (a, b) = (nodes[j - 1], nodes[j]);
        acc += simpson(|t| f_at(f, t).abs(), a + 1e-12, b - 1e-12);
        best = best.max(acc / (b - x));
    }
    acc = 0.0;
    for j in (0..xi).rev() {
        let (a, b) = (nodes[j], nodes[j + 1]);
        acc += simpson(|t| f_at(f, t).abs(), a + 1e-12, b - 1e-12);
        best = best.max(acc / (x - a));
    }
    best
}
