mod common;

use common::{hilbert_oracle, random_seq, rng};
use dhm_core::seq::Seq;
use dhm_core::transforms::{
    distribution_function, hilbert_at, hilbert_fast, hilbert_naive, is_mean_zero, l1_tail_bound, tail_bound,
    truncated_maximal,
};
use dhm_core::{EvalPlan, TailPolicy};
use rand::RngExt;

#[test]
fn delta_gives_reciprocals_bit_for_bit() {
    let plan = EvalPlan::symmetric(500).unwrap();
    let h = hilbert_naive(&Seq::delta(0), &plan).unwrap();
    for (n, v) in h.iter() {
        let expect = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        assert_eq!(v, expect, "n = {n}");
    }
}

#[test]
fn shifted_delta_gives_shifted_reciprocals() {
    let plan = EvalPlan::new(-40, 60).unwrap();
    let h = hilbert_naive(&Seq::delta(7), &plan).unwrap();
    for (n, v) in h.iter() {
        let expect = if n == 7 { 0.0 } else { 1.0 / (n - 7) as f64 };
        assert_eq!(v, expect);
    }
}

#[test]
fn naive_matches_double_loop_oracle() {
    let mut r = rng(11);
    for _ in 0..200 {
        let b = random_seq(&mut r, 17, 30);
        let plan = EvalPlan::around(&b, 40);
        let h = hilbert_naive(&b, &plan).unwrap();
        for (n, v) in h.iter() {
            let (oracle, scale) = hilbert_oracle(&b, n);
            assert!(
                (v - oracle).abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE),
                "n = {n}: {v} vs {oracle}"
            );
        }
    }
}

#[test]
fn fast_matches_naive_at_window_4096() {
    let mut r = rng(12);
    for _ in 0..5 {
        let len = r.random_range(1..=1024);
        let b = Seq::from_window(-512, (0..len).map(|_| r.random_range(-1.0..=1.0)).collect()).unwrap();
        let plan = EvalPlan::new(-2048, 2047).unwrap();
        let naive = hilbert_naive(&b, &plan).unwrap();
        let fast = hilbert_fast(&b, &plan).unwrap();
        let scale = naive.values.max_abs();
        for ((n, a), (_, f)) in naive.iter().zip(fast.iter()) {
            assert!((a - f).abs() <= 1e-9 * scale, "n = {n}");
        }
        assert_eq!(naive.tail_bound, fast.tail_bound);
    }
}

#[test]
fn fast_handles_single_point_and_offset_windows() {
    let b = Seq::new(vec![2.0, -3.0, 0.5], 100).unwrap();
    for plan in [EvalPlan::new(100, 102).unwrap(), EvalPlan::new(-5, 300).unwrap()] {
        let naive = hilbert_naive(&b, &plan).unwrap();
        let fast = hilbert_fast(&b, &plan).unwrap();
        for ((_, a), (_, f)) in naive.iter().zip(fast.iter()) {
            assert!((a - f).abs() <= 1e-12);
        }
    }
}

#[test]
fn window_must_contain_support() {
    let b = Seq::new(vec![1.0, 1.0], 10).unwrap();
    let plan = EvalPlan::new(0, 10).unwrap();
    assert_eq!(hilbert_naive(&b, &plan).unwrap_err().code(), "out-of-window");
    assert_eq!(hilbert_fast(&b, &plan).unwrap_err().code(), "out-of-window");
    assert_eq!(truncated_maximal(&b, &plan).unwrap_err().code(), "out-of-window");
}

/// Every truncation `sum_{|n-m| >= k} b_m / (n - m)` summed directly.
fn truncated_oracle(b: &Seq, n: i64) -> f64 {
    let far = (n - b.lo()).abs().max((b.hi() - n).abs());
    (1..=far.max(1))
        .map(|k| {
            b.iter()
                .filter(|&(m, _)| (n - m).abs() >= k)
                .map(|(m, v)| v / (n - m) as f64)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn truncated_maximal_matches_exhaustive_sup() {
    let mut r = rng(13);
    for _ in 0..100 {
        let b = random_seq(&mut r, 17, 10);
        let plan = EvalPlan::around(&b, 25);
        let t = truncated_maximal(&b, &plan).unwrap();
        let h = hilbert_naive(&b, &plan).unwrap();
        for (n, v) in t.iter() {
            let oracle = truncated_oracle(&b, n);
            assert!((v - oracle).abs() <= 1e-13 * (1.0 + oracle), "n = {n}: {v} vs {oracle}");
            assert!(h.get(n).abs() <= v);
        }
    }
}

#[test]
fn distribution_function_matches_direct_count() {
    let mut r = rng(14);
    for _ in 0..20 {
        let b = random_seq(&mut r, 17, 10);
        let plan = EvalPlan::around(&b, 200);
        let h = hilbert_naive(&b, &plan).unwrap();
        for level in [1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0] {
            let direct = (plan.eval_lo..=plan.eval_hi)
                .filter(|&n| hilbert_oracle(&b, n).0.abs() > level * (1.0 + 1e-12))
                .count();
            let direct_loose = (plan.eval_lo..=plan.eval_hi)
                .filter(|&n| hilbert_oracle(&b, n).0.abs() > level * (1.0 - 1e-12))
                .count();
            let got = distribution_function(&h, level).unwrap();
            assert!(got.count >= direct && got.count <= direct_loose);
            assert_eq!(got.lower_bound, h.tail_bound > level);
        }
    }
    let h = hilbert_naive(&Seq::delta(0), &EvalPlan::symmetric(10).unwrap()).unwrap();
    assert!(distribution_function(&h, 0.0).is_err());
    // |1/n| > 0.3 for n in {-3, ..., 3} \ {0}
    assert_eq!(distribution_function(&h, 0.3).unwrap().count, 6);
}

#[test]
fn tail_bounds_dominate_outside_values() {
    let mut r = rng(15);
    for _ in 0..20 {
        let b = random_seq(&mut r, 17, 10);
        let plan = EvalPlan::around(&b, 30);
        let general = tail_bound(&b, &plan);
        for step in 1..=50 {
            for n in [plan.eval_lo - step * step, plan.eval_hi + step * step] {
                assert!(hilbert_at(&b, n).abs() <= general * (1.0 + 1e-12), "n = {n}");
            }
        }
    }
}

#[test]
fn analytic_tail_dominates_mean_zero_outside_values() {
    let mut r = rng(16);
    for _ in 0..20 {
        let len = r.random_range(2..=17);
        let mut values: Vec<f64> = (0..len - 1)
            .map(|_| r.random_range(-1024..=1024) as f64 / 1024.0)
            .collect();
        values.push(-values.iter().sum::<f64>());
        let b = Seq::from_window(r.random_range(-10..=10), values).unwrap();
        assert!(is_mean_zero(&b));
        let plan = EvalPlan::around(&b, 30).with_tail_policy(TailPolicy::AnalyticTail);
        let bound = tail_bound(&b, &plan);
        assert!(bound <= tail_bound(&b, &EvalPlan::around(&b, 30)));
        for step in 1..=50 {
            for n in [plan.eval_lo - step * step, plan.eval_hi + step * step] {
                assert!(hilbert_at(&b, n).abs() <= bound * (1.0 + 1e-12) + 1e-300, "n = {n}");
            }
        }
        // Summed tail against a long direct sum on both sides.
        let outside: f64 = (1..=20000)
            .map(|s| hilbert_at(&b, plan.eval_lo - s).abs() + hilbert_at(&b, plan.eval_hi + s).abs())
            .sum();
        assert!(outside <= l1_tail_bound(&b, &plan));
    }
}

#[test]
fn l1_tail_is_infinite_without_mean_zero() {
    let b = Seq::new(vec![1.0, 0.5], 0).unwrap();
    assert!(l1_tail_bound(&b, &EvalPlan::around(&b, 5)).is_infinite());
}

/// For `b = (1, -1)` at indices 0, 1 the transform is `1/n - 1/(n-1)`,
/// which telescopes: `||Hb||_1 = 4`.
#[test]
fn pair_l1_norm_telescopes_to_four() {
    let b = Seq::new(vec![1.0, -1.0], 0).unwrap();
    for pad in [10, 100, 1000, 10000] {
        let plan = EvalPlan::around(&b, pad);
        let h = hilbert_naive(&b, &plan).unwrap();
        let windowed: f64 = h.values.values().iter().map(|v| v.abs()).sum();
        // Each side outside the window telescopes to 1/(pad + 1).
        let outside = 2.0 / (pad + 1) as f64;
        assert!((windowed + outside - 4.0).abs() < 1e-12, "pad = {pad}");
        assert!(windowed + l1_tail_bound(&b, &plan) >= 4.0 - 1e-12);
    }
}
