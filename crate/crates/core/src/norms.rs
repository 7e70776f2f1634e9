//! Sequence norms (`l_p`, discrete Morrey, discrete weighted Morrey) and
//! weight constants (discrete Muckenhoupt, doubling, reverse doubling).
//!
//! Morrey windows are the centered sets `S_{m,n} = {k : |k - m| <= n}`,
//! reported as `(m, n)` witnesses. Muckenhoupt witnesses are instead the
//! endpoint pair `(m, n)` of the interval `[m, n]`.
//!
//! All window sums are accumulated incrementally from the window center
//! outward rather than as prefix differences, which keeps small windows
//! accurate next to large ones.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{EvalPlan, MorreyParams};
use crate::seq::{Seq, Weight};

/// Relative slack used by every `lhs <= rhs` pass decision.
pub const PASS_SLACK: f64 = 1e-9;

pub fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + PASS_SLACK) || lhs <= rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

/// A supremum over windows together with the window attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub exactness: Exactness,
    pub witness: (i64, i64),
}

pub fn lp_norm(b: &Seq, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} < 1")));
    }
    Ok(b.values().iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p))
}

/// `(sum |b_k|^p w_k)^{1/p}` over the support.
pub fn weighted_lp_norm(b: &Seq, w: &Weight, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} < 1")));
    }
    w.require(b.lo(), b.hi())?;
    Ok(b.iter()
        .map(|(k, v)| v.abs().powf(p) * w.at(k))
        .sum::<f64>()
        .powf(1.0 / p))
}

/// Best candidate under the witness order: larger value, then smaller
/// radius, then smaller center.
fn better(a: (f64, i64, i64), b: (f64, i64, i64)) -> (f64, i64, i64) {
    use std::cmp::Ordering::*;
    match a.0.partial_cmp(&b.0).unwrap_or(Equal) {
        Greater => a,
        Less => b,
        Equal => {
            if (a.2, a.1) <= (b.2, b.1) {
                a
            } else {
                b
            }
        }
    }
}

/// Discrete weighted Morrey norm
/// `sup_{m,n} (sum_{S_{m,n}} |b_k|^p w_k)^{1/p} / (sum_{S_{m,n}} w_k)^lambda`.
///
/// The sup is exact for every strictly positive weight. Let `S` be any
/// window meeting the support in `[a, e]`. Some centered window `S'` with
/// `[a, e] ⊆ S' ⊆ S` exists: `[a, e]` itself when `e - a` is even, otherwise
/// `[a-1, e]` or `[a, e+1]`, one of which lies in `S` because `S` has odd
/// length. `S'` keeps the numerator and, since `w > 0`, does not increase
/// the denominator. Hence the sup is attained by a centered window inside
/// `[lo - 1, hi + 1]`, and all of those are enumerated. The plan's
/// `search_margin` widens this domain on both sides.
pub fn weighted_morrey_norm(b: &Seq, w: &Weight, params: MorreyParams, plan: &EvalPlan) -> Result<NormValue> {
    let dom_lo = b.lo() - 1 - plan.search_margin;
    let dom_hi = b.hi() + 1 + plan.search_margin;
    w.require(dom_lo, dom_hi)?;

    let p = params.p();
    let den_exp = params.lambda() * p;
    let mass = |k: i64| {
        let v = b.get(k);
        if v == 0.0 {
            0.0
        } else {
            v.abs().powf(p) * w.at(k)
        }
    };

    // Maximize num / den^(lambda p), the p-th power of the ratio.
    //
    // Early exit: num never exceeds the total mass (inflated to absorb
    // summation rounding) and den only grows with n, so once
    // total / den^(lambda p) falls to the best value known, no larger radius
    // at this center can win. Ties need not be explored: a later radius
    // loses to the current one, and any radius >= 1 loses to the singleton
    // windows that seed the threshold.
    let total = (dom_lo..=dom_hi).map(mass).sum::<f64>() * (1.0 + 1e-9);
    let floor = (dom_lo..=dom_hi)
        .map(|m| mass(m) / pow_den(w.at(m), den_exp))
        .fold(0.0, f64::max);
    let best = (dom_lo..=dom_hi)
        .into_par_iter()
        .map(|m| {
            let mut num = mass(m);
            let mut den = w.at(m);
            let mut best = (num / pow_den(den, den_exp), 0, m);
            let reach = (m - dom_lo).min(dom_hi - m);
            for n in 1..=reach {
                num += mass(m - n) + mass(m + n);
                den += w.at(m - n) + w.at(m + n);
                let scale = pow_den(den, den_exp);
                best = better(best, (num / scale, n, m));
                if den_exp > 0.0 && total / scale <= best.0.max(floor) {
                    break;
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, i64::MAX, i64::MAX), better);

    Ok(NormValue {
        value: best.0.powf(1.0 / p),
        exactness: Exactness::Exact,
        witness: (best.2, best.1),
    })
}

fn pow_den(den: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else if exponent == 1.0 {
        den
    } else {
        den.powf(exponent)
    }
}

/// Discrete (unweighted) Morrey norm with `|S_{m,n}|^{-lambda} = (2n+1)^{-lambda}`.
pub fn discrete_morrey_norm(b: &Seq, params: MorreyParams) -> Result<NormValue> {
    let w = Weight::ones(b.lo() - 1, b.hi() + 1);
    let plan = EvalPlan::around(b, 1);
    weighted_morrey_norm(b, &w, params, &plan)
}

/// The Morrey ratio on the single window `S_{m,n}`, by direct summation.
pub fn morrey_ratio_at(b: &Seq, w: &Weight, params: MorreyParams, m: i64, n: i64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!("radius {n} < 0")));
    }
    w.require(m - n, m + n)?;
    let p = params.p();
    let num: f64 = (m - n..=m + n).map(|k| b.get(k).abs().powf(p) * w.at(k)).sum();
    let den: f64 = (m - n..=m + n).map(|k| w.at(k)).sum();
    Ok(num.powf(1.0 / p) / den.powf(params.lambda()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApExactness {
    /// Exact supremum over all intervals inside the searched window.
    WindowExact,
    /// The value kept increasing as the window grew.
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApConstant {
    pub value: f64,
    pub exactness: ApExactness,
    /// Interval endpoints `[m, n]`.
    pub witness: (i64, i64),
}

/// Discrete Muckenhoupt constant over intervals `[m, n] ⊆ [lo, hi]`:
/// `sup (sum w)(sum w^{-1/(p-1)})^{p-1} / (n - m + 1)^p`.
pub fn ap_constant(w: &Weight, p: f64, lo: i64, hi: i64) -> Result<ApConstant> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Muckenhoupt constant needs 1 < p < inf, got p = {p}"
        )));
    }
    if hi < lo {
        return Err(Error::Empty("Muckenhoupt search window"));
    }
    w.require(lo, hi)?;
    let dual = -1.0 / (p - 1.0);
    let duals: Vec<f64> = (lo..=hi).map(|k| w.at(k).powf(dual)).collect();
    let best = (lo..=hi)
        .into_par_iter()
        .map(|m| {
            let mut sw = 0.0;
            let mut sd = 0.0;
            let mut best = (f64::NEG_INFINITY, i64::MAX, i64::MAX);
            for n in m..=hi {
                sw += w.at(n);
                sd += duals[(n - lo) as usize];
                let len = (n - m + 1) as f64;
                let value = (sw / len) * (sd / len).powf(p - 1.0);
                best = better(best, (value, n, m));
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, i64::MAX, i64::MAX), better);
    Ok(ApConstant {
        value: best.0,
        exactness: ApExactness::WindowExact,
        witness: (best.2, best.1),
    })
}

/// Grid for the doubling search: centers `m` in `[m_lo, m_hi]` and
/// `delta = j/2` for `j = 1..=max_half_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublingSearch {
    pub m_lo: i64,
    pub m_hi: i64,
    pub max_half_steps: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingValue {
    pub value: f64,
    /// `(m, delta)` attaining the max; `delta = 0` when no ratio exceeds 1.
    pub witness: (i64, f64),
}

/// Smallest `D` with `sum_{|k-m| <= 2 delta} w_k <= D sum_{|k-m| <= delta} w_k`
/// over the grid.
///
/// As a function of real `delta` both integer windows only change where
/// `2 delta` crosses an integer, so the half-integer grid realizes every
/// value the ratio takes; for `delta < 1/2` the ratio is exactly 1.
pub fn doubling_constant(w: &Weight, search: DoublingSearch) -> Result<DoublingValue> {
    if search.m_hi < search.m_lo || search.max_half_steps < 0 {
        return Err(Error::InvalidParameter(format!("empty doubling grid {search:?}")));
    }
    let reach = search.max_half_steps;
    w.require(search.m_lo - reach, search.m_hi + reach)?;
    let best = (search.m_lo..=search.m_hi)
        .into_par_iter()
        .map(|m| {
            let mut best = (1.0, 0i64, m);
            let mut big = w.at(m);
            let mut small = w.at(m);
            for j in 1..=reach {
                big += w.at(m - j) + w.at(m + j);
                if j % 2 == 0 {
                    let r = j / 2;
                    small += w.at(m - r) + w.at(m + r);
                }
                best = better(best, (big / small, j, m));
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, i64::MAX, i64::MAX), better);
    Ok(DoublingValue {
        value: best.0,
        witness: (best.2, best.1 as f64 / 2.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseDoubling {
    pub value: f64,
    pub witness: (i64, i64),
}

/// `D_1 = min sum_{|k-m| <= 2n+1} w_k / sum_{|k-m| <= n} w_k` over
/// `n = 0..=max_n` and every center whose largest window fits the weight.
pub fn reverse_doubling_constant(w: &Weight, max_n: i64) -> Result<ReverseDoubling> {
    if max_n < 0 {
        return Err(Error::InvalidParameter(format!("max_n = {max_n} < 0")));
    }
    let reach = 2 * max_n + 1;
    let (m_lo, m_hi) = (w.lo() + reach, w.hi() - reach);
    if m_hi < m_lo {
        return Err(Error::OutOfWindow {
            lo: -reach,
            hi: reach,
            window_lo: w.lo(),
            window_hi: w.hi(),
        });
    }
    let worst = |a: (f64, i64, i64), b: (f64, i64, i64)| {
        let flipped = better((-a.0, a.1, a.2), (-b.0, b.1, b.2));
        (-flipped.0, flipped.1, flipped.2)
    };
    let best = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let mut small = w.at(m);
            let mut big = w.at(m - 1) + w.at(m) + w.at(m + 1);
            let mut best = (big / small, 0, m);
            for n in 1..=max_n {
                small += w.at(m - n) + w.at(m + n);
                for r in [2 * n, 2 * n + 1] {
                    big += w.at(m - r) + w.at(m + r);
                }
                best = worst(best, (big / small, n, m));
            }
            best
        })
        .reduce(|| (f64::INFINITY, i64::MAX, i64::MAX), worst);
    Ok(ReverseDoubling {
        value: best.0,
        witness: (best.2, best.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRow {
    pub i: u32,
    /// `sum_{k=m-2^i}^{m+2^i} w_k`.
    pub window_mass: f64,
    /// `D_1^{i-1} (w_{m-1} + w_m + w_{m+1})`.
    pub bound: f64,
    pub pass: bool,
}

/// Checks `sum_{|k-m| <= 2^i} w_k >= D_1^{i-1} (w_{m-1} + w_m + w_{m+1})`
/// for `i = 1..=i_max`, with the three-point core centered at `m`.
pub fn corollary_check(w: &Weight, m: i64, i_max: u32, d1: f64) -> Result<Vec<CorollaryRow>> {
    if i_max == 0 || i_max > 40 {
        return Err(Error::InvalidParameter(format!("i_max = {i_max} out of range 1..=40")));
    }
    let reach = 1i64 << i_max;
    w.require(m - reach, m + reach)?;
    let core = w.at(m - 1) + w.at(m) + w.at(m + 1);
    let mut rows = Vec::with_capacity(i_max as usize);
    for i in 1..=i_max {
        let r = 1i64 << i;
        let window_mass: f64 = (m - r..=m + r).map(|k| w.at(k)).sum();
        let bound = d1.powi(i as i32 - 1) * core;
        rows.push(CorollaryRow {
            i,
            window_mass,
            bound,
            pass: holds(bound, window_mass),
        });
    }
    Ok(rows)
}

/// Every weight constant the verification checks consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConstants {
    pub ap_constant: f64,
    pub ap_exactness: ApExactness,
    pub doubling_d: f64,
    pub reverse_doubling_d1: f64,
    /// `log2(D_1)`.
    pub delta_exponent: f64,
}

impl WeightConstants {
    pub fn measure(w: &Weight, p: f64, ap_window: (i64, i64), doubling: DoublingSearch, max_n: i64) -> Result<Self> {
        let ap = ap_constant(w, p, ap_window.0, ap_window.1)?;
        let d = doubling_constant(w, doubling)?;
        let d1 = reverse_doubling_constant(w, max_n)?;
        Ok(WeightConstants {
            ap_constant: ap.value,
            ap_exactness: ap.exactness,
            doubling_d: d.value,
            reverse_doubling_d1: d1.value,
            delta_exponent: d1.value.log2(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::WeightFamily;

    fn params(p: f64, l: f64) -> MorreyParams {
        MorreyParams::new(p, l).unwrap()
    }

    #[test]
    fn lp_examples() {
        assert_eq!(lp_norm(&Seq::delta(4), 3.0).unwrap(), 1.0);
        let pair = Seq::new(vec![1.0, -1.0], 0).unwrap();
        assert!((lp_norm(&pair, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let b = Seq::new(vec![3.0, 4.0], 0).unwrap();
        assert_eq!(lp_norm(&b, 2.0).unwrap(), 5.0);
        assert!(lp_norm(&b, 0.5).is_err());
    }

    #[test]
    fn morrey_delta_and_lambda_zero() {
        for (p, l) in [(1.0, 0.5), (2.0, 0.25), (3.0, 0.1)] {
            let v = discrete_morrey_norm(&Seq::delta(0), params(p, l)).unwrap();
            assert_eq!(v.value, 1.0);
            assert_eq!(v.witness, (0, 0));
        }
        let b = Seq::new(vec![1.0, -2.0, 0.5, 3.0], -1).unwrap();
        let v = discrete_morrey_norm(&b, params(2.0, 0.0)).unwrap();
        assert!((v.value - lp_norm(&b, 2.0).unwrap()).abs() <= 1e-14);
    }

    #[test]
    fn weighted_delta_is_singleton() {
        let w = Weight::from_family(WeightFamily::Power(1.0), -10, 10).unwrap();
        let b = Seq::delta(3);
        let pr = params(2.0, 0.25);
        let v = weighted_morrey_norm(&b, &w, pr, &EvalPlan::around(&b, 1)).unwrap();
        assert!((v.value - 4f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(v.witness, (3, 0));
    }

    #[test]
    fn weighted_norm_needs_weight_coverage() {
        let w = Weight::ones(0, 3);
        let b = Seq::new(vec![1.0, 1.0], 1).unwrap();
        let plan = EvalPlan::around(&b, 1);
        assert!(weighted_morrey_norm(&b, &w, params(2.0, 0.25), &plan).is_ok());
        let b = Seq::new(vec![1.0, 1.0], 0).unwrap();
        assert!(matches!(
            weighted_morrey_norm(&b, &w, params(2.0, 0.25), &plan),
            Err(Error::OutOfWindow { .. })
        ));
    }

    #[test]
    fn witness_reproduces_value() {
        let b = Seq::new(vec![0.3, -1.2, 2.0, 0.0, 0.7], -2).unwrap();
        let w = Weight::from_family(WeightFamily::Power(0.5), -20, 20).unwrap();
        let pr = params(2.5, 0.2);
        let v = weighted_morrey_norm(&b, &w, pr, &EvalPlan::around(&b, 1)).unwrap();
        let again = morrey_ratio_at(&b, &w, pr, v.witness.0, v.witness.1).unwrap();
        assert!((again - v.value).abs() <= 1e-12 * v.value);
    }

    #[test]
    fn zero_sequence_norm() {
        let v = discrete_morrey_norm(&Seq::zero(), params(2.0, 0.25)).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn ap_constant_of_constants_is_one() {
        let w = Weight::ones(-16, 16);
        assert_eq!(ap_constant(&w, 2.0, -16, 16).unwrap().value, 1.0);
        assert_eq!(ap_constant(&w, 3.0, -16, 16).unwrap().value, 1.0);
        let c = Weight::from_family(WeightFamily::Constant(0.37), -16, 16).unwrap();
        assert!((ap_constant(&c, 1.7, -16, 16).unwrap().value - 1.0).abs() < 1e-12);
        assert!(ap_constant(&w, 1.0, -16, 16).is_err());
        assert!(ap_constant(&w, 2.0, -17, 16).is_err());
    }

    #[test]
    fn doubling_of_ones() {
        let w = Weight::ones(-20, 20);
        let one = |j| {
            doubling_constant(
                &w,
                DoublingSearch {
                    m_lo: 0,
                    m_hi: 0,
                    max_half_steps: j,
                },
            )
            .unwrap()
            .value
        };
        // delta = 1/2: three points over one.
        assert_eq!(one(1), 3.0);
        // delta = 3/2 gives 7/3, below the delta = 1/2 value.
        assert_eq!(one(3), 3.0);
        assert!(doubling_constant(
            &w,
            DoublingSearch {
                m_lo: 0,
                m_hi: 0,
                max_half_steps: 21
            }
        )
        .is_err());
        assert_eq!(
            doubling_constant(
                &w,
                DoublingSearch {
                    m_lo: 0,
                    m_hi: 0,
                    max_half_steps: 0
                }
            )
            .unwrap()
            .value,
            1.0
        );
    }

    #[test]
    fn reverse_doubling_of_ones() {
        let w = Weight::ones(-300, 300);
        for max_n in [0, 1, 5, 60] {
            let d1 = reverse_doubling_constant(&w, max_n).unwrap();
            let expect = (4 * max_n + 3) as f64 / (2 * max_n + 1) as f64;
            assert!((d1.value - expect).abs() < 1e-15, "{max_n}: {}", d1.value);
            assert_eq!(d1.witness.1, max_n);
        }
        assert_eq!(reverse_doubling_constant(&w, 0).unwrap().value, 3.0);
        assert!(reverse_doubling_constant(&Weight::ones(-10, 10), 5).is_err());
    }

    #[test]
    fn corollary_on_ones() {
        let w = Weight::ones(-300, 300);
        let d1 = reverse_doubling_constant(&w, 60).unwrap().value;
        let rows = corollary_check(&w, 0, 6, d1).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.pass));
        // i = 1: five points against the three-point core.
        assert_eq!(rows[0].window_mass, 5.0);
        assert_eq!(rows[0].bound, 3.0);
        assert!(corollary_check(&w, 250, 6, d1).is_err());
    }
}
