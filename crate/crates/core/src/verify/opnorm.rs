//! Lower bounds on the norm of `H` on a weighted Morrey space, from trial
//! sequences supported in a fixed box.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::norms::weighted_morrey_norm;
use crate::params::{EvalPlan, MorreyParams};
use crate::seq::{Seq, Weight};
use crate::transforms::hilbert_naive;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Unit impulses at every box index.
    DeltaProbes,
    /// Impulses plus `budget` uniform random trials.
    RandomSearch { budget: usize, seed: u64 },
    /// Impulses, then `budget` single-coordinate line searches starting from
    /// the better of the best impulse and one random trial.
    CoordinateAscent { budget: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpNormEstimate {
    /// Best ratio `||Hb||_{m_{lambda,p,w}} / ||b||_{m_{lambda,p,w}}` found.
    pub value: f64,
    /// Best impulse ratio.
    pub delta_value: f64,
    /// Ratio of the ascent's starting point (equals `value` for other
    /// strategies).
    pub start_value: f64,
    pub witness: Seq,
    pub evaluations: usize,
}

/// Ratio evaluator for a fixed box, window, weight and exponents.
struct Probe<'a> {
    w: &'a Weight,
    params: MorreyParams,
    plan: EvalPlan,
    box_lo: i64,
    box_hi: i64,
    evaluations: usize,
}

impl Probe<'_> {
    fn ratio(&mut self, values: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let b = Seq::from_window(self.box_lo, values.to_vec())?;
        if b.is_zero() {
            return Ok(0.0);
        }
        let nb = weighted_morrey_norm(&b, self.w, self.params, &EvalPlan::around(&b, 1))?.value;
        let h = hilbert_naive(&b, &self.plan)?.values;
        let nh = weighted_morrey_norm(&h, self.w, self.params, &EvalPlan::around(&h, 1))?.value;
        Ok(nh / nb)
    }

    fn len(&self) -> usize {
        (self.box_hi - self.box_lo + 1) as usize
    }
}

/// Best ratio over trial sequences supported in `[box_lo, box_hi]`, with
/// `Hb` evaluated on the box padded by `pad`. The weight must cover the
/// padded box plus one index on each side.
///
/// Every strategy keeps the best value seen, so the estimate never
/// decreases as the budget grows.
pub fn estimate_operator_norm(
    w: &Weight,
    params: MorreyParams,
    box_lo: i64,
    box_hi: i64,
    pad: i64,
    strategy: Strategy,
) -> Result<OpNormEstimate> {
    if box_hi < box_lo || pad < 0 {
        return Err(Error::InvalidParameter(format!(
            "trial box [{box_lo}, {box_hi}] with padding {pad}"
        )));
    }
    let plan = EvalPlan::new(box_lo - pad, box_hi + pad)?;
    w.require(plan.eval_lo - 1, plan.eval_hi + 1)?;
    let mut probe = Probe {
        w,
        params,
        plan,
        box_lo,
        box_hi,
        evaluations: 0,
    };
    let len = probe.len();

    let mut best = (f64::NEG_INFINITY, vec![0.0; len]);
    for i in 0..len {
        let mut v = vec![0.0; len];
        v[i] = 1.0;
        let r = probe.ratio(&v)?;
        if r > best.0 {
            best = (r, v);
        }
    }
    let delta_value = best.0;
    let mut start_value = delta_value;

    match strategy {
        Strategy::DeltaProbes => {}
        Strategy::RandomSearch { budget, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..budget {
                let v = random_trial(&mut rng, len);
                let r = probe.ratio(&v)?;
                if r > best.0 {
                    best = (r, v);
                }
            }
            start_value = best.0;
        }
        Strategy::CoordinateAscent { budget, seed } if budget > 0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = random_trial(&mut rng, len);
            let r = probe.ratio(&v)?;
            if r > best.0 {
                best = (r, v);
            }
            start_value = best.0;
            for step in 0..budget {
                let i = step % len;
                if let Some(found) = line_search(&mut probe, &best.1, i)? {
                    if found.0 > best.0 {
                        best = found;
                    }
                }
            }
        }
        Strategy::CoordinateAscent { .. } => {}
    }

    Ok(OpNormEstimate {
        value: best.0,
        delta_value,
        start_value,
        witness: Seq::from_window(box_lo, best.1)?,
        evaluations: probe.evaluations,
    })
}

fn random_trial(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect()
}

/// Maximizes the ratio along `cos(t) b + sin(t) s e_i`, `t in [-pi/2, pi/2)`,
/// with `s` the largest entry of `b`: a coarse scan brackets the maximum,
/// golden-section search refines it.
fn line_search(probe: &mut Probe<'_>, b: &[f64], i: usize) -> Result<Option<(f64, Vec<f64>)>> {
    const COARSE: usize = 16;
    const GOLDEN_STEPS: usize = 60;
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let point = |t: f64| {
        let mut v: Vec<f64> = b.iter().map(|x| x * t.cos()).collect();
        v[i] += scale * t.sin();
        v
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let step = 2.0 * half_pi / COARSE as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..COARSE {
        let t = -half_pi + step * k as f64;
        let r = probe.ratio(&point(t))?;
        if r > best.0 {
            best = (r, t);
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut c) = (best.1 - step, best.1 + step);
    let mut x1 = c - inv_phi * (c - a);
    let mut x2 = a + inv_phi * (c - a);
    let mut f1 = probe.ratio(&point(x1))?;
    let mut f2 = probe.ratio(&point(x2))?;
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (c - a);
            f2 = probe.ratio(&point(x2))?;
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - inv_phi * (c - a);
            f1 = probe.ratio(&point(x1))?;
        }
    }
    for (f, t) in [(f1, x1), (f2, x2)] {
        if f > best.0 {
            best = (f, t);
        }
    }
    Ok(best.0.is_finite().then(|| (best.0, point(best.1))))
}
