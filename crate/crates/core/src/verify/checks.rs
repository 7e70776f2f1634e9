//! The individual checks. Each planner turns its config section into
//! independent jobs; every job returns finished rows and never panics on
//! bad input, reporting a rejected row instead.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{parse_all, RunConfig, StrategyKind};
use super::family::{Member, SequenceFamily};
use super::opnorm::{estimate_operator_norm, Strategy};
use super::report::Row;
use crate::embedding::{embedding_norm_check, pointwise_domination_check};
use crate::error::{Error, Result};
use crate::norms::{
    ap_constant, corollary_check, lp_norm, reverse_doubling_constant, weighted_morrey_norm, DoublingSearch,
};
use crate::params::{EvalPlan, MorreyParams};
use crate::seq::{Seq, Weight, WeightFamily};
use crate::transforms::{
    hilbert_fast, hilbert_naive, l1_tail_bound, lp_tail_bound, truncated_maximal, TransformResult,
};

pub type Job = Box<dyn FnOnce() -> Vec<Row> + Send>;

type Planner = fn(&RunConfig) -> Vec<Job>;

fn job(check: &'static str, descriptor: String, f: impl FnOnce() -> Result<Vec<Row>> + Send + 'static) -> Job {
    Box::new(move || f().unwrap_or_else(|e| vec![Row::rejected(check, descriptor, &e)]))
}

/// Direct summation unless the work would be large.
pub(crate) fn transform(b: &Seq, plan: &EvalPlan) -> Result<TransformResult> {
    if (b.len() as u64) * (plan.len() as u64) <= 1 << 22 {
        hilbert_naive(b, plan)
    } else {
        hilbert_fast(b, plan)
    }
}

fn members(specs: &[String], seed: u64, spacing: i64) -> Result<Vec<Member>> {
    let mut out = Vec::new();
    for f in parse_all::<SequenceFamily>(specs)? {
        out.extend(f.members(seed, spacing)?);
    }
    Ok(out)
}

fn params_tag(p: MorreyParams) -> String {
    format!("p={}:lambda={:.6}", p.p(), p.lambda())
}

fn drift(before: f64, after: f64) -> f64 {
    (after / before - 1.0).abs()
}

/// Planners for every enabled check, in a fixed order.
pub fn plan(cfg: &RunConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let planners: [(&str, Planner); 11] = [
        ("riesz", riesz),
        ("weak11", weak11),
        ("l1-log", l1_log),
        ("theorem31", theorem31),
        ("theorem32", theorem32),
        ("embedding-norm", embedding_norm),
        ("domination", domination),
        ("ap-stability", ap_stability),
        ("reverse-doubling", reverse_doubling),
        ("corollary", corollary),
        ("opnorm", opnorm),
    ];
    for (id, planner) in planners {
        if cfg.enabled(id) {
            jobs.extend(planner(cfg));
        }
    }
    jobs
}

/// `||Hb||_p / ||b||_p` on the support padded by `pad`, and the same ratio
/// with the tail bound added to the numerator.
pub fn riesz_ratio(b: &Seq, p: f64, pad: i64) -> Result<(f64, f64)> {
    let plan = EvalPlan::around(b, pad);
    let h = transform(b, &plan)?;
    let nb = lp_norm(b, p)?;
    let windowed = lp_norm(&h.values, p)?;
    let upper = (windowed.powf(p) + lp_tail_bound(b, &plan, p)).powf(1.0 / p);
    Ok((windowed / nb, upper / nb))
}

fn riesz(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "riesz";
    let c = cfg.riesz.clone();
    let (seed, tol) = (cfg.seed, cfg.tolerances.drift);
    c.p.iter()
        .map(|&p| {
            let c = c.clone();
            job(ID, format!("p={p}"), move || {
                if p <= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "the l_p bound for H needs p > 1, got p = {p}"
                    )));
                }
                let mut rows = Vec::new();
                let (mut max1, mut max2) = (0.0f64, 0.0f64);
                for m in members(&c.sequences, seed, 1)? {
                    let (r1, _) = riesz_ratio(&m.seq, p, c.half_width)?;
                    let (r2, upper) = riesz_ratio(&m.seq, p, 2 * c.half_width)?;
                    max1 = max1.max(r1);
                    max2 = max2.max(r2);
                    rows.push(
                        Row::new(ID, format!("p={p}/{}", m.descriptor), r2, upper)
                            .observational()
                            .exactness("lhs=windowed;rhs=windowed+tail")
                            .witness(format!("ratio@half-width={r1}")),
                    );
                }
                rows.push(
                    Row::new(ID, format!("p={p}/drift"), drift(max1, max2), tol)
                        .exactness("window-doubling")
                        .witness(format!("max ratio {max1} -> {max2}")),
                );
                Ok(rows)
            })
        })
        .collect()
}

/// `sup_level level * #{n : |(Hb)_n| > level} / ||b||_1` over the window.
///
/// With `s_1 >= s_2 >= ...` the sorted `|(Hb)_n|`, the count exceeds
/// `j - 1` for every level below `s_j`, so the sup is `max_j j s_j`
/// (approached as the level rises to `s_j`).
pub fn weak_type_constant(b: &Seq, pad: i64) -> Result<f64> {
    let plan = EvalPlan::around(b, pad);
    let h = transform(b, &plan)?;
    let mut s: Vec<f64> = h.values.values().iter().map(|v| v.abs()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let best = s
        .iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v)
        .fold(0.0, f64::max);
    Ok(best / b.l1_norm())
}

fn weak11(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "weak11";
    let c = cfg.weak11.clone();
    let (seed, tol) = (cfg.seed, cfg.tolerances.drift);
    vec![job(ID, "family".into(), move || {
        let mut rows = Vec::new();
        let (mut max1, mut max2) = (0.0f64, 0.0f64);
        for m in members(&c.sequences, seed, 1)? {
            let c1 = weak_type_constant(&m.seq, c.half_width)?;
            let c2 = weak_type_constant(&m.seq, 2 * c.half_width)?;
            max1 = max1.max(c1);
            max2 = max2.max(c2);
            rows.push(
                Row::new(ID, m.descriptor.clone(), c2, c1)
                    .observational()
                    .exactness("lower-bound")
                    .witness("lhs=doubled window, rhs=base window"),
            );
        }
        rows.push(
            Row::new(ID, "max/drift".to_string(), drift(max1, max2), tol)
                .exactness("window-doubling")
                .witness(format!("max {max1} -> {max2}")),
        );
        rows.push(Row::new(ID, "max/finite".to_string(), max2, f64::MAX).exactness("lower-bound"));
        Ok(rows)
    })]
}

/// `(||Hb||_1 windowed, tail bound, 6 sum |b_n| ln(e + |n|))`.
pub fn l1_log_sides(b: &Seq, pad: i64) -> Result<(f64, f64, f64)> {
    if !crate::transforms::is_mean_zero(b) {
        return Err(Error::NotMeanZero { sum: b.sum() });
    }
    let plan = EvalPlan::around(b, pad);
    let h = transform(b, &plan)?;
    let windowed: f64 = h.values.values().iter().map(|v| v.abs()).sum();
    let tail = l1_tail_bound(b, &plan);
    let rhs = 6.0
        * b.iter()
            .map(|(n, v)| v.abs() * (std::f64::consts::E + n.abs() as f64).ln())
            .sum::<f64>();
    Ok((windowed, tail, rhs))
}

fn l1_log(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "l1-log";
    let c = cfg.l1_log.clone();
    let seed = cfg.seed;
    vec![job(ID, "family".into(), move || {
        Ok(members(&c.sequences, seed, 1)?
            .into_iter()
            .map(|m| match l1_log_sides(&m.seq, c.half_width) {
                Ok((windowed, tail, rhs)) => Row::new(ID, m.descriptor, windowed + tail, rhs)
                    .exactness("lhs=windowed+analytic-tail")
                    .witness(format!("windowed={windowed},tail={tail}")),
                Err(e) => Row::rejected(ID, m.descriptor, &e),
            })
            .collect())
    })]
}

fn theorem31(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "theorem31";
    let c = cfg.theorem31.clone();
    let seed = cfg.seed;
    let ps: Vec<f64> = {
        let mut ps: Vec<f64> = c.params.iter().map(|&(p, _)| p).collect();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        ps
    };
    let mut jobs = Vec::new();
    for spec in &c.weights {
        for &p in &ps {
            let c = c.clone();
            let spec = spec.clone();
            jobs.push(job(ID, format!("{spec}/p={p}"), move || {
                let fam: WeightFamily = spec.parse()?;
                let seqs = members(&c.sequences, seed, 1)?;
                let extent = seqs
                    .iter()
                    .map(|m| m.seq.lo().abs().max(m.seq.hi().abs()))
                    .max()
                    .unwrap_or(0);
                let reach = 2 * c.d1_max_n + 1;
                let hw = c.ap_half_width.max(c.n_max + 1).max(extent + 1) + reach;
                let w = Weight::from_family(fam, -hw, hw)?;
                let d1 = reverse_doubling_constant(&w, c.d1_max_n)?.value;
                let ap = ap_constant(&w, p, -c.ap_half_width, c.ap_half_width)?.value;
                if d1 <= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "measured D1 = {d1} <= 1: {spec} not verifiably reverse-doubling on this window"
                    )));
                }
                let in_class = fam.in_muckenhoupt_class(p) != Some(false);
                let mut rows = Vec::new();
                for &(_, lambda) in c.params.iter().filter(|&&(q, _)| q == p) {
                    let params = MorreyParams::new(p, lambda)?;
                    let g = params.gap();
                    let geo = d1.powf(g);
                    for m in &seqs {
                        let b = &m.seq;
                        let norm = weighted_morrey_norm(b, &w, params, &EvalPlan::around(b, 1))?.value;
                        let factor = 4.0 * norm * ap.powf(1.0 / p) * geo / (geo - 1.0);
                        let plan = EvalPlan::new(b.lo().min(-c.n_max), b.hi().max(c.n_max))?;
                        let h = hilbert_naive(b, &plan)?;
                        let mut worst = (f64::NEG_INFINITY, 0.0, 0.0, 0);
                        for n in -c.n_max..=c.n_max {
                            let core = w.get(n - 1)? + w.get(n)? + w.get(n + 1)?;
                            let rhs = factor / core.powf(g);
                            let lhs = h.get(n).abs();
                            let r = lhs / rhs;
                            if r > worst.0 {
                                worst = (r, lhs, rhs, n);
                            }
                        }
                        rows.push(
                            Row::new(
                                ID,
                                format!("{spec}/{}/{}", params_tag(params), m.descriptor),
                                worst.1,
                                worst.2,
                            )
                            .asserted_if(params.is_strict_interior() && in_class)
                            .exactness(format!(
                                "lhs=exact;rhs=window-measured(ap=[-{0},{0}],d1-max-n={1})",
                                c.ap_half_width, c.d1_max_n
                            ))
                            .witness(format!("n={},D1={d1},Ap={ap},norm={norm}", worst.3)),
                        );
                    }
                }
                Ok(rows)
            }));
        }
    }
    jobs
}

/// Weighted Morrey norms of `b`, of `Hb` and of `Tb` on `[-half_width,
/// half_width]` (widened to the support if needed).
pub fn theorem32_norms(b: &Seq, fam: WeightFamily, params: MorreyParams, half_width: i64) -> Result<(f64, f64, f64)> {
    let plan = EvalPlan::new(b.lo().min(-half_width), b.hi().max(half_width))?;
    let w = Weight::from_family(fam, plan.eval_lo - 1, plan.eval_hi + 1)?;
    let h = hilbert_naive(b, &plan)?.values;
    let t = truncated_maximal(b, &plan)?;
    let nb = weighted_morrey_norm(b, &w, params, &EvalPlan::around(b, 1))?.value;
    let nh = weighted_morrey_norm(&h, &w, params, &EvalPlan::around(&h, 1))?.value;
    let nt = weighted_morrey_norm(&t, &w, params, &EvalPlan::around(&t, 1))?.value;
    Ok((nb, nh, nt))
}

fn theorem32(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "theorem32";
    let c = cfg.theorem32.clone();
    let (seed, tol) = (cfg.seed, cfg.tolerances.drift);
    let mut jobs = Vec::new();
    for spec in &c.weights {
        for &(p, lambda) in &c.params {
            let c = c.clone();
            let spec = spec.clone();
            jobs.push(job(ID, format!("{spec}/p={p}:lambda={lambda}"), move || {
                let fam: WeightFamily = spec.parse()?;
                let params = MorreyParams::new(p, lambda)?;
                let asserted = params.is_strict_interior() && fam.in_muckenhoupt_class(p) != Some(false);
                let group = format!("{spec}/{}", params_tag(params));
                let spacing2 = if c.dilate { 2 } else { 1 };
                let mut rows = Vec::new();
                let mut maxima = [0.0f64; 2];
                for (k, (spacing, hw)) in [(1, c.half_width), (spacing2, 2 * c.half_width)]
                    .into_iter()
                    .enumerate()
                {
                    for m in members(&c.sequences, seed, spacing)? {
                        let (nb, nh, nt) = theorem32_norms(&m.seq, fam, params, hw)?;
                        let tag = format!("{group}/{}/half-width={hw}", m.descriptor);
                        maxima[k] = maxima[k].max(nh / nb);
                        rows.push(
                            Row::new(ID, format!("{tag}/ratio"), nh, nb)
                                .observational()
                                .exactness("lhs=windowed-lower-bound"),
                        );
                        rows.push(
                            Row::new(ID, format!("{tag}/h-vs-t"), nh, nt)
                                .asserted_if(asserted)
                                .exactness("both windowed"),
                        );
                    }
                }
                rows.push(
                    Row::new(ID, format!("{group}/max/drift"), drift(maxima[0], maxima[1]), tol)
                        .asserted_if(asserted)
                        .exactness(if c.dilate {
                            "spacing-and-window-doubling"
                        } else {
                            "window-doubling"
                        })
                        .witness(format!("max ratio {} -> {}", maxima[0], maxima[1])),
                );
                rows.push(
                    Row::new(ID, format!("{group}/max/finite"), maxima[1], f64::MAX)
                        .asserted_if(asserted)
                        .exactness("lower-bound"),
                );
                Ok(rows)
            }));
        }
    }
    jobs
}

fn embedding_norm(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "embedding-norm";
    let c = cfg.embedding_norm.clone();
    let seed = cfg.seed;
    let mut jobs = Vec::new();
    for spec in &c.weights {
        for &(p, lambda) in &c.params {
            let c = c.clone();
            let spec = spec.clone();
            jobs.push(job(ID, format!("{spec}/p={p}:lambda={lambda}"), move || {
                let fam: WeightFamily = spec.parse()?;
                let params = MorreyParams::new(p, lambda)?;
                let mut rows = Vec::new();
                for m in members(&c.sequences, seed, 1)? {
                    let b = &m.seq;
                    let reach = c.half_steps + 4;
                    let w = Weight::from_family(fam, b.lo() - reach, b.hi() + reach)?;
                    let search = DoublingSearch {
                        m_lo: b.lo() - 1,
                        m_hi: b.hi() + 1,
                        max_half_steps: c.half_steps,
                    };
                    let r = embedding_norm_check(b, &w, params, search)?;
                    rows.push(
                        Row::new(
                            ID,
                            format!("{spec}/{}/{}", params_tag(params), m.descriptor),
                            r.lhs,
                            r.rhs,
                        )
                        .asserted_if(params.is_strict_interior())
                        .exactness("lhs=candidate-sup;rhs=grid-doubling-constant")
                        .witness(format!(
                            "D={},overlap={},seq-norm={}",
                            r.doubling_d, r.overlap, r.sequence_norm
                        )),
                    );
                }
                Ok(rows)
            }));
        }
    }
    jobs
}

fn domination(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "domination";
    let c = cfg.domination.clone();
    let seed = cfg.seed;
    vec![job(ID, "family".into(), move || {
        let mut rows = Vec::new();
        for m in members(&c.sequences, seed, 1)? {
            let points = pointwise_domination_check(&m.seq, -c.j_max, c.j_max, c.samples)?;
            let score = |lhs: f64, rhs: f64| if lhs == 0.0 { 0.0 } else { lhs / rhs };
            let worst = points
                .iter()
                .fold(None::<&crate::embedding::DominationRow>, |acc, r| match acc {
                    Some(a) if score(a.truncated, a.rhs) >= score(r.truncated, r.rhs) => Some(a),
                    _ => Some(r),
                })
                .expect("nonempty grid");
            let failing = points.iter().filter(|r| !r.pass).count();
            rows.push(
                Row::new(ID, m.descriptor, worst.truncated, worst.rhs)
                    .exactness("closed-form")
                    .witness(format!(
                        "j={},x={},S={},M={},points={},failing={failing}",
                        worst.j,
                        worst.x,
                        worst.singular,
                        worst.maximal,
                        points.len()
                    )),
            );
        }
        Ok(rows)
    })]
}

fn ap_stability(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "ap-stability";
    let c = cfg.ap_stability.clone();
    let tol = cfg.tolerances;
    let labeled = c
        .stable
        .iter()
        .map(|s| (s.clone(), false))
        .chain(c.growing.iter().map(|s| (s.clone(), true)));
    let mut jobs = Vec::new();
    for (spec, control) in labeled {
        for &p in &c.p {
            let spec = spec.clone();
            let hw = c.half_width;
            jobs.push(job(ID, format!("{spec}/p={p}"), move || {
                let fam: WeightFamily = spec.parse()?;
                let w = Weight::from_family(fam, -2 * hw, 2 * hw)?;
                let a1 = ap_constant(&w, p, -hw, hw)?;
                let a2 = ap_constant(&w, p, -2 * hw, 2 * hw)?;
                let growth = a2.value / a1.value;
                let row = if control {
                    Row::new(
                        ID,
                        format!("negative-control/{spec}/p={p}/growing"),
                        1.0 + tol.ap_growth,
                        growth,
                    )
                } else {
                    Row::new(ID, format!("{spec}/p={p}/stable"), (growth - 1.0).abs(), tol.ap_drift)
                };
                Ok(vec![row.exactness("window-exact").witness(format!(
                    "A[-{hw},{hw}]={} at {:?}; A[-{},{}]={} at {:?}",
                    a1.value,
                    a1.witness,
                    2 * hw,
                    2 * hw,
                    a2.value,
                    a2.witness
                ))])
            }));
        }
    }
    jobs
}

fn reverse_doubling(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "reverse-doubling";
    let c = cfg.reverse_doubling.clone();
    let margin = cfg.tolerances.reverse_doubling_margin;
    c.weights
        .iter()
        .map(|spec| {
            let spec = spec.clone();
            let (hw, max_n) = (c.half_width, c.max_n);
            job(ID, spec.clone(), move || {
                let w = Weight::from_family(spec.parse()?, -hw, hw)?;
                let d1 = reverse_doubling_constant(&w, max_n)?;
                Ok(vec![Row::new(
                    ID,
                    format!("{spec}/max-n={max_n}"),
                    1.0 + margin,
                    d1.value,
                )
                .exactness(format!("window-min([-{hw},{hw}])"))
                .witness(format!("(m, n) = {:?}", d1.witness))])
            })
        })
        .collect()
}

fn corollary(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "corollary";
    let c = cfg.corollary.clone();
    let seed = cfg.seed;
    c.weights
        .iter()
        .map(|spec| {
            let spec = spec.clone();
            let c = c.clone();
            job(ID, spec.clone(), move || {
                let hw = c.half_width;
                let w = Weight::from_family(spec.parse()?, -hw, hw)?;
                let d1 = reverse_doubling_constant(&w, c.max_n)?.value;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(0xC0);
                let mut rows = Vec::new();
                for idx in 0..c.centers {
                    let m = rng.random_range(-c.center_range..=c.center_range);
                    let desc = format!("{spec}/center={idx:03}");
                    match corollary_check(&w, m, c.i_max, d1) {
                        Ok(checks) => {
                            let worst = checks
                                .iter()
                                .max_by(|a, b| (a.bound / a.window_mass).total_cmp(&(b.bound / b.window_mass)))
                                .expect("i_max >= 1");
                            rows.push(
                                Row::new(ID, desc, worst.bound, worst.window_mass)
                                    .exactness("direct-sum")
                                    .witness(format!("m={m},i={},D1={d1}", worst.i)),
                            );
                        }
                        Err(e) => rows.push(Row::rejected(ID, desc, &e)),
                    }
                }
                Ok(rows)
            })
        })
        .collect()
}

fn opnorm(cfg: &RunConfig) -> Vec<Job> {
    const ID: &str = "opnorm";
    let c = cfg.opnorm.clone();
    let seed = cfg.seed;
    let mut jobs = Vec::new();
    for spec in &c.weights {
        for &(p, lambda) in &c.params {
            let spec = spec.clone();
            let c = c.clone();
            jobs.push(job(ID, format!("{spec}/p={p}:lambda={lambda}"), move || {
                let params = MorreyParams::new(p, lambda)?;
                let (bx, pad) = (c.box_half_width, c.pad);
                let w = Weight::from_family(spec.parse()?, -bx - pad - 1, bx + pad + 1)?;
                let strategy = match c.strategy {
                    StrategyKind::DeltaProbes => Strategy::DeltaProbes,
                    StrategyKind::RandomSearch => Strategy::RandomSearch { budget: c.budget, seed },
                    StrategyKind::CoordinateAscent => Strategy::CoordinateAscent { budget: c.budget, seed },
                };
                let est = estimate_operator_norm(&w, params, -bx, bx, pad, strategy)?;
                Ok(vec![Row::new(
                    ID,
                    format!("{spec}/{}", params_tag(params)),
                    est.delta_value,
                    est.value,
                )
                .exactness("lower-bound")
                .witness(format!(
                    "start={},evaluations={}",
                    est.start_value, est.evaluations
                ))])
            }));
        }
    }
    jobs
}
