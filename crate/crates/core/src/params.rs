use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::Seq;

/// Exponent pair `(p, lambda)` with `1 <= p < inf` and `0 <= lambda <= 1/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorreyParams {
    p: f64,
    lambda: f64,
}

impl MorreyParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p} must satisfy 1 <= p < inf")));
        }
        // Allow a rounding sliver above 1/p so that `lambda = 1.0 / p` is accepted.
        if !(lambda >= 0.0 && lambda <= 1.0 / p * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} must satisfy 0 <= lambda <= 1/p = {}",
                1.0 / p
            )));
        }
        Ok(MorreyParams { p, lambda })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `1/p - lambda`, clamped at zero.
    pub fn gap(&self) -> f64 {
        (1.0 / self.p - self.lambda).max(0.0)
    }

    /// `p > 1` and `0 < lambda < 1/p`, the range where the boundedness
    /// results are stated with full hypotheses.
    pub fn is_strict_interior(&self) -> bool {
        self.p > 1.0 && self.lambda > 0.0 && self.lambda < 1.0 / self.p * (1.0 - 1e-12)
    }
}

/// How values of a transform outside its evaluation window are bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TailPolicy {
    /// `|(Hb)_n| <= ||b||_1 / dist(n, support)`; windowed norms are reported
    /// as lower bounds.
    #[default]
    ReportLowerBound,
    /// Additionally use the `O(1/dist^2)` decay available when `sum b = 0`.
    AnalyticTail,
}

/// Evaluation window for transforms plus the margin used by norm searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPlan {
    pub eval_lo: i64,
    pub eval_hi: i64,
    pub search_margin: i64,
    pub tail_policy: TailPolicy,
}

impl EvalPlan {
    pub fn new(eval_lo: i64, eval_hi: i64) -> Result<Self> {
        if eval_hi < eval_lo {
            return Err(Error::InvalidParameter(format!(
                "evaluation window [{eval_lo}, {eval_hi}] is empty"
            )));
        }
        Ok(EvalPlan {
            eval_lo,
            eval_hi,
            search_margin: 0,
            tail_policy: TailPolicy::ReportLowerBound,
        })
    }

    /// `[-half_width, half_width]`.
    pub fn symmetric(half_width: i64) -> Result<Self> {
        EvalPlan::new(-half_width, half_width)
    }

    /// The support of `b` padded by `pad` on each side.
    pub fn around(b: &Seq, pad: i64) -> Self {
        EvalPlan {
            eval_lo: b.lo() - pad,
            eval_hi: b.hi() + pad,
            search_margin: 0,
            tail_policy: TailPolicy::ReportLowerBound,
        }
    }

    pub fn with_margin(mut self, margin: i64) -> Result<Self> {
        if margin < 0 {
            return Err(Error::InvalidParameter(format!("search margin {margin} < 0")));
        }
        self.search_margin = margin;
        Ok(self)
    }

    pub fn with_tail_policy(mut self, policy: TailPolicy) -> Self {
        self.tail_policy = policy;
        self
    }

    pub fn len(&self) -> usize {
        (self.eval_hi - self.eval_lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_support(&self, b: &Seq) -> bool {
        self.eval_lo <= b.lo() && b.hi() <= self.eval_hi
    }

    pub fn require_support(&self, b: &Seq) -> Result<()> {
        if self.contains_support(b) {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                lo: b.lo(),
                hi: b.hi(),
                window_lo: self.eval_lo,
                window_hi: self.eval_hi,
            })
        }
    }
}
