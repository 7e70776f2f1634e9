//! Finitely supported sequences over the integers and strictly positive
//! weights over a finite window.
//!
//! Everything outside a [`Seq`]'s stored support is an exact zero. A
//! [`Weight`] is only known on its window; asking for a value or a window
//! sum outside it is an error, never an implicit extension.

use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_within, Error, Result};

/// A real sequence `{b_n}` with finite support `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq {
    lo: i64,
    values: Vec<f64>,
}

impl Seq {
    /// Builds a sequence whose first value sits at index `offset`.
    ///
    /// Leading and trailing zeros are trimmed. An all-zero input yields the
    /// zero sequence anchored at `offset`.
    pub fn new(values: Vec<f64>, offset: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("sequence values"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sequence value {bad}")));
        }
        let first = values.iter().position(|&v| v != 0.0);
        let last = values.iter().rposition(|&v| v != 0.0);
        match (first, last) {
            (Some(a), Some(b)) => Ok(Seq {
                lo: offset + a as i64,
                values: values[a..=b].to_vec(),
            }),
            _ => Ok(Seq::zero_at(offset)),
        }
    }

    /// Stores `values` verbatim starting at `lo`, zeros included.
    pub fn from_window(lo: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("sequence values"));
        }
        Ok(Seq { lo, values })
    }

    pub fn zero() -> Self {
        Seq::zero_at(0)
    }

    pub fn zero_at(offset: i64) -> Self {
        Seq {
            lo: offset,
            values: vec![0.0],
        }
    }

    /// The unit impulse at `k`.
    pub fn delta(k: i64) -> Self {
        Seq {
            lo: k,
            values: vec![1.0],
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Value at index `k`, zero off the support.
    pub fn get(&self, k: i64) -> f64 {
        if k < self.lo || k > self.hi() {
            0.0
        } else {
            self.values[(k - self.lo) as usize]
        }
    }

    /// `(index, value)` pairs over the stored support, increasing index.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.lo + i as i64, v))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: f64) -> Seq {
        Seq {
            lo: self.lo,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn shifted(&self, by: i64) -> Seq {
        Seq {
            lo: self.lo + by,
            values: self.values.clone(),
        }
    }

    /// Moves the value at `k` to `factor * k`, filling the gaps with zeros.
    pub fn dilated(&self, factor: i64) -> Result<Seq> {
        if factor < 1 {
            return Err(Error::InvalidParameter(format!("dilation factor {factor} < 1")));
        }
        let f = factor as usize;
        let mut values = vec![0.0; (self.values.len() - 1) * f + 1];
        for (i, &v) in self.values.iter().enumerate() {
            values[i * f] = v;
        }
        Ok(Seq {
            lo: self.lo * factor,
            values,
        })
    }

    /// Pointwise `a*self + b*other` on the union of the supports.
    pub fn combine(&self, a: f64, other: &Seq, b: f64) -> Seq {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let values = (lo..=hi).map(|k| a * self.get(k) + b * other.get(k)).collect();
        Seq { lo, values }
    }

    pub fn to_fixture(&self) -> Fixture {
        Fixture {
            lo: self.lo,
            values: self.values.clone(),
            family: None,
        }
    }

    pub fn from_fixture(fixture: &Fixture) -> Result<Self> {
        Seq::new(fixture.values.clone(), fixture.lo)
    }
}

/// On-disk JSON shape shared by sequence and weight fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub lo: i64,
    pub values: Vec<f64>,
    #[serde(default)]
    pub family: Option<String>,
}

impl Fixture {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fixture serialization is infallible")
    }
}

/// Generator families for weights.
///
/// String form (used by fixtures, configs and the CLI):
/// `const:C`, `power:ALPHA`, `random:SEED:RATIO`, `step:LOW:HIGH:AT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFamily {
    Constant(f64),
    /// `(1 + |k|)^alpha`.
    Power(f64),
    /// Log-uniform values in `[1, ratio]`, a pure function of `(seed, k)`.
    BoundedRandom {
        seed: u64,
        ratio: f64,
    },
    /// `low` for `k < at`, `high` for `k >= at`.
    Step {
        low: f64,
        high: f64,
        at: i64,
    },
}

impl WeightFamily {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            WeightFamily::Constant(c) if !(c > 0.0 && c.is_finite()) => {
                Err(Error::NonPositiveWeight { index: 0, value: c })
            }
            WeightFamily::Power(a) if !a.is_finite() => bad(format!("power exponent {a}")),
            WeightFamily::BoundedRandom { ratio, .. } if !(ratio >= 1.0 && ratio.is_finite()) => {
                bad(format!("random ratio bound {ratio} < 1"))
            }
            WeightFamily::Step { low, high, at } if !(low > 0.0 && high > 0.0) => Err(Error::NonPositiveWeight {
                index: at,
                value: low.min(high),
            }),
            _ => Ok(()),
        }
    }

    pub fn value_at(&self, k: i64) -> f64 {
        match *self {
            WeightFamily::Constant(c) => c,
            WeightFamily::Power(alpha) => (1.0 + (k as f64).abs()).powf(alpha),
            WeightFamily::BoundedRandom { seed, ratio } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let u: f64 = rng.random();
                (u * ratio.ln()).exp()
            }
            WeightFamily::Step { low, high, at } => {
                if k < at {
                    low
                } else {
                    high
                }
            }
        }
    }

    /// Whether the family is known to lie in the discrete Muckenhoupt class
    /// for exponent `p`; `None` when membership is not decided by the family
    /// alone.
    pub fn in_muckenhoupt_class(&self, p: f64) -> Option<bool> {
        if p <= 1.0 {
            return None;
        }
        match *self {
            WeightFamily::Constant(_) | WeightFamily::BoundedRandom { .. } => Some(true),
            WeightFamily::Step { .. } => Some(true),
            WeightFamily::Power(alpha) => Some(alpha > -1.0 && alpha < p - 1.0),
        }
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFamily::Constant(c) => write!(f, "const:{c}"),
            WeightFamily::Power(a) => write!(f, "power:{a}"),
            WeightFamily::BoundedRandom { seed, ratio } => write!(f, "random:{seed}:{ratio}"),
            WeightFamily::Step { low, high, at } => write!(f, "step:{low}:{high}:{at}"),
        }
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("weight family '{s}': missing field {i}")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("weight family '{s}': {e}")))
        };
        let int = |i: usize| -> Result<i64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("weight family '{s}': missing field {i}")))?
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("weight family '{s}': {e}")))
        };
        let arity = |n: usize| -> Result<()> {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("weight family '{s}': expected {} fields", n - 1)))
            }
        };
        let family = match parts[0] {
            "const" => {
                arity(2)?;
                WeightFamily::Constant(num(1)?)
            }
            "power" => {
                arity(2)?;
                WeightFamily::Power(num(1)?)
            }
            "random" => {
                arity(3)?;
                let seed = parts[1]
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("weight family '{s}': {e}")))?;
                WeightFamily::BoundedRandom { seed, ratio: num(2)? }
            }
            "step" => {
                arity(4)?;
                WeightFamily::Step {
                    low: num(1)?,
                    high: num(2)?,
                    at: int(3)?,
                }
            }
            other => return Err(Error::Parse(format!("unknown weight family '{other}'"))),
        };
        family.validate()?;
        Ok(family)
    }
}

/// Cumulative sums of a weight: `prefix[i] = w_lo + ... + w_{lo+i-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSum {
    lo: i64,
    prefix: Vec<f64>,
}

impl WindowSum {
    pub fn new(lo: i64, values: &[f64]) -> Self {
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for &v in values {
            acc += v;
            prefix.push(acc);
        }
        WindowSum { lo, prefix }
    }

    fn hi(&self) -> i64 {
        self.lo + self.prefix.len() as i64 - 2
    }

    /// `sum_{k=m}^{n} w_k`.
    pub fn sum(&self, m: i64, n: i64) -> Result<f64> {
        if m > n {
            return Err(Error::InvalidParameter(format!("window [{m}, {n}] is empty")));
        }
        check_within(m, n, self.lo, self.hi())?;
        let a = (m - self.lo) as usize;
        let b = (n - self.lo) as usize + 1;
        // Differences of positive partial sums are nonnegative up to rounding.
        Ok((self.prefix[b] - self.prefix[a]).max(0.0))
    }
}

/// A strictly positive weight `{w_k}` known on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    lo: i64,
    values: Vec<f64>,
    family: Option<WeightFamily>,
    sums: WindowSum,
}

impl Weight {
    pub fn from_values(lo: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("weight values"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveWeight {
                    index: lo + i as i64,
                    value: v,
                });
            }
        }
        let sums = WindowSum::new(lo, &values);
        Ok(Weight {
            lo,
            values,
            family: None,
            sums,
        })
    }

    /// Samples `family` on the window `[lo, hi]`.
    pub fn from_family(family: WeightFamily, lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::Empty("weight window"));
        }
        family.validate()?;
        let values = (lo..=hi).map(|k| family.value_at(k)).collect();
        let mut w = Weight::from_values(lo, values)?;
        w.family = Some(family);
        Ok(w)
    }

    /// The constant-one weight on `[lo, hi]`.
    pub fn ones(lo: i64, hi: i64) -> Self {
        Weight::from_family(WeightFamily::Constant(1.0), lo, hi).expect("valid window")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn family(&self) -> Option<WeightFamily> {
        self.family
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= self.lo && hi <= self.hi()
    }

    pub fn require(&self, lo: i64, hi: i64) -> Result<()> {
        check_within(lo, hi, self.lo, self.hi())
    }

    pub fn get(&self, k: i64) -> Result<f64> {
        self.require(k, k)?;
        Ok(self.values[(k - self.lo) as usize])
    }

    /// Unchecked access for callers that validated the range up front.
    pub(crate) fn at(&self, k: i64) -> f64 {
        self.values[(k - self.lo) as usize]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sum_{k=m}^{n} w_k` from the prefix array.
    pub fn window_sum(&self, m: i64, n: i64) -> Result<f64> {
        self.sums.sum(m, n)
    }

    /// `c * w`; the family tag is dropped unless it is a constant.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| c * v).collect();
        let mut w = Weight::from_values(self.lo, values)?;
        if let Some(WeightFamily::Constant(k)) = self.family {
            w.family = Some(WeightFamily::Constant(c * k));
        }
        Ok(w)
    }

    pub fn to_fixture(&self) -> Fixture {
        Fixture {
            lo: self.lo,
            values: self.values.clone(),
            family: self.family.map(|f| f.to_string()),
        }
    }

    pub fn from_fixture(fixture: &Fixture) -> Result<Self> {
        let mut w = Weight::from_values(fixture.lo, fixture.values.clone())?;
        w.family = fixture.family.as_deref().map(str::parse).transpose()?;
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_sequence_examples() {
        let d = Seq::new(vec![1.0], 0).unwrap();
        assert_eq!((d.lo(), d.hi()), (0, 0));
        let pair = Seq::new(vec![1.0, -1.0], 0).unwrap();
        assert_eq!(pair.get(0), 1.0);
        assert_eq!(pair.get(1), -1.0);
        assert_eq!(pair.sum(), 0.0);
        let trimmed = Seq::new(vec![0.0, 0.0, 3.0], -1).unwrap();
        assert_eq!((trimmed.lo(), trimmed.hi()), (1, 1));
        assert_eq!(trimmed.get(1), 3.0);
        assert_eq!(Seq::new(vec![], 0), Err(Error::Empty("sequence values")));
        assert!(Seq::new(vec![0.0, 0.0], 5).unwrap().is_zero());
    }

    #[test]
    fn dilation_spreads_support() {
        let b = Seq::new(vec![1.0, 2.0, 3.0], 1).unwrap();
        let d = b.dilated(2).unwrap();
        assert_eq!((d.lo(), d.hi()), (2, 6));
        assert_eq!(d.values(), &[1.0, 0.0, 2.0, 0.0, 3.0]);
    }

    #[test]
    fn weight_families() {
        let ones = Weight::from_family(WeightFamily::Constant(1.0), -8, 8).unwrap();
        assert!(ones.values().iter().all(|&v| v == 1.0));
        let pw = Weight::from_family(WeightFamily::Power(1.0), -2, 2).unwrap();
        assert_eq!(pw.values(), &[3.0, 2.0, 1.0, 2.0, 3.0]);
        let fam = WeightFamily::BoundedRandom { seed: 7, ratio: 4.0 };
        let r = Weight::from_family(fam, -16, 16).unwrap();
        assert!(r.values().iter().all(|&v| (1.0..=4.0).contains(&v)));
        let again = Weight::from_family(fam, -16, 16).unwrap();
        assert_eq!(r, again);
        // Values depend on the index only, not the window.
        let wider = Weight::from_family(fam, -32, 32).unwrap();
        assert_eq!(wider.get(5).unwrap(), r.get(5).unwrap());
    }

    #[test]
    fn nonpositive_weights_rejected() {
        assert!(matches!(
            "const:0".parse::<WeightFamily>(),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            Weight::from_values(0, vec![1.0, -2.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!("step:1:0:3".parse::<WeightFamily>().is_err());
        assert!("random:1:0.5".parse::<WeightFamily>().is_err());
    }

    #[test]
    fn family_string_round_trip() {
        for s in ["const:1", "power:0.5", "random:7:4", "step:1:100:0", "power:-0.25"] {
            let f: WeightFamily = s.parse().unwrap();
            assert_eq!(f.to_string().parse::<WeightFamily>().unwrap(), f);
        }
        assert!("cosine:1".parse::<WeightFamily>().is_err());
        assert!("power".parse::<WeightFamily>().is_err());
        assert!("power:1:2".parse::<WeightFamily>().is_err());
    }

    #[test]
    fn window_sum_examples() {
        let ones = Weight::ones(-8, 8);
        assert_eq!(ones.window_sum(-1, 1).unwrap(), 3.0);
        let pw = Weight::from_family(WeightFamily::Power(1.0), -2, 2).unwrap();
        assert_eq!(pw.window_sum(-2, 2).unwrap(), 11.0);
        assert!(matches!(pw.window_sum(-3, 2), Err(Error::OutOfWindow { .. })));
        assert!(pw.window_sum(2, 1).is_err());
    }

    #[test]
    fn fixture_json_shape() {
        let w = Weight::from_family(WeightFamily::Power(1.0), -1, 1).unwrap();
        let json = w.to_fixture().to_json();
        assert_eq!(json, r#"{"lo":-1,"values":[2.0,1.0,2.0],"family":"power:1"}"#);
        let back = Weight::from_fixture(&Fixture::from_json(&json).unwrap()).unwrap();
        assert_eq!(back, w);
        let b = Seq::from_fixture(&Fixture::from_json(r#"{"lo":3,"values":[1,-1]}"#).unwrap()).unwrap();
        assert_eq!((b.lo(), b.hi()), (3, 4));
        assert!(Fixture::from_json(r#"{"lo":0,"values":[1],"extra":1}"#).is_err());
    }
}
