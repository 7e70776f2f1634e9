//! Deterministic test families of sequences.
//!
//! String forms:
//!
//! | spec                        | members                                              |
//! |-----------------------------|------------------------------------------------------|
//! | `delta`                     | the unit impulse at 0                                |
//! | `deltas:K`                  | impulses at `0..K`                                   |
//! | `pairs:J`                   | `1` at 0 and `-1` at `2^j`, `j = 0..=J`              |
//! | `random:COUNT:LEN:AMP`      | uniform values in `[-AMP, AMP]` on `0..LEN`          |
//! | `random-mean-zero:COUNT:LEN`| dyadic random values on `0..LEN` summing to exactly 0|
//! | `alternating:LEN`           | `(-1)^k` on `0..LEN`                                 |
//! | `block:LEN`                 | ones on `0..LEN`                                     |
//!
//! Random members are a pure function of `(seed, spec, member index)`.

use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seq::Seq;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceFamily {
    Delta,
    Deltas(usize),
    Pairs(u32),
    Random { count: usize, len: usize, amplitude: f64 },
    RandomMeanZero { count: usize, len: usize },
    Alternating(usize),
    Block(usize),
}

/// A generated sequence and its stable descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub descriptor: String,
    pub seq: Seq,
}

impl SequenceFamily {
    pub fn is_mean_zero(&self) -> bool {
        matches!(self, SequenceFamily::Pairs(_) | SequenceFamily::RandomMeanZero { .. })
    }

    fn stream(&self) -> u64 {
        // Distinct random families draw from distinct streams.
        match *self {
            SequenceFamily::Random { len, .. } => 0x5241_4e44_0000_0000 | len as u64,
            SequenceFamily::RandomMeanZero { len, .. } => 0x4d5a_4552_0000_0000 | len as u64,
            _ => 0,
        }
    }

    /// Members with every index multiplied by `spacing`.
    pub fn members(&self, seed: u64, spacing: i64) -> Result<Vec<Member>> {
        let raw = self.raw_members(seed)?;
        raw.into_iter()
            .enumerate()
            .map(|(i, seq)| {
                let seq = if spacing == 1 { seq } else { seq.dilated(spacing)? };
                Ok(Member {
                    descriptor: format!("{self}#{i:03}@x{spacing}"),
                    seq,
                })
            })
            .collect()
    }

    fn raw_members(&self, seed: u64) -> Result<Vec<Seq>> {
        let rng_for = |i: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ self.stream());
            rng.set_stream(i as u64);
            rng
        };
        Ok(match *self {
            SequenceFamily::Delta => vec![Seq::delta(0)],
            SequenceFamily::Deltas(k) => (0..k as i64).map(Seq::delta).collect(),
            SequenceFamily::Pairs(j_max) => (0..=j_max)
                .map(|j| {
                    let gap = 1usize << j;
                    let mut v = vec![0.0; gap + 1];
                    v[0] = 1.0;
                    v[gap] = -1.0;
                    Seq::new(v, 0)
                })
                .collect::<Result<_>>()?,
            SequenceFamily::Random { count, len, amplitude } => (0..count)
                .map(|i| {
                    let mut rng = rng_for(i);
                    let v = (0..len)
                        .map(|_| amplitude * (2.0 * rng.random::<f64>() - 1.0))
                        .collect();
                    Seq::new(v, 0)
                })
                .collect::<Result<_>>()?,
            SequenceFamily::RandomMeanZero { count, len } => (0..count)
                .map(|i| {
                    let mut rng = rng_for(i);
                    // Multiples of 1/1024 in [-1, 1]: sums stay exact in f64.
                    let mut v: Vec<f64> = (0..len - 1)
                        .map(|_| rng.random_range(-1024i32..=1024) as f64 / 1024.0)
                        .collect();
                    let s: f64 = v.iter().sum();
                    v.push(-s);
                    Seq::new(v, 0)
                })
                .collect::<Result<_>>()?,
            SequenceFamily::Alternating(len) => {
                vec![Seq::new(
                    (0..len).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect(),
                    0,
                )?]
            }
            SequenceFamily::Block(len) => vec![Seq::new(vec![1.0; len], 0)?],
        })
    }
}

impl fmt::Display for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceFamily::Delta => write!(f, "delta"),
            SequenceFamily::Deltas(k) => write!(f, "deltas:{k}"),
            SequenceFamily::Pairs(j) => write!(f, "pairs:{j}"),
            SequenceFamily::Random { count, len, amplitude } => {
                write!(f, "random:{count}:{len}:{amplitude}")
            }
            SequenceFamily::RandomMeanZero { count, len } => {
                write!(f, "random-mean-zero:{count}:{len}")
            }
            SequenceFamily::Alternating(len) => write!(f, "alternating:{len}"),
            SequenceFamily::Block(len) => write!(f, "block:{len}"),
        }
    }
}

impl FromStr for SequenceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Parse(format!("sequence family '{s}'"));
        let arity = |n: usize| if parts.len() == n { Ok(()) } else { Err(bad()) };
        let uint = |i: usize| parts[i].parse::<usize>().map_err(|_| bad());
        let positive = |i: usize| match uint(i)? {
            0 => Err(bad()),
            v => Ok(v),
        };
        Ok(match parts[0] {
            "delta" => {
                arity(1)?;
                SequenceFamily::Delta
            }
            "deltas" => {
                arity(2)?;
                SequenceFamily::Deltas(positive(1)?)
            }
            "pairs" => {
                arity(2)?;
                let j = uint(1)?;
                if j > 30 {
                    return Err(bad());
                }
                SequenceFamily::Pairs(j as u32)
            }
            "random" => {
                arity(4)?;
                let amplitude: f64 = parts[3].parse().map_err(|_| bad())?;
                if !(amplitude > 0.0 && amplitude.is_finite()) {
                    return Err(bad());
                }
                SequenceFamily::Random {
                    count: positive(1)?,
                    len: positive(2)?,
                    amplitude,
                }
            }
            "random-mean-zero" => {
                arity(3)?;
                let len = positive(2)?;
                if len < 2 {
                    return Err(bad());
                }
                SequenceFamily::RandomMeanZero {
                    count: positive(1)?,
                    len,
                }
            }
            "alternating" => {
                arity(2)?;
                SequenceFamily::Alternating(positive(1)?)
            }
            "block" => {
                arity(2)?;
                SequenceFamily::Block(positive(1)?)
            }
            _ => return Err(bad()),
        })
    }
}
