//! Concrete structures and problems.
//!
//! - [`minima`]: learning monotone subsequences of one or two functions.
//! - [`toy`]: small finite structures assembled from tables, for exhaustive
//!   cross-checks.
//! - [`relay`]: a two-level fixture on which the untimestamped learner cycles.

pub mod minima;
pub mod relay;
pub mod toy;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How a [`FnTable`] continues past its prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// Constant value.
    Const(u64),
    /// Repeat the last `p` entries of the prefix.
    Period(usize),
}

/// A total function on naturals: a finite prefix followed by a constant or
/// periodic tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnTable {
    prefix: Vec<u64>,
    tail: Tail,
}

impl FnTable {
    pub fn new(prefix: Vec<u64>, tail: Tail) -> Result<Self> {
        if let Tail::Period(p) = tail {
            if p == 0 || p > prefix.len() {
                return Err(Error::InvalidTable(format!(
                    "period {p} needs 1 <= period <= prefix length {}",
                    prefix.len()
                )));
            }
        }
        Ok(FnTable { prefix, tail })
    }

    pub fn constant_tail(prefix: Vec<u64>, value: u64) -> Self {
        FnTable {
            prefix,
            tail: Tail::Const(value),
        }
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn eval(&self, n: u64) -> u64 {
        let len = self.prefix.len() as u64;
        if n < len {
            return self.prefix[n as usize];
        }
        match self.tail {
            Tail::Const(c) => c,
            Tail::Period(p) => {
                let p = p as u64;
                self.prefix[(len - p + (n - len) % p) as usize]
            }
        }
    }

    fn tail_width(&self) -> u64 {
        match self.tail {
            Tail::Const(_) => 1,
            Tail::Period(p) => p as u64,
        }
    }

    /// Ground truth: `f(n) <= f(m)` for every `m > n`. Decidable because
    /// every tail value already occurs within one period past the prefix.
    pub fn is_local_min(&self, n: u64) -> bool {
        let horizon = n.max(self.prefix.len() as u64) + self.tail_width();
        let here = self.eval(n);
        (n + 1..=horizon).all(|m| here <= self.eval(m))
    }
}

impl fmt::Display for FnTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix: Vec<String> = self.prefix.iter().map(u64::to_string).collect();
        write!(f, "{}", prefix.join(","))?;
        match self.tail {
            Tail::Const(c) => write!(f, ";const {c}"),
            Tail::Period(p) => write!(f, ";period {p}"),
        }
    }
}

/// Parses `"2,1,0;const 2"` or `"5,3,8;period 2"`. Without a tail rule the
/// last prefix value repeats.
impl FromStr for FnTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (prefix_part, tail_part) = match s.split_once(';') {
            Some((p, t)) => (p.trim(), Some(t.trim())),
            None => (s.trim(), None),
        };
        let prefix = if prefix_part.is_empty() {
            Vec::new()
        } else {
            prefix_part
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::InvalidTable(format!("bad value {v:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        let tail = match tail_part {
            None => match prefix.last() {
                Some(&last) => Tail::Const(last),
                None => return Err(Error::InvalidTable("empty table".into())),
            },
            Some(rule) => parse_tail(rule)?,
        };
        FnTable::new(prefix, tail)
    }
}

fn parse_tail(rule: &str) -> Result<Tail> {
    let mut words = rule.split_whitespace();
    let (Some(kind), Some(arg), None) = (words.next(), words.next(), words.next()) else {
        return Err(Error::InvalidTable(format!(
            "tail rule {rule:?} must be \"const <c>\" or \"period <p>\""
        )));
    };
    let bad = |e: std::num::ParseIntError| Error::InvalidTable(format!("bad tail argument {arg:?}: {e}"));
    match kind {
        "const" => Ok(Tail::Const(arg.parse().map_err(bad)?)),
        "period" => Ok(Tail::Period(arg.parse().map_err(bad)?)),
        other => Err(Error::InvalidTable(format!("unknown tail rule {other:?}"))),
    }
}
