//! Exact rational point totals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Zero};
use serde::{Deserialize, Serialize};

/// An exact rational number of points.
///
/// Backed by a reduced `i128` fraction. Arithmetic is overflow-checked and
/// panics rather than wrapping; realistic elections stay many orders of
/// magnitude below the limit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Score(Ratio<i128>);

impl Score {
    pub const ZERO: Score = Score(Ratio::new_raw(0, 1));

    /// Builds `numer / denom` in lowest terms. Panics if `denom` is zero.
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "score denominator must be nonzero");
        Score(Ratio::new(numer, denom))
    }

    pub fn from_int(value: i128) -> Self {
        Score(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<i128> for Score {
    fn from(value: i128) -> Self {
        Score::from_int(value)
    }
}

impl From<u32> for Score {
    fn from(value: u32) -> Self {
        Score::from_int(i128::from(value))
    }
}

impl From<u64> for Score {
    fn from(value: u64) -> Self {
        Score::from_int(i128::from(value))
    }
}

impl Add for Score {
    type Output = Score;
    fn add(self, rhs: Score) -> Score {
        Score(self.0.checked_add(&rhs.0).expect("score overflow"))
    }
}

impl AddAssign for Score {
    fn add_assign(&mut self, rhs: Score) {
        *self = *self + rhs;
    }
}

impl Sub for Score {
    type Output = Score;
    fn sub(self, rhs: Score) -> Score {
        Score(self.0.checked_sub(&rhs.0).expect("score overflow"))
    }
}

impl Mul for Score {
    type Output = Score;
    fn mul(self, rhs: Score) -> Score {
        Score(self.0.checked_mul(&rhs.0).expect("score overflow"))
    }
}

/// Panics on division by zero.
impl Div for Score {
    type Output = Score;
    fn div(self, rhs: Score) -> Score {
        assert!(!rhs.is_zero(), "division by a zero score");
        Score(self.0.checked_div(&rhs.0).expect("score overflow"))
    }
}

impl Neg for Score {
    type Output = Score;
    fn neg(self) -> Score {
        Score(-self.0)
    }
}

impl std::iter::Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        iter.fold(Score::ZERO, |acc, s| acc + s)
    }
}

/// Prints `p` for integers and `p/q` otherwise, always in lowest terms.
impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}`")]
pub struct ParseScoreError(String);

impl FromStr for Score {
    type Err = ParseScoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScoreError(s.to_string());
        match s.split_once('/') {
            None => s.trim().parse::<i128>().map(Score::from_int).map_err(|_| err()),
            Some((p, q)) => {
                let p = p.trim().parse::<i128>().map_err(|_| err())?;
                let q = q.trim().parse::<i128>().map_err(|_| err())?;
                if q == 0 {
                    return Err(err());
                }
                Ok(Score::new(p, q))
            }
        }
    }
}

impl Serialize for Score {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
