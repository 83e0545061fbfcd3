//! Exact half-integer arithmetic for ranks and magnetic numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A half-integer stored exactly as twice its value.
///
/// Ranks `s`, `l`, `j` and magnetic numbers `m` are all half-integers; storing
/// `2x` as an `i64` keeps every comparison and sum exact, with no floating
/// point involved until a matrix element is actually needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };
    pub const HALF: HalfInteger = HalfInteger { twice: 1 };
    pub const ONE: HalfInteger = HalfInteger { twice: 2 };

    /// Construct from twice the value: `from_twice(3)` is 3/2.
    pub const fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    /// Construct an integer value.
    pub const fn from_int(value: i64) -> Self {
        Self { twice: 2 * value }
    }

    /// The rank of an N-dimensional space, (N − 1)/2.
    pub fn rank_of_dim(dim: usize) -> Self {
        Self::from_twice(dim as i64 - 1)
    }

    /// Dimension of the space with this rank, 2j + 1.
    pub fn dim(self) -> usize {
        (self.twice + 1) as usize
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        Self::from_twice(self.twice.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other { self } else { other }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other { self } else { other }
    }

    /// Iterate m = −j ..= j in unit steps.
    pub fn projections(self) -> impl Iterator<Item = HalfInteger> {
        let j = self.twice;
        (-j..=j).step_by(2).map(HalfInteger::from_twice)
    }

    /// Inclusive unit-step range `self ..= hi`; empty when `self > hi`.
    pub fn range_to(self, hi: Self) -> impl Iterator<Item = HalfInteger> {
        (self.twice..=hi.twice).step_by(2).map(HalfInteger::from_twice)
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        Self::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        Self::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        Self::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInteger {
    /// Integers print bare ("2", "-1"); true half-integers as "p/2" ("3/2").
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInteger {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad(s))?;
            let den: i64 = den.trim().parse().map_err(|_| bad(s))?;
            match den {
                2 => Ok(Self::from_twice(num)),
                1 => Ok(Self::from_int(num)),
                _ => Err(bad(s)),
            }
        } else {
            let v: i64 = s.parse().map_err(|_| bad(s))?;
            Ok(Self::from_int(v))
        }
    }
}

fn bad(s: &str) -> Error {
    Error::Parse(format!("`{s}` is not a half-integer (expected e.g. \"2\" or \"3/2\")"))
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}
