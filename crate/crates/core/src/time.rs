//! Exact plan time stamps.
//!
//! Plan times and durations are written as decimal literals. They are kept as
//! exact rationals so that happening grouping, end-point arithmetic and
//! monitor midpoints never suffer from floating point drift.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};

/// Fractional digits accepted in a time literal; keeps every value inside i128.
const MAX_FRACTION_DIGITS: usize = 30;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed time literal `{0}`")]
pub struct TimeParseError(pub String);

impl Time {
    pub const ZERO: Time = Time(Ratio::new_raw(0, 1));

    pub fn new(numer: i128, denom: i128) -> Time {
        Time(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i128) -> Time {
        Time(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Midpoint of two times, exact.
    pub fn midpoint(self, other: Time) -> Time {
        Time((self.0 + other.0) / Ratio::from_integer(2))
    }

    pub fn abs_diff(self, other: Time) -> Time {
        Time((self.0 - other.0).abs())
    }

    /// Approximate an `f64` by a rational with at most nine decimal places.
    pub fn approximate(value: f64) -> Time {
        let scale = 1_000_000_000i128;
        Time(Ratio::new((value * scale as f64).round() as i128, scale))
    }
}

impl FromStr for Time {
    type Err = TimeParseError;

    /// Parses `n`, `n.` or `n.n` (optionally signed) into an exact rational.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || TimeParseError(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > MAX_FRACTION_DIGITS
        {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: i128 = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| err())?
        };
        let denom = 10i128.pow(frac_part.len() as u32);
        let value = Ratio::new(numer, denom);
        Ok(Time(if negative { -value } else { value }))
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl fmt::Display for Time {
    /// Exact decimal when the denominator divides a power of ten, otherwise the
    /// nearest `f64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut denom = self.denom();
        let mut twos = 0u32;
        let mut fives = 0u32;
        while denom % 2 == 0 {
            denom /= 2;
            twos += 1;
        }
        while denom % 5 == 0 {
            denom /= 5;
            fives += 1;
        }
        if denom != 1 {
            return write!(f, "{}", self.to_f64());
        }
        let places = twos.max(fives);
        if places == 0 {
            return write!(f, "{}", self.numer());
        }
        let scaled = self.numer() * (10i128.pow(places) / self.denom());
        let sign = if scaled < 0 { "-" } else { "" };
        let scaled = scaled.abs();
        let unit = 10i128.pow(places);
        let frac = format!("{:0width$}", scaled % unit, width = places as usize);
        write!(f, "{sign}{}.{}", scaled / unit, frac.trim_end_matches('0'))
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Time({self})")
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_exactly() {
        assert_eq!("0.001".parse::<Time>().unwrap(), Time::new(1, 1000));
        assert_eq!("5.000".parse::<Time>().unwrap(), Time::from_integer(5));
        assert_eq!("3".parse::<Time>().unwrap(), Time::from_integer(3));
        assert_eq!("2.".parse::<Time>().unwrap(), Time::from_integer(2));
        assert_eq!(".5".parse::<Time>().unwrap(), Time::new(1, 2));
        assert!("1e3".parse::<Time>().is_err());
        assert!("".parse::<Time>().is_err());
        assert!("1.2.3".parse::<Time>().is_err());
    }

    #[test]
    fn midpoint_and_display() {
        let t = "0.001".parse::<Time>().unwrap();
        let end = t + Time::from_integer(5);
        assert_eq!(end.to_string(), "5.001");
        assert_eq!(t.midpoint(end), Time::new(2501, 1000));
        assert_eq!(Time::new(5, 2).to_string(), "2.5");
        assert_eq!(Time::new(-1, 4).to_string(), "-0.25");
        assert_eq!(Time::from_integer(11).to_string(), "11");
    }
}
