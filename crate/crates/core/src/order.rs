//! Fractional orders: exact rationals in (0, 1] and their real counterparts.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Exact fractional order `m/n` with `0 < m/n <= 1`, stored in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalOrder(Ratio<i64>);

impl RationalOrder {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(domain("order denominator is zero"));
        }
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Result<Self> {
        if !r.is_positive() || r > Ratio::one() {
            return Err(domain(format!("order {r} is outside (0, 1]")));
        }
        Ok(Self(r))
    }

    pub fn one() -> Self {
        Self(Ratio::one())
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn value<T: Real>(&self) -> T {
        T::lit(self.numer() as f64 / self.denom() as f64)
    }

    /// Best rational approximation with denominator at most `max_denom`,
    /// by continued-fraction convergents and semiconvergents.
    pub fn approximate(x: f64, max_denom: i64) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 || x > 1.0 {
            return Err(domain(format!("order {x} is outside (0, 1]")));
        }
        Self::from_ratio(best_rational(x, max_denom))
    }
}

fn best_rational(x: f64, max_denom: i64) -> Ratio<i64> {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut frac = x;
    loop {
        let a = frac.floor();
        let ai = a as i64;
        let q2 = ai.saturating_mul(q1).saturating_add(q0);
        if q2 > max_denom {
            // Largest admissible semiconvergent.
            let k = (max_denom - q0) / q1.max(1);
            let semi = Ratio::new(p0 + k * p1, q0 + k * q1);
            let conv = Ratio::new(p1, q1);
            let err = |r: Ratio<i64>| (r.to_f64().unwrap_or(f64::NAN) - x).abs();
            return if q1 > 0 && err(conv) <= err(semi) { conv } else { semi };
        }
        let p2 = ai * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = frac - a;
        if rem.abs() < 1e-12 || (p1 as f64 / q1 as f64 - x).abs() < 1e-15 {
            return Ratio::new(p1, q1);
        }
        frac = 1.0 / rem;
    }
}

impl fmt::Display for RationalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// How a textual order was read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParsedOrigin {
    Exact,
    /// A decimal that was converted by continued fractions.
    Approximated,
}

/// Parses `"m/n"`, an integer, or a decimal. Decimals are converted with
/// denominator cap 1000 and flagged as approximated unless they convert
/// without loss.
pub fn parse_order(text: &str) -> Result<(RationalOrder, ParsedOrigin)> {
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| domain(format!("bad order '{text}'")))?;
        let d: i64 = d.trim().parse().map_err(|_| domain(format!("bad order '{text}'")))?;
        return Ok((RationalOrder::new(n, d)?, ParsedOrigin::Exact));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok((RationalOrder::new(n, 1)?, ParsedOrigin::Exact));
    }
    let x: f64 = s.parse().map_err(|_| domain(format!("bad order '{text}'")))?;
    let r = RationalOrder::approximate(x, 1000)?;
    let origin = if (r.value::<f64>() - x).abs() <= 1e-12 * x.abs() && decimal_is_exact(s, &r) {
        ParsedOrigin::Exact
    } else {
        ParsedOrigin::Approximated
    };
    Ok((r, origin))
}

// A terminating decimal d/10^k is exactly representable iff the reduced
// rational matches it.
fn decimal_is_exact(s: &str, r: &RationalOrder) -> bool {
    let Some((int, frac)) = s.split_once('.') else { return true };
    if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return false;
    }
    let scale = 10i64.pow(frac.len() as u32);
    let (Ok(i), Ok(f)) = (int.parse::<i64>().or_else(|_| if int.is_empty() { Ok(0) } else { Err(()) }), frac.parse::<i64>())
    else {
        return false;
    };
    Ratio::new(i * scale + f, scale) == r.ratio()
}

impl FromStr for RationalOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_order(s).map(|(r, _)| r)
    }
}

/// A fractional order that is either exact or only known as a real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order<T> {
    Rational(RationalOrder),
    Real(T),
}

impl<T: Real> Order<T> {
    pub fn real(x: T) -> Result<Self> {
        if !(x > T::zero() && x <= T::one()) {
            return Err(domain(format!("order {x} is outside (0, 1]")));
        }
        Ok(Order::Real(x))
    }

    pub fn value(&self) -> T {
        match self {
            Order::Rational(r) => r.value(),
            Order::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<RationalOrder> {
        match self {
            Order::Rational(r) => Some(*r),
            Order::Real(_) => None,
        }
    }
}

impl<T> From<RationalOrder> for Order<T> {
    fn from(r: RationalOrder) -> Self {
        Order::Rational(r)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    if a.is_zero() || b.is_zero() {
        0
    } else {
        (a / gcd(a, b)) * b
    }
}
