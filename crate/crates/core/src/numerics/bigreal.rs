//! Arbitrary-precision real scalar backed by MPFR.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Working precision expressed in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(100);

    pub fn digits(digits: u32) -> Self {
        Precision(digits.max(8))
    }

    pub fn decimal_digits(self) -> u32 {
        self.0
    }

    /// Mantissa bits carrying `self.0` decimal digits plus guard bits.
    pub fn bits(self) -> u32 {
        (f64::from(self.0) * std::f64::consts::LOG2_10).ceil() as u32 + 8
    }

    /// Smallest precision that satisfies "working ≥ 2 × output digits".
    pub fn for_output_digits(digits: u32) -> Self {
        Precision::digits((2 * digits + 20).max(Self::DEFAULT.0))
    }

    /// Relative size of one unit in the last retained decimal place.
    pub fn epsilon(self) -> BigReal {
        BigReal::pow10(1 - self.0 as i32, self)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Float);

impl BigReal {
    pub fn zero(prec: Precision) -> Self {
        BigReal(Float::new(prec.bits()))
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), v))
    }

    pub fn from_f64(v: f64, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), v))
    }

    pub fn ratio(num: i64, den: i64, prec: Precision) -> Self {
        let mut x = Float::with_val(prec.bits(), num);
        x /= den;
        BigReal(x)
    }

    /// Parses a decimal literal such as `1.447082228754501502` or `2e-3`.
    /// Digit-group spaces and underscores are accepted.
    pub fn parse(s: &str, prec: Precision) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
        let parsed = Float::parse(&cleaned).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(BigReal(Float::with_val(prec.bits(), parsed)))
    }

    pub fn pow10(exp: i32, prec: Precision) -> Self {
        let ten = Float::with_val(prec.bits(), 10);
        BigReal(ten.pow(exp))
    }

    pub fn pi(prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), rug::float::Constant::Pi))
    }

    pub fn prec(&self) -> Precision {
        let bits = self.0.prec();
        Precision(((f64::from(bits.saturating_sub(8))) / std::f64::consts::LOG2_10).floor() as u32)
    }

    /// Same value re-rounded to another working precision.
    pub fn with_prec(&self, prec: Precision) -> Self {
        BigReal(Float::with_val(prec.bits(), &self.0))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn from_float(f: Float) -> Self {
        BigReal(f)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }

    /// -1, 0 or +1.
    pub fn signum_i(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }

    pub fn cbrt(&self) -> Self {
        BigReal(self.0.clone().cbrt())
    }

    pub fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        BigReal(self.0.clone().ln())
    }

    pub fn gamma(&self) -> Self {
        BigReal(self.0.clone().gamma())
    }

    pub fn powi(&self, n: i32) -> Self {
        BigReal(self.0.clone().pow(n))
    }

    pub fn powf(&self, e: &BigReal) -> Self {
        BigReal(self.0.clone().pow(&e.0))
    }

    pub fn recip(&self) -> Self {
        BigReal(self.0.clone().recip())
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        BigReal(Float::with_val(self.0.prec(), &self.0 * k))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        BigReal(Float::with_val(self.0.prec(), &self.0 / k))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Decimal exponent `e` with `10^(e-1) <= |x| < 10^e`; `None` for zero.
    pub fn decimal_exponent(&self) -> Option<i32> {
        if self.0.is_zero() || !self.0.is_finite() {
            return None;
        }
        let (_, _, exp) = self.0.to_sign_string_exp_round(10, Some(2), Round::Zero);
        exp
    }

    /// Fixed-point rendering with exactly `decimals` digits after the point,
    /// rounded to nearest.
    pub fn to_fixed(&self, decimals: usize) -> String {
        if self.0.is_nan() {
            return "NaN".into();
        }
        if self.0.is_infinite() {
            return if self.0.is_sign_negative() { "-inf".into() } else { "inf".into() };
        }
        if self.0.is_zero() {
            return if decimals == 0 { "0".into() } else { format!("0.{}", "0".repeat(decimals)) };
        }
        let exp = self.decimal_exponent().unwrap_or(0);
        let sig = exp + decimals as i32;
        if sig <= 0 {
            // Rounds to zero or to one unit in the last place.
            let half = BigReal::pow10(-(decimals as i32), self.prec()).div_i64(2);
            let neg = self.is_sign_negative();
            let body = if self.abs() >= half {
                if decimals == 0 { "1".to_string() } else { format!("0.{}1", "0".repeat(decimals - 1)) }
            } else if decimals == 0 {
                "0".to_string()
            } else {
                format!("0.{}", "0".repeat(decimals))
            };
            return if neg && body.contains('1') { format!("-{body}") } else { body };
        }
        let (neg, mut digits, exp) =
            self.0.to_sign_string_exp_round(10, Some(sig as usize), Round::Nearest);
        // A rounding carry bumps the exponent by one; pad to the digit count it implies.
        let exp = exp.unwrap_or(0);
        let needed = (exp + decimals as i32).max(0) as usize;
        while digits.len() < needed {
            digits.push('0');
        }
        digits.truncate(needed);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if exp <= 0 {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp) as usize));
            out.push_str(&digits);
        } else {
            let (int, frac) = digits.split_at(exp as usize);
            out.push_str(int);
            if decimals > 0 {
                out.push('.');
                out.push_str(frac);
            }
        }
        out
    }

    /// Shortest decimal string that parses back to exactly `self` at the
    /// same precision.
    pub fn to_shortest_string(&self) -> String {
        if self.0.is_zero() {
            return "0".into();
        }
        let prec = self.prec();
        let max_sig = prec.decimal_digits() as usize + 10;
        let mut sig = 1;
        let sci = loop {
            let candidate = self.to_sci(sig);
            if sig >= max_sig || BigReal::parse(&candidate, prec).is_ok_and(|v| v == *self) {
                break candidate;
            }
            sig += 1;
        };
        let exp = self.decimal_exponent().unwrap_or(0);
        if (-4..=24).contains(&exp) {
            let decimals = (sig as i32 - exp).max(0) as usize;
            let fixed = self.to_fixed(decimals);
            if BigReal::parse(&fixed, prec).is_ok_and(|v| v == *self) {
                return fixed;
            }
        }
        sci
    }

    /// Scientific rendering with `sig` significant digits.
    pub fn to_sci(&self, sig: usize) -> String {
        if !self.0.is_finite() || self.0.is_zero() {
            return format!("{:e}", self.0);
        }
        let (neg, digits, exp) =
            self.0.to_sign_string_exp_round(10, Some(sig.max(1)), Round::Nearest);
        let exp = exp.unwrap_or(0) - 1;
        let (head, tail) = digits.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(25))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_fixed(p)),
            None => f.write_str(&self.to_sci(20)),
        }
    }
}

fn out_bits(a: &Float, b: &Float) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal(Float::with_val(out_bits(&self.0, &rhs.0), &self.0 $op &rhs.0))
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self $op &rhs
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                &self $op rhs
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&BigReal> for BigReal {
    fn add_assign(&mut self, rhs: &BigReal) {
        if rhs.0.prec() > self.0.prec() {
            self.0.set_prec(rhs.0.prec());
        }
        self.0 += &rhs.0;
    }
}

impl SubAssign<&BigReal> for BigReal {
    fn sub_assign(&mut self, rhs: &BigReal) {
        if rhs.0.prec() > self.0.prec() {
            self.0.set_prec(rhs.0.prec());
        }
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&BigReal> for BigReal {
    fn mul_assign(&mut self, rhs: &BigReal) {
        if rhs.0.prec() > self.0.prec() {
            self.0.set_prec(rhs.0.prec());
        }
        self.0 *= &rhs.0;
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0.clone())
    }
}

impl PartialEq<i64> for BigReal {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for BigReal {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formatting() {
        let p = Precision::digits(40);
        let x = BigReal::parse("4.0578770079679711929730896724510813555753", p).unwrap();
        assert_eq!(x.to_fixed(18), "4.057877007967971193");
        assert_eq!(BigReal::from_i64(9, p).to_fixed(3), "9.000");
        assert_eq!(BigReal::parse("9.9996", p).unwrap().to_fixed(3), "10.000");
        assert_eq!(BigReal::parse("-0.00012", p).unwrap().to_fixed(3), "0.000");
        assert_eq!(BigReal::parse("0.00062", p).unwrap().to_fixed(3), "0.001");
        assert_eq!(BigReal::parse("238.517551072045582565", p).unwrap().to_fixed(18), "238.517551072045582565");
        assert_eq!(BigReal::parse("0.0123", p).unwrap().to_fixed(4), "0.0123");
    }

    #[test]
    fn shortest_roundtrip() {
        let p = Precision::digits(50);
        assert_eq!(BigReal::from_i64(1, p).to_shortest_string(), "1");
        assert_eq!(BigReal::parse("0.25", p).unwrap().to_shortest_string(), "0.25");
        let r = BigReal::parse("1.447082228754501502", p).unwrap();
        assert_eq!(r.to_shortest_string(), "1.447082228754501502");
        let third = BigReal::ratio(1, 3, p);
        assert_eq!(BigReal::parse(&third.to_shortest_string(), p).unwrap(), third);
    }

    #[test]
    fn parse_accepts_digit_groups() {
        let p = Precision::digits(30);
        let x = BigReal::parse("1.447 082 228 754 501 502", p).unwrap();
        assert_eq!(x.to_fixed(18), "1.447082228754501502");
        assert!(BigReal::parse("abc", p).is_err());
    }

    #[test]
    fn precision_roundtrip() {
        let p = Precision::digits(100);
        assert!(p.bits() >= 333);
        assert_eq!(BigReal::zero(p).prec(), p);
    }

    #[test]
    fn arithmetic_keeps_widest_precision() {
        let lo = BigReal::from_i64(1, Precision::digits(20));
        let hi = BigReal::ratio(1, 3, Precision::digits(60));
        let s = &lo + &hi;
        assert_eq!(s.prec(), Precision::digits(60));
        let err = (&(&s - &lo) - &hi).abs();
        assert!(err < Precision::digits(58).epsilon());
    }
}
