//! The physical problem instance and closed-form anchors.
//!
//! The radial equation is
//! `-u'' + [(k-1)(k-3)/(4r²) + a/r + b²r²] u = E u` with `k = d + 2l`,
//! `u(0) = 0`, and either square-integrability on `(0, ∞)` (soft
//! confinement) or `u(R) = 0` (hard confinement).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{BigReal, Precision};

/// Radius of the impenetrable wall.
#[derive(Clone, Debug, PartialEq)]
pub enum Radius {
    Infinite,
    Finite(BigReal),
}

impl Radius {
    pub fn finite(&self) -> Option<&BigReal> {
        match self {
            Radius::Infinite => None,
            Radius::Finite(r) => Some(r),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Radius::Infinite)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub a: BigReal,
    pub b: BigReal,
    pub d: u32,
    pub l: u32,
    pub radius: Radius,
    pub precision: Precision,
    /// Requested output digits after the decimal point.
    pub digits: u32,
}

impl SystemSpec {
    pub const DEFAULT_DIGITS: u32 = 18;

    pub fn new(a: BigReal, b: BigReal, d: u32, l: u32, radius: Radius) -> Result<Self> {
        let precision = a.prec().max(b.prec());
        let spec = SystemSpec { a, b, d, l, radius, precision, digits: Self::DEFAULT_DIGITS };
        spec.validate()?;
        Ok(spec)
    }

    /// Soft confinement from decimal strings, at the default precision.
    pub fn soft(a: &str, b: &str, d: u32, l: u32) -> Result<Self> {
        let p = Precision::DEFAULT;
        Self::new(BigReal::parse(a, p)?, BigReal::parse(b, p)?, d, l, Radius::Infinite)
    }

    /// Hard confinement from decimal strings, at the default precision.
    pub fn hard(a: &str, b: &str, d: u32, l: u32, radius: &str) -> Result<Self> {
        let p = Precision::DEFAULT;
        let r = BigReal::parse(radius, p)?;
        Self::new(BigReal::parse(a, p)?, BigReal::parse(b, p)?, d, l, Radius::Finite(r))
    }

    pub fn with_digits(mut self, digits: u32) -> Self {
        self.digits = digits;
        self
    }

    /// Re-rounds every parameter to `precision`.
    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.a = self.a.with_prec(precision);
        self.b = self.b.with_prec(precision);
        if let Radius::Finite(r) = &self.radius {
            self.radius = Radius::Finite(r.with_prec(precision));
        }
        self.precision = precision;
        self
    }

    pub fn with_dl(&self, d: u32, l: u32) -> Result<Self> {
        let mut s = self.clone();
        s.d = d;
        s.l = l;
        s.validate()?;
        Ok(s)
    }

    pub fn with_radius(&self, radius: Radius) -> Result<Self> {
        let mut s = self.clone();
        s.radius = radius;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::domain(format!("dimension d = {} must be at least 2", self.d)));
        }
        if self.a.is_sign_negative() {
            return Err(Error::domain("Coulomb strength a must be non-negative"));
        }
        if self.b.is_sign_negative() {
            return Err(Error::domain("oscillator strength b must be non-negative"));
        }
        match &self.radius {
            Radius::Infinite if self.b.is_zero() => Err(Error::domain(
                "spectrum is not discrete: need b > 0 or a finite box radius",
            )),
            Radius::Finite(r) if !r.is_positive() => {
                Err(Error::domain("box radius must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Effective dimension `k = d + 2l`.
    pub fn k(&self) -> u32 {
        self.d + 2 * self.l
    }

    pub fn is_hard(&self) -> bool {
        !self.radius.is_infinite()
    }

    /// Centrifugal coefficient `(k-1)(k-3)/4`.
    pub fn centrifugal(&self) -> BigReal {
        let k = i64::from(self.k());
        BigReal::ratio((k - 1) * (k - 3), 4, self.precision)
    }

    pub fn label(&self, n: u32) -> StateLabel {
        StateLabel { n, l: self.l, d: self.d }
    }

    /// Plain `key = value` rendering; see [`SystemSpec::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("a = {}\n", self.a.to_shortest_string()));
        out.push_str(&format!("b = {}\n", self.b.to_shortest_string()));
        out.push_str(&format!("d = {}\n", self.d));
        out.push_str(&format!("l = {}\n", self.l));
        match &self.radius {
            Radius::Infinite => out.push_str("R = inf\n"),
            Radius::Finite(r) => out.push_str(&format!("R = {}\n", r.to_shortest_string())),
        }
        out.push_str(&format!("precision = {}\n", self.precision.decimal_digits()));
        out.push_str(&format!("digits = {}\n", self.digits));
        out
    }

    /// Parses the `key = value` format. Blank lines and `#` comments are
    /// ignored; `R` may be omitted or `inf` for soft confinement.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        Self::from_key_values(&map)
    }

    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let precision = match get("precision") {
            Some(v) => Precision::digits(parse_u32("precision", v)?),
            None => Precision::DEFAULT,
        };
        let need = |k: &str| get(k).ok_or_else(|| Error::Parse(format!("missing key `{k}`")));
        let a = BigReal::parse(need("a")?, precision)?;
        let b = BigReal::parse(need("b")?, precision)?;
        let d = parse_u32("d", need("d")?)?;
        let l = match get("l") {
            Some(v) => parse_u32("l", v)?,
            None => 0,
        };
        let radius = match get("R") {
            None => Radius::Infinite,
            Some(v) if v.eq_ignore_ascii_case("inf") || v.eq_ignore_ascii_case("infinity") => {
                Radius::Infinite
            }
            Some(v) => Radius::Finite(BigReal::parse(v, precision)?),
        };
        let digits = match get("digits") {
            Some(v) => parse_u32("digits", v)?,
            None => Self::DEFAULT_DIGITS,
        };
        let spec = SystemSpec { a, b, d, l, radius, precision, digits };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_u32(key: &str, v: &str) -> Result<u32> {
    v.trim().parse().map_err(|_| Error::Parse(format!("`{key}` expects a non-negative integer, got {v:?}")))
}

/// Splits `key = value` lines into a map, rejecting duplicates.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}

/// Quantum numbers of one radial state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateLabel {
    /// Node count.
    pub n: u32,
    pub l: u32,
    pub d: u32,
}

impl StateLabel {
    /// Twice the principal quantum number `ν = n + l + (d-1)/2`.
    pub fn two_nu(&self) -> u32 {
        2 * self.n + 2 * self.l + self.d - 1
    }

    pub fn nu(&self) -> f64 {
        f64::from(self.two_nu()) / 2.0
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E[n={}, l={}, d={}]", self.n, self.l, self.d)
    }
}

/// `V(r) = a/r + b²r²`, defined on `(0, R)`.
pub fn potential(spec: &SystemSpec, r: &BigReal) -> Result<BigReal> {
    if !r.is_positive() {
        return Err(Error::domain("potential evaluated at r <= 0"));
    }
    if let Radius::Finite(big_r) = &spec.radius {
        if r >= big_r {
            return Err(Error::domain("potential evaluated outside the box"));
        }
    }
    Ok(&spec.a / r + &spec.b * &spec.b * r * r)
}

/// All `(d', l')` with `d' >= 2` and `d' + 2l' = d + 2l`, by descending `d'`.
pub fn degeneracy_orbit(d: u32, l: u32) -> Vec<(u32, u32)> {
    let k = d + 2 * l;
    (0..=k.saturating_sub(2) / 2).map(|lp| (k - 2 * lp, lp)).filter(|&(dp, _)| dp >= 2).collect()
}

/// `(a b^{-1/2}, b)` such that `E(a, b) = b · E(a b^{-1/2}, 1)`.
pub fn scale_reduce(a: &BigReal, b: &BigReal) -> Result<(BigReal, BigReal)> {
    if !b.is_positive() {
        return Err(Error::domain("scaling requires b > 0"));
    }
    Ok((a / &b.sqrt(), b.clone()))
}

/// Exact pure-oscillator level `b(4n + 2l + d)`.
pub fn oscillator_energy(n: u32, spec: &SystemSpec) -> Result<BigReal> {
    if !spec.a.is_zero() || spec.is_hard() || !spec.b.is_positive() {
        return Err(Error::domain("oscillator energy needs a = 0, b > 0 and R infinite"));
    }
    Ok(spec.b.mul_i64(i64::from(4 * n + spec.k())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::DEFAULT
    }

    #[test]
    fn potential_values() {
        let s = SystemSpec::soft("1", "1", 3, 0).unwrap();
        assert_eq!(potential(&s, &BigReal::from_i64(1, p())).unwrap(), 2);
        let osc = SystemSpec::soft("0", "1", 3, 0).unwrap();
        assert_eq!(potential(&osc, &BigReal::from_i64(2, p())).unwrap(), 4);
        let boxed = SystemSpec::hard("1", "1", 3, 0, "1").unwrap();
        assert!(matches!(
            potential(&boxed, &BigReal::ratio(3, 2, p())),
            Err(Error::Domain(_))
        ));
        assert!(potential(&s, &BigReal::zero(p())).is_err());
    }

    #[test]
    fn orbits() {
        assert_eq!(degeneracy_orbit(4, 0), vec![(4, 0), (2, 1)]);
        assert_eq!(degeneracy_orbit(7, 0), vec![(7, 0), (5, 1), (3, 2)]);
        assert_eq!(degeneracy_orbit(2, 0), vec![(2, 0)]);
        assert_eq!(degeneracy_orbit(2, 1), vec![(4, 0), (2, 1)]);
    }

    #[test]
    fn scaling_reduction() {
        let one = BigReal::from_i64(1, p());
        let (ar, s) = scale_reduce(&one, &one).unwrap();
        assert_eq!((ar, s), (one.clone(), one.clone()));
        let (ar, s) = scale_reduce(&BigReal::from_i64(2, p()), &BigReal::from_i64(4, p())).unwrap();
        assert_eq!(ar, 1);
        assert_eq!(s, 4);
        let (ar, _) = scale_reduce(&one, &BigReal::ratio(1, 4, p())).unwrap();
        assert_eq!(ar, 2);
        assert!(scale_reduce(&one, &BigReal::zero(p())).is_err());
    }

    #[test]
    fn oscillator_levels() {
        let s = SystemSpec::soft("0", "1", 3, 0).unwrap();
        assert_eq!(oscillator_energy(0, &s).unwrap(), 3);
        assert_eq!(oscillator_energy(1, &s).unwrap(), 7);
        let s = SystemSpec::soft("0", "2", 5, 1).unwrap();
        assert_eq!(oscillator_energy(0, &s).unwrap(), 14);
        let coulomb = SystemSpec::soft("1", "1", 3, 0).unwrap();
        assert!(oscillator_energy(0, &coulomb).is_err());
    }

    #[test]
    fn discreteness_is_enforced() {
        assert!(SystemSpec::soft("1", "0", 3, 0).is_err());
        assert!(SystemSpec::hard("1", "0", 3, 0, "1").is_ok());
        assert!(SystemSpec::soft("1", "1", 1, 0).is_err());
        assert!(SystemSpec::hard("1", "1", 3, 0, "-1").is_err());
        assert!(SystemSpec::soft("-1", "1", 3, 0).is_err());
    }

    #[test]
    fn principal_quantum_number() {
        let s = StateLabel { n: 1, l: 2, d: 3 };
        assert_eq!(s.nu(), 4.0);
        assert_eq!(StateLabel { n: 0, l: 0, d: 2 }.nu(), 0.5);
    }

    #[test]
    fn config_roundtrip() {
        let s = SystemSpec::hard("2.2937668247435283", "1", 3, 0, "1.447082228754501502")
            .unwrap()
            .with_digits(20);
        let text = s.to_config_string();
        assert!(text.contains("R = 1.447082228754501502"));
        assert_eq!(SystemSpec::from_config_str(&text).unwrap(), s);

        let soft = SystemSpec::from_config_str("a = 1\nb = 1 # comment\nd = 3\n").unwrap();
        assert!(soft.radius.is_infinite());
        assert_eq!(soft.l, 0);
        assert!(SystemSpec::from_config_str("a = 1\nb = 1\n").is_err());
        assert!(SystemSpec::from_config_str("a = 1\na = 2\nb = 1\nd = 3").is_err());
    }
}
