//! Closed-form energy bounds for soft confinement.
//!
//! Every bound is a one-dimensional optimization of an elementary
//! expression, so it is carried out in `f64` and returned as a [`BigReal`].
//! The Gaussian and local-energy bounds are ground-state bounds; for `l > 0`
//! they are applied at `d -> k`, `l -> 0`, which bounds the bottom of the
//! `l` subspace.

use crate::error::{Error, Result};
use crate::model::SystemSpec;
use crate::numerics::{BigReal, Precision};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimizes a unimodal `f` on `(lo, hi)` by golden-section search.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..400 {
        if (b - a).abs() <= rel_tol * (x1.abs() + x2.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes a function that is U-shaped on `(0, ∞)`: the bracket is grown
/// geometrically around `guess` until the minimum is enclosed.
fn minimize_positive(f: impl Fn(f64) -> f64, guess: f64) -> (f64, f64) {
    let mut lo = guess / 2.0;
    let mut hi = guess * 2.0;
    let mut guard = 0;
    while f(lo) < f(lo * 1.5) && guard < 200 {
        lo /= 4.0;
        guard += 1;
    }
    guard = 0;
    while f(hi) < f(hi / 1.5) && guard < 200 {
        hi *= 4.0;
        guard += 1;
    }
    golden_min(f, lo, hi, 1e-13)
}

fn gamma_f64(x: f64) -> f64 {
    BigReal::from_f64(x, Precision::digits(30)).gamma().to_f64()
}

fn big(x: f64) -> BigReal {
    BigReal::from_f64(x, Precision::digits(30))
}

fn soft_params(spec: &SystemSpec) -> Result<(f64, f64)> {
    if spec.is_hard() {
        return Err(Error::domain("analytic bounds are for soft confinement only"));
    }
    let b = spec.b.to_f64();
    if b <= 0.0 {
        return Err(Error::domain("analytic bounds need b > 0"));
    }
    Ok((spec.a.to_f64(), b))
}

/// Tangent family `α/r² + β` touching `a/r` at `r = t`.
pub fn envelope_tangent(a: f64, t: f64) -> (f64, f64) {
    (a * t / 2.0, a / (2.0 * t))
}

/// `ℰ(t)`: the exact energy with `a/r` replaced by its tangent at `t`.
pub fn envelope_energy(spec: &SystemSpec, n: u32, t: f64) -> f64 {
    let a = spec.a.to_f64();
    let b = spec.b.to_f64();
    let big_l = f64::from(spec.l) + (f64::from(spec.d) - 2.0) / 2.0;
    let (alpha, beta) = envelope_tangent(a, t);
    f64::from(4 * n + 2) * b + 2.0 * b * (big_l * big_l + alpha).sqrt() + beta
}

/// Envelope upper bound `min_t ℰ(t)`, valid for every state; returns the
/// bound and the optimal contact point.
pub fn envelope_upper_with_t(spec: &SystemSpec, n: u32) -> Result<(BigReal, f64)> {
    let (a, b) = soft_params(spec)?;
    if a == 0.0 {
        let k = f64::from(spec.k());
        return Ok((big(b * (4.0 * f64::from(n) + k)), f64::INFINITY));
    }
    let (t, e) = minimize_positive(|t| envelope_energy(spec, n, t), (a / b).cbrt().max(0.1));
    Ok((big(e), t))
}

pub fn envelope_upper(spec: &SystemSpec, n: u32) -> Result<BigReal> {
    Ok(envelope_upper_with_t(spec, n)?.0)
}

/// Rayleigh-Ritz bound from the trial function `r^{(d-1)/2} exp(-αr²/2)`,
/// with the optimal `α`.
pub fn gauss_upper_with_alpha(spec: &SystemSpec) -> Result<(BigReal, f64)> {
    let (a, b) = soft_params(spec)?;
    let d = f64::from(spec.d);
    let ratio = gamma_f64((d - 1.0) / 2.0) / gamma_f64(d / 2.0);
    let f = |alpha: f64| d * alpha / 2.0 + a * alpha.sqrt() * ratio + b * b * d / (2.0 * alpha);
    if a == 0.0 {
        return Ok((big(d * b), b));
    }
    let (alpha, e) = minimize_positive(f, b);
    Ok((big(e), alpha))
}

pub fn gauss_upper(spec: &SystemSpec) -> Result<BigReal> {
    Ok(gauss_upper_with_alpha(spec)?.0)
}

/// Local-energy value `αd + min_r [(b² - α²) r² + a/r]` for `0 < α < b`.
fn local_energy_at(a: f64, b: f64, d: f64, alpha: f64) -> f64 {
    let c = b * b - alpha * alpha;
    alpha * d + 1.5 * a.powf(2.0 / 3.0) * (2.0 * c).cbrt()
}

/// Local-energy lower bound, with the optimal `α`. At `a = 0` the supremum
/// `db` (approached as `α -> b`) is returned.
pub fn local_energy_lower_with_alpha(spec: &SystemSpec) -> Result<(BigReal, f64)> {
    let (a, b) = soft_params(spec)?;
    let d = f64::from(spec.d);
    if a == 0.0 {
        return Ok((big(d * b), b));
    }
    let (alpha, neg) = golden_min(|al| -local_energy_at(a, b, d, al), 0.0, b, 1e-13);
    Ok((big(-neg), alpha))
}

pub fn local_energy_lower(spec: &SystemSpec) -> Result<BigReal> {
    Ok(local_energy_lower_with_alpha(spec)?.0)
}

/// `min_r [(d-2)²/(8r²) + a/r + b²r²]`, a lower bound for `d >= 3`.
pub fn heisenberg_lower(spec: &SystemSpec) -> Result<BigReal> {
    let (a, b) = soft_params(spec)?;
    if spec.d < 3 {
        return Err(Error::domain("the Heisenberg bound needs d >= 3"));
    }
    let c = f64::from((spec.d - 2) * (spec.d - 2)) / 8.0;
    let f = |r: f64| c / (r * r) + a / r + b * b * r * r;
    let (_, e) = minimize_positive(f, (c / (b * b)).powf(0.25));
    Ok(big(e))
}

#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub d: u32,
    pub l: u32,
    pub n: u32,
    pub envelope_upper: BigReal,
    pub envelope_t: f64,
    /// Ground-state bounds, evaluated at `(k, 0)`.
    pub gauss_upper: BigReal,
    pub gauss_alpha: f64,
    pub local_energy_lower: BigReal,
    pub local_energy_alpha: f64,
    pub heisenberg_lower: Option<BigReal>,
}

/// All bounds for state `n` of the `l` subspace. Ground-state bounds use
/// `d -> k = d + 2l`, `l -> 0`.
pub fn bounds_for_subspace(spec: &SystemSpec, n: u32) -> Result<BoundsReport> {
    let reduced = spec.with_dl(spec.k(), 0)?;
    let (env, t) = envelope_upper_with_t(spec, n)?;
    let (gauss, ga) = gauss_upper_with_alpha(&reduced)?;
    let (local, la) = local_energy_lower_with_alpha(&reduced)?;
    let heis = if reduced.d >= 3 { Some(heisenberg_lower(&reduced)?) } else { None };
    Ok(BoundsReport {
        d: spec.d,
        l: spec.l,
        n,
        envelope_upper: env,
        envelope_t: t,
        gauss_upper: gauss,
        gauss_alpha: ga,
        local_energy_lower: local,
        local_energy_alpha: la,
        heisenberg_lower: heis,
    })
}

/// A valid lower bound on every eigenvalue, used to open the AIM search
/// window: the local-energy bound of the `l` subspace for soft confinement
/// (hard eigenvalues lie above the soft ones), else zero.
pub fn spectrum_floor(spec: &SystemSpec) -> f64 {
    if spec.b.is_positive() {
        let soft = spec.with_radius(crate::model::Radius::Infinite).and_then(|s| s.with_dl(s.k(), 0));
        if let Ok(s) = soft {
            if let Ok(v) = local_energy_lower(&s) {
                return v.to_f64();
            }
        }
    }
    0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(a: &str, b: &str, d: u32, l: u32) -> SystemSpec {
        SystemSpec::soft(a, b, d, l).unwrap()
    }

    #[test]
    fn printed_ground_state_bounds() {
        let spec = s("1", "1", 3, 0);
        assert!((local_energy_lower(&spec).unwrap().to_f64() - 3.79049).abs() < 1e-4);
        let (g, alpha) = gauss_upper_with_alpha(&spec).unwrap();
        assert!((g.to_f64() - 4.07988).abs() < 1e-4);
        assert!((alpha - 0.843).abs() < 1e-3);
        assert!((envelope_upper(&spec, 0).unwrap().to_f64() - 4.2287).abs() < 1e-4);
    }

    #[test]
    fn printed_excited_envelopes() {
        assert!((envelope_upper(&s("1", "1", 4, 0), 3).unwrap().to_f64() - 16.9444).abs() < 1e-4);
        assert!((envelope_upper(&s("1", "1", 7, 0), 5).unwrap().to_f64() - 27.6228).abs() < 1e-4);
    }

    #[test]
    fn heisenberg_closed_form() {
        let v = heisenberg_lower(&s("0", "1", 3, 0)).unwrap().to_f64();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(heisenberg_lower(&s("1", "1", 2, 0)).is_err());
        assert!(heisenberg_lower(&s("1", "1", 3, 0)).unwrap().to_f64() < 3.79049);
    }

    #[test]
    fn oscillator_collapse() {
        let spec = s("0", "1", 3, 0);
        assert_eq!(gauss_upper(&spec).unwrap().to_f64(), 3.0);
        assert_eq!(envelope_upper(&spec, 0).unwrap().to_f64(), 3.0);
        assert!(local_energy_lower(&spec).unwrap().to_f64() <= 3.0);
        let spec = s("0", "2", 5, 1);
        assert_eq!(envelope_upper(&spec, 1).unwrap().to_f64(), 22.0);
    }

    #[test]
    fn tangency() {
        let spec = s("1", "1", 3, 0);
        let (_, t) = envelope_upper_with_t(&spec, 0).unwrap();
        let (alpha, beta) = envelope_tangent(1.0, t);
        for i in 1..=50 {
            let r = 0.1 * f64::from(i);
            assert!(alpha / (r * r) + beta >= 1.0 / r - 1e-15);
        }
        assert!((alpha / (t * t) + beta - 1.0 / t).abs() < 1e-10);
    }

    #[test]
    fn subspace_mapping() {
        let rep = bounds_for_subspace(&s("1", "1", 3, 1), 0).unwrap();
        let e = 5.735_130_562_770_479;
        assert!(rep.local_energy_lower.to_f64() < e);
        assert!(rep.gauss_upper.to_f64() > e);
        assert!(rep.envelope_upper.to_f64() > e);
        let rep = bounds_for_subspace(&s("1", "1", 2, 2), 0).unwrap();
        let direct = gauss_upper(&s("1", "1", 6, 0)).unwrap();
        assert_eq!(rep.gauss_upper, direct);
    }

    #[test]
    fn hard_is_rejected() {
        let spec = SystemSpec::hard("1", "1", 3, 0, "1").unwrap();
        assert!(gauss_upper(&spec).is_err());
        assert!(spectrum_floor(&spec) > 3.0);
    }
}
