//! Real-root isolation and refinement for [`EPoly`] values.

use super::bigreal::{BigReal, Precision};
use super::poly::EPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub value: BigReal,
    /// Set when the root coincides with a root of the derivative.
    pub multiple: bool,
}

/// Sign of `p(x)`, treating values inside the rounding noise of Horner
/// evaluation as zero.
fn noisy_sign(p: &EPoly, x: &BigReal) -> (i32, BigReal) {
    let v = p.eval(x);
    let noise = p.eval_abs(x) * p.prec().epsilon().mul_i64(16);
    if v.abs() <= noise {
        (0, v)
    } else {
        (v.signum_i(), v)
    }
}

fn tolerance(x: &BigReal, digits: u32, prec: Precision) -> BigReal {
    BigReal::pow10(-(digits as i32), prec) * BigReal::one(prec).max(x.abs())
}

/// Refines the single root of `p` in `[lo, hi]`, given `p(lo)` and `p(hi)`
/// of opposite sign. Bisection brings the bracket to ten significant digits;
/// safeguarded Newton then finishes to `digits`.
pub fn refine_root(p: &EPoly, lo: &BigReal, hi: &BigReal, digits: u32) -> Result<BigReal> {
    let prec = p.prec();
    if digits >= prec.decimal_digits() {
        return Err(Error::NoConvergence(format!(
            "1e-{digits} is below the resolution of {} working digits",
            prec.decimal_digits()
        )));
    }
    let mut a = lo.clone();
    let mut b = hi.clone();
    let sa = p.eval(&a).signum_i();
    if sa == 0 {
        return Ok(a);
    }
    if p.eval(&b).signum_i() == 0 {
        return Ok(b);
    }
    let coarse = BigReal::pow10(-10, prec);
    let half = BigReal::ratio(1, 2, prec);
    loop {
        let width = (&b - &a).abs();
        if width <= &coarse * &BigReal::one(prec).max(a.abs()) {
            break;
        }
        let m = (&a + &b) * &half;
        let sm = p.eval(&m).signum_i();
        if sm == 0 {
            return Ok(m);
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
    }

    let mut x = (&a + &b) * &half;
    for _ in 0..200 {
        let tol = tolerance(&x, digits, prec);
        let (v, dv) = p.eval_with_derivative(&x);
        if v.is_zero() {
            return Ok(x);
        }
        if v.signum_i() == sa {
            a = x.clone();
        } else {
            b = x.clone();
        }
        let newton = if dv.is_zero() { None } else { Some(&x - &(&v / &dv)) };
        let next = match newton {
            Some(n) if n > a.clone().min(b.clone()) && n < a.clone().max(b.clone()) => n,
            _ => (&a + &b) * &half,
        };
        let step = (&next - &x).abs();
        x = next;
        if step <= tol || (&b - &a).abs() <= tol {
            return Ok(x);
        }
        let mid = (&a + &b) * &half;
        if mid == a || mid == b {
            break;
        }
    }
    Err(Error::NoConvergence(format!(
        "bracket [{}, {}] did not shrink to 1e-{digits} at {} working digits",
        a.to_sci(12),
        b.to_sci(12),
        prec.decimal_digits()
    )))
}

/// All distinct real roots of `p` in `[lo, hi]`, sorted, each refined to
/// `target_digits`. Roots of `p'` split the interval into monotone pieces
/// (recursively), so no root is missed; a root sitting on a critical point
/// is reported once and flagged as multiple.
pub fn isolate_real_roots(
    p: &EPoly,
    lo: &BigReal,
    hi: &BigReal,
    target_digits: u32,
) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::domain("root isolation of the zero polynomial"));
    }
    if lo >= hi {
        return Err(Error::domain("empty root interval"));
    }
    let p = p.normalized();
    isolate_rec(&p, lo, hi, target_digits)
}

fn isolate_rec(p: &EPoly, lo: &BigReal, hi: &BigReal, digits: u32) -> Result<Vec<RealRoot>> {
    let prec = p.prec();
    match p.degree() {
        0 => return Ok(Vec::new()),
        1 => {
            let root = -(p.coeff(0) / p.coeff(1));
            return Ok(if &root >= lo && &root <= hi {
                vec![RealRoot { value: root, multiple: false }]
            } else {
                Vec::new()
            });
        }
        _ => {}
    }
    let crit: Vec<BigReal> = isolate_rec(&p.derivative().normalized(), lo, hi, digits)?
        .into_iter()
        .map(|r| r.value)
        .collect();

    let mut points = Vec::with_capacity(crit.len() + 2);
    points.push(lo.clone());
    for c in crit {
        if &c > lo && &c < hi {
            points.push(c);
        }
    }
    points.push(hi.clone());

    let signs: Vec<(i32, BigReal)> = points.iter().map(|x| noisy_sign(p, x)).collect();
    let mut roots: Vec<RealRoot> = Vec::new();
    let push = |roots: &mut Vec<RealRoot>, value: BigReal, multiple: bool| {
        let dup = roots.last().is_some_and(|r: &RealRoot| {
            (&r.value - &value).abs() <= tolerance(&value, digits, prec)
        });
        if dup {
            if multiple {
                roots.last_mut().unwrap().multiple = true;
            }
        } else {
            roots.push(RealRoot { value, multiple });
        }
    };
    for i in 0..points.len() {
        let interior = i > 0 && i + 1 < points.len();
        if signs[i].0 == 0 {
            push(&mut roots, points[i].clone(), interior);
        }
        if i + 1 < points.len() {
            let (s0, s1) = (signs[i].0, signs[i + 1].0);
            if s0 != 0 && s1 != 0 && s0 != s1 {
                let r = refine_root(p, &points[i], &points[i + 1], digits)?;
                push(&mut roots, r, false);
            }
        }
    }
    Ok(roots)
}

/// Sign-change scan of `[lo, hi]` on a uniform grid, refining each bracket.
/// Faster than [`isolate_real_roots`] for high-degree polynomials whose
/// wanted roots are known to be separated by more than the grid step.
pub fn scan_real_roots(
    p: &EPoly,
    lo: &BigReal,
    hi: &BigReal,
    samples: usize,
    digits: u32,
) -> Result<Vec<BigReal>> {
    if p.is_zero() || p.degree() == 0 {
        return Ok(Vec::new());
    }
    let p = p.normalized();
    let step = (hi - lo).div_i64(samples.max(1) as i64);
    let mut roots = Vec::new();
    let mut x_prev = lo.clone();
    let mut s_prev = p.eval(&x_prev).signum_i();
    if s_prev == 0 {
        roots.push(x_prev.clone());
    }
    for i in 1..=samples.max(1) {
        let x = if i == samples.max(1) { hi.clone() } else { lo + &step.mul_i64(i as i64) };
        let s = p.eval(&x).signum_i();
        if s == 0 {
            roots.push(x.clone());
        } else if s_prev != 0 && s != s_prev {
            roots.push(refine_root(&p, &x_prev, &x, digits)?);
        }
        x_prev = x;
        s_prev = s;
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::digits(60)
    }

    fn b(v: i64) -> BigReal {
        BigReal::from_i64(v, p())
    }

    #[test]
    fn factored_quadratic() {
        let q = EPoly::from_i64s(&[6, -5, 1], p());
        let roots = isolate_real_roots(&q, &b(0), &b(10), 40).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((&roots[0].value - &b(2)).abs() < BigReal::pow10(-40, p()));
        assert!((&roots[1].value - &b(3)).abs() < BigReal::pow10(-40, p()));
    }

    #[test]
    fn no_real_roots() {
        let q = EPoly::from_i64s(&[1, 0, 1], p());
        assert!(isolate_real_roots(&q, &b(-10), &b(10), 30).unwrap().is_empty());
    }

    #[test]
    fn quartic_condition_roots() {
        // a⁴ − 60a² + 288: roots √(30 ∓ 6√17)
        let q = EPoly::from_i64s(&[288, 0, -60, 0, 1], p());
        let roots = isolate_real_roots(&q, &b(0), &b(10), 40).unwrap();
        assert_eq!(roots.len(), 2);
        let s17 = b(17).sqrt();
        let lo = (b(30) - b(6) * &s17).sqrt();
        let hi = (b(30) + b(6) * &s17).sqrt();
        assert!((&roots[0].value - &lo).abs() < BigReal::pow10(-40, p()));
        assert!((&roots[1].value - &hi).abs() < BigReal::pow10(-40, p()));
        assert!((roots[0].value.to_f64() - 2.2937668).abs() < 1e-7);
        assert!((roots[1].value.to_f64() - 7.3985562).abs() < 1e-7);
    }

    #[test]
    fn double_root_is_flagged() {
        // (x − 1)² (x − 4)
        let q = EPoly::from_i64s(&[-4, 9, -6, 1], p());
        let roots = isolate_real_roots(&q, &b(-5), &b(5), 30).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].multiple);
        assert!(!roots[1].multiple);
        assert!((&roots[0].value - &b(1)).abs() < BigReal::pow10(-25, p()));
    }

    #[test]
    fn precision_ceiling_is_reported() {
        let q = EPoly::from_i64s(&[-2, 0, 1], Precision::digits(20));
        let lo = BigReal::from_i64(0, Precision::digits(20));
        let hi = BigReal::from_i64(2, Precision::digits(20));
        assert!(matches!(refine_root(&q, &lo, &hi, 60), Err(Error::NoConvergence(_))));
    }

    #[test]
    fn scan_matches_isolation() {
        let q = EPoly::from_i64s(&[-6, 11, -6, 1], p());
        let scanned = scan_real_roots(&q, &b(0), &BigReal::ratio(7, 2, p()), 50, 40).unwrap();
        assert_eq!(scanned.len(), 3);
        for (r, want) in scanned.iter().zip([1, 2, 3]) {
            assert!((r - &b(want)).abs() < BigReal::pow10(-40, p()));
        }
    }
}
