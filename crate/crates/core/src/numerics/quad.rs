//! Tanh-sinh quadrature on a finite interval.

use super::bigreal::BigReal;
use crate::error::{Error, Result};

/// `∫_lo^hi f`, refining the step until two levels agree to `tol`
/// (absolute). Endpoint singularities of algebraic type are tolerated.
pub fn tanh_sinh<F>(f: F, lo: &BigReal, hi: &BigReal, tol: &BigReal) -> Result<BigReal>
where
    F: Fn(&BigReal) -> BigReal,
{
    let prec = lo.prec().max(hi.prec());
    let half = (hi - lo).div_i64(2);
    let mid = (hi + lo).div_i64(2);
    let half_pi = BigReal::pi(prec).div_i64(2);
    // Beyond t_max the weights fall below the working epsilon, with room
    // for integrable blow-up at the ends.
    let s_max = f64::from(prec.decimal_digits()) * std::f64::consts::LN_10 + 3.0;
    let t_max = (2.0 * s_max / std::f64::consts::PI).asinh();

    // Abscissa offsets measured from the nearer endpoint keep precision
    // where the nodes crowd together.
    let node = |t: &BigReal| -> (BigReal, BigReal) {
        let et = t.exp();
        let sinh = (&et - &et.recip()).div_i64(2);
        let cosh = (&et + &et.recip()).div_i64(2);
        let s = &half_pi * &sinh;
        let es = s.exp();
        let ems = es.recip();
        let cosh_s = (&es + &ems).div_i64(2);
        // 1 - tanh(s) = 2 e^{-s} / (e^s + e^{-s})
        let gap = ems.mul_i64(2) / (&es + &ems);
        let w = &half * &half_pi * &cosh / (&cosh_s * &cosh_s);
        (gap, w)
    };

    let eval_pair = |t: &BigReal| -> BigReal {
        let (gap, w) = node(t);
        let right = hi - &(&half * &gap);
        let left = lo + &(&half * &gap);
        w * (f(&left) + f(&right))
    };

    let mut h = BigReal::from_f64(0.5, prec);
    let mut sum = f(&mid) * (&half * &half_pi);
    let mut j = 1i64;
    loop {
        let t = h.mul_i64(j);
        if t.to_f64() > t_max {
            break;
        }
        sum += &eval_pair(&t);
        j += 1;
    }
    let mut estimate = &sum * &h;
    for _level in 0..12 {
        h = h.div_i64(2);
        // Only the new odd-indexed nodes need evaluating.
        let mut j = 1i64;
        loop {
            let t = h.mul_i64(j);
            if t.to_f64() > t_max {
                break;
            }
            sum += &eval_pair(&t);
            j += 2;
        }
        let next = &sum * &h;
        if (&next - &estimate).abs() <= *tol {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::NoConvergence(format!(
        "tanh-sinh quadrature did not reach tolerance {}",
        tol.to_sci(3)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Precision;

    #[test]
    fn polynomial_and_gaussian() {
        let p = Precision::digits(40);
        let tol = BigReal::pow10(-30, p);
        let zero = BigReal::zero(p);
        let one = BigReal::one(p);
        let v = tanh_sinh(|x| x * x, &zero, &one, &tol).unwrap();
        assert!((v - BigReal::ratio(1, 3, p)).abs() < BigReal::pow10(-30, p));

        let hi = BigReal::from_i64(12, p);
        let g = tanh_sinh(|x| (-(x * x)).exp(), &zero, &hi, &tol).unwrap();
        let exact = BigReal::pi(p).sqrt().div_i64(2);
        assert!((g - exact).abs() < BigReal::pow10(-28, p));
    }

    #[test]
    fn endpoint_singularity() {
        let p = Precision::digits(40);
        let tol = BigReal::pow10(-25, p);
        let zero = BigReal::zero(p);
        let one = BigReal::one(p);
        let v = tanh_sinh(|x| x.sqrt().recip(), &zero, &one, &tol).unwrap();
        assert!((v - BigReal::from_i64(2, p)).abs() < BigReal::pow10(-20, p));
    }
}
