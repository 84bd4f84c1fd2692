//! Dense univariate polynomials over arbitrary-precision coefficients.
//!
//! [`EPoly`] is a polynomial in the energy `E` with [`BigReal`] coefficients;
//! [`RPoly`] is a polynomial in the radius `r` whose coefficients are
//! themselves [`EPoly`] values. Both share one generic implementation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::bigreal::{BigReal, Precision};

/// Ring operations a polynomial coefficient must support.
pub trait Coeff: Clone + fmt::Debug {
    fn zero(prec: Precision) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale_real(&self, k: &BigReal) -> Self;
    fn scale_i64(&self, k: i64) -> Self;
    fn add_assign(&mut self, rhs: &Self);
}

impl Coeff for BigReal {
    fn zero(prec: Precision) -> Self {
        BigReal::zero(prec)
    }
    fn is_zero(&self) -> bool {
        BigReal::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_real(&self, k: &BigReal) -> Self {
        self * k
    }
    fn scale_i64(&self, k: i64) -> Self {
        self.mul_i64(k)
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

#[derive(Clone, PartialEq)]
pub struct Poly<C> {
    coeffs: Vec<C>,
    prec: Precision,
}

pub type EPoly = Poly<BigReal>;
pub type RPoly = Poly<EPoly>;

impl<C: Coeff> Poly<C> {
    /// Builds a polynomial from coefficients in ascending powers; trailing
    /// zero coefficients are trimmed.
    pub fn new(coeffs: Vec<C>, prec: Precision) -> Self {
        let mut p = Poly { coeffs, prec };
        p.trim();
        p
    }

    pub fn zero(prec: Precision) -> Self {
        Poly { coeffs: Vec::new(), prec }
    }

    pub fn constant(c: C, prec: Precision) -> Self {
        Self::new(vec![c], prec)
    }

    /// `c · x^power`.
    pub fn monomial(c: C, power: usize, prec: Precision) -> Self {
        let mut coeffs = vec![C::zero(prec); power];
        coeffs.push(c);
        Self::new(coeffs, prec)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(|| C::zero(self.prec))
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mul(k)).collect(), self.prec)
    }

    pub fn scale_real(&self, k: &BigReal) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale_real(k)).collect(), self.prec)
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale_i64(k)).collect(), self.prec)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(self.prec); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs, prec: self.prec }
    }

    /// Divides by `x^k`, discarding the low coefficients (callers check
    /// they vanish).
    pub fn unshift(&self, k: usize) -> Self {
        Poly { coeffs: self.coeffs.iter().skip(k).cloned().collect(), prec: self.prec }
    }

    /// Number of leading zero coefficients (the power of `x` dividing `self`).
    pub fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn derivative(&self) -> Self {
        let coeffs =
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale_i64(i as i64)).collect();
        Self::new(coeffs, self.prec)
    }

    /// Horner evaluation at a scalar point.
    pub fn eval_at(&self, x: &BigReal) -> C {
        let mut acc = C::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale_real(x);
            acc.add_assign(c);
        }
        acc
    }

    /// Synthetic division by `(x - root)`: returns quotient and remainder.
    pub fn deflate(&self, root: &BigReal) -> (Self, C) {
        if self.coeffs.is_empty() {
            return (self.clone(), C::zero(self.prec));
        }
        let n = self.coeffs.len();
        let mut q = vec![C::zero(self.prec); n - 1];
        let mut carry = C::zero(self.prec);
        for i in (0..n).rev() {
            let mut v = self.coeffs[i].clone();
            v.add_assign(&carry.scale_real(root));
            if i == 0 {
                return (Self::new(q, self.prec), v);
            }
            q[i - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Multiplies by `(x - root)`.
    pub fn mul_linear(&self, root: &BigReal) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![C::zero(self.prec); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + 1].add_assign(c);
            out[i].add_assign(&c.scale_real(root).neg());
        }
        Self::new(out, self.prec)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let prec = self.prec.max(rhs.prec);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = C::zero(prec);
        let coeffs = (0..n)
            .map(|i| f(self.coeffs.get(i).unwrap_or(&zero), rhs.coeffs.get(i).unwrap_or(&zero)))
            .collect();
        Self::new(coeffs, prec)
    }

    fn product(&self, rhs: &Self) -> Self {
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(prec);
        }
        let mut out = vec![C::zero(prec); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j].add_assign(&a.mul(b));
            }
        }
        Self::new(out, prec)
    }
}

impl EPoly {
    pub fn from_i64s(coeffs: &[i64], prec: Precision) -> Self {
        Self::new(coeffs.iter().map(|&c| BigReal::from_i64(c, prec)).collect(), prec)
    }

    /// The identity polynomial `E`.
    pub fn x(prec: Precision) -> Self {
        Self::from_i64s(&[0, 1], prec)
    }

    pub fn eval(&self, x: &BigReal) -> BigReal {
        let mut acc = BigReal::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, x: &BigReal) -> (BigReal, BigReal) {
        let mut p = BigReal::zero(self.prec);
        let mut dp = BigReal::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            dp *= x;
            dp += &p;
            p *= x;
            p += c;
        }
        (p, dp)
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_abs_coeff(&self) -> BigReal {
        self.coeffs.iter().fold(BigReal::zero(self.prec), |m, c| m.max(c.abs()))
    }

    /// Divides every coefficient by the largest magnitude; roots are unchanged.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs_coeff();
        if m.is_zero() {
            return self.clone();
        }
        let inv = m.recip();
        self.scale_real(&inv)
    }

    /// Sum of absolute terms `Σ|c_i||x|^i`, the scale of rounding error in `eval`.
    pub fn eval_abs(&self, x: &BigReal) -> BigReal {
        let ax = x.abs();
        let mut acc = BigReal::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= &ax;
            acc += &c.abs();
        }
        acc
    }

    /// Re-rounds every coefficient to a new precision.
    pub fn with_prec(&self, prec: Precision) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.with_prec(prec)).collect(), prec)
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.coeffs.iter().map(BigReal::to_f64).collect()
    }
}

impl Coeff for EPoly {
    fn zero(prec: Precision) -> Self {
        Poly::zero(prec)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.product(rhs)
    }
    fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect(), prec: self.prec }
    }
    fn scale_real(&self, k: &BigReal) -> Self {
        Poly::scale_real(self, k)
    }
    fn scale_i64(&self, k: i64) -> Self {
        Poly::scale_i64(self, k)
    }
    fn add_assign(&mut self, rhs: &Self) {
        if rhs.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigReal::zero(self.prec));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl RPoly {
    /// Lifts a polynomial in `r` with scalar coefficients.
    pub fn from_scalars(coeffs: Vec<BigReal>, prec: Precision) -> Self {
        Self::new(coeffs.into_iter().map(|c| EPoly::constant(c, prec)).collect(), prec)
    }

    /// Highest power of `E` appearing in any coefficient.
    pub fn e_degree(&self) -> usize {
        self.coeffs.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    /// Number of stored scalar coefficients.
    pub fn size(&self) -> usize {
        self.coeffs.iter().map(|c| c.coeffs().len()).sum()
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        self.zip_with(rhs, |a, b| a.add(b))
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        self.zip_with(rhs, |a, b| a.sub(b))
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        self.product(rhs)
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), prec: self.prec }
    }
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::digits(50)
    }

    fn close(a: &BigReal, b: f64) -> bool {
        (a.to_f64() - b).abs() < 1e-30_f64.max(b.abs() * 1e-15)
    }

    #[test]
    fn difference_of_squares() {
        let a = EPoly::from_i64s(&[1, 1], p());
        let b = EPoly::from_i64s(&[-1, 1], p());
        assert_eq!(&a * &b, EPoly::from_i64s(&[-1, 0, 1], p()));
    }

    #[test]
    fn additive_identity() {
        let a = EPoly::from_i64s(&[3, -2, 7], p());
        assert_eq!(&a + &EPoly::zero(p()), a);
        assert_eq!((&a - &a).degree(), 0);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn monomial_product_in_r() {
        let two_r = RPoly::monomial(EPoly::from_i64s(&[2], p()), 1, p());
        let three_r2 = RPoly::monomial(EPoly::from_i64s(&[3], p()), 2, p());
        let prod = &two_r * &three_r2;
        assert_eq!(prod.degree(), 3);
        assert_eq!(prod.coeff(3), EPoly::from_i64s(&[6], p()));
        assert!(prod.coeff(2).is_zero());
    }

    #[test]
    fn horner_and_derivative() {
        let q = EPoly::from_i64s(&[6, -5, 1], p());
        let (v, dv) = q.eval_with_derivative(&BigReal::from_i64(4, p()));
        assert!(close(&v, 2.0));
        assert!(close(&dv, 3.0));
        assert_eq!(q.derivative(), EPoly::from_i64s(&[-5, 2], p()));
    }

    #[test]
    fn deflation_by_known_root() {
        let q = EPoly::from_i64s(&[6, -5, 1], p());
        let (quot, rem) = q.deflate(&BigReal::from_i64(2, p()));
        assert!(rem.is_zero());
        assert_eq!(quot, EPoly::from_i64s(&[-3, 1], p()));
        assert_eq!(quot.mul_linear(&BigReal::from_i64(2, p())), q);
    }

    #[test]
    fn rpoly_eval_gives_epoly() {
        // (E r + 1) at r = 2 -> 2E + 1
        let num = RPoly::new(vec![EPoly::from_i64s(&[1], p()), EPoly::x(p())], p());
        let at2 = num.eval_at(&BigReal::from_i64(2, p()));
        assert_eq!(at2, EPoly::from_i64s(&[1, 2], p()));
    }
}
