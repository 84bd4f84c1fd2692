//! Rational functions of `r` with polynomial-in-`E` numerator coefficients.
//!
//! Denominators never carry `E` and are kept factored as a monic product
//! `∏ (r - c_i)^{p_i}` over a small set of poles. For the AIM sequences the
//! poles are `r = 0` and, under hard confinement, `r = R`; keeping them
//! factored makes the least common denominator exact and cheap.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::bigreal::{BigReal, Precision};
use super::poly::{EPoly, RPoly};
use crate::error::{Error, Result};

/// Monic denominator `∏ (r - pole)^power`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Denominator {
    factors: Vec<(BigReal, u32)>,
}

impl Denominator {
    pub fn one() -> Self {
        Denominator { factors: Vec::new() }
    }

    pub fn pole(at: BigReal, power: u32) -> Self {
        let mut d = Denominator::one();
        if power > 0 {
            d.factors.push((at, power));
        }
        d
    }

    pub fn factors(&self) -> &[(BigReal, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn power_of(&self, at: &BigReal) -> u32 {
        self.factors.iter().find(|(c, _)| c == at).map_or(0, |(_, p)| *p)
    }

    fn set_power(&mut self, at: &BigReal, power: u32) {
        if let Some(slot) = self.factors.iter_mut().find(|(c, _)| c == at) {
            slot.1 = power;
        } else if power > 0 {
            self.factors.push((at.clone(), power));
        }
        self.factors.retain(|(_, p)| *p > 0);
    }

    /// Least common multiple with `other`.
    fn lcm(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, p) in &other.factors {
            if *p > out.power_of(c) {
                out.set_power(c, *p);
            }
        }
        out
    }

    fn product(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, p) in &other.factors {
            let q = out.power_of(c) + p;
            out.set_power(c, q);
        }
        out
    }

    /// Expanded form as a polynomial in `r` (constant in `E`).
    pub fn to_rpoly(&self, prec: Precision) -> RPoly {
        let mut acc = RPoly::constant(EPoly::constant(BigReal::one(prec), prec), prec);
        for (c, p) in &self.factors {
            for _ in 0..*p {
                acc = acc.mul_linear(c);
            }
        }
        acc
    }

    /// Value at a scalar point, or `EvalAtPole` when a factor vanishes to
    /// working precision.
    pub fn eval(&self, r: &BigReal) -> Result<BigReal> {
        let prec = r.prec();
        let mut acc = BigReal::one(prec);
        for (c, p) in &self.factors {
            let diff = r - c;
            let scale = BigReal::one(prec).max(c.abs());
            if diff.abs() <= &scale * &prec.epsilon() {
                return Err(Error::EvalAtPole(r.to_sci(20)));
            }
            acc *= &diff.powi(*p as i32);
        }
        Ok(acc)
    }
}

#[derive(Clone, PartialEq)]
pub struct RationalFn {
    num: RPoly,
    den: Denominator,
}

impl RationalFn {
    /// Builds `num / den` in canonical form.
    pub fn new(num: RPoly, den: Denominator) -> Self {
        let mut f = RationalFn { num, den };
        f.canonicalize();
        f
    }

    pub fn polynomial(num: RPoly) -> Self {
        RationalFn { num, den: Denominator::one() }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::polynomial(RPoly::zero(prec))
    }

    /// `coef / (r - at)^power` with `coef` independent of `r`.
    pub fn pole_term(coef: EPoly, at: BigReal, power: u32) -> Self {
        let prec = coef.prec();
        Self::new(RPoly::constant(coef, prec), Denominator::pole(at, power))
    }

    /// Scalar constant (in both `r` and `E`).
    pub fn scalar(c: BigReal) -> Self {
        let prec = c.prec();
        Self::polynomial(RPoly::constant(EPoly::constant(c, prec), prec))
    }

    pub fn num(&self) -> &RPoly {
        &self.num
    }

    pub fn den(&self) -> &Denominator {
        &self.den
    }

    pub fn den_rpoly(&self) -> RPoly {
        self.den.to_rpoly(self.prec())
    }

    pub fn prec(&self) -> Precision {
        self.num.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels powers of `r` shared by numerator and the `r = 0` pole.
    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = Denominator::one();
            return;
        }
        let zero = BigReal::zero(self.prec());
        let p0 = self.den.power_of(&zero);
        if p0 > 0 {
            let k = (self.num.low_order() as u32).min(p0);
            if k > 0 {
                self.num = self.num.unshift(k as usize);
                self.den.set_power(&zero, p0 - k);
            }
        }
    }

    /// Rewrites `self` over the denominator `target`, which must be a
    /// multiple of the current one.
    fn raise_to(&self, target: &Denominator) -> RPoly {
        let mut num = self.num.clone();
        for (c, p) in target.factors() {
            let missing = p - self.den.power_of(c);
            if c.is_zero() {
                num = num.shift(missing as usize);
            } else {
                for _ in 0..missing {
                    num = num.mul_linear(c);
                }
            }
        }
        num
    }

    /// `d/dr`, as `(num'·den − num·den')/den²` reduced over the factored poles.
    pub fn derivative(&self) -> Self {
        if self.den.is_one() {
            return Self::polynomial(self.num.derivative());
        }
        let prec = self.prec();
        let poles = self.den.factors();
        // Q = ∏ (r - c_i) over the distinct poles
        let linear = |c: &BigReal, p: &RPoly| {
            if c.is_zero() {
                p.shift(1)
            } else {
                p.mul_linear(c)
            }
        };
        let mut lhs = self.num.derivative();
        for (c, _) in poles {
            lhs = linear(c, &lhs);
        }
        let mut rhs = RPoly::zero(prec);
        for (i, (_, p)) in poles.iter().enumerate() {
            let mut term = self.num.scale_i64(i64::from(*p));
            for (j, (c, _)) in poles.iter().enumerate() {
                if i != j {
                    term = linear(c, &term);
                }
            }
            rhs = &rhs + &term;
        }
        let mut den = self.den.clone();
        for (c, p) in poles {
            den.set_power(c, p + 1);
        }
        Self::new(&lhs - &rhs, den)
    }

    /// Substitutes `r = r0`, giving a polynomial in `E`.
    pub fn eval_r(&self, r0: &BigReal) -> Result<EPoly> {
        let d = self.den.eval(r0)?;
        Ok(self.num.eval_at(r0).scale_real(&d.recip()))
    }

    /// Substitutes `r = r0` into the numerator only.
    pub fn eval_num_r(&self, r0: &BigReal) -> EPoly {
        self.num.eval_at(r0)
    }

    /// Full evaluation at `(r, E)`.
    pub fn eval(&self, r: &BigReal, e: &BigReal) -> Result<BigReal> {
        Ok(self.eval_r(r)?.eval(e))
    }

    pub fn scale_real(&self, k: &BigReal) -> Self {
        Self::new(self.num.scale_real(k), self.den.clone())
    }

    /// Highest power of `E` in the numerator.
    pub fn e_degree(&self) -> usize {
        self.num.e_degree()
    }

    fn combine(&self, rhs: &Self, op: impl Fn(&RPoly, &RPoly) -> RPoly) -> Self {
        let den = self.den.lcm(&rhs.den);
        let a = self.raise_to(&den);
        let b = rhs.raise_to(&den);
        Self::new(op(&a, &b), den)
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        RationalFn::new(&self.num * &rhs.num, self.den.product(&rhs.den))
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / {:?}", self.num, self.den.factors())
    }
}
