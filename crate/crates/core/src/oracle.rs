//! Independent shooting solver.
//!
//! The regular solution `u = r^{(k-1)/2} f(r)` is started from its power
//! series and carried outward with Taylor-series steps of
//! `r² u'' = (c + a r − E r² + b² r⁴) u`, `c = (k−1)(k−3)/4`, all in
//! extended precision. Eigenvalues are the energies where `u` vanishes at
//! the outer end: `R` under a wall, otherwise a radius far enough into the
//! forbidden region that the Dirichlet condition there perturbs the level
//! below the requested digits. The node count of `u` orders the levels.

use crate::aim::{EigenResult, Method};
use crate::bounds;
use crate::error::{Error, Result};
use crate::model::{Radius, SystemSpec};
use crate::numerics::{BigReal, Precision};

#[derive(Clone, Debug)]
pub struct ShotConfig {
    /// Where the power series hands over to the stepper.
    pub r_min: BigReal,
    pub r_max: BigReal,
    pub precision: Precision,
    /// Series terms are dropped below `10^-tol_digits` relative.
    pub tol_digits: u32,
}

/// Integration settings good for energies up to `e_max` at `digits` digits.
pub fn shot_config(spec: &SystemSpec, e_max: f64, digits: u32) -> ShotConfig {
    let b = spec.b.to_f64();
    let a = spec.a.to_f64();
    let r_max = match &spec.radius {
        Radius::Finite(r) => r.to_f64(),
        Radius::Infinite => {
            let turn = e_max.max(1.0).sqrt() / b;
            let width = (2.0 * f64::from(digits + 6) * std::f64::consts::LN_10 / b).sqrt();
            turn + width
        }
    };
    // digits lost to the growing solution in the forbidden region
    let c = {
        let k = f64::from(spec.k());
        (k - 1.0) * (k - 3.0) / 4.0
    };
    let steps = 4000;
    let mut growth = 0.0;
    for i in 1..=steps {
        let r = r_max * f64::from(i) / f64::from(steps);
        let q = c / (r * r) + a / r + b * b * r * r - e_max;
        if q > 0.0 && r > 0.05 * r_max {
            growth += q.sqrt() * r_max / f64::from(steps);
        }
    }
    let lost = (2.0 * growth / std::f64::consts::LN_10).ceil() as u32;
    let precision = Precision::digits(digits + lost + 30);
    let scale = 1.0 / (1.0 + e_max.abs() + a + b).sqrt();
    let r_min = (0.25 * scale).min(r_max / 8.0);
    ShotConfig {
        r_min: BigReal::from_f64(r_min, precision),
        r_max: BigReal::from_f64(r_max, precision).with_prec(precision),
        precision,
        tol_digits: precision.decimal_digits() - 5,
    }
}

#[derive(Clone, Debug)]
pub struct Shot {
    /// `u` at the outer end.
    pub end_value: BigReal,
    /// Sign changes of `u` strictly before the last step.
    pub nodes: u32,
    /// Whether `u` also changes sign within the last step.
    pub end_crossing: bool,
}

impl Shot {
    /// Zeros on `(0, r_max]`: the number of Dirichlet levels below the energy.
    pub fn sturm_count(&self) -> u32 {
        self.nodes + u32::from(self.end_crossing)
    }
}

struct Ode {
    c: BigReal,
    a: BigReal,
    b2: BigReal,
    e: BigReal,
}

impl Ode {
    fn new(spec: &SystemSpec, e: &BigReal, prec: Precision) -> Self {
        let k = i64::from(spec.k());
        Ode {
            c: BigReal::ratio((k - 1) * (k - 3), 4, prec),
            a: spec.a.with_prec(prec),
            b2: (&spec.b * &spec.b).with_prec(prec),
            e: e.with_prec(prec),
        }
    }

    /// `(u, u')` at `r` from the regular power series `r^s Σ cᵢ rⁱ`.
    fn frobenius(&self, k: u32, r: &BigReal, tol: &BigReal) -> (BigReal, BigReal) {
        let prec = r.prec();
        let kk = i64::from(k);
        // cᵢ i(i+k−2) = a cᵢ₋₁ − E cᵢ₋₂ + b² cᵢ₋₄, scaled by rⁱ
        let mut w: Vec<BigReal> = vec![BigReal::one(prec)];
        let r2 = r * r;
        let r4 = &r2 * &r2;
        let mut f = BigReal::one(prec);
        let mut df = BigReal::zero(prec);
        let mut small = 0;
        for i in 1..5000usize {
            let ii = i as i64;
            let mut t = &self.a * r * &w[i - 1];
            if i >= 2 {
                t -= &(&self.e * &r2 * &w[i - 2]);
            }
            if i >= 4 {
                t += &(&self.b2 * &r4 * &w[i - 4]);
            }
            let wi = t.div_i64(ii * (ii + kk - 2));
            f += &wi;
            df += &wi.mul_i64(ii);
            let tiny = wi.abs() <= tol * &f.abs().max(BigReal::pow10(-300, prec));
            w.push(wi);
            small = if tiny { small + 1 } else { 0 };
            if small >= 4 {
                break;
            }
        }
        let s = BigReal::ratio(kk - 1, 2, prec);
        let rs = r.powf(&s);
        let u = &rs * &f;
        // u' = r^s (f' + s f / r), with Σ i wᵢ = r f'
        let du = &rs * &((&df + &(&s * &f)) / r);
        (u, du)
    }

    /// One Taylor step from `r` to `r + h`.
    fn step(&self, r: &BigReal, h: &BigReal, u: &BigReal, du: &BigReal, tol: &BigReal) -> (BigReal, BigReal) {
        let prec = r.prec();
        let r2 = r * r;
        let r3 = &r2 * r;
        let p = [
            &(&(&self.c + &(&self.a * r)) - &(&self.e * &r2)) + &(&self.b2 * &(&r2 * &r2)),
            &(&self.a - &(&self.e * r).mul_i64(2)) + &(&self.b2 * &r3).mul_i64(4),
            &(&self.b2 * &r2).mul_i64(6) - &self.e,
            (&self.b2 * r).mul_i64(4),
            self.b2.clone(),
        ];
        // qᵢ = pᵢ h^{i+2}, for scaled coefficients vₘ = uₘ hᵐ
        let mut hp = h * h;
        let q: Vec<BigReal> = p
            .iter()
            .map(|pi| {
                let v = pi * &hp;
                hp = &hp * h;
                v
            })
            .collect();
        let two_rh = (r * h).mul_i64(2);
        let h2 = h * h;
        let mut v: Vec<BigReal> = vec![u.clone(), du * h];
        let mut sum_u = &v[0] + &v[1];
        let mut sum_du = v[1].clone();
        let scale = u.abs() + (du * h).abs();
        let mut small = 0;
        for m in 0..5000usize {
            let mi = m as i64;
            let mut acc = BigReal::zero(prec);
            for (i, qi) in q.iter().enumerate() {
                if i <= m {
                    acc += &(qi * &v[m - i]);
                }
            }
            acc -= &(&two_rh * &v[m + 1]).mul_i64((mi + 1) * mi);
            acc -= &(&h2 * &v[m]).mul_i64(mi * (mi - 1));
            let next = (acc / &r2).div_i64((mi + 2) * (mi + 1));
            sum_u += &next;
            sum_du += &next.mul_i64(mi + 2);
            let tiny = next.abs() <= tol * &scale;
            v.push(next);
            small = if tiny { small + 1 } else { 0 };
            if small >= 5 && m > 6 {
                break;
            }
        }
        (sum_u, sum_du / h)
    }
}

/// Integrates the regular solution at energy `e` out to `cfg.r_max`.
pub fn integrate(spec: &SystemSpec, e: &BigReal, cfg: &ShotConfig) -> Shot {
    let prec = cfg.precision;
    let ode = Ode::new(spec, e, prec);
    let tol = BigReal::pow10(-(cfg.tol_digits as i32), prec);
    let (mut u, mut du) = ode.frobenius(spec.k(), &cfg.r_min, &tol);
    let mut r = cfg.r_min.clone();
    let mut nodes = 0u32;
    let mut end_crossing = false;
    let mut sign = u.signum_i();
    let e_f = e.to_f64().abs();
    let (a_f, b2_f, c_f) = (ode.a.to_f64(), ode.b2.to_f64(), ode.c.to_f64().abs());
    while r < cfg.r_max {
        let rf = r.to_f64();
        let far = rf * 1.5;
        let q = e_f + c_f / (rf * rf) + a_f / rf + b2_f * far * far;
        let h_f = (0.5 * rf).min(0.8 / q.sqrt().max(1e-3));
        let mut h = BigReal::from_f64(h_f, prec);
        let last = &r + &h >= cfg.r_max;
        if last {
            h = &cfg.r_max - &r;
        }
        let (nu, ndu) = ode.step(&r, &h, &u, &du, &tol);
        u = nu;
        du = ndu;
        r = if last { cfg.r_max.clone() } else { &r + &h };
        let s = u.signum_i();
        if s != 0 && sign != 0 && s != sign {
            if last {
                end_crossing = true;
            } else {
                nodes += 1;
            }
        }
        if s != 0 {
            sign = s;
        }
    }
    Shot { end_value: u, nodes, end_crossing }
}

/// Outer classical turning point: the largest `r` with
/// `c/r² + a/r + b²r² = e`, or `None` if the potential stays below `e`.
fn outer_turning_point(spec: &SystemSpec, e: f64) -> Option<f64> {
    let k = f64::from(spec.k());
    let c = (k - 1.0) * (k - 3.0) / 4.0;
    let (a, b) = (spec.a.to_f64(), spec.b.to_f64());
    let v = |r: f64| c / (r * r) + a / r + b * b * r * r - e;
    if b == 0.0 {
        return None;
    }
    let mut hi = (e.abs().sqrt() / b).max(1.0) * 2.0 + 1.0;
    while v(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while v(lo) > 0.0 && lo > 1e-12 {
        lo /= 2.0;
    }
    if v(lo) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if v(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// Nodes of the regular solution at energy `e`. Zeros are counted up to the
/// outer turning point (or the wall, if nearer): an eigenfunction has none
/// beyond it, and a level `E` reports its own index even when `E` carries
/// rounding error.
pub fn count_nodes_numeric(spec: &SystemSpec, e: &BigReal) -> Result<u32> {
    spec.validate()?;
    let mut cfg = shot_config(spec, e.to_f64(), 15);
    if let Some(rt) = outer_turning_point(spec, e.to_f64()) {
        if rt < cfg.r_max.to_f64() {
            cfg.r_max = BigReal::from_f64(rt, cfg.precision);
        }
    }
    Ok(integrate(spec, e, &cfg).nodes)
}

/// Level `n` (node count) by shooting, to `digits` decimals.
pub fn shoot_eigenvalue(spec: &SystemSpec, n: u32, digits: u32) -> Result<EigenResult> {
    spec.validate()?;
    let mut lo = bounds::spectrum_floor(spec);
    lo -= 1e-6 * lo.abs().max(1.0);
    let k = f64::from(spec.k());
    let b = spec.b.to_f64();
    let mut hi = match spec.radius.finite() {
        Some(r) => {
            let r = r.to_f64();
            let j = std::f64::consts::PI * (f64::from(n) + 1.0 + k / 4.0);
            (j / r).powi(2) + b * b * r * r + 2.0 * spec.a.to_f64() / r + 1.0
        }
        None => b * (4.0 * f64::from(n) + k + 4.0) + 2.0 * spec.a.to_f64() + 1.0,
    };

    // Sturm: the count of interior nodes equals the number of levels below e
    let mut shots = 0usize;
    let mut cfg = shot_config(spec, hi, digits);
    let mut guard = 0;
    loop {
        shots += 1;
        if integrate(spec, &BigReal::from_f64(hi, cfg.precision), &cfg).sturm_count() > n {
            break;
        }
        hi *= 2.0;
        cfg = shot_config(spec, hi, digits);
        guard += 1;
        if guard > 40 {
            return Err(Error::NoBracket { lo: format!("{lo}"), hi: format!("{hi}") });
        }
    }
    let prec = cfg.precision;
    let mut lo_b = BigReal::from_f64(lo, prec);
    let mut hi_b = BigReal::from_f64(hi, prec);
    shots += 1;
    let lo_shot = integrate(spec, &lo_b, &cfg);
    if lo_shot.sturm_count() > n {
        return Err(Error::NoBracket { lo: format!("{lo}"), hi: format!("{hi}") });
    }

    let tol = BigReal::pow10(-(digits as i32) - 2, prec) * BigReal::one(prec).max(hi_b.abs());
    // end values are kept only while the bracket holds exactly level n,
    // where u(r_max) changes sign once; then Illinois replaces bisection
    let mut f_lo = (lo_shot.sturm_count() == n).then_some(lo_shot.end_value);
    let mut f_hi: Option<BigReal> = None;
    let mut side = 0i32;
    for _ in 0..5000 {
        if (&hi_b - &lo_b).abs() <= tol {
            break;
        }
        let mid = match (&f_lo, &f_hi) {
            (Some(fl), Some(fh)) => {
                let x = &lo_b + &(&(fl / &(fl - fh)) * &(&hi_b - &lo_b));
                if x > lo_b && x < hi_b {
                    x
                } else {
                    (&lo_b + &hi_b).div_i64(2)
                }
            }
            _ => (&lo_b + &hi_b).div_i64(2),
        };
        shots += 1;
        let s = integrate(spec, &mid, &cfg);
        let count = s.sturm_count();
        if count <= n {
            lo_b = mid;
            f_lo = (count == n).then_some(s.end_value);
            if side == -1 {
                if let Some(fh) = f_hi.as_mut() {
                    *fh = fh.div_i64(2);
                }
            }
            side = -1;
        } else {
            hi_b = mid;
            f_hi = (count == n + 1).then_some(s.end_value);
            if side == 1 {
                if let Some(fl) = f_lo.as_mut() {
                    *fl = fl.div_i64(2);
                }
            }
            side = 1;
        }
    }
    let energy = (&lo_b + &hi_b).div_i64(2);
    Ok(EigenResult {
        energy,
        state: spec.label(n),
        iterations: shots,
        stabilized_digits: digits,
        seed_r0: cfg.r_max.clone(),
        method: Method::Oracle,
    })
}
