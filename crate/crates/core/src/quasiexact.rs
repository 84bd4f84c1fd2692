//! Quasi-exact solutions.
//!
//! For special couplings the reduced radial equation has a polynomial
//! solution. With `u = r^{(k−1)/2} e^{−br²/2} P(r)` and `P` of degree `n′`
//! the energy is `b(2n′+k)` and the coefficients obey
//! `(i+1)(i+k−1)cᵢ₊₁ = a cᵢ + 2b(i−n′−1)cᵢ₋₁`, which truncates exactly when
//! the tridiagonal determinant `Δₙ′₊₁(a)` vanishes. Inside a hard wall the
//! factor `P = (R − r) f` with `deg f = n` gives energy `b(2n+k+2)` and two
//! simultaneous conditions on `(a, R)`.

use rayon::prelude::*;

use crate::aim::{self, AimOptions, EigenResult};
use crate::error::{Error, Result};
use crate::model::{Radius, SystemSpec};
use crate::numerics::{
    isolate_real_roots, tanh_sinh, BiPoly, BigReal, EPoly, MPoly, Precision, Var,
};

/// Rows of the tridiagonal system for `c₀..c_{n′}`:
/// `2b(i−n′−1) cᵢ₋₁ + a cᵢ − (i+1)(i+k−1) cᵢ₊₁ = 0`.
pub fn soft_matrix(nprime: u32) -> Vec<Vec<MPoly>> {
    let size = nprime as usize + 1;
    let np = i128::from(nprime);
    let a = MPoly::var(Var::A);
    let b = MPoly::var(Var::B);
    let k = MPoly::var(Var::K);
    let mut rows = vec![vec![MPoly::zero(); size]; size];
    for (i, row) in rows.iter_mut().enumerate() {
        let ii = i as i128;
        if i > 0 {
            row[i - 1] = b.scale(2 * (ii - np - 1));
        }
        row[i] = a.clone();
        if i + 1 < size {
            // −(i+1)(k + i − 1)
            row[i + 1] = (&k + &MPoly::constant(ii - 1)).scale(-(ii + 1));
        }
    }
    rows
}

/// `Δₙ′₊₁` in `(a, b, k)` from
/// `Δᵢ = aΔᵢ₋₁ + 2b(i−n′−2)(i−1)(i+k−3)Δᵢ₋₂`, `Δ₀ = 1`, `Δ₋₁ = 0`.
pub fn soft_condition_symbolic(nprime: u32) -> MPoly {
    let a = MPoly::var(Var::A);
    let b = MPoly::var(Var::B);
    let k = MPoly::var(Var::K);
    let np = i128::from(nprime);
    let mut prev = MPoly::zero();
    let mut cur = MPoly::constant(1);
    for i in 1..=np + 1 {
        let coupling = (&b * &(&k + &MPoly::constant(i - 3))).scale(2 * (i - np - 2) * (i - 1));
        let next = &(&a * &cur) + &(&coupling * &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `Δₙ′₊₁` as a polynomial in `a` for numeric `k` and `b`. Its degree is
/// `n′+1` and its roots are the quasi-exact couplings.
pub fn soft_condition(nprime: u32, k: u32, b: &BigReal) -> EPoly {
    let prec = b.prec();
    let x = EPoly::x(prec);
    let np = i64::from(nprime);
    let k = i64::from(k);
    let mut prev = EPoly::zero(prec);
    let mut cur = EPoly::constant(BigReal::one(prec), prec);
    for i in 1..=np + 1 {
        let coupling = b.mul_i64(2 * (i - np - 2) * (i - 1) * (i + k - 3));
        let next = &(&x * &cur) + &prev.scale_real(&coupling);
        prev = cur;
        cur = next;
    }
    cur
}

/// `c₀ = 1, …, c_{n′}` of the soft polynomial at coupling `a`.
pub fn soft_coefficients(nprime: u32, k: u32, b: &BigReal, a: &BigReal) -> Vec<BigReal> {
    let prec = a.prec().max(b.prec());
    let np = i64::from(nprime);
    let k = i64::from(k);
    let mut c = vec![BigReal::one(prec)];
    for i in 0..np {
        let prev = if i > 0 { c[i as usize - 1].clone() } else { BigReal::zero(prec) };
        let num = a * &c[i as usize] + b.mul_i64(2 * (i - np - 1)) * prev;
        c.push(num.div_i64((i + 1) * (i + k - 1)));
    }
    c
}

/// Residual of the truncated recurrence, `Δₙ′₊₁(a)` relative to its terms.
pub fn soft_truncation_residual(nprime: u32, k: u32, b: &BigReal, a: &BigReal) -> BigReal {
    let cond = soft_condition(nprime, k, b);
    let scale = cond.eval_abs(&a.abs()).max(BigReal::one(a.prec()));
    cond.eval(a).abs() / scale
}

#[derive(Clone, Debug)]
pub struct QuasiExactSolution {
    /// Degree of the wavefunction polynomial `P`.
    pub nprime: u32,
    pub k: u32,
    pub b: BigReal,
    pub a: BigReal,
    pub radius: Radius,
    pub energy: BigReal,
    /// Coefficients of `P`, lowest first, with `c₀ = 1`.
    pub wf_coeffs: Vec<BigReal>,
    /// Zeros of `P` in the open domain, ascending.
    pub node_radii: Vec<BigReal>,
}

impl QuasiExactSolution {
    pub fn nodes(&self) -> u32 {
        self.node_radii.len() as u32
    }

    pub fn state_type(&self) -> String {
        state_type(self.nodes())
    }

    pub fn polynomial(&self) -> EPoly {
        EPoly::new(self.wf_coeffs.clone(), self.a.prec())
    }

    /// The system this solution belongs to, taking `d = k`, `l = 0`.
    pub fn spec(&self) -> Result<SystemSpec> {
        SystemSpec::new(self.a.clone(), self.b.clone(), self.k, 0, self.radius.clone())
    }

    /// Relative residual of the reduced equation `g'' = λ₀g' + s₀g` at `r`,
    /// where `g = P` on the half-line and `g = P/(R − r)` inside a wall.
    pub fn residual(&self, r: &BigReal) -> Result<BigReal> {
        let seed = aim::seed_for(&self.spec()?, r)?;
        let (g, g1, g2) = match &self.radius {
            Radius::Infinite => {
                let p = self.polynomial();
                let d1 = p.derivative();
                (p.eval(r), d1.eval(r), d1.derivative().eval(r))
            }
            Radius::Finite(big_r) => {
                let f = divide_wall_factor(&self.polynomial(), big_r);
                let d1 = f.derivative();
                (f.eval(r), d1.eval(r), d1.derivative().eval(r))
            }
        };
        let lam = seed.lambda0.eval(r, &self.energy)?;
        let s = seed.s0.eval(r, &self.energy)?;
        let t1 = &lam * &g1;
        let t2 = &s * &g;
        let scale = g2.abs() + t1.abs() + t2.abs();
        let res = (g2 - t1 - t2).abs();
        Ok(if scale.is_zero() { res } else { res / scale })
    }
}

pub fn state_type(nodes: u32) -> String {
    const NAMES: [&str; 6] = ["ground", "first-excited", "second-excited", "third-excited", "fourth-excited", "fifth-excited"];
    match NAMES.get(nodes as usize) {
        Some(n) => n.to_string(),
        None => format!("{nodes}th-excited"),
    }
}

/// `P(r) / (R − r)` by synthetic division.
fn divide_wall_factor(p: &EPoly, big_r: &BigReal) -> EPoly {
    // P = (R − r) f  ⇔  −P = (r − R) f
    let (q, _rem) = p.scale_i64(-1).deflate(big_r);
    q
}

/// `1 + max |cᵢ/cₙ|`, an upper bound on the moduli of the roots.
fn cauchy_bound(p: &EPoly) -> BigReal {
    let prec = p.prec();
    let lead = p.leading().cloned().unwrap_or_else(|| BigReal::one(prec)).abs();
    let mut m = BigReal::zero(prec);
    for c in &p.coeffs()[..p.degree()] {
        m = m.max(c.abs() / &lead);
    }
    m + BigReal::one(prec)
}

fn root_digits(prec: Precision) -> u32 {
    prec.decimal_digits().saturating_sub(10).max(20)
}

/// Positive zeros of `p` below `hi` (or below its root bound).
fn positive_roots(p: &EPoly, hi: Option<&BigReal>) -> Result<Vec<BigReal>> {
    let prec = p.prec();
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let upper = match hi {
        Some(h) => h.clone(),
        None => cauchy_bound(p),
    };
    let zero = BigReal::zero(prec);
    let roots = isolate_real_roots(p, &zero, &upper, root_digits(prec))?;
    Ok(roots
        .into_iter()
        .map(|r| r.value)
        .filter(|v| v.is_positive() && hi.is_none_or(|h| v < h))
        .collect())
}

fn soft_solution(nprime: u32, k: u32, b: &BigReal, a: BigReal) -> Result<QuasiExactSolution> {
    let coeffs = soft_coefficients(nprime, k, b, &a);
    let prec = a.prec();
    let node_radii = positive_roots(&EPoly::new(coeffs.clone(), prec), None)?;
    Ok(QuasiExactSolution {
        nprime,
        k,
        b: b.clone(),
        energy: b.mul_i64(i64::from(2 * nprime + k)),
        a,
        radius: Radius::Infinite,
        wf_coeffs: coeffs,
        node_radii,
    })
}

/// All soft quasi-exact solutions of degree `n′`, ascending in `a`.
/// Only `a > 0` is reported, except that `n′ = 0` yields the oscillator
/// ground state `a = 0`.
pub fn soft_solutions(nprime: u32, k: u32, b: &BigReal) -> Result<Vec<QuasiExactSolution>> {
    if k < 2 {
        return Err(Error::domain("k = d + 2l must be at least 2"));
    }
    if !b.is_positive() {
        return Err(Error::domain("soft quasi-exact solutions need b > 0"));
    }
    let prec = b.prec();
    if nprime == 0 {
        return Ok(vec![soft_solution(0, k, b, BigReal::zero(prec))?]);
    }
    let cond = soft_condition(nprime, k, b);
    let low = cond.low_order();
    let reduced = cond.unshift(low);
    positive_roots(&reduced, None)?
        .into_iter()
        .map(|a| soft_solution(nprime, k, b, a))
        .collect()
}

/// `u(r) = C r^{(k−1)/2} e^{−br²/2} P(r)` with `∫₀^∞ u² dr = 1`.
#[derive(Clone, Debug)]
pub struct SoftWavefunction {
    pub solution: QuasiExactSolution,
    pub norm: BigReal,
}

impl SoftWavefunction {
    pub fn eval(&self, r: &BigReal) -> BigReal {
        let s = &self.solution;
        let half = BigReal::ratio(i64::from(s.k) - 1, 2, r.prec());
        let gauss = (-(&s.b * r * r).div_i64(2)).exp();
        &self.norm * &r.powf(&half) * gauss * s.polynomial().eval(r)
    }

    /// `∫₀^∞ u²` by quadrature; should be 1.
    pub fn quadrature_norm(&self, tol: &BigReal) -> Result<BigReal> {
        let s = &self.solution;
        let prec = s.a.prec();
        let digits = f64::from(prec.decimal_digits());
        let b = s.b.to_f64();
        let spread = f64::from(s.k + 2 * s.nprime);
        let cut = (2.0 * (digits * std::f64::consts::LN_10 + 10.0) / b).sqrt() + 2.0 * (spread / b).sqrt();
        let zero = BigReal::zero(prec);
        let hi = BigReal::from_f64(cut, prec);
        tanh_sinh(|r| { let u = self.eval(r); &u * &u }, &zero, &hi, tol)
    }
}

/// `∫₀^∞ r^{k−1} e^{−br²} P(r)² dr = Σᵢⱼ cᵢcⱼ Γ((k+i+j)/2) / (2 b^{(k+i+j)/2})`.
pub fn gaussian_moment_norm(coeffs: &[BigReal], k: u32, b: &BigReal) -> BigReal {
    let prec = b.prec();
    let n = coeffs.len();
    // Moments depend only on i + j.
    let moments: Vec<BigReal> = (0..2 * n)
        .map(|s| {
            let nu = BigReal::ratio(i64::from(k) + s as i64, 2, prec);
            nu.gamma() / (b.powf(&nu).mul_i64(2))
        })
        .collect();
    let mut acc = BigReal::zero(prec);
    for (i, ci) in coeffs.iter().enumerate() {
        for (j, cj) in coeffs.iter().enumerate() {
            acc += &(ci * cj * &moments[i + j]);
        }
    }
    acc
}

pub fn soft_wavefunction(sol: &QuasiExactSolution) -> Result<SoftWavefunction> {
    if !sol.radius.is_infinite() {
        return Err(Error::domain("soft normalization requested for a hard-wall solution"));
    }
    let inv = gaussian_moment_norm(&sol.wf_coeffs, sol.k, &sol.b);
    Ok(SoftWavefunction { solution: sol.clone(), norm: inv.sqrt().recip() })
}

/// Closed-form `C⁻²` for the first-degree solution `P = 1 + √(2b/(k−1)) r`:
/// `[√(2k−2) Γ((k−1)/2) + (2k−1)/(k−1) Γ(k/2)] / (2b^{k/2})`.
pub fn first_degree_closed_norm(k: u32, b: &BigReal) -> BigReal {
    let prec = b.prec();
    let k = i64::from(k);
    let g1 = BigReal::ratio(k - 1, 2, prec).gamma();
    let g2 = BigReal::ratio(k, 2, prec).gamma();
    let bracket = BigReal::from_i64(2 * k - 2, prec).sqrt() * g1 + g2 * BigReal::ratio(2 * k - 1, k - 1, prec);
    bracket / b.powf(&BigReal::ratio(k, 2, prec)).mul_i64(2)
}

/// Closed-form `C⁻²` for the second-degree ground state with `P` scaled to
/// `1 + …`: the stated normalizer
/// `√(2b^{k/2}) / √((1−4k+8k²)Γ(k/2) + 8k√(2k−1)Γ((k+1)/2))` multiplies
/// `(k−1)P`.
pub fn second_degree_closed_norm(k: u32, b: &BigReal) -> BigReal {
    let prec = b.prec();
    let ki = i64::from(k);
    let g1 = BigReal::ratio(ki, 2, prec).gamma();
    let g2 = BigReal::ratio(ki + 1, 2, prec).gamma();
    let denom = g1.mul_i64(1 - 4 * ki + 8 * ki * ki)
        + BigReal::from_i64(2 * ki - 1, prec).sqrt().mul_i64(8 * ki) * g2;
    let c2 = b.powf(&BigReal::ratio(ki, 2, prec)).mul_i64(2) / denom;
    let scaled = c2 * BigReal::from_i64((ki - 1) * (ki - 1), prec);
    scaled.recip()
}

// ---------------------------------------------------------------------------
// Hard wall

/// Entry of the hard-wall system, row `m`, column `col`, for
/// `f = Σ cⱼ rʲ` of degree `n`.
fn hard_entry_symbolic(n: i128, m: i128, col: i128) -> MPoly {
    let a = MPoly::var(Var::A);
    let b = MPoly::var(Var::B);
    let k = MPoly::var(Var::K);
    let r = MPoly::var(Var::R);
    match col - m {
        -2 => b.scale(2 * (n - m + 2)),
        // 2bR(m − n − 2) − a
        -1 => &(&b * &r).scale(2 * (m - n - 2)) - &a,
        // m(m+k) + Ra + k − 1
        0 => &(&k.scale(m + 1) + &MPoly::constant(m * m - 1)) + &(&r * &a),
        // −R(m+1)(m+k−1)
        1 => (&r * &(&k + &MPoly::constant(m - 1))).scale(-(m + 1)),
        _ => MPoly::zero(),
    }
}

fn hard_entry(n: i64, m: i64, col: i64, k: i64, a: &BigReal, b: &BigReal, r: &BigReal) -> BigReal {
    let prec = a.prec();
    match col - m {
        -2 => b.mul_i64(2 * (n - m + 2)),
        -1 => (b * r).mul_i64(2 * (m - n - 2)) - a,
        0 => r * a + BigReal::from_i64(m * (m + k) + k - 1, prec),
        1 => r.mul_i64(-(m + 1) * (m + k - 1)),
        _ => BigReal::zero(prec),
    }
}

/// The `n+2` linear conditions on `c₀..cₙ`.
pub fn hard_matrix(n: u32) -> Vec<Vec<MPoly>> {
    let n = i128::from(n);
    (0..n + 2).map(|m| (0..=n).map(|col| hard_entry_symbolic(n, m, col)).collect()).collect()
}

/// The pair of closure determinants: rows `0..=n`, and rows `0..n` with row
/// `n+1`. Both vanish exactly when a degree-`n` factor `f` exists.
pub fn hard_condition_symbolic(n: u32) -> (MPoly, MPoly) {
    let rows = hard_matrix(n);
    let n = n as usize;
    let first = MPoly::determinant(&rows[..=n]);
    let mut second_rows: Vec<Vec<MPoly>> = rows[..n].to_vec();
    second_rows.push(rows[n + 1].clone());
    (first, MPoly::determinant(&second_rows))
}

/// The condition pair as polynomials in `(a, R)`.
pub fn hard_condition_pair(n: u32, k: u32, b: &BigReal) -> (BiPoly, BiPoly) {
    let (p, q) = hard_condition_symbolic(n);
    let k = i64::from(k);
    (p.substitute_bk(b, k), q.substitute_bk(b, k))
}

/// Coefficients of `f` from the first `n` rows, with `c₀ = 1`.
pub fn hard_factor_coefficients(n: u32, k: u32, b: &BigReal, a: &BigReal, r: &BigReal) -> Vec<BigReal> {
    let prec = a.prec();
    let (n, k) = (i64::from(n), i64::from(k));
    let mut c = vec![BigReal::one(prec)];
    for m in 0..n {
        let mut acc = BigReal::zero(prec);
        for col in (m - 2).max(0)..=m {
            acc += &(hard_entry(n, m, col, k, a, b, r) * &c[col as usize]);
        }
        let sup = hard_entry(n, m, m + 1, k, a, b, r);
        c.push(-(acc / sup));
    }
    c
}

#[derive(Clone, Debug)]
pub struct HardSolveOptions {
    pub a_max: f64,
    pub r_max: f64,
    /// Grid spacing in `a` and `R`.
    pub a_step: f64,
    pub r_step: f64,
    /// Run AIM at every solution and require agreement to `1e-15`.
    pub validate: bool,
}

impl Default for HardSolveOptions {
    fn default() -> Self {
        HardSolveOptions { a_max: 20.0, r_max: 10.0, a_step: 0.5, r_step: 0.25, validate: true }
    }
}

struct F64Pair<'a> {
    p: &'a BiPoly,
    q: &'a BiPoly,
}

impl F64Pair<'_> {
    fn merit(&self, a: f64, r: f64) -> f64 {
        let (p, ..) = self.p.eval_f64(a, r);
        let (q, ..) = self.q.eval_f64(a, r);
        let sp = self.p.eval_abs_f64(a, r).max(f64::MIN_POSITIVE);
        let sq = self.q.eval_abs_f64(a, r).max(f64::MIN_POSITIVE);
        (p / sp).powi(2) + (q / sq).powi(2)
    }

    /// Damped Newton from `(a, r)`; `None` on divergence or stagnation.
    fn newton(&self, mut a: f64, mut r: f64, a_max: f64, r_max: f64) -> Option<(f64, f64)> {
        let mut m = self.merit(a, r);
        for _ in 0..200 {
            let (p, pa, pr) = self.p.eval_f64(a, r);
            let (q, qa, qr) = self.q.eval_f64(a, r);
            let det = pa * qr - pr * qa;
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let da = -(p * qr - pr * q) / det;
            let dr = -(pa * q - p * qa) / det;
            let mut lam = 1.0;
            loop {
                let (na, nr) = (a + lam * da, r + lam * dr);
                if na > 0.0 && nr > 0.0 {
                    let nm = self.merit(na, nr);
                    if nm < m || nm < 1e-28 {
                        a = na;
                        r = nr;
                        m = nm;
                        break;
                    }
                }
                lam *= 0.5;
                if lam < 1e-12 {
                    return None;
                }
            }
            if a > 4.0 * a_max || r > 4.0 * r_max {
                return None;
            }
            if (lam * (da.abs() + dr.abs())) < 1e-13 * (1.0 + a + r) {
                return (m < 1e-20).then_some((a, r));
            }
        }
        (m < 1e-20).then_some((a, r))
    }
}

fn polish(p: &BiPoly, q: &BiPoly, a: f64, r: f64, prec: Precision) -> Option<(BigReal, BigReal)> {
    let mut a = BigReal::from_f64(a, prec);
    let mut r = BigReal::from_f64(r, prec);
    let tol = BigReal::pow10(-(prec.decimal_digits() as i32 - 8), prec);
    for _ in 0..100 {
        let (pv, pa, pr) = p.eval_grad(&a, &r);
        let (qv, qa, qr) = q.eval_grad(&a, &r);
        let det = &pa * &qr - &pr * &qa;
        if det.is_zero() {
            return None;
        }
        let da = -((&pv * &qr - &pr * &qv) / &det);
        let dr = -((&pa * &qv - &pv * &qa) / &det);
        a += &da;
        r += &dr;
        if da.abs() + dr.abs() <= &tol * &(a.abs() + r.abs() + BigReal::one(prec)) {
            return Some((a, r));
        }
    }
    None
}

/// Simultaneous positive solutions `(a, R)` of the degree-`n` hard-wall
/// conditions, ascending in `R`, each with energy `b(2n+k+2)`.
pub fn solve_hard_system(n: u32, k: u32, b: &BigReal, opts: &HardSolveOptions) -> Result<Vec<QuasiExactSolution>> {
    if k < 2 {
        return Err(Error::domain("k = d + 2l must be at least 2"));
    }
    if b.is_sign_negative() {
        return Err(Error::domain("b must be nonnegative"));
    }
    let prec = b.prec();
    let (p, q) = hard_condition_pair(n, k, b);
    let pair = F64Pair { p: &p, q: &q };

    let na = (opts.a_max / opts.a_step).round() as usize;
    let nr = (opts.r_max / opts.r_step).round() as usize;
    let starts: Vec<(f64, f64)> = (1..=na)
        .flat_map(|i| (1..=nr).map(move |j| (i as f64 * opts.a_step, j as f64 * opts.r_step)))
        .collect();
    let mut rough: Vec<(f64, f64)> = starts
        .par_iter()
        .filter_map(|&(a, r)| pair.newton(a, r, opts.a_max, opts.r_max))
        .collect();
    rough.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    rough.dedup_by(|x, y| (x.0 - y.0).abs() + (x.1 - y.1).abs() < 1e-7);

    let merge = BigReal::pow10(-10, prec);
    let mut found: Vec<(BigReal, BigReal)> = Vec::new();
    for (a, r) in rough {
        let Some((a, r)) = polish(&p, &q, a, r, prec) else { continue };
        if !a.is_positive() || !r.is_positive() {
            continue;
        }
        if found.iter().any(|(fa, fr)| (fa - &a).abs() + (fr - &r).abs() < merge) {
            continue;
        }
        found.push((a, r));
    }
    if found.is_empty() {
        return Err(Error::NoSolutionFound(format!(
            "no positive (a, R) for the degree-{n} hard-wall conditions with k = {k}"
        )));
    }
    found.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal));

    let mut out = Vec::with_capacity(found.len());
    for (a, r) in found {
        let sol = hard_solution(n, k, b, a, r)?;
        if opts.validate {
            let aim = cross_validate(&sol, 16)?;
            let diff = (&aim.energy - &sol.energy).abs();
            if diff > BigReal::pow10(-15, prec) {
                return Err(Error::NoConvergence(format!(
                    "AIM gives {} for the quasi-exact level {} at a = {}, R = {}",
                    aim.energy.to_fixed(18),
                    sol.energy.to_fixed(18),
                    sol.a.to_fixed(18),
                    sol.radius.finite().map(|r| r.to_fixed(18)).unwrap_or_default()
                )));
            }
        }
        out.push(sol);
    }
    Ok(out)
}

fn hard_solution(n: u32, k: u32, b: &BigReal, a: BigReal, r: BigReal) -> Result<QuasiExactSolution> {
    let prec = a.prec();
    let f = EPoly::new(hard_factor_coefficients(n, k, b, &a, &r), prec);
    // P = (R − r) f / R keeps c₀ = 1.
    let wall = EPoly::new(vec![r.clone(), BigReal::from_i64(-1, prec)], prec);
    let poly = (&wall * &f).scale_real(&r.recip());
    let node_radii = positive_roots(&f, Some(&r))?;
    Ok(QuasiExactSolution {
        nprime: n + 1,
        k,
        b: b.clone(),
        energy: b.mul_i64(i64::from(2 * n + k + 2)),
        a,
        radius: Radius::Finite(r),
        wf_coeffs: poly.into_coeffs(),
        node_radii,
    })
}

/// AIM eigenvalue with the solution's node count, for comparison with its
/// exact energy.
pub fn cross_validate(sol: &QuasiExactSolution, digits: u32) -> Result<EigenResult> {
    let spec = sol.spec()?;
    let res = aim::find_eigenvalues(&spec, &[sol.nodes()], digits, &AimOptions::default())?;
    res.into_iter().next().ok_or_else(|| Error::NoSolutionFound("AIM returned no level".into()))
}

// ---------------------------------------------------------------------------
// Oscillator branch

#[derive(Clone, Debug)]
pub struct HeunReport {
    pub coefficients_match: bool,
    pub even_condition_vanishes: bool,
    pub odd_condition_nonzero: bool,
    pub details: Vec<String>,
}

impl HeunReport {
    pub fn passed(&self) -> bool {
        self.coefficients_match && self.even_condition_vanishes && self.odd_condition_nonzero
    }
}

/// At `a = 0` the degree-`2m` polynomial is `₁F₁(−m; k/2; br²)`, and the
/// condition has the root `a = 0` for even degree only.
pub fn heun_reduction_check(k: u32, b: &BigReal, m: u32) -> HeunReport {
    let prec = b.prec();
    let zero = BigReal::zero(prec);
    let coeffs = soft_coefficients(2 * m, k, b, &zero);
    let tol = BigReal::pow10(-(prec.decimal_digits() as i32 - 10), prec);
    let mut details = Vec::new();
    let mut coefficients_match = true;

    // (−m)_j bʲ / ((k/2)_j j!)
    let mut term = BigReal::one(prec);
    let half_k = BigReal::ratio(i64::from(k), 2, prec);
    for (i, c) in coeffs.iter().enumerate() {
        let expected = if i % 2 == 1 {
            BigReal::zero(prec)
        } else {
            let j = (i / 2) as i64;
            if j > 0 {
                let rising = &half_k + &BigReal::from_i64(j - 1, prec);
                term = term * b.mul_i64(j - 1 - i64::from(m)) / (rising.mul_i64(j));
            }
            term.clone()
        };
        let diff = (c - &expected).abs();
        if diff > &tol * &(expected.abs() + BigReal::one(prec)) {
            coefficients_match = false;
            details.push(format!("c{i} = {} but 1F1 gives {}", c.to_sci(20), expected.to_sci(20)));
        }
    }

    let even = soft_condition(2 * m, k, b).eval(&zero);
    let even_condition_vanishes = even.is_zero();
    if !even_condition_vanishes {
        details.push(format!("degree-{} condition at a = 0 is {}", 2 * m, even.to_sci(6)));
    }
    let odd = soft_condition(2 * m + 1, k, b).eval(&zero);
    let odd_condition_nonzero = !odd.is_zero();
    if !odd_condition_nonzero {
        details.push(format!("degree-{} condition vanishes at a = 0", 2 * m + 1));
    }
    HeunReport { coefficients_match, even_condition_vanishes, odd_condition_nonzero, details }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::digits(60)
    }

    fn big(s: &str) -> BigReal {
        BigReal::parse(s, p()).unwrap()
    }

    fn close(x: &BigReal, y: &BigReal, exp: i32) -> bool {
        (x - y).abs() < BigReal::pow10(exp, p())
    }

    #[test]
    fn low_degree_conditions() {
        assert_eq!(soft_condition_symbolic(0).to_string(), "a");
        assert_eq!(soft_condition_symbolic(1).to_string(), "a^2 - 2 b k + 2 b");
        assert_eq!(soft_condition_symbolic(2).to_string(), "a^3 - 8 a b k + 4 a b");
        assert_eq!(soft_condition_symbolic(3).to_string(), "a^4 - 20 a^2 b k + 36 b^2 k^2 - 36 b^2");
    }

    #[test]
    fn recurrence_equals_determinant() {
        for np in 0..=6 {
            let det = MPoly::determinant(&soft_matrix(np));
            assert_eq!(det, soft_condition_symbolic(np), "n' = {np}");
        }
    }

    #[test]
    fn numeric_condition_matches_symbolic() {
        let b = big("1.5");
        for np in 0..=5 {
            let e = soft_condition(np, 4, &b);
            let s = soft_condition_symbolic(np);
            let a = big("0.7");
            let v = s.eval([&a, &b, &BigReal::from_i64(4, p()), &BigReal::zero(p())]);
            assert!(close(&e.eval(&a), &v, -50));
            assert_eq!(e.degree(), np as usize + 1);
        }
    }

    #[test]
    fn latent_roots_real_and_distinct() {
        let b = BigReal::one(p());
        for np in 0..=6 {
            for k in 2..=9 {
                let cond = soft_condition(np, k, &b);
                let bound = cauchy_bound(&cond);
                let roots = isolate_real_roots(&cond, &-&bound, &bound, 30).unwrap();
                assert_eq!(roots.len(), np as usize + 1, "n'={np} k={k}");
                assert!(roots.iter().all(|r| !r.multiple));
            }
        }
    }

    #[test]
    fn first_degree_solution() {
        let sols = soft_solutions(1, 3, &BigReal::one(p())).unwrap();
        assert_eq!(sols.len(), 1);
        let s = &sols[0];
        assert!(close(&s.a, &BigReal::from_i64(2, p()), -50));
        assert!(close(&s.wf_coeffs[1], &BigReal::one(p()), -50));
        assert_eq!(s.energy, 5);
        assert_eq!(s.nodes(), 0);
        assert_eq!(s.state_type(), "ground");
    }

    #[test]
    fn third_degree_solutions() {
        let sols = soft_solutions(3, 3, &BigReal::one(p())).unwrap();
        assert_eq!(sols.len(), 2);
        let root17 = BigReal::from_i64(17, p()).sqrt();
        let lo = (BigReal::from_i64(30, p()) - root17.mul_i64(6)).sqrt();
        let hi = (BigReal::from_i64(30, p()) + root17.mul_i64(6)).sqrt();
        assert!(close(&sols[0].a, &lo, -40));
        assert!(close(&sols[1].a, &hi, -40));
        assert_eq!(sols[0].nodes(), 1);
        assert!(close(&sols[0].node_radii[0], &big("1.4470822287545015022"), -19));
        assert_eq!(sols[1].nodes(), 0);
    }

    #[test]
    fn fifth_degree_second_excited() {
        let sols = soft_solutions(5, 3, &BigReal::one(p())).unwrap();
        let expected = ["2.5267218675333722705", "8.0506612725179184966", "14.450001026965667202"];
        assert_eq!(sols.len(), 3);
        for (s, e) in sols.iter().zip(expected) {
            assert!(close(&s.a, &big(e), -18), "{}", s.a);
        }
        assert_eq!(sols[0].state_type(), "second-excited");
        assert!(close(&sols[0].node_radii[0], &big("1.1462887538950250086"), -19));
        assert!(close(&sols[0].node_radii[1], &big("2.2162512210167737363"), -19));
        assert!(close(&sols[1].node_radii[0], &big("1.8409981334569487873"), -19));
        assert_eq!(sols[2].nodes(), 0);
    }

    #[test]
    fn oscillator_branch_only_at_degree_zero() {
        let b = BigReal::one(p());
        let s0 = soft_solutions(0, 3, &b).unwrap();
        assert_eq!(s0.len(), 1);
        assert!(s0[0].a.is_zero());
        let s2 = soft_solutions(2, 3, &b).unwrap();
        assert_eq!(s2.len(), 1);
        assert!(close(&s2[0].a, &BigReal::from_i64(20, p()).sqrt(), -45));
    }

    #[test]
    fn soft_residuals_vanish() {
        let b = big("0.75");
        for np in 1..=5 {
            for s in soft_solutions(np, 4, &b).unwrap() {
                for i in 1..=20 {
                    let r = BigReal::ratio(i, 5, p());
                    assert!(s.residual(&r).unwrap() < BigReal::pow10(-45, p()));
                }
            }
        }
    }

    #[test]
    fn normalization_by_quadrature() {
        let b = BigReal::one(p());
        let s = &soft_solutions(1, 3, &b).unwrap()[0];
        let wf = soft_wavefunction(s).unwrap();
        let total = wf.quadrature_norm(&BigReal::pow10(-30, p())).unwrap();
        assert!(close(&total, &BigReal::one(p()), -25), "{total}");
        let closed = first_degree_closed_norm(3, &b);
        assert!(close(&closed, &wf.norm.powi(-2), -40));

        let s2 = &soft_solutions(2, 3, &b).unwrap()[0];
        let wf2 = soft_wavefunction(s2).unwrap();
        assert!(close(&second_degree_closed_norm(3, &b), &wf2.norm.powi(-2), -40));
    }

    #[test]
    fn oscillator_normalization() {
        let b = big("2");
        let s = &soft_solutions(0, 5, &b).unwrap()[0];
        let wf = soft_wavefunction(s).unwrap();
        let c2 = b.powf(&BigReal::ratio(5, 2, p())).mul_i64(2) / BigReal::ratio(5, 2, p()).gamma();
        assert!(close(&wf.norm.powi(2), &c2, -50));
    }

    #[test]
    fn hard_pair_degree_zero() {
        let (p0, q0) = hard_condition_symbolic(0);
        assert_eq!(p0.to_string(), "a R + k - 1");
        assert_eq!(q0.to_string(), "-a - 2 b R");
    }

    fn sym(v: Var) -> MPoly {
        MPoly::var(v)
    }

    fn c(x: i128) -> MPoly {
        MPoly::constant(x)
    }

    #[test]
    fn hard_pair_degree_three_matches_closed_form() {
        let (a, b, k, r) = (sym(Var::A), sym(Var::B), sym(Var::K), sym(Var::R));
        let km1 = k.clone() - c(1);
        let kp1 = k.clone() + c(1);
        let kp2 = k.clone() + c(2);
        let r2 = r.clone() * r.clone();
        let r3 = r2.clone() * r.clone();
        let r4 = r3.clone() * r.clone();
        let a2 = a.clone() * a.clone();
        let t = a2.clone() + b.scale(4) * (c(2) - k.scale(5));
        let first = (k.clone() * km1.clone() * kp1.clone() * kp2.clone()).scale(24)
            + (a.clone() * k.clone() * kp1.clone() * kp2.clone() * r.clone()).scale(24)
            + ((a2.clone() - b.scale(8) * km1.clone()) * kp1.clone() * kp2.clone() * r2.clone()).scale(12)
            + (a.clone() * t.clone() * kp2 * r3.clone()).scale(4)
            + (a2.clone() * a2.clone() - a2.clone() * (b.clone() + b.clone() * k.scale(8)).scale(4)
                + (b.clone() * b.clone() * (k.clone() * k.clone() - c(1))).scale(96))
                * r4.clone();
        let second = (k.clone() * km1.clone() * kp1.clone()).scale(6)
            + (a.clone() * k.clone() * kp1.clone() * r.clone()).scale(6)
            + ((a2 - b.scale(8) * km1) * kp1 * r2).scale(3)
            + a.clone() * t.clone() * r3
            + (b * t * r4).scale(2);
        let (d1, d2) = hard_condition_symbolic(3);
        assert_eq!(d1, first);
        assert_eq!(d2, -&(a * second));
    }

    #[test]
    fn hard_pair_degree_two_vanishes_at_known_solution() {
        let (d1, d2) = hard_condition_pair(2, 3, &BigReal::one(p()));
        let root17 = BigReal::from_i64(17, p()).sqrt();
        let a = (BigReal::from_i64(30, p()) - root17.mul_i64(6)).sqrt();
        let sol = &soft_solutions(3, 3, &BigReal::one(p())).unwrap()[0];
        let r = &sol.node_radii[0];
        assert!(d1.eval(&a, r).abs() < BigReal::pow10(-40, p()));
        assert!(d2.eval(&a, r).abs() < BigReal::pow10(-40, p()));
    }

    #[test]
    fn hard_solutions_are_soft_nodes() {
        let b = BigReal::one(p());
        let opts = HardSolveOptions { validate: false, ..Default::default() };
        let two = solve_hard_system(2, 3, &b, &opts).unwrap();
        assert_eq!(two.len(), 1);
        let root17 = BigReal::from_i64(17, p()).sqrt();
        let exact = (BigReal::from_i64(30, p()) - root17.mul_i64(6)).sqrt();
        assert!(close(&two[0].a, &exact, -40));
        // The printed sixteen-digit values are good to about 1e-14.
        assert!(close(&two[0].a, &big("2.2937668247435283"), -14));
        assert!(close(two[0].radius.finite().unwrap(), &big("1.447082228754503"), -14));
        assert!(close(two[0].radius.finite().unwrap(), &big("1.4470822287545015022"), -19));
        assert_eq!(two[0].energy, 9);
        assert_eq!(two[0].nodes(), 0);

        let three = solve_hard_system(3, 3, &b, &opts).unwrap();
        assert_eq!(three.len(), 1);
        let root57 = BigReal::from_i64(57, p()).sqrt();
        let a = (BigReal::from_i64(70, p()) - root57.mul_i64(6)).sqrt();
        assert!(close(&three[0].a, &a, -40));
        assert!(close(three[0].radius.finite().unwrap(), &big("1.6532645408016027964"), -19));
        assert_eq!(three[0].energy, 11);

        // Degree four: one hard solution per positive node of the degree-five
        // soft polynomials.
        let four = solve_hard_system(4, 3, &b, &opts).unwrap();
        let mut radii: Vec<String> =
            four.iter().map(|s| s.radius.finite().unwrap().to_fixed(15)).collect();
        radii.sort();
        assert_eq!(radii, ["1.146288753895025", "1.840998133456949", "2.216251221016774"]);
        let excited = four.iter().find(|s| s.nodes() == 1).unwrap();
        assert!(close(excited.radius.finite().unwrap(), &big("2.2162512210167737363"), -19));
    }

    #[test]
    fn hard_residuals_vanish() {
        let b = BigReal::one(p());
        let opts = HardSolveOptions { validate: false, ..Default::default() };
        for s in solve_hard_system(4, 3, &b, &opts).unwrap() {
            let big_r = s.radius.finite().unwrap().clone();
            for i in 1..20 {
                let r = &big_r * &BigReal::ratio(i, 20, p());
                assert!(s.residual(&r).unwrap() < BigReal::pow10(-40, p()));
            }
        }
    }

    #[test]
    fn heun_reduction() {
        let b = BigReal::one(p());
        for m in 0..=4 {
            for k in 2..=6 {
                let rep = heun_reduction_check(k, &b, m);
                assert!(rep.passed(), "m={m} k={k}: {:?}", rep.details);
            }
        }
        let c = soft_coefficients(2, 3, &b, &BigReal::zero(p()));
        assert!(close(&c[2], &BigReal::ratio(-2, 3, p()), -50));
    }
}
