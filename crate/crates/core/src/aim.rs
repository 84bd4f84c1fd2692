//! Asymptotic Iteration Method.
//!
//! After factoring out the asymptotic behavior the radial equation becomes
//! `f'' = λ₀ f' + s₀ f`. The sequences
//! `λₙ = λ'ₙ₋₁ + sₙ₋₁ + λ₀λₙ₋₁`, `sₙ = s'ₙ₋₁ + s₀λₙ₋₁` are built as exact
//! rational functions of `r` with polynomial-in-`E` coefficients, and
//! eigenvalues are the stabilized real roots of `δₙ = λₙsₙ₋₁ − λₙ₋₁sₙ` at a
//! fixed evaluation point `r₀`.

use std::fmt;

use crate::bounds;
use crate::error::{Error, Result};
use crate::model::{Radius, StateLabel, SystemSpec};
use crate::numerics::{scan_real_roots, BigReal, EPoly, Precision, RPoly, RationalFn};

#[derive(Clone, Debug)]
pub struct AimSeed {
    pub lambda0: RationalFn,
    pub s0: RationalFn,
    pub r0: BigReal,
    pub spec: SystemSpec,
}

fn e_const(v: BigReal) -> EPoly {
    let prec = v.prec();
    EPoly::constant(v, prec)
}

/// `c₀ + c₁r + …` with scalar coefficients.
fn r_poly(coeffs: Vec<EPoly>, prec: Precision) -> RationalFn {
    RationalFn::polynomial(RPoly::new(coeffs, prec))
}

/// Seed for `u = r^{(k-1)/2} e^{-br²/2} f(r)` on the half-line:
/// `λ₀ = 2br − (k−1)/r`, `s₀ = kb − E + a/r`.
pub fn seed_soft(spec: &SystemSpec, r0: &BigReal) -> Result<AimSeed> {
    if spec.is_hard() {
        return Err(Error::domain("soft seed requested for a hard-wall system"));
    }
    if !spec.b.is_positive() {
        return Err(Error::domain("soft confinement needs b > 0"));
    }
    if !r0.is_positive() {
        return Err(Error::domain("evaluation point r0 must be positive"));
    }
    let prec = spec.precision;
    let k = i64::from(spec.k());
    let zero = BigReal::zero(prec);
    let b = &spec.b;

    let lambda0 = &r_poly(vec![EPoly::zero(prec), e_const(b.mul_i64(2))], prec)
        + &RationalFn::pole_term(e_const(BigReal::from_i64(1 - k, prec)), zero.clone(), 1);
    // kb − E
    let s_const = EPoly::new(vec![b.mul_i64(k), BigReal::from_i64(-1, prec)], prec);
    let s0 = &r_poly(vec![s_const], prec) + &RationalFn::pole_term(e_const(spec.a.clone()), zero, 1);
    Ok(AimSeed { lambda0, s0, r0: r0.with_prec(prec), spec: spec.clone() })
}

/// Seed for `u = r^{(k-1)/2} e^{-br²/2} (R − r) f(r)` inside the wall:
/// `λ₀ = (1−k)/r + 2br − 2/(r−R)`,
/// `s₀ = b(2+k) − E + (aR+k−1)/(rR) + (2bR²−k+1)/(R(r−R))`.
pub fn seed_hard(spec: &SystemSpec, r0: &BigReal) -> Result<AimSeed> {
    let big_r = match &spec.radius {
        Radius::Finite(r) => r.clone(),
        Radius::Infinite => return Err(Error::domain("hard seed requested without a wall")),
    };
    if !r0.is_positive() || r0 >= &big_r {
        return Err(Error::domain("evaluation point r0 must lie inside (0, R)"));
    }
    let prec = spec.precision;
    let k = i64::from(spec.k());
    let zero = BigReal::zero(prec);
    let b = &spec.b;
    let a = &spec.a;

    let lambda0 = &(&r_poly(vec![EPoly::zero(prec), e_const(b.mul_i64(2))], prec)
        + &RationalFn::pole_term(e_const(BigReal::from_i64(1 - k, prec)), zero.clone(), 1))
        + &RationalFn::pole_term(e_const(BigReal::from_i64(-2, prec)), big_r.clone(), 1);

    let s_const = EPoly::new(vec![b.mul_i64(2 + k), BigReal::from_i64(-1, prec)], prec);
    let at_zero = (a * &big_r + BigReal::from_i64(k - 1, prec)) / &big_r;
    let at_wall = (b.mul_i64(2) * &big_r * &big_r - BigReal::from_i64(k - 1, prec)) / &big_r;
    let s0 = &(&r_poly(vec![s_const], prec) + &RationalFn::pole_term(e_const(at_zero), zero, 1))
        + &RationalFn::pole_term(e_const(at_wall), big_r, 1);
    Ok(AimSeed { lambda0, s0, r0: r0.with_prec(prec), spec: spec.clone() })
}

pub fn seed_for(spec: &SystemSpec, r0: &BigReal) -> Result<AimSeed> {
    if spec.is_hard() {
        seed_hard(spec, r0)
    } else {
        seed_soft(spec, r0)
    }
}

/// Streams `δ₁, δ₂, …` evaluated at `r₀` as polynomials in `E`.
pub struct AimIterator {
    seed: AimSeed,
    lambda: RationalFn,
    s: RationalFn,
    prev_at_r0: (EPoly, EPoly),
    n: usize,
}

impl AimIterator {
    pub fn new(seed: AimSeed) -> Result<Self> {
        let prev_at_r0 = (seed.lambda0.eval_r(&seed.r0)?, seed.s0.eval_r(&seed.r0)?);
        Ok(AimIterator { lambda: seed.lambda0.clone(), s: seed.s0.clone(), seed, prev_at_r0, n: 0 })
    }

    /// Iterations performed so far.
    pub fn iterations(&self) -> usize {
        self.n
    }

    /// Advances one step and returns `δₙ(r₀)`, scaled to unit max
    /// coefficient (a positive factor, so roots are unchanged).
    pub fn step(&mut self) -> Result<EPoly> {
        let lambda = &(&self.lambda.derivative() + &self.s) + &(&self.seed.lambda0 * &self.lambda);
        let s = &self.s.derivative() + &(&self.seed.s0 * &self.lambda);
        let at_r0 = (lambda.eval_r(&self.seed.r0)?, s.eval_r(&self.seed.r0)?);
        let delta = &(&at_r0.0 * &self.prev_at_r0.1) - &(&self.prev_at_r0.0 * &at_r0.1);
        self.lambda = lambda;
        self.s = s;
        self.prev_at_r0 = at_r0;
        self.n += 1;
        if delta.is_zero() {
            return Ok(delta);
        }
        let delta = delta.normalized();
        if !delta.coeffs().iter().all(BigReal::is_finite) {
            return Err(Error::PrecisionExhausted(format!(
                "non-finite termination coefficients at iteration {}",
                self.n
            )));
        }
        Ok(delta)
    }
}

/// `δ₁ … δ_N` at the seed's `r₀`.
pub fn aim_iterate(seed: &AimSeed, n_iter: usize) -> Result<Vec<EPoly>> {
    if n_iter == 0 {
        return Err(Error::domain("at least one AIM iteration is required"));
    }
    let mut it = AimIterator::new(seed.clone())?;
    (0..n_iter).map(|_| it.step()).collect()
}

/// Default evaluation point: `2/√b` on the half-line (the scaled image of
/// `r0 = 2` at `b = 1`), capped at `R/2` inside a wall. Far out in a wide box
/// the seed is dominated by the wall term and convergence stalls.
pub fn choose_r0(spec: &SystemSpec) -> BigReal {
    let two = BigReal::from_i64(2, spec.precision);
    let soft = if spec.b.is_positive() && spec.b != 1 { &two / &spec.b.sqrt() } else { two };
    match &spec.radius {
        Radius::Finite(r) => {
            let half = r.div_i64(2);
            if half < soft { half } else { soft }
        }
        Radius::Infinite => soft,
    }
}

/// Outer classical turning point, the largest positive root of
/// `b²r³ − E r + a = 0`; `None` when `E` lies below the potential everywhere.
pub fn turning_point_r0(spec: &SystemSpec, energy: &BigReal) -> Result<Option<BigReal>> {
    let prec = spec.precision;
    let cubic = EPoly::new(
        vec![spec.a.clone(), -energy.clone(), BigReal::zero(prec), &spec.b * &spec.b],
        prec,
    );
    if cubic.degree() < 1 {
        return Ok(None);
    }
    let hi = BigReal::from_i64(2, prec) * (energy.abs() + BigReal::one(prec)).sqrt()
        / spec.b.clone().max(BigReal::pow10(-3, prec))
        + BigReal::one(prec);
    let digits = prec.decimal_digits() / 2;
    let roots = crate::numerics::isolate_real_roots(&cubic, &BigReal::pow10(-30, prec), &hi, digits)?;
    Ok(roots.into_iter().map(|r| r.value).next_back())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Aim,
    Exact,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Aim => "aim",
            Method::Exact => "exact",
            Method::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub energy: BigReal,
    pub state: StateLabel,
    pub iterations: usize,
    pub stabilized_digits: u32,
    pub seed_r0: BigReal,
    pub method: Method,
}

#[derive(Clone, Debug)]
pub struct AimOptions {
    /// Overrides [`choose_r0`].
    pub r0: Option<BigReal>,
    pub n_max: usize,
    /// Overrides the precision derived from the requested digits.
    pub precision: Option<Precision>,
    /// Doublings of the working precision allowed after a failure.
    pub escalations: u32,
    /// Consecutive agreeing iterations required for convergence.
    pub agreements: usize,
}

impl Default for AimOptions {
    fn default() -> Self {
        AimOptions { r0: None, n_max: 200, precision: None, escalations: 2, agreements: 3 }
    }
}

impl AimOptions {
    /// Defaults scaled for `digits`: the iteration count needed grows
    /// roughly linearly with the digits wanted, and past about 30 digits the
    /// cancellation in `δₙ` needs about five working digits per output digit.
    pub fn for_digits(digits: u32) -> Self {
        let mut opts = AimOptions { n_max: 200.max(8 * digits as usize), ..Default::default() };
        if digits > 30 {
            opts.precision = Some(Precision::digits(5 * digits));
        }
        opts
    }
}

/// Generous upper end of the search window for the lowest `count` levels.
fn initial_cap(spec: &SystemSpec, count: u32) -> f64 {
    let k = f64::from(spec.k());
    let b = spec.b.to_f64();
    let a = spec.a.to_f64();
    let n = f64::from(count);
    match spec.radius.finite() {
        None => {
            let env = bounds::envelope_upper(spec, count.saturating_sub(1))
                .map(|v| v.to_f64())
                .unwrap_or(b * (4.0 * n + k) + 2.0 * a);
            env * 1.5 + 4.0 * b
        }
        Some(r) => {
            let r = r.to_f64();
            let j = std::f64::consts::PI * (n + 0.5 + k / 4.0);
            2.0 * ((j / r).powi(2) + b * b * r * r + 2.0 * a / r) + 1.0
        }
    }
}

struct Track {
    history: Vec<Vec<BigReal>>,
}

impl Track {
    /// Largest change of the `index`-th root over the last `span` steps.
    fn spread(&self, index: usize, span: usize) -> Option<BigReal> {
        if self.history.len() < span + 1 {
            return None;
        }
        let tail = &self.history[self.history.len() - span - 1..];
        let mut worst: Option<BigReal> = None;
        for w in tail.windows(2) {
            let (p, q) = (w[0].get(index)?, w[1].get(index)?);
            let d = (q - p).abs();
            worst = Some(match worst {
                Some(x) => x.max(d),
                None => d,
            });
        }
        worst
    }
}

fn digits_from_spread(spread: &BigReal, cap: u32) -> u32 {
    if spread.is_zero() {
        return cap;
    }
    let e = spread.decimal_exponent().unwrap_or(0);
    ((1 - e).max(0) as u32).min(cap)
}

/// Eigenvalues for the requested node counts, each converged to `digits`
/// decimals. All states share one AIM run.
pub fn find_eigenvalues(
    spec: &SystemSpec,
    states: &[u32],
    digits: u32,
    opts: &AimOptions,
) -> Result<Vec<EigenResult>> {
    if digits == 0 {
        return Err(Error::domain("digits must be at least 1"));
    }
    spec.validate()?;
    if states.is_empty() {
        return Ok(Vec::new());
    }
    let mut prec = opts.precision.unwrap_or_else(|| Precision::for_output_digits(digits));
    let mut last_err = None;
    for _ in 0..=opts.escalations {
        match find_at_precision(spec, states, digits, opts, prec) {
            Ok(v) => return Ok(v),
            Err(e @ (Error::AimNoConvergence { .. }
            | Error::NoConvergence(_)
            | Error::PrecisionExhausted(_))) => {
                last_err = Some(e);
                prec = Precision::digits(prec.decimal_digits() * 2);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn find_at_precision(
    spec: &SystemSpec,
    states: &[u32],
    digits: u32,
    opts: &AimOptions,
    prec: Precision,
) -> Result<Vec<EigenResult>> {
    let spec = spec.clone().with_precision(prec);
    let r0 = match &opts.r0 {
        Some(r) => r.with_prec(prec),
        None => choose_r0(&spec),
    };
    let seed = seed_for(&spec, &r0)?;
    let top = *states.iter().max().expect("non-empty");
    let count = top as usize + 1;

    let floor = bounds::spectrum_floor(&spec);
    let lo = BigReal::from_f64(floor - 1e-6 * floor.abs().max(1.0), prec);
    let mut hi_f = initial_cap(&spec, top + 1);
    let tol = BigReal::pow10(-(digits as i32) - 2, prec);
    let refine_digits = (digits + 8).min(prec.decimal_digits() - 4);

    let mut it = AimIterator::new(seed)?;
    let mut track = Track { history: Vec::new() };
    let mut done: Vec<Option<EigenResult>> = vec![None; count];
    // grid spacing fixed by the first window so widening keeps the resolution
    let step = (hi_f - lo.to_f64()) / (64 * count).max(512) as f64;
    let ceiling = hi_f * 64.0;
    let mut last_widened = 0;

    while it.iterations() < opts.n_max {
        let delta = it.step()?;
        let n_iter = it.iterations();
        if n_iter >= last_widened + 10 && n_iter >= 4 * count + 20 && hi_f < ceiling {
            let short = track.history.last().is_some_and(|r: &Vec<BigReal>| r.len() < count);
            if short {
                hi_f *= 2.0;
                last_widened = n_iter;
            }
        }
        let hi = BigReal::from_f64(hi_f, prec);
        let samples = (((hi_f - lo.to_f64()) / step).ceil() as usize).max(delta.degree() * 4);
        let roots = scan_real_roots(&delta, &lo, &hi, samples, refine_digits)?;
        track.history.push(roots);

        for (j, slot) in done.iter_mut().enumerate() {
            if slot.is_some() {
                continue;
            }
            // every lower state must already be settled at this iteration
            let Some(spread) = track.spread(j, opts.agreements) else { break };
            if spread >= tol {
                break;
            }
            let energy = track.history.last().unwrap()[j].clone();
            *slot = Some(EigenResult {
                energy,
                state: spec.label(j as u32),
                iterations: n_iter,
                stabilized_digits: digits_from_spread(&spread, prec.decimal_digits()),
                seed_r0: r0.clone(),
                method: Method::Aim,
            });
        }
        if states.iter().all(|&n| done[n as usize].is_some()) {
            return Ok(states.iter().map(|&n| done[n as usize].clone().unwrap()).collect());
        }
    }
    let last = track
        .history
        .iter()
        .rev()
        .take(2)
        .map(|roots| {
            roots.iter().take(count).map(|r| r.to_sci(digits as usize + 3)).collect::<Vec<_>>().join(" ")
        })
        .collect();
    Err(Error::AimNoConvergence { n_max: opts.n_max, last })
}
