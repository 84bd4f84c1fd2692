use std::collections::BTreeMap;
use std::fs;

use rayon::prelude::*;

use confine_core::aim::{self, AimOptions, EigenResult};
use confine_core::bounds;
use confine_core::model::{parse_key_values, SystemSpec};
use confine_core::numerics::{BigReal, Precision};
use confine_core::oracle;
use confine_core::quasiexact::{self, HardSolveOptions, QuasiExactSolution};
use confine_core::tables::{self, RegenOptions, TableId};
use confine_core::Error;

use crate::output::Table;
use crate::{Outcome, Status, SystemArgs};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Merges `--config` with explicit flags (flags win) and validates.
pub fn build_spec(args: &SystemArgs, digits: Option<u32>) -> Result<SystemSpec, String> {
    let mut map: BTreeMap<String, String> = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_key_values(&text).map_err(err)?
        }
        None => BTreeMap::new(),
    };
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    set("a", args.a.clone());
    set("b", args.b.clone());
    set("d", args.d.map(|v| v.to_string()));
    set("l", args.l.map(|v| v.to_string()));
    set("R", args.radius.clone());
    set("precision", args.precision.map(|v| v.to_string()));
    set("digits", digits.map(|v| v.to_string()));
    if !map.contains_key("precision") {
        let want = map.get("digits").and_then(|v| v.parse().ok()).unwrap_or(SystemSpec::DEFAULT_DIGITS);
        let p = Precision::for_output_digits(want).decimal_digits();
        map.insert("precision".into(), p.to_string());
    }
    for key in ["a", "b", "d"] {
        if !map.contains_key(key) {
            return Err(format!("missing `--{key}` (or `{key} = …` in the config file)"));
        }
    }
    SystemSpec::from_key_values(&map).map_err(err)
}

/// `3`, `0..6` / `0..=6` (inclusive) or `0,2,5`.
pub fn parse_states(s: &str) -> Result<Vec<u32>, String> {
    let bad = || format!("cannot read node counts from `{s}`");
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
            if hi < lo {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn fmt_energy(e: &BigReal, digits: u32) -> String {
    e.to_fixed(digits as usize)
}

pub fn solve(
    system: &SystemArgs,
    n: &str,
    digits: Option<u32>,
    r0: Option<&str>,
    n_max: Option<usize>,
) -> Result<Outcome, String> {
    let spec = build_spec(system, digits)?;
    let digits = spec.digits;
    let states = parse_states(n)?;
    let mut opts = AimOptions::for_digits(digits);
    if let Some(r) = r0 {
        opts.r0 = Some(BigReal::parse(r, spec.precision).map_err(err)?);
    }
    if let Some(m) = n_max {
        opts.n_max = m;
    }

    let results: Vec<(u32, Option<EigenResult>)> = match aim::find_eigenvalues(&spec, &states, digits, &opts) {
        Ok(v) => v.into_iter().map(|r| (r.state.n, Some(r))).collect(),
        Err(Error::Domain(m)) => return Err(m),
        Err(_) => {
            // Retry state by state so the ones that do converge are kept.
            states
                .par_iter()
                .map(|&s| (s, aim::find_eigenvalues(&spec, &[s], digits, &opts).ok().and_then(|mut v| v.pop())))
                .collect()
        }
    };

    let mut table = Table::new(&["n", "l", "d", "E", "N", "r0", "converged"]);
    let mut status = Status::Ok;
    for (s, res) in results {
        match res {
            Some(r) => table.push(vec![
                s.to_string(),
                spec.l.to_string(),
                spec.d.to_string(),
                fmt_energy(&r.energy, digits),
                r.iterations.to_string(),
                r.seed_r0.to_shortest_string(),
                "yes".into(),
            ]),
            None => {
                status = Status::Partial;
                table.push(vec![
                    s.to_string(),
                    spec.l.to_string(),
                    spec.d.to_string(),
                    String::new(),
                    opts.n_max.to_string(),
                    String::new(),
                    "no".into(),
                ]);
            }
        }
    }
    Ok(Outcome { table, status })
}

fn k_of(d: u32, l: u32) -> Result<u32, String> {
    if d < 2 {
        return Err("d must be at least 2".into());
    }
    Ok(d + 2 * l)
}

fn radii(sol: &QuasiExactSolution) -> String {
    sol.node_radii.iter().map(|r| r.to_fixed(20)).collect::<Vec<_>>().join(" ")
}

pub fn exact_soft(nprime: u32, d: u32, l: u32, b: &str, precision: u32) -> Result<Outcome, String> {
    let k = k_of(d, l)?;
    let b = BigReal::parse(b, Precision::digits(precision)).map_err(err)?;
    let sols = quasiexact::soft_solutions(nprime, k, &b).map_err(err)?;
    let mut table = Table::new(&["nprime", "k", "a", "E", "nodes", "node_radii", "type"])
        .with_title(format!("polynomial solutions of degree {nprime}, k = {k}"));
    for s in &sols {
        table.push(vec![
            nprime.to_string(),
            k.to_string(),
            s.a.to_fixed(20),
            s.energy.to_shortest_string(),
            s.nodes().to_string(),
            radii(s),
            s.state_type(),
        ]);
    }
    Ok(Outcome { table, status: Status::Ok })
}

pub fn exact_hard(n: u32, d: u32, l: u32, b: &str, precision: u32, validate: bool) -> Result<Outcome, String> {
    let k = k_of(d, l)?;
    let b = BigReal::parse(b, Precision::digits(precision)).map_err(err)?;
    let opts = HardSolveOptions { validate, ..Default::default() };
    let mut table = Table::new(&["n", "k", "a", "R", "E", "nodes", "node_radii", "type", "aim_checked"])
        .with_title(format!("hard-wall polynomial solutions, factor degree {n}, k = {k}"));
    match quasiexact::solve_hard_system(n, k, &b, &opts) {
        Ok(sols) => {
            for s in &sols {
                let r = s.radius.finite().map(|r| r.to_fixed(20)).unwrap_or_default();
                table.push(vec![
                    n.to_string(),
                    k.to_string(),
                    s.a.to_fixed(20),
                    r,
                    s.energy.to_shortest_string(),
                    s.nodes().to_string(),
                    radii(s),
                    s.state_type(),
                    if validate { "yes" } else { "skipped" }.into(),
                ]);
            }
        }
        Err(Error::NoSolutionFound(m)) => table.footer.push(format!("no solutions: {m}")),
        Err(e) => return Err(err(e)),
    }
    Ok(Outcome { table, status: Status::Ok })
}

pub fn table(name: &str, digits: u32, equivalences: bool) -> Result<Outcome, String> {
    let id: TableId = name.parse().map_err(err)?;
    let mut opts = RegenOptions { digits, equivalences, ..Default::default() };
    if digits < 18 {
        opts.tolerance = BigReal::pow10(1 - digits as i32, Precision::digits(60));
    }
    let rows = tables::regenerate(id, &opts).map_err(err)?;
    let mut table = Table::new(&[
        "table", "label", "expected", "computed", "abs_diff", "N", "N_printed", "source", "ok", "note",
    ])
    .with_title(format!("Table {id}: {}", id.title()));
    let mut bad = 0;
    for r in &rows {
        if !r.ok {
            bad += 1;
        }
        table.push(vec![
            id.to_string(),
            r.label.clone(),
            r.expected.clone(),
            r.computed.clone(),
            r.abs_diff.as_ref().map(|d| d.to_sci(2)).unwrap_or_default(),
            r.iterations.map(|v| v.to_string()).unwrap_or_default(),
            r.printed_iterations.map(|v| v.to_string()).unwrap_or_default(),
            r.source.to_string(),
            if r.ok { "yes" } else { "NO" }.into(),
            r.note.clone().unwrap_or_default(),
        ]);
    }
    table.footer.push(format!("{} of {} rows match", rows.len() - bad, rows.len()));
    let status = if bad == 0 { Status::Ok } else { Status::Partial };
    Ok(Outcome { table, status })
}

pub fn bounds(system: &SystemArgs, n: u32) -> Result<Outcome, String> {
    let spec = build_spec(system, None)?;
    let rep = bounds::bounds_for_subspace(&spec, n).map_err(err)?;
    let f = |v: &BigReal| v.to_fixed(8);
    let p = |x: f64| if x.is_finite() { format!("{x:.8}") } else { "inf".into() };
    let mut table = Table::new(&["bound", "kind", "value", "parameter"])
        .with_title(format!("bounds for n = {n}, l = {}, d = {}", spec.l, spec.d));
    table.push(vec!["envelope".into(), "upper".into(), f(&rep.envelope_upper), format!("t = {}", p(rep.envelope_t))]);
    // the trial-function bounds only apply to the ground state
    if n == 0 {
        table.push(vec!["gaussian".into(), "upper".into(), f(&rep.gauss_upper), format!("alpha = {}", p(rep.gauss_alpha))]);
        table.push(vec![
            "local-energy".into(),
            "lower".into(),
            f(&rep.local_energy_lower),
            format!("alpha = {}", p(rep.local_energy_alpha)),
        ]);
        if let Some(h) = &rep.heisenberg_lower {
            table.push(vec!["heisenberg".into(), "lower".into(), f(h), String::new()]);
        }
    }
    Ok(Outcome { table, status: Status::Ok })
}

struct Case {
    name: String,
    spec: SystemSpec,
    n: u32,
    kind: CaseKind,
}

enum CaseKind {
    /// AIM against the shooting solver.
    Oracle,
    /// AIM against AIM on another system expected to share the level.
    SameAs(SystemSpec, u32),
}

fn soft(a: &str, b: &str, d: u32, l: u32) -> SystemSpec {
    SystemSpec::soft(a, b, d, l).expect("valid built-in system")
}

fn hard(a: &str, b: &str, d: u32, l: u32, r: &str) -> SystemSpec {
    SystemSpec::hard(a, b, d, l, r).expect("valid built-in system")
}

fn oracle_cases(quick: bool) -> Vec<Case> {
    let mut v = vec![
        Case { name: "soft d=3 n=0".into(), spec: soft("1", "1", 3, 0), n: 0, kind: CaseKind::Oracle },
        Case { name: "soft d=3 n=1".into(), spec: soft("1", "1", 3, 0), n: 1, kind: CaseKind::Oracle },
        Case { name: "hard d=3 R=1 n=0".into(), spec: hard("1", "1", 3, 0, "1"), n: 0, kind: CaseKind::Oracle },
        Case {
            name: "orbit (6,0) = (4,1)".into(),
            spec: soft("1", "1", 6, 0),
            n: 0,
            kind: CaseKind::SameAs(soft("1", "1", 4, 1), 0),
        },
        Case {
            name: "orbit (6,0) = (2,2)".into(),
            spec: soft("1", "1", 6, 0),
            n: 0,
            kind: CaseKind::SameAs(soft("1", "1", 2, 2), 0),
        },
        Case {
            name: "wall R=20 vs half-line".into(),
            spec: hard("1", "1", 3, 0, "20"),
            n: 0,
            kind: CaseKind::SameAs(soft("1", "1", 3, 0), 0),
        },
    ];
    if !quick {
        v.extend([
            Case { name: "soft d=2 n=3".into(), spec: soft("1", "1", 2, 0), n: 3, kind: CaseKind::Oracle },
            Case { name: "soft d=5 n=0".into(), spec: soft("1", "1", 5, 0), n: 0, kind: CaseKind::Oracle },
            Case { name: "soft d=7 n=2".into(), spec: soft("1", "1", 7, 0), n: 2, kind: CaseKind::Oracle },
            Case { name: "soft a=0.5 b=2 d=3 n=2".into(), spec: soft("0.5", "2", 3, 0), n: 2, kind: CaseKind::Oracle },
            Case { name: "soft a=3 b=0.5 d=4 l=1 n=1".into(), spec: soft("3", "0.5", 4, 1), n: 1, kind: CaseKind::Oracle },
            Case { name: "hard d=2 l=2 R=1 n=0".into(), spec: hard("1", "1", 2, 2, "1"), n: 0, kind: CaseKind::Oracle },
            Case { name: "hard d=3 R=1.5 n=2".into(), spec: hard("1", "1", 3, 0, "1.5"), n: 2, kind: CaseKind::Oracle },
        ]);
    }
    v
}

fn aim_energy(spec: &SystemSpec, n: u32, digits: u32) -> confine_core::Result<BigReal> {
    let r = aim::find_eigenvalues(spec, &[n], digits, &AimOptions::for_digits(digits))?;
    Ok(r.into_iter().next().expect("one state").energy)
}

pub fn oracle_check(quick: bool, digits: u32) -> Result<Outcome, String> {
    let cases = oracle_cases(quick);
    let tol = BigReal::pow10(-12, Precision::digits(40));
    let rows: Vec<Result<Vec<String>, String>> = cases
        .par_iter()
        .map(|c| {
            let left = aim_energy(&c.spec, c.n, digits).map_err(err)?;
            let (method, right) = match &c.kind {
                CaseKind::Oracle => ("shooting", oracle::shoot_eigenvalue(&c.spec, c.n, digits).map_err(err)?.energy),
                CaseKind::SameAs(s, n) => ("aim", aim_energy(s, *n, digits).map_err(err)?),
            };
            let diff = (&left - &right).abs();
            let ok = diff < tol;
            Ok(vec![
                c.name.clone(),
                fmt_energy(&left, digits),
                method.to_string(),
                fmt_energy(&right, digits),
                diff.to_sci(2),
                if ok { "yes" } else { "NO" }.into(),
            ])
        })
        .collect();
    let mut table = Table::new(&["case", "aim", "reference", "reference_value", "abs_diff", "ok"])
        .with_title("AIM cross-checks (tolerance 1e-12)");
    let mut status = Status::Ok;
    for r in rows {
        let r = r?;
        if r[5] != "yes" {
            status = Status::Partial;
        }
        table.push(r);
    }
    Ok(Outcome { table, status })
}
