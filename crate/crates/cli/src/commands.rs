//! Subcommand bodies. Each returns its records in grid order plus the exit code.

use crate::config::{usage, Config, UsageError};
use crate::record::{write_plot, Params, ResultRecord};
use crate::verify;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::json;
use sievelab::norms::{self, EigenMethod, EigenOptions, FamilySpec, NormEstimate, Parity, Route};
use sievelab::rationals::{enumerate_pairs, enumerate_rationals, Window};
use sievelab::sieve::{self, BdhInput, SievePlan};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct Run {
    pub seed: u64,
    pub tol: Option<f64>,
}

pub struct Output {
    pub records: Vec<ResultRecord>,
    pub exit: i32,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_millis())
}

pub fn verify(cfg: &Config, run: &Run) -> Result<Output, UsageError> {
    cfg.check_keys(&["suite", "tables"])?;
    let names: Vec<String> = cfg.list("suite", &verify::SUITES.iter().map(|s| s.to_string()).collect::<Vec<_>>())?;
    for n in &names {
        if !verify::SUITES.contains(&n.as_str()) {
            return usage(format!("unknown suite {n:?} (expected one of {})", verify::SUITES.join(", ")));
        }
    }
    let tables: u64 = cfg.one("tables", 20)?;
    let mut records = Vec::new();
    let mut exit = 0;
    for name in &names {
        let (res, millis) = timed(|| verify::run_suite(name, tables));
        let tol = run.tol.unwrap_or(res.default_tol);
        let pass = res.exact_failures == 0 && res.max_err <= tol;
        if !pass {
            exit = 1;
        }
        let mut r = ResultRecord::new("verify", Params::default(), run.seed);
        r.extra = json!({"suite": name, "checks": res.checks, "exact_failures": res.exact_failures, "tol": tol});
        r.value = res.max_err;
        r.residual = res.max_err;
        r.pass = Some(pass);
        r.millis = millis;
        records.push(r);
    }
    Ok(Output { records, exit })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Multiplicative,
    Additive,
    Rational,
}

struct NormGrid {
    family: Family,
    parity: Parity,
    signed: bool,
    route: Route,
    points: Vec<(f64, u64, f64, f64)>,
}

const NORM_KEYS: &[&str] = &["Q", "k", "T", "N", "family", "parity", "signed", "route", "dump", "dump_csv", "plot_dir"];

fn norm_grid(cfg: &Config) -> Result<NormGrid, UsageError> {
    let family = match cfg.one("family", "mult".to_string())?.as_str() {
        "mult" => Family::Multiplicative,
        "add" => Family::Additive,
        "rational" => Family::Rational,
        f => return usage(format!("family must be mult, add or rational, not {f:?}")),
    };
    let parity = match cfg.one("parity", "any".to_string())?.as_str() {
        "any" => Parity::Any,
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        p => return usage(format!("parity must be any, even or odd, not {p:?}")),
    };
    let route = match cfg.one("route", "auto".to_string())?.as_str() {
        "auto" => Route::Auto,
        "dense" => Route::PairDense,
        "power" => Route::PairPower,
        "family" => Route::FamilyQuadrature,
        r => return usage(format!("route must be auto, dense, power or family, not {r:?}")),
    };
    let signed: bool = cfg.one("signed", false)?;
    let qs: Vec<f64> = cfg.list("Q", &[4.0])?;
    let ks: Vec<u64> = cfg.list("k", &[1])?;
    let ts: Vec<f64> = cfg.list("T", &[1.0])?;
    let ns: Vec<f64> = cfg.list("N", &[64.0])?;
    if qs.iter().chain(&ts).chain(&ns).any(|&x| !(x > 0.0) || !x.is_finite()) || ks.contains(&0) {
        return usage("Q, k, T and N must be positive");
    }
    let mut points = Vec::new();
    for &q in &qs {
        for &k in &ks {
            for &t in &ts {
                for &n in &ns {
                    points.push((q, k, t, n));
                }
            }
        }
    }
    Ok(NormGrid { family, parity, signed, route, points })
}

fn estimate(grid: &NormGrid, p: (f64, u64, f64, f64), opts: &EigenOptions) -> (NormEstimate, usize) {
    let (q, k, t, n) = p;
    match grid.family {
        Family::Multiplicative => {
            let index = enumerate_pairs(n, Window::Dyadic, 1);
            let spec = FamilySpec::new(q, k, t).with_parity(grid.parity);
            (norms::delta_on_index(&spec, &index, grid.route, opts), index.len())
        }
        Family::Additive => (norms::delta_add(q, n, opts), enumerate_pairs(n, Window::Dyadic, 1).len()),
        Family::Rational => {
            (norms::delta_rational(q, n, grid.signed, opts), enumerate_rationals(n, Window::Full, 1, grid.signed).len())
        }
    }
}

fn params(grid: &NormGrid, p: (f64, u64, f64, f64)) -> Params {
    match grid.family {
        Family::Multiplicative => Params { q: Some(p.0), k: Some(p.1), t: Some(p.2), n: Some(p.3) },
        _ => Params { q: Some(p.0), k: None, t: None, n: Some(p.3) },
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Multiplicative => "mult",
        Family::Additive => "add",
        Family::Rational => "rational",
    }
}

fn eigen_options(run: &Run) -> EigenOptions {
    let mut o = EigenOptions { seed: run.seed, ..Default::default() };
    if let Some(t) = run.tol {
        o.tol = t;
    }
    o
}

fn norm_records(experiment: &str, grid: &NormGrid, run: &Run) -> Vec<ResultRecord> {
    let mut opts = eigen_options(run);
    if grid.route == Route::PairPower {
        opts.method = EigenMethod::Power;
    }
    grid.points
        .par_iter()
        .map(|&p| {
            let ((est, dim), millis) = timed(|| estimate(grid, p, &opts));
            let mut r = ResultRecord::new(experiment, params(grid, p), run.seed);
            let (q, k, t, n) = p;
            let scale = match grid.family {
                Family::Multiplicative => q * q * k as f64 * t + n,
                _ => q * q + n,
            };
            r.extra = json!({
                "family": family_name(grid.family),
                "method": est.method,
                "iterations": est.iterations,
                "dim": dim,
                "converged": est.converged,
                "lower_bound": est.lower_bound,
                "ratio_to_sharp_bound": est.value / scale,
            });
            r.value = est.value;
            r.residual = est.residual;
            r.millis = millis;
            r
        })
        .collect()
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> UsageError {
    UsageError(format!("{}: {e}", path.display()))
}

pub fn norm(cfg: &Config, run: &Run) -> Result<Output, UsageError> {
    cfg.check_keys(NORM_KEYS)?;
    let grid = norm_grid(cfg)?;
    let records = norm_records("norm", &grid, run);
    for (key, binary) in [("dump", true), ("dump_csv", false)] {
        if let Some(path) = cfg.get(key).and_then(|v| v.first()) {
            if grid.points.len() != 1 {
                return usage(format!("{key} needs a single grid point"));
            }
            let (q, k, t, n) = grid.points[0];
            let g = match grid.family {
                Family::Multiplicative => norms::gram_multiplicative(
                    &FamilySpec::new(q, k, t).with_parity(grid.parity),
                    &enumerate_pairs(n, Window::Dyadic, 1),
                ),
                Family::Additive => norms::gram_additive(q, n),
                Family::Rational => norms::gram_rational(q, n, grid.signed),
            };
            let path = PathBuf::from(path);
            let file = std::fs::File::create(&path).map_err(|e| io_err(&path, e))?;
            let res = if binary { norms::write_gram_binary(&g.m, file) } else { norms::write_gram_csv(&g, file) };
            res.map_err(|e| io_err(&path, e))?;
        }
    }
    Ok(Output { records, exit: 0 })
}

pub fn scan(cfg: &Config, run: &Run) -> Result<Output, UsageError> {
    cfg.check_keys(NORM_KEYS)?;
    let grid = norm_grid(cfg)?;
    let mut records = norm_records("scan", &grid, run);
    let plot_dir = cfg.get("plot_dir").and_then(|v| v.first()).map(PathBuf::from);
    if let Some(dir) = &plot_dir {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    // N-aspect: group by (Q, k, T); Q-aspect: group by (k, T, N)
    let mut by_n: BTreeMap<(u64, u64, u64), Vec<(f64, f64, f64)>> = BTreeMap::new();
    let mut by_q: BTreeMap<(u64, u64, u64), Vec<(f64, f64, f64)>> = BTreeMap::new();
    for (&(q, k, t, n), r) in grid.points.iter().zip(&records) {
        let ratio = r.extra["ratio_to_sharp_bound"].as_f64().unwrap_or(f64::NAN);
        by_n.entry((q.to_bits(), k, t.to_bits())).or_default().push((n, r.value, ratio));
        by_q.entry((k, t.to_bits(), n.to_bits())).or_default().push((q, r.value, ratio));
    }
    let mut fits = Vec::new();
    for (axis, groups) in [("N", &by_n), ("Q", &by_q)] {
        for (&(a, b, c), pts) in groups {
            let (params, tag) = if axis == "N" {
                let (q, k, t) = (f64::from_bits(a), b, f64::from_bits(c));
                (Params { q: Some(q), k: Some(k), t: Some(t), n: None }, format!("Q{q}_k{k}_T{t}"))
            } else {
                let (k, t, n) = (a, f64::from_bits(b), f64::from_bits(c));
                (Params { q: None, k: Some(k), t: Some(t), n: Some(n) }, format!("k{k}_T{t}_N{n}"))
            };
            if pts.len() < 2 {
                continue;
            }
            let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.1)).collect();
            if let Some(dir) = &plot_dir {
                let ratios: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.2)).collect();
                for (name, data) in [(format!("delta_vs_{axis}_{tag}.csv"), &xy), (format!("ratio_vs_{axis}_{tag}.csv"), &ratios)] {
                    let path = dir.join(name);
                    let f = std::fs::File::create(&path).map_err(|e| io_err(&path, e))?;
                    write_plot(data, f).map_err(|e| io_err(&path, e))?;
                }
            }
            let Ok(fit) = norms::exponent_fit(&xy) else { continue };
            let ratios: Vec<f64> = pts.iter().map(|p| p.2).collect();
            let band = ratios.iter().copied().fold(f64::MIN, f64::max) / ratios.iter().copied().fold(f64::MAX, f64::min);
            let mut r = ResultRecord::new(&format!("scan_fit_{axis}"), params, run.seed);
            r.extra = json!({"intercept": fit.intercept, "r2": fit.r2, "points": pts.len(), "ratio_band": band});
            r.value = fit.slope;
            r.residual = 1.0 - fit.r2;
            fits.push(r);
        }
    }
    records.extend(fits);
    Ok(Output { records, exit: 0 })
}

fn sieve_record(experiment: &str, plan: &SievePlan, q: u64, run: &Run, extra_seed: Option<u64>) -> ResultRecord {
    let (rep, millis) = timed(|| sieve::sieve_inequality_report(plan, q));
    let mut r = ResultRecord::new(experiment, Params { q: Some(q as f64), k: None, t: None, n: Some(plan.n as f64) }, run.seed);
    let omega: BTreeMap<String, Vec<u64>> = plan.omega.iter().map(|(p, s)| (p.to_string(), s.iter().copied().collect())).collect();
    r.extra = json!({
        "omega": omega,
        "sifted": rep.sifted,
        "exempt": rep.exempt,
        "H": rep.h.to_string(),
        "delta": rep.delta,
        "indicator_quotient": rep.indicator_quotient,
        "unit_ratio": rep.unit_ratio,
        "plan_seed": extra_seed,
    });
    r.value = rep.ratio;
    r.residual = rep.ratio - 1.0;
    r.pass = Some(!rep.violation);
    r.millis = millis;
    r
}

pub fn sieve(cfg: &Config, run: &Run) -> Result<Output, UsageError> {
    cfg.check_keys(&["plan", "Q", "random", "max_N", "max_Q", "half_residue"])?;
    let mut records = Vec::new();
    if let Some(path) = cfg.get("plan").and_then(|v| v.first()) {
        let path = PathBuf::from(path);
        let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        let plan = SievePlan::parse(&text).map_err(|e| io_err(&path, e))?;
        let q = match (cfg.get("Q"), plan.q) {
            (Some(_), _) => cfg.one::<u64>("Q", 1)?,
            (None, Some(q)) => q,
            (None, None) => return usage("the plan has no Q line and no Q was given"),
        };
        if q == 0 {
            return usage("Q must be positive");
        }
        records.push(sieve_record("sieve", &plan, q, run, None));
    }
    let default_random = if cfg.get("plan").is_some() || cfg.get("half_residue").is_some() { 0 } else { 20 };
    let count: u64 = cfg.one("random", default_random)?;
    let max_n: u64 = cfg.one("max_N", 200)?;
    let max_q: u64 = cfg.one("max_Q", 12)?;
    if max_n < 10 || max_q == 0 {
        return usage("max_N must be at least 10 and max_Q positive");
    }
    let random: Vec<ResultRecord> = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = run.seed.wrapping_add(i);
            let (plan, q) = sieve::random_plan(seed, max_n, max_q);
            sieve_record("sieve_random", &plan, q, run, Some(seed))
        })
        .collect();
    records.extend(random);
    let halves: Vec<u64> = cfg.list("half_residue", &[])?;
    for n in halves {
        let ((plan, q), millis) = timed(|| sieve::half_residue_plan(n, run.seed));
        let h = sieve::big_h(q, &plan);
        let c = h.to_f64().unwrap_or(f64::NAN) / q.max(1) as f64;
        let mut r = ResultRecord::new("half_residue", Params { q: Some(q as f64), k: None, t: None, n: Some(n as f64) }, run.seed);
        r.extra = json!({"H": h.to_string(), "primes": plan.omega.len()});
        r.value = c;
        r.millis = millis;
        records.push(r);
    }
    let exit = if records.iter().any(|r| r.pass == Some(false)) { 1 } else { 0 };
    Ok(Output { records, exit })
}

pub fn bdh(cfg: &Config, run: &Run) -> Result<Output, UsageError> {
    cfg.check_keys(&["X", "Q", "inputs"])?;
    let xs: Vec<u64> = cfg.list("X", &[100])?;
    let qs: Vec<u64> = cfg.list("Q", &[12])?;
    let inputs: u64 = cfg.one("inputs", 10)?;
    if xs.contains(&0) || qs.contains(&0) {
        return usage("X and Q must be positive");
    }
    let tol = run.tol.unwrap_or(1e-8);
    let mut cases = Vec::new();
    for &x in &xs {
        for &q in &qs {
            for i in 0..inputs {
                cases.push((x, q, run.seed.wrapping_add(i)));
            }
        }
    }
    let records: Vec<ResultRecord> = cases
        .par_iter()
        .map(|&(x, q, seed)| {
            let ((l, rhs), millis) = timed(|| {
                let input = BdhInput::random(x, q, seed);
                (sieve::bdh_lhs(&input), sieve::bdh_rhs_chars(&input))
            });
            let d = l.abs().max(rhs.abs());
            let rel = if d == 0.0 { 0.0 } else { (l - rhs).abs() / d };
            let mut r = ResultRecord::new("bdh", Params { q: Some(q as f64), k: None, t: None, n: Some(x as f64) }, run.seed);
            r.extra = json!({"X": x, "rhs_chars": rhs, "input_seed": seed});
            r.value = l;
            r.residual = rel;
            r.pass = Some(rel <= tol);
            r.millis = millis;
            r
        })
        .collect();
    let exit = if records.iter().any(|r| r.pass == Some(false)) { 1 } else { 0 };
    Ok(Output { records, exit })
}
