//! Identity suites for `sievelab verify`.

use num_complex::Complex64;
use rayon::prelude::*;
use sievelab::arith::{self, euler_phi, gcd, tau};
use sievelab::characters::{char_group, DirichletChar};
use sievelab::kernels::{self, random_complex_table};
use sievelab::norms::{self, FamilySpec};
use sievelab::rationals::{enumerate_pairs, Window};
use sievelab::sieve::{self, BdhInput};
use sievelab::specials::{self, ZSeries};
use std::collections::HashMap;

pub const SUITES: &[&str] = &[
    "orthogonality",
    "primitivity",
    "coset",
    "dk",
    "theta",
    "factorization",
    "chiseparation",
    "archimedean",
    "z_euler",
    "gram_oracle",
    "duality",
    "bdh",
];

/// Result of one suite: worst floating error, number of checks, and failures
/// of the exact (integer or rational) parts.
pub struct SuiteResult {
    pub max_err: f64,
    pub checks: usize,
    pub exact_failures: usize,
    pub default_tol: f64,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = a.norm().max(b.norm());
    if d == 0.0 {
        0.0
    } else {
        (a - b).norm() / d
    }
}

fn fold(errs: impl ParallelIterator<Item = f64>) -> f64 {
    errs.reduce(|| 0.0, f64::max)
}

pub fn run_suite(name: &str, tables: u64) -> SuiteResult {
    match name {
        "orthogonality" => {
            let max_err = fold((1..=60u64).into_par_iter().map(|q| {
                let g = char_group(q);
                (0..q as i64)
                    .filter(|&w| gcd(w as u64, q) == 1)
                    .map(|w| {
                        let s: Complex64 = g.iter().map(|c| c.eval(w)).sum();
                        let want = if w as u64 % q == 1 % q { euler_phi(q) as f64 } else { 0.0 };
                        (s - want).norm() / euler_phi(q) as f64
                    })
                    .fold(0.0, f64::max)
            }));
            SuiteResult { max_err, checks: (1..=60u64).map(euler_phi).sum::<u64>() as usize, exact_failures: 0, default_tol: 1e-10 }
        }
        "primitivity" => {
            let res: Vec<(f64, usize, usize)> = (1..=120u64)
                .into_par_iter()
                .map(|q| {
                    let k = kernels::primitivity_kernel(q);
                    let bound_fail = usize::from(k.abs_sum() > num_rational::Ratio::from_integer(tau(q) as i64));
                    let g = char_group(q);
                    let err = g
                        .iter()
                        .map(|psi| (k.apply(&psi) - if psi.is_primitive() { 1.0 } else { 0.0 }).norm())
                        .fold(0.0, f64::max);
                    (err, g.len(), bound_fail)
                })
                .collect();
            SuiteResult {
                max_err: res.iter().map(|r| r.0).fold(0.0, f64::max),
                checks: res.iter().map(|r| r.1).sum(),
                exact_failures: res.iter().map(|r| r.2).sum(),
                default_tol: 1e-9,
            }
        }
        "coset" => {
            let cases: Vec<(u64, u64, u64)> = (1..=48u64)
                .flat_map(|q| arith::divisors(q).into_iter().flat_map(move |r| (0..tables).map(move |s| (q, r, s))))
                .collect();
            let max_err = fold(cases.par_iter().map(|&(q, r, seed)| {
                let n = char_group(q).len();
                let tab = random_complex_table(n * n, seed);
                kernels::coset_identity_check(q, r, &|i, j| tab[i * n + j], 0.0).unwrap().rel_err
            }));
            SuiteResult { max_err, checks: cases.len(), exact_failures: 0, default_tol: 1e-9 }
        }
        "dk" => {
            let exact_failures = (1..=40u64).filter(|&k| kernels::dk_tuples(k).len() != dk_count_brute(k)).count();
            SuiteResult { max_err: 0.0, checks: 40, exact_failures, default_tol: 1e-9 }
        }
        "theta" => {
            let cases: Vec<(u64, u64)> = (1..=40u64).flat_map(|k| (0..tables).map(move |s| (k, s))).collect();
            let max_err = fold(cases.par_iter().map(|&(k, seed)| {
                let n = char_group(k).len();
                kernels::theta_separation_check(k, &random_complex_table(n, seed), 0.0).rel_err
            }));
            SuiteResult { max_err, checks: cases.len(), exact_failures: 0, default_tol: 1e-9 }
        }
        "factorization" => {
            let prims: Vec<DirichletChar> =
                (1..=36u64).flat_map(|q| char_group(q).primitive().collect::<Vec<_>>()).collect();
            let exact_failures: usize = prims
                .par_iter()
                .map(|c1| {
                    prims
                        .iter()
                        .filter(|c2| {
                            let f = kernels::chi_factorize(c1, c2).unwrap();
                            !(&f.reconstruct(1) == c1
                                && &f.reconstruct(2) == *c2
                                && f.predicted_conductor() == c1.mul_lifted(&c2.conj()).conductor())
                        })
                        .count()
                })
                .sum();
            SuiteResult { max_err: 0.0, checks: prims.len() * prims.len(), exact_failures, default_tol: 1e-9 }
        }
        "chiseparation" => {
            let sets: Vec<Vec<u64>> = vec![
                vec![3],
                vec![12],
                vec![3, 4, 5],
                vec![3, 9],
                vec![4, 8, 12, 16, 24],
                vec![5, 7, 11],
                vec![6, 10, 15],
                vec![8, 20, 24],
                vec![9, 18, 21],
                vec![13, 16, 17, 19, 23],
            ];
            let cases: Vec<(usize, u64)> = (0..sets.len()).flat_map(|i| (0..tables).map(move |s| (i, s))).collect();
            let max_err = fold(cases.par_iter().map(|&(i, seed)| {
                let chars: Vec<DirichletChar> =
                    sets[i].iter().flat_map(|&q| char_group(q).primitive().collect::<Vec<_>>()).collect();
                let tab: HashMap<DirichletChar, Complex64> =
                    chars.iter().cloned().zip(random_complex_table(chars.len(), seed)).collect();
                kernels::chiseparation_check(&sets[i], &|c| tab.get(c).copied().unwrap_or_default(), 0.0).rel_err
            }));
            SuiteResult { max_err, checks: cases.len(), exact_failures: 0, default_tol: 1e-9 }
        }
        "archimedean" => {
            let wave = |t: f64| Complex64::from_polar(1.0 + t / 8.0, 1.7 * t);
            let cases = [(8.0, 2.0), (8.0, 1.0), (16.0, 1.5), (4.0, 8.0)];
            let max_err = cases
                .iter()
                .map(|&(t, u)| kernels::archimedean_coset_check(t, u, &wave, &kernels::smooth_bump(u, 2.0 * u), 0.0).rel_err)
                .fold(0.0, f64::max);
            SuiteResult { max_err, checks: cases.len(), exact_failures: 0, default_tol: 1e-6 }
        }
        "z_euler" => {
            let points = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(2.0, 1.0)];
            let max_err = fold(points.par_iter().map(|&s| {
                let series = ZSeries::new(s, 200_000).unwrap();
                let mut worst = 0.0f64;
                for c in 1..=10 {
                    for d in 1..=10 {
                        let e = specials::z_cd_euler(c, d, s, 10_000).unwrap().value;
                        worst = worst.max(rel(e, series.eval(c, d)));
                    }
                }
                worst
            }));
            SuiteResult { max_err, checks: 300, exact_failures: 0, default_tol: 1e-4 }
        }
        "gram_oracle" => {
            let mut grid = Vec::new();
            for &q in &[3.0, 7.0, 12.0, 20.0] {
                for &k in &[1u64, 6] {
                    for &t in &[1.0, 4.0] {
                        for &n in &[64.0, 200.0] {
                            grid.push((FamilySpec::new(q, k, t), n));
                        }
                    }
                }
            }
            let max_err = fold(grid.par_iter().map(|(spec, n)| {
                let index = enumerate_pairs(*n, Window::Dyadic, 1);
                let g = norms::gram_multiplicative(spec, &index);
                let o = norms::gram_bruteforce(spec, &index, 64);
                let scale = g.m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
                (&g.m - &o.m).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
            }));
            SuiteResult { max_err, checks: grid.len(), exact_failures: 0, default_tol: 1e-8 }
        }
        "duality" => {
            let inst: Vec<(f64, f64)> = (0..20).map(|i| (1.0 + (i % 16) as f64, 10.0 + 10.0 * i as f64)).collect();
            let max_err = fold(inst.par_iter().map(|&(q, n)| {
                norms::duality_check(&norms::additive_lambda_matrix(q, &enumerate_pairs(n, Window::Dyadic, 1)), 0.0).rel_err
            }));
            SuiteResult { max_err, checks: inst.len(), exact_failures: 0, default_tol: 1e-8 }
        }
        "bdh" => {
            let max_err = fold((0..50u64).into_par_iter().map(|seed| {
                let input = BdhInput::random(1 + (seed * 37) % 100, 1 + (seed * 7) % 12, seed);
                rel(Complex64::new(sieve::bdh_lhs(&input), 0.0), Complex64::new(sieve::bdh_rhs_chars(&input), 0.0))
            }));
            SuiteResult { max_err, checks: 50, exact_failures: 0, default_tol: 1e-8 }
        }
        other => unreachable!("unknown suite {other}"),
    }
}

/// `|D_k|` by enumerating every divisor triple.
fn dk_count_brute(k: u64) -> usize {
    let ds = arith::divisors(k);
    let mut n = 0;
    for &k0 in &ds {
        for &k1 in &ds {
            for &kp in &ds {
                let ok = k0 * k1 * kp == k && gcd(k0, kp) == 1 && arith::factorize(k1).iter().all(|&(p, _)| kp % p == 0);
                if ok {
                    n += (euler_phi(k) / euler_phi(kp)) as usize;
                }
            }
        }
    }
    n
}
