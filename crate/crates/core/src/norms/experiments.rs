use super::eigen::{top_eigenvalue, EigenOptions, NormEstimate, DENSE_LIMIT};
use super::gram::{family_members, family_moduli, gram_additive, gram_multiplicative, gram_rational};
use super::{eigenvalues_dense, FamilySpec, NormError};
use crate::arith::{self, gcd};
use crate::quad;
use crate::rationals::{enumerate_pairs, CoprimePair, RationalPoint, Window};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// How the multiplicative norm is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    #[default]
    Auto,
    /// Closed-form pair Gram, dense eigensolve.
    PairDense,
    /// Closed-form pair Gram, power iteration.
    PairPower,
    /// Nyström discretization of `ΛΛ*` on family × Gauss–Legendre nodes in `t`.
    FamilyQuadrature,
}

const FAMILY_NODES: usize = 16;
const FAMILY_LIMIT: usize = 2048;

/// `Δ(Q, k, T, N)` on the dyadic window `N/2 < ab ≤ N`.
pub fn delta(spec: &FamilySpec, n: f64) -> NormEstimate {
    delta_on_index(spec, &enumerate_pairs(n, Window::Dyadic, 1), Route::Auto, &EigenOptions::default())
}

fn family_panels(spec: &FamilySpec, index: &[CoprimePair]) -> usize {
    let lmax = index.iter().map(|p| (p.a as f64 / p.b as f64).ln().abs()).fold(0.0, f64::max);
    ((0.5 * spec.t * lmax / 8.0).ceil() as usize).max(1)
}

/// Norm of the family on an explicit index.
pub fn delta_on_index(spec: &FamilySpec, index: &[CoprimePair], route: Route, opts: &EigenOptions) -> NormEstimate {
    if index.is_empty() || family_moduli(spec.q, spec.k).is_empty() {
        return NormEstimate::zero();
    }
    let route = match route {
        Route::Auto if index.len() <= DENSE_LIMIT => Route::PairDense,
        Route::Auto => {
            let rows = family_members(spec).len() * FAMILY_NODES * 2 * family_panels(spec, index);
            if rows <= FAMILY_LIMIT && rows < index.len() {
                Route::FamilyQuadrature
            } else {
                Route::PairPower
            }
        }
        r => r,
    };
    match route {
        Route::FamilyQuadrature => family_side(spec, index),
        Route::PairDense | Route::PairPower => {
            let g = gram_multiplicative(spec, index);
            let method = if route == Route::PairDense { super::EigenMethod::Dense } else { opts.method };
            top_eigenvalue(&g.m, &EigenOptions { method, ..*opts }).expect("Gram matrices are Hermitian")
        }
        Route::Auto => unreachable!(),
    }
}

fn family_side(spec: &FamilySpec, index: &[CoprimePair]) -> NormEstimate {
    let members = family_members(spec);
    let vals: Vec<Vec<Complex64>> = members
        .par_iter()
        .map(|psi| index.iter().map(|p| psi.eval(p.a as i64) * psi.eval(p.b as i64).conj()).collect())
        .collect();
    let logs: Vec<f64> = index.iter().map(|p| (p.a as f64).ln() - (p.b as f64).ln()).collect();
    let top = |panels: usize| {
        let nodes = quad::composite_nodes(spec.t / 2.0, spec.t, panels, FAMILY_NODES);
        let rows: Vec<Vec<Complex64>> = vals
            .iter()
            .flat_map(|v| nodes.iter().map(move |&(t, w)| (v, t, w)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(v, t, w)| {
                let s = w.sqrt();
                v.iter().zip(&logs).map(|(z, l)| z * Complex64::from_polar(s, t * l)).collect()
            })
            .collect();
        let r = rows.len();
        let upper: Vec<Vec<Complex64>> = (0..r)
            .into_par_iter()
            .map(|i| (i..r).map(|j| rows[i].iter().zip(&rows[j]).map(|(x, y)| x * y.conj()).sum()).collect())
            .collect();
        let mut k = DMatrix::from_element(r, r, Complex64::new(0.0, 0.0));
        for (i, row) in upper.into_iter().enumerate() {
            for (off, z) in row.into_iter().enumerate() {
                k[(i, i + off)] = z;
                k[(i + off, i)] = z.conj();
            }
            k[(i, i)].im = 0.0;
        }
        eigenvalues_dense(&k).last().copied().unwrap_or(0.0)
    };
    let panels = family_panels(spec, index);
    let coarse = top(panels);
    let fine = top(2 * panels);
    NormEstimate {
        value: fine,
        residual: (fine - coarse).abs() / fine.abs().max(1.0),
        iterations: 0,
        method: "family-quadrature".into(),
        seed: 0,
        converged: true,
        lower_bound: false,
    }
}

/// `Δ_add(Q, N)` for `e(t·a·b̄/q)` on the dyadic window.
pub fn delta_add(q: f64, n: f64, opts: &EigenOptions) -> NormEstimate {
    let g = gram_additive(q, n);
    top_eigenvalue(&g.m, opts).expect("Gram matrices are Hermitian")
}

/// Norm of the rational family over `ht ≤ N`.
pub fn delta_rational(q: f64, n: f64, signed: bool, opts: &EigenOptions) -> NormEstimate {
    let g = gram_rational(q, n, signed);
    top_eigenvalue(&g.m, opts).expect("Gram matrices are Hermitian")
}

/// Rows `(q, t)` with `Q/2 < q ≤ Q` and `t` a unit mod `q`, columns the index:
/// `e(t·a·b̄/q)` where `gcd(ab, q) = 1`, else 0.
pub fn additive_lambda_matrix(q: f64, index: &[CoprimePair]) -> DMatrix<Complex64> {
    let mut rows: Vec<(u64, u64)> = Vec::new();
    for m in family_moduli(q, 1) {
        rows.extend((0..m).filter(|&t| gcd(t, m) == 1).map(|t| (m, t)));
    }
    DMatrix::from_fn(rows.len(), index.len(), |i, j| {
        let (m, t) = rows[i];
        let p = index[j];
        match RationalPoint::from(p).reduce_mod(m) {
            Ok(x) if gcd(p.a, m) == 1 => Complex64::from_polar(1.0, 2.0 * PI * arith::mul_mod(t, x, m) as f64 / m as f64),
            _ => Complex64::new(0.0, 0.0),
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    /// top eigenvalue of `Λ*Λ`
    pub gram_side: f64,
    /// top eigenvalue of `ΛΛ*`
    pub family_side: f64,
    pub rel_err: f64,
    pub pass: bool,
}

pub fn duality_check(lambda: &DMatrix<Complex64>, tol: f64) -> DualityReport {
    let top = |m: DMatrix<Complex64>| eigenvalues_dense(&m).last().copied().unwrap_or(0.0);
    let gram_side = top(lambda.adjoint() * lambda);
    let family_side = top(lambda * lambda.adjoint());
    let denom = gram_side.abs().max(family_side.abs());
    let rel_err = if denom == 0.0 { 0.0 } else { (gram_side - family_side).abs() / denom };
    DualityReport { gram_side, family_side, rel_err, pass: rel_err <= tol }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// coefficient of determination of the log-log fit
    pub r2: f64,
}

/// Least-squares fit of `log y = slope·log x + intercept`.
pub fn exponent_fit(samples: &[(f64, f64)]) -> Result<ExponentFit, NormError> {
    if samples.len() < 3 || samples.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(NormError::DegenerateFit);
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(NormError::DegenerateFit);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ExponentFit { slope, intercept, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPrimeTuple {
    pub x: f64,
    pub r: f64,
    pub l: u64,
    pub u: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPrimeGrid {
    /// each tuple, with `X·Δ(R, ℓ, U, N/C)` when admissible
    pub entries: Vec<(DeltaPrimeTuple, Option<f64>)>,
    /// maximum over the admissible tuples; a lower bound for `Δ'`
    pub value: f64,
}

/// `max X·Δ(R, ℓ, U, N/C)` over the admissible tuples of `grid`, i.e. those
/// with `X R² ℓ U ≤ Q² k T` and `1 ≤ X ≤ C`.
pub fn delta_prime_grid(spec: &FamilySpec, n: f64, grid: &[DeltaPrimeTuple]) -> DeltaPrimeGrid {
    let budget = spec.q * spec.q * spec.k as f64 * spec.t;
    let entries: Vec<(DeltaPrimeTuple, Option<f64>)> = grid
        .iter()
        .map(|&g| {
            let ok = g.x >= 1.0 && g.x <= g.c && g.r >= 1.0 && g.l >= 1 && g.u > 0.0
                && g.x * g.r * g.r * g.l as f64 * g.u <= budget * (1.0 + 1e-12);
            let v = ok.then(|| {
                g.x * delta(&FamilySpec { q: g.r, k: g.l, t: g.u, parity: spec.parity }, n / g.c).value
            });
            (g, v)
        })
        .collect();
    let value = entries.iter().filter_map(|e| e.1).fold(0.0, f64::max);
    DeltaPrimeGrid { entries, value }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityOutcome {
    Witness(u64),
    NoWitness,
    ConditionsNotMet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub p_param: f64,
    pub lhs: f64,
    /// `(p, value, value is a lower bound)` for each prime tried, in order
    pub candidates: Vec<(u64, f64, bool)>,
    pub outcome: MonotonicityOutcome,
}

fn primes_in_range(p: f64) -> Vec<u64> {
    arith::primes_in(p.ceil().max(2.0) as u64, (2.0 * p).floor() as u64)
}

/// `P* log P ≥ 2 log Q` and `4 log N / (P* log P) ≤ 1/2`, `P*` the number of
/// primes in `[P, 2P]`.
pub fn n_aspect_conditions(q: f64, n: f64, p: f64) -> bool {
    let ps = primes_in_range(p).len() as f64;
    if ps == 0.0 || p <= 1.0 {
        return false;
    }
    let m = ps * p.ln();
    m >= 2.0 * q.max(1.0).ln() && 4.0 * n.max(1.0).ln() / m <= 0.5
}

/// `P ≥ 10`, `2P log N / (P** log P) ≤ 1/2` and `4P log Q / (P** log P) ≤ 1/2`,
/// where `P** = Σ_{p ∈ [P, 2P]} (p - 2)` counts primitive characters.
pub fn q_aspect_conditions(q: f64, n: f64, p: f64) -> bool {
    if p < 10.0 {
        return false;
    }
    let pss: f64 = primes_in_range(p).iter().map(|&x| (x - 2) as f64).sum();
    if pss == 0.0 {
        return false;
    }
    let m = pss * p.ln();
    2.0 * p * n.max(1.0).ln() / m <= 0.5 && 4.0 * p * q.max(1.0).ln() / m <= 0.5
}

pub fn smallest_admissible_p_n(q: f64, n: f64) -> u64 {
    (2..).find(|&p| n_aspect_conditions(q, n, p as f64)).unwrap()
}

pub fn smallest_admissible_p_q(q: f64, n: f64) -> u64 {
    (10..).find(|&p| q_aspect_conditions(q, n, p as f64)).unwrap()
}

/// Looks for a prime `p ∈ [P, 2P]` with `Δ(Q,k,T,N) ≤ 8 Δ(Q,k,T,Np)`.
///
/// When the `Np` window is too large for a dense solve, the right side is
/// replaced by the top eigenvalue of the principal submatrix on
/// `{(ap, b) : p ∤ b} ∪ {(a, bp) : p ∤ a}` over the `N` window, which is a
/// certified lower bound for it.
pub fn monotonicity_check_n(spec: &FamilySpec, n: f64, p: f64) -> MonotonicityReport {
    if !n_aspect_conditions(spec.q, n, p) {
        return MonotonicityReport { p_param: p, lhs: f64::NAN, candidates: vec![], outcome: MonotonicityOutcome::ConditionsNotMet };
    }
    let opts = EigenOptions::default();
    let base = enumerate_pairs(n, Window::Dyadic, 1);
    let lhs = delta_on_index(spec, &base, Route::Auto, &opts).value;
    let mut candidates = Vec::new();
    for prime in primes_in_range(p) {
        let full = enumerate_pairs(n * prime as f64, Window::Dyadic, 1);
        let (value, bound) = if full.len() <= DENSE_LIMIT {
            (delta_on_index(spec, &full, Route::PairDense, &opts).value, false)
        } else {
            let mut sub: Vec<CoprimePair> = base.iter().filter(|c| c.b % prime != 0).map(|c| CoprimePair { a: c.a * prime, b: c.b }).collect();
            sub.extend(base.iter().filter(|c| c.a % prime != 0).map(|c| CoprimePair { a: c.a, b: c.b * prime }));
            (delta_on_index(spec, &sub, Route::PairDense, &opts).value, true)
        };
        candidates.push((prime, value, bound));
        if lhs <= 8.0 * value * (1.0 + 1e-12) {
            return MonotonicityReport { p_param: p, lhs, candidates, outcome: MonotonicityOutcome::Witness(prime) };
        }
    }
    MonotonicityReport { p_param: p, lhs, candidates, outcome: MonotonicityOutcome::NoWitness }
}

/// Looks for a prime `p ∈ [P, 2P]` with `Δ(Q,k,T,N) ≤ 8 Δ(Qp,k,T,N)`.
pub fn monotonicity_check_q(spec: &FamilySpec, n: f64, p: f64) -> MonotonicityReport {
    if !q_aspect_conditions(spec.q, n, p) {
        return MonotonicityReport { p_param: p, lhs: f64::NAN, candidates: vec![], outcome: MonotonicityOutcome::ConditionsNotMet };
    }
    let opts = EigenOptions::default();
    let base = enumerate_pairs(n, Window::Dyadic, 1);
    let lhs = delta_on_index(spec, &base, Route::Auto, &opts).value;
    let mut candidates = Vec::new();
    for prime in primes_in_range(p) {
        let big = FamilySpec { q: spec.q * prime as f64, ..*spec };
        let value = delta_on_index(&big, &base, Route::Auto, &opts).value;
        candidates.push((prime, value, false));
        if lhs <= 8.0 * value * (1.0 + 1e-12) {
            return MonotonicityReport { p_param: p, lhs, candidates, outcome: MonotonicityOutcome::Witness(prime) };
        }
    }
    MonotonicityReport { p_param: p, lhs, candidates, outcome: MonotonicityOutcome::NoWitness }
}
