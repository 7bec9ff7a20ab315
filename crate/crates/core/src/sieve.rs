//! Sifted sets of rationals, the sieve density `H`, the sieve inequality
//! against the rational large-sieve norm, and the Barban–Davenport–Halberstam
//! variance over rationals with its character expansion.

use crate::arith::{self, gcd};
use crate::characters::char_group;
use crate::norms::{self, EigenOptions};
use crate::rationals::{enumerate_rationals, RationalPoint, Window};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("residue {r} is not reduced mod {p}")]
    BadResidue { p: u64, r: u64 },
    #[error("Ω_{0} covers every residue")]
    FullOmega(u64),
    #[error("missing N")]
    MissingN,
}

/// Primes with their excluded residue classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SievePlan {
    pub n: u64,
    /// `Q` when the plan file names one
    pub q: Option<u64>,
    pub omega: BTreeMap<u64, BTreeSet<u64>>,
}

impl SievePlan {
    pub fn new(n: u64, omega: BTreeMap<u64, BTreeSet<u64>>) -> Result<Self, PlanError> {
        for (&p, set) in &omega {
            if !arith::is_prime(p) {
                return Err(PlanError::NotPrime(p));
            }
            if let Some(&r) = set.iter().find(|&&r| r >= p) {
                return Err(PlanError::BadResidue { p, r });
            }
            if set.len() as u64 >= p {
                return Err(PlanError::FullOmega(p));
            }
        }
        Ok(SievePlan { n, q: None, omega })
    }

    /// Lines `N=…`, `Q=…` and `p: r1,r2,…`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, PlanError> {
        let mut n = None;
        let mut q = None;
        let mut omega = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| PlanError::Parse(i + 1, msg.to_string());
            let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad(&format!("not an integer: {s:?}")));
            if let Some((key, val)) = line.split_once('=') {
                match key.trim() {
                    "N" => n = Some(num(val)?),
                    "Q" => q = Some(num(val)?),
                    other => return Err(bad(&format!("unknown key {other:?}"))),
                }
            } else if let Some((p, rs)) = line.split_once(':') {
                let p = num(p)?;
                let set: BTreeSet<u64> =
                    rs.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<_, _>>()?;
                omega.insert(p, set);
            } else {
                return Err(bad("expected `key=value` or `p: residues`"));
            }
        }
        let mut plan = SievePlan::new(n.ok_or(PlanError::MissingN)?, omega)?;
        plan.q = q;
        Ok(plan)
    }

    /// `h(p) = ω(p)/(p - ω(p))`, zero off the plan.
    pub fn h(&self, p: u64) -> BigRational {
        match self.omega.get(&p) {
            Some(set) => BigRational::new(BigInt::from(set.len()), BigInt::from(p - set.len() as u64)),
            None => BigRational::zero(),
        }
    }
}

/// Positive rationals of height at most `N` avoiding `Ω_p` at every plan
/// prime `p` where `v_p = 0`.
pub fn sifted_set(plan: &SievePlan) -> Vec<RationalPoint> {
    enumerate_rationals(plan.n as f64, Window::Full, 1, false)
        .into_par_iter()
        .filter(|r| {
            plan.omega.iter().all(|(&p, set)| r.vp(p) != 0 || !set.contains(&r.reduce_mod(p).expect("unit at p")))
        })
        .collect()
}

/// `H = Σ_{q ≤ Q squarefree} Π_{p | q} h(p)`.
pub fn big_h(q: u64, plan: &SievePlan) -> BigRational {
    // only q built from plan primes contribute
    let mut terms: Vec<(u64, BigRational)> = vec![(1, BigRational::one())];
    for &p in plan.omega.keys() {
        let hp = plan.h(p);
        if hp.is_zero() {
            continue;
        }
        let len = terms.len();
        for i in 0..len {
            let m = terms[i].0 * p;
            if m <= q {
                let v = &terms[i].1 * &hp;
                terms.push((m, v));
            }
        }
    }
    terms.into_iter().map(|(_, v)| v).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftedReport {
    pub sifted: usize,
    pub h: BigRational,
    pub delta: f64,
    /// `1_S* G 1_S / |S|`, the Rayleigh quotient at the indicator of `S`
    pub indicator_quotient: f64,
    /// `|S|·H / Δ`
    pub ratio: f64,
    /// `ratio > 1 + 1e-6`
    pub violation: bool,
    /// elements of `S` with `v_p ≠ 0` at some prime with nonempty `Ω_p`, which
    /// the sieve condition does not constrain
    pub exempt: usize,
    /// `(|S| - exempt)·H / Δ`; at most 1 by the classical argument
    pub unit_ratio: f64,
}

pub const RATIO_SLACK: f64 = 1e-6;

/// `|S|`, `H` and the rational norm `Δ(Q, N)`; `Δ` is the larger of the top
/// eigenvalue and the indicator Rayleigh quotient, both lower bounds for it.
pub fn sieve_inequality_report(plan: &SievePlan, q: u64) -> SiftedReport {
    let s = sifted_set(plan);
    let h = big_h(q, plan);
    let g = norms::gram_rational(q as f64, plan.n as f64, false);
    let eig = norms::top_eigenvalue(&g.m, &EigenOptions::default()).expect("Gram matrices are Hermitian").value;
    let members: HashSet<RationalPoint> = s.iter().copied().collect();
    let pos: Vec<usize> = g.labels.iter().enumerate().filter(|(_, r)| members.contains(r)).map(|(i, _)| i).collect();
    // Gram entries are integers, so the sum is exact
    let total: f64 = pos.iter().flat_map(|&i| pos.iter().map(move |&j| (i, j))).map(|(i, j)| g.m[(i, j)].re).sum();
    let indicator_quotient = if s.is_empty() { 0.0 } else { total / s.len() as f64 };
    let delta = eig.max(indicator_quotient);
    let hf = h.to_f64().unwrap();
    let ratio = if s.is_empty() { 0.0 } else { s.len() as f64 * hf / delta };
    let exempt = s.iter().filter(|r| plan.omega.iter().any(|(&p, set)| !set.is_empty() && r.vp(p) != 0)).count();
    let unit_ratio = if s.is_empty() { 0.0 } else { (s.len() - exempt) as f64 * hf / delta };
    SiftedReport {
        sifted: s.len(),
        h,
        delta,
        indicator_quotient,
        ratio,
        violation: ratio > 1.0 + RATIO_SLACK,
        exempt,
        unit_ratio,
    }
}

/// A random plan: `N ∈ [10, max_n]`, `Q ∈ [1, max_q]`, each prime `p ≤ Q`
/// kept with probability 1/2 and given a random set of unit residues of size
/// below `p - 1`.
pub fn random_plan(seed: u64, max_n: u64, max_q: u64) -> (SievePlan, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(10..=max_n);
    let q = rng.random_range(1..=max_q);
    let mut omega = BTreeMap::new();
    for p in arith::primes_up_to(q) {
        if rng.random_bool(0.5) {
            let units: Vec<u64> = (1..p).collect();
            let size = rng.random_range(0..=(p - 2) as usize);
            omega.insert(p, units.choose_multiple(&mut rng, size).copied().collect());
        }
    }
    (SievePlan::new(n, omega).expect("valid by construction"), q)
}

/// `Ω_p` a set of `⌊(p-1)/2⌋` unit residues for every `p ≤ ⌊√N⌋`; returns the
/// plan and `Q = ⌊√N⌋`.
pub fn half_residue_plan(n: u64, seed: u64) -> (SievePlan, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = (n as f64).sqrt().floor() as u64;
    let omega = arith::primes_up_to(q)
        .into_iter()
        .map(|p| {
            let units: Vec<u64> = (1..p).collect();
            (p, units.choose_multiple(&mut rng, ((p - 1) / 2) as usize).copied().collect())
        })
        .collect();
    (SievePlan::new(n, omega).expect("valid by construction"), q)
}

/// Coefficients `α_n` on positive rationals of height at most `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct BdhInput {
    pub x: u64,
    pub q: u64,
    pub alpha: Vec<(RationalPoint, Complex64)>,
}

impl BdhInput {
    /// Drops entries that are negative or above height `X`.
    pub fn new(x: u64, q: u64, alpha: Vec<(RationalPoint, Complex64)>) -> Self {
        let alpha = alpha.into_iter().filter(|(r, _)| !r.negative && r.ht() <= x).collect();
        BdhInput { x, q, alpha }
    }

    /// Random complex `α` on the whole height ball.
    pub fn random(x: u64, q: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = enumerate_rationals(x as f64, Window::Full, 1, false)
            .into_iter()
            .map(|r| (r, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        BdhInput { x, q, alpha }
    }
}

/// `Σ_{q ≤ Q} Σ_{a ∈ (ℤ/q)^×} |Σ_{n ≡ a} α_n - (1/φ(q)) Σ_{n ∈ ℚ_(q)^×} α_n|²`.
pub fn bdh_lhs(input: &BdhInput) -> f64 {
    (1..=input.q)
        .into_par_iter()
        .map(|q| {
            let mut classes = vec![Complex64::new(0.0, 0.0); q as usize];
            let mut total = Complex64::new(0.0, 0.0);
            for (r, a) in &input.alpha {
                if r.in_localization(q, true) {
                    classes[r.reduce_mod(q).unwrap() as usize] += a;
                    total += a;
                }
            }
            let mean = total / arith::euler_phi(q) as f64;
            (0..q).filter(|&a| gcd(a, q) == 1).map(|a| (classes[a as usize] - mean).norm_sqr()).sum::<f64>()
        })
        .sum()
}

/// `Σ_{q ≤ Q} (1/φ(q)) Σ_{χ ≠ χ₀ mod q} |Σ_n α_n χ(n)|²` over `n ∈ ℚ_(q)^×`.
pub fn bdh_rhs_chars(input: &BdhInput) -> f64 {
    (1..=input.q)
        .into_par_iter()
        .map(|q| {
            let local: Vec<(u64, Complex64)> = input
                .alpha
                .iter()
                .filter(|(r, _)| r.in_localization(q, true))
                .map(|(r, a)| (r.reduce_mod(q).unwrap(), *a))
                .collect();
            let s: f64 = char_group(q)
                .iter()
                .filter(|chi| !chi.is_trivial())
                .map(|chi| local.iter().map(|&(x, a)| a * chi.eval(x as i64)).sum::<Complex64>().norm_sqr())
                .sum();
            s / arith::euler_phi(q) as f64
        })
        .sum()
}
