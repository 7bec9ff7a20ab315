//! Scalar helpers: the Dirichlet series `Z_{c,d}(s) = Σ_{(n,cd)=1, m | c^∞} (n/φ(n)) (mn)^{-s}`
//! as an Euler product and as a truncated series, the exponent recursion
//! `e_{i+1} = 2 - 1/e_i`, and the trivial large-sieve bound.

use crate::arith::{self, gcd};
use num_complex::Complex64;
use num_rational::Ratio;
use thiserror::Error;

/// Series and products are only evaluated with `Re(s)` at least this far right of 1.
pub const MIN_RE_S: f64 = 1.0 + 1e-3;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SpecialsError {
    #[error("Re(s) = {0} is not > {MIN_RE_S}")]
    OutsideHalfPlane(f64),
}

fn check_s(s: Complex64) -> Result<(), SpecialsError> {
    if s.re > MIN_RE_S {
        Ok(())
    } else {
        Err(SpecialsError::OutsideHalfPlane(s.re))
    }
}

fn p_pow(p: u64, s: Complex64) -> Complex64 {
    // p^{-s}
    (-s * (p as f64).ln()).exp()
}

/// Local factor of `Z_{1,1}` at `p`: `1 + (1-1/p)^{-1} p^{-s}/(1-p^{-s})`.
fn z11_local(p: u64, s: Complex64) -> Complex64 {
    let x = p_pow(p, s);
    1.0 + x / ((1.0 - 1.0 / p as f64) * (1.0 - x))
}

/// `ν_c(s) = Π_{p|c} (1 + p^{-s-1}/(1-1/p))^{-1}`.
pub fn nu(c: u64, s: Complex64) -> Complex64 {
    arith::factorize(c)
        .into_iter()
        .map(|(p, _)| {
            let pf = p as f64;
            1.0 / (1.0 + p_pow(p, s) / pf / (1.0 - 1.0 / pf))
        })
        .product()
}

/// `δ_d(s)` relative to `c`: `Π_{p|d, p∤c} (1 + (1-1/p)^{-1} p^{-s}/(1-p^{-s}))^{-1}`.
/// Primes dividing both `c` and `d` are already accounted for by `ν_c`.
pub fn delta(d: u64, c: u64, s: Complex64) -> Complex64 {
    arith::factorize(d)
        .into_iter()
        .filter(|&(p, _)| c % p != 0)
        .map(|(p, _)| 1.0 / z11_local(p, s))
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerValue {
    pub value: Complex64,
    /// `|Z(P) - Z(2P)| / |Z(2P)|`
    pub truncation_estimate: f64,
}

fn z11_truncated(s: Complex64, cutoff: u64) -> Complex64 {
    arith::primes_up_to(cutoff).into_iter().map(|p| z11_local(p, s)).product()
}

/// `Z_{1,1}(s)` over primes `p ≤ P`, times `ν_c(s) δ_d(s)`.
pub fn z_cd_euler(c: u64, d: u64, s: Complex64, prime_cutoff: u64) -> Result<EulerValue, SpecialsError> {
    check_s(s)?;
    let corr = nu(c, s) * delta(d, c, s);
    let z = z11_truncated(s, prime_cutoff) * corr;
    let z2 = z11_truncated(s, 2 * prime_cutoff) * corr;
    Ok(EulerValue { value: z, truncation_estimate: (z - z2).norm() / z2.norm() })
}

/// Tables for evaluating truncated `Z_{c,d}(s)` series at one `s` and cutoff `M`.
pub struct ZSeries {
    s: Complex64,
    cutoff: usize,
    /// `(n/φ(n)) n^{-s}` for `n ≤ M`
    terms: Vec<Complex64>,
}

impl ZSeries {
    pub fn new(s: Complex64, cutoff: u64) -> Result<Self, SpecialsError> {
        check_s(s)?;
        let m = cutoff as usize;
        let phi = arith::phi_table(m);
        let mut terms = vec![Complex64::new(0.0, 0.0); m + 1];
        for n in 1..=m {
            terms[n] = (-s * (n as f64).ln()).exp() * (n as f64 / phi[n] as f64);
        }
        Ok(ZSeries { s, cutoff: m, terms })
    }

    /// `Σ_{m | c^∞, (n, cd) = 1, mn ≤ M} (n/φ(n)) (mn)^{-s}`.
    pub fn eval(&self, c: u64, d: u64) -> Complex64 {
        let cd = c * d;
        let mut prefix = Vec::with_capacity(self.cutoff + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for n in 1..=self.cutoff {
            if gcd(n as u64, cd) == 1 {
                acc += self.terms[n];
            }
            prefix.push(acc);
        }
        smooth_numbers(c, self.cutoff as u64)
            .into_iter()
            .map(|m| (-self.s * (m as f64).ln()).exp() * prefix[self.cutoff / m as usize])
            .sum()
    }
}

/// Integers `m ≤ bound` whose prime factors all divide `c`, i.e. `m | c^∞`.
fn smooth_numbers(c: u64, bound: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, _) in arith::factorize(c) {
        let len = out.len();
        for i in 0..len {
            let mut m = out[i] * p;
            while m <= bound {
                out.push(m);
                m *= p;
            }
        }
    }
    out
}

pub fn z_cd_series(c: u64, d: u64, s: Complex64, cutoff: u64) -> Result<Complex64, SpecialsError> {
    Ok(ZSeries::new(s, cutoff)?.eval(c, d))
}

/// `e_0, …, e_steps` with `e_0 = 2`, `e_{i+1} = 2 - 1/e_i`, exactly.
pub fn exponent_sequence(steps: usize) -> Vec<Ratio<i64>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut e = Ratio::from_integer(2i64);
    out.push(e);
    for _ in 0..steps {
        e = Ratio::from_integer(2) - e.recip();
        out.push(e);
    }
    out
}

/// `Q²kT√N + N log N`.
pub fn trivial_bound(q: f64, k: f64, t: f64, n: f64) -> f64 {
    q * q * k * t * n.sqrt() + n * n.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_products() {
        for z in [s(2.0, 0.0), s(1.5, 3.0)] {
            assert_eq!(nu(1, z), s(1.0, 0.0));
            assert_eq!(delta(1, 1, z), s(1.0, 0.0));
        }
    }

    #[test]
    fn z11_at_two_matches_series() {
        let e = z_cd_euler(1, 1, s(2.0, 0.0), 10_000).unwrap();
        let ser = z_cd_series(1, 1, s(2.0, 0.0), 1_000_000).unwrap();
        assert!((e.value - ser).norm() / ser.norm() <= 1e-4, "{e:?} {ser}");
        assert!(e.truncation_estimate < 1e-4);
    }

    #[test]
    fn z23_at_two_matches_double_series() {
        let e = z_cd_euler(2, 3, s(2.0, 0.0), 10_000).unwrap();
        // independent oracle: direct double loop over m | 2^∞ and n coprime to 6
        let phi = arith::phi_table(100_000);
        let mut ser = 0.0;
        let mut m = 1u64;
        while m <= 100_000 {
            for n in (1..=100_000 / m).filter(|&n| gcd(n, 6) == 1) {
                ser += n as f64 / phi[n as usize] as f64 / ((m * n) as f64).powi(2);
            }
            m *= 2;
        }
        assert!((e.value.re - ser).abs() / ser <= 1e-4 && e.value.im.abs() < 1e-12, "{e:?} {ser}");
    }

    #[test]
    fn printed_delta_factor_disagrees_with_series() {
        // the factor as printed, (1 + (1-1/p) p^{-s}/(1-p^{-s}))^{-1}, misses the series
        let z = s(2.0, 0.0);
        let printed: f64 = [3.0f64]
            .iter()
            .map(|&p| 1.0 / (1.0 + (1.0 - 1.0 / p) * p.powi(-2) / (1.0 - p.powi(-2))))
            .product();
        let base = z_cd_euler(2, 1, z, 10_000).unwrap().value;
        let ser = z_cd_series(2, 3, z, 200_000).unwrap();
        let rel = (base * printed - ser).norm() / ser.norm();
        assert!(rel > 1e-2, "{rel}");
    }

    #[test]
    fn partial_sums_increase() {
        let z = s(3.0, 0.0);
        let vals: Vec<f64> = [10u64, 100, 1000, 10_000].iter().map(|&m| z_cd_series(1, 1, z, m).unwrap().re).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn euler_matches_series_small_grid() {
        for z in [s(2.0, 0.0), s(3.0, 0.0), s(2.0, 1.0)] {
            let series = ZSeries::new(z, 200_000).unwrap();
            for c in 1..=10 {
                for d in 1..=10 {
                    let e = z_cd_euler(c, d, z, 10_000).unwrap().value;
                    let v = series.eval(c, d);
                    assert!((e - v).norm() / v.norm() <= 1e-4, "c={c} d={d} s={z}");
                }
            }
        }
    }

    #[test]
    fn rejects_left_half_plane() {
        assert!(z_cd_euler(1, 1, s(1.0, 0.0), 100).is_err());
        assert!(z_cd_series(1, 1, s(1.0005, 2.0), 100).is_err());
        assert!(ZSeries::new(s(0.5, 0.0), 10).is_err());
    }

    #[test]
    fn exponent_examples() {
        let e = exponent_sequence(5);
        assert_eq!(e[0], Ratio::from_integer(2));
        assert_eq!(e[1], Ratio::new(3, 2));
        assert_eq!(e[5], Ratio::new(7, 6));
    }

    #[test]
    fn exponent_closed_form() {
        let e = exponent_sequence(10_000);
        for (i, x) in e.iter().enumerate() {
            let i = i as i64;
            assert_eq!(*x, Ratio::new(i + 2, i + 1));
            assert_eq!(x - Ratio::from_integer(1), Ratio::new(1, i + 1));
        }
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn trivial_bound_examples() {
        assert_eq!(trivial_bound(1.0, 1.0, 1.0, 1.0), 1.0);
        assert_eq!(trivial_bound(3.0, 2.0, 5.0, 1.0), 90.0);
        assert!((trivial_bound(4.0, 1.0, 1.0, 16.0) - (64.0 + 16.0 * 16f64.ln())).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn euler_factorization_is_multiplicative_in_c(c1 in 1u64..30, c2 in 1u64..30, re in 1.5f64..4.0, im in -3.0f64..3.0) {
            prop_assume!(gcd(c1, c2) == 1);
            let z = s(re, im);
            let prod = nu(c1, z) * nu(c2, z);
            prop_assert!((nu(c1 * c2, z) - prod).norm() < 1e-12);
        }

        #[test]
        fn series_partial_sums_monotone_on_reals(re in 1.5f64..4.0, m in 10u64..2000) {
            let z = s(re, 0.0);
            let a = z_cd_series(1, 1, z, m).unwrap().re;
            let b = z_cd_series(1, 1, z, m + 1).unwrap().re;
            prop_assert!(b > a);
        }
    }
}
