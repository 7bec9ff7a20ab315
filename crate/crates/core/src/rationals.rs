//! Rationals indexed by coprime pairs, the heights `ht = |ab|` and
//! `Ht = max(|a|, |b|)`, the localization `ℚ_(q)` and the reduction map
//! `red_q : ℚ_(q) → ℤ/qℤ`.

use crate::arith::{self, gcd};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("{0} is not in the localization at {1}")]
    NotLocal(RationalPoint, u64),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// A pair `(a, b)` of positive integers with `gcd(a, b) = 1`, standing for `a/b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoprimePair {
    pub a: u64,
    pub b: u64,
}

impl CoprimePair {
    pub fn new(a: u64, b: u64) -> Option<Self> {
        (a > 0 && b > 0 && gcd(a, b) == 1).then_some(CoprimePair { a, b })
    }

    pub fn ht(&self) -> u64 {
        self.a * self.b
    }
}

/// A nonzero rational `±a/b` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub a: u64,
    pub b: u64,
    pub negative: bool,
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.negative { "-" } else { "" };
        write!(f, "{s}{}/{}", self.a, self.b)
    }
}

impl From<CoprimePair> for RationalPoint {
    fn from(p: CoprimePair) -> Self {
        RationalPoint { a: p.a, b: p.b, negative: false }
    }
}

impl RationalPoint {
    /// `num/den` reduced to lowest terms. `num` must be nonzero.
    pub fn new(num: i64, den: i64) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        assert!(num != 0, "zero is not in ℚ^×");
        let (na, da) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd(na, da);
        Ok(RationalPoint { a: na / g, b: da / g, negative: (num < 0) != (den < 0) })
    }

    pub fn ht(&self) -> u64 {
        self.a * self.b
    }

    #[allow(non_snake_case)]
    pub fn Ht(&self) -> u64 {
        self.a.max(self.b)
    }

    pub fn vp(&self, p: u64) -> i64 {
        arith::valuation(self.a, p) as i64 - arith::valuation(self.b, p) as i64
    }

    /// Signed numerator.
    pub fn numerator(&self) -> i64 {
        if self.negative {
            -(self.a as i64)
        } else {
            self.a as i64
        }
    }

    pub fn mul(&self, other: &RationalPoint) -> RationalPoint {
        let (a1, b2) = (self.a / gcd(self.a, other.b), other.b / gcd(self.a, other.b));
        let (a2, b1) = (other.a / gcd(other.a, self.b), self.b / gcd(other.a, self.b));
        RationalPoint { a: a1 * a2, b: b1 * b2, negative: self.negative != other.negative }
    }

    /// `v_p ≥ 0` for every `p | q`; with `strict`, `v_p = 0` (the units `ℚ_(q)^×`).
    pub fn in_localization(&self, q: u64, strict: bool) -> bool {
        if strict {
            gcd(self.a * self.b, q) == 1
        } else {
            gcd(self.b, q) == 1
        }
    }

    /// `a·b⁻¹ mod q`, signed numerator included.
    pub fn reduce_mod(&self, q: u64) -> Result<u64, RationalError> {
        let inv = arith::inv_mod(self.b % q, q).ok_or(RationalError::NotLocal(*self, q))?;
        Ok(arith::mul_mod(arith::residue(self.numerator(), q), inv, q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// `N/2 < ab ≤ N`
    Dyadic,
    /// `ab ≤ N`
    Full,
}

/// Coprime pairs with `ab` in the window and `gcd(ab, coprime_to) = 1`, in
/// a-major then b order.
pub fn enumerate_pairs(n: f64, window: Window, coprime_to: u64) -> Vec<CoprimePair> {
    let top = n.floor().max(0.0) as u64;
    let mut out = Vec::new();
    for a in 1..=top {
        if gcd(a, coprime_to) != 1 {
            continue;
        }
        for b in 1..=top / a {
            let ab = a * b;
            if window == Window::Dyadic && (2 * ab) as f64 <= n {
                continue;
            }
            if gcd(a, b) == 1 && gcd(b, coprime_to) == 1 {
                out.push(CoprimePair { a, b });
            }
        }
    }
    out
}

/// Same support as [`enumerate_pairs`] as rationals; `signed` adds `-a/b`
/// right after each `a/b`.
pub fn enumerate_rationals(n: f64, window: Window, coprime_to: u64, signed: bool) -> Vec<RationalPoint> {
    let mut out = Vec::new();
    for p in enumerate_pairs(n, window, coprime_to) {
        out.push(RationalPoint::from(p));
        if signed {
            out.push(RationalPoint { a: p.a, b: p.b, negative: true });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::char_group;
    use proptest::prelude::*;

    #[test]
    fn enumeration_examples() {
        let mut got = enumerate_pairs(4.0, Window::Dyadic, 1);
        got.sort_by_key(|p| (p.ht(), p.a));
        let want: Vec<_> = [(1, 3), (3, 1), (1, 4), (4, 1)]
            .iter()
            .map(|&(a, b)| CoprimePair::new(a, b).unwrap())
            .collect();
        assert_eq!(got, want);
        assert_eq!(enumerate_pairs(1.0, Window::Full, 1), vec![CoprimePair { a: 1, b: 1 }]);
        assert_eq!(enumerate_pairs(10.0, Window::Full, 1).len(), 23);
    }

    #[test]
    fn enumeration_order_is_a_major() {
        let ps = enumerate_pairs(200.0, Window::Dyadic, 6);
        assert!(ps.windows(2).all(|w| (w[0].a, w[0].b) < (w[1].a, w[1].b)));
        assert!(ps.iter().all(|p| gcd(p.ht(), 6) == 1 && 2 * p.ht() > 200));
    }

    #[test]
    fn pair_count_oracle() {
        // count by divisor splitting: each n has 2^ω(n) unitary coprime splittings
        let spf = arith::spf_table(10_000);
        let mut want = 0usize;
        let mut checkpoints = vec![1u64, 17, 100, 999, 10_000];
        checkpoints.reverse();
        for n in 1..=10_000u64 {
            want += 1 << arith::distinct_primes_spf(n as usize, &spf).len();
            if checkpoints.last() == Some(&n) {
                checkpoints.pop();
                assert_eq!(enumerate_pairs(n as f64, Window::Full, 1).len(), want, "N={n}");
            }
        }
    }

    #[test]
    fn heights_and_valuations() {
        let r = RationalPoint::new(3, 4).unwrap();
        assert_eq!(r.vp(2), -2);
        let s = RationalPoint::new(6, 5).unwrap();
        assert_eq!((s.ht(), s.Ht()), (30, 6));
        assert_eq!(RationalPoint::new(-4, 6).unwrap(), RationalPoint { a: 2, b: 3, negative: true });
    }

    #[test]
    fn localization_examples() {
        let half = RationalPoint::new(1, 2).unwrap();
        assert!(!half.in_localization(2, false));
        let six = RationalPoint::new(6, 1).unwrap();
        assert!(!six.in_localization(3, true));
        assert!(six.in_localization(3, false));
        assert!(RationalPoint::new(3, 4).unwrap().in_localization(5, true));
        assert!(half.in_localization(1, true));
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(RationalPoint::new(3, 4).unwrap().reduce_mod(5), Ok(2));
        for q in 1..30 {
            assert_eq!(RationalPoint::new(1, 1).unwrap().reduce_mod(q), Ok(1 % q));
        }
        assert!(RationalPoint::new(1, 2).unwrap().reduce_mod(2).is_err());
        assert_eq!(RationalPoint::new(-1, 3).unwrap().reduce_mod(7), Ok(2));
    }

    #[test]
    fn characters_factor_through_reduction() {
        let pairs = enumerate_pairs(100.0, Window::Full, 1);
        for q in 1..=30u64 {
            for chi in char_group(q).iter() {
                for p in pairs.iter().filter(|p| gcd(p.ht(), q) == 1) {
                    let red = RationalPoint::from(*p).reduce_mod(q).unwrap();
                    let d = chi.eval(red as i64) - chi.rational_eval(p.a as i64, p.b as i64);
                    assert!(d.norm() < 1e-10);
                }
            }
        }
    }

    fn rational() -> impl Strategy<Value = RationalPoint> {
        (1i64..5000, 1i64..5000, any::<bool>())
            .prop_map(|(a, b, neg)| RationalPoint::new(if neg { -a } else { a }, b).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn ht_bounded_by_square_of_height(r in rational()) {
            prop_assert!(r.ht() <= r.Ht() * r.Ht());
        }

        #[test]
        fn reduction_is_a_homomorphism(r in rational(), s in rational(), q in 1u64..200) {
            let unit = |x: &RationalPoint| {
                let bump = |mut n: u64| { while gcd(n, q) != 1 { n += 1; } n };
                RationalPoint::new(bump(x.a) as i64 * if x.negative { -1 } else { 1 }, bump(x.b) as i64).unwrap()
            };
            let (r, s) = (unit(&r), unit(&s));
            prop_assert!(r.in_localization(q, true) && s.in_localization(q, true));
            let lhs = r.mul(&s).reduce_mod(q).unwrap();
            let rhs = arith::mul_mod(r.reduce_mod(q).unwrap(), s.reduce_mod(q).unwrap(), q);
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(gcd(lhs, q), 1);
        }

        #[test]
        fn valuation_is_additive(r in rational(), s in rational(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
            prop_assert_eq!(r.mul(&s).vp(p), r.vp(p) + s.vp(p));
        }
    }
}
