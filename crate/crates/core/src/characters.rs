//! Dirichlet characters as exponent vectors over a fixed generator basis of
//! `(ℤ/qℤ)^×`.
//!
//! Each odd prime power `p^e` contributes one cyclic generator: the smallest
//! primitive root modulo `p²`, which generates modulo every `p^e`. The power of
//! two contributes two slots, `-1` and `5`, with orders `(1,1)`, `(2,1)` and
//! `(2, 2^{e-2})` for `e = 1`, `e = 2` and `e ≥ 3`. Because the generators are
//! compatible across exponents, induction between `p^a | p^b` only rescales
//! exponents.
//!
//! Values are kept as exact phases `num / den` of a full turn, `den` being the
//! exponent of the group, and turned into floats only on request.

use crate::arith::{self, gcd};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("argument {n} is not coprime to the conductor {conductor}")]
    NotCoprimeToConductor { n: i64, conductor: u64 },
    #[error("modulus {target} is not a multiple of {source_modulus}")]
    NotAMultiple { source_modulus: u64, target: u64 },
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("characters have different moduli ({0} vs {1})")]
    ModulusMismatch(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredModulus {
    q: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredModulus {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        FactoredModulus { q, factors: arith::factorize(q) }
    }

    pub fn value(&self) -> u64 {
        self.q
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }
}

/// An exact root of unity `e(num/den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase {
    pub num: u64,
    pub den: u64,
}

impl Phase {
    pub const ONE: Phase = Phase { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        let num = num % den;
        let g = gcd(num, den).max(1);
        Phase { num: num / g, den: den / g }
    }

    pub fn to_complex(self) -> Complex64 {
        // quarter turns are returned exactly
        match (self.num * 4 % self.den == 0).then(|| self.num * 4 / self.den) {
            Some(0) => Complex64::new(1.0, 0.0),
            Some(1) => Complex64::new(0.0, 1.0),
            Some(2) => Complex64::new(-1.0, 0.0),
            Some(3) => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, TAU * self.num as f64 / self.den as f64),
        }
    }
}

/// Generator data for one prime power `p^e`.
#[derive(Debug)]
struct LocalGroup {
    p: u64,
    e: u32,
    pe: u64,
    /// first slot of this prime power in the flattened exponent vector
    offset: usize,
    /// slot orders: one slot for odd p, two for p = 2
    orders: Vec<u64>,
    /// discrete logs per residue mod p^e; `None` on non-units
    dlog: Vec<Option<[u32; 2]>>,
}

impl LocalGroup {
    fn new(p: u64, e: u32, offset: usize) -> Self {
        let pe = p.pow(e);
        let mut dlog = vec![None; pe as usize];
        let orders;
        if p == 2 {
            let o1 = if e >= 2 { 2 } else { 1 };
            let o2 = if e >= 3 { 1u64 << (e - 2) } else { 1 };
            orders = vec![o1, o2];
            for a in 0..o1 {
                let sign = if a == 0 { 1 } else { pe - 1 };
                let mut x = sign % pe;
                for b in 0..o2 {
                    dlog[x as usize] = Some([a as u32, b as u32]);
                    x = x * 5 % pe;
                }
            }
            if pe == 2 {
                dlog[1] = Some([0, 0]);
            }
        } else {
            let phi = pe / p * (p - 1);
            let g = primitive_root_mod_p_squared(p);
            orders = vec![phi];
            let mut x = 1u64;
            for k in 0..phi {
                dlog[x as usize] = Some([k as u32, 0]);
                x = x * g % pe;
            }
        }
        LocalGroup { p, e, pe, offset, orders, dlog }
    }

    fn slots(&self) -> usize {
        self.orders.len()
    }
}

/// Smallest primitive root modulo `p²` for odd prime `p`; it generates every
/// `(ℤ/p^e)^×`.
fn primitive_root_mod_p_squared(p: u64) -> u64 {
    let phi_p = p - 1;
    let pf: Vec<u64> = arith::factorize(phi_p).iter().map(|&(r, _)| r).collect();
    let p2 = p * p;
    (2..p)
        .find(|&g| {
            pf.iter().all(|&r| arith::pow_mod(g, phi_p / r, p) != 1) && arith::pow_mod(g, p - 1, p2) != 1
        })
        .unwrap_or(1)
}

/// Everything needed to evaluate characters of one modulus.
#[derive(Debug)]
pub struct ModulusData {
    modulus: FactoredModulus,
    locals: Vec<LocalGroup>,
    orders: Vec<u64>,
    /// exponent of the group: every character value is a `exponent`-th root of unity
    exponent: u64,
}

impl ModulusData {
    fn build(q: u64) -> Self {
        let modulus = FactoredModulus::new(q);
        let mut locals = Vec::new();
        let mut offset = 0;
        for &(p, e) in modulus.factors() {
            let local = LocalGroup::new(p, e, offset);
            offset += local.slots();
            locals.push(local);
        }
        let orders: Vec<u64> = locals.iter().flat_map(|l| l.orders.iter().copied()).collect();
        let exponent = orders.iter().fold(1, |acc, &o| arith::lcm(acc, o));
        ModulusData { modulus, locals, orders, exponent }
    }

    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    pub fn q(&self) -> u64 {
        self.modulus.q
    }

    /// `(ℤ/qℤ)^×` exponent; character phases have this denominator.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    fn local_for(&self, p: u64) -> Option<&LocalGroup> {
        self.locals.iter().find(|l| l.p == p)
    }

    /// Phase numerator (over `exponent`) of `χ(n)`, or `None` when `gcd(n, q) > 1`.
    fn phase_numerator(&self, exps: &[u64], n: i64) -> Option<u64> {
        let mut acc = 0u64;
        for local in &self.locals {
            let r = arith::residue(n, local.pe);
            let logs = local.dlog[r as usize]?;
            for (slot, &order) in local.orders.iter().enumerate() {
                let k = exps[local.offset + slot];
                if k == 0 || order == 1 {
                    continue;
                }
                let step = self.exponent / order;
                let term = arith::mul_mod(k * step % self.exponent, logs[slot] as u64, self.exponent);
                acc = (acc + term) % self.exponent;
            }
        }
        Some(acc)
    }
}

fn data_cache() -> &'static Mutex<HashMap<u64, Arc<ModulusData>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<ModulusData>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, cached generator and discrete-log data for modulus `q`.
pub fn modulus_data(q: u64) -> Arc<ModulusData> {
    if let Some(d) = data_cache().lock().unwrap().get(&q) {
        return d.clone();
    }
    let built = Arc::new(ModulusData::build(q));
    data_cache().lock().unwrap().entry(q).or_insert(built).clone()
}

#[derive(Clone)]
pub struct DirichletChar {
    data: Arc<ModulusData>,
    exps: Vec<u64>,
}

impl PartialEq for DirichletChar {
    fn eq(&self, other: &Self) -> bool {
        self.data.q() == other.data.q() && self.exps == other.exps
    }
}

impl Eq for DirichletChar {}

impl std::hash::Hash for DirichletChar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.data.q().hash(state);
        self.exps.hash(state);
    }
}

impl fmt::Debug for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ[{}]{:?}", self.data.q(), self.exps)
    }
}

impl DirichletChar {
    pub fn trivial(q: u64) -> Self {
        let data = modulus_data(q);
        let exps = vec![0; data.orders.len()];
        DirichletChar { data, exps }
    }

    /// Character with the given exponent vector; entries are reduced modulo
    /// the slot orders.
    pub fn from_exponents(q: u64, exps: &[u64]) -> Self {
        let data = modulus_data(q);
        assert_eq!(exps.len(), data.orders.len(), "exponent vector length");
        let exps = exps.iter().zip(&data.orders).map(|(&k, &o)| k % o).collect();
        DirichletChar { data, exps }
    }

    pub fn modulus(&self) -> u64 {
        self.data.q()
    }

    pub fn factored_modulus(&self) -> &FactoredModulus {
        self.data.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&k| k == 0)
    }

    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.data.orders)
            .fold(1, |acc, (&k, &o)| arith::lcm(acc, o / gcd(k, o)))
    }

    /// `χ(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        self.eval_phase(-1).is_some_and(|ph| ph.num != 0)
    }

    pub fn eval_phase(&self, n: i64) -> Option<Phase> {
        self.data
            .phase_numerator(&self.exps, n)
            .map(|num| Phase::new(num, self.data.exponent))
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        self.eval_phase(n).map_or(Complex64::new(0.0, 0.0), Phase::to_complex)
    }

    /// `χ(a)·χ̄(b)`, i.e. `χ(a b̄)` when `gcd(ab, q) = 1` and `0` otherwise.
    pub fn rational_eval(&self, a: i64, b: i64) -> Complex64 {
        match (self.eval_phase(a), self.eval_phase(b)) {
            (Some(x), Some(y)) => {
                let den = self.data.exponent;
                let xa = x.num * (den / x.den);
                let yb = y.num * (den / y.den);
                Phase::new((xa + den - yb) % den, den).to_complex()
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mul(&self, other: &DirichletChar) -> Result<DirichletChar, CharError> {
        if self.modulus() != other.modulus() {
            return Err(CharError::ModulusMismatch(self.modulus(), other.modulus()));
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.data.orders)
            .map(|((&a, &b), &o)| (a + b) % o)
            .collect();
        Ok(DirichletChar { data: self.data.clone(), exps })
    }

    pub fn conj(&self) -> DirichletChar {
        let exps = self.exps.iter().zip(&self.data.orders).map(|(&k, &o)| (o - k) % o).collect();
        DirichletChar { data: self.data.clone(), exps }
    }

    /// Product of characters of possibly different moduli, as a character
    /// modulo the lcm.
    pub fn mul_lifted(&self, other: &DirichletChar) -> DirichletChar {
        let m = arith::lcm(self.modulus(), other.modulus());
        let a = self.lift(m).expect("lcm is a multiple");
        let b = other.lift(m).expect("lcm is a multiple");
        a.mul(&b).expect("same modulus")
    }

    /// The character modulo `target` induced by `self` (multiply by the
    /// trivial character mod `target`).
    pub fn lift(&self, target: u64) -> Result<DirichletChar, CharError> {
        if target % self.modulus() != 0 {
            return Err(CharError::NotAMultiple { source_modulus: self.modulus(), target });
        }
        let tdata = modulus_data(target);
        let mut exps = vec![0u64; tdata.orders.len()];
        for tl in &tdata.locals {
            if let Some(sl) = self.data.local_for(tl.p) {
                for slot in 0..tl.slots() {
                    let (so, to) = (sl.orders[slot], tl.orders[slot]);
                    if so > 1 {
                        exps[tl.offset + slot] = self.exps[sl.offset + slot] * (to / so);
                    }
                }
            }
        }
        Ok(DirichletChar { data: tdata, exps })
    }

    /// Exponent of `p` in the conductor, from the local exponent vector.
    fn local_conductor_exponent(&self, local: &LocalGroup) -> u32 {
        let ks = &self.exps[local.offset..local.offset + local.slots()];
        if local.p == 2 {
            let (a, b) = (ks[0], ks[1]);
            if b != 0 {
                local.e - arith::valuation(b, 2)
            } else if a != 0 {
                2
            } else {
                0
            }
        } else if ks[0] == 0 {
            0
        } else {
            local.e - arith::valuation(ks[0], local.p)
        }
    }

    pub fn conductor(&self) -> u64 {
        self.data
            .locals
            .iter()
            .map(|l| l.p.pow(self.local_conductor_exponent(l)))
            .product()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// The primitive character inducing `self`, together with its modulus.
    pub fn primitive_part(&self) -> (DirichletChar, u64) {
        let cond = self.conductor();
        let cdata = modulus_data(cond);
        let mut exps = vec![0u64; cdata.orders.len()];
        for cl in &cdata.locals {
            let sl = self.data.local_for(cl.p).expect("conductor divides modulus");
            for slot in 0..cl.slots() {
                let (so, co) = (sl.orders[slot], cl.orders[slot]);
                if co > 1 {
                    exps[cl.offset + slot] = self.exps[sl.offset + slot] / (so / co);
                }
            }
        }
        (DirichletChar { data: cdata, exps }, cond)
    }

    /// Value of the inducing primitive character at `n`; defined whenever
    /// `gcd(n, conductor) = 1`, even if `n` shares factors with the modulus.
    pub fn eval_induced(&self, n: i64) -> Result<Complex64, CharError> {
        let (prim, cond) = self.primitive_part();
        match prim.eval_phase(n) {
            Some(ph) => Ok(ph.to_complex()),
            None => Err(CharError::NotCoprimeToConductor { n, conductor: cond }),
        }
    }

    /// Component at the prime `p`, as a character modulo `p^{v_p(q)}`.
    pub fn component(&self, p: u64) -> DirichletChar {
        match self.data.local_for(p) {
            None => DirichletChar::trivial(1),
            Some(l) => {
                let exps = self.exps[l.offset..l.offset + l.slots()].to_vec();
                DirichletChar::from_exponents(l.pe, &exps)
            }
        }
    }

    /// Restriction to the prime-power components of `d`, where `d | q` and
    /// `gcd(d, q/d) = 1`.
    pub fn project(&self, d: u64) -> DirichletChar {
        let mut out = DirichletChar::trivial(1);
        for &(p, _) in FactoredModulus::new(d).factors() {
            out = out.crt_product(&self.component(p)).expect("distinct primes");
        }
        out
    }

    /// The character modulo `q₁q₂` that restricts to `self` and `other` on
    /// coprime moduli `q₁`, `q₂`.
    pub fn crt_product(&self, other: &DirichletChar) -> Result<DirichletChar, CharError> {
        if gcd(self.modulus(), other.modulus()) != 1 {
            return Err(CharError::NotCoprime(self.modulus(), other.modulus()));
        }
        Ok(self.mul_lifted(other))
    }
}

/// All characters modulo `q` in a fixed mixed-radix order over the slot
/// exponents.
#[derive(Debug, Clone)]
pub struct CharGroup {
    data: Arc<ModulusData>,
}

impl CharGroup {
    pub fn modulus(&self) -> u64 {
        self.data.q()
    }

    pub fn len(&self) -> usize {
        self.data.order() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn generator_orders(&self) -> &[u64] {
        &self.data.orders
    }

    pub fn trivial(&self) -> DirichletChar {
        DirichletChar::trivial(self.modulus())
    }

    pub fn get(&self, mut idx: usize) -> DirichletChar {
        assert!(idx < self.len(), "character index out of range");
        let exps = self
            .data
            .orders
            .iter()
            .map(|&o| {
                let k = idx as u64 % o;
                idx /= o as usize;
                k
            })
            .collect();
        DirichletChar { data: self.data.clone(), exps }
    }

    pub fn index_of(&self, chi: &DirichletChar) -> usize {
        assert_eq!(chi.modulus(), self.modulus(), "character of another modulus");
        let mut idx = 0usize;
        for (&k, &o) in chi.exps.iter().zip(&self.data.orders).rev() {
            idx = idx * o as usize + k as usize;
        }
        idx
    }

    pub fn iter(&self) -> impl Iterator<Item = DirichletChar> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn primitive(&self) -> impl Iterator<Item = DirichletChar> + '_ {
        self.iter().filter(DirichletChar::is_primitive)
    }
}

pub fn char_group(q: u64) -> CharGroup {
    CharGroup { data: modulus_data(q) }
}

/// `c_q(n) = Σ_{d | gcd(q,n)} d·μ(q/d)`.
pub fn ramanujan_sum(q: u64, n: i64) -> i64 {
    let g = gcd(q, n.unsigned_abs());
    let g = if g == 0 { q } else { g };
    arith::divisors(g)
        .into_iter()
        .map(|d| d as i64 * arith::mobius(q / d))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisors, euler_phi, mobius};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// Smallest d | q such that χ(n) = 1 for every unit n ≡ 1 mod d.
    fn conductor_brute(chi: &DirichletChar) -> u64 {
        let q = chi.modulus();
        divisors(q)
            .into_iter()
            .find(|&d| {
                (0..q as i64)
                    .filter(|&n| gcd(n as u64, q) == 1 && n as u64 % d == 1 % d)
                    .all(|n| close(chi.eval(n), Complex64::new(1.0, 0.0), 1e-12))
            })
            .unwrap()
    }

    #[test]
    fn group_sizes() {
        assert_eq!(char_group(1).len(), 1);
        assert_eq!(char_group(8).len(), 4);
        let g45 = char_group(45);
        assert_eq!(g45.len(), 24);
        assert!(g45.iter().all(|c| 12 % c.order() == 0));
    }

    #[test]
    fn q45_characters_are_distinct_and_multiplicative() {
        let g = char_group(45);
        let units: Vec<i64> = (1..45i64).filter(|&n| gcd(n as u64, 45) == 1).collect();
        let tables: Vec<Vec<Complex64>> = g.iter().map(|c| (0..45).map(|n| c.eval(n)).collect()).collect();
        for t in &tables {
            for &m in &units {
                for &n in &units {
                    let mn = (m * n % 45) as usize;
                    assert!(close(t[mn], t[m as usize] * t[n as usize], 1e-12));
                }
            }
        }
        for i in 0..tables.len() {
            for j in 0..i {
                assert!(units.iter().any(|&n| !close(tables[i][n as usize], tables[j][n as usize], 1e-9)));
            }
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(char_group(12).trivial().eval(7), Complex64::new(1.0, 0.0));
        let chi4 = char_group(4).iter().find(|c| !c.is_trivial()).unwrap();
        assert_eq!(chi4.eval(3), Complex64::new(-1.0, 0.0));
        for c in char_group(12).iter() {
            assert_eq!(c.eval(4), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(char_group(12).trivial().conductor(), 1);
        let chi4 = char_group(4).iter().find(|c| !c.is_trivial()).unwrap();
        assert_eq!(chi4.conductor(), 4);
        let quad3 = char_group(3).iter().find(|c| !c.is_trivial()).unwrap();
        let induced = quad3.lift(9).unwrap();
        assert_eq!(induced.conductor(), 3);
        assert_eq!(conductor_brute(&induced), 3);
    }

    #[test]
    fn conductor_matches_brute_force() {
        for q in 1..=64u64 {
            for c in char_group(q).iter() {
                assert_eq!(c.conductor(), conductor_brute(&c), "q={q} {c:?}");
            }
        }
    }

    #[test]
    fn primitivity_examples() {
        assert!(DirichletChar::trivial(1).is_primitive());
        let t5 = DirichletChar::trivial(5);
        assert!(!t5.is_primitive());
        let (star, qs) = t5.primitive_part();
        assert_eq!(qs, 1);
        assert!(star.is_trivial());
        for p in [3u64, 5, 7, 11, 13] {
            assert!(char_group(p).iter().filter(|c| !c.is_trivial()).all(|c| c.is_primitive()));
        }
    }

    #[test]
    fn primitive_part_induces() {
        for q in 1..=60u64 {
            for c in char_group(q).iter() {
                let (star, qs) = c.primitive_part();
                assert!(star.is_primitive());
                assert_eq!(star.lift(q).unwrap(), c);
                assert_eq!(qs, c.conductor());
            }
        }
    }

    #[test]
    fn eval_induced_examples() {
        let t6 = DirichletChar::trivial(6);
        assert_eq!(t6.eval_induced(3).unwrap(), Complex64::new(1.0, 0.0));
        let quad3 = char_group(3).iter().find(|c| !c.is_trivial()).unwrap();
        let induced = quad3.lift(9).unwrap();
        assert!(induced.eval_induced(6).is_err());
        assert_eq!(induced.eval_induced(2).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn rational_eval_examples() {
        for c in char_group(7).iter() {
            assert_eq!(c.rational_eval(1, 1), Complex64::new(1.0, 0.0));
        }
        let chi4 = char_group(4).iter().find(|c| !c.is_trivial()).unwrap();
        assert_eq!(chi4.rational_eval(3, 1), Complex64::new(-1.0, 0.0));
        // order-4 character mod 5 with χ(2) = i: χ(3) = χ(2)^3 = -i, so
        // χ(2)·conj(χ(3)) = i·i = -1, matching χ(2·3⁻¹) = χ(4) = -1.
        let chi = char_group(5)
            .iter()
            .find(|c| c.eval(2) == Complex64::new(0.0, 1.0))
            .unwrap();
        assert_eq!(chi.eval(3), Complex64::new(0.0, -1.0));
        assert_eq!(chi.rational_eval(2, 3), Complex64::new(-1.0, 0.0));
        assert_eq!(chi.rational_eval(2, 3), chi.eval(4));
    }

    #[test]
    fn orthogonality_up_to_60() {
        for q in 1..=60u64 {
            let g = char_group(q);
            for w in 0..q as i64 {
                if gcd(w as u64, q) != 1 {
                    continue;
                }
                let s: Complex64 = g.iter().map(|c| c.eval(w)).sum();
                let want = if w as u64 % q == 1 % q { euler_phi(q) as f64 } else { 0.0 };
                assert!(close(s, Complex64::new(want, 0.0), 1e-10), "q={q} w={w}");
            }
        }
    }

    #[test]
    fn primitive_sum_matches_mobius_closed_form() {
        for q in 1..=60u64 {
            let g = char_group(q);
            for w in 0..q as i64 {
                if gcd(w as u64, q) != 1 {
                    continue;
                }
                let s: Complex64 = g.primitive().map(|c| c.eval(w)).sum();
                let want: i64 = divisors(q)
                    .into_iter()
                    .filter(|&d| w as u64 % d == 1 % d)
                    .map(|d| mobius(q / d) * euler_phi(d) as i64)
                    .sum();
                assert!(close(s, Complex64::new(want as f64, 0.0), 1e-10), "q={q} w={w}");
            }
        }
    }

    #[test]
    fn conductor_of_product_divides_lcm() {
        for q in 1..=40u64 {
            let g = char_group(q);
            let chars: Vec<_> = g.iter().collect();
            for a in &chars {
                for b in &chars {
                    let l = arith::lcm(a.conductor(), b.conductor());
                    assert_eq!(l % a.mul(b).unwrap().conductor(), 0);
                }
            }
        }
    }

    #[test]
    fn group_law_and_indexing() {
        let g = char_group(48);
        for (i, c) in g.iter().enumerate() {
            assert_eq!(g.index_of(&c), i);
            assert!(c.mul(&c.conj()).unwrap().is_trivial());
        }
    }

    #[test]
    fn ramanujan_examples() {
        for q in 1..=50u64 {
            assert_eq!(ramanujan_sum(q, 0), euler_phi(q) as i64);
        }
        assert_eq!(ramanujan_sum(5, 1), -1);
        assert_eq!(ramanujan_sum(12, 6), -4);
    }

    #[test]
    fn ramanujan_matches_exponential_sum() {
        for q in 1..=100u64 {
            for n in -100i64..=100 {
                let direct: Complex64 = (0..q)
                    .filter(|&t| gcd(t, q) == 1)
                    .map(|t| Complex64::from_polar(1.0, TAU * (t as f64) * (n as f64) / q as f64))
                    .sum();
                let c = ramanujan_sum(q, n) as f64;
                assert!((direct.re - c).abs() < 1e-8 && direct.im.abs() < 1e-8, "q={q} n={n}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn char_mod() -> impl Strategy<Value = DirichletChar> {
            (1u64..400).prop_flat_map(|q| {
                let n = char_group(q).len();
                (0..n).prop_map(move |i| char_group(q).get(i))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(300))]

            #[test]
            fn completely_multiplicative(chi in char_mod(), m in -5000i64..5000, n in -5000i64..5000) {
                let lhs = chi.eval(m * n);
                prop_assert!((lhs - chi.eval(m) * chi.eval(n)).norm() < 1e-10);
                let q = chi.modulus();
                if gcd(m.unsigned_abs(), q) > 1 {
                    prop_assert_eq!(chi.eval(m), Complex64::new(0.0, 0.0));
                }
                prop_assert_eq!(chi.eval(1), Complex64::new(1.0, 0.0));
                prop_assert_eq!(euler_phi(q) % chi.order(), 0);
            }

            #[test]
            fn lift_preserves_values_and_conductor(chi in char_mod(), f in 1u64..12, n in 1i64..10_000) {
                let q = chi.modulus();
                let big = chi.lift(q * f).unwrap();
                prop_assert_eq!(big.conductor(), chi.conductor());
                if gcd(n as u64, q * f) == 1 {
                    prop_assert!((big.eval(n) - chi.eval(n)).norm() < 1e-12);
                }
                if gcd(n as u64, chi.conductor()) == 1 {
                    prop_assert!((big.eval_induced(n).unwrap() - chi.eval_induced(n).unwrap()).norm() < 1e-12);
                }
            }

            #[test]
            fn crt_components_reconstruct(chi in char_mod()) {
                let mut rebuilt = DirichletChar::trivial(1);
                for &(p, _) in chi.factored_modulus().factors() {
                    rebuilt = rebuilt.crt_product(&chi.component(p)).unwrap();
                }
                prop_assert_eq!(&rebuilt, &chi);
                let cond: u64 = chi.factored_modulus().factors().iter().map(|&(p, _)| chi.component(p).conductor()).product();
                prop_assert_eq!(cond, chi.conductor());
            }
        }
    }
}
