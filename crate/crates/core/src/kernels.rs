//! Character combinatorics used to separate moduli: the coefficients that
//! detect primitive characters, coset systems `G_q/G_r`, the tuple set `D_k`,
//! the local factorization of a pair of primitive characters, and direct
//! checks of each decomposition. Also the tiling identity for double integrals
//! over `[T/2, T]²` against a kernel supported on `[U, 2U]`.

use crate::arith::{self, gcd};
use crate::characters::{char_group, DirichletChar};
use crate::quad;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("{r} does not divide {q}")]
    NotADivisor { r: u64, q: u64 },
    #[error("character {0} is not primitive")]
    Imprimitive(String),
}

/// Two evaluations of the same quantity and their agreement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_err: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        let scale = lhs.norm().max(rhs.norm());
        let rel_err = if scale == 0.0 { 0.0 } else { (lhs - rhs).norm() / scale };
        IdentityReport { lhs, rhs, rel_err, pass: rel_err <= tol }
    }
}

/// Reproducible table of complex numbers with real and imaginary parts in `[-1, 1)`.
pub fn random_complex_table(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Coefficients on residues mod `q` that pick out primitive characters.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitivityKernel {
    pub q: u64,
    /// indexed by residue `0..q`
    pub coeffs: Vec<Ratio<i64>>,
}

/// `c(ℓ) = Σ_{d|q} μ(d)/d · #{y mod d : 1 + (q/d)y ≡ ℓ mod q}`.
pub fn primitivity_kernel(q: u64) -> PrimitivityKernel {
    let mut coeffs = vec![Ratio::zero(); q as usize];
    for d in arith::divisors(q) {
        let mu = arith::mobius(d);
        if mu == 0 {
            continue;
        }
        let step = q / d;
        let w = Ratio::new(mu, d as i64);
        for y in 0..d {
            coeffs[((1 + step * y) % q) as usize] += w;
        }
    }
    PrimitivityKernel { q, coeffs }
}

impl PrimitivityKernel {
    pub fn abs_sum(&self) -> Ratio<i64> {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = (u64, Ratio<i64>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(l, c)| (l as u64, *c))
    }

    /// `Σ_ℓ c_ℓ ψ*(ℓ)` with `ψ*` the primitive character inducing `ψ`,
    /// taken as zero where `gcd(ℓ, cond ψ) > 1`.
    pub fn apply(&self, psi: &DirichletChar) -> Complex64 {
        assert_eq!(psi.modulus(), self.q, "kernel and character moduli differ");
        let (star, _) = psi.primitive_part();
        self.support()
            .map(|(l, c)| star.eval(l as i64) * ratio_to_f64(c))
            .sum()
    }

    /// Same sum with `ψ` itself, zero on every `ℓ` sharing a factor with `q`.
    pub fn apply_literal(&self, psi: &DirichletChar) -> Complex64 {
        self.support()
            .map(|(l, c)| psi.eval(l as i64) * ratio_to_f64(c))
            .sum()
    }
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The printed closed form `Σ_{e | (q, ℓ-1)} μ(q/e)/(q/e)` on the integers
/// `1 ≤ ℓ ≤ q+1`. It gives `φ(q)/q` at both `ℓ = 1` and `ℓ = q + 1`, so
/// folding it onto residues doubles the weight at `1 mod q`.
pub fn kernel_closed_form_on_integers(q: u64) -> Vec<(u64, Ratio<i64>)> {
    (1..=q + 1)
        .map(|l| {
            let c = arith::divisors(gcd(q, l - 1))
                .into_iter()
                .map(|e| Ratio::new(arith::mobius(q / e), (q / e) as i64))
                .sum();
            (l, c)
        })
        .collect()
}

/// A transversal of `G_q / G_r`, where `G_r` sits in `G_q` as the characters
/// of conductor dividing `r`.
#[derive(Debug, Clone)]
pub struct CosetSystem {
    pub q: u64,
    pub r: u64,
    pub reps: Vec<DirichletChar>,
}

pub fn coset_reps(q: u64, r: u64) -> Result<CosetSystem, KernelError> {
    if q % r != 0 {
        return Err(KernelError::NotADivisor { r, q });
    }
    let mut reps: Vec<DirichletChar> = Vec::new();
    for chi in char_group(q).iter() {
        let covered = reps.iter().any(|g| r % chi.mul(&g.conj()).unwrap().conductor() == 0);
        if !covered {
            reps.push(chi);
        }
    }
    Ok(CosetSystem { q, r, reps })
}

impl CosetSystem {
    /// Writes `χ = γ·ψ` with `γ` a representative (returned by position) and
    /// `ψ` a character mod `r`.
    pub fn decompose(&self, chi: &DirichletChar) -> (usize, DirichletChar) {
        for (i, g) in self.reps.iter().enumerate() {
            let rest = chi.mul(&g.conj()).unwrap();
            if self.r % rest.conductor() == 0 {
                let (star, _) = rest.primitive_part();
                return (i, star.lift(self.r).unwrap());
            }
        }
        unreachable!("representatives cover the group")
    }
}

/// Checks `Σ_{cond(χ₁χ̄₂) | r} F(χ₁, χ₂) = Σ_γ Σ_{ψ₁,ψ₂ mod r} F(γψ₁, γψ₂)`,
/// characters being passed to `f` by their position in `char_group(q)`.
pub fn coset_identity_check(
    q: u64,
    r: u64,
    f: &dyn Fn(usize, usize) -> Complex64,
    tol: f64,
) -> Result<IdentityReport, KernelError> {
    let sys = coset_reps(q, r)?;
    let g = char_group(q);
    let chars: Vec<DirichletChar> = g.iter().collect();
    let mut lhs = Complex64::zero();
    for (i, c1) in chars.iter().enumerate() {
        for (j, c2) in chars.iter().enumerate() {
            if r % c1.mul(&c2.conj()).unwrap().conductor() == 0 {
                lhs += f(i, j);
            }
        }
    }
    let lifted: Vec<DirichletChar> = char_group(r).iter().map(|psi| psi.lift(q).unwrap()).collect();
    let mut rhs = Complex64::zero();
    for gamma in &sys.reps {
        let idx: Vec<usize> = lifted.iter().map(|psi| g.index_of(&gamma.mul(psi).unwrap())).collect();
        for &i in &idx {
            for &j in &idx {
                rhs += f(i, j);
            }
        }
    }
    Ok(IdentityReport::new(lhs, rhs, tol))
}

/// `(k₀, k₁, k′, δ)` with `k₀k₁k′ = k`, `gcd(k₀, k′) = 1`, `k₁ | k′^∞`, and
/// `δ` a representative of `G_k / G_{k′}`.
#[derive(Debug, Clone)]
pub struct DkTuple {
    pub k0: u64,
    pub k1: u64,
    pub kp: u64,
    pub delta: DirichletChar,
}

/// For each `k′ | k` the split of `k/k′` is forced: `k₁` is the part of
/// `k/k′` supported on the primes of `k′`.
pub fn dk_split(k: u64, kp: u64) -> (u64, u64) {
    let m = k / kp;
    let k1: u64 = arith::factorize(m)
        .into_iter()
        .filter(|&(p, _)| kp % p == 0)
        .map(|(p, e)| p.pow(e))
        .product();
    (m / k1, k1)
}

pub fn dk_tuples(k: u64) -> Vec<DkTuple> {
    let mut out = Vec::new();
    for kp in arith::divisors(k) {
        let (k0, k1) = dk_split(k, kp);
        for delta in coset_reps(k, kp).expect("divisor").reps {
            out.push(DkTuple { k0, k1, kp, delta });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaReport {
    /// `|Σ_θ b_θ|²`
    pub direct: f64,
    /// kernel form, product characters evaluated through their primitive part
    pub v1: Complex64,
    /// conductor-restricted double sum
    pub v2: Complex64,
    /// kernel form as a sum of squares with characters vanishing off units
    pub v1_literal: Complex64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Both decompositions of `|Σ_{θ mod k} b_θ|²` over `D_k`; `b` is indexed by
/// position in `char_group(k)`.
pub fn theta_separation_check(k: u64, b: &[Complex64], tol: f64) -> ThetaReport {
    let g = char_group(k);
    assert_eq!(b.len(), g.len(), "one coefficient per character");
    let direct = b.iter().sum::<Complex64>().norm_sqr();
    let (mut v1, mut v2, mut v1_literal) = (Complex64::zero(), Complex64::zero(), Complex64::zero());
    for kp in arith::divisors(k) {
        let sub = char_group(kp);
        let kernel = primitivity_kernel(kp);
        let psis: Vec<DirichletChar> = sub.iter().collect();
        // kernel value and primitivity of every ψ mod k′, by position
        let kval: Vec<Complex64> = psis.iter().map(|p| kernel.apply(p)).collect();
        let prim: Vec<bool> = psis.iter().map(DirichletChar::is_primitive).collect();
        let diff: Vec<Vec<usize>> = psis
            .iter()
            .map(|a| psis.iter().map(|c| sub.index_of(&a.mul(&c.conj()).unwrap())).collect())
            .collect();
        let lifted: Vec<DirichletChar> = psis.iter().map(|p| p.lift(k).unwrap()).collect();
        for delta in coset_reps(k, kp).unwrap().reps {
            let bb: Vec<Complex64> = lifted.iter().map(|p| b[g.index_of(&delta.mul(p).unwrap())]).collect();
            for i in 0..psis.len() {
                for j in 0..psis.len() {
                    let term = bb[i] * bb[j].conj();
                    let d = diff[i][j];
                    v1 += term * kval[d];
                    if prim[d] {
                        v2 += term;
                    }
                }
            }
            for (l, c) in kernel.support() {
                let s: Complex64 = psis.iter().zip(&bb).map(|(p, &x)| x * p.eval(l as i64)).sum();
                v1_literal += s.norm_sqr() * ratio_to_f64(c);
            }
        }
    }
    let d = Complex64::new(direct, 0.0);
    let r1 = IdentityReport::new(d, v1, tol);
    let r2 = IdentityReport::new(d, v2, tol);
    ThetaReport {
        direct,
        v1,
        v2,
        v1_literal,
        rel_err: r1.rel_err.max(r2.rel_err),
        pass: r1.pass && r2.pass,
    }
}

/// The local splitting of a pair of moduli `q₁ = q₁′q₁⁺q₁⁻r`, `q₂ = q₂′q₂⁺q₂⁻r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModulusSplit {
    pub q1p: u64,
    pub q2p: u64,
    pub q1plus: u64,
    pub q1minus: u64,
    pub q2plus: u64,
    pub q2minus: u64,
    pub r: u64,
}

pub fn split_moduli(q1: u64, q2: u64) -> ModulusSplit {
    let mut s = ModulusSplit { q1p: 1, q2p: 1, q1plus: 1, q1minus: 1, q2plus: 1, q2minus: 1, r: 1 };
    let primes: BTreeSet<u64> = arith::factorize(q1 * q2).into_iter().map(|(p, _)| p).collect();
    for p in primes {
        let (e1, e2) = (arith::valuation(q1, p), arith::valuation(q2, p));
        let (a, b) = (p.pow(e1), p.pow(e2));
        match (e1, e2) {
            (_, 0) => s.q1p *= a,
            (0, _) => s.q2p *= b,
            _ if e1 > e2 => {
                s.q1plus *= a;
                s.q2minus *= b;
            }
            _ if e1 < e2 => {
                s.q2plus *= b;
                s.q1minus *= a;
            }
            _ => s.r *= a,
        }
    }
    s
}

impl ModulusSplit {
    /// Everything except the private parts `q₁′`, `q₂′`.
    pub fn shared(&self) -> u64 {
        self.q1plus * self.q1minus * self.q2plus * self.q2minus * self.r
    }
}

#[derive(Debug, Clone)]
pub struct ChiFactorization {
    pub split: ModulusSplit,
    pub chi1p: DirichletChar,
    pub chi1plus: DirichletChar,
    pub chi1minus: DirichletChar,
    pub chi1r: DirichletChar,
    pub chi2p: DirichletChar,
    pub chi2plus: DirichletChar,
    pub chi2minus: DirichletChar,
    pub chi2r: DirichletChar,
}

pub fn chi_factorize(chi1: &DirichletChar, chi2: &DirichletChar) -> Result<ChiFactorization, KernelError> {
    for c in [chi1, chi2] {
        if !c.is_primitive() {
            return Err(KernelError::Imprimitive(format!("{c:?}")));
        }
    }
    let s = split_moduli(chi1.modulus(), chi2.modulus());
    Ok(ChiFactorization {
        split: s,
        chi1p: chi1.project(s.q1p),
        chi1plus: chi1.project(s.q1plus),
        chi1minus: chi1.project(s.q1minus),
        chi1r: chi1.project(s.r),
        chi2p: chi2.project(s.q2p),
        chi2plus: chi2.project(s.q2plus),
        chi2minus: chi2.project(s.q2minus),
        chi2r: chi2.project(s.r),
    })
}

impl ChiFactorization {
    pub fn reconstruct(&self, i: usize) -> DirichletChar {
        let parts = match i {
            1 => [&self.chi1p, &self.chi1plus, &self.chi1minus, &self.chi1r],
            2 => [&self.chi2p, &self.chi2plus, &self.chi2minus, &self.chi2r],
            _ => panic!("index must be 1 or 2"),
        };
        parts
            .iter()
            .fold(DirichletChar::trivial(1), |acc, c| acc.crt_product(c).expect("coprime parts"))
    }

    /// `q₁′ q₂′ q₁⁺ q₂⁺ · cond(χ₁^{(r)} χ̄₂^{(r)})`.
    pub fn predicted_conductor(&self) -> u64 {
        let s = &self.split;
        let rr = self.chi1r.mul(&self.chi2r.conj()).expect("same modulus r").conductor();
        s.q1p * s.q2p * s.q1plus * s.q2plus * rr
    }
}

/// Checks `|Σ_{q,χ} b_χ|²` against the decomposition over
/// `(q₁^±, q₂^±, r)` and `(r₀, r₁, r′, γ) ∈ D_r`, with the two inner sums
/// coupled only through `gcd(q₁′, q₂′) = 1` and primitivity of `ψ₁ψ̄₂` mod `r′`.
/// `b` is read only on primitive characters of the listed moduli.
pub fn chiseparation_check(moduli: &[u64], b: &dyn Fn(&DirichletChar) -> Complex64, tol: f64) -> IdentityReport {
    let moduli: BTreeSet<u64> = moduli.iter().copied().collect();
    let direct: Complex64 = moduli
        .iter()
        .flat_map(|&q| char_group(q).primitive().collect::<Vec<_>>())
        .map(|c| b(&c))
        .sum();
    let lhs = Complex64::new(direct.norm_sqr(), 0.0);

    let mut keys = BTreeSet::new();
    for &q1 in &moduli {
        for &q2 in &moduli {
            let s = split_moduli(q1, q2);
            keys.insert((s.q1plus, s.q1minus, s.q2plus, s.q2minus, s.r));
        }
    }

    let mut rhs = Complex64::zero();
    for (q1plus, q1minus, q2plus, q2minus, r) in keys {
        let shared = q1plus * q1minus * q2plus * q2minus * r;
        for t in dk_tuples(r) {
            let sub = char_group(t.kp);
            let psis: Vec<DirichletChar> = sub.iter().collect();
            let psi_prim: Vec<Vec<bool>> = psis
                .iter()
                .map(|a| psis.iter().map(|c| a.mul(&c.conj()).unwrap().is_primitive()).collect())
                .collect();
            let row = |plus: u64, minus: u64| -> Vec<(u64, usize, Complex64)> {
                let mut out = Vec::new();
                let base = plus * minus * r;
                for &q in &moduli {
                    if q % base != 0 || gcd(q / base, shared) != 1 {
                        continue;
                    }
                    let qp = q / base;
                    for cp in char_group(qp).primitive() {
                        for cplus in char_group(plus).primitive() {
                            for cminus in char_group(minus).primitive() {
                                for (pi, psi) in psis.iter().enumerate() {
                                    let g = t.delta.mul(&psi.lift(r).unwrap()).unwrap();
                                    if !g.is_primitive() {
                                        continue;
                                    }
                                    let chi = cp
                                        .crt_product(&cplus)
                                        .and_then(|c| c.crt_product(&cminus))
                                        .and_then(|c| c.crt_product(&g))
                                        .expect("coprime parts");
                                    out.push((qp, pi, b(&chi)));
                                }
                            }
                        }
                    }
                }
                out
            };
            let a1 = row(q1plus, q1minus);
            if a1.is_empty() {
                continue;
            }
            let a2 = row(q2plus, q2minus);
            for &(qp1, i1, v1) in &a1 {
                for &(qp2, i2, v2) in &a2 {
                    if gcd(qp1, qp2) == 1 && psi_prim[i1][i2] {
                        rhs += v1 * v2.conj();
                    }
                }
            }
        }
    }
    IdentityReport::new(lhs, rhs, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchimedeanReport {
    pub lhs: Complex64,
    /// tiles with `|j₁ - j₂| ≤ 2`, offset `T/2 - U`
    pub rhs: Complex64,
    /// the same tiling cut to `|j₁ - j₂| ≤ 1`
    pub rhs_band1: Complex64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Compares `∬ β(t₁) β̄(t₂) w(t₁ - t₂)` with its tiling into blocks
/// `t = T/2 - U + Uj + v`, `v ∈ [U, 2U]`. `β` is restricted to `[T/2, T]`
/// and `w` is assumed supported on `[U, 2U]`.
pub fn archimedean_coset_check(
    t: f64,
    u: f64,
    beta: &dyn Fn(f64) -> Complex64,
    w: &dyn Fn(f64) -> f64,
    tol: f64,
) -> ArchimedeanReport {
    const PANELS: usize = 24;
    const NODES: usize = 16;
    let (lo, hi) = (t / 2.0, t);
    let bt = |x: f64| if (lo..=hi).contains(&x) { beta(x) } else { Complex64::zero() };

    // x = t₁ - t₂ ∈ [U, 2U], t₂ ∈ [T/2, T - x]
    let mut lhs = Complex64::zero();
    for (x, wx) in quad::composite_nodes(u, (2.0 * u).min(hi - lo), PANELS, NODES) {
        let inner: Complex64 = quad::composite_nodes(lo, hi - x, 8, NODES)
            .into_iter()
            .map(|(s, ws)| bt(s + x) * bt(s).conj() * ws)
            .sum();
        lhs += inner * w(x) * wx;
    }

    let jmax = (10.0 * t / u).floor() as i64;
    let origin = lo - u;
    let live: Vec<i64> = (0..=jmax).filter(|&j| origin + u * j as f64 + u < hi).collect();
    let nodes_for = |j: i64| {
        let cut = hi - origin - u * j as f64;
        quad::composite_nodes_with_breaks(u, 2.0 * u, &[cut], PANELS, NODES)
    };
    let tiles: Vec<(i64, Vec<(f64, f64, Complex64)>)> = live
        .iter()
        .map(|&j| {
            let vals = nodes_for(j)
                .into_iter()
                .map(|(v, wv)| (v, wv, bt(origin + u * j as f64 + v)))
                .collect();
            (j, vals)
        })
        .collect();
    let (mut rhs, mut rhs_band1) = (Complex64::zero(), Complex64::zero());
    for (j1, t1) in &tiles {
        for (j2, t2) in &tiles {
            let dj = j1 - j2;
            if dj.abs() > 2 {
                continue;
            }
            let mut s = Complex64::zero();
            for &(v1, w1, b1) in t1 {
                if b1 == Complex64::zero() {
                    continue;
                }
                for &(v2, w2, b2) in t2 {
                    s += b1 * b2.conj() * (w(u * dj as f64 + v1 - v2) * w1 * w2);
                }
            }
            rhs += s;
            if dj.abs() <= 1 {
                rhs_band1 += s;
            }
        }
    }
    let rep = IdentityReport::new(lhs, rhs, tol);
    ArchimedeanReport { lhs, rhs, rhs_band1, rel_err: rep.rel_err, pass: rep.pass }
}

/// `exp(-1/(1-y²))` on `(lo, hi)` after mapping to `y ∈ (-1, 1)`; zero outside.
pub fn smooth_bump(lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        let y = (2.0 * x - lo - hi) / (hi - lo);
        if y.abs() < 1.0 {
            (-1.0 / (1.0 - y * y)).exp()
        } else {
            0.0
        }
    }
}
