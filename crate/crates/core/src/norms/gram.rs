use super::{FamilySpec, Parity};
use crate::arith::{self, gcd};
use crate::characters::{char_group, DirichletChar};
use crate::quad;
use crate::rationals::{enumerate_pairs, CoprimePair, RationalPoint, Window};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Hermitian Gram matrix with its index labels.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub labels: Vec<RationalPoint>,
    pub m: DMatrix<Complex64>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `max |G[i,j] - conj G[j,i]|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Principal submatrix on the given positions.
    pub fn principal(&self, rows: &[usize]) -> GramMatrix {
        let m = DMatrix::from_fn(rows.len(), rows.len(), |i, j| self.m[(rows[i], rows[j])]);
        GramMatrix { labels: rows.iter().map(|&i| self.labels[i]).collect(), m }
    }
}

/// Builds the upper triangle row by row in parallel and mirrors it, so the
/// result is exactly Hermitian.
fn assemble<F>(labels: Vec<RationalPoint>, entry: F) -> GramMatrix
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    let n = labels.len();
    let rows: Vec<Vec<Complex64>> = (0..n).into_par_iter().map(|i| (i..n).map(|j| entry(i, j)).collect()).collect();
    let mut m = DMatrix::from_element(n, n, ZERO);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, z) in row.into_iter().enumerate() {
            let j = i + off;
            if i == j {
                m[(i, i)] = Complex64::new(z.re, 0.0);
            } else {
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
    }
    GramMatrix { labels, m }
}

/// `I_T(L) = ∫_{T/2}^{T} e^{itL} dt = e^{3iTL/4} · 2 sin(TL/4) / L`.
pub fn i_t(l: f64, t: f64) -> Complex64 {
    let x = t * l / 4.0;
    let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 + x.powi(4) / 120.0 } else { x.sin() / x };
    Complex64::from_polar(0.5 * t * sinc, 3.0 * x)
}

/// Moduli `q` with `Q/2 < q ≤ Q` and `gcd(q, k) = 1`.
pub fn family_moduli(q: f64, k: u64) -> Vec<u64> {
    let top = q.floor().max(0.0) as u64;
    (1..=top).filter(|&m| 2.0 * m as f64 > q && gcd(m, k) == 1).collect()
}

/// Every `ψ = χθ` modulo `qk` in the family, parity filter applied.
pub fn family_members(spec: &FamilySpec) -> Vec<DirichletChar> {
    let thetas: Vec<DirichletChar> = char_group(spec.k).iter().collect();
    let mut out = Vec::new();
    for q in family_moduli(spec.q, spec.k) {
        for chi in char_group(q).primitive() {
            for theta in &thetas {
                let psi = chi.crt_product(theta).expect("coprime moduli");
                let keep = match spec.parity {
                    Parity::Any => true,
                    Parity::Even => !psi.is_odd(),
                    Parity::Odd => psi.is_odd(),
                };
                if keep {
                    out.push(psi);
                }
            }
        }
    }
    out
}

fn pair_labels(index: &[CoprimePair]) -> Vec<RationalPoint> {
    index.iter().map(|&p| p.into()).collect()
}

/// `Σ_{χ primitive mod q} χ(u) conj χ(v)` for `gcd(uv, q) = 1`, from the
/// divisor weights; `u`, `v` may be negative.
fn primitive_sum(weights: &[(u64, i64)], u: i128, v: i128) -> i64 {
    weights.iter().filter(|&&(d, _)| (u - v).rem_euclid(d as i128) == 0).map(|&(_, w)| w).sum()
}

/// Closed form of the multiplicative-family Gram matrix on `index`.
pub fn gram_multiplicative(spec: &FamilySpec, index: &[CoprimePair]) -> GramMatrix {
    let moduli: Vec<(u64, Vec<(u64, i64)>)> =
        family_moduli(spec.q, spec.k).into_iter().map(|q| (q, arith::primitive_sum_weights(q))).collect();
    let k = spec.k;
    let phi_k = arith::euler_phi(k) as f64;
    let eps = spec.parity.sign();
    let t = spec.t;
    assemble(pair_labels(index), |i, j| {
        let (n, m) = (index[i], index[j]);
        let (u, v) = (n.a * m.b, m.a * n.b);
        let uv_k = gcd(u, k) == 1 && gcd(v, k) == 1;
        if !uv_k {
            return ZERO;
        }
        let (ui, vi) = (u as i128, v as i128);
        let b_plus = if (ui - vi).rem_euclid(k as i128) == 0 { phi_k } else { 0.0 };
        let b_minus = if (ui + vi).rem_euclid(k as i128) == 0 { phi_k } else { 0.0 };
        let mut s = 0.0;
        for (q, w) in &moduli {
            if gcd(u, *q) != 1 || gcd(v, *q) != 1 {
                continue;
            }
            let plus = primitive_sum(w, ui, vi) as f64 * b_plus;
            s += match eps {
                None => plus,
                Some(e) => 0.5 * (plus + e * primitive_sum(w, ui, -vi) as f64 * b_minus),
            };
        }
        if s == 0.0 {
            return ZERO;
        }
        i_t((u as f64).ln() - (v as f64).ln(), t) * s
    })
}

/// Same matrix by explicit enumeration of the family and `nodes`-point
/// Gauss–Legendre quadrature in `t`.
pub fn gram_bruteforce(spec: &FamilySpec, index: &[CoprimePair], nodes: usize) -> GramMatrix {
    let members = family_members(spec);
    let vals: Vec<Vec<Complex64>> = members
        .iter()
        .map(|psi| index.iter().map(|p| psi.eval(p.a as i64) * psi.eval(p.b as i64).conj()).collect())
        .collect();
    let rule = quad::composite_nodes(spec.t / 2.0, spec.t, 1, nodes);
    assemble(pair_labels(index), |i, j| {
        let chars: Complex64 = vals.iter().map(|row| row[i] * row[j].conj()).sum();
        let l = (index[i].a as f64 / index[i].b as f64).ln() - (index[j].a as f64 / index[j].b as f64).ln();
        let time: Complex64 = rule.iter().map(|&(x, w)| Complex64::from_polar(w, x * l)).sum();
        chars * time
    })
}

/// Additive family `e(t·a·b̄/q)`, `Q/2 < q ≤ Q`, `t` a unit mod `q`, on the
/// dyadic window `N/2 < ab ≤ N`.
pub fn gram_additive(q: f64, n: f64) -> GramMatrix {
    gram_additive_on(q, &enumerate_pairs(n, Window::Dyadic, 1))
}

/// `G[n,m] = Σ_q [gcd(a₁b₁a₂b₂, q) = 1] c_q(a₁b̄₁ - a₂b̄₂)`.
pub fn gram_additive_on(q: f64, index: &[CoprimePair]) -> GramMatrix {
    let moduli = family_moduli(q, 1);
    let labels = pair_labels(index);
    let reds: Vec<Vec<Option<u64>>> =
        moduli.iter().map(|&q| labels.iter().map(|r| r.reduce_mod(q).ok().filter(|_| gcd(r.a, q) == 1)).collect()).collect();
    assemble(labels, |i, j| {
        let mut s = 0i64;
        for (qi, &q) in moduli.iter().enumerate() {
            if let (Some(x), Some(y)) = (reds[qi][i], reds[qi][j]) {
                s += crate::characters::ramanujan_sum(q, x as i64 - y as i64);
            }
        }
        Complex64::new(s as f64, 0.0)
    })
}

/// Rational family: all primitive `χ` modulo every `q ≤ Q`, evaluated on
/// `ℚ_(q)^×`, over `ht ≤ N` (with `-a/b` too when `signed`).
pub fn gram_rational(q: f64, n: f64, signed: bool) -> GramMatrix {
    let top = q.floor().max(0.0) as u64;
    let moduli: Vec<(u64, Vec<(u64, i64)>)> = (1..=top).map(|q| (q, arith::primitive_sum_weights(q))).collect();
    let labels = crate::rationals::enumerate_rationals(n, Window::Full, 1, signed);
    let idx = labels.clone();
    assemble(labels, |i, j| {
        let (r, s) = (idx[i], idx[j]);
        let u = r.numerator() as i128 * s.b as i128;
        let v = s.numerator() as i128 * r.b as i128;
        let mut acc = 0i64;
        for (q, w) in &moduli {
            if r.in_localization(*q, true) && s.in_localization(*q, true) {
                acc += primitive_sum(w, u, v);
            }
        }
        Complex64::new(acc as f64, 0.0)
    })
}
