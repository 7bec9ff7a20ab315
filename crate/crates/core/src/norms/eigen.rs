use super::NormError;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const DEFAULT_SEED: u64 = 0x5eed_1a2b;

/// Largest dimension handled by a full dense eigensolve in `Auto` mode.
pub const DENSE_LIMIT: usize = 512;
/// Largest dimension the power route may fall back to a dense solve on.
const FALLBACK_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Auto,
    Dense,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub method: EigenMethod,
    /// Relative residual target for power iteration.
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { method: EigenMethod::Auto, tol: 1e-10, seed: DEFAULT_SEED, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// `‖Gv - λv‖ / max(|λ|, 1)` at the returned vector, or a quadrature
    /// refinement difference for the family-side route.
    pub residual: f64,
    pub iterations: usize,
    pub method: String,
    pub seed: u64,
    pub converged: bool,
    /// `value` is only a certified lower bound for the quantity asked for.
    pub lower_bound: bool,
}

impl NormEstimate {
    pub(crate) fn zero() -> Self {
        NormEstimate {
            value: 0.0,
            residual: 0.0,
            iterations: 0,
            method: "empty".into(),
            seed: 0,
            converged: true,
            lower_bound: false,
        }
    }
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_dense(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<(), NormError> {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if worst > 1e-12 * scale.max(1.0) || m.ncols() != n {
        return Err(NormError::NotHermitian(worst));
    }
    Ok(())
}

/// Top eigenvalue of a Hermitian matrix.
pub fn top_eigenvalue(m: &DMatrix<Complex64>, opts: &EigenOptions) -> Result<NormEstimate, NormError> {
    check_hermitian(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(NormEstimate::zero());
    }
    let dense = match opts.method {
        EigenMethod::Dense => true,
        EigenMethod::Power => false,
        EigenMethod::Auto => n <= DENSE_LIMIT,
    };
    if dense {
        return Ok(dense_top(m));
    }
    let est = power(m, opts, 0.0);
    if est.value < 0.0 {
        // a negative eigenvalue dominates; shift it out of the way
        let est2 = power(m, opts, -est.value);
        return Ok(fallback_if_stuck(m, est2, opts));
    }
    Ok(fallback_if_stuck(m, est, opts))
}

fn fallback_if_stuck(m: &DMatrix<Complex64>, est: NormEstimate, opts: &EigenOptions) -> NormEstimate {
    if est.converged || m.nrows() > FALLBACK_LIMIT || opts.method == EigenMethod::Power {
        return est;
    }
    let mut d = dense_top(m);
    d.iterations = est.iterations;
    d.method = "power+dense".into();
    d
}

fn dense_top(m: &DMatrix<Complex64>) -> NormEstimate {
    let eig = SymmetricEigen::new(m.clone());
    let (i, &lam) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
    let v = eig.eigenvectors.column(i).into_owned();
    let r = (m * &v - v.map(|z| z * lam)).norm() / lam.abs().max(1.0);
    NormEstimate {
        value: lam,
        residual: r,
        iterations: 0,
        method: "dense".into(),
        seed: 0,
        converged: true,
        lower_bound: false,
    }
}

fn matvec(m: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    // G = G*, so row i of G·v is the conjugated column i dotted with v
    let out: Vec<Complex64> = (0..m.ncols()).into_par_iter().map(|i| m.column(i).dotc(v)).collect();
    DVector::from_vec(out)
}

fn power(m: &DMatrix<Complex64>, opts: &EigenOptions, shift: f64) -> NormEstimate {
    let n = m.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = DVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    v /= Complex64::new(v.norm(), 0.0);
    let mut best = f64::NEG_INFINITY;
    let mut best_res = f64::INFINITY;
    let mut last_check = f64::INFINITY;
    let mut converged = false;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let gv = matvec(m, &v);
        let rho = v.dotc(&gv).re;
        let res = (&gv - v.map(|z| z * rho)).norm() / rho.abs().max(1.0);
        if rho > best {
            best = rho;
            best_res = res;
        }
        if res <= opts.tol || gv.norm() == 0.0 {
            converged = true;
            best = rho;
            best_res = res;
            break;
        }
        if it % 200 == 0 {
            // stagnation: residual has not halved over the last window
            if res > 0.5 * last_check {
                break;
            }
            last_check = res;
        }
        let w = gv + v.map(|z| z * shift);
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        v = w / Complex64::new(norm, 0.0);
    }
    NormEstimate {
        value: best,
        residual: best_res,
        iterations: it,
        method: "power".into(),
        seed: opts.seed,
        converged,
        lower_bound: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use proptest::prelude::*;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let h = &a + a.adjoint();
        h.map(|z| z * 0.5)
    }

    #[test]
    fn diagonal_and_empty() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 5.0, 2.0]).map(|x| Complex64::new(x, 0.0)));
        for method in [EigenMethod::Dense, EigenMethod::Power] {
            let e = top_eigenvalue(&d, &EigenOptions { method, ..Default::default() }).unwrap();
            assert!((e.value - 5.0).abs() < 1e-9, "{e:?}");
        }
        assert_eq!(top_eigenvalue(&DMatrix::zeros(0, 0), &EigenOptions::default()).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(matches!(top_eigenvalue(&m, &EigenOptions::default()), Err(NormError::NotHermitian(_))));
    }

    #[test]
    fn negative_dominant_spectrum() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![-10.0, 1.0, 3.0]).map(|x| Complex64::new(x, 0.0)));
        let e = top_eigenvalue(&d, &EigenOptions { method: EigenMethod::Power, ..Default::default() }).unwrap();
        assert!((e.value - 3.0).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn power_and_dense_agree_on_psd() {
        for seed in 0..10 {
            let a = random_hermitian(8, seed);
            let g = &a * &a;
            let d = top_eigenvalue(&g, &EigenOptions { method: EigenMethod::Dense, ..Default::default() }).unwrap();
            let p = top_eigenvalue(&g, &EigenOptions { method: EigenMethod::Power, tol: 1e-12, ..Default::default() }).unwrap();
            assert!((d.value - p.value).abs() <= 1e-9 * d.value, "{d:?} {p:?}");
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = random_hermitian(30, 7);
        let g = &a * &a;
        let opts = EigenOptions { method: EigenMethod::Power, seed: 42, ..Default::default() };
        assert_eq!(top_eigenvalue(&g, &opts).unwrap(), top_eigenvalue(&g, &opts).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn interlacing_for_principal_submatrices(seed in any::<u64>(), n in 2usize..12, drop in 0usize..12) {
            let a = random_hermitian(n, seed);
            let g = &a * &a;
            let keep: Vec<usize> = (0..n).filter(|&i| i != drop % n).collect();
            let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| g[(keep[i], keep[j])]);
            let full = eigenvalues_dense(&g);
            let part = eigenvalues_dense(&sub);
            prop_assert!(part.last().unwrap() <= &(full.last().unwrap() * (1.0 + 1e-12) + 1e-12));
        }
    }
}
