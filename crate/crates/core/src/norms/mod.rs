//! Gram matrices of the large-sieve families and their top eigenvalues.
//!
//! For a family `f` with coefficients `λ_f(n)` on an index set of coprime
//! pairs or rationals, the norm `max_{|α|=1} Σ_f |Σ_n α_n λ_f(n)|²` is the top
//! eigenvalue of `G[n,m] = Σ_f λ_f(n) conj(λ_f(m))`. The multiplicative family
//! also integrates over `t ∈ [T/2, T]`, which is done in closed form.

mod dump;
mod eigen;
mod experiments;
mod gram;

pub use dump::{read_gram_binary, write_gram_binary, write_gram_csv, GRAM_MAGIC};
pub use eigen::{eigenvalues_dense, top_eigenvalue, EigenMethod, EigenOptions, NormEstimate, DEFAULT_SEED};
pub use experiments::{
    additive_lambda_matrix, delta, delta_add, delta_on_index, delta_prime_grid, delta_rational, duality_check,
    exponent_fit, monotonicity_check_n, monotonicity_check_q, n_aspect_conditions, q_aspect_conditions,
    smallest_admissible_p_n, smallest_admissible_p_q, DeltaPrimeGrid, DeltaPrimeTuple, DualityReport, ExponentFit,
    MonotonicityOutcome, MonotonicityReport, Route,
};
pub use gram::{
    family_members, family_moduli, gram_additive, gram_additive_on, gram_bruteforce, gram_multiplicative,
    gram_rational, i_t, GramMatrix,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("matrix is not Hermitian (max |G - G*| = {0})")]
    NotHermitian(f64),
    #[error("exponent fit needs at least 3 samples with positive values and distinct parameters")]
    DegenerateFit,
    #[error("malformed Gram dump: {0}")]
    BadDump(String),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parity {
    #[default]
    Any,
    Even,
    Odd,
}

impl Parity {
    /// `ε` in the projector `(1 + ε ψ(-1))/2`, or `None` for no restriction.
    pub fn sign(self) -> Option<f64> {
        match self {
            Parity::Any => None,
            Parity::Even => Some(1.0),
            Parity::Odd => Some(-1.0),
        }
    }
}

/// Family of `λ_{χθ,t}(a,b) = χθ(a) conj(χθ(b)) (a/b)^{it}` with `Q/2 < q ≤ Q`,
/// `gcd(q, k) = 1`, `χ` primitive mod `q`, `θ` mod `k`, `t ∈ [T/2, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub q: f64,
    pub k: u64,
    pub t: f64,
    pub parity: Parity,
}

impl FamilySpec {
    pub fn new(q: f64, k: u64, t: f64) -> Self {
        FamilySpec { q, k, t, parity: Parity::Any }
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }
}
