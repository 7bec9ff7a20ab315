//! Exact, desk-scale computations around the large sieve for Dirichlet
//! characters twisted by rationals: character arithmetic, the combinatorial
//! identities used to separate moduli, Gram matrices and their top
//! eigenvalues, and a few sieve experiments.

pub mod arith;
pub mod characters;
pub mod kernels;
pub mod norms;
pub mod quad;
pub mod rationals;
pub mod sieve;
pub mod specials;
