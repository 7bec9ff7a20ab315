//! Elementary arithmetic functions on `u64`: factorization, Möbius, totient,
//! divisors, modular inverses and small prime tables.

use num_integer::Integer;

/// Trial-division factorization. Returns `(prime, exponent)` pairs with
/// strictly increasing primes; empty for `n = 1`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize(0)");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in the closed interval `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&p| p >= lo).collect()
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

/// Number of divisors.
pub fn tau(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn radical(n: u64) -> u64 {
    factorize(n).iter().map(|&(p, _)| p).product()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// `n mod m` for signed `n`, in `0..m`.
pub fn residue(n: i64, m: u64) -> u64 {
    n.rem_euclid(m as i64) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`. Modulo 1 the inverse is 0.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Smallest-prime-factor table for `0..=n`.
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Euler totient for `0..=n` by sieve.
pub fn phi_table(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}

/// Distinct primes of `n` read off an spf table.
pub fn distinct_primes_spf(mut n: usize, spf: &[u32]) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n] as usize;
        out.push(p as u64);
        while n % p == 0 {
            n /= p;
        }
    }
    out
}

/// Prime-power factorization read off an spf table.
pub fn factorize_spf(mut n: usize, spf: &[u32]) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n] as usize;
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p as u64, e));
    }
    out
}

/// Precomputed `(d, μ(q/d)·φ(d))` over the divisors `d | q` with `μ(q/d) ≠ 0`.
/// Summing `weight · [u ≡ v mod d]` gives the primitive-character sum
/// `Σ_{χ primitive mod q} χ(u) χ̄(v)` for `gcd(uv, q) = 1`.
pub fn primitive_sum_weights(q: u64) -> Vec<(u64, i64)> {
    divisors(q)
        .into_iter()
        .filter_map(|d| {
            let m = mobius(q / d);
            (m != 0).then(|| (d, m * euler_phi(d) as i64))
        })
        .collect()
}

/// Number of primitive characters modulo `q`.
pub fn primitive_count(q: u64) -> u64 {
    primitive_sum_weights(q).iter().map(|&(_, w)| w).sum::<i64>() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(45), 24);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(tau(12), 6);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(inv_mod(4, 5), Some(4));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(primes_in(11, 26), vec![11, 13, 17, 19, 23]);
    }

    #[test]
    fn tables_agree_with_direct() {
        let spf = spf_table(500);
        let phi = phi_table(500);
        for n in 1..=500u64 {
            assert_eq!(phi[n as usize], euler_phi(n));
            assert_eq!(factorize_spf(n as usize, &spf), factorize(n));
        }
    }

    #[test]
    fn primitive_counts() {
        // φ(q) = Σ_{d|q} #primitive(d)
        for q in 1..200u64 {
            let s: u64 = divisors(q).into_iter().map(primitive_count).sum();
            assert_eq!(s, euler_phi(q));
        }
        assert_eq!(primitive_count(2), 0);
        assert_eq!(primitive_count(9), 4);
    }
}
