//! Elementary integer number theory: factorization, divisors, Möbius μ,
//! the Legendre symbol and generalized binomial coefficients.
//!
//! Everything here works on machine integers except [`binomial_int`], whose
//! values grow without bound and are returned as [`BigInt`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Canonical prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of divisors, `∏(e_i + 1)`.
    pub fn divisor_count(&self) -> usize {
        self.factors.iter().map(|&(_, e)| e as usize + 1).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

/// Trial-division factorization.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { value: n, factors })
}

pub fn mobius(n: u64) -> Result<i8> {
    let f = factor(n)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.factors.len() % 2 == 0 { 1 } else { -1 })
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factor(n)?;
    let mut out = vec![1u64];
    for &(p, e) in &f.factors {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes strictly below `bound` (sieve of Eratosthenes).
pub fn primes_below(bound: usize) -> Vec<u64> {
    let spf = smallest_prime_factors(bound);
    (2..bound).filter(|&n| spf[n] == n as u64).map(|n| n as u64).collect()
}

/// Smallest-prime-factor table for `0..bound`; entries 0 and 1 are 0 and 1.
pub fn smallest_prime_factors(bound: usize) -> Vec<u64> {
    let mut spf: Vec<u64> = (0..bound as u64).collect();
    let mut i = 2;
    while i * i < bound {
        if spf[i] == i as u64 {
            let mut j = i * i;
            while j < bound {
                if spf[j] == j as u64 {
                    spf[j] = i as u64;
                }
                j += i;
            }
        }
        i += 1;
    }
    spf
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(r, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

/// Sum of divisors σ₁(n).
pub fn sigma1(n: u64) -> Result<u64> {
    Ok(divisors(n)?.into_iter().sum())
}

/// `C(g, k) = g(g-1)…(g-k+1)/k!` for any integer `g`, so that
/// `(1 - x)^g = Σ_k C(g, k) (-x)^k` formally.
pub fn binomial_int(g: &BigInt, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        if c.is_zero() {
            break;
        }
        // C(g, i+1) = C(g, i)·(g - i)/(i + 1), exact at every step
        c *= g - BigInt::from(i);
        let (q, r) = c.div_rem(&BigInt::from(i + 1));
        debug_assert!(r.is_zero());
        c = q;
    }
    c
}
