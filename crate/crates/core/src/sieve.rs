//! Smallest-prime-factor sieve and the factorization helpers built on it.

use crate::error::{Error, Result};

/// Precomputed smallest prime factors for every integer up to `limit`.
///
/// Factoring an `n <= limit` costs `O(log n)` table lookups.
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Self {
        assert!(limit >= 1, "sieve limit must be positive");
        assert!(limit <= u32::MAX as u64, "sieve limit exceeds u32 range");
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let ip = i * p as usize;
                if p > spf[i] || ip > n {
                    break;
                }
                spf[ip] = p;
            }
        }
        FactorSieve { limit, spf, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::InvalidInput(format!(
                "{n} outside sieve range 1..={}",
                self.limit
            )));
        }
        Ok(())
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// Prime factorization as `(p, exponent)` pairs, ascending in `p`.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        debug_assert!(n >= 1 && n <= self.limit);
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Distinct primes dividing `n`, ascending.
    pub fn distinct_primes(&self, mut n: u64) -> Vec<u64> {
        debug_assert!(n >= 1 && n <= self.limit);
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }

    /// All positive divisors of `n`, in no particular order.
    pub fn divisors(&self, n: u64) -> Vec<u64> {
        let facs = self.factorize(n);
        let mut divs = vec![1u64];
        for (p, e) in facs {
            let len = divs.len();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                for i in 0..len {
                    divs.push(divs[i] * pe);
                }
            }
        }
        divs
    }

    /// Moebius function; 0 when `n` is not squarefree.
    pub fn mu(&self, n: u64) -> i32 {
        let mut m = n;
        let mut sign = 1i32;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        sign
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self, n: u64) -> u32 {
        self.distinct_primes(n).len() as u32
    }

    /// Number of divisors.
    pub fn tau(&self, n: u64) -> u64 {
        self.factorize(n).iter().map(|&(_, e)| (e + 1) as u64).product()
    }

    /// Euler phi.
    pub fn phi(&self, n: u64) -> u64 {
        let mut out = n;
        for p in self.distinct_primes(n) {
            out = out / p * (p - 1);
        }
        out
    }
}

/// Floor of the integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |s| s <= n) {
        r += 1;
    }
    r
}
