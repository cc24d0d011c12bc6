//! The multiplicative arithmetic functions behind the local densities: three
//! phi-variants, the restricted totient `psi_{a,b,c}`, the constant `P`, the
//! product `Psi(a,b,c)`, and numerical partial-sum checks.

use crate::error::Result;
use crate::polytope::{rat, to_f64, Rat};
use crate::sieve::FactorSieve;
use num::{One, Zero};
use std::sync::OnceLock;

/// `prod_{p|n} (1 - 1/p)` as an exact rational.
pub fn phi_star(n: u64, sieve: &FactorSieve) -> Result<Rat> {
    sieve.check_range(n)?;
    let mut out = Rat::one();
    for p in sieve.distinct_primes(n) {
        out *= Rat::one() - rat(1, p as i64);
    }
    Ok(out)
}

/// `prod_{p|n} (1 - 1/p^2)` as an exact rational.
pub fn phi_dagger(n: u64, sieve: &FactorSieve) -> Result<Rat> {
    sieve.check_range(n)?;
    let mut out = Rat::one();
    for p in sieve.distinct_primes(n) {
        out *= Rat::one() - rat(1, (p * p) as i64);
    }
    Ok(out)
}

/// Single-prime factor of the third phi-variant:
/// `1 / ((1 - 1/p)(1 + 1/p - 1/p^2))`.
pub fn phi_prime_at(p: u64) -> Rat {
    let p = p as i64;
    let f = (Rat::one() - rat(1, p)) * (Rat::one() + rat(1, p) - rat(1, p * p));
    Rat::one() / f
}

/// `prod_{p|n} 1/((1 - 1/p)(1 + 1/p - 1/p^2))` as an exact rational.
pub fn phi_prime(n: u64, sieve: &FactorSieve) -> Result<Rat> {
    sieve.check_range(n)?;
    let mut out = Rat::one();
    for p in sieve.distinct_primes(n) {
        out *= phi_prime_at(p);
    }
    Ok(out)
}

/// Exact values of the basic multiplicative functions at `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultBasics {
    pub phi_star: Rat,
    pub phi_dagger: Rat,
    pub phi_prime: Rat,
    pub mu: i32,
    pub omega: u32,
    pub tau: u64,
}

pub fn multiplicative_basics(n: u64, sieve: &FactorSieve) -> Result<MultBasics> {
    sieve.check_range(n)?;
    Ok(MultBasics {
        phi_star: phi_star(n, sieve)?,
        phi_dagger: phi_dagger(n, sieve)?,
        phi_prime: phi_prime(n, sieve)?,
        mu: sieve.mu(n),
        omega: sieve.omega(n),
        tau: sieve.tau(n),
    })
}

/// `psi_{a,b,c}(n)`: zero when `gcd(n,c) > 1`, otherwise
/// `phi*(n)^2 / (phi*(gcd(n,a)) phi*(gcd(n,b)))`, exact.
pub fn psi_abc(n: u64, a: u64, b: u64, c: u64, sieve: &FactorSieve) -> Result<Rat> {
    sieve.check_range(n)?;
    let mut out = Rat::one();
    for p in sieve.distinct_primes(n) {
        if c % p == 0 {
            return Ok(Rat::zero());
        }
        let mut e = 2i32;
        if a % p == 0 {
            e -= 1;
        }
        if b % p == 0 {
            e -= 1;
        }
        for _ in 0..e {
            out *= Rat::one() - rat(1, p as i64);
        }
    }
    Ok(out)
}

/// Same as [`psi_abc`] in floating point, for large partial sums.
pub fn psi_abc_f64(n: u64, a: u64, b: u64, c: u64, sieve: &FactorSieve) -> f64 {
    let mut out = 1.0;
    for p in sieve.distinct_primes(n) {
        if c % p == 0 {
            return 0.0;
        }
        let f = 1.0 - 1.0 / p as f64;
        out *= f;
        if a % p != 0 && b % p != 0 {
            out *= f;
        } else if a % p == 0 && b % p == 0 {
            out /= f;
        }
    }
    out
}

/// Moebius convolution `(psi_{a,b,c} * mu)(n)`: supported on squarefree `n`
/// with `gcd(a,b,n) | c`; there it is
/// `mu(n) 2^(omega(n)-omega(gcd(n,abc))) (gcd(c,n)/n) prod_{p|n, p∤abc} (1 - 1/(2p))`.
pub fn psi_mu_f64(n: u64, a: u64, b: u64, c: u64, sieve: &FactorSieve) -> f64 {
    let mut out = 1.0;
    for (p, e) in sieve.factorize(n) {
        if e >= 2 {
            return 0.0;
        }
        let div_a = a % p == 0;
        let div_b = b % p == 0;
        let div_c = c % p == 0;
        if div_a && div_b && !div_c {
            return 0.0;
        }
        let pf = p as f64;
        out *= if div_c {
            -1.0
        } else if div_a || div_b {
            -1.0 / pf
        } else {
            -(2.0 / pf) * (1.0 - 1.0 / (2.0 * pf))
        };
    }
    out
}

/// `phi_sigma(n) = sum_{k|n} 2^omega(k) k^(-sigma)`.
pub fn phi_sigma(n: u64, sigma: f64, sieve: &FactorSieve) -> Result<f64> {
    sieve.check_range(n)?;
    let mut out = 1.0;
    for (p, e) in sieve.factorize(n) {
        let mut factor = 1.0;
        let mut pk = 1.0;
        for _ in 0..e {
            pk *= p as f64;
            factor += 2.0 / pk.powf(sigma);
        }
        out *= factor;
    }
    Ok(out)
}

/// Simple prime list, independent of the factor sieve.
pub(crate) fn primes_up_to(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Partial product for `P = prod_p (1 - 1/p)(1 + 1/p - 1/p^2)` over primes up
/// to `prime_limit`, with a rigorous bound on the distance to the full
/// product. Each factor is `1 - 2/p^2 + 1/p^3`, whose log is at least
/// `-3/p^2`, and `sum_{p > L} 1/p^2 < 1/(L-1)`.
pub fn constant_p(prime_limit: u64) -> (f64, f64) {
    assert!(prime_limit >= 2);
    let mut value = 1.0f64;
    for p in primes_up_to(prime_limit) {
        let pf = p as f64;
        value *= 1.0 - 2.0 / (pf * pf) + 1.0 / (pf * pf * pf);
    }
    let tail = value * (1.0 - (-3.0 / (prime_limit as f64 - 1.0)).exp());
    (value, tail)
}

/// `P` at the shared precision used by every partial-sum comparison.
pub fn cached_p() -> (f64, f64) {
    static CACHE: OnceLock<(f64, f64)> = OnceLock::new();
    *CACHE.get_or_init(|| constant_p(1_000_000))
}

/// `Psi(a,b,c) = phi*(c) phidag(abc)/phidag(gcd(a,b)c) phi'(abc)`, exact,
/// evaluated prime by prime so that the product `abc` never materializes.
pub fn capital_psi(a: u64, b: u64, c: u64, sieve: &FactorSieve) -> Result<Rat> {
    sieve.check_range(a)?;
    sieve.check_range(b)?;
    sieve.check_range(c)?;
    let mut ps = sieve.distinct_primes(a);
    ps.extend(sieve.distinct_primes(b));
    ps.extend(sieve.distinct_primes(c));
    ps.sort_unstable();
    ps.dedup();
    let mut out = Rat::one();
    for p in ps {
        let div_a = a % p == 0;
        let div_b = b % p == 0;
        let div_c = c % p == 0;
        if div_c {
            out *= Rat::one() - rat(1, p as i64);
        }
        if (div_a ^ div_b) && !div_c {
            out *= Rat::one() - rat(1, (p * p) as i64);
        }
        out *= phi_prime_at(p);
    }
    Ok(out)
}

pub fn capital_psi_f64(a: u64, b: u64, c: u64, sieve: &FactorSieve) -> f64 {
    to_f64(&capital_psi(a, b, c, sieve).expect("arguments within sieve range"))
}

/// Result of comparing a partial sum against its predicted main term.
#[derive(Debug, Clone, Copy)]
pub struct PartialSum {
    pub sum: f64,
    pub main_term: f64,
    pub normalized_error: f64,
}

/// `sum_{n <= x} psi_{a,b,c}(n)` against `P Psi(a,b,c) x`, normalized by
/// `phi_sigma(c) x^sigma`. Terms are exact rationals evaluated in f64 and
/// accumulated with compensation; the accumulation error is far below the
/// `x^sigma` comparison scale.
pub fn psi_partial_sum(
    x: u64,
    a: u64,
    b: u64,
    c: u64,
    sigma: f64,
    sieve: &FactorSieve,
) -> Result<PartialSum> {
    sieve.check_range(x)?;
    sieve.check_range(a.max(b).max(c))?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=x {
        let term = psi_abc_f64(n, a, b, c, sieve);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let (p_val, _) = cached_p();
    let main_term = p_val * capital_psi_f64(a, b, c, sieve) * x as f64;
    let scale = phi_sigma(c, sigma, sieve)? * (x as f64).powf(sigma);
    Ok(PartialSum { sum, main_term, normalized_error: (sum - main_term).abs() / scale })
}

/// A weight function on an interval, supplied with the data the partial-sum
/// comparison needs: its pointwise values, its exact integral over the
/// interval, the number of sign changes of its derivative, and its sup-norm.
pub struct Weight<'a> {
    pub eval: &'a dyn Fn(f64) -> f64,
    pub integral: f64,
    pub derivative_sign_changes: u32,
    pub sup_abs: f64,
}

/// `sum_{n in [t1,t2]} psi_{a,b,c}(n) g(n)` against `P Psi(a,b,c) int g`,
/// normalized by `phi_sigma(c) t2^sigma (1 + R_g) sup|g|`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_psi_sum(
    t1: f64,
    t2: f64,
    weight: &Weight<'_>,
    a: u64,
    b: u64,
    c: u64,
    sigma: f64,
    sieve: &FactorSieve,
) -> Result<PartialSum> {
    assert!(t1 <= t2 && t1 >= 0.0);
    sieve.check_range(t2.floor() as u64)?;
    let lo = (t1.ceil() as u64).max(1);
    let hi = t2.floor() as u64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in lo..=hi {
        let term = psi_abc_f64(n, a, b, c, sieve) * (weight.eval)(n as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let (p_val, _) = cached_p();
    let main_term = p_val * capital_psi_f64(a, b, c, sieve) * weight.integral;
    let m = (1.0 + weight.derivative_sign_changes as f64) * weight.sup_abs;
    let scale = phi_sigma(c, sigma, sieve)? * t2.powf(sigma) * m;
    Ok(PartialSum { sum, main_term, normalized_error: (sum - main_term).abs() / scale })
}
