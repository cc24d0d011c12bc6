//! Exact point counting through the universal-torsor correspondence.
//!
//! Each surface's open subset is in 2:1 correspondence with the integral
//! points of a hypersurface in A^9 subject to sign, coprimality and height
//! conditions. For `V1` the torsor equation is `t4*t5 + t1*t6*t7 + t8*t9 = 0`,
//! for `V2` it is `t4*t5 + t1^2*t6*t7 + t8*t9 = 0`; in both cases coordinates
//! 1, 2, 3, 6, 7 are positive and the height bound `B` caps monomials that are
//! exactly the coordinates of the image point.

use crate::error::{Error, Result};
use crate::oracle::{CountMethod, CountRecord};
use crate::sieve::{isqrt, FactorSieve};
use crate::surfaces::{SurfaceId, SurfacePoint};
use rayon::prelude::*;
use std::fmt;

/// A 9-tuple of torsor coordinates; index `i` holds coordinate `i + 1`.
pub type Tuple9 = [i64; 9];

/// The first condition violated by a candidate tuple, using stable labels:
/// `gcd1..gcd7` / `condition1..condition4` for `V1` and the primed
/// `gcd1'..gcd6'` / `condition1'..condition5'` for `V2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Coordinate (1-based) is zero.
    Zero(u8),
    /// Coordinate (1-based) must be positive.
    Sign(u8),
    TorsorEquation,
    Coprimality(u8),
    Height(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TupleCheck {
    Valid,
    Violated(Violation),
}

impl Violation {
    pub fn label(&self, surface: SurfaceId) -> String {
        let prime = match surface {
            SurfaceId::V1 => "",
            SurfaceId::V2 => "'",
        };
        match self {
            Violation::Zero(i) => format!("nonzero{i}"),
            Violation::Sign(i) => format!("sign{i}"),
            Violation::TorsorEquation => "torsor equation".to_string(),
            Violation::Coprimality(k) => format!("gcd{k}{prime}"),
            Violation::Height(k) => format!("condition{k}{prime}"),
        }
    }
}

impl fmt::Display for TupleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TupleCheck::Valid => write!(f, "valid"),
            TupleCheck::Violated(v) => write!(f, "violated: {v:?}"),
        }
    }
}

fn g(a: i64, b: i64) -> u64 {
    num::integer::gcd(a.unsigned_abs(), b.unsigned_abs())
}

fn coprime(a: i64, parts: &[i64]) -> bool {
    parts.iter().all(|&p| g(a, p) == 1)
}

fn coprime_u(a: u64, b: u64) -> bool {
    num::integer::gcd(a, b) == 1
}

/// Absolute value of a monomial, exact in u128.
fn mono(factors: &[(i64, u32)]) -> u128 {
    let mut acc: u128 = 1;
    for &(v, e) in factors {
        for _ in 0..e {
            acc = acc.saturating_mul(v.unsigned_abs() as u128);
        }
    }
    acc
}

/// The height monomials of a tuple: the absolute coordinates of the image
/// point that are not dominated by the others (four for `V1`, five for `V2`).
pub fn height_monomials(surface: SurfaceId, t: &Tuple9) -> Vec<u128> {
    let [t1, t2, t3, t4, t5, t6, t7, t8, t9] = *t;
    match surface {
        SurfaceId::V1 => vec![
            mono(&[(t2, 1), (t3, 1), (t4, 2), (t5, 2)]),
            mono(&[(t1, 2), (t2, 1), (t3, 1), (t6, 2), (t7, 2)]),
            mono(&[(t1, 1), (t3, 2), (t4, 1), (t6, 2), (t8, 1)]),
            mono(&[(t1, 1), (t2, 2), (t5, 1), (t7, 2), (t9, 1)]),
        ],
        SurfaceId::V2 => vec![
            mono(&[(t3, 2), (t4, 1), (t6, 1), (t8, 1)]),
            mono(&[(t1, 2), (t2, 2), (t5, 1), (t6, 1), (t7, 2), (t9, 1)]),
            mono(&[(t1, 1), (t2, 1), (t3, 1), (t4, 1), (t5, 1), (t6, 1), (t7, 1)]),
            mono(&[(t1, 1), (t2, 1), (t3, 1), (t6, 1), (t7, 1), (t8, 1), (t9, 1)]),
            mono(&[(t2, 2), (t4, 1), (t5, 2), (t7, 1), (t9, 1)]),
        ],
    }
}

/// Exact height of a tuple's image point.
pub fn tuple_height(surface: SurfaceId, t: &Tuple9) -> u128 {
    height_monomials(surface, t).into_iter().max().unwrap()
}

fn torsor_equation_holds(surface: SurfaceId, t: &Tuple9) -> bool {
    let v = t.map(|x| x as i128);
    let term2 = match surface {
        SurfaceId::V1 => v[0] * v[5] * v[6],
        SurfaceId::V2 => v[0] * v[0] * v[5] * v[6],
    };
    v[3] * v[4] + term2 + v[7] * v[8] == 0
}

/// Full validity check against the sign pattern, the torsor equation, the
/// coprimality conditions and the height conditions at bound `b`, reporting
/// the first violated condition.
pub fn validate_tuple(surface: SurfaceId, t: &Tuple9, b: u64) -> TupleCheck {
    use TupleCheck::Violated;
    for (i, &v) in t.iter().enumerate() {
        if v == 0 {
            return Violated(Violation::Zero(i as u8 + 1));
        }
    }
    for &i in &[1usize, 2, 3, 6, 7] {
        if t[i - 1] < 0 {
            return Violated(Violation::Sign(i as u8));
        }
    }
    if !torsor_equation_holds(surface, t) {
        return Violated(Violation::TorsorEquation);
    }
    let [t1, t2, t3, t4, t5, t6, t7, t8, t9] = *t;
    let cops: &[(u8, bool)] = match surface {
        SurfaceId::V1 => &[
            (1, coprime(t8, &[t1, t2, t4, t5, t6, t7])),
            (2, coprime(t4, &[t1, t2, t6, t7, t9])),
            (3, coprime(t5, &[t1, t3, t6, t7, t9])),
            (4, coprime(t6, &[t2, t7, t9])),
            (5, coprime(t3, &[t1, t2, t7, t9])),
            (6, coprime(t1, &[t2, t9])),
            (7, coprime(t9, &[t7])),
        ],
        SurfaceId::V2 => &[
            (1, coprime(t4, &[t1, t6, t7]) && coprime(t5, &[t1, t6, t7])),
            (2, coprime(t4, &[t8, t9]) && coprime(t5, &[t8, t9])),
            (3, coprime(t8, &[t1, t6, t7]) && coprime(t9, &[t1, t6, t7])),
            (4, coprime(t2, &[t1, t3, t4, t6, t8])),
            (5, coprime(t3, &[t1, t5, t7, t9])),
            (6, coprime(t6, &[t7])),
        ],
    };
    for &(k, ok) in cops {
        if !ok {
            return Violated(Violation::Coprimality(k));
        }
    }
    for (k, m) in height_monomials(surface, t).into_iter().enumerate() {
        if m > b as u128 {
            return Violated(Violation::Height(k as u8 + 1));
        }
    }
    TupleCheck::Valid
}

fn torsor_image(surface: SurfaceId, t: &Tuple9) -> [i128; 5] {
    let [t1, t2, t3, t4, t5, t6, t7, t8, t9] = t.map(|x| x as i128);
    match surface {
        SurfaceId::V1 => [
            t2 * t3 * t4 * t4 * t5 * t5,
            t1 * t1 * t2 * t3 * t6 * t6 * t7 * t7,
            t1 * t2 * t3 * t4 * t5 * t6 * t7,
            t1 * t3 * t3 * t4 * t6 * t6 * t8,
            t1 * t2 * t2 * t5 * t7 * t7 * t9,
        ],
        SurfaceId::V2 => [
            t3 * t3 * t4 * t6 * t8,
            t1 * t1 * t2 * t2 * t5 * t6 * t7 * t7 * t9,
            t1 * t2 * t3 * t4 * t5 * t6 * t7,
            t1 * t2 * t3 * t6 * t7 * t8 * t9,
            t2 * t2 * t4 * t5 * t5 * t7 * t9,
        ],
    }
}

/// The monomial map from a torsor tuple to its surface point. Requires only
/// the torsor equation; the image satisfies both quadrics identically, and is
/// primitive whenever the coprimality conditions hold.
pub fn torsor_to_point(surface: SurfaceId, t: &Tuple9) -> Result<SurfacePoint> {
    if t.iter().any(|&v| v == 0) {
        return Err(Error::InvalidInput("torsor coordinates must be nonzero".into()));
    }
    if !torsor_equation_holds(surface, t) {
        return Err(Error::InvalidInput("torsor equation violated".into()));
    }
    let coords = torsor_image(surface, t);
    let mut gg: i128 = 0;
    for &c in &coords {
        gg = num::integer::gcd(gg, c.abs());
    }
    debug_assert!(gg > 0);
    let mut out = coords.map(|c| c / gg);
    if out.iter().find(|&&c| c != 0).copied().unwrap_or(1) < 0 {
        for c in &mut out {
            *c = -*c;
        }
    }
    let mut small = [0i64; 5];
    for (dst, src) in small.iter_mut().zip(out.iter()) {
        *dst = i64::try_from(*src).map_err(|_| Error::Overflow)?;
    }
    Ok(SurfacePoint(small))
}

fn check_b(b: u64) -> Result<()> {
    if b == 0 {
        return Err(Error::InvalidInput("height bound B must be positive".into()));
    }
    // keeps every height monomial inside u64 during enumeration
    if b > 1 << 40 {
        return Err(Error::CapExceeded("torsor enumeration supports B <= 2^40".into()));
    }
    Ok(())
}

fn outer_triples(surface: SurfaceId, b: u64) -> Vec<(u64, u64, u64)> {
    let mut triples = Vec::new();
    match surface {
        SurfaceId::V1 => {
            // (t1 t6 t7)^2 <= B
            let cap = isqrt(b);
            for t1 in 1..=cap {
                for t6 in 1..=cap / t1 {
                    for t7 in 1..=cap / (t1 * t6) {
                        if coprime_u(t6, t7) {
                            triples.push((t1, t6, t7));
                        }
                    }
                }
            }
        }
        SurfaceId::V2 => {
            // t1^2 t6 t7^2 <= B
            for t1 in 1..=isqrt(b) {
                for t6 in 1..=b / (t1 * t1) {
                    for t7 in 1..=isqrt(b / (t1 * t1 * t6)) {
                        if coprime_u(t6, t7) {
                            triples.push((t1, t6, t7));
                        }
                    }
                }
            }
        }
    }
    triples
}

fn sieve_limit(surface: SurfaceId, b: u64) -> u64 {
    match surface {
        // every factored quantity is at most 2*sqrt(B)
        SurfaceId::V1 => 2 * isqrt(b) + 2,
        SurfaceId::V2 => 2 * b + 2,
    }
}

#[inline]
fn cap_div(b: u64, denom: u128) -> u64 {
    if denom == 0 || denom > b as u128 {
        0
    } else {
        b / denom as u64
    }
}

/// Visits every valid tuple with image height `<= b`, passing the tuple and
/// its exact height. Serial; intended for small-`b` diagnostics.
pub fn visit_tuples<F: FnMut(&Tuple9, u64)>(surface: SurfaceId, b: u64, mut f: F) -> Result<()> {
    check_b(b)?;
    let sieve = FactorSieve::new(sieve_limit(surface, b));
    for (t1, t6, t7) in outer_triples(surface, b) {
        enumerate_triple(surface, b, t1, t6, t7, &sieve, &mut f);
    }
    Ok(())
}

/// Tuple counts per exact image height, for all heights up to `b`, computed in
/// parallel. `hist[h]` is the number of valid tuples of height exactly `h`.
pub fn tuple_histogram(surface: SurfaceId, b: u64) -> Result<Vec<u64>> {
    check_b(b)?;
    let sieve = FactorSieve::new(sieve_limit(surface, b));
    let triples = outer_triples(surface, b);
    let hist = triples
        .par_iter()
        .fold(
            || vec![0u64; b as usize + 1],
            |mut hist, &(t1, t6, t7)| {
                enumerate_triple(surface, b, t1, t6, t7, &sieve, &mut |_t, h| {
                    hist[h as usize] += 1;
                });
                hist
            },
        )
        .reduce(
            || vec![0u64; b as usize + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(hist)
}

/// Point counts per height: exactly half the tuple counts. The running tuple
/// count must be even at every height, or the 2:1 correspondence is broken.
pub fn count_histogram(surface: SurfaceId, b: u64) -> Result<Vec<u64>> {
    let mut hist = tuple_histogram(surface, b)?;
    let mut cum = 0u64;
    for (h, v) in hist.iter_mut().enumerate() {
        cum += *v;
        if cum % 2 != 0 {
            return Err(Error::OddTorsorCount { surface: surface.name(), b: h as u64, raw: cum });
        }
        *v /= 2;
    }
    Ok(hist)
}

/// `N_{U,H}(b)` through the torsor correspondence: half the number of valid
/// tuples at height bound `b`.
pub fn count_via_torsor(surface: SurfaceId, b: u64) -> Result<CountRecord> {
    let hist = count_histogram(surface, b)?;
    Ok(CountRecord { surface, b, method: CountMethod::Torsor, count: hist.iter().sum() })
}

/// Enumerates all valid tuples whose positive triple `(t1, t6, t7)` is fixed.
///
/// Loop structure: the magnitudes of `(t4, t5)` run under the minimal height
/// caps, the product `t8*t9` is forced by the torsor equation and split via a
/// divisor loop, and the two free coordinates `(t2, t3)` are counted last
/// under the remaining caps and coprimality filters. Conditions depend only
/// on magnitudes and on the sign of `t4*t5`, so each surviving magnitude
/// pattern is emitted for all four compatible sign assignments.
fn enumerate_triple<F: FnMut(&Tuple9, u64)>(
    surface: SurfaceId,
    b: u64,
    t1: u64,
    t6: u64,
    t7: u64,
    sieve: &FactorSieve,
    f: &mut F,
) {
    let p167 = t1 * t6 * t7;
    let (term2, cap4_fixed, cap5_fixed, pair_cap) = match surface {
        SurfaceId::V1 => (
            p167,                                  // t1 t6 t7
            cap_div(b, (t1 * t6 * t6) as u128),    // from t1 t3^2 |t4| t6^2 |t8| <= B
            cap_div(b, (t1 * t7 * t7) as u128),    // from t1 t2^2 |t5| t7^2 |t9| <= B
            isqrt(b),                              // |t4 t5| <= sqrt(B)
        ),
        SurfaceId::V2 => (
            t1 * p167,                                       // t1^2 t6 t7
            cap_div(b, t6 as u128),                          // from t3^2 |t4| t6 |t8| <= B
            cap_div(b, (t1 * t1 * t6 * t7 * t7) as u128),    // from the x1 monomial
            cap_div(b, p167 as u128),                        // |t4 t5|, |t8 t9| <= B/(t1 t6 t7)
        ),
    };
    let k167: Vec<u64> = {
        let mut v = sieve.distinct_primes(t1);
        v.extend(sieve.distinct_primes(t6));
        v.extend(sieve.distinct_primes(t7));
        v.sort_unstable();
        v.dedup();
        v
    };
    let t1p = sieve.distinct_primes(t1);
    let t6p = sieve.distinct_primes(t6);
    let t7p = sieve.distinct_primes(t7);

    for a5 in 1..=cap5_fixed.min(pair_cap) {
        if k167.iter().any(|&p| a5 % p == 0) {
            continue;
        }
        let cap4 = match surface {
            SurfaceId::V1 => cap4_fixed.min(pair_cap / a5),
            SurfaceId::V2 => cap4_fixed.min(pair_cap / a5).min(cap_div(b, (a5 * a5 * t7) as u128)),
        };
        let a5p = sieve.distinct_primes(a5);
        for a4 in 1..=cap4 {
            if k167.iter().any(|&p| a4 % p == 0) {
                continue;
            }
            let a4p = sieve.distinct_primes(a4);
            let prod45 = a4 * a5;
            // sign of t4*t5 decides |t8 t9|; everything else is sign-blind
            for sgn45 in [1i64, -1] {
                let s = -(sgn45 * prod45 as i64 + term2 as i64);
                if s == 0 {
                    continue;
                }
                let sa = s.unsigned_abs();
                if surface == SurfaceId::V2 && sa > pair_cap {
                    continue;
                }
                let sign_pairs: [(i64, i64); 2] =
                    if sgn45 > 0 { [(1, 1), (-1, -1)] } else { [(1, -1), (-1, 1)] };
                for d8 in sieve.divisors(sa) {
                    let d9 = sa / d8;
                    // caps on t2 and t3 from the monomials containing them
                    let (e3_scale, e2_scale, h23_scale) = match surface {
                        SurfaceId::V1 => (
                            t1 as u128 * a4 as u128 * (t6 * t6) as u128 * d8 as u128,
                            t1 as u128 * a5 as u128 * (t7 * t7) as u128 * d9 as u128,
                            ((prod45 as u128) * (prod45 as u128))
                                .max((p167 as u128) * (p167 as u128)),
                        ),
                        SurfaceId::V2 => (
                            a4 as u128 * t6 as u128 * d8 as u128,
                            ((t1 * t1) as u128 * a5 as u128 * t6 as u128 * (t7 * t7) as u128
                                * d9 as u128)
                                .max(a4 as u128 * (a5 * a5) as u128 * t7 as u128 * d9 as u128),
                            (p167 as u128 * prod45 as u128).max(p167 as u128 * sa as u128),
                        ),
                    };
                    if e3_scale > b as u128 || e2_scale > b as u128 || h23_scale > b as u128 {
                        continue;
                    }
                    if !(coprime_u(d8, p167)
                        && coprime_u(d9, p167)
                        && coprime_u(d8, a4)
                        && coprime_u(d8, a5)
                        && coprime_u(d9, a4)
                        && coprime_u(d9, a5))
                    {
                        continue;
                    }
                    let pair23_cap = cap_div(b, h23_scale);
                    let e2_cap = isqrt(cap_div(b, e2_scale)).min(pair23_cap);
                    let e3_cap_global = isqrt(cap_div(b, e3_scale)).min(pair23_cap);
                    if e2_cap == 0 || e3_cap_global == 0 {
                        continue;
                    }
                    let mut k2 = t1p.clone();
                    k2.extend_from_slice(&a4p);
                    k2.extend_from_slice(&t6p);
                    k2.extend(sieve.distinct_primes(d8));
                    k2.sort_unstable();
                    k2.dedup();
                    let mut k3 = t1p.clone();
                    k3.extend_from_slice(&a5p);
                    k3.extend_from_slice(&t7p);
                    k3.extend(sieve.distinct_primes(d9));
                    k3.sort_unstable();
                    k3.dedup();

                    let h23 = h23_scale as u64;
                    let e2s = e2_scale as u64;
                    let e3s = e3_scale as u64;

                    for e2 in 1..=e2_cap {
                        if k2.iter().any(|&p| e2 % p == 0) {
                            continue;
                        }
                        let e3_cap = e3_cap_global.min(pair23_cap / e2);
                        if e3_cap == 0 {
                            break;
                        }
                        let e2p = sieve.distinct_primes(e2);
                        for e3 in 1..=e3_cap {
                            if k3.iter().any(|&p| e3 % p == 0)
                                || e2p.iter().any(|&p| e3 % p == 0)
                            {
                                continue;
                            }
                            let h = (e2 * e3 * h23).max(e3 * e3 * e3s).max(e2 * e2 * e2s);
                            debug_assert!(h <= b);
                            for &(s4, s5) in &sign_pairs {
                                for s8 in [1i64, -1] {
                                    let t8v = s8 * d8 as i64;
                                    let t9v = s / t8v;
                                    let tuple: Tuple9 = [
                                        t1 as i64,
                                        e2 as i64,
                                        e3 as i64,
                                        s4 * a4 as i64,
                                        s5 * a5 as i64,
                                        t6 as i64,
                                        t7 as i64,
                                        t8v,
                                        t9v,
                                    ];
                                    f(&tuple, h);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Number of integer 7-tuples `(m1, m4..m9)` in the dyadic box
/// `K_i < |m_i| <= 2 K_i` satisfying the surface's torsor equation and
/// `gcd(m4 m5, m1 m6 m7) = 1`. A diagnostic counter for the dyadic-box upper
/// bounds; `ks` lists the `K` values for `(m1, m4, m5, m6, m7, m8, m9)`.
pub fn dyadic_box_count(surface: SurfaceId, ks: &[f64; 7]) -> u64 {
    assert!(ks.iter().all(|&k| k >= 0.5), "dyadic ranges need K >= 1/2");
    let rng = |k: f64| -> (u64, u64) { (k.floor() as u64 + 1, (2.0 * k).floor() as u64) };
    let r1 = rng(ks[0]);
    let r4 = rng(ks[1]);
    let r5 = rng(ks[2]);
    let r6 = rng(ks[3]);
    let r7 = rng(ks[4]);
    let r8 = rng(ks[5]);
    let r9 = rng(ks[6]);
    if [r1, r4, r5, r6, r7, r8, r9].iter().any(|&(lo, hi)| lo > hi) {
        return 0;
    }
    let width = |r: (u64, u64)| r.1 - r.0 + 1;
    // split whichever product pair is more expensive to iterate via divisors
    let finish_89 = width(r8) * width(r9) >= width(r4) * width(r5);
    let (it_a, it_b) = if finish_89 { (r4, r5) } else { (r8, r9) };
    let (fin_a, fin_b) = if finish_89 { (r8, r9) } else { (r4, r5) };

    let exp1: u32 = match surface {
        SurfaceId::V1 => 1,
        SurfaceId::V2 => 2,
    };
    let max_s = (2.0 * ks[1]) * (2.0 * ks[2])
        + (2.0 * ks[0]).powi(exp1 as i32) * (2.0 * ks[3]) * (2.0 * ks[4])
        + (2.0 * ks[5]) * (2.0 * ks[6]);
    let sieve = FactorSieve::new((max_s as u64 + 2).max(4));

    let mut total = 0u64;
    for g1 in r1.0..=r1.1 {
        for g6 in r6.0..=r6.1 {
            for g7 in r7.0..=r7.1 {
                let m167 = (g1.pow(exp1) * g6 * g7) as i64;
                let support167 = g1 * g6 * g7;
                for ga in it_a.0..=it_a.1 {
                    for gb in it_b.0..=it_b.1 {
                        // only the product signs of the two iterated groups
                        // enter the equation; each choice covers 2 sign
                        // assignments of the pair and 4 of the triple
                        for sp_pair in [1i64, -1] {
                            for sp_167 in [1i64, -1] {
                                let s = -(sp_pair * (ga * gb) as i64 + sp_167 * m167);
                                if s == 0 {
                                    continue;
                                }
                                let sa = s.unsigned_abs();
                                let coprime_ok = if finish_89 {
                                    coprime_u(ga * gb, support167)
                                } else {
                                    coprime_u(sa, support167)
                                };
                                if !coprime_ok {
                                    continue;
                                }
                                let mut sols = 0u64;
                                for d in sieve.divisors(sa) {
                                    let e = sa / d;
                                    if d >= fin_a.0 && d <= fin_a.1 && e >= fin_b.0 && e <= fin_b.1
                                    {
                                        sols += 2; // (d, s/d) and (-d, -s/d)
                                    }
                                }
                                total += sols * 2 * 4;
                            }
                        }
                    }
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::surfaces::{evaluate_quadrics, normalize};
    use std::collections::HashMap;

    #[test]
    fn validate_examples() {
        let t: Tuple9 = [1, 1, 1, 1, 1, 1, 1, 1, -2];
        assert_eq!(validate_tuple(SurfaceId::V1, &t, 2), TupleCheck::Valid);
        assert_eq!(validate_tuple(SurfaceId::V2, &t, 2), TupleCheck::Valid);
        let ones: Tuple9 = [1; 9];
        assert_eq!(
            validate_tuple(SurfaceId::V1, &ones, 10),
            TupleCheck::Violated(Violation::TorsorEquation)
        );
    }

    #[test]
    fn violation_labels_are_stable() {
        assert_eq!(Violation::Coprimality(3).label(SurfaceId::V1), "gcd3");
        assert_eq!(Violation::Height(2).label(SurfaceId::V2), "condition2'");
    }

    #[test]
    fn torsor_to_point_examples() {
        let t: Tuple9 = [1, 1, 1, 1, 1, 1, 1, 1, -2];
        assert_eq!(
            torsor_to_point(SurfaceId::V1, &t).unwrap(),
            normalize(&[1, 1, 1, 1, -2]).unwrap()
        );
        assert_eq!(
            torsor_to_point(SurfaceId::V2, &t).unwrap(),
            normalize(&[1, -2, 1, -2, -2]).unwrap()
        );
        assert!(torsor_to_point(SurfaceId::V1, &[1; 9]).is_err());
    }

    /// Both quadrics vanish identically on the image of the monomial map; the
    /// second quadric equals an explicit monomial cofactor times the torsor
    /// form, which pins the sign of the middle coordinate.
    #[test]
    fn quadrics_factor_through_torsor_form() {
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = ((state >> 33) % 11) as i64 - 5;
            if v == 0 {
                1
            } else {
                v
            }
        };
        for _ in 0..2000 {
            let t: Tuple9 = std::array::from_fn(|_| next());
            let tv = t.map(|x| x as i128);
            for surface in SurfaceId::BOTH {
                let form = tv[3] * tv[4]
                    + match surface {
                        SurfaceId::V1 => tv[0] * tv[5] * tv[6],
                        SurfaceId::V2 => tv[0] * tv[0] * tv[5] * tv[6],
                    }
                    + tv[7] * tv[8];
                let x = torsor_image(surface, &t);
                let (f1, f2) = match surface {
                    SurfaceId::V1 => {
                        (x[0] * x[1] - x[2] * x[2], x[2] * x[2] + x[1] * x[2] + x[3] * x[4])
                    }
                    SurfaceId::V2 => {
                        (x[0] * x[1] - x[2] * x[3], x[1] * x[2] + x[2] * x[4] + x[3] * x[4])
                    }
                };
                let cofactor = match surface {
                    SurfaceId::V1 => {
                        tv[0] * tv[0] * tv[1] * tv[1] * tv[2] * tv[2] * tv[3] * tv[4]
                            * tv[5] * tv[5] * tv[6] * tv[6]
                    }
                    SurfaceId::V2 => {
                        tv[0] * tv[1] * tv[1] * tv[1] * tv[2] * tv[3] * tv[4] * tv[4]
                            * tv[5] * tv[6] * tv[6] * tv[8]
                    }
                };
                assert_eq!(f1, 0);
                assert_eq!(f2, cofactor * form);
            }
        }
    }

    #[test]
    fn enumerated_tuples_are_valid_and_heights_match() {
        for surface in SurfaceId::BOTH {
            visit_tuples(surface, 40, |t, h| {
                assert_eq!(validate_tuple(surface, t, 40), TupleCheck::Valid, "{surface} {t:?}");
                assert_eq!(tuple_height(surface, t), h as u128);
                let p = torsor_to_point(surface, t).unwrap();
                assert_eq!(crate::surfaces::height(&p), h, "point height mismatch for {t:?}");
                assert_eq!(evaluate_quadrics(surface, &p.0).unwrap(), (0, 0));
            })
            .unwrap();
        }
    }

    #[test]
    fn enumeration_is_complete_at_tiny_height() {
        // independent completeness check: brute-force the whole 9-cube;
        // every coordinate of a valid tuple appears in some height monomial
        // whose other factors are >= 1, so |t_i| <= B
        let b = 4u64;
        for surface in SurfaceId::BOTH {
            let mut expected = Vec::new();
            let r = b as i64;
            let mut t = [0i64; 9];
            fn rec(surface: SurfaceId, b: u64, r: i64, i: usize, t: &mut Tuple9, out: &mut Vec<Tuple9>) {
                if i == 9 {
                    if validate_tuple(surface, t, b) == TupleCheck::Valid {
                        out.push(*t);
                    }
                    return;
                }
                let lo = if matches!(i, 0 | 1 | 2 | 5 | 6) { 1 } else { -r };
                for v in lo..=r {
                    if v == 0 {
                        continue;
                    }
                    t[i] = v;
                    rec(surface, b, r, i + 1, t, out);
                }
            }
            rec(surface, b, r, 0, &mut t, &mut expected);
            let mut seen = Vec::new();
            visit_tuples(surface, b, |t, _| seen.push(*t)).unwrap();
            expected.sort_unstable();
            seen.sort_unstable();
            assert_eq!(seen, expected, "{surface} tuple sets differ at B={b}");
        }
    }

    #[test]
    fn torsor_count_matches_oracle_small() {
        for surface in SurfaceId::BOTH {
            let torsor = count_histogram(surface, 30).unwrap();
            let oracle = oracle::parametrized_histogram(surface, 30).unwrap();
            assert_eq!(torsor, oracle, "{surface} histograms disagree");
        }
    }

    #[test]
    fn every_point_has_exactly_two_preimages() {
        for surface in SurfaceId::BOTH {
            let b = 100;
            let mut preimages: HashMap<SurfacePoint, u64> = HashMap::new();
            visit_tuples(surface, b, |t, _| {
                *preimages.entry(torsor_to_point(surface, t).unwrap()).or_insert(0) += 1;
            })
            .unwrap();
            let points = oracle::enumerate_points(surface, b).unwrap();
            assert_eq!(preimages.len(), points.len(), "{surface} image sets differ");
            for p in &points {
                assert_eq!(preimages.get(p), Some(&2), "{surface} point {p} preimage count");
            }
        }
    }

    fn dyadic_brute(surface: SurfaceId, ks: &[f64; 7]) -> u64 {
        let rng = |k: f64| (k.floor() as i64 + 1, (2.0 * k).floor() as i64);
        let rs: Vec<(i64, i64)> = ks.iter().map(|&k| rng(k)).collect();
        let vals = |r: (i64, i64)| -> Vec<i64> {
            let mut v = Vec::new();
            for m in r.0..=r.1 {
                v.push(m);
                v.push(-m);
            }
            v
        };
        let exp1 = match surface {
            SurfaceId::V1 => 1,
            SurfaceId::V2 => 2,
        };
        let mut count = 0;
        for &m1 in &vals(rs[0]) {
            for &m4 in &vals(rs[1]) {
                for &m5 in &vals(rs[2]) {
                    for &m6 in &vals(rs[3]) {
                        for &m7 in &vals(rs[4]) {
                            if num::integer::gcd(
                                (m4 * m5).unsigned_abs(),
                                (m1 * m6 * m7).unsigned_abs(),
                            ) != 1
                            {
                                continue;
                            }
                            for &m8 in &vals(rs[5]) {
                                for &m9 in &vals(rs[6]) {
                                    if m4 * m5 + m1.pow(exp1) * m6 * m7 + m8 * m9 == 0 {
                                        count += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn dyadic_counts_match_brute_force() {
        let boxes: [[f64; 7]; 4] = [
            [0.5; 7],
            [1.0, 0.5, 1.5, 0.5, 1.0, 2.0, 1.0],
            [1.5, 1.5, 0.5, 1.0, 0.5, 1.5, 2.5],
            [2.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0],
        ];
        for surface in SurfaceId::BOTH {
            for ks in &boxes {
                assert_eq!(
                    dyadic_box_count(surface, ks),
                    dyadic_brute(surface, ks),
                    "{surface} box {ks:?}"
                );
            }
        }
        // all-unit box: the three products are odd, so their sum cannot vanish
        assert_eq!(dyadic_box_count(SurfaceId::V1, &[0.5; 7]), 0);
        assert_eq!(dyadic_box_count(SurfaceId::V2, &[0.5; 7]), 0);
    }
}
