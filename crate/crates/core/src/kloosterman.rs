//! Kloosterman sums, the Weil bound, and equidistribution counts of products
//! in residue classes over integer rectangles.

use crate::error::{Error, Result};
use crate::sieve::FactorSieve;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Direct-summation cap for a single Kloosterman sum.
pub const KLOOSTERMAN_Q_CAP: u64 = 100_000;

/// Modular inverse by extended gcd; `None` when `gcd(a, q) > 1`.
pub fn mod_inverse(a: i64, q: u64) -> Option<u64> {
    let q = q as i64;
    let a = a.rem_euclid(q);
    let (mut r0, mut r1) = (q, a);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let d = r0 / r1;
        (r0, r1) = (r1, r0 - d * r1);
        (t0, t1) = (t1, t0 - d * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(q) as u64)
}

/// `K(r, s, q) = sum over units a mod q of e^\{2 pi i (r a + s a^{-1}) / q\}`,
/// by direct summation with the exponent reduced mod `q` first. The value is
/// real up to roundoff (terms pair under `a <-> -a`).
pub fn kloosterman_sum(r: i64, s: i64, q: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if q > KLOOSTERMAN_Q_CAP {
        return Err(Error::CapExceeded(format!(
            "direct Kloosterman summation capped at q <= {KLOOSTERMAN_Q_CAP}"
        )));
    }
    let qi = q as i64;
    let rr = r.rem_euclid(qi);
    let ss = s.rem_euclid(qi);
    let mut acc = Complex64::new(0.0, 0.0);
    let tau = std::f64::consts::TAU;
    for alpha in 1..=qi {
        let Some(inv) = mod_inverse(alpha, q) else { continue };
        let e = (rr * alpha + ss * inv as i64).rem_euclid(qi);
        let (sin, cos) = (tau * e as f64 / q as f64).sin_cos();
        acc += Complex64::new(cos, sin);
    }
    debug_assert!(acc.im.abs() < 1e-9 * (1.0 + acc.re.abs()) + 1e-9);
    Ok(acc)
}

/// The Weil bound `tau(q) gcd(r, s, q)^(1/2) q^(1/2)`, with the convention
/// `gcd(0, 0, q) = q`.
pub fn weil_bound(r: i64, s: i64, q: u64, sieve: &FactorSieve) -> f64 {
    let g = num::integer::gcd(num::integer::gcd(r.unsigned_abs(), s.unsigned_abs()), q);
    sieve.tau(q) as f64 * (g as f64).sqrt() * (q as f64).sqrt()
}

/// All Kloosterman sums for a fixed modulus: `grid[s][r] = K(r, s, q)`,
/// computed as one inverse DFT per `s` over the unit indicator twisted by
/// `e_q(s a^{-1})`.
pub fn kloosterman_grid(q: u64) -> Vec<Vec<Complex64>> {
    let n = q as usize;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    let tau = std::f64::consts::TAU;
    let invs: Vec<Option<u64>> = (0..n).map(|a| mod_inverse(a as i64, q)).collect();
    let mut grid = Vec::with_capacity(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for s in 0..n {
        for (a, slot) in buf.iter_mut().enumerate() {
            *slot = match invs[a] {
                Some(inv) => {
                    let e = (s as u64 * inv) % q;
                    let (sin, cos) = (tau * e as f64 / q as f64).sin_cos();
                    Complex64::new(cos, sin)
                }
                None => Complex64::new(0.0, 0.0),
            };
        }
        fft.process(&mut buf);
        grid.push(buf.clone());
    }
    grid
}

/// Largest ratio `|K(r, s, q)| / weil_bound(r, s, q)` over the full grid
/// `(r, s) in [0, q)^2`. The Weil bound holds exactly when this is at most 1.
pub fn weil_max_ratio(q: u64, sieve: &FactorSieve) -> f64 {
    let grid = kloosterman_grid(q);
    let tau_q = sieve.tau(q) as f64;
    let sqrt_q = (q as f64).sqrt();
    let gcds: Vec<u64> = (0..q).map(|r| num::integer::gcd(r, q)).collect();
    let mut worst = 0.0f64;
    for (s, row) in grid.iter().enumerate() {
        for (r, k) in row.iter().enumerate() {
            let g = num::integer::gcd(gcds[r], gcds[s]);
            let bound = tau_q * (g as f64).sqrt() * sqrt_q;
            worst = worst.max(k.norm() / bound);
        }
    }
    worst
}

/// An integer rectangle with inclusive endpoints on both axes.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub i: (i64, i64),
    pub j: (i64, i64),
}

impl Rect {
    pub fn new(i: (i64, i64), j: (i64, i64)) -> Self {
        Rect { i, j }
    }

    pub fn width(&self) -> u64 {
        if self.i.0 > self.i.1 {
            0
        } else {
            (self.i.1 - self.i.0 + 1) as u64
        }
    }

    pub fn height(&self) -> u64 {
        if self.j.0 > self.j.1 {
            0
        } else {
            (self.j.1 - self.j.0 + 1) as u64
        }
    }
}

/// Number of integers in `[lo, hi]` congruent to `r` mod `q`.
fn count_congruent(lo: i64, hi: i64, q: u64, r: u64) -> u64 {
    if lo > hi {
        return 0;
    }
    let q = q as i64;
    let r = r as i64;
    (((hi - r).div_euclid(q)) - ((lo - 1 - r).div_euclid(q))) as u64
}

fn residue_counts(range: (i64, i64), q: u64) -> Vec<u64> {
    (0..q).map(|r| count_congruent(range.0, range.1, q, r)).collect()
}

/// `N(I, J; q, a)`: pairs `(u, v)` in the rectangle with `u v = a mod q`.
/// Residue-class bucketing makes the cost `O(q)`, not `O(|I| |J|)`.
pub fn rect_count(rect: &Rect, q: u64, a: i64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if num::integer::gcd(a.unsigned_abs() % q.max(1), q) != 1 && q > 1 {
        return Err(Error::InvalidInput("residue must be coprime to the modulus".into()));
    }
    let cu = residue_counts(rect.i, q);
    let cv = residue_counts(rect.j, q);
    let a = a.rem_euclid(q as i64) as u64;
    let mut total = 0;
    for (alpha, &n_u) in cu.iter().enumerate() {
        if n_u == 0 {
            continue;
        }
        let Some(inv) = mod_inverse(alpha as i64, q) else { continue };
        let beta = (a * inv) % q.max(1);
        total += n_u * cv[beta as usize];
    }
    Ok(total)
}

/// Pair counts per residue class of the product `u v`, over every class.
pub fn rect_class_counts(rect: &Rect, q: u64) -> Vec<u64> {
    let cu = residue_counts(rect.i, q);
    let cv = residue_counts(rect.j, q);
    let mut acc = vec![0u64; q as usize];
    for (alpha, &n_u) in cu.iter().enumerate() {
        if n_u == 0 {
            continue;
        }
        for (beta, &n_v) in cv.iter().enumerate() {
            if n_v != 0 {
                acc[(alpha * beta) % q as usize] += n_u * n_v;
            }
        }
    }
    acc
}

/// `N*(I, J; q)`: pairs with `gcd(uv, q) = 1`, averaged over the unit group.
pub fn rect_count_star(rect: &Rect, q: u64) -> f64 {
    let cu = residue_counts(rect.i, q);
    let cv = residue_counts(rect.j, q);
    let mut units_u = 0u64;
    let mut units_v = 0u64;
    let mut phi = 0u64;
    for r in 0..q {
        if num::integer::gcd(r, q) == 1 {
            phi += 1;
            units_u += cu[r as usize];
            units_v += cv[r as usize];
        }
    }
    if q == 1 {
        return rect.width() as f64 * rect.height() as f64;
    }
    (units_u as f64 * units_v as f64) / phi as f64
}

/// `max_a |N(I, J; q, a) - N*(I, J; q)|` over units `a` mod `q`.
pub fn equidist_error(rect: &Rect, q: u64) -> f64 {
    assert!(q >= 2);
    let star = rect_count_star(rect, q);
    let classes = rect_class_counts(rect, q);
    let mut worst = 0.0f64;
    for (a, &n) in classes.iter().enumerate() {
        if num::integer::gcd(a as u64, q) == 1 {
            worst = worst.max((n as f64 - star).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kloosterman_examples() {
        let s = FactorSieve::new(1000);
        for q in [1u64, 2, 5, 12, 30] {
            let k = kloosterman_sum(0, 0, q).unwrap();
            assert!((k.re - s.phi(q) as f64).abs() < 1e-9);
        }
        let k = kloosterman_sum(1, 0, 4).unwrap();
        assert!(k.norm() < 1e-12);
    }

    #[test]
    fn kloosterman_symmetry() {
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        for _ in 0..500 {
            let q = next() % 80 + 1;
            let r = (next() % (2 * q)) as i64 - q as i64;
            let s = (next() % (2 * q)) as i64 - q as i64;
            let a = kloosterman_sum(r, s, q).unwrap();
            let b = kloosterman_sum(s, r, q).unwrap();
            assert!((a - b).norm() < 1e-8, "K asymmetric at ({r},{s},{q})");
        }
    }

    #[test]
    fn weil_bound_examples() {
        let s = FactorSieve::new(1000);
        assert!((weil_bound(1, 1, 7, &s) - 2.0 * 7.0f64.sqrt()).abs() < 1e-12);
        assert!((weil_bound(0, 0, 12, &s) - s.tau(12) as f64 * 12.0).abs() < 1e-9);
        assert!((weil_bound(2, 4, 8, &s) - 16.0).abs() < 1e-9);
    }

    #[test]
    fn grid_matches_direct_sums() {
        let sieve = FactorSieve::new(1000);
        for q in [5u64, 12, 36, 97] {
            let grid = kloosterman_grid(q);
            let mut state = q;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(99);
                state >> 40
            };
            for _ in 0..20 {
                let r = next() % q;
                let s = next() % q;
                let direct = kloosterman_sum(r as i64, s as i64, q).unwrap();
                let fast = grid[s as usize][r as usize];
                assert!((direct - fast).norm() < 1e-7, "grid mismatch at ({r},{s},{q})");
            }
            assert!(weil_max_ratio(q, &sieve) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn weil_bound_exhaustive_small() {
        let sieve = FactorSieve::new(200);
        for q in 1..=60u64 {
            assert!(weil_max_ratio(q, &sieve) <= 1.0 + 1e-9, "Weil bound fails at q={q}");
        }
    }

    #[test]
    fn rect_count_examples() {
        let q = 36u64;
        let full = Rect::new((1, q as i64), (1, q as i64));
        let sieve = FactorSieve::new(100);
        for a in [1i64, 5, 7, 25, 35] {
            assert_eq!(rect_count(&full, q, a).unwrap(), sieve.phi(q));
        }
        let row = Rect::new((1, 1), (1, q as i64));
        assert_eq!(rect_count(&row, q, 5).unwrap(), 1);
        let empty = Rect::new((3, 2), (1, 10));
        assert_eq!(rect_count(&empty, 7, 1).unwrap(), 0);
        assert!(rect_count(&full, 6, 2).is_err());
    }

    #[test]
    fn rect_star_examples() {
        let q = 20u64;
        let sieve = FactorSieve::new(100);
        let full = Rect::new((1, q as i64), (1, q as i64));
        assert!((rect_count_star(&full, q) - sieve.phi(q) as f64).abs() < 1e-9);
        let row = Rect::new((1, 1), (1, q as i64));
        assert!((rect_count_star(&row, q) - 1.0).abs() < 1e-9);
        let r = Rect::new((-3, 9), (2, 17));
        assert!((rect_count_star(&r, 1) - (13.0 * 16.0)).abs() < 1e-12);
    }

    #[test]
    fn class_counts_partition_the_rectangle() {
        let rect = Rect::new((-13, 41), (7, 100));
        for q in [2u64, 3, 12, 35] {
            let classes = rect_class_counts(&rect, q);
            assert_eq!(classes.iter().sum::<u64>(), rect.width() * rect.height());
        }
    }

    #[test]
    fn equidist_zero_cases() {
        for q in [2u64, 5, 12, 30] {
            let full = Rect::new((1, q as i64), (1, q as i64));
            assert_eq!(equidist_error(&full, q), 0.0);
        }
        let r = Rect::new((1, 2), (1, 2));
        assert_eq!(equidist_error(&r, 2), 0.0);
    }
}
