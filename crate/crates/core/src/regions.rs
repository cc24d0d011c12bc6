//! Counting lattice points of semialgebraic plane regions in residue classes
//! of the product of the coordinates: the regions `S`, `S1`, `S2`, their
//! congruence counts `D`, the averaged main term `D*`, error profiles against
//! the analytic reference bounds, and the quadratic band counter.

use crate::error::{Error, Result};
use crate::quad::{abs_cubic_sublevel, abs_quadratic_sublevel, IntervalSet};
use crate::sieve::FactorSieve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionVariant {
    S,
    S1,
    S2,
}

/// Parameters are snapped to the dyadic grid `2^-20` at construction so that
/// integer membership can be decided exactly in 128-bit arithmetic.
pub const PARAM_SCALE: i64 = 1 << 20;

/// Defining data for one region. Conditions by variant (all non-strict):
///
/// * `S`:  `|xy| <= X`, `|x||xy+T| <= X1`, `|y| <= X2`, `|xy+T| >= Z`,
///   `|x| >= L1`, `|y| >= L2`
/// * `S1`: all of `S` plus `|xy+T| <= X` and `|x| y^2 <= X3`
/// * `S2`: `|xy| <= X`, `|xy+T| >= Z`, `|x| >= L1`, `|y| >= L2`,
///   `|xy+T| <= X`, `|x| <= X1`, `|y||xy+T| <= X2`, `|x| y^2 |xy+T| <= X3`
#[derive(Debug, Clone, Copy)]
pub struct RegionParams {
    pub variant: RegionVariant,
    pub x: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub t: f64,
    pub z: f64,
    pub l1: f64,
    pub l2: f64,
}

fn snap(v: f64) -> f64 {
    (v * PARAM_SCALE as f64).round() / PARAM_SCALE as f64
}

fn scaled(v: f64) -> i128 {
    (v * PARAM_SCALE as f64).round() as i128
}

impl RegionParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        variant: RegionVariant,
        x: f64,
        x1: f64,
        x2: f64,
        x3: f64,
        t: f64,
        z: f64,
        l1: f64,
        l2: f64,
    ) -> Result<Self> {
        let vals = [x, x1, x2, x3, t, z, l1, l2].map(snap);
        let [x, x1, x2, x3, t, z, l1, l2] = vals;
        if vals.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidInput("region parameters must be positive".into()));
        }
        if vals.iter().any(|&v| v > PARAM_SCALE as f64) {
            return Err(Error::InvalidInput(format!(
                "region parameters capped at {PARAM_SCALE} to keep exact membership in range"
            )));
        }
        match variant {
            RegionVariant::S => {
                if t > x {
                    return Err(Error::InvalidInput("variant S requires T <= X".into()));
                }
                // with T <= X and |xy| <= X, any point satisfies |xy+T| <= 2X,
                // so Z > 2X contradicts the lower level
                if z > 2.0 * x {
                    return Err(Error::InvalidInput("variant S requires Z <= 2X".into()));
                }
            }
            _ => {
                if t > 2.0 * x {
                    return Err(Error::InvalidInput("variants S1/S2 require T <= 2X".into()));
                }
            }
        }
        Ok(RegionParams { variant, x, x1, x2, x3, t, z, l1, l2 })
    }

    /// Pointwise membership over the reals.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let w = x * y + self.t;
        let common = (x * y).abs() <= self.x
            && w.abs() >= self.z
            && x.abs() >= self.l1
            && y.abs() >= self.l2;
        if !common {
            return false;
        }
        match self.variant {
            RegionVariant::S => x.abs() * w.abs() <= self.x1 && y.abs() <= self.x2,
            RegionVariant::S1 => {
                x.abs() * w.abs() <= self.x1
                    && y.abs() <= self.x2
                    && w.abs() <= self.x
                    && x.abs() * y * y <= self.x3
            }
            RegionVariant::S2 => {
                w.abs() <= self.x
                    && x.abs() <= self.x1
                    && y.abs() * w.abs() <= self.x2
                    && x.abs() * y * y * w.abs() <= self.x3
            }
        }
    }

    /// Exact membership for integer points, in 128-bit arithmetic over the
    /// dyadic parameter grid.
    pub fn contains_exact(&self, u: i64, v: i64) -> bool {
        let s = PARAM_SCALE as i128;
        let (px, px1, px2, px3, pt, pz, pl1, pl2) = (
            scaled(self.x),
            scaled(self.x1),
            scaled(self.x2),
            scaled(self.x3),
            scaled(self.t),
            scaled(self.z),
            scaled(self.l1),
            scaled(self.l2),
        );
        let u128 = u as i128;
        let v128 = v as i128;
        // cheap bounded conditions first; they cap |u| and |v| for the rest
        if u128.abs() * s < pl1 || v128.abs() * s < pl2 {
            return false;
        }
        let uv = u128 * v128;
        if uv.abs() * s > px {
            return false;
        }
        let w = uv * s + pt; // (uv + T) * 2^20
        if w.abs() < pz {
            return false;
        }
        match self.variant {
            RegionVariant::S => u128.abs() * w.abs() <= px1 && v128.abs() * s <= px2,
            RegionVariant::S1 => {
                u128.abs() * w.abs() <= px1
                    && v128.abs() * s <= px2
                    && w.abs() <= px
                    && u128.abs() * v128 * v128 * s <= px3
            }
            RegionVariant::S2 => {
                w.abs() <= px
                    && u128.abs() * s <= px1
                    && v128.abs() * w.abs() <= px2
                    && u128.abs() * v128 * v128 * w.abs() <= px3
            }
        }
    }

    /// The admissible magnitudes of the first coordinate.
    fn u_magnitudes(&self) -> (i64, i64) {
        let lo = self.l1.ceil() as i64;
        let mut hi = (self.x / self.l2).floor() as i64;
        if self.variant == RegionVariant::S2 {
            hi = hi.min(self.x1.floor() as i64);
        }
        (lo.max(1), hi)
    }

    /// The section `{v : (u, v) in region}` as a union of real intervals,
    /// computed in floating point; integer boundaries are resolved exactly
    /// afterwards.
    fn v_section(&self, u: i64) -> IntervalSet {
        let au = u.unsigned_abs() as f64;
        let mut vmax = self.x / au;
        match self.variant {
            RegionVariant::S | RegionVariant::S1 => vmax = vmax.min(self.x2),
            RegionVariant::S2 => {}
        }
        if self.variant == RegionVariant::S1 {
            vmax = vmax.min((self.x3 / au).sqrt());
        }
        if vmax < self.l2 {
            return IntervalSet::empty();
        }
        let mut set = IntervalSet::from_parts(vec![(-vmax, -self.l2), (self.l2, vmax)]);

        // window for |uv + T|
        let w_lo = self.z;
        let w_hi = match self.variant {
            RegionVariant::S => self.x1 / au,
            RegionVariant::S1 => (self.x1 / au).min(self.x),
            RegionVariant::S2 => self.x,
        };
        if w_lo > w_hi {
            return IntervalSet::empty();
        }
        let uf = u as f64;
        let mut window_parts = Vec::new();
        for (a, b) in [(w_lo, w_hi), (-w_hi, -w_lo)] {
            let v1 = (a - self.t) / uf;
            let v2 = (b - self.t) / uf;
            window_parts.push((v1.min(v2), v1.max(v2)));
        }
        set = set.intersect(&IntervalSet::from_parts(window_parts));

        if self.variant == RegionVariant::S2 {
            let clip = vmax + 1.0;
            // |v| |uv + T| <= X2, a quadratic in v
            set = set.intersect(&abs_quadratic_sublevel(uf, self.t, self.x2, clip));
            // |u| v^2 |uv + T| <= X3, a cubic in v
            set = set.intersect(&abs_cubic_sublevel(uf, self.t, self.x3 / au, clip));
        }
        set
    }

    /// Disjoint integer ranges of the section at `u`. Interval endpoints come
    /// from floating point with error far below 1, so the true boundary
    /// integer is within one of the predicted one; the exact test settles it.
    fn v_integer_ranges(&self, u: i64) -> Vec<(i64, i64)> {
        let pred = |v: i64| self.contains_exact(u, v);
        integer_ranges_from_intervals(&self.v_section(u), &pred)
    }
}

/// Turns float intervals into exact integer ranges: the candidate boundary
/// window is one integer wide on each side, and the interior is certain
/// because the float endpoints carry sub-integer error.
fn integer_ranges_from_intervals(
    set: &IntervalSet,
    pred: &dyn Fn(i64) -> bool,
) -> Vec<(i64, i64)> {
    let mut ranges: Vec<(i64, i64)> = Vec::new();
    for &(lo, hi) in &set.parts {
        let a = lo.ceil() as i64;
        let b = hi.floor() as i64;
        if b < a - 1 {
            continue;
        }
        let start = ((a - 1)..=(a + 1).min(b + 1)).find(|&v| pred(v));
        let Some(start) = start else { continue };
        let end = ((b - 1).max(start)..=(b + 1)).rev().find(|&v| pred(v)).unwrap_or(start);
        ranges.push((start, end));
    }
    ranges.sort_unstable();
    let mut merged: Vec<(i64, i64)> = Vec::new();
    for (lo, hi) in ranges {
        match merged.last_mut() {
            Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Lattice counts of one region classified by `u v` mod `q`.
#[derive(Debug, Clone)]
pub struct RegionProfile {
    pub q: u64,
    pub class_counts: Vec<u64>,
}

impl RegionProfile {
    /// `D(S; q, a)` for a unit class `a`.
    pub fn d_count(&self, a: i64) -> u64 {
        self.class_counts[a.rem_euclid(self.q as i64) as usize]
    }

    /// `D*(S; q)`: unit-class total divided by `phi(q)`.
    pub fn d_star(&self) -> f64 {
        let mut units = 0u64;
        let mut phi = 0u64;
        for (a, &n) in self.class_counts.iter().enumerate() {
            if num::integer::gcd(a as u64, self.q) == 1 {
                units += n;
                phi += 1;
            }
        }
        if self.q == 1 {
            return self.class_counts[0] as f64;
        }
        units as f64 / phi as f64
    }

    pub fn total(&self) -> u64 {
        self.class_counts.iter().sum()
    }

    /// `max_a |D - D*|` over unit classes.
    pub fn max_unit_error(&self) -> f64 {
        let star = self.d_star();
        let mut worst = 0.0f64;
        for (a, &n) in self.class_counts.iter().enumerate() {
            if num::integer::gcd(a as u64, self.q) == 1 {
                worst = worst.max((n as f64 - star).abs());
            }
        }
        worst
    }
}

/// Classifies every lattice point of the region by `u v` mod `q`, for all the
/// requested moduli in one sweep over `u` (the sections do not depend on `q`).
pub fn region_class_profile(params: &RegionParams, qs: &[u64]) -> Vec<RegionProfile> {
    let mut profiles: Vec<RegionProfile> =
        qs.iter().map(|&q| RegionProfile { q, class_counts: vec![0; q as usize] }).collect();
    let (lo, hi) = params.u_magnitudes();
    for au in lo..=hi {
        for u in [au, -au] {
            let ranges = params.v_integer_ranges(u);
            if ranges.is_empty() {
                continue;
            }
            for profile in profiles.iter_mut() {
                let q = profile.q;
                let ur = u.rem_euclid(q as i64) as u64;
                for r in 0..q {
                    let mut count = 0u64;
                    for &(a, b) in &ranges {
                        let qi = q as i64;
                        let ri = r as i64;
                        count += (((b - ri).div_euclid(qi)) - ((a - 1 - ri).div_euclid(qi))) as u64;
                    }
                    if count > 0 {
                        profile.class_counts[((ur * r) % q) as usize] += count;
                    }
                }
            }
        }
    }
    profiles
}

/// `D(S; q, a)`: lattice points of the region with `u v = a mod q`.
pub fn d_count(params: &RegionParams, q: u64, a: i64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if q > 1 && num::integer::gcd(a.rem_euclid(q as i64) as u64, q) != 1 {
        return Err(Error::InvalidInput("residue must be coprime to the modulus".into()));
    }
    Ok(region_class_profile(params, &[q])[0].d_count(a))
}

/// `D*(S; q)`: coprime-product lattice count divided by `phi(q)`.
pub fn d_star(params: &RegionParams, q: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    Ok(region_class_profile(params, &[q])[0].d_star())
}

/// One row of an equidistribution error profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfileRow {
    pub q: u64,
    pub max_error: f64,
    pub reference_bound: f64,
    pub ratio: f64,
}

/// Error profile over a modulus range, with the reference bound
/// `X^(2/3+eps)/sqrt(q) + (X/phi(q))(1/L1 + 1/L2)` for `S`/`S1` and
/// `X^(4/5+eps)/q^(7/10) + (X/phi(q))(1/L1 + 1/L2)` for `S2`.
/// Moduli beyond `X^(2/3)` are excluded and reported separately.
pub fn error_profile(
    params: &RegionParams,
    qs: &[u64],
    eps: f64,
    sieve: &FactorSieve,
) -> (Vec<ProfileRow>, Vec<u64>) {
    let q_cap = params.x.powf(2.0 / 3.0);
    let mut admissible: Vec<u64> = qs.iter().copied().filter(|&q| (q as f64) <= q_cap).collect();
    let skipped: Vec<u64> = qs.iter().copied().filter(|&q| (q as f64) > q_cap).collect();
    admissible.sort_unstable();
    admissible.dedup();
    let profiles = region_class_profile(params, &admissible);
    let rows = profiles
        .iter()
        .map(|p| {
            let q = p.q;
            let phi = sieve.phi(q) as f64;
            let second = params.x / phi * (1.0 / params.l1 + 1.0 / params.l2);
            let first = match params.variant {
                RegionVariant::S | RegionVariant::S1 => {
                    params.x.powf(2.0 / 3.0 + eps) / (q as f64).sqrt()
                }
                RegionVariant::S2 => params.x.powf(4.0 / 5.0 + eps) / (q as f64).powf(0.7),
            };
            let bound = first + second;
            let max_error = p.max_unit_error();
            ProfileRow { q, max_error, reference_bound: bound, ratio: max_error / bound }
        })
        .collect();
    (rows, skipped)
}

/// Integers with `|y^2 + 2Ay| <= level`; the sublevel set is a union of at
/// most two closed intervals, counted with exact boundary resolution.
fn quadratic_sublevel_count(a: f64, level: f64) -> u64 {
    if level < 0.0 {
        return 0;
    }
    let pred = |n: i64| -> bool {
        let nf = n as f64;
        (nf * nf + 2.0 * a * nf).abs() <= level
    };
    let clip = (level + a * a).sqrt() + a.abs() + 2.0;
    let set = abs_quadratic_sublevel(1.0, 2.0 * a, level, clip);
    integer_ranges_from_intervals(&set, &pred)
        .into_iter()
        .map(|(lo, hi)| (hi - lo + 1) as u64)
        .sum()
}

/// Counts integers `y` with `Y' < |y^2 + 2Ay| <= Y` as the difference of two
/// sublevel counts, and returns the analytic band bound `delta^(1/2) M + 1`
/// with `M = max(|A|, sqrt(Y))` and `delta = (Y - Y')/M^2` clamped to
/// `(0, 1]`.
pub fn quadratic_band_count(a: f64, y: f64, y_prime: f64) -> (u64, f64) {
    assert!(y > 0.0, "upper band level must be positive");
    let count = quadratic_sublevel_count(a, y) - quadratic_sublevel_count(a, y_prime.min(y));
    let m = a.abs().max(y.sqrt());
    let delta = ((y - y_prime) / (m * m)).clamp(f64::MIN_POSITIVE, 1.0);
    (count, delta.sqrt() * m + 1.0)
}
