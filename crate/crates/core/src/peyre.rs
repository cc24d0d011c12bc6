//! Every factor of the conjectured leading constant, computed independently
//! of the point counts: exact polytope volumes (alpha), the archimedean
//! density as a volume of an explicit region, the p-adic Euler product, the
//! local factors of the Theta sums, and the assembled constant.

use crate::arith::{phi_prime_at, primes_up_to};
use crate::error::{Error, Result};
use crate::polytope::{rat, to_f64, Rat, RationalPolytope};
use crate::quad::{abs_quadratic_sublevel, adaptive_simpson_panels, IntervalSet, Quadrature};
use crate::surfaces::SurfaceId;
use num::{One, Zero};
use serde::Serialize;
use std::sync::OnceLock;

/// The three archimedean/local-density variants: one region for the first
/// surface, two equivalent regions for the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityVariant {
    V1,
    V2A,
    V2B,
}

/// The polytope whose volume is the alpha factor, one per variant. Each lives
/// in the nonnegative orthant of R^5.
pub fn alpha_polytope(variant: DensityVariant) -> RationalPolytope {
    let mut p = RationalPolytope::orthant(5);
    match variant {
        DensityVariant::V1 => {
            p.ge(&[2, 3, -1, 4, 2], 1);
            p.le(&[1, 2, 0, 2, 1], 1);
            p.le(&[2, 1, 1, 2, 0], 1);
            p.le(&[0, 1, 1, 0, 4], 1);
        }
        DensityVariant::V2A => {
            p.le(&[-2, 4, 2, -1, -3], 1);
            p.le(&[4, -2, -1, 2, 3], 1);
            p.le(&[1, 1, 2, 2, 0], 1);
            p.le(&[2, 2, 1, 1, 6], 2);
        }
        DensityVariant::V2B => {
            p.le(&[0, 2, 1, 0, 1], 1);
            p.ge(&[-2, 4, 2, -1, 3], 1);
            p.le(&[1, 1, 2, 2, 0], 1);
            p.le(&[2, 2, 1, 1, 6], 2);
        }
    }
    p
}

/// Exact alpha factors.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha {
    V1 { alpha: Rat },
    V2 { alpha_a: Rat, alpha_b: Rat, alpha: Rat },
}

impl Alpha {
    pub fn alpha(&self) -> &Rat {
        match self {
            Alpha::V1 { alpha } => alpha,
            Alpha::V2 { alpha, .. } => alpha,
        }
    }
}

/// Computes the alpha factors from the polytopes. For the second surface the
/// two contributions combine as `alpha = (alpha_a + alpha_b) / 3`.
pub fn alpha_constants(surface: SurfaceId) -> Result<Alpha> {
    match surface {
        SurfaceId::V1 => {
            let alpha = alpha_polytope(DensityVariant::V1).volume()?;
            Ok(Alpha::V1 { alpha })
        }
        SurfaceId::V2 => {
            let alpha_a = alpha_polytope(DensityVariant::V2A).volume()?;
            let alpha_b = alpha_polytope(DensityVariant::V2B).volume()?;
            let alpha = (&alpha_a + &alpha_b) / rat(3, 1);
            Ok(Alpha::V2 { alpha_a, alpha_b, alpha })
        }
    }
}

fn cached_alpha(surface: SurfaceId) -> &'static Alpha {
    static V1: OnceLock<Alpha> = OnceLock::new();
    static V2: OnceLock<Alpha> = OnceLock::new();
    match surface {
        SurfaceId::V1 => V1.get_or_init(|| alpha_constants(SurfaceId::V1).unwrap()),
        SurfaceId::V2 => V2.get_or_init(|| alpha_constants(SurfaceId::V2).unwrap()),
    }
}

/// The max-of-monomials height density of a variant at `(t4, t5, t)`, where
/// the last coordinate is `t6` for `V1` and `t1` for the `V2` variants.
pub fn density_h(variant: DensityVariant, t4: f64, t5: f64, t: f64) -> f64 {
    match variant {
        DensityVariant::V1 => {
            let t6 = t;
            (t4 * t4 * t5 * t5)
                .max(t6 * t6)
                .max(t4.abs() * t6 * t6 * (t4 * t5 + t6).abs())
                .max(t5.abs())
        }
        DensityVariant::V2A => {
            let t1 = t;
            let w = t4 * t5 + t1 * t1;
            (t4.abs() * w.abs())
                .max(t1 * t1 * t5.abs())
                .max(t1 * (t4 * t5).abs())
                .max(t1 * w.abs())
                .max(t4.abs() * t5 * t5)
        }
        DensityVariant::V2B => {
            let t1 = t;
            let w = t4 * t5 + t1 * t1;
            t4.abs()
                .max(t1 * t1 * t5.abs() * w.abs())
                .max(t1 * (t4 * t5).abs())
                .max(t1 * w.abs())
                .max(t4.abs() * t5 * t5 * w.abs())
        }
    }
}

/// Measure of the `t4`-section of `{h <= 1}` for `V1` at fixed `(t5, t6)`:
/// the intersection of `|t4 t5| <= 1` with a quadratic sublevel set, computed
/// analytically.
fn v1_t4_measure(t5: f64, t6: f64) -> f64 {
    if t6 <= 0.0 || t6 > 1.0 || t5.abs() > 1.0 {
        return 0.0;
    }
    let c = 1.0 / (t6 * t6);
    let clip = if t5 != 0.0 { 1.0 / t5.abs() } else { c / t6 };
    // |t4| t6^2 |t4 t5 + t6| <= 1 is |t5 t4^2 + t6 t4| <= 1/t6^2
    abs_quadratic_sublevel(t5, t6, c, clip).total_length()
}

/// One-ulp forgiveness on the closed constraint boundaries: the cut levels
/// are themselves computed in floating point, and a boundary slice carries no
/// measure.
const EDGE: f64 = 1.0 + 1e-12;

/// Measure of the `t4`-section of `{h^a <= 1, t1 > 0}` at fixed `(t5, t1)`.
fn v2a_t4_measure(t5: f64, t1: f64) -> f64 {
    if t1 <= 0.0 || !t5.is_finite() || t5.abs() > 1e15 {
        return 0.0;
    }
    if t1 * t1 * t5.abs() > EDGE {
        return 0.0;
    }
    let mut set;
    if t5 == 0.0 {
        if t1 * t1 * t1 > EDGE {
            return 0.0;
        }
        let r = 1.0 / (t1 * t1);
        set = IntervalSet::single(-r, r);
    } else {
        let clip = 1.0 / (t1 * t5.abs());
        // |t4 (t4 t5 + t1^2)| <= 1
        set = abs_quadratic_sublevel(t5, t1 * t1, 1.0, clip);
        // |t4| t5^2 <= 1
        let r5 = 1.0 / (t5 * t5);
        set = set.intersect(&IntervalSet::single(-r5.min(clip), r5.min(clip)));
        // |t4 t5 + t1^2| <= 1/t1
        let w = 1.0 / t1;
        let v1 = (-w - t1 * t1) / t5;
        let v2 = (w - t1 * t1) / t5;
        set = set.intersect(&IntervalSet::single(v1.min(v2), v1.max(v2)));
    }
    set.total_length()
}

/// Measure of the `t4`-section of `{h^b <= 1, t1 > 0}` at fixed `(t5, t1)`.
fn v2b_t4_measure(t5: f64, t1: f64) -> f64 {
    if t1 <= 0.0 || !t5.is_finite() || t5.abs() > 1e15 {
        return 0.0;
    }
    let mut set = IntervalSet::single(-1.0, 1.0); // |t4| <= 1
    if t5 == 0.0 {
        if t1 * t1 * t1 > EDGE {
            return 0.0;
        }
        return set.total_length();
    }
    // t1 |t4 t5| <= 1
    let r3 = 1.0 / (t1 * t5.abs());
    set = set.intersect(&IntervalSet::single(-r3, r3));
    // windows for |t4 t5 + t1^2|: from t1 |.| <= 1 and t1^2 |t5| |.| <= 1
    let w = (1.0 / t1).min(1.0 / (t1 * t1 * t5.abs()));
    let v1 = (-w - t1 * t1) / t5;
    let v2 = (w - t1 * t1) / t5;
    set = set.intersect(&IntervalSet::single(v1.min(v2), v1.max(v2)));
    // |t4| t5^2 |t4 t5 + t1^2| <= 1
    set = set.intersect(&abs_quadratic_sublevel(t5, t1 * t1, 1.0 / (t5 * t5), 2.0));
    set.total_length()
}

/// Integral over all of `t5` of a section measure. The core `|t5| <= 1` is
/// taken through `t5 = u^2`, which flattens the narrow high plateau the
/// sections develop near `t5 = 0` (the measures decay at least like
/// `1/sqrt(|t5|)` there, so the substituted integrand stays bounded); the
/// range `|t5| > 1` goes through `t5 -> 1/w`.
fn integrate_t5(measure: &dyn Fn(f64, f64) -> f64, aux: f64, t5_cap: f64, tol: f64) -> Quadrature {
    let core_hi = t5_cap.min(1.0);
    let mut total = Quadrature { value: 0.0, error: 0.0 };
    let core = adaptive_simpson_panels(
        &mut |u| {
            let t5 = u * u;
            2.0 * u * (measure(t5, aux) + measure(-t5, aux))
        },
        0.0,
        core_hi.sqrt(),
        tol * 0.5,
        8,
    );
    total.value += core.value;
    total.error += core.error;
    if t5_cap > 1.0 {
        let w_lo = 1.0 / t5_cap;
        let tail = adaptive_simpson_panels(
            &mut |w| {
                if w <= 0.0 {
                    return 0.0;
                }
                let t5 = 1.0 / w;
                (measure(t5, aux) + measure(-t5, aux)) / (w * w)
            },
            w_lo,
            1.0,
            tol * 0.5,
            8,
        );
        total.value += tail.value;
        total.error += tail.error;
    }
    total
}

/// `omega_infinity` for `V1`: twice the volume of `{t6 > 0, h <= 1}`. The
/// inner `t4`-measure is analytic; the `(t5, t6)` integral is softened by the
/// cube substitution so the integrand is bounded.
pub fn omega_infinity_v1(tol_abs: f64) -> Quadrature {
    let inner_tol = tol_abs / 40.0;
    let outer = adaptive_simpson_panels(
        &mut |w| {
            let t6 = w * w * w;
            if t6 <= 0.0 {
                return 0.0;
            }
            let inner = adaptive_simpson_panels(
                &mut |u| {
                    let t5 = u * u * u;
                    3.0 * u * u * (v1_t4_measure(t5, t6) + v1_t4_measure(-t5, t6))
                },
                0.0,
                1.0,
                inner_tol,
                8,
            );
            3.0 * w * w * inner.value
        },
        0.0,
        1.0,
        tol_abs / 3.0,
        16,
    );
    Quadrature { value: 2.0 * outer.value, error: 2.0 * (outer.error + 12.0 * inner_tol) }
}

/// `tau_infinity` computed from the first `V2` region.
pub fn tau_infinity_a(tol_abs: f64) -> Quadrature {
    tau_infinity(&v2a_t4_measure, true, tol_abs)
}

/// `tau_infinity` computed from the second, equivalent `V2` region.
pub fn tau_infinity_b(tol_abs: f64) -> Quadrature {
    tau_infinity(&v2b_t4_measure, false, tol_abs)
}

/// Outer integrand of the first tau expression at fixed `t1` (diagnostic).
pub fn tau_outer_integrand_a(t1: f64, tol: f64) -> f64 {
    if t1 <= 0.0 {
        return 0.0;
    }
    integrate_t5(&v2a_t4_measure, t1, 1.0 / (t1 * t1), tol).value
}

fn tau_infinity(measure: &dyn Fn(f64, f64) -> f64, capped_t5: bool, tol_abs: f64) -> Quadrature {
    let inner_tol = tol_abs / 40.0;
    let t1_hi = 2f64.powf(1.0 / 3.0);
    let outer = adaptive_simpson_panels(
        &mut |t1| {
            if t1 <= 0.0 {
                return 0.0;
            }
            // the first region forces t1^2 |t5| <= 1; the second has no such
            // cap but decays like 1/(t1 t5)^2, which the tail substitution
            // keeps bounded
            let cap = if capped_t5 { 1.0 / (t1 * t1) } else { 1e15 };
            integrate_t5(measure, t1, cap, inner_tol).value
        },
        1e-9,
        t1_hi,
        tol_abs / 3.0,
        16,
    );
    Quadrature { value: 3.0 * outer.value, error: 3.0 * (outer.error + 15.0 * inner_tol) }
}

/// Archimedean density with an error estimate; for `V2` both equivalent
/// expressions are computed and reported.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArchDensity {
    pub value: f64,
    pub error: f64,
    pub variant_a: Option<f64>,
    pub variant_b: Option<f64>,
}

pub fn archimedean_density(surface: SurfaceId, tol: f64) -> Result<ArchDensity> {
    if tol < 1e-4 {
        return Err(Error::InvalidInput("tolerance below the supported 1e-4".into()));
    }
    match surface {
        SurfaceId::V1 => {
            let rough = omega_infinity_v1(0.05);
            let q = omega_infinity_v1(tol * rough.value.max(1.0));
            if q.error > 3.0 * tol * q.value.max(1.0) {
                return Err(Error::NonConvergent { requested: tol, achieved: q.error / q.value });
            }
            Ok(ArchDensity { value: q.value, error: q.error, variant_a: None, variant_b: None })
        }
        SurfaceId::V2 => {
            let rough = tau_infinity_a(0.05);
            let abs = tol * rough.value.max(1.0);
            let a = tau_infinity_a(abs);
            let b = tau_infinity_b(abs);
            let value = 0.5 * (a.value + b.value);
            let error = 0.5 * (a.error + b.error) + 0.5 * (a.value - b.value).abs();
            Ok(ArchDensity { value, error, variant_a: Some(a.value), variant_b: Some(b.value) })
        }
    }
}

/// One factor of the p-adic Euler product, exact:
/// `(1 - 1/p)^6 (1 + 6/p + 1/p^2)`.
pub fn euler_factor(p: u64) -> Rat {
    let p = p as i64;
    let mut f = Rat::one() + rat(6, p) + rat(1, p * p);
    let base = Rat::one() - rat(1, p);
    for _ in 0..6 {
        f *= base.clone();
    }
    f
}

/// Partial Euler product over primes up to `prime_limit`, with a rigorous
/// tail bound: `|log factor| <= 21/p^2` for `p >= 5`, and
/// `sum_{p > L} 1/p^2 < 1/(L - 1)`.
pub fn euler_product(prime_limit: u64) -> (f64, f64) {
    assert!(prime_limit >= 2);
    let mut value = 1.0f64;
    for p in primes_up_to(prime_limit) {
        let pf = p as f64;
        value *= (1.0 - 1.0 / pf).powi(6) * (1.0 + 6.0 / pf + 1.0 / (pf * pf));
    }
    let tail = value * ((21.0 / (prime_limit as f64 - 1.0)).exp() - 1.0);
    (value, tail)
}

/// Theta evaluated at the prime-power tuple whose support pattern is `flags`
/// (coordinate `i` equals `p` when `flags[i]`, else 1), or zero when the
/// residual coprimality conditions rule the pattern out.
///
/// Coordinate order: `(t1, t2, t3, t7, t9)` for `V1`, `(t2, t3, t6, t7, t9)`
/// for the first `V2` region, `(t2, t3, t6, t7, t8)` for the second.
fn theta_pattern(variant: DensityVariant, p: u64, flags: [bool; 5]) -> Rat {
    let any = |idx: &[usize]| idx.iter().any(|&i| flags[i]);
    let star = |present: bool| {
        if present {
            Rat::one() - rat(1, p as i64)
        } else {
            Rat::one()
        }
    };
    let dagger = |present: bool| {
        if present {
            Rat::one() - rat(1, (p * p) as i64)
        } else {
            Rat::one()
        }
    };
    let prime_factor = |present: bool| if present { phi_prime_at(p) } else { Rat::one() };
    match variant {
        DensityVariant::V1 => {
            let [n1, n2, n3, n7, n9] = flags;
            // support rule from the residual coprimality conditions
            if (n3 && (n1 || n2 || n7 || n9)) || (n1 && (n2 || n9)) || (n9 && n7) {
                return Rat::zero();
            }
            star(n1 || n2 || n7) * star(n1 || n3 || n7) * star(n2 || n9) / star(n2 && n7)
                * star(n2 || n7 || n9)
                * dagger(n3)
                * prime_factor(any(&[0, 1, 2, 3, 4]))
        }
        DensityVariant::V2A => {
            let [n2, n3, n6, n7, n9] = flags;
            if (n3 && (n2 || n7 || n9)) || (n6 && (n2 || n7 || n9)) || (n7 && n9) {
                return Rat::zero();
            }
            star(n2 || n6 || n7) * star(n3 || n6 || n7) * star(n2 || n9) / star(n2 && n7)
                * star(n2 || n3 || n9)
                * prime_factor(any(&[0, 1, 2, 3, 4]))
        }
        DensityVariant::V2B => {
            let [n2, n3, n6, n7, n8] = flags;
            if (n2 && (n3 || n6 || n8)) || (n7 && (n3 || n6 || n8)) || (n8 && n6) {
                return Rat::zero();
            }
            star(n2 || n6 || n7) * star(n3 || n6 || n7) * star(n3 || n8) / star(n3 && n6)
                * star(n2 || n3 || n8)
                * prime_factor(any(&[0, 1, 2, 3, 4]))
        }
    }
}

/// The local factor `sum over exponent vectors k of Theta(p^k) / p^|k|`,
/// exact. Theta depends only on the support of `k`, so the sum collapses to
/// the 32 support patterns weighted by `(1/(p-1))^#support`.
pub fn theta_local_factor(variant: DensityVariant, p: u64) -> Result<Rat> {
    if p > 10_000 {
        return Err(Error::CapExceeded("theta local factors supported for p <= 10^4".into()));
    }
    if p < 2 {
        return Err(Error::InvalidInput("p must be a prime".into()));
    }
    let weight = rat(1, p as i64 - 1);
    let mut sum = Rat::zero();
    for mask in 0u32..32 {
        let flags = [
            mask & 1 != 0,
            mask & 2 != 0,
            mask & 4 != 0,
            mask & 8 != 0,
            mask & 16 != 0,
        ];
        let v = theta_pattern(variant, p, flags);
        if v.is_zero() {
            continue;
        }
        let mut w = Rat::one();
        for _ in 0..mask.count_ones() {
            w *= weight.clone();
        }
        sum += v * w;
    }
    Ok(sum)
}

/// An exact rational carried alongside its floating approximation.
#[derive(Debug, Clone, Serialize)]
pub struct RationalField {
    pub numer: String,
    pub denom: String,
    pub value: f64,
}

impl RationalField {
    fn from_rat(r: &Rat) -> Self {
        RationalField { numer: r.numer().to_string(), denom: r.denom().to_string(), value: to_f64(r) }
    }
}

/// The assembled leading constant with every factor reported separately.
#[derive(Debug, Clone, Serialize)]
pub struct PeyreBreakdown {
    pub surface: SurfaceId,
    pub alpha: RationalField,
    pub alpha_a: Option<RationalField>,
    pub alpha_b: Option<RationalField>,
    pub beta: u64,
    pub omega_infinity: f64,
    pub omega_infinity_error: f64,
    pub tau_variant_a: Option<f64>,
    pub tau_variant_b: Option<f64>,
    pub euler_product: f64,
    pub euler_tail_bound: f64,
    pub euler_prime_limit: u64,
    pub c: f64,
    pub c_error: f64,
}

impl PeyreBreakdown {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("breakdown serializes")
    }
}

/// Assembles `c = alpha * beta * omega_infinity * euler_product` with
/// propagated error bounds.
pub fn peyre_constant(surface: SurfaceId, tol: f64) -> Result<PeyreBreakdown> {
    peyre_constant_with(surface, tol, 1_000_000)
}

pub fn peyre_constant_with(surface: SurfaceId, tol: f64, prime_limit: u64) -> Result<PeyreBreakdown> {
    let alpha = cached_alpha(surface);
    let arch = archimedean_density(surface, tol)?;
    let (ep, ep_tail) = euler_product(prime_limit);
    let a = to_f64(alpha.alpha());
    let c = a * arch.value * ep;
    let c_error = a * (arch.error * ep + arch.value * ep_tail + arch.error * ep_tail);
    let (alpha_a, alpha_b) = match alpha {
        Alpha::V1 { .. } => (None, None),
        Alpha::V2 { alpha_a, alpha_b, .. } => {
            (Some(RationalField::from_rat(alpha_a)), Some(RationalField::from_rat(alpha_b)))
        }
    };
    Ok(PeyreBreakdown {
        surface,
        alpha: RationalField::from_rat(alpha.alpha()),
        alpha_a,
        alpha_b,
        beta: 1,
        omega_infinity: arch.value,
        omega_infinity_error: arch.error,
        tau_variant_a: arch.variant_a,
        tau_variant_b: arch.variant_b,
        euler_product: ep,
        euler_tail_bound: ep_tail,
        euler_prime_limit: prime_limit,
        c,
        c_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::rat_int;

    #[test]
    fn alpha_values_match_known_constants() {
        match alpha_constants(SurfaceId::V1).unwrap() {
            Alpha::V1 { alpha } => assert_eq!(alpha, rat(1, 1440)),
            _ => unreachable!(),
        }
        match alpha_constants(SurfaceId::V2).unwrap() {
            Alpha::V2 { alpha_a, alpha_b, alpha } => {
                assert_eq!(alpha_a, rat(1871, 2_016_000));
                assert_eq!(alpha_b, rat(929, 2_016_000));
                assert_eq!(&alpha_a + &alpha_b, rat(1, 720));
                assert_eq!(alpha, rat(1, 2160));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn density_h_examples() {
        assert_eq!(density_h(DensityVariant::V1, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(density_h(DensityVariant::V1, 1.0, 1.0, 1.0), 2.0);
        assert_eq!(density_h(DensityVariant::V2A, 1.0, 1.0, 1.0), 2.0);
        assert_eq!(density_h(DensityVariant::V2B, 1.0, 1.0, 1.0), 2.0);
    }

    /// The analytic section measures agree with grid sampling of `h <= 1`.
    #[test]
    fn section_measures_match_density() {
        let cases = [(0.3, 0.7), (0.0, 0.5), (-0.6, 0.9), (0.85, 0.25), (-0.05, 0.95)];
        for &(t5, taux) in &cases {
            for (variant, measure) in [
                (DensityVariant::V1, v1_t4_measure as fn(f64, f64) -> f64),
                (DensityVariant::V2A, v2a_t4_measure as fn(f64, f64) -> f64),
                (DensityVariant::V2B, v2b_t4_measure as fn(f64, f64) -> f64),
            ] {
                let analytic = measure(t5, taux);
                let span = 400.0;
                let n = 4_000_000;
                let step = 2.0 * span / n as f64;
                let mut grid = 0.0;
                for i in 0..n {
                    let t4 = -span + (i as f64 + 0.5) * step;
                    if density_h(variant, t4, t5, taux) <= 1.0 {
                        grid += step;
                    }
                }
                assert!(
                    (analytic - grid).abs() < 2e-3 * (1.0 + analytic),
                    "{variant:?} at ({t5},{taux}): analytic {analytic} grid {grid}"
                );
            }
        }
    }

    #[test]
    fn v1_region_is_inside_the_unit_box_in_t5_t6() {
        // h <= 1 forces |t5| <= 1 and t6 <= 1
        assert_eq!(v1_t4_measure(1.2, 0.5), 0.0);
        assert_eq!(v1_t4_measure(0.5, 1.2), 0.0);
        assert!(v1_t4_measure(0.25, 0.25) > 0.0);
    }

    #[test]
    fn euler_factor_values() {
        assert_eq!(euler_factor(2), rat(17, 256));
        assert_eq!(euler_factor(3), rat(1792, 6561));
        let mut last = 1.0;
        for limit in [2u64, 3, 5, 7, 11, 13] {
            let (v, _) = euler_product(limit);
            assert!(v > 0.0 && v < last);
            last = v;
        }
        for p in primes_up_to(100) {
            let f = to_f64(&euler_factor(p));
            assert!(f > 0.0 && f < 1.0);
        }
    }

    #[test]
    fn euler_log_factor_bound_holds() {
        for p in primes_up_to(100_000) {
            if p < 5 {
                continue;
            }
            let pf = p as f64;
            let logf = (6.0 * (1.0 - 1.0 / pf).ln()) + (1.0 + 6.0 / pf + 1.0 / (pf * pf)).ln();
            assert!(logf.abs() <= 21.0 / (pf * pf), "log-factor bound fails at p={p}");
        }
    }

    #[test]
    fn euler_tails_nest() {
        let (v5, t5) = euler_product(100_000);
        let (v6, _) = euler_product(1_000_000);
        assert!((v5 - v6).abs() < t5, "tail bound {t5} exceeded by {}", (v5 - v6).abs());
    }

    #[test]
    fn theta_local_factors_close_the_density_identity() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let target = phi_prime_at(p)
                * (Rat::one() - rat(1, p as i64))
                * (Rat::one() + rat(6, p as i64) + rat(1, (p * p) as i64));
            for variant in [DensityVariant::V1, DensityVariant::V2A, DensityVariant::V2B] {
                assert_eq!(
                    theta_local_factor(variant, p).unwrap(),
                    target,
                    "local factor mismatch for {variant:?} at p={p}"
                );
            }
        }
    }

    #[test]
    fn theta_empty_pattern_contributes_one() {
        for variant in [DensityVariant::V1, DensityVariant::V2A, DensityVariant::V2B] {
            assert_eq!(theta_pattern(variant, 7, [false; 5]), rat_int(1));
        }
    }

    #[test]
    fn tau_variants_agree() {
        let d = archimedean_density(SurfaceId::V2, 1e-3).unwrap();
        let (a, b) = (d.variant_a.unwrap(), d.variant_b.unwrap());
        assert!(a > 0.0 && b > 0.0);
        assert!(
            (a - b).abs() <= 2.0 * d.error.max(1e-3 * d.value),
            "tau mismatch: {a} vs {b} with error {}",
            d.error
        );
    }

    #[test]
    fn breakdown_is_consistent() {
        let b = peyre_constant_with(SurfaceId::V1, 1e-3, 10_000).unwrap();
        assert_eq!(b.beta, 1);
        assert_eq!(b.alpha.value, 1.0 / 1440.0);
        assert!(b.c > 0.0);
        let reassembled = b.alpha.value * b.beta as f64 * b.omega_infinity * b.euler_product;
        assert!((b.c - reassembled).abs() <= b.c_error + 1e-15);
        let json = b.to_json();
        assert!(json.contains("\"beta\": 1"));
    }
}
