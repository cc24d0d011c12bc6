//! Desk-scale checks of the final summation machinery and the convergence
//! diagnostic `N(B) / (B log^5 B)` against the independently computed
//! constant.

use crate::error::{Error, Result};
use crate::peyre;
use crate::polytope::{to_f64, RationalPolytope};
use crate::surfaces::SurfaceId;
use crate::torsor;
use num::ToPrimitive;
use std::time::{Duration, Instant};

/// A log-polytope summation problem: the sum of `1/(n_1 ... n_r)` over
/// lattice boxes restricted by `(log n_i / log X) in D`.
pub struct LogPolytopeSpec {
    pub r: usize,
    pub d: RationalPolytope,
    pub x: u64,
}

impl LogPolytopeSpec {
    pub fn new(r: usize, d: RationalPolytope, x: u64) -> Result<Self> {
        if r == 0 || r > 3 {
            return Err(Error::CapExceeded("log-polytope sums support 1 <= r <= 3".into()));
        }
        if d.dim != r {
            return Err(Error::InvalidInput("polytope dimension must match r".into()));
        }
        let cap = if r == 3 { 1_000 } else { 1_000_000 };
        if x < 2 || x > cap {
            return Err(Error::CapExceeded(format!("X must lie in 2..={cap} for r={r}")));
        }
        // the hypothesis D inside the unit cube, checked on exact vertices
        for v in d.vertices() {
            for c in &v {
                if c < &num::BigRational::from_integer(0.into())
                    || c > &num::BigRational::from_integer(1.into())
                {
                    return Err(Error::InvalidInput("polytope must sit inside [0,1]^r".into()));
                }
            }
        }
        Ok(LogPolytopeSpec { r, d, x })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    pub sum: f64,
    pub main_term: f64,
    pub normalized_error: f64,
}

fn harmonic_prefix(x: u64) -> Vec<f64> {
    let mut h = vec![0.0f64; x as usize + 1];
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=x as usize {
        let term = 1.0 / n as f64;
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        h[n] = acc;
    }
    h
}

/// Section of the polytope at fixed leading coordinates: the interval of the
/// next coordinate, clipped by every halfspace.
fn section_interval(d: &RationalPolytope, fixed: &[f64], free: usize) -> Option<(f64, f64)> {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for (a, b) in &d.ineqs {
        let coeff = to_f64(&a[free]);
        let mut rhs = to_f64(b);
        for (i, &t) in fixed.iter().enumerate() {
            rhs -= to_f64(&a[i]) * t;
        }
        if coeff > 0.0 {
            hi = hi.min(rhs / coeff);
        } else if coeff < 0.0 {
            lo = lo.max(rhs / coeff);
        } else if rhs < -1e-12 {
            return None;
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Integer range `[X^lo, X^hi]` intersected with `[1, X]`. A one-part-in-1e9
/// guard keeps integers that sit exactly on a boundary from being lost to
/// exp/ln roundoff.
fn power_range(x: u64, lo: f64, hi: f64) -> Option<(u64, u64)> {
    let ln_x = (x as f64).ln();
    let n_lo = ((lo * ln_x).exp() * (1.0 - 1e-9)).ceil().max(1.0) as u64;
    let n_hi = (((hi * ln_x).exp() * (1.0 + 1e-9)).floor() as u64).min(x);
    (n_lo <= n_hi).then_some((n_lo, n_hi))
}

/// `sum over boxes of f(log n / log X) / prod n_i` against
/// `vol(D) log(X)^r`, normalized by `log(X)^(r-1)`.
pub fn log_polytope_sum(spec: &LogPolytopeSpec) -> Result<LogSum> {
    let x = spec.x;
    let ln_x = (x as f64).ln();
    let h = harmonic_prefix(x);
    let range_sum = |r: Option<(u64, u64)>| -> f64 {
        match r {
            Some((a, b)) => h[b as usize] - h[a as usize - 1],
            None => 0.0,
        }
    };
    let sum = match spec.r {
        1 => range_sum(section_interval(&spec.d, &[], 0).and_then(|(lo, hi)| power_range(x, lo, hi))),
        2 => {
            let mut acc = 0.0;
            for n1 in 1..=x {
                let t1 = (n1 as f64).ln() / ln_x;
                let inner = section_interval(&spec.d, &[t1], 1)
                    .and_then(|(lo, hi)| power_range(x, lo, hi));
                acc += range_sum(inner) / n1 as f64;
            }
            acc
        }
        3 => {
            let mut acc = 0.0;
            for n1 in 1..=x {
                let t1 = (n1 as f64).ln() / ln_x;
                for n2 in 1..=x {
                    let t2 = (n2 as f64).ln() / ln_x;
                    let inner = section_interval(&spec.d, &[t1, t2], 2)
                        .and_then(|(lo, hi)| power_range(x, lo, hi));
                    acc += range_sum(inner) / (n1 as f64 * n2 as f64);
                }
            }
            acc
        }
        _ => unreachable!(),
    };
    let vol = to_f64(&spec.d.volume()?);
    let main_term = vol * ln_x.powi(spec.r as i32);
    let normalized_error = (sum - main_term).abs() / ln_x.powi(spec.r as i32 - 1);
    Ok(LogSum { sum, main_term, normalized_error })
}

/// A convolution-method summation problem: an arithmetic function of `r`
/// variables, its convolution with the coordinatewise Moebius function, and
/// the monomial constraints `prod n_i^(beta_ij) <= X^(eps_j)` cutting the
/// index set.
pub struct ConvolvedInput<'a> {
    pub r: usize,
    pub psi: &'a dyn Fn(&[u64]) -> f64,
    pub psi_mu: &'a dyn Fn(&[u64]) -> f64,
    pub constraints: Vec<(Vec<f64>, i32)>,
    pub x: u64,
    /// Cap on the product of the coordinates in the truncated constant.
    pub truncation: u64,
    /// Caller-supplied bound on the truncated remainder of the constant.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ConvolvedEstimate {
    pub lhs: f64,
    pub rhs_main: f64,
    pub normalized_error: f64,
    pub constant: f64,
    pub constant_tail: f64,
    pub volume: f64,
}

/// Direct summation of `Psi(n)/prod n` over the constrained index set against
/// `vol(C) (sum (Psi*mu)(n)/prod n) log(X)^r`.
pub fn convolved_sum_estimate(input: &ConvolvedInput<'_>) -> Result<ConvolvedEstimate> {
    if input.r == 0 || input.r > 2 {
        return Err(Error::CapExceeded("convolved sums support r in {1, 2}".into()));
    }
    let x = input.x as f64;
    let ln_x = x.ln();
    // the polytope C from the constraints, inside the nonnegative orthant
    let mut c_poly = RationalPolytope::orthant(input.r);
    for (beta, eps) in &input.constraints {
        let coeffs: Vec<num::BigRational> = beta
            .iter()
            .map(|&b| num::BigRational::from_float(b).expect("finite exponent"))
            .collect();
        c_poly.le_rat(coeffs, num::BigRational::from_integer((*eps).into()));
    }
    for v in c_poly.vertices() {
        for coord in &v {
            let cf = coord.to_f64().unwrap();
            if !(-1e-12..=1.0 + 1e-12).contains(&cf) {
                return Err(Error::InvalidInput(
                    "constraint polytope must sit inside [0,1]^r".into(),
                ));
            }
        }
    }
    let volume = to_f64(&c_poly.volume()?);

    let in_region = |n: &[u64]| -> bool {
        input.constraints.iter().all(|(beta, eps)| {
            let lhs: f64 = beta.iter().zip(n).map(|(&b, &ni)| b * (ni as f64).ln()).sum();
            lhs <= *eps as f64 * ln_x + 1e-9
        })
    };
    let mut lhs = 0.0f64;
    let monotone = input.constraints.iter().all(|(beta, _)| beta.iter().all(|&b| b >= 0.0));
    match input.r {
        1 => {
            for n in 1..=input.x {
                if in_region(&[n]) {
                    lhs += (input.psi)(&[n]) / n as f64;
                }
            }
        }
        2 => {
            for n1 in 1..=input.x {
                for n2 in 1..=input.x {
                    let pair = [n1, n2];
                    if !in_region(&pair) {
                        if monotone {
                            break; // leaving the region for good in this row
                        }
                        continue;
                    }
                    lhs += (input.psi)(&pair) / (n1 as f64 * n2 as f64);
                }
            }
        }
        _ => unreachable!(),
    }

    let mut constant = 0.0f64;
    match input.r {
        1 => {
            for d in 1..=input.truncation {
                constant += (input.psi_mu)(&[d]) / d as f64;
            }
        }
        2 => {
            for d1 in 1..=input.truncation {
                for d2 in 1..=input.truncation / d1 {
                    constant += (input.psi_mu)(&[d1, d2]) / (d1 as f64 * d2 as f64);
                }
            }
        }
        _ => unreachable!(),
    }

    let rhs_main = volume * constant * ln_x.powi(input.r as i32);
    let normalized_error = (lhs - rhs_main).abs() / ln_x.powi(input.r as i32 - 1);
    Ok(ConvolvedEstimate {
        lhs,
        rhs_main,
        normalized_error,
        constant,
        constant_tail: input.tail_bound,
        volume,
    })
}

/// One row of the convergence diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct RatioRow {
    pub b: u64,
    pub count: Option<u64>,
    pub ratio: Option<f64>,
    pub c_reference: f64,
    pub relative_gap: Option<f64>,
}

/// `N(B) / (B log^5 B)` for each height in `b_list`, next to the Peyre
/// constant computed independently. Rows whose enumeration does not start
/// before the time budget expires are marked incomplete.
pub fn ratio_table(
    surface: SurfaceId,
    b_list: &[u64],
    tol: f64,
    budget: Option<Duration>,
) -> Result<Vec<RatioRow>> {
    let c_reference = peyre::peyre_constant(surface, tol)?.c;
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut sorted = b_list.to_vec();
    sorted.sort_unstable();
    for b in sorted {
        let expired = budget.map_or(false, |limit| start.elapsed() >= limit);
        if expired {
            rows.push(RatioRow { b, count: None, ratio: None, c_reference, relative_gap: None });
            continue;
        }
        let n = torsor::count_via_torsor(surface, b)?.count;
        let ln_b = (b as f64).ln();
        let ratio = if b > 1 { n as f64 / (b as f64 * ln_b.powi(5)) } else { 0.0 };
        rows.push(RatioRow {
            b,
            count: Some(n),
            ratio: Some(ratio),
            c_reference,
            relative_gap: Some((ratio - c_reference).abs() / c_reference),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::rat;

    fn interval_polytope(lo: (i64, i64), hi: (i64, i64)) -> RationalPolytope {
        let mut d = RationalPolytope::orthant(1);
        d.le_rat(vec![rat(-1, 1)], rat(-lo.0, lo.1));
        d.le_rat(vec![rat(1, 1)], rat(hi.0, hi.1));
        d
    }

    #[test]
    fn harmonic_case_r1() {
        let spec = LogPolytopeSpec::new(1, interval_polytope((0, 1), (1, 1)), 1_000_000).unwrap();
        let r = log_polytope_sum(&spec).unwrap();
        // sum is H(10^6), main term is log(10^6); the gap tends to gamma
        assert!(r.normalized_error < 1.0);
        assert!((r.sum - r.main_term - 0.5772156649).abs() < 1e-3);
    }

    #[test]
    fn subinterval_counts_the_right_block() {
        let x = 10_000u64;
        let spec = LogPolytopeSpec::new(1, interval_polytope((1, 4), (1, 2)), x).unwrap();
        let r = log_polytope_sum(&spec).unwrap();
        let ln_x = (x as f64).ln();
        // exact integer form of X^(1/4) <= n <= X^(1/2)
        let direct: f64 = (1..=x)
            .filter(|&n| n.pow(4) >= x && n * n <= x)
            .map(|n| 1.0 / n as f64)
            .sum();
        assert!((r.sum - direct).abs() < 1e-12);
        assert!((r.main_term - 0.25 * ln_x).abs() < 1e-12);
    }

    #[test]
    fn triangle_r2_and_bounded_ladder() {
        let mut tri = RationalPolytope::orthant(2);
        tri.le(&[1, 1], 1);
        for x in [1_000u64, 10_000, 100_000] {
            let spec = LogPolytopeSpec::new(2, tri.clone(), x).unwrap();
            let r = log_polytope_sum(&spec).unwrap();
            let ln_x = (x as f64).ln();
            assert!((r.main_term - 0.5 * ln_x * ln_x).abs() < 1e-9);
            assert!(r.normalized_error < 3.0, "error {} at X={x}", r.normalized_error);
        }
    }

    #[test]
    fn caps_are_enforced() {
        let d = interval_polytope((0, 1), (1, 1));
        assert!(LogPolytopeSpec::new(1, d.clone(), 10_000_000).is_err());
        let mut bad = RationalPolytope::orthant(1);
        bad.le(&[1], 2); // reaches outside the unit cube
        assert!(LogPolytopeSpec::new(1, bad, 100).is_err());
    }

    #[test]
    fn trivial_psi_reduces_to_log_polytope() {
        let x = 20_000u64;
        let input = ConvolvedInput {
            r: 1,
            psi: &|_| 1.0,
            psi_mu: &|n| if n[0] == 1 { 1.0 } else { 0.0 },
            constraints: vec![(vec![1.0], 1)],
            x,
            truncation: 10,
            tail_bound: 0.0,
        };
        let est = convolved_sum_estimate(&input).unwrap();
        let spec = LogPolytopeSpec::new(1, interval_polytope((0, 1), (1, 1)), x).unwrap();
        let log_sum = log_polytope_sum(&spec).unwrap();
        assert!((est.lhs - log_sum.sum).abs() < 1e-9);
        assert!((est.constant - 1.0).abs() < 1e-15);
        assert!((est.rhs_main - log_sum.main_term).abs() < 1e-9);
    }

    #[test]
    fn phi_star_constant_is_one_over_zeta_two() {
        use crate::sieve::FactorSieve;
        let sieve = FactorSieve::new(100_000);
        let x = 100_000u64;
        let psi = move |n: &[u64]| {
            let mut out = 1.0;
            for p in sieve.distinct_primes(n[0]) {
                out *= 1.0 - 1.0 / p as f64;
            }
            out
        };
        let sieve2 = FactorSieve::new(100_000);
        let psi_mu = move |n: &[u64]| {
            // multiplicative: at a prime, phi*(p) - 1 = -1/p; higher powers 0
            let mut out = 1.0;
            for (p, e) in sieve2.factorize(n[0]) {
                if e >= 2 {
                    return 0.0;
                }
                out *= -1.0 / p as f64;
            }
            out
        };
        let input = ConvolvedInput {
            r: 1,
            psi: &psi,
            psi_mu: &psi_mu,
            constraints: vec![(vec![1.0], 1)],
            x,
            truncation: 10_000,
            tail_bound: 1.0 / 9_999.0,
        };
        let est = convolved_sum_estimate(&input).unwrap();
        let zeta2_inv = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!(
            (est.constant - zeta2_inv).abs() < est.constant_tail + 1e-6,
            "constant {} vs {}",
            est.constant,
            zeta2_inv
        );
        assert!(est.normalized_error < 3.0, "normalized error {}", est.normalized_error);
    }

    #[test]
    fn separable_r2_hyperbola() {
        use crate::sieve::FactorSieve;
        let sieve = FactorSieve::new(20_000);
        let phi_star_f = move |n: u64| -> f64 {
            let mut out = 1.0;
            for p in sieve.distinct_primes(n) {
                out *= 1.0 - 1.0 / p as f64;
            }
            out
        };
        let sieve2 = FactorSieve::new(20_000);
        let mu_factor = move |n: u64| -> f64 {
            let mut out = 1.0;
            for (p, e) in sieve2.factorize(n) {
                if e >= 2 {
                    return 0.0;
                }
                out *= -1.0 / p as f64;
            }
            out
        };
        let psi = move |n: &[u64]| phi_star_f(n[0]) * phi_star_f(n[1]);
        let psi_mu = move |n: &[u64]| mu_factor(n[0]) * mu_factor(n[1]);
        let input = ConvolvedInput {
            r: 2,
            psi: &psi,
            psi_mu: &psi_mu,
            constraints: vec![(vec![1.0, 1.0], 1)],
            x: 20_000,
            truncation: 20_000,
            tail_bound: 0.01,
        };
        let est = convolved_sum_estimate(&input).unwrap();
        let zeta2_inv = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((est.volume - 0.5).abs() < 1e-12);
        assert!((est.constant - zeta2_inv * zeta2_inv).abs() < 0.05);
        assert!(est.normalized_error < 5.0, "normalized error {}", est.normalized_error);
    }

    #[test]
    fn ratio_rows_reference_the_same_constant() {
        let rows = ratio_table(SurfaceId::V1, &[40, 400], 1e-3, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].c_reference > 0.0);
        assert_eq!(rows[0].c_reference, rows[1].c_reference);
        for row in &rows {
            let r = row.ratio.unwrap();
            assert!(r >= 0.0);
            let n = row.count.unwrap();
            assert_eq!(
                n,
                crate::torsor::count_via_torsor(SurfaceId::V1, row.b).unwrap().count
            );
        }
    }

    #[test]
    fn expired_budget_marks_rows_incomplete() {
        let rows =
            ratio_table(SurfaceId::V1, &[50, 100], 1e-3, Some(Duration::from_secs(0))).unwrap();
        assert!(rows.iter().all(|r| r.count.is_none()));
    }
}
