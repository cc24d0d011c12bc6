//! Adaptive quadrature and one-dimensional interval arithmetic for
//! sublevel sets of low-degree polynomials.

/// Result of an adaptive integration: value and an accumulated error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Simpson integration with a local Richardson error estimate.
pub fn adaptive_simpson(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Quadrature {
    if a >= b {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut out = Quadrature { value: 0.0, error: 0.0 };
    rec(f, a, b, fa, fm, fb, whole, tol, 48, &mut out);
    out
}

/// Adaptive Simpson on `[a, b]` pre-split into equal panels, so that narrow
/// features cannot hide between the probe nodes of one global pass.
pub fn adaptive_simpson_panels(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> Quadrature {
    let mut out = Quadrature { value: 0.0, error: 0.0 };
    let panels = panels.max(1);
    for i in 0..panels {
        let lo = a + (b - a) * i as f64 / panels as f64;
        let hi = a + (b - a) * (i + 1) as f64 / panels as f64;
        let q = adaptive_simpson(f, lo, hi, tol / panels as f64);
        out.value += q.value;
        out.error += q.error;
    }
    out
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn rec(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    out: &mut Quadrature,
) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        out.value += left + right + delta / 15.0;
        out.error += delta.abs() / 15.0 + f64::EPSILON * (left.abs() + right.abs());
        return;
    }
    rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

/// A finite union of closed intervals, kept sorted and disjoint.
#[derive(Debug, Clone, Default)]
pub struct IntervalSet {
    pub parts: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        if lo > hi {
            Self::empty()
        } else {
            IntervalSet { parts: vec![(lo, hi)] }
        }
    }

    pub fn from_parts(mut parts: Vec<(f64, f64)>) -> Self {
        parts.retain(|&(lo, hi)| lo <= hi);
        parts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in parts {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        IntervalSet { parts: merged }
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.parts {
            for &(c, d) in &other.parts {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    out.push((lo, hi));
                }
            }
        }
        IntervalSet::from_parts(out)
    }

    pub fn total_length(&self) -> f64 {
        self.parts.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Stable roots of `a x^2 + b x + c = 0`, ascending; `None` if no real root
/// (or the equation is degenerate).
fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    debug_assert!(a != 0.0);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Solution set of `|a2 x^2 + a1 x| <= c` for `c >= 0`.
pub fn abs_quadratic_sublevel(a2: f64, a1: f64, c: f64, clip: f64) -> IntervalSet {
    debug_assert!(c >= 0.0);
    let whole = IntervalSet::single(-clip, clip);
    if a2 == 0.0 {
        if a1 == 0.0 {
            return whole;
        }
        let r = c / a1.abs();
        return IntervalSet::single(-r, r).intersect(&whole);
    }
    // normalize to positive leading coefficient; |.| is even in the polynomial
    let (a2, a1) = if a2 > 0.0 { (a2, a1) } else { (-a2, -a1) };
    // P <= c holds between the roots of P - c (discriminant > 0 since c >= 0)
    let (lo, hi) = match quadratic_roots(a2, a1, -c) {
        Some(r) => r,
        None => return IntervalSet::empty(),
    };
    let upper = IntervalSet::single(lo, hi);
    // P >= -c fails strictly between the roots of P + c, when they exist
    let lower = match quadratic_roots(a2, a1, c) {
        Some((s1, s2)) => IntervalSet::from_parts(vec![(lo, s1), (s2, hi)]),
        None => upper.clone(),
    };
    upper.intersect(&lower).intersect(&whole)
}

/// Solution set of `|x^2 (u x + t)| <= c` within `[-clip, clip]`, by bisection
/// on the monotone pieces of the cubic.
pub fn abs_cubic_sublevel(u: f64, t: f64, c: f64, clip: f64) -> IntervalSet {
    debug_assert!(u != 0.0 && c >= 0.0);
    let cubic = |x: f64| x * x * (u * x + t);
    // critical points of the cubic: x = 0 and x = -2t/(3u)
    let mut knots = vec![-clip, 0.0, -2.0 * t / (3.0 * u), clip];
    knots.retain(|&x| (-clip..=clip).contains(&x));
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let mut parts = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a >= b {
            continue;
        }
        let (fa, fb) = (cubic(a), cubic(b));
        // on a monotone piece, {|C| <= c} is a single closed interval
        let lo_val = fa.min(fb);
        let hi_val = fa.max(fb);
        if lo_val > c || hi_val < -c {
            continue;
        }
        let increasing = fb >= fa;
        let solve = |target: f64| -> f64 {
            // C(x) = target has a unique solution on [a, b] when bracketed
            let (mut lo, mut hi) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let v = cubic(mid);
                if (v <= target) == increasing {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let (s, e) = if increasing {
            let s = if fa >= -c { a } else { solve(-c) };
            let e = if fb <= c { b } else { solve(c) };
            (s, e)
        } else {
            let s = if fa <= c { a } else { solve(c) };
            let e = if fb >= -c { b } else { solve(-c) };
            (s, e)
        };
        if s <= e {
            parts.push((s, e));
        }
    }
    IntervalSet::from_parts(parts)
}
