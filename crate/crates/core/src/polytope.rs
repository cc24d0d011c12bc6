//! Exact rational polytopes: vertex enumeration by basis subsets,
//! boundedness via the recession cone, and exact volume by recursive
//! triangulation of the face lattice.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// A halfspace system `a . t <= b` in fixed dimension, always including the
/// nonnegativity constraints `t_i >= 0`.
#[derive(Debug, Clone)]
pub struct RationalPolytope {
    pub dim: usize,
    pub ineqs: Vec<(Vec<Rat>, Rat)>,
}

impl RationalPolytope {
    /// Starts from the nonnegative orthant in the given dimension.
    pub fn orthant(dim: usize) -> Self {
        let mut ineqs = Vec::new();
        for i in 0..dim {
            let mut a = vec![Rat::zero(); dim];
            a[i] = -Rat::one();
            ineqs.push((a, Rat::zero()));
        }
        RationalPolytope { dim, ineqs }
    }

    /// Adds `a . t <= b` with integer data.
    pub fn le(&mut self, coeffs: &[i64], bound: i64) -> &mut Self {
        assert_eq!(coeffs.len(), self.dim);
        self.ineqs.push((coeffs.iter().map(|&c| rat_int(c)).collect(), rat_int(bound)));
        self
    }

    /// Adds `a . t >= b` with integer data.
    pub fn ge(&mut self, coeffs: &[i64], bound: i64) -> &mut Self {
        assert_eq!(coeffs.len(), self.dim);
        self.ineqs.push((coeffs.iter().map(|&c| rat_int(-c)).collect(), rat_int(-bound)));
        self
    }

    /// Adds `a . t <= b` with rational data.
    pub fn le_rat(&mut self, coeffs: Vec<Rat>, bound: Rat) -> &mut Self {
        assert_eq!(coeffs.len(), self.dim);
        self.ineqs.push((coeffs, bound));
        self
    }

    pub fn contains(&self, t: &[Rat]) -> bool {
        self.ineqs.iter().all(|(a, b)| dot(a, t) <= *b)
    }

    pub fn contains_f64(&self, t: &[f64]) -> bool {
        self.ineqs.iter().all(|(a, b)| {
            let lhs: f64 = a.iter().zip(t).map(|(c, x)| rat_to_f64(c) * x).sum();
            lhs <= rat_to_f64(b) + 1e-12
        })
    }

    /// All vertices, each listed once, found by solving every d-subset of the
    /// constraints at equality and keeping the feasible solutions.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let m = self.ineqs.len();
        let d = self.dim;
        let mut verts: Vec<Vec<Rat>> = Vec::new();
        let mut subset = vec![0usize; d];
        enumerate_subsets(m, d, &mut subset, 0, 0, &mut |idx| {
            let rows: Vec<&(Vec<Rat>, Rat)> = idx.iter().map(|&i| &self.ineqs[i]).collect();
            if let Some(sol) = solve_square(&rows) {
                if self.contains(&sol) && !verts.contains(&sol) {
                    verts.push(sol);
                }
            }
        });
        verts
    }

    /// A polytope is bounded exactly when its recession cone is trivial:
    /// `A r <= 0` admits no nonzero solution. The slice `{sum r_i = 1}` of the
    /// cone is itself a polytope inside the simplex, so it is nonempty exactly
    /// when it has a vertex.
    pub fn is_bounded(&self) -> bool {
        let mut cone = RationalPolytope { dim: self.dim, ineqs: Vec::new() };
        for (a, _) in &self.ineqs {
            cone.ineqs.push((a.clone(), Rat::zero()));
        }
        let ones = vec![Rat::one(); self.dim];
        cone.ineqs.push((ones.clone(), Rat::one()));
        cone.ineqs.push((ones.iter().map(|c| -c.clone()).collect(), -Rat::one()));
        cone.vertices().is_empty()
    }

    /// Exact volume via vertex enumeration and recursive triangulation from a
    /// base vertex of each face.
    pub fn volume(&self) -> Result<Rat> {
        if !self.is_bounded() {
            return Err(Error::UnboundedPolytope);
        }
        let verts = self.vertices();
        if verts.is_empty() {
            return Ok(Rat::zero());
        }
        if affine_rank(&verts) - 1 < self.dim {
            return Ok(Rat::zero());
        }
        let simplices = triangulate(&verts, &self.ineqs, self.dim);
        let mut vol = Rat::zero();
        let factorial: i64 = (1..=self.dim as i64).product();
        for s in simplices {
            let mut mat: Vec<Vec<Rat>> = Vec::new();
            for v in &s[1..] {
                mat.push(v.iter().zip(&s[0]).map(|(a, b)| a - b).collect());
            }
            vol += determinant(mat).abs();
        }
        Ok(vol / rat_int(factorial))
    }
}

fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// f64 value of an exact rational.
pub fn to_f64(r: &Rat) -> f64 {
    rat_to_f64(r)
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn enumerate_subsets(m: usize, k: usize, buf: &mut Vec<usize>, start: usize, depth: usize, f: &mut impl FnMut(&[usize])) {
    if depth == k {
        f(buf);
        return;
    }
    for i in start..m {
        buf[depth] = i;
        enumerate_subsets(m, k, buf, i + 1, depth + 1, f);
    }
}

/// Solves `a_i . t = b_i` for a square system; `None` when singular.
fn solve_square(rows: &[&(Vec<Rat>, Rat)]) -> Option<Vec<Rat>> {
    let d = rows.len();
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|(a, b)| {
            let mut row = a.clone();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..d {
        let pivot = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].clone();
        for c in col..=d {
            m[col][c] = &m[col][c] / &inv;
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=d {
                    let delta = &factor * &m[col][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
    }
    Some((0..d).map(|r| m[r][d].clone()).collect())
}

fn determinant(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= m[col][col].clone();
        let inv = m[col][col].clone();
        for r in (col + 1)..n {
            if !m[r][col].is_zero() {
                let factor = &m[r][col] / &inv;
                for c in col..n {
                    let delta = &factor * &m[col][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
    }
    det
}

/// Rank of the affine hull of a point set, as 1 + linear rank of differences.
fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let base = &points[0];
    let mut rows: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let cols = base.len();
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..cols {
        let pivot = (row..rows.len()).find(|&r| !rows[r][col].is_zero());
        let Some(pivot) = pivot else { continue };
        rows.swap(row, pivot);
        let inv = rows[row][col].clone();
        for r in (row + 1)..rows.len() {
            if !rows[r][col].is_zero() {
                let factor = &rows[r][col] / &inv;
                for c in col..cols {
                    let delta = &factor * &rows[row][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    rank + 1
}

/// Triangulates the convex hull of `verts` (affine dimension `d`) into
/// d-simplices: cone from the first vertex over the triangulations of the
/// facets that avoid it. Facets are recovered as maximal tight subsets of the
/// global constraint list.
fn triangulate(verts: &[Vec<Rat>], ineqs: &[(Vec<Rat>, Rat)], d: usize) -> Vec<Vec<Vec<Rat>>> {
    if d == 0 || verts.len() == 1 {
        return vec![vec![verts[0].clone()]];
    }
    let v0 = &verts[0];
    let mut out = Vec::new();
    let mut seen_facets: Vec<Vec<usize>> = Vec::new();
    for (a, b) in ineqs {
        if dot(a, v0) == *b {
            continue; // cone apex must avoid the facet
        }
        let mut tight: Vec<usize> = Vec::new();
        for (i, v) in verts.iter().enumerate() {
            if dot(a, v) == *b {
                tight.push(i);
            }
        }
        if tight.is_empty() {
            continue;
        }
        let w: Vec<Vec<Rat>> = tight.iter().map(|&i| verts[i].clone()).collect();
        if affine_rank(&w) - 1 != d - 1 {
            continue;
        }
        if seen_facets.contains(&tight) {
            continue;
        }
        seen_facets.push(tight);
        for s in triangulate(&w, ineqs, d - 1) {
            let mut simplex = vec![v0.clone()];
            simplex.extend(s);
            out.push(simplex);
        }
    }
    out
}
