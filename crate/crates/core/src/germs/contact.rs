//! Contact exponents, symbolic and numeric, and the matching of half-branches
//! that preserves them.

use std::cmp::Ordering;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::brent::BrentRoot;
use num_rational::Ratio;

use super::puiseux::{same_tangent, GermCurve, PuiseuxBranch};
use super::series::difference_over;
use crate::error::{Error, Result};

struct Scalar<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, x: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(*x))
    }
}

/// Root of `f` on `[lo, hi]`, given a sign change, to machine precision.
pub(crate) fn bracketed_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let res = Executor::new(Scalar(f), BrentRoot::new(lo, hi, 0.0))
        .configure(|s| s.param(hi).max_iters(400))
        .run()
        .map_err(|e| Error::Precondition(format!("root solve on [{lo:e}, {hi:e}]: {e}")))?;
    res.state()
        .get_best_param()
        .copied()
        .ok_or_else(|| Error::Precondition("root solve returned no point".into()))
}

/// Samples used to check that a branch crosses a circle only once.
const CROSSING_SAMPLES: usize = 64;
const PRECISION_FLOOR: f64 = 1e-9;

/// Point of the branch on the circle `|p| = r`.
pub fn sphere_point(b: &PuiseuxBranch, r: f64) -> Result<[f64; 2]> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    let g = |s: f64| {
        let p = b.point_at(s);
        p[0].hypot(p[1]) - r
    };
    // |γ(s)| ≥ s, so the crossing lies in [0, r]
    let mut crossings = 0;
    let mut prev = g(0.0);
    for i in 1..=CROSSING_SAMPLES {
        let v = g(r * i as f64 / CROSSING_SAMPLES as f64);
        if (prev < 0.0) != (v < 0.0) {
            crossings += 1;
        }
        prev = v;
    }
    if crossings != 1 {
        return Err(Error::Precondition(format!(
            "branch meets the circle of radius {r:e} {crossings} times in the sampled range"
        )));
    }
    let s = bracketed_root(g, 0.0, r)?;
    Ok(b.point_at(s))
}

/// Exact contact order. Branches with distinct tangent half-lines have
/// contact `1`.
pub fn contact_exponent(b1: &PuiseuxBranch, b2: &PuiseuxBranch) -> Result<Ratio<i64>> {
    if !same_tangent(b1, b2) {
        return Ok(Ratio::from_integer(1));
    }
    // fixed orientation so the answer is symmetric to the bit
    let (a, b) = if (b1.axis(), b1.terms().len()) <= (b2.axis(), b2.terms().len()) {
        (b1, b2)
    } else {
        (b2, b1)
    };
    match difference_over(a, b)? {
        Some((order, _)) => Ok(order),
        None => Err(Error::UndefinedContact),
    }
}

/// Counterclockwise order of two branches with a common tangent.
pub(crate) fn angular_order(b1: &PuiseuxBranch, b2: &PuiseuxBranch) -> Result<Ordering> {
    match difference_over(b1, b2)? {
        None => Err(Error::UndefinedContact),
        Some((_, c)) => Ok(if c * b1.axis().orientation() > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }),
    }
}

/// Least-squares slope of `log dist(b1 ∩ S_r, b2 ∩ S_r)` against `log r`.
/// Radii where the two points are closer than `1e-9·r` are left out.
pub fn contact_exponent_numeric(b1: &PuiseuxBranch, b2: &PuiseuxBranch, radii: &[f64]) -> Result<f64> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two radii".into()));
    }
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        let (p, q) = (sphere_point(b1, r)?, sphere_point(b2, r)?);
        let d = (p[0] - q[0]).hypot(p[1] - q[1]);
        // below this the distance is mostly rounding in the two points
        if !(d > PRECISION_FLOOR * r) {
            continue;
        }
        xs.push(r.ln());
        ys.push(d.ln());
    }
    if xs.len() < 2 {
        return Err(Error::Precondition(
            "branches agree to working precision on all but one of the radii".into(),
        ));
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Pairwise contacts; the diagonal holds `0`.
pub fn contact_matrix(g: &GermCurve) -> Result<Vec<Vec<Ratio<i64>>>> {
    let b = g.branches();
    let m = b.len();
    let mut out = vec![vec![Ratio::from_integer(0); m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let c = contact_exponent(&b[i], &b[j])?;
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    Ok(out)
}

/// First bijection `σ`, in lexicographic order, with
/// `cont(X_i, X_j) = cont(Y_σ(i), Y_σ(j))` for all pairs.
pub fn match_halfbranches(x: &GermCurve, y: &GermCurve) -> Result<Option<Vec<usize>>> {
    if x.len() != y.len() {
        return Ok(None);
    }
    let (cx, cy) = (contact_matrix(x)?, contact_matrix(y)?);
    // each branch's sorted contact row is invariant under relabeling
    let row = |c: &Vec<Vec<Ratio<i64>>>, i: usize| {
        let mut r = c[i].clone();
        r.sort();
        r
    };
    let rows_x: Vec<_> = (0..x.len()).map(|i| row(&cx, i)).collect();
    let rows_y: Vec<_> = (0..y.len()).map(|i| row(&cy, i)).collect();

    let m = x.len();
    let mut sigma = Vec::with_capacity(m);
    let mut used = vec![false; m];
    fn extend(
        i: usize,
        sigma: &mut Vec<usize>,
        used: &mut [bool],
        cx: &[Vec<Ratio<i64>>],
        cy: &[Vec<Ratio<i64>>],
        rows_x: &[Vec<Ratio<i64>>],
        rows_y: &[Vec<Ratio<i64>>],
    ) -> bool {
        if i == cx.len() {
            return true;
        }
        for j in 0..cy.len() {
            if used[j] || rows_x[i] != rows_y[j] {
                continue;
            }
            if (0..i).any(|p| cx[i][p] != cy[j][sigma[p]]) {
                continue;
            }
            used[j] = true;
            sigma.push(j);
            if extend(i + 1, sigma, used, cx, cy, rows_x, rows_y) {
                return true;
            }
            sigma.pop();
            used[j] = false;
        }
        false
    }
    Ok(extend(0, &mut sigma, &mut used, &cx, &cy, &rows_x, &rows_y).then_some(sigma))
}
