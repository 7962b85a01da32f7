//! Truncated series on the lattice `u^{k/Q}`, used to rewrite a branch as a
//! graph over another branch's axis.

use num_integer::Integer;
use num_rational::Ratio;

use super::puiseux::{Axis, PuiseuxBranch};
use crate::error::{Error, Result};

/// Longest truncation the reversion will attempt.
const MAX_TERMS: usize = 512;
/// Coefficients below this, relative to the largest input coefficient, count
/// as cancelled after a reversion.
const REVERTED_ZERO: f64 = 1e-9;
/// Same, for a plain termwise difference.
const DIRECT_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
struct Lattice {
    q: i64,
    len: usize,
}

impl Lattice {
    fn index(&self, e: Ratio<i64>) -> usize {
        (*e.numer() * (self.q / *e.denom())) as usize
    }

    fn exponent(&self, k: usize) -> Ratio<i64> {
        Ratio::new(k as i64, self.q)
    }

    fn series(&self, b: &PuiseuxBranch) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for (e, c) in b.terms() {
            let k = self.index(*e);
            if k < self.len {
                out[k] = *c;
            }
        }
        out
    }
}

/// `w^e` for `w = 1 + Σ_{j≥1} w_j u^{j/Q}`, truncated to `w.len()` terms.
fn unit_power(w: &[f64], e: f64) -> Vec<f64> {
    let n = w.len();
    let mut q = vec![0.0; n];
    q[0] = 1.0;
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += ((e + 1.0) * j as f64 - k as f64) * w[j] * q[k - j];
        }
        q[k] = acc / k as f64;
    }
    q
}

fn add_shifted(target: &mut [f64], src: &[f64], shift: usize, scale: f64) {
    for (k, v) in src.iter().enumerate() {
        if k + shift >= target.len() {
            break;
        }
        target[k + shift] += scale * v;
    }
}

/// Leading `(order, coefficient)` of `b1 − b2`, both written as graphs over
/// `b1`'s axis. `None` when the difference vanishes to the working order.
/// The branches must share their tangent half-line.
pub(crate) fn difference_over(b1: &PuiseuxBranch, b2: &PuiseuxBranch) -> Result<Option<(Ratio<i64>, f64)>> {
    let q = b1
        .terms()
        .iter()
        .chain(b2.terms())
        .fold(1i64, |acc, (e, _)| acc.lcm(e.denom()));
    let emax = b1.max_exponent().max(b2.max_exponent());
    let scale = b1
        .terms()
        .iter()
        .chain(b2.terms())
        .fold(1.0f64, |acc, t| acc.max(t.1.abs()));

    if b1.axis() == b2.axis() {
        let len = (emax * q).to_integer() as usize + 1;
        let lat = Lattice { q, len };
        let (s1, s2) = (lat.series(b1), lat.series(b2));
        return Ok(first_nonzero(&lat, &s1, &s2, DIRECT_ZERO * scale));
    }

    let len = (((emax * q).to_integer() * 2 + 2 * q) as usize).min(MAX_TERMS);
    let lat = Lattice { q, len };
    // b2 in b1's chart: parameter U(s) and value V(s) as series in s.
    let (u_ser, v_ser) = cross_chart(&lat, b2, b1.axis())?;
    let a = u_ser[q as usize];
    if !(a > 0.0) || u_ser[..q as usize].iter().any(|c| *c != 0.0) {
        return Err(Error::Precondition("branches do not share a tangent half-line".into()));
    }

    // s = (u/a)·w(u),  w = 1 − Σ_{k>Q} c_k a^{−k/Q} u^{(k−Q)/Q} w^{k/Q}
    let mut w = vec![0.0; len];
    w[0] = 1.0;
    let higher: Vec<(usize, f64)> = u_ser
        .iter()
        .enumerate()
        .skip(q as usize + 1)
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (k, *c))
        .collect();
    for _ in 0..len {
        let mut next = vec![0.0; len];
        next[0] = 1.0;
        for &(k, c) in &higher {
            let ek = k as f64 / q as f64;
            let p = unit_power(&w, ek);
            add_shifted(&mut next, &p, k - q as usize, -c * a.powf(-ek));
        }
        if next == w {
            break;
        }
        w = next;
    }

    // value of b2 over b1's axis: Σ v_k (u/a)^{k/Q} w^{k/Q}
    let mut reverted = vec![0.0; len];
    for (k, v) in v_ser.iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let ek = k as f64 / q as f64;
        let p = unit_power(&w, ek);
        add_shifted(&mut reverted, &p, k, v * a.powf(-ek));
    }
    let s1 = lat.series(b1);
    Ok(first_nonzero(&lat, &s1, &reverted, REVERTED_ZERO * scale))
}

fn first_nonzero(lat: &Lattice, s1: &[f64], s2: &[f64], tol: f64) -> Option<(Ratio<i64>, f64)> {
    s1.iter()
        .zip(s2)
        .enumerate()
        .find(|(_, (a, b))| (*a - *b).abs() > tol)
        .map(|(k, (a, b))| (lat.exponent(k), a - b))
}

/// Series of `(parameter, value)` of branch `b` read in the chart of `target`.
fn cross_chart(lat: &Lattice, b: &PuiseuxBranch, target: Axis) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = lat.series(b);
    let mut s = vec![0.0; lat.len];
    s[lat.q as usize] = 1.0;
    // plane coordinates of b's point as series
    let neg = |v: &[f64]| v.iter().map(|c| -c).collect::<Vec<_>>();
    let (x, y) = match b.axis() {
        Axis::PosX => (s.clone(), f.clone()),
        Axis::NegX => (neg(&s), f.clone()),
        Axis::PosY => (f.clone(), s.clone()),
        Axis::NegY => (f.clone(), neg(&s)),
    };
    Ok(match target {
        Axis::PosX => (x, y),
        Axis::NegX => (neg(&x), y),
        Axis::PosY => (y, x),
        Axis::NegY => (neg(&y), x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_of_unit_series() {
        // (1 + u)^2 = 1 + 2u + u^2 on the integer lattice
        let p = unit_power(&[1.0, 1.0, 0.0, 0.0], 2.0);
        assert_eq!(p, vec![1.0, 2.0, 1.0, 0.0]);
        // (1 + u)^{1/2} = 1 + u/2 − u²/8 + u³/16
        let r = unit_power(&[1.0, 1.0, 0.0, 0.0], 0.5);
        assert!((r[2] + 0.125).abs() < 1e-15 && (r[3] - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn reversion_of_quadratic() {
        // x = y − y² over +y is y = x + x² + 2x³ + 5x⁴ + … over +x
        let b1 = PuiseuxBranch::over_x(&[(1, 1, 1.0), (2, 1, 1.0), (3, 1, 2.0)]).unwrap();
        let b2 = PuiseuxBranch::with_axis(&[(1, 1, 1.0), (2, 1, -1.0)], Axis::PosY).unwrap();
        let (order, coeff) = difference_over(&b1, &b2).unwrap().unwrap();
        assert_eq!(order, Ratio::from_integer(4));
        assert!((coeff + 5.0).abs() < 1e-9);
    }

    #[test]
    fn line_in_both_charts_cancels() {
        let b1 = PuiseuxBranch::over_x(&[(1, 1, 2.0)]).unwrap();
        let b2 = PuiseuxBranch::with_axis(&[(1, 1, 0.5)], Axis::PosY).unwrap();
        assert_eq!(difference_over(&b1, &b2).unwrap(), None);
    }

    #[test]
    fn same_axis_difference() {
        let b1 = PuiseuxBranch::over_x(&[(3, 2, 1.0)]).unwrap();
        let b2 = PuiseuxBranch::over_x(&[(3, 2, 1.0), (7, 4, 1.0)]).unwrap();
        assert_eq!(difference_over(&b1, &b2).unwrap(), Some((Ratio::new(7, 4), -1.0)));
    }
}
