//! Ambient homeomorphism between outer-equivalent plane curve germs, glued
//! from one stacked quadrant map per tangent cone.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_8, PI, TAU};

use num_rational::Ratio;

use super::contact::{angular_order, contact_exponent, match_halfbranches, sphere_point};
use super::piecewise::{largest_valid, ConeChart, Piece, PiecewiseGermMap, ProfileCurve, QuadrantMap, Region};
use super::puiseux::{GermCurve, PuiseuxBranch, TangentGroup};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::verify::hausdorff;

const ANGLE_TOL: f64 = 1e-9;

/// Half-angle of the tangent cones: half the smallest gap between tangent
/// half-lines, capped at π/8.
pub fn cone_half_angle(angles: &[f64]) -> f64 {
    let mut sorted = angles.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut gap = TAU;
    for i in 0..sorted.len() {
        let next = if i + 1 < sorted.len() {
            sorted[i + 1]
        } else {
            sorted[0] + TAU
        };
        if sorted.len() > 1 {
            gap = gap.min(next - sorted[i]);
        }
    }
    (0.5 * gap).min(FRAC_PI_8)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Members of a tangent group from the most counterclockwise down.
fn sorted_members(g: &GermCurve, group: &TangentGroup) -> Result<Vec<PuiseuxBranch>> {
    let mut list: Vec<PuiseuxBranch> = group.members.iter().map(|&i| g.branches()[i].clone()).collect();
    let mut err = None;
    list.sort_by(|a, b| match angular_order(b, a) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(list),
    }
}

/// Curves of one cone in chart form, the virtual zero curve last, and the
/// consecutive contacts from the bottom up.
fn cone_stack(list: &[PuiseuxBranch], chart: ConeChart) -> Result<(Vec<ProfileCurve>, Vec<Ratio<i64>>)> {
    let mut curves: Vec<ProfileCurve> = list
        .iter()
        .map(|b| ProfileCurve::Charted {
            branch: b.clone(),
            chart,
        })
        .collect();
    curves.push(ProfileCurve::Zero);
    let m = list.len();
    // the lowest branch meets the lower edge of the cone transversally
    let mut alphas = vec![Ratio::from_integer(1)];
    for d in 1..m {
        alphas.push(contact_exponent(&list[m - 1 - d], &list[m - d])?);
    }
    Ok((curves, alphas))
}

/// Plane homeomorphism germ sending `X` onto `Y`, built cone by cone around
/// the common tangent half-lines and equal to the identity off the cones.
pub fn ambient_curve_equivalence(x: &GermCurve, y: &GermCurve) -> Result<PiecewiseGermMap> {
    if match_halfbranches(x, y)?.is_none() {
        return Err(Error::NotEquivalent(
            "no bijection of half-branches preserves the contact exponents".into(),
        ));
    }
    let (gx, gy) = (x.tangent_halflines(), y.tangent_halflines());
    let same_tangents = gx.len() == gy.len()
        && gx
            .iter()
            .zip(&gy)
            .all(|(a, b)| angle_gap(a.angle, b.angle) <= ANGLE_TOL && a.members.len() == b.members.len());
    if !same_tangents {
        return Err(Error::Precondition(
            "the germs are outer equivalent but their tangent half-lines differ; \
             the cone construction needs a common tangent configuration"
                .into(),
        ));
    }
    let angles: Vec<f64> = gx.iter().map(|g| g.angle).collect();
    let a = cone_half_angle(&angles);

    let mut pieces = Vec::new();
    let mut checks: Vec<(ConeChart, Vec<PuiseuxBranch>, QuadrantMap)> = Vec::new();
    for (tx, ty) in gx.iter().zip(&gy) {
        let chart = ConeChart::new(tx.angle, a)?;
        let (lx, ly) = (sorted_members(x, tx)?, sorted_members(y, ty)?);
        if lx == ly {
            continue;
        }
        let (cx, ax) = cone_stack(&lx, chart)?;
        let (cy, ay) = cone_stack(&ly, chart)?;
        if ax != ay {
            return Err(Error::Precondition(format!(
                "in the cone at angle {:.6}, the contacts in angular order differ ({:?} against {:?}); \
                 that correspondence is not realized by stacking",
                tx.angle,
                ax.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                ay.iter().map(|r| r.to_string()).collect::<Vec<_>>()
            )));
        }
        let map = QuadrantMap::stacked(&cx, &cy, &ax);
        let mut both = lx;
        both.extend(ly);
        checks.push((chart, both, map.clone()));
        pieces.push(Piece {
            region: Region::Cone { chart },
            map,
        });
    }

    let validity = largest_valid(|r| checks.iter().all(|(chart, bs, map)| cone_valid(chart, bs, map, r)));
    Ok(PiecewiseGermMap::new(pieces, validity))
}

/// Every branch meets the circle of radius `r` once inside the open cone and
/// every profile is positive across the cone's chart abscissae at that scale.
fn cone_valid(chart: &ConeChart, branches: &[PuiseuxBranch], map: &QuadrantMap, r: f64) -> bool {
    for b in branches {
        match sphere_point(b, r) {
            Ok(p) => {
                let w = chart.to_quadrant(p);
                if !(w[0] > 0.0 && w[1] > 0.0) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    (0..4).all(|i| {
        let u = chart.c * r * 2f64.powf(-(i as f64) / 4.0);
        map.steps.iter().all(|s| match s {
            super::piecewise::Step::Straighten { profile, .. } => profile.value(u) > 0.0,
            super::piecewise::Step::Lift { .. } => true,
        })
    })
}

/// `hausdorff(F(X ∩ S_r), Y ∩ S_r)`.
pub fn sphere_hausdorff(map: &PiecewiseGermMap, x: &GermCurve, y: &GermCurve, r: f64) -> Result<f64> {
    let fx: Vec<Vec<f64>> = x.sphere_points(r)?.into_iter().map(|p| map.eval(p).to_vec()).collect();
    let sy: Vec<Vec<f64>> = y.sphere_points(r)?.into_iter().map(|p| p.to_vec()).collect();
    hausdorff(
        &PointCloud::new_image("F(X∩S)", 0, fx)?,
        &PointCloud::new_image("Y∩S", 0, sy)?,
    )
}

/// Worst `|F⁻¹(F(p)) − p| / r` over `angles` points on each circle of radius
/// `r` in `radii`.
pub fn polar_round_trip(map: &PiecewiseGermMap, radii: &[f64], angles: usize) -> f64 {
    let inv = map.inverse();
    let mut worst: f64 = 0.0;
    for &r in radii {
        for k in 0..angles {
            let t = -PI + TAU * k as f64 / angles as f64;
            let p = [r * t.cos(), r * t.sin()];
            let q = inv.eval(map.eval(p));
            let e = (q[0] - p[0]).hypot(q[1] - p[1]) / r;
            worst = if e.is_nan() { f64::INFINITY } else { worst.max(e) };
        }
    }
    worst
}
