//! Piecewise homeomorphisms of the plane germ: the straightening map on the
//! closed first quadrant, its stacked compositions, and their transport into
//! cones.

use std::cmp::Ordering;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::contact::bracketed_root;
use super::puiseux::{rpow, Axis, PuiseuxBranch};
use super::series::difference_over;
use crate::error::{Error, Result};

/// Cone `{angle − half_angle ≤ arg p ≤ angle + half_angle}` with its chart
/// onto the closed first quadrant: rotate the axis to angle `half_angle`,
/// then `(x, y) ↦ (cx − y, y)` with `c = tan(2·half_angle)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeChart {
    pub angle: f64,
    pub half_angle: f64,
    pub c: f64,
}

impl ConeChart {
    pub fn new(angle: f64, half_angle: f64) -> Result<Self> {
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_4) {
            return Err(Error::InvalidInput(format!("cone half-angle {half_angle} outside (0, π/4)")));
        }
        Ok(ConeChart {
            angle,
            half_angle,
            c: (2.0 * half_angle).tan(),
        })
    }

    fn rotation(&self) -> (f64, f64) {
        let phi = self.half_angle - self.angle;
        (phi.cos(), phi.sin())
    }

    pub fn to_quadrant(&self, p: [f64; 2]) -> [f64; 2] {
        let (c, s) = self.rotation();
        let q0 = c * p[0] - s * p[1];
        let q1 = s * p[0] + c * p[1];
        [self.c * q0 - q1, q1]
    }

    pub fn from_quadrant(&self, w: [f64; 2]) -> [f64; 2] {
        let (c, s) = self.rotation();
        let q1 = w[1];
        let q0 = (w[0] + w[1]) / self.c;
        [c * q0 + s * q1, -s * q0 + c * q1]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let w = self.to_quadrant(p);
        w[0] >= 0.0 && w[1] >= 0.0
    }
}

/// A curve `v = f(u)` over the nonnegative `u` half-axis of a quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileCurve {
    Zero,
    /// The branch's own graph function.
    Graph { branch: PuiseuxBranch },
    /// A plane branch read in a cone chart.
    Charted { branch: PuiseuxBranch, chart: ConeChart },
}

impl ProfileCurve {
    /// Value at `u ≥ 0`; NaN where a charted branch cannot be followed.
    pub fn value(&self, u: f64) -> f64 {
        match self {
            ProfileCurve::Zero => 0.0,
            ProfileCurve::Graph { branch } => branch.value(u),
            ProfileCurve::Charted { branch, chart } => charted_value(branch, chart, u).unwrap_or(f64::NAN),
        }
    }
}

fn charted_value(b: &PuiseuxBranch, chart: &ConeChart, u: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.0);
    }
    let along = |s: f64| chart.to_quadrant(b.point_at(s))[0] - u;
    let mut hi = u;
    let mut tries = 0;
    while along(hi) < 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Precondition("branch does not reach the requested chart abscissa".into()));
        }
    }
    let s = bracketed_root(along, 0.0, hi)?;
    Ok(chart.to_quadrant(b.point_at(s))[1])
}

/// `p(u) = upper(u) − lower(u) = u^α h(u)` with `h(0) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub upper: ProfileCurve,
    pub lower: ProfileCurve,
    pub alpha: Ratio<i64>,
}

impl Profile {
    pub fn value(&self, u: f64) -> f64 {
        self.upper.value(u) - self.lower.value(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    /// Sends the graph of the profile to the graph of `u^α`; identity off
    /// the quadrant.
    Straighten { profile: Profile, inverse: bool },
    /// `(u, v) ↦ (u, v − u^α)` for `u > 0`.
    Lift { alpha: Ratio<i64>, inverse: bool },
}

impl Step {
    fn inverted(&self) -> Step {
        match self {
            Step::Straighten { profile, inverse } => Step::Straighten {
                profile: profile.clone(),
                inverse: !inverse,
            },
            Step::Lift { alpha, inverse } => Step::Lift {
                alpha: *alpha,
                inverse: !inverse,
            },
        }
    }

    fn apply(&self, w: [f64; 2]) -> [f64; 2] {
        let [u, v] = w;
        match self {
            Step::Lift { alpha, inverse } => {
                if !(u > 0.0) {
                    return w;
                }
                let a = rpow(u, *alpha);
                if *inverse {
                    [u, v + a]
                } else {
                    [u, v - a]
                }
            }
            Step::Straighten { profile, inverse } => {
                if !(u > 0.0) || v < 0.0 {
                    return w;
                }
                let p = profile.value(u);
                let a = rpow(u, profile.alpha);
                let h = p / a;
                if !inverse {
                    if v <= p {
                        [u, v / h]
                    } else {
                        [u, v + (a - p)]
                    }
                } else if v <= a {
                    [u, v * h]
                } else {
                    [u, v - (a - p)]
                }
            }
        }
    }
}

/// Composition of steps acting on the closed first quadrant, identity off it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadrantMap {
    pub steps: Vec<Step>,
}

impl QuadrantMap {
    pub fn apply(&self, w: [f64; 2]) -> [f64; 2] {
        if !(w[0] >= 0.0 && w[1] >= 0.0) {
            return w;
        }
        self.steps.iter().fold(w, |acc, s| s.apply(acc))
    }

    pub fn inverse(&self) -> QuadrantMap {
        QuadrantMap {
            steps: self.steps.iter().rev().map(Step::inverted).collect(),
        }
    }

    /// Every profile positive at `u`.
    fn profiles_positive(&self, u: f64) -> bool {
        self.steps.iter().all(|s| match s {
            Step::Straighten { profile, .. } => profile.value(u) > 0.0,
            Step::Lift { .. } => true,
        })
    }

    /// Nested straighten-and-lift chain carrying the curves `xs` onto `ys`.
    /// Both lists run from the top curve down to the zero curve, and
    /// `alphas[d]` is the contact between the curves at positions `M−2−d`
    /// and `M−1−d`.
    pub(crate) fn stacked(xs: &[ProfileCurve], ys: &[ProfileCurve], alphas: &[Ratio<i64>]) -> Self {
        let m = xs.len();
        if m < 2 || xs == ys {
            return QuadrantMap::default();
        }
        let profile = |c: &[ProfileCurve], d: usize| Profile {
            upper: c[m - 2 - d].clone(),
            lower: c[m - 1 - d].clone(),
            alpha: alphas[d],
        };
        let last = m - 2;
        let mut steps = Vec::with_capacity(4 * m);
        for d in 0..=last {
            steps.push(Step::Straighten {
                profile: profile(xs, d),
                inverse: false,
            });
            if d < last {
                steps.push(Step::Lift {
                    alpha: alphas[d],
                    inverse: false,
                });
            }
        }
        for d in (0..=last).rev() {
            steps.push(Step::Straighten {
                profile: profile(ys, d),
                inverse: true,
            });
            if d > 0 {
                steps.push(Step::Lift {
                    alpha: alphas[d - 1],
                    inverse: true,
                });
            }
        }
        QuadrantMap { steps }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// The closed first quadrant itself.
    Quadrant,
    Cone { chart: ConeChart },
}

impl Region {
    fn chart_in(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let w = match self {
            Region::Quadrant => p,
            Region::Cone { chart } => chart.to_quadrant(p),
        };
        (w[0] >= 0.0 && w[1] >= 0.0).then_some(w)
    }

    fn chart_out(&self, w: [f64; 2]) -> [f64; 2] {
        match self {
            Region::Quadrant => w,
            Region::Cone { chart } => chart.from_quadrant(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub region: Region,
    pub map: QuadrantMap,
}

/// A plane homeomorphism germ given by one quadrant map per region and the
/// identity off all regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseGermMap {
    pieces: Vec<Piece>,
    /// Radius below which the branch data behind the pieces was checked.
    validity_radius: f64,
}

impl PiecewiseGermMap {
    pub fn new(pieces: Vec<Piece>, validity_radius: f64) -> Self {
        PiecewiseGermMap {
            pieces,
            validity_radius,
        }
    }

    pub fn identity() -> Self {
        PiecewiseGermMap {
            pieces: Vec::new(),
            validity_radius: f64::INFINITY,
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn regions(&self) -> Vec<&Region> {
        self.pieces.iter().map(|p| &p.region).collect()
    }

    pub fn cones(&self) -> Vec<ConeChart> {
        self.pieces
            .iter()
            .filter_map(|p| match p.region {
                Region::Cone { chart } => Some(chart),
                Region::Quadrant => None,
            })
            .collect()
    }

    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.iter().all(|p| p.map.steps.is_empty())
    }

    /// Whether `p` lies in some declared region.
    pub fn covers(&self, p: [f64; 2]) -> bool {
        self.pieces.iter().any(|piece| piece.region.chart_in(p).is_some())
    }

    pub fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        for piece in &self.pieces {
            if let Some(w) = piece.region.chart_in(p) {
                let out = piece.map.apply(w);
                if out == w {
                    return p;
                }
                return piece.region.chart_out(out);
            }
        }
        p
    }

    pub fn inverse(&self) -> PiecewiseGermMap {
        PiecewiseGermMap {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    region: p.region.clone(),
                    map: p.map.inverse(),
                })
                .collect(),
            validity_radius: self.validity_radius,
        }
    }
}

/// Radii `2^{-k/4}`, `k = 0..=160`, largest first.
pub(crate) fn radius_ladder() -> impl DoubleEndedIterator<Item = f64> {
    (0..=160).map(|k| 2f64.powf(-(k as f64) / 4.0))
}

/// Largest ladder radius `R` with `ok(r)` for every ladder radius `r ≤ R`.
pub(crate) fn largest_valid(ok: impl Fn(f64) -> bool) -> f64 {
    let mut best = 0.0;
    for r in radius_ladder().rev() {
        if !ok(r) {
            break;
        }
        best = r;
    }
    best
}

/// Upper end of the interval on which graph inputs must be positive.
const WORKING_RADIUS: f64 = 0.125;

/// Remark-style straightening: the graph of `f = x^α h` goes to the graph of
/// `x^α`; points off the closed first quadrant are fixed.
pub fn straighten_graph(f: &PuiseuxBranch) -> Result<PiecewiseGermMap> {
    let (alpha, lead) = graph_leading(f)?;
    if lead <= 0.0 {
        return Err(Error::InvalidInput(format!("leading coefficient {lead} is not positive")));
    }
    let map = QuadrantMap {
        steps: vec![Step::Straighten {
            profile: Profile {
                upper: ProfileCurve::Graph { branch: f.clone() },
                lower: ProfileCurve::Zero,
                alpha,
            },
            inverse: false,
        }],
    };
    let validity = largest_valid(|u| map.profiles_positive(u));
    if validity < WORKING_RADIUS {
        return Err(Error::InvalidInput(format!(
            "graph is not positive on (0, {WORKING_RADIUS}]; positive only up to {validity:e}"
        )));
    }
    Ok(PiecewiseGermMap::new(
        vec![Piece {
            region: Region::Quadrant,
            map,
        }],
        validity,
    ))
}

fn graph_leading(f: &PuiseuxBranch) -> Result<(Ratio<i64>, f64)> {
    if f.axis() != Axis::PosX {
        return Err(Error::InvalidInput("quadrant graphs must live over +x".into()));
    }
    f.leading()
        .ok_or_else(|| Error::InvalidInput("the zero graph cannot be straightened".into()))
}

/// Sorts graphs over `+x` from the top down, appends the zero graph when it
/// is missing, and returns them with consecutive contacts.
fn sorted_stack(bs: &[PuiseuxBranch]) -> Result<(Vec<PuiseuxBranch>, Vec<Ratio<i64>>)> {
    let mut list = bs.to_vec();
    for b in &list {
        if b.axis() != Axis::PosX {
            return Err(Error::InvalidInput("quadrant graphs must live over +x".into()));
        }
        if let Some((_, c)) = b.leading() {
            if c < 0.0 {
                return Err(Error::InvalidInput("quadrant graphs must be nonnegative".into()));
            }
        }
    }
    if !list.iter().any(|b| b.is_zero()) {
        list.push(PuiseuxBranch::zero(Axis::PosX));
    }
    let mut err = None;
    list.sort_by(|a, b| match difference_over(b, a) {
        Ok(Some((_, c))) => c.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        Ok(None) => {
            err = Some(Error::UndefinedContact);
            Ordering::Equal
        }
        Err(e) => {
            err = Some(e);
            Ordering::Equal
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let m = list.len();
    let alphas = (0..m.saturating_sub(1))
        .map(|d| {
            let (hi, lo) = (&list[m - 2 - d], &list[m - 1 - d]);
            difference_over(hi, lo)?
                .map(|t| t.0)
                .ok_or(Error::UndefinedContact)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((list, alphas))
}

/// Homeomorphism of the quadrant germ carrying the graphs `xs` onto `ys` in
/// their vertical order, identity off the quadrant.
pub fn stack_graphs(xs: &[PuiseuxBranch], ys: &[PuiseuxBranch]) -> Result<PiecewiseGermMap> {
    let (sx, ax) = sorted_stack(xs)?;
    let (sy, ay) = sorted_stack(ys)?;
    if sx.len() != sy.len() {
        return Err(Error::Precondition(format!(
            "{} graphs cannot be stacked onto {}",
            sx.len(),
            sy.len()
        )));
    }
    if let Some(d) = (0..ax.len()).find(|&d| ax[d] != ay[d]) {
        return Err(Error::Precondition(format!(
            "contact mismatch at depth {d}: {} against {}",
            ax[d], ay[d]
        )));
    }
    let curves = |l: &[PuiseuxBranch]| -> Vec<ProfileCurve> {
        l.iter()
            .map(|b| {
                if b.is_zero() {
                    ProfileCurve::Zero
                } else {
                    ProfileCurve::Graph { branch: b.clone() }
                }
            })
            .collect()
    };
    let map = QuadrantMap::stacked(&curves(&sx), &curves(&sy), &ax);
    let validity = largest_valid(|u| map.profiles_positive(u));
    Ok(PiecewiseGermMap::new(
        vec![Piece {
            region: Region::Quadrant,
            map,
        }],
        validity,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bx(t: &[(i64, i64, f64)]) -> PuiseuxBranch {
        PuiseuxBranch::over_x(t).unwrap()
    }

    fn schedule() -> Vec<f64> {
        (3..=12).map(|j| 2f64.powi(-j)).collect()
    }

    #[test]
    fn straightening_examples() {
        let f = bx(&[(2, 1, 1.0), (3, 1, 1.0)]);
        let m = straighten_graph(&f).unwrap();
        for x in [0.01, 0.05, 0.1, 0.2, 0.3, 0.5] {
            let y = m.eval([x, f.value(x)]);
            assert_eq!(y[0], x);
            assert!((y[1] - x * x).abs() <= 1e-9 * x * x, "{x}: {:?}", y);
        }
        assert_eq!(m.eval([-0.3, 0.2]), [-0.3, 0.2]);
        assert_eq!(m.eval([0.3, -0.2]), [0.3, -0.2]);

        let pure = straighten_graph(&bx(&[(5, 2, 1.0)])).unwrap();
        for p in [[0.1, 0.0], [0.1, 0.001], [0.2, 0.9], [0.0, 0.4], [1.5, 2.0]] {
            assert_eq!(pure.eval(p), p);
        }
    }

    #[test]
    fn straightening_rejects_negative_graphs() {
        assert!(straighten_graph(&bx(&[(2, 1, -1.0)])).is_err());
        assert!(straighten_graph(&bx(&[(2, 1, 1.0), (3, 1, -100.0)])).is_err());
        assert!(straighten_graph(&PuiseuxBranch::zero(Axis::PosX)).is_err());
    }

    #[test]
    fn stacking_two_graphs() {
        let x = [PuiseuxBranch::zero(Axis::PosX), bx(&[(3, 2, 2.0)])];
        let y = [PuiseuxBranch::zero(Axis::PosX), bx(&[(3, 2, 1.0)])];
        let m = stack_graphs(&x, &y).unwrap();
        for s in schedule() {
            let p = m.eval([s, 2.0 * s.powf(1.5)]);
            assert!((p[0] - s).abs() <= 1e-6 * s && (p[1] - s.powf(1.5)).abs() <= 1e-6 * s);
            assert_eq!(m.eval([s, 0.0]), [s, 0.0]);
        }
    }

    #[test]
    fn stacking_identical_lists_is_identity() {
        let x = [bx(&[(3, 2, 1.0)]), bx(&[(3, 2, 1.0), (7, 4, 1.0)])];
        let m = stack_graphs(&x, &x).unwrap();
        assert!(m.is_identity());
        for s in schedule() {
            let p = [s, x[1].value(s)];
            assert_eq!(m.eval(p), p);
        }
    }

    #[test]
    fn stacking_nested_contacts() {
        // contact 3/2 with the axis, 7/4 between the two upper graphs
        let x = [
            PuiseuxBranch::zero(Axis::PosX),
            bx(&[(3, 2, 1.0)]),
            bx(&[(3, 2, 1.0), (7, 4, 1.0)]),
        ];
        let y = [
            PuiseuxBranch::zero(Axis::PosX),
            bx(&[(3, 2, 0.5), (2, 1, 1.0)]),
            bx(&[(3, 2, 0.5), (7, 4, 2.0)]),
        ];
        let m = stack_graphs(&x, &y).unwrap();
        for s in schedule() {
            for (bx_, by_) in x.iter().zip(&y) {
                let p = m.eval([s, bx_.value(s)]);
                assert!((p[0] - s).abs() <= 1e-6 * s);
                assert!((p[1] - by_.value(s)).abs() <= 1e-6 * s, "{s}: {} vs {}", p[1], by_.value(s));
            }
        }
        let bad = [PuiseuxBranch::zero(Axis::PosX), bx(&[(3, 2, 1.0)]), bx(&[(3, 2, 1.0), (2, 1, 1.0)])];
        assert!(matches!(stack_graphs(&x, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn cone_chart_sends_cone_onto_quadrant() {
        let chart = ConeChart::new(0.7, 0.3).unwrap();
        let on_axis = [0.7f64.cos(), 0.7f64.sin()];
        assert!(chart.contains(on_axis));
        let w = chart.to_quadrant(on_axis);
        assert!(w[0] > 0.0 && w[1] > 0.0);
        let back = chart.from_quadrant(w);
        assert!((back[0] - on_axis[0]).abs() < 1e-15 && (back[1] - on_axis[1]).abs() < 1e-15);
        for a in [0.7f64 - 0.3, 0.7 + 0.3] {
            let edge = chart.to_quadrant([a.cos(), a.sin()]);
            assert!(edge[0].abs() < 1e-15 || edge[1].abs() < 1e-15);
        }
        assert!(!chart.contains([(1.2f64).cos(), (1.2f64).sin()]));
        assert!(ConeChart::new(0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn straighten_round_trip(c in 0.5f64..2.0, d in -1.0f64..1.0, r in 1e-3f64..0.125, t in 0.0f64..std::f64::consts::TAU) {
            let f = bx(&[(3, 2, c), (2, 1, d)]);
            let m = straighten_graph(&f).unwrap();
            let p = [r * t.cos(), r * t.sin()];
            let q = m.inverse().eval(m.eval(p));
            prop_assert!((q[0] - p[0]).abs() <= 1e-9 * r && (q[1] - p[1]).abs() <= 1e-9 * r);
        }
    }
}
