//! Half-branches as finite Puiseux series and germs as lists of them.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-axis a branch is a graph over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "+x")]
    PosX,
    #[serde(rename = "-x")]
    NegX,
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-y")]
    NegY,
}

impl Axis {
    /// Point of the plane at graph parameter `s ≥ 0` with graph value `v`.
    pub fn point(self, s: f64, v: f64) -> [f64; 2] {
        match self {
            Axis::PosX => [s, v],
            Axis::NegX => [-s, v],
            Axis::PosY => [v, s],
            Axis::NegY => [v, -s],
        }
    }

    /// `(parameter, value)` of a plane point in this axis' graph chart.
    pub fn chart(self, p: [f64; 2]) -> (f64, f64) {
        match self {
            Axis::PosX => (p[0], p[1]),
            Axis::NegX => (-p[0], p[1]),
            Axis::PosY => (p[1], p[0]),
            Axis::NegY => (-p[1], p[0]),
        }
    }

    /// +1 when a larger graph value means a counterclockwise move.
    pub(crate) fn orientation(self) -> f64 {
        match self {
            Axis::PosX | Axis::NegY => 1.0,
            Axis::NegX | Axis::PosY => -1.0,
        }
    }
}

/// A half-branch `{(s, f(s)) : s ≥ 0}` in the chart of `axis`, with
/// `f(s) = Σ c_i s^{e_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BranchRepr", into = "BranchRepr")]
pub struct PuiseuxBranch {
    terms: Vec<(Ratio<i64>, f64)>,
    axis: Axis,
}

#[derive(Serialize, Deserialize)]
struct BranchRepr {
    terms: Vec<(i64, i64, f64)>,
    axis: Axis,
}

impl TryFrom<BranchRepr> for PuiseuxBranch {
    type Error = Error;

    fn try_from(r: BranchRepr) -> Result<Self> {
        let mut terms = Vec::with_capacity(r.terms.len());
        for (num, den, c) in r.terms {
            if den <= 0 {
                return Err(Error::InvalidInput(format!("exponent denominator {den} must be positive")));
            }
            terms.push((Ratio::new(num, den), c));
        }
        PuiseuxBranch::new(terms, r.axis)
    }
}

impl From<PuiseuxBranch> for BranchRepr {
    fn from(b: PuiseuxBranch) -> Self {
        BranchRepr {
            terms: b.terms.iter().map(|(e, c)| (*e.numer(), *e.denom(), *c)).collect(),
            axis: b.axis,
        }
    }
}

impl PuiseuxBranch {
    pub fn new(terms: Vec<(Ratio<i64>, f64)>, axis: Axis) -> Result<Self> {
        for (i, (e, c)) in terms.iter().enumerate() {
            if *e < Ratio::from_integer(1) {
                return Err(Error::InvalidInput(format!("exponent {e} is below 1")));
            }
            if *c == 0.0 || !c.is_finite() {
                return Err(Error::InvalidInput(format!("coefficient of x^{e} must be finite and nonzero")));
            }
            if i > 0 && terms[i - 1].0 >= *e {
                return Err(Error::InvalidInput("exponents must be strictly increasing".into()));
            }
        }
        Ok(PuiseuxBranch { terms, axis })
    }

    /// Branch over `+x` from `(numerator, denominator, coefficient)` triples.
    pub fn over_x(terms: &[(i64, i64, f64)]) -> Result<Self> {
        Self::with_axis(terms, Axis::PosX)
    }

    pub fn with_axis(terms: &[(i64, i64, f64)], axis: Axis) -> Result<Self> {
        BranchRepr {
            terms: terms.to_vec(),
            axis,
        }
        .try_into()
    }

    /// The half-axis itself.
    pub fn zero(axis: Axis) -> Self {
        PuiseuxBranch {
            terms: Vec::new(),
            axis,
        }
    }

    pub fn terms(&self) -> &[(Ratio<i64>, f64)] {
        &self.terms
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading exponent α and coefficient `h(0)`; `None` for the zero branch.
    pub fn leading(&self) -> Option<(Ratio<i64>, f64)> {
        self.terms.first().copied()
    }

    pub fn max_exponent(&self) -> Ratio<i64> {
        self.terms.last().map(|t| t.0).unwrap_or(Ratio::from_integer(1))
    }

    /// `Σ c_i s^{e_i}` without the domain check.
    pub(crate) fn value(&self, s: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c * rpow(s, *e)).sum()
    }

    pub fn point_at(&self, s: f64) -> [f64; 2] {
        self.axis.point(s, self.value(s))
    }

    /// Coefficient of the linear term.
    pub fn slope_at_origin(&self) -> f64 {
        self.terms
            .iter()
            .find(|(e, _)| *e == Ratio::from_integer(1))
            .map(|t| t.1)
            .unwrap_or(0.0)
    }

    /// Unit tangent half-line at the origin.
    pub fn tangent(&self) -> [f64; 2] {
        let p = self.axis.point(1.0, self.slope_at_origin());
        let n = p[0].hypot(p[1]);
        [p[0] / n, p[1] / n]
    }

    pub fn tangent_angle(&self) -> f64 {
        let t = self.tangent();
        t[1].atan2(t[0])
    }
}

pub(crate) fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `s^{p/q}` for `s ≥ 0`; integer exponents go through `powi`.
pub(crate) fn rpow(s: f64, e: Ratio<i64>) -> f64 {
    if e.is_integer() {
        if let Ok(k) = i32::try_from(*e.numer()) {
            return s.powi(k);
        }
    }
    s.powf(ratio_f64(e))
}

pub fn eval_branch(b: &PuiseuxBranch, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidInput(format!("branch evaluated at negative parameter {x}")));
    }
    Ok(b.value(x))
}

pub(crate) const TANGENT_TOL: f64 = 1e-12;

pub(crate) fn same_tangent(a: &PuiseuxBranch, b: &PuiseuxBranch) -> bool {
    let (ta, tb) = (a.tangent(), b.tangent());
    (ta[0] - tb[0]).abs() <= TANGENT_TOL && (ta[1] - tb[1]).abs() <= TANGENT_TOL
}

/// A plane curve germ at the origin, as its half-branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GermRepr", into = "GermRepr")]
pub struct GermCurve {
    branches: Vec<PuiseuxBranch>,
}

#[derive(Serialize, Deserialize)]
struct GermRepr {
    branches: Vec<PuiseuxBranch>,
}

impl TryFrom<GermRepr> for GermCurve {
    type Error = Error;

    fn try_from(r: GermRepr) -> Result<Self> {
        GermCurve::new(r.branches)
    }
}

impl From<GermCurve> for GermRepr {
    fn from(g: GermCurve) -> Self {
        GermRepr { branches: g.branches }
    }
}

/// Half-branches sharing one tangent half-line.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentGroup {
    pub direction: [f64; 2],
    pub angle: f64,
    pub members: Vec<usize>,
}

impl GermCurve {
    /// Rejects an empty list and pairs of branches that coincide as series.
    pub fn new(branches: Vec<PuiseuxBranch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidInput("a germ needs at least one branch".into()));
        }
        for i in 0..branches.len() {
            for j in (i + 1)..branches.len() {
                if let Err(Error::UndefinedContact) = super::contact_exponent(&branches[i], &branches[j]) {
                    return Err(Error::InvalidInput(format!("branches {i} and {j} coincide")));
                }
            }
        }
        Ok(GermCurve { branches })
    }

    pub fn branches(&self) -> &[PuiseuxBranch] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Groups by tangent half-line, sorted by angle in `(-π, π]`.
    pub fn tangent_halflines(&self) -> Vec<TangentGroup> {
        let mut groups: Vec<TangentGroup> = Vec::new();
        for (i, b) in self.branches.iter().enumerate() {
            match groups.iter_mut().find(|g| same_tangent(&self.branches[g.members[0]], b)) {
                Some(g) => g.members.push(i),
                None => groups.push(TangentGroup {
                    direction: b.tangent(),
                    angle: b.tangent_angle(),
                    members: vec![i],
                }),
            }
        }
        groups.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        groups
    }

    /// Points of every branch on the circle of radius `r`.
    pub fn sphere_points(&self, r: f64) -> Result<Vec<[f64; 2]>> {
        self.branches.iter().map(|b| super::contact::sphere_point(b, r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let b = PuiseuxBranch::over_x(&[(3, 2, 1.0)]).unwrap();
        assert_eq!(eval_branch(&b, 4.0).unwrap(), 8.0);
        assert_eq!(eval_branch(&b, 0.0).unwrap(), 0.0);
        let c = PuiseuxBranch::over_x(&[(3, 2, 1.0), (7, 4, 2.0)]).unwrap();
        assert_eq!(eval_branch(&c, 1.0).unwrap(), 3.0);
        assert!(eval_branch(&c, -1.0).is_err());
    }

    #[test]
    fn rejects_malformed_terms() {
        assert!(PuiseuxBranch::over_x(&[(1, 2, 1.0)]).is_err());
        assert!(PuiseuxBranch::over_x(&[(2, 1, 0.0)]).is_err());
        assert!(PuiseuxBranch::over_x(&[(2, 1, 1.0), (3, 2, 1.0)]).is_err());
        assert!(PuiseuxBranch::over_x(&[(2, 1, 1.0), (4, 2, 1.0)]).is_err());
        assert!(PuiseuxBranch::over_x(&[(3, 0, 1.0)]).is_err());
    }

    #[test]
    fn json_layout() {
        let text = r#"{"terms": [[3, 2, 1.0], [7, 4, -0.5]], "axis": "-y"}"#;
        let b: PuiseuxBranch = serde_json::from_str(text).unwrap();
        assert_eq!(b.axis(), Axis::NegY);
        assert_eq!(b.leading(), Some((Ratio::new(3, 2), 1.0)));
        let v = serde_json::to_value(&b).unwrap();
        assert_eq!(v["terms"][1][1], 4);
        let g: GermCurve = serde_json::from_str(&format!(r#"{{"branches": [{text}]}}"#)).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn tangents_and_groups() {
        let a = PuiseuxBranch::over_x(&[(1, 1, 1.0)]).unwrap();
        let b = PuiseuxBranch::with_axis(&[(1, 1, 1.0), (2, 1, 1.0)], Axis::PosY).unwrap();
        let c = PuiseuxBranch::zero(Axis::NegX);
        assert!(same_tangent(&a, &b));
        let g = GermCurve::new(vec![a, c, b]).unwrap();
        let groups = g.tangent_halflines();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].members, vec![0, 2]);
        assert_eq!(groups[1].members, vec![1]);
        assert!((groups[1].angle - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn duplicate_branches_are_rejected() {
        let a = PuiseuxBranch::over_x(&[(3, 2, 1.0)]).unwrap();
        assert!(GermCurve::new(vec![a.clone(), a]).is_err());
        assert!(GermCurve::new(vec![]).is_err());
    }
}
