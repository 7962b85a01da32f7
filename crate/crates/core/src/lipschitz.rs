//! Lipschitz functions on samples and their McShane–Whitney extension to the
//! whole ambient space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pair_extremes, PointCloud};
use crate::linalg::dist;

/// Relative slack allowed when checking a declared constant against the
/// sampled ratios.
const CONSTANT_SLACK: f64 = 1e-12;

/// The serialized form has no label, so every domain carries this one.
const DOMAIN_LABEL: &str = "offset-domain";

/// Exact maximum of `|Δvalue| / ‖Δpoint‖` over all pairs. A single point has
/// no pairs and gets constant `0`.
pub fn lipschitz_constant(domain: &PointCloud, values: &[f64]) -> Result<f64> {
    if values.len() != domain.len() {
        return Err(Error::InvalidInput(format!(
            "{} values for {} domain points",
            values.len(),
            domain.len()
        )));
    }
    let (_, _, max, _) = pair_extremes(domain.len(), |i, j| {
        (values[i] - values[j]).abs() / dist(domain.point(i), domain.point(j))
    });
    Ok(max.unwrap_or(0.0))
}

/// A real function known on a finite domain, together with a Lipschitz
/// constant that dominates every sampled difference quotient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionRepr", into = "FunctionRepr")]
pub struct SampledLipschitzFunction {
    domain: PointCloud,
    values: Vec<f64>,
    constant: f64,
}

#[derive(Serialize, Deserialize)]
struct FunctionRepr {
    domain: Vec<Vec<f64>>,
    values: Vec<f64>,
    #[serde(rename = "L")]
    constant: f64,
}

impl TryFrom<FunctionRepr> for SampledLipschitzFunction {
    type Error = Error;

    fn try_from(r: FunctionRepr) -> Result<Self> {
        let domain = PointCloud::new(DOMAIN_LABEL, 0, r.domain)?;
        SampledLipschitzFunction::with_constant(domain, r.values, r.constant)
    }
}

impl From<SampledLipschitzFunction> for FunctionRepr {
    fn from(f: SampledLipschitzFunction) -> Self {
        FunctionRepr {
            domain: f.domain.to_vecs(),
            values: f.values,
            constant: f.constant,
        }
    }
}

impl SampledLipschitzFunction {
    /// Uses the exhaustive sampled constant, without inflation.
    pub fn new(domain: PointCloud, values: Vec<f64>) -> Result<Self> {
        let domain = domain.with_label(DOMAIN_LABEL);
        let constant = lipschitz_constant(&domain, &values)?;
        Ok(SampledLipschitzFunction {
            domain,
            values,
            constant,
        })
    }

    pub fn with_constant(domain: PointCloud, values: Vec<f64>, constant: f64) -> Result<Self> {
        if !(constant >= 0.0) || !constant.is_finite() {
            return Err(Error::InvalidInput(format!(
                "Lipschitz constant must be finite and non-negative, got {constant}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite function value".into()));
        }
        let domain = domain.with_label(DOMAIN_LABEL);
        let sampled = lipschitz_constant(&domain, &values)?;
        if sampled > constant * (1.0 + CONSTANT_SLACK) {
            return Err(Error::InvalidInput(format!(
                "declared constant {constant} is below the sampled constant {sampled}"
            )));
        }
        Ok(SampledLipschitzFunction {
            domain,
            values,
            constant,
        })
    }

    pub fn domain(&self) -> &PointCloud {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `inf_y f(y) + L‖q − y‖` and `sup_y f(y) − L‖q − y‖` for the given `L`.
    /// A query equal to a domain point returns that point's value for both.
    pub fn envelopes_with(&self, query: &[f64], constant: f64) -> (f64, f64) {
        let mut upper = f64::INFINITY;
        let mut lower = f64::NEG_INFINITY;
        for (i, y) in self.domain.points().enumerate() {
            let d = dist(query, y);
            let v = self.values[i];
            if d == 0.0 {
                return (v, v);
            }
            upper = upper.min(v + constant * d);
            lower = lower.max(v - constant * d);
        }
        (upper, lower)
    }

    pub fn upper_envelope(&self, query: &[f64]) -> f64 {
        self.envelopes_with(query, self.constant).0
    }

    pub fn lower_envelope(&self, query: &[f64]) -> f64 {
        self.envelopes_with(query, self.constant).1
    }

    /// Midpoint of the two envelopes. Interpolates the samples and is
    /// `L`-Lipschitz on the whole space.
    pub fn eval(&self, query: &[f64]) -> f64 {
        debug_assert_eq!(query.len(), self.dim());
        let (upper, lower) = self.envelopes_with(query, self.constant);
        0.5 * (upper + lower)
    }

    /// Same function with values and constant multiplied by `t ≥ 0`.
    pub fn scaled(&self, t: f64) -> Self {
        SampledLipschitzFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v * t).collect(),
            constant: self.constant * t.abs(),
        }
    }
}

pub fn mcshane_extend(f: &SampledLipschitzFunction, query: &[f64]) -> Result<f64> {
    if query.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: query.len(),
        });
    }
    Ok(f.eval(query))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cloud(points: Vec<Vec<f64>>) -> PointCloud {
        PointCloud::new("d", 0, points).unwrap()
    }

    #[test]
    fn constant_examples() {
        let flat = cloud(vec![vec![0.0], vec![1.0], vec![3.0]]);
        assert_eq!(lipschitz_constant(&flat, &[2.0, 2.0, 2.0]).unwrap(), 0.0);

        let two = cloud(vec![vec![0.0], vec![2.0]]);
        assert_eq!(lipschitz_constant(&two, &[0.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn constant_of_triangle_matches_hand_scan() {
        // pairs: (0,1) ratio 3, (0,2) ratio 4, (1,2) ratio 1/sqrt2
        let tri = cloud(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let l = lipschitz_constant(&tri, &[0.0, 3.0, 4.0]).unwrap();
        assert_eq!(l, 4.0);
    }

    #[test]
    fn extension_examples() {
        let two = cloud(vec![vec![0.0], vec![2.0]]);
        let f = SampledLipschitzFunction::with_constant(two, vec![0.0, 2.0], 1.0).unwrap();
        assert_eq!(mcshane_extend(&f, &[1.0]).unwrap(), 1.0);
        assert_eq!(mcshane_extend(&f, &[2.0]).unwrap(), 2.0);

        let seg = cloud(vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let g = SampledLipschitzFunction::with_constant(seg, vec![0.0, 3.0], 3.0).unwrap();
        let (up, lo) = g.envelopes_with(&[0.5, 0.0], 3.0);
        assert_abs_diff_eq!(up, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lo, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.eval(&[0.5, 0.0]), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn rejects_small_constant_and_bad_query() {
        let two = cloud(vec![vec![0.0], vec![2.0]]);
        assert!(SampledLipschitzFunction::with_constant(two.clone(), vec![0.0, 2.0], 0.5).is_err());
        let f = SampledLipschitzFunction::new(two, vec![0.0, 2.0]).unwrap();
        assert!(matches!(
            mcshane_extend(&f, &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_point_extends_to_a_constant() {
        let f = SampledLipschitzFunction::new(cloud(vec![vec![1.0, 1.0]]), vec![7.5]).unwrap();
        assert_eq!(f.constant(), 0.0);
        assert_eq!(f.eval(&[-3.0, 9.0]), 7.5);
    }

    #[test]
    fn serde_uses_flat_layout() {
        let f = SampledLipschitzFunction::new(cloud(vec![vec![0.0], vec![1.0]]), vec![0.0, 2.0])
            .unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["L"], 2.0);
        assert_eq!(v["domain"][1][0], 1.0);
        let back: SampledLipschitzFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
