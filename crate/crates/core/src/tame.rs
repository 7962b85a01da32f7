//! Tame homeomorphisms: compositions of triangular shears
//! `x_j ↦ x_j ± p(other coordinates)` and determinant-one linear maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distortion_of, PointCloud, SampledMap};
use crate::lipschitz::SampledLipschitzFunction;
use crate::linalg::{determinant, dot, identity, inverse, mat_vec, Matrix};

/// Allowed `|det − 1|` for a linear factor.
pub const DET_TOLERANCE: f64 = 1e-10;

/// The function a shear adds to its axis.
#[derive(Debug, Clone, PartialEq)]
pub enum Offset {
    /// McShane extension of sampled values.
    Sampled(SampledLipschitzFunction),
    /// `Σ c_i·x_{inputs[i]}`.
    Linear(Vec<f64>),
}

impl Offset {
    pub fn arity(&self) -> usize {
        match self {
            Offset::Sampled(f) => f.dim(),
            Offset::Linear(c) => c.len(),
        }
    }

    pub fn eval(&self, args: &[f64]) -> f64 {
        match self {
            Offset::Sampled(f) => f.eval(args),
            Offset::Linear(c) => dot(c, args),
        }
    }

    /// Lipschitz constant of the offset as a function of its inputs.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Offset::Sampled(f) => f.constant(),
            Offset::Linear(c) => c.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearMap {
    pub axis: usize,
    pub inputs: Vec<usize>,
    pub offset: Offset,
    pub sign: i8,
}

impl ShearMap {
    pub fn new(axis: usize, inputs: Vec<usize>, offset: Offset, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidInput(format!("shear sign must be ±1, got {sign}")));
        }
        if inputs.contains(&axis) {
            return Err(Error::InvalidInput(format!(
                "shear on axis {axis} cannot read its own axis"
            )));
        }
        if offset.arity() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: offset.arity(),
            });
        }
        Ok(ShearMap {
            axis,
            inputs,
            offset,
            sign,
        })
    }

    /// Elementary transvection `x_axis += c·x_from`.
    pub fn transvection(axis: usize, from: usize, c: f64) -> Self {
        ShearMap {
            axis,
            inputs: vec![from],
            offset: Offset::Linear(vec![c]),
            sign: 1,
        }
    }

    pub fn offset_at(&self, x: &[f64]) -> f64 {
        let args: Vec<f64> = self.inputs.iter().map(|&i| x[i]).collect();
        self.offset.eval(&args)
    }

    pub fn apply(&self, x: &mut [f64]) {
        let o = self.offset_at(x);
        x[self.axis] += f64::from(self.sign) * o;
    }

    pub fn apply_inverse(&self, x: &mut [f64]) {
        let o = self.offset_at(x);
        x[self.axis] -= f64::from(self.sign) * o;
    }

    /// The same shear with its offset multiplied by `t`.
    pub fn apply_scaled(&self, x: &mut [f64], t: f64) {
        let o = self.offset_at(x);
        x[self.axis] += f64::from(self.sign) * (t * o);
    }

    pub fn apply_scaled_inverse(&self, x: &mut [f64], t: f64) {
        let o = self.offset_at(x);
        x[self.axis] -= f64::from(self.sign) * (t * o);
    }

    pub fn inverse(&self) -> Self {
        ShearMap {
            sign: -self.sign,
            ..self.clone()
        }
    }

    pub fn max_index(&self) -> usize {
        self.inputs.iter().copied().chain([self.axis]).max().unwrap_or(0)
    }

    pub fn as_matrix(&self, n: usize) -> Option<Matrix> {
        let Offset::Linear(c) = &self.offset else {
            return None;
        };
        let mut m = identity(n);
        for (&i, &ci) in self.inputs.iter().zip(c) {
            m[self.axis][i] += f64::from(self.sign) * ci;
        }
        Some(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinearRepr", into = "LinearRepr")]
pub struct UnimodularMap {
    matrix: Matrix,
}

#[derive(Serialize, Deserialize)]
struct LinearRepr {
    matrix: Matrix,
}

impl TryFrom<LinearRepr> for UnimodularMap {
    type Error = Error;

    fn try_from(r: LinearRepr) -> Result<Self> {
        UnimodularMap::new(r.matrix)
    }
}

impl From<UnimodularMap> for LinearRepr {
    fn from(u: UnimodularMap) -> Self {
        LinearRepr { matrix: u.matrix }
    }
}

impl UnimodularMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let n = matrix.len();
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        if matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let det = determinant(&matrix);
        if (det - 1.0).abs() > DET_TOLERANCE {
            return Err(Error::NotUnimodular { det });
        }
        Ok(UnimodularMap { matrix })
    }

    pub fn identity(n: usize) -> Self {
        UnimodularMap {
            matrix: identity(n),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.matrix)
    }

    pub fn inverse(&self) -> Self {
        UnimodularMap {
            matrix: inverse(&self.matrix).expect("unimodular matrices are invertible"),
        }
    }

    /// Block diagonal extension by the identity on `n − dim` trailing axes.
    pub fn padded(&self, n: usize) -> Self {
        let mut m = identity(n);
        for (i, row) in self.matrix.iter().enumerate() {
            m[i][..row.len()].copy_from_slice(row);
        }
        UnimodularMap { matrix: m }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Shear(ShearMap),
    Linear(UnimodularMap),
}

impl Factor {
    pub fn apply(&self, x: &mut [f64]) {
        match self {
            Factor::Shear(s) => s.apply(x),
            Factor::Linear(u) => {
                let y = mat_vec(&u.matrix, x);
                x.copy_from_slice(&y);
            }
        }
    }

    pub fn inverse(&self) -> Factor {
        match self {
            Factor::Shear(s) => Factor::Shear(s.inverse()),
            Factor::Linear(u) => Factor::Linear(u.inverse()),
        }
    }

    pub fn is_shear(&self) -> bool {
        matches!(self, Factor::Shear(_))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FactorRepr {
    Shear(ShearRepr),
    Linear(LinearRepr),
}

#[derive(Serialize, Deserialize)]
struct ShearRepr {
    axis: usize,
    sign: i8,
    inputs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<f64>>,
}

impl TryFrom<FactorRepr> for Factor {
    type Error = Error;

    fn try_from(r: FactorRepr) -> Result<Self> {
        match r {
            FactorRepr::Linear(l) => Ok(Factor::Linear(UnimodularMap::try_from(l)?)),
            FactorRepr::Shear(s) => {
                let offset = match (s.coeffs, s.domain, s.values, s.constant) {
                    (Some(c), None, None, None) => Offset::Linear(c),
                    (None, Some(d), Some(v), Some(l)) => {
                        let domain = PointCloud::new("offset-domain", 0, d)?;
                        Offset::Sampled(SampledLipschitzFunction::with_constant(domain, v, l)?)
                    }
                    _ => {
                        return Err(Error::InvalidInput(
                            "shear needs either coeffs or domain, values and L".into(),
                        ))
                    }
                };
                Ok(Factor::Shear(ShearMap::new(s.axis, s.inputs, offset, s.sign)?))
            }
        }
    }
}

impl From<Factor> for FactorRepr {
    fn from(f: Factor) -> Self {
        match f {
            Factor::Linear(u) => FactorRepr::Linear(u.into()),
            Factor::Shear(s) => {
                let mut r = ShearRepr {
                    axis: s.axis,
                    sign: s.sign,
                    inputs: s.inputs,
                    domain: None,
                    values: None,
                    constant: None,
                    coeffs: None,
                };
                match s.offset {
                    Offset::Linear(c) => r.coeffs = Some(c),
                    Offset::Sampled(f) => {
                        r.domain = Some(f.domain().to_vecs());
                        r.values = Some(f.values().to_vec());
                        r.constant = Some(f.constant());
                    }
                }
                FactorRepr::Shear(r)
            }
        }
    }
}

/// Composition of factors, applied in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TameRepr", into = "TameRepr")]
pub struct TameMap {
    dim: usize,
    factors: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct TameRepr {
    dim: usize,
    factors: Vec<FactorRepr>,
}

impl TryFrom<TameRepr> for TameMap {
    type Error = Error;

    fn try_from(r: TameRepr) -> Result<Self> {
        let factors = r
            .factors
            .into_iter()
            .map(Factor::try_from)
            .collect::<Result<Vec<_>>>()?;
        TameMap::new(r.dim, factors)
    }
}

impl From<TameMap> for TameRepr {
    fn from(m: TameMap) -> Self {
        TameRepr {
            dim: m.dim,
            factors: m.factors.into_iter().map(FactorRepr::from).collect(),
        }
    }
}

impl TameMap {
    pub fn new(dim: usize, factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            let bad = match f {
                Factor::Shear(s) => s.max_index() >= dim,
                Factor::Linear(u) => u.dim() != dim,
            };
            if bad {
                return Err(Error::InvalidInput(format!(
                    "factor does not act on R^{dim}"
                )));
            }
        }
        Ok(TameMap { dim, factors })
    }

    pub fn identity(dim: usize) -> Self {
        TameMap {
            dim,
            factors: Vec::new(),
        }
    }

    pub fn from_shears(dim: usize, shears: Vec<ShearMap>) -> Result<Self> {
        TameMap::new(dim, shears.into_iter().map(Factor::Shear).collect())
    }

    pub fn from_linear(u: UnimodularMap) -> Self {
        TameMap {
            dim: u.dim(),
            factors: vec![Factor::Linear(u)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(mut self, other: TameMap) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        self.factors.extend(other.factors);
        Ok(self)
    }

    /// Same map acting on `R^n`, `n ≥ dim`, as the identity on the new axes.
    pub fn padded(&self, n: usize) -> Result<Self> {
        if n < self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: n,
            });
        }
        let factors = self
            .factors
            .iter()
            .map(|f| match f {
                Factor::Shear(s) => Factor::Shear(s.clone()),
                Factor::Linear(u) => Factor::Linear(u.padded(n)),
            })
            .collect();
        Ok(TameMap { dim: n, factors })
    }

    fn check(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check(point)?;
        let mut x = point.to_vec();
        for f in &self.factors {
            f.apply(&mut x);
        }
        Ok(x)
    }

    pub fn inverse(&self) -> TameMap {
        TameMap {
            dim: self.dim,
            factors: self.factors.iter().rev().map(Factor::inverse).collect(),
        }
    }

    /// Preimage of `point`. Shears are undone in place; linear factors use
    /// their inverse matrices.
    pub fn invert(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check(point)?;
        let mut x = point.to_vec();
        for f in self.factors.iter().rev() {
            match f {
                Factor::Shear(s) => s.apply_inverse(&mut x),
                Factor::Linear(u) => {
                    let y = mat_vec(&u.inverse().matrix, &x);
                    x.copy_from_slice(&y);
                }
            }
        }
        Ok(x)
    }

    /// Every linear factor replaced by its transvection decomposition.
    pub fn decomposed(&self) -> Result<TameMap> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            match f {
                Factor::Shear(s) => factors.push(Factor::Shear(s.clone())),
                Factor::Linear(u) => {
                    let ts = sl_decompose(u)?;
                    factors.extend(ts.into_iter().rev().map(Factor::Shear));
                }
            }
        }
        Ok(TameMap {
            dim: self.dim,
            factors,
        })
    }

    pub fn is_isotopy_ready(&self) -> bool {
        self.factors.iter().all(Factor::is_shear)
    }

    pub fn shear_count(&self) -> usize {
        self.factors.iter().filter(|f| f.is_shear()).count()
    }

    /// Images of every point of `cloud`, in order.
    pub fn eval_cloud(&self, cloud: &PointCloud) -> Result<Vec<Vec<f64>>> {
        cloud.points().map(|p| self.eval(p)).collect()
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("isotopy parameter {t} outside [0, 1]")));
    }
    Ok(())
}

fn all_shears(map: &TameMap) -> Result<impl DoubleEndedIterator<Item = &ShearMap>> {
    if !map.is_isotopy_ready() {
        return Err(Error::Precondition(
            "isotopy needs a map made only of shears; decompose linear factors first".into(),
        ));
    }
    Ok(map.factors.iter().map(|f| match f {
        Factor::Shear(s) => s,
        Factor::Linear(_) => unreachable!(),
    }))
}

/// `F_t`: every shear offset scaled by `t`. `t = 0` is the identity and
/// `t = 1` reproduces [`TameMap::eval`] bit for bit.
pub fn isotopy_eval(map: &TameMap, t: f64, point: &[f64]) -> Result<Vec<f64>> {
    check_t(t)?;
    map.check(point)?;
    let mut x = point.to_vec();
    for s in all_shears(map)? {
        s.apply_scaled(&mut x, t);
    }
    Ok(x)
}

pub fn isotopy_invert(map: &TameMap, t: f64, point: &[f64]) -> Result<Vec<f64>> {
    check_t(t)?;
    map.check(point)?;
    let mut x = point.to_vec();
    for s in all_shears(map)?.rev() {
        s.apply_scaled_inverse(&mut x, t);
    }
    Ok(x)
}

/// Transvections `T_1, …, T_m` with `T_1·T_2⋯T_m = M`.
///
/// Row reduction to a diagonal matrix using only transvections, then each
/// `diag(a, 1/a)` block is written as four more.
pub fn sl_decompose(u: &UnimodularMap) -> Result<Vec<ShearMap>> {
    let det = u.determinant();
    if (det - 1.0).abs() > DET_TOLERANCE {
        return Err(Error::NotUnimodular { det });
    }
    let n = u.dim();
    let mut a = u.matrix.clone();
    // row operations applied to `a`, in order: row_i += c·row_j
    let mut ops: Vec<(usize, usize, f64)> = Vec::new();
    let mut row_add = |a: &mut Matrix, i: usize, j: usize, c: f64| {
        if c == 0.0 {
            return;
        }
        for col in 0..n {
            a[i][col] += c * a[j][col];
        }
        ops.push((i, j, c));
    };

    for col in 0..n {
        let p = (col..n).fold(col, |p, r| if a[r][col].abs() > a[p][col].abs() { r } else { p });
        if p != col && a[p][col].abs() > a[col][col].abs() {
            let same = a[col][col] == 0.0 || a[col][col].signum() == a[p][col].signum();
            row_add(&mut a, col, p, if same { 1.0 } else { -1.0 });
        }
        let piv = a[col][col];
        if piv == 0.0 {
            return Err(Error::NotUnimodular { det });
        }
        for r in (col + 1)..n {
            let c = -a[r][col] / piv;
            row_add(&mut a, r, col, c);
            a[r][col] = 0.0;
        }
    }
    for col in (0..n).rev() {
        let piv = a[col][col];
        for r in 0..col {
            let c = -a[r][col] / piv;
            row_add(&mut a, r, col, c);
            a[r][col] = 0.0;
        }
    }

    // R·M = D with R = E_k⋯E_1, so M = E_1⁻¹⋯E_k⁻¹·D.
    let mut out: Vec<ShearMap> = ops
        .iter()
        .map(|&(i, j, c)| ShearMap::transvection(i, j, -c))
        .collect();

    // D = D_0·D_1⋯ with D_i = diag(c_i, 1/c_i) on axes (i, i+1) and c_i the
    // running product of the diagonal.
    let mut running = 1.0;
    for i in 0..n.saturating_sub(1) {
        running *= a[i][i];
        let c = running;
        if c == 1.0 {
            continue;
        }
        // diag(c, 1/c) = L(1/c − 1)·U(1)·L(c − 1)·U(−1/c)
        for t in [
            ShearMap::transvection(i + 1, i, 1.0 / c - 1.0),
            ShearMap::transvection(i, i + 1, 1.0),
            ShearMap::transvection(i + 1, i, c - 1.0),
            ShearMap::transvection(i, i + 1, -1.0 / c),
        ] {
            if let Offset::Linear(v) = &t.offset {
                if v[0] != 0.0 {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

/// Product of the transvection list, as a matrix.
pub fn transvection_product(n: usize, ts: &[ShearMap]) -> Matrix {
    let mut m = identity(n);
    for t in ts {
        let e = t.as_matrix(n).expect("linear shear");
        m = crate::linalg::mat_mul(&m, &e);
    }
    m
}

/// Shears that zero every coordinate outside `keep` on the sample points,
/// each offset being the McShane extension of that coordinate as a function
/// of the `keep` coordinates.
pub(crate) fn kill_coordinates(cloud: &PointCloud, keep: &[usize]) -> Result<Vec<ShearMap>> {
    let n = cloud.dim();
    let projected: Vec<Vec<f64>> = cloud
        .points()
        .map(|p| keep.iter().map(|&i| p[i]).collect())
        .collect();
    if cloud.len() >= 2 {
        let rep = distortion_of(cloud, &projected)?;
        if !(rep.lower > 0.0) {
            let (i, j) = rep.witness_lower;
            return Err(Error::Precondition(format!(
                "projection to coordinates {keep:?} identifies samples {i} and {j}"
            )));
        }
    }
    let domain = PointCloud::new(format!("{}-keep", cloud.label()), 0, projected)
        .map_err(|e| Error::Precondition(format!("projection is not injective: {e}")))?;
    let mut shears = Vec::new();
    for s in (0..n).filter(|s| !keep.contains(s)) {
        let values: Vec<f64> = cloud.points().map(|p| p[s]).collect();
        let f = SampledLipschitzFunction::new(domain.clone(), values)?;
        shears.push(ShearMap::new(s, keep.to_vec(), Offset::Sampled(f), -1)?);
    }
    Ok(shears)
}

/// Tame map sending every sample `x` to `(x_1, …, x_l, 0, …, 0)`.
pub fn projection_to_tame(cloud: &PointCloud, l: usize) -> Result<TameMap> {
    if l > cloud.dim() {
        return Err(Error::InvalidInput(format!(
            "split {l} exceeds ambient dimension {}",
            cloud.dim()
        )));
    }
    let keep: Vec<usize> = (0..l).collect();
    TameMap::from_shears(cloud.dim(), kill_coordinates(cloud, &keep)?)
}

/// For `f` from `R^s × 0` into `0 × R^{n−s}`, the tame map `F = Π∘Ψ` with
/// `Ψ(x, y) = (x, y + f(x))` and `Π` killing `x` as a function of `y` on the
/// graph.
pub fn graph_transfer(f: &SampledMap, s: usize) -> Result<TameMap> {
    let n = f.source.dim();
    if f.target.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.target.dim(),
        });
    }
    if s > n {
        return Err(Error::InvalidInput(format!("split {s} exceeds dimension {n}")));
    }
    const ZERO: f64 = 1e-12;
    for (i, p) in f.source.points().enumerate() {
        if p[s..].iter().any(|x| x.abs() > ZERO) {
            return Err(Error::Precondition(format!(
                "source sample {i} is not in R^{s} × 0"
            )));
        }
    }
    for i in 0..f.len() {
        if f.image(i)[..s].iter().any(|x| x.abs() > ZERO) {
            return Err(Error::Precondition(format!(
                "image of sample {i} is not in 0 × R^{}",
                n - s
            )));
        }
    }
    let xs: Vec<Vec<f64>> = f.source.points().map(|p| p[..s].to_vec()).collect();
    let x_domain = PointCloud::new("graph-base", 0, xs.clone())
        .map_err(|e| Error::Precondition(format!("degenerate source: {e}")))?;
    let x_keep: Vec<usize> = (0..s).collect();
    let mut shears = Vec::new();
    for j in s..n {
        let values: Vec<f64> = (0..f.len()).map(|i| f.image(i)[j]).collect();
        let g = SampledLipschitzFunction::new(x_domain.clone(), values)?;
        shears.push(ShearMap::new(j, x_keep.clone(), Offset::Sampled(g), 1)?);
    }
    let graph: Vec<Vec<f64>> = (0..f.len())
        .map(|i| {
            let mut p = xs[i].clone();
            p.extend_from_slice(&f.image(i)[s..]);
            p
        })
        .collect();
    let graph = PointCloud::new("graph", f.source.intrinsic_dim(), graph)?;
    let y_keep: Vec<usize> = (s..n).collect();
    shears.extend(
        kill_coordinates(&graph, &y_keep)
            .map_err(|e| e.staged("graph transfer: f is degenerate"))?,
    );
    TameMap::from_shears(n, shears)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::distortion_of;
    use crate::linalg::{max_entry_diff, mat_mul};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(points: Vec<Vec<f64>>) -> PointCloud {
        PointCloud::new("t", 0, points).unwrap()
    }

    fn x_shear() -> TameMap {
        TameMap::from_shears(2, vec![ShearMap::transvection(1, 0, 1.0)]).unwrap()
    }

    #[test]
    fn empty_map_is_identity() {
        let m = TameMap::identity(3);
        assert_eq!(m.eval(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn single_shear_and_inverse() {
        let m = x_shear();
        assert_eq!(m.eval(&[3.0, 4.0]).unwrap(), vec![3.0, 7.0]);
        assert_eq!(m.invert(&[3.0, 7.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(m.inverse().eval(&[3.0, 7.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn shear_then_rotation_matches_hand_application() {
        let rot = UnimodularMap::new(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let m = x_shear().then(TameMap::from_linear(rot)).unwrap();
        for p in [[3.0, 4.0], [-1.0, 0.5], [0.0, 0.0]] {
            let sheared = [p[0], p[1] + p[0]];
            let expected = vec![-sheared[1], sheared[0]];
            assert_eq!(m.eval(&p).unwrap(), expected);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(
            x_shear().eval(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_unimodular_matrix_rejected() {
        assert!(matches!(
            UnimodularMap::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]]),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn decomposition_examples() {
        assert!(sl_decompose(&UnimodularMap::identity(3)).unwrap().is_empty());

        let u = UnimodularMap::new(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let ts = sl_decompose(&u).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(transvection_product(2, &ts), *u.matrix());

        let d = UnimodularMap::new(vec![vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let ts = sl_decompose(&d).unwrap();
        assert!(ts.len() <= 4);
        assert!(max_entry_diff(&transvection_product(2, &ts), d.matrix()) < 1e-12);
    }

    #[test]
    fn decomposition_handles_zero_leading_entry() {
        let u = UnimodularMap::new(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let ts = sl_decompose(&u).unwrap();
        assert!(ts.len() <= 9 + 12);
        assert!(max_entry_diff(&transvection_product(3, &ts), u.matrix()) < 1e-12);
        let m = TameMap::from_linear(u.clone()).decomposed().unwrap();
        assert!(m.is_isotopy_ready());
        let p = [1.0, 2.0, 3.0];
        let y = m.eval(&p).unwrap();
        for (a, b) in y.iter().zip(mat_vec(u.matrix(), &p)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_to_tame_examples() {
        let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let c = cloud(xs.iter().map(|&x| vec![x, f64::abs(x)]).collect());
        let pi = projection_to_tame(&c, 1).unwrap();
        for &x in &xs {
            let y = pi.eval(&[x, x.abs()]).unwrap();
            assert_abs_diff_eq!(y[0], x, epsilon = 1e-12);
            assert_abs_diff_eq!(y[1], 0.0, epsilon = 1e-12);
        }

        let flat = cloud(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]);
        let pi = projection_to_tame(&flat, 1).unwrap();
        for p in flat.points() {
            let Factor::Shear(s) = &pi.factors()[0] else { panic!() };
            assert_eq!(s.offset_at(p), 0.0);
        }

        let diag = cloud(vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        let pi = projection_to_tame(&diag, 1).unwrap();
        assert_eq!(pi.factors().len(), 1);
        let Factor::Shear(s) = &pi.factors()[0] else { panic!() };
        assert_eq!(s.offset.eval(&[0.0]), 0.0);
        assert_eq!(s.offset.eval(&[1.0]), 1.0);
    }

    #[test]
    fn projection_to_tame_rejects_collapsing_split() {
        let c = cloud(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(projection_to_tame(&c, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn graph_transfer_examples() {
        let x = cloud(vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let y = cloud(vec![vec![0.0, 0.0], vec![0.0, 2.0]]);
        let f = SampledMap::new(x, y, vec![0, 1]).unwrap();
        let m = graph_transfer(&f, 1).unwrap();
        for i in 0..2 {
            let out = m.eval(f.source.point(i)).unwrap();
            for (a, b) in out.iter().zip(f.image(i)) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
            }
        }

        let single = SampledMap::new(
            cloud(vec![vec![0.5, 0.0]]),
            cloud(vec![vec![0.0, -3.0]]),
            vec![0],
        )
        .unwrap();
        let m = graph_transfer(&single, 1).unwrap();
        let out = m.eval(&[0.5, 0.0]).unwrap();
        assert_abs_diff_eq!(out[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1], -3.0, epsilon = 1e-12);

        let ts: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        let x = cloud(ts.iter().map(|&t| vec![t, 0.0, 0.0, 0.0]).collect());
        let y = cloud(ts.iter().map(|&t| vec![0.0, 0.0, t, t * t]).collect());
        let f = SampledMap::new(x, y, (0..20).collect()).unwrap();
        let m = graph_transfer(&f, 1).unwrap();
        for i in 0..20 {
            let out = m.eval(f.source.point(i)).unwrap();
            let err: f64 = out.iter().zip(f.image(i)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-9);
        }
    }

    #[test]
    fn graph_transfer_checks_subspaces() {
        let x = cloud(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let y = cloud(vec![vec![0.0, 0.0], vec![0.0, 2.0]]);
        let f = SampledMap::new(x, y, vec![0, 1]).unwrap();
        assert!(matches!(graph_transfer(&f, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn isotopy_examples() {
        let m = x_shear();
        assert_eq!(isotopy_eval(&m, 0.5, &[3.0, 4.0]).unwrap(), vec![3.0, 5.5]);
        assert_eq!(isotopy_eval(&m, 0.0, &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(isotopy_eval(&m, 1.0, &[3.0, 4.0]).unwrap(), m.eval(&[3.0, 4.0]).unwrap());
        assert!(isotopy_eval(&m, 1.5, &[3.0, 4.0]).is_err());
        let rot = TameMap::from_linear(UnimodularMap::identity(2));
        assert!(matches!(isotopy_eval(&rot, 0.5, &[0.0, 0.0]), Err(Error::Precondition(_))));
    }

    #[test]
    fn isotopy_speed_of_a_single_shear_is_its_offset() {
        let m = x_shear();
        let x = [3.0, 4.0];
        let c = 3.0;
        for i in 0..=100 {
            for j in 0..=100 {
                let (t, s) = (i as f64 / 100.0, j as f64 / 100.0);
                let a = isotopy_eval(&m, t, &x).unwrap();
                let b = isotopy_eval(&m, s, &x).unwrap();
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert!(d <= c * (t - s).abs() * (1.0 + 1e-12) + 1e-15);
            }
        }
    }

    #[test]
    fn isotopy_speed_of_composed_shears_is_amplified() {
        // x_1 += x_0, then x_0 += 10·x_1; from (1, 0) the path is (1 + 10t², t)
        let m = TameMap::from_shears(
            2,
            vec![ShearMap::transvection(1, 0, 1.0), ShearMap::transvection(0, 1, 10.0)],
        )
        .unwrap();
        let x = [1.0, 0.0];
        let speed = |t: f64, s: f64| {
            let a = isotopy_eval(&m, t, &x).unwrap();
            let b = isotopy_eval(&m, s, &x).unwrap();
            crate::linalg::dist(&a, &b) / (t - s).abs()
        };
        // the offsets summed along the path (at most 1 + 10) fall short near t = 1
        assert!(speed(0.99, 1.0) > 11.0);
        // each offset amplified by (1 + L) of the shears after it
        for i in 0..100 {
            let (t, s) = (i as f64 / 100.0, (i + 1) as f64 / 100.0);
            let first = 1.0;
            let second = 10.0 * s;
            let bound = first * (1.0 + 10.0 * s) + second;
            assert!(speed(t, s) <= bound * (1.0 + 1e-12), "t = {t}");
        }
    }

    #[test]
    fn serde_round_trip_keeps_both_offset_kinds() {
        let c = cloud(vec![vec![0.0], vec![1.0], vec![3.0]]);
        let f = SampledLipschitzFunction::new(c, vec![0.0, 2.0, 1.0]).unwrap();
        let m = TameMap::new(
            2,
            vec![
                Factor::Shear(ShearMap::new(1, vec![0], Offset::Sampled(f), -1).unwrap()),
                Factor::Shear(ShearMap::transvection(0, 1, 0.25)),
                Factor::Linear(UnimodularMap::new(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()),
            ],
        )
        .unwrap();
        let s = crate::json::to_string(&m).unwrap();
        assert!(s.contains("\"kind\":\"shear\"") && s.contains("\"L\""));
        let back: TameMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> UnimodularMap {
        loop {
            let mut m: Matrix = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let det = determinant(&m);
            if det.abs() < 0.1 {
                continue;
            }
            let s = det.abs().powf(-1.0 / n as f64);
            for row in &mut m {
                for x in row.iter_mut() {
                    *x *= s;
                }
            }
            if det < 0.0 {
                m.swap(0, 1);
            }
            if let Ok(u) = UnimodularMap::new(m) {
                return u;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn decomposition_round_trips(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unimodular(&mut rng, n);
            let ts = sl_decompose(&u).unwrap();
            prop_assert!(ts.len() <= n * n + 4 * n);
            let prod = transvection_product(n, &ts);
            prop_assert!(max_entry_diff(&prod, u.matrix()) < 1e-10);
        }

        #[test]
        fn inverse_recovers_points(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<f64>> = (0..12)
                .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let c = cloud(pts);
            let pi = projection_to_tame(&c, 2).unwrap();
            let m = TameMap::from_linear(random_unimodular(&mut rng, 3)).then(pi).unwrap();
            for _ in 0..200 {
                let q: Vec<f64> = (0..3).map(|_| rng.random_range(-10.0..10.0)).collect();
                let back = m.invert(&m.eval(&q).unwrap()).unwrap();
                for (a, b) in back.iter().zip(&q) {
                    prop_assert!((a - b).abs() <= 1e-8);
                }
            }
        }

        #[test]
        fn composed_upper_is_submultiplicative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base: Vec<Vec<f64>> = (0..10)
                .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let c = cloud(base.clone());
            let m = projection_to_tame(&c, 1)
                .unwrap()
                .then(TameMap::from_linear(random_unimodular(&mut rng, 2)))
                .unwrap();
            let probe = cloud(
                (0..30).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect(),
            );
            let mut cur: Vec<Vec<f64>> = probe.to_vecs();
            let mut bound = 1.0;
            for f in m.factors() {
                let next: Vec<Vec<f64>> = cur.iter().map(|p| { let mut q = p.clone(); f.apply(&mut q); q }).collect();
                let src = PointCloud::new_image("s", 0, cur.clone()).unwrap();
                bound *= distortion_of(&src, &next).unwrap().upper;
                cur = next;
            }
            let total = distortion_of(&probe, &m.eval_cloud(&probe).unwrap()).unwrap().upper;
            prop_assert!(total <= bound * (1.0 + 1e-9));
        }

        #[test]
        fn unimodular_factors_have_unit_determinant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unimodular(&mut rng, 4);
            for t in sl_decompose(&u).unwrap() {
                let m = t.as_matrix(4).unwrap();
                prop_assert!((determinant(&m) - 1.0).abs() <= 1e-12);
                prop_assert!(max_entry_diff(&mat_mul(&m, &identity(4)), &m) == 0.0);
            }
        }
    }
}
