//! Point clouds, projective directions, secant sets and the exhaustive
//! bi-Lipschitz distortion scan.
//!
//! Every downstream guarantee in this crate is stated against a finite sample,
//! and [`distortion`] is the oracle those guarantees are checked with: it
//! visits every unordered pair, with no pruning.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist, norm};

/// Coordinates with magnitude at or below this are treated as zero when
/// picking the sign representative of a direction.
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// Chordal distance under which two secant directions are merged.
pub const DEDUP_TOLERANCE: f64 = 1e-9;

/// Finite sample of a set `X ⊂ R^n` of declared dimension `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointCloudRepr", into = "PointCloudRepr")]
pub struct PointCloud {
    label: String,
    dim: usize,
    intrinsic_dim: usize,
    count: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PointCloudRepr {
    label: String,
    ambient_dim: usize,
    intrinsic_dim: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<PointCloudRepr> for PointCloud {
    type Error = Error;

    fn try_from(r: PointCloudRepr) -> Result<Self> {
        if let Some(p) = r.points.iter().find(|p| p.len() != r.ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: r.ambient_dim,
                found: p.len(),
            });
        }
        PointCloud::new(r.label, r.intrinsic_dim, r.points)
    }
}

impl From<PointCloud> for PointCloudRepr {
    fn from(c: PointCloud) -> Self {
        PointCloudRepr {
            ambient_dim: c.dim,
            intrinsic_dim: c.intrinsic_dim,
            points: c.to_vecs(),
            label: c.label,
        }
    }
}

impl PointCloud {
    /// Builds a validated cloud: shared dimension, `k ≤ n`, pairwise distinct.
    pub fn new(
        label: impl Into<String>,
        intrinsic_dim: usize,
        points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let cloud = Self::new_image(label, intrinsic_dim, points)?;
        if let Some((i, j)) = cloud.first_coincident_pair() {
            return Err(Error::CoincidentPoints { i, j });
        }
        Ok(cloud)
    }

    /// Like [`PointCloud::new`] but tolerates coincident points. Used for the
    /// image side of sampled maps, where a collapse is something to report
    /// rather than reject.
    pub fn new_image(
        label: impl Into<String>,
        intrinsic_dim: usize,
        points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("point cloud has no points".into()));
        };
        let dim = first.len();
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite coordinate".into()));
            }
            coords.extend_from_slice(p);
        }
        if intrinsic_dim > dim {
            return Err(Error::InvalidInput(format!(
                "intrinsic dimension {intrinsic_dim} exceeds ambient dimension {dim}"
            )));
        }
        Ok(PointCloud {
            label: label.into(),
            dim,
            intrinsic_dim,
            count: points.len(),
            coords,
        })
    }

    fn first_coincident_pair(&self) -> Option<(usize, usize)> {
        let m = self.len();
        (0..m)
            .into_par_iter()
            .filter_map(|i| {
                ((i + 1)..m)
                    .find(|&j| self.point(i) == self.point(j))
                    .map(|j| (i, j))
            })
            .min()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_intrinsic_dim(mut self, k: usize) -> Result<Self> {
        if k > self.dim {
            return Err(Error::InvalidInput(format!(
                "intrinsic dimension {k} exceeds ambient dimension {}",
                self.dim
            )));
        }
        self.intrinsic_dim = k;
        Ok(self)
    }

    /// Sub-cloud on the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let pts = indices.iter().map(|&i| self.point(i).to_vec()).collect();
        PointCloud::new_image(self.label.clone(), self.intrinsic_dim, pts)
    }

    /// Largest Euclidean norm of a sample point.
    pub fn radius(&self) -> f64 {
        self.points().map(norm).fold(0.0, f64::max)
    }

    /// Index of a point with norm below `tol`, if any.
    pub fn origin_index(&self, tol: f64) -> Option<usize> {
        self.points().position(|p| norm(p) <= tol)
    }
}

/// A point of `RP^{n-1}`: unit vector whose first coordinate above
/// [`SIGN_THRESHOLD`] in magnitude is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl Direction {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput(
                "direction needs a finite non-zero vector".into(),
            ));
        }
        let mut u: Vec<f64> = v.into_iter().map(|x| x / n).collect();
        if let Some(lead) = u.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
            if *lead < 0.0 {
                u.iter_mut().for_each(|x| *x = -*x);
            }
        }
        Ok(Direction(u))
    }

    /// Standard basis vector `e_axis` of `R^dim`.
    pub fn axis(dim: usize, axis: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        Direction(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Sine of the angle between two lines spanned by unit vectors.
///
/// Evaluated as `|p - s| |p + s| / 2`, which equals `sqrt(1 - <p,s>^2)` for
/// unit vectors without the cancellation near parallel lines.
#[inline]
pub fn sin_between_units(p: &[f64], s: &[f64]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (a, b) in p.iter().zip(s) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    (0.5 * (minus * plus).sqrt()).min(1.0)
}

pub fn sin_angle(p: &Direction, s: &Direction) -> Result<f64> {
    if p.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: s.dim(),
        });
    }
    Ok(sin_between_units(p.as_slice(), s.as_slice()))
}

/// Deduplicated secant directions of a cloud; `pairs[i]` is the point pair
/// that produced `directions[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecantSet {
    pub dim: usize,
    pub directions: Vec<Direction>,
    pub pairs: Vec<(usize, usize)>,
    pub source: String,
}

impl SecantSet {
    pub fn empty(dim: usize, source: impl Into<String>) -> Self {
        SecantSet {
            dim,
            directions: Vec::new(),
            pairs: Vec::new(),
            source: source.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Smallest sine between `dir` and any secant, with the attaining index.
    /// An empty set gives `(1.0, None)`.
    pub fn min_sin(&self, dir: &[f64]) -> (f64, Option<usize>) {
        self.directions
            .par_iter()
            .enumerate()
            .map(|(i, s)| (sin_between_units(dir, s.as_slice()), i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map_or((1.0, None), |(v, i)| (v, Some(i)))
    }

    /// Whether every direction in `self` also occurs (up to the dedup
    /// tolerance) in `other`.
    pub fn is_subset_of(&self, other: &SecantSet) -> bool {
        self.directions.iter().all(|d| {
            other
                .directions
                .iter()
                .any(|e| dist(d.as_slice(), e.as_slice()) <= DEDUP_TOLERANCE)
        })
    }
}

/// One canonical direction per unordered pair of distinct points, with
/// near-duplicates (chordal distance ≤ [`DEDUP_TOLERANCE`]) merged.
pub fn secant_directions(cloud: &PointCloud) -> Result<SecantSet> {
    let m = cloud.len();
    if m < 2 {
        return Err(Error::EmptySecants);
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect();
    let raw: Vec<Direction> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let d: Vec<f64> = cloud
                .point(i)
                .iter()
                .zip(cloud.point(j))
                .map(|(a, b)| a - b)
                .collect();
            Direction::new(d)
        })
        .collect::<Result<_>>()?;
    Ok(dedup_secants(raw, pairs, cloud.dim(), cloud.label()))
}

/// Secants restricted to the point indices in `members`.
pub fn secant_directions_among(cloud: &PointCloud, members: &[usize]) -> Result<SecantSet> {
    let sub = cloud.subset(members)?;
    let mut set = secant_directions(&sub)?;
    for p in &mut set.pairs {
        *p = (members[p.0], members[p.1]);
    }
    Ok(set)
}

fn dedup_secants(
    raw: Vec<Direction>,
    pairs: Vec<(usize, usize)>,
    dim: usize,
    label: &str,
) -> SecantSet {
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        lex_cmp(raw[a].as_slice(), raw[b].as_slice()).then(a.cmp(&b))
    });
    let mut keep = vec![false; raw.len()];
    let mut kept_sorted: Vec<usize> = Vec::new();
    for &idx in &order {
        let d = raw[idx].as_slice();
        let lead = d.first().copied().unwrap_or(0.0);
        let mut duplicate = false;
        for &k in kept_sorted.iter().rev() {
            let other = raw[k].as_slice();
            if lead - other.first().copied().unwrap_or(0.0) > DEDUP_TOLERANCE {
                break;
            }
            if dist(d, other) <= DEDUP_TOLERANCE {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            keep[idx] = true;
            kept_sorted.push(idx);
        }
    }
    let mut directions = Vec::with_capacity(kept_sorted.len());
    let mut kept_pairs = Vec::with_capacity(kept_sorted.len());
    for (i, d) in raw.into_iter().enumerate() {
        if keep[i] {
            directions.push(d);
            kept_pairs.push(pairs[i]);
        }
    }
    SecantSet {
        dim,
        directions,
        pairs: kept_pairs,
        source: label.to_string(),
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Smallest sine between `dir` and the secant of any pair of `cloud`, taken
/// over every pair (no deduplication).
pub fn min_sin_over_pairs(cloud: &PointCloud, dir: &[f64]) -> f64 {
    let (min, _, _, _) = pair_extremes(cloud.len(), |i, j| {
        let d: Vec<f64> = cloud
            .point(i)
            .iter()
            .zip(cloud.point(j))
            .map(|(a, b)| a - b)
            .collect();
        let n = norm(&d);
        let u: Vec<f64> = d.iter().map(|x| x / n).collect();
        sin_between_units(dir, &u)
    });
    min.unwrap_or(1.0)
}

/// Minimum and maximum of `f(i, j)` over all pairs `i < j < m`, each with its
/// attaining pair. Ties resolve to the lexicographically smallest pair, so
/// the result does not depend on evaluation order.
pub fn pair_extremes<F>(
    m: usize,
    f: F,
) -> (Option<f64>, (usize, usize), Option<f64>, (usize, usize))
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    type Acc = (f64, (usize, usize), f64, (usize, usize));
    let pick_min = |a: (f64, (usize, usize)), b: (f64, (usize, usize))| {
        if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let pick_max = |a: (f64, (usize, usize)), b: (f64, (usize, usize))| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let init: Acc = (
        f64::INFINITY,
        (usize::MAX, usize::MAX),
        f64::NEG_INFINITY,
        (usize::MAX, usize::MAX),
    );
    let res = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut acc = init;
            for j in (i + 1)..m {
                let v = f(i, j);
                let lo = pick_min((acc.0, acc.1), (v, (i, j)));
                let hi = pick_max((acc.2, acc.3), (v, (i, j)));
                acc = (lo.0, lo.1, hi.0, hi.1);
            }
            acc
        })
        .reduce(
            || init,
            |a, b| {
                let lo = pick_min((a.0, a.1), (b.0, b.1));
                let hi = pick_max((a.2, a.3), (b.2, b.3));
                (lo.0, lo.1, hi.0, hi.1)
            },
        );
    if m < 2 {
        (None, res.1, None, res.3)
    } else {
        (Some(res.0), res.1, Some(res.2), res.3)
    }
}

/// Sampled map `f: X → Y`; the image of source point `i` is target point
/// `pairing[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledMap {
    pub source: PointCloud,
    pub target: PointCloud,
    pub pairing: Vec<usize>,
}

impl SampledMap {
    pub fn new(source: PointCloud, target: PointCloud, pairing: Vec<usize>) -> Result<Self> {
        let m = source.len();
        if target.len() != m || pairing.len() != m {
            return Err(Error::InvalidInput(format!(
                "sampled map needs equal sizes: source {m}, target {}, pairing {}",
                target.len(),
                pairing.len()
            )));
        }
        let mut seen = vec![false; m];
        for &p in &pairing {
            if p >= m || seen[p] {
                return Err(Error::InvalidInput(
                    "pairing is not a permutation".into(),
                ));
            }
            seen[p] = true;
        }
        Ok(SampledMap {
            source,
            target,
            pairing,
        })
    }

    /// Map sending source point `i` to `images[i]`.
    pub fn from_images(source: PointCloud, images: Vec<Vec<f64>>) -> Result<Self> {
        let target = PointCloud::new_image(
            format!("{}-image", source.label()),
            source.intrinsic_dim(),
            images,
        )?;
        let m = source.len();
        SampledMap::new(source, target, (0..m).collect())
    }

    pub fn identity(source: PointCloud) -> Self {
        let m = source.len();
        SampledMap {
            target: source.clone(),
            source,
            pairing: (0..m).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn image(&self, i: usize) -> &[f64] {
        self.target.point(self.pairing[i])
    }

    /// Images listed in source order.
    pub fn images(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.image(i).to_vec()).collect()
    }
}

/// Two-sided Lipschitz constants of a sampled map, with witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub lower: f64,
    pub upper: f64,
    pub witness_lower: (usize, usize),
    pub witness_upper: (usize, usize),
    pub injective: bool,
}

impl DistortionReport {
    /// Whether `lower·‖x−y‖ ≤ ‖f(x)−f(y)‖ ≤ upper·‖x−y‖` for one pair.
    pub fn brackets(&self, src_dist: f64, img_dist: f64, rel_slack: f64) -> bool {
        img_dist >= self.lower * src_dist * (1.0 - rel_slack)
            && img_dist <= self.upper * src_dist * (1.0 + rel_slack)
    }
}

/// Exhaustive distortion of `x_i ↦ images[i]` over all pairs.
pub fn distortion_of(source: &PointCloud, images: &[Vec<f64>]) -> Result<DistortionReport> {
    if images.len() != source.len() {
        return Err(Error::InvalidInput(
            "image count differs from source size".into(),
        ));
    }
    if source.len() < 2 {
        return Err(Error::Precondition(
            "distortion needs at least two points".into(),
        ));
    }
    let (lo, wl, hi, wu) = pair_extremes(source.len(), |i, j| {
        dist(&images[i], &images[j]) / dist(source.point(i), source.point(j))
    });
    let lower = lo.unwrap_or(1.0);
    let upper = hi.unwrap_or(1.0);
    Ok(DistortionReport {
        lower,
        upper,
        witness_lower: wl,
        witness_upper: wu,
        injective: lower > 0.0,
    })
}

pub fn distortion(map: &SampledMap) -> Result<DistortionReport> {
    distortion_of(&map.source, &map.images())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cloud(points: Vec<Vec<f64>>) -> PointCloud {
        PointCloud::new("t", 0, points).unwrap()
    }

    #[test]
    fn rejects_coincident_points() {
        let err = PointCloud::new("t", 0, vec![vec![0.0, 1.0], vec![2.0, 0.0], vec![0.0, 1.0]])
            .unwrap_err();
        assert_eq!(err, Error::CoincidentPoints { i: 0, j: 2 });
    }

    #[test]
    fn rejects_mixed_dimensions_and_bad_intrinsic_dim() {
        assert!(matches!(
            PointCloud::new("t", 0, vec![vec![0.0], vec![1.0, 2.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(PointCloud::new("t", 3, vec![vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn direction_sign_is_canonical() {
        let d = Direction::new(vec![-3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(d.as_slice()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(d.as_slice()[1], -0.8, epsilon = 1e-15);
        let z = Direction::new(vec![1e-13, -2.0]).unwrap();
        assert!(z.as_slice()[1] > 0.0);
        assert!(Direction::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn secants_of_a_pair() {
        let s = secant_directions(&cloud(vec![vec![0.0, 0.0], vec![1.0, 0.0]])).unwrap();
        assert_eq!(s.directions, vec![Direction::axis(2, 0)]);
    }

    #[test]
    fn collinear_secants_are_merged() {
        let s = secant_directions(&cloud(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![2.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.directions[0], Direction::axis(2, 0));
    }

    #[test]
    fn secants_of_a_right_triangle() {
        let s = secant_directions(&cloud(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ]))
        .unwrap();
        // hand-normalized pair differences
        let h = 0.5f64.sqrt();
        let expected = [vec![1.0, 0.0], vec![0.0, 1.0], vec![h, -h]];
        assert_eq!(s.len(), 3);
        for e in &expected {
            assert!(s
                .directions
                .iter()
                .any(|d| dist(d.as_slice(), e) < 1e-15));
        }
    }

    #[test]
    fn single_point_has_no_secants() {
        assert_eq!(
            secant_directions(&cloud(vec![vec![1.0, 2.0]])).unwrap_err(),
            Error::EmptySecants
        );
    }

    #[test]
    fn sin_angle_examples() {
        let e1 = Direction::axis(2, 0);
        let e2 = Direction::axis(2, 1);
        let diag = Direction::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(sin_angle(&e1, &e2).unwrap(), 1.0);
        assert_eq!(sin_angle(&e1, &e1).unwrap(), 0.0);
        // sqrt(1 - (1/sqrt2)^2) by hand
        assert_abs_diff_eq!(
            sin_angle(&e1, &diag).unwrap(),
            0.707_106_781_186_547_5,
            epsilon = 1e-15
        );
        assert!(sin_angle(&e1, &Direction::axis(3, 0)).is_err());
    }

    #[test]
    fn distortion_examples() {
        let c = cloud(vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        let id = distortion(&SampledMap::identity(c.clone())).unwrap();
        assert_eq!((id.lower, id.upper), (1.0, 1.0));

        let doubled = SampledMap::from_images(
            c.clone(),
            c.points().map(|p| p.iter().map(|x| 2.0 * x).collect()).collect(),
        )
        .unwrap();
        let r = distortion(&doubled).unwrap();
        assert_eq!((r.lower, r.upper), (2.0, 2.0));

        let proj = SampledMap::from_images(c, vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let r = distortion(&proj).unwrap();
        assert_abs_diff_eq!(r.lower, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.upper, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn distortion_flags_collapse() {
        let c = cloud(vec![vec![0.0], vec![1.0], vec![2.0]]);
        let m = SampledMap::from_images(c, vec![vec![0.0], vec![5.0], vec![0.0]]).unwrap();
        let r = distortion(&m).unwrap();
        assert!(!r.injective);
        assert_eq!(r.lower, 0.0);
        assert_eq!(r.witness_lower, (0, 2));
    }

    #[test]
    fn pairing_must_be_a_permutation() {
        let c = cloud(vec![vec![0.0], vec![1.0]]);
        assert!(SampledMap::new(c.clone(), c.clone(), vec![0, 0]).is_err());
        assert!(SampledMap::new(c.clone(), c, vec![1, 0]).is_ok());
    }

    #[test]
    fn json_round_trip_validates() {
        let txt = r#"{"label":"a","ambient_dim":2,"intrinsic_dim":0,"points":[[0,0],[1,2]]}"#;
        let c: PointCloud = serde_json::from_str(txt).unwrap();
        assert_eq!(c.len(), 2);
        let bad = r#"{"label":"a","ambient_dim":2,"intrinsic_dim":0,"points":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<PointCloud>(bad).is_err());
        let back: PointCloud = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
