//! Generic projection directions and the iterated reduction of a sampled set
//! to `R^{2k+1}` (global) or, near the origin, to `R^{2k}`.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    distortion_of, min_sin_over_pairs, pair_extremes, secant_directions,
    secant_directions_among, Direction, PointCloud, SampledMap, SecantSet,
};
use crate::linalg::{dist, identity, mat_mul, mat_vec, norm, orthogonalize, Matrix};

/// Directions whose minimal sine to the secants falls below this count as
/// hitting a secant.
pub const EPSILON_MIN: f64 = 1e-6;

/// Projected points closer than this are treated as collapsed.
pub const COLLAPSE_DISTANCE: f64 = 1e-12;

pub const DEFAULT_TRIALS: usize = 64;

/// Default number of halvings in the germ radius schedule.
pub const SCHEDULE_STEPS: usize = 20;

/// Accepting a working radius needs the exhaustive epsilon inside the ball to
/// reach this fraction of the epsilon achieved against the limit directions.
const GERM_KEEP_FRACTION: f64 = 0.5;

/// The limit secants are taken in the smallest scheduled ball holding at
/// least this many points (or every point, for smaller clouds).
const LIMIT_MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Random starting directions.
    pub trials: usize,
    /// How many of the best starts get a Nelder-Mead pass.
    pub refine: usize,
    pub max_iters: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            trials: DEFAULT_TRIALS,
            refine: 4,
            max_iters: 400,
        }
    }
}

impl SearchOptions {
    pub fn with_trials(trials: usize) -> Self {
        SearchOptions {
            trials,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionStep {
    pub direction: Direction,
    pub epsilon: f64,
    pub resulting_dim: usize,
    /// Orthonormal rows spanning the hyperplane orthogonal to `direction`.
    pub frame: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub steps: Vec<ProjectionStep>,
    pub final_cloud: PointCloud,
    /// Exhaustive lower distortion of the composite projection.
    pub composite_lower: f64,
    pub composite_upper: f64,
    /// Product of the step frames: a `target × n` matrix with orthonormal rows.
    pub linear: Matrix,
    /// Indices into the input cloud of the points that were kept. The global
    /// reduction keeps everything; the germ variant drops points outside its
    /// working ball.
    pub indices: Vec<usize>,
    /// Final working radius (germ variant only).
    pub radius: Option<f64>,
}

impl ReductionResult {
    pub fn epsilon_product(&self) -> f64 {
        self.steps.iter().map(|s| s.epsilon).product()
    }

    /// The reduced source point for input index `indices[i]`.
    pub fn apply(&self, point: &[f64]) -> Vec<f64> {
        mat_vec(&self.linear, point)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GermSecantData {
    pub radius_schedule: Vec<f64>,
    pub limit_directions: SecantSet,
    pub full_directions: SecantSet,
}

/// Secant directions packed row by row, scored through `1 − max <u,s>²`.
/// Only steers the search; accepted directions are rescored exactly.
struct MinSin {
    dim: usize,
    flat: Vec<f64>,
}

impl MinSin {
    fn new(secants: &SecantSet) -> Self {
        MinSin {
            dim: secants.dim,
            flat: secants.directions.iter().flat_map(|d| d.as_slice().iter().copied()).collect(),
        }
    }

    fn score(&self, u: &[f64]) -> f64 {
        let max_dot = self
            .flat
            .par_chunks(self.dim * 4096)
            .map(|block| {
                block
                    .chunks_exact(self.dim)
                    .map(|s| s.iter().zip(u).map(|(a, b)| a * b).sum::<f64>().abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        (1.0 - max_dot * max_dot).max(0.0).sqrt()
    }
}

impl CostFunction for &MinSin {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, v: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let n = norm(v);
        if !(n > 0.0) || !n.is_finite() {
            return Ok(1.0);
        }
        let u: Vec<f64> = v.iter().map(|x| x / n).collect();
        Ok(-self.score(&u))
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let l = norm(&v);
        if l > 1e-6 {
            return v.into_iter().map(|x| x / l).collect();
        }
    }
}

fn refine(cost: &MinSin, start: &[f64], max_iters: u64) -> Vec<f64> {
    let n = start.len();
    let mut simplex = vec![start.to_vec()];
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += 0.1;
        simplex.push(v);
    }
    let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(1e-13) else {
        return start.to_vec();
    };
    match Executor::new(cost, solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
    {
        Ok(res) => res
            .state()
            .get_best_param()
            .cloned()
            .unwrap_or_else(|| start.to_vec()),
        Err(_) => start.to_vec(),
    }
}

/// Direction maximizing the smallest sine to `secants`, found by random
/// multistart followed by Nelder-Mead refinement of the best starts.
pub fn find_avoiding_direction(
    secants: &SecantSet,
    trials: usize,
    seed: u64,
) -> Result<(Direction, f64)> {
    find_avoiding_direction_with(secants, SearchOptions::with_trials(trials), seed)
}

pub fn find_avoiding_direction_with(
    secants: &SecantSet,
    opts: SearchOptions,
    seed: u64,
) -> Result<(Direction, f64)> {
    let n = secants.dim;
    if n < 2 {
        return Err(Error::Precondition(format!(
            "direction search needs ambient dimension at least 2, got {n}"
        )));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if secants.is_empty() {
        return Ok((Direction::axis(n, n - 1), 1.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..opts.trials).map(|_| random_unit(&mut rng, n)).collect();
    let cost = MinSin::new(secants);
    let scores: Vec<f64> = starts.iter().map(|v| cost.score(v)).collect();

    let mut order: Vec<usize> = (0..starts.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let refined: Vec<Vec<f64>> = order
        .iter()
        .take(opts.refine)
        .map(|&i| refine(&cost, &starts[i], opts.max_iters))
        .collect();

    let mut best: Option<(f64, Direction)> = None;
    for v in starts.iter().chain(&refined) {
        let d = Direction::new(v.clone())?;
        let s = secants.min_sin(d.as_slice()).0;
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, d));
        }
    }
    let (eps, dir) = best.expect("at least one trial");
    if eps < EPSILON_MIN {
        return Err(Error::SearchFailure {
            stage: "direction".into(),
            best: dir.as_slice().to_vec(),
            epsilon: eps,
        });
    }
    Ok((dir, eps))
}

/// Orthonormal basis of the hyperplane orthogonal to `d`: Gram-Schmidt on the
/// standard basis with the pivot axis (largest `|d_p|`) left out.
pub fn projection_frame(d: &Direction) -> Result<Matrix> {
    let v = d.as_slice();
    let n = v.len();
    let pivot = (0..n).fold(0, |p, i| if v[i].abs() > v[p].abs() { i } else { p });
    let mut basis = vec![v.to_vec()];
    for i in (0..n).filter(|&i| i != pivot) {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let w = orthogonalize(&e, &basis).ok_or_else(|| {
            Error::InvalidInput("degenerate projection frame".into())
        })?;
        basis.push(w);
    }
    Ok(basis.split_off(1))
}

fn first_collapse(points: &[Vec<f64>]) -> Option<(usize, usize)> {
    let (min, pair, _, _) = pair_extremes(points.len(), |i, j| dist(&points[i], &points[j]));
    match min {
        Some(d) if d < COLLAPSE_DISTANCE => Some(pair),
        _ => None,
    }
}

/// Orthogonal projection along `direction`, written in the frame returned by
/// [`projection_frame`].
pub fn project_cloud(cloud: &PointCloud, direction: &Direction) -> Result<(PointCloud, SampledMap)> {
    if direction.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            found: direction.dim(),
        });
    }
    let frame = projection_frame(direction)?;
    let (projected, _) = project_with_frame(cloud, &frame)?;
    let map = SampledMap::from_images(cloud.clone(), projected.to_vecs())?;
    Ok((projected, map))
}

fn project_with_frame(cloud: &PointCloud, frame: &Matrix) -> Result<(PointCloud, Vec<Vec<f64>>)> {
    let images: Vec<Vec<f64>> = cloud.points().map(|p| mat_vec(frame, p)).collect();
    if let Some((i, j)) = first_collapse(&images) {
        return Err(Error::NonInjective { i, j });
    }
    let label = format!("{}-proj", cloud.label());
    let k = cloud.intrinsic_dim().min(frame.len());
    Ok((PointCloud::new(label, k, images.clone())?, images))
}

fn step_seed(seed: u64, step: usize) -> u64 {
    seed ^ (step as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn finish(
    source: &PointCloud,
    indices: Vec<usize>,
    steps: Vec<ProjectionStep>,
    final_cloud: PointCloud,
    linear: Matrix,
    radius: Option<f64>,
) -> Result<ReductionResult> {
    let (lower, upper) = if indices.len() >= 2 {
        let sub = source.subset(&indices)?;
        let rep = distortion_of(&sub, &final_cloud.to_vecs())?;
        (rep.lower, rep.upper)
    } else {
        (1.0, 1.0)
    };
    let result = ReductionResult {
        steps,
        final_cloud,
        composite_lower: lower,
        composite_upper: upper,
        linear,
        indices,
        radius,
    };
    let bound = result.epsilon_product();
    if lower < bound * (1.0 - 1e-9) || upper > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "composite distortion ({lower}, {upper}) violates the bound {bound} from the steps"
        )));
    }
    Ok(result)
}

/// Projects `cloud` one codimension at a time until it sits in
/// `R^{target_dim}`, each time along a direction that avoids every secant.
pub fn whitney_reduce(cloud: &PointCloud, target_dim: usize, seed: u64) -> Result<ReductionResult> {
    whitney_reduce_with(cloud, target_dim, seed, SearchOptions::default())
}

pub fn whitney_reduce_with(
    cloud: &PointCloud,
    target_dim: usize,
    seed: u64,
    opts: SearchOptions,
) -> Result<ReductionResult> {
    let k = cloud.intrinsic_dim();
    if target_dim < 2 * k + 1 {
        return Err(Error::Precondition(format!(
            "target dimension {target_dim} is below 2k+1 = {} for k = {k}",
            2 * k + 1
        )));
    }
    if cloud.dim() < target_dim {
        return Err(Error::Precondition(format!(
            "cloud lives in R^{} which is already below the target {target_dim}",
            cloud.dim()
        )));
    }
    let mut current = cloud.clone();
    let mut linear = identity(cloud.dim());
    let mut steps = Vec::new();
    while current.dim() > target_dim {
        let idx = steps.len();
        let (direction, _) = if current.len() < 2 {
            (Direction::axis(current.dim(), current.dim() - 1), 1.0)
        } else {
            let secants = secant_directions(&current)?;
            find_avoiding_direction_with(&secants, opts, step_seed(seed, idx))
                .map_err(|e| e.staged(&format!("step {idx}")))?
        };
        let epsilon = min_sin_over_pairs(&current, direction.as_slice());
        if epsilon < EPSILON_MIN {
            return Err(Error::SearchFailure {
                stage: format!("step {idx}"),
                best: direction.as_slice().to_vec(),
                epsilon,
            });
        }
        let frame = projection_frame(&direction)?;
        let (next, _) = project_with_frame(&current, &frame)?;
        linear = mat_mul(&frame, &linear);
        steps.push(ProjectionStep {
            direction,
            epsilon,
            resulting_dim: next.dim(),
            frame,
        });
        current = next;
    }
    finish(cloud, (0..cloud.len()).collect(), steps, current, linear, None)
}

/// `r_j = r_0·2^{-j}` for `j = 0..=SCHEDULE_STEPS`, with `r_0` the cloud radius.
pub fn default_schedule(cloud: &PointCloud) -> Vec<f64> {
    let r0 = cloud.radius();
    (0..=SCHEDULE_STEPS).map(|j| r0 * 0.5f64.powi(j as i32)).collect()
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidInput("radius schedule is empty".into()));
    }
    if schedule.iter().any(|r| !(*r > 0.0)) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "radius schedule must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn members_within(norms: &[f64], pool: &[usize], r: f64) -> Vec<usize> {
    pool.iter().copied().filter(|&i| norms[i] <= r).collect()
}

/// Limit secants (pairs inside the smallest useful ball) and all secants.
pub fn germ_secant_data(cloud: &PointCloud, schedule: &[f64]) -> Result<GermSecantData> {
    check_schedule(schedule)?;
    let norms: Vec<f64> = cloud.points().map(norm).collect();
    let all: Vec<usize> = (0..cloud.len()).collect();
    let limit = limit_members(&norms, &all, schedule);
    Ok(GermSecantData {
        radius_schedule: schedule.to_vec(),
        limit_directions: secant_directions_among(cloud, &limit)?,
        full_directions: secant_directions(cloud)?,
    })
}

fn limit_members(norms: &[f64], pool: &[usize], schedule: &[f64]) -> Vec<usize> {
    let need = LIMIT_MIN_POINTS.min(pool.len());
    schedule
        .iter()
        .rev()
        .map(|&r| members_within(norms, pool, r))
        .find(|m| m.len() >= need)
        .unwrap_or_else(|| pool.to_vec())
}

/// Germ version of [`whitney_reduce`]: directions are chosen against the
/// secants of the innermost points, then the working ball is shrunk along
/// `schedule` until the direction also avoids every secant inside it.
pub fn germ_whitney_reduce(
    cloud: &PointCloud,
    target_dim: usize,
    schedule: Option<&[f64]>,
    seed: u64,
) -> Result<ReductionResult> {
    germ_whitney_reduce_with(cloud, target_dim, schedule, seed, SearchOptions::default())
}

pub fn germ_whitney_reduce_with(
    cloud: &PointCloud,
    target_dim: usize,
    schedule: Option<&[f64]>,
    seed: u64,
    opts: SearchOptions,
) -> Result<ReductionResult> {
    let k = cloud.intrinsic_dim();
    if target_dim < 2 * k {
        return Err(Error::Precondition(format!(
            "germ target dimension {target_dim} is below 2k = {}",
            2 * k
        )));
    }
    if cloud.dim() < target_dim {
        return Err(Error::Precondition(format!(
            "cloud lives in R^{} which is already below the target {target_dim}",
            cloud.dim()
        )));
    }
    if cloud.origin_index(1e-12).is_none() {
        return Err(Error::Precondition("germ sample must contain the origin".into()));
    }
    let owned;
    let schedule = match schedule {
        Some(s) => s,
        None => {
            owned = default_schedule(cloud);
            &owned[..]
        }
    };
    check_schedule(schedule)?;
    let norms: Vec<f64> = cloud.points().map(norm).collect();

    let mut slot = 0;
    let mut members = members_within(&norms, &(0..cloud.len()).collect::<Vec<_>>(), schedule[0]);
    let mut current = cloud.subset(&members)?;
    let mut linear = identity(cloud.dim());
    let mut steps = Vec::new();

    while current.dim() > target_dim {
        let idx = steps.len();
        let local: Vec<usize> = (0..members.len()).collect();
        let local_norms: Vec<f64> = members.iter().map(|&i| norms[i]).collect();
        let limit = limit_members(&local_norms, &local, &schedule[slot..]);
        // on a line every secant is the axis itself
        let (direction, eps_lim) = if limit.len() < 2 || current.dim() < 2 {
            (Direction::axis(current.dim(), current.dim() - 1), 1.0)
        } else {
            let secants = secant_directions_among(&current, &limit)?;
            find_avoiding_direction_with(&secants, opts, step_seed(seed, idx))
                .map_err(|e| e.staged(&format!("germ step {idx}")))?
        };
        let floor = EPSILON_MIN.max(GERM_KEEP_FRACTION * eps_lim);

        let mut accepted = None;
        let mut best_seen = 0.0f64;
        for (j, &r) in schedule.iter().enumerate().skip(slot) {
            let inside: Vec<usize> = local.iter().copied().filter(|&i| local_norms[i] <= r).collect();
            let sub = current.subset(&inside)?;
            let eps = min_sin_over_pairs(&sub, direction.as_slice());
            best_seen = best_seen.max(eps);
            if eps >= floor {
                accepted = Some((j, inside, sub, eps));
                break;
            }
        }
        let Some((j, inside, sub, epsilon)) = accepted else {
            return Err(Error::SearchFailure {
                stage: format!("germ step {idx}: radius schedule exhausted"),
                best: direction.as_slice().to_vec(),
                epsilon: best_seen,
            });
        };
        slot = j;
        members = inside.iter().map(|&i| members[i]).collect();

        let frame = projection_frame(&direction)?;
        let (next, _) = project_with_frame(&sub, &frame)?;
        linear = mat_mul(&frame, &linear);
        steps.push(ProjectionStep {
            direction,
            epsilon,
            resulting_dim: next.dim(),
            frame,
        });
        current = next;
    }
    finish(cloud, members, steps, current, linear, Some(schedule[slot]))
}
