//! Extension of a sampled bi-Lipschitz embedding `f: X → R^n` to a tame
//! homeomorphism `F` of `R^n` with `F|_X = f`.
//!
//! Both `X` and `f(X)` are first pushed into complementary coordinate blocks
//! of a working space `R^{n'+1}`, then a pair of shears per coordinate moves
//! the `X` block onto the `f(X)` block one axis at a time.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distortion_of, DistortionReport, PointCloud, SampledMap};
use crate::linalg::{
    complete_orthonormal, determinant, dist, from_dmatrix, identity, mat_vec, norm, Matrix,
};
use crate::lipschitz::SampledLipschitzFunction;
use crate::projection::{
    germ_whitney_reduce_with, whitney_reduce_with, ReductionResult, SearchOptions, EPSILON_MIN,
};
use crate::tame::{projection_to_tame, Factor, Offset, ShearMap, TameMap, UnimodularMap};

/// Largest tolerated deviation of a sample from the state the induction
/// predicts for it.
pub const STAGE_DRIFT: f64 = 1e-6;

pub const DEFAULT_SPLIT_TRIALS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Needs `n ≥ 2k+2`.
    #[serde(rename = "sa")]
    Semialgebraic,
    /// Needs `n ≥ 4k+2`.
    #[serde(rename = "plain")]
    Plain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionOptions {
    pub split_trials: usize,
    pub search: SearchOptions,
    /// Radius schedule for the local variant; `None` halves the source
    /// radius twenty times.
    pub schedule: Option<Vec<f64>>,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions {
            split_trials: DEFAULT_SPLIT_TRIALS,
            search: SearchOptions::default(),
            schedule: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCoordinates {
    #[serde(rename = "S")]
    pub s: UnimodularMap,
    #[serde(rename = "T")]
    pub t: UnimodularMap,
    /// Distortion of `q_r` on the graph cloud, `r = 0..=n'`.
    pub q_distortions: Vec<DistortionReport>,
}

impl SplitCoordinates {
    pub fn min_lower(&self) -> f64 {
        self.q_distortions
            .iter()
            .map(|d| d.lower)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResult {
    #[serde(rename = "F")]
    pub map: TameMap,
    pub isotopy_ready: bool,
    pub interpolation_error: f64,
    pub worst_index: Option<usize>,
    /// Distortion of `F` on the samples it was built for.
    pub report: Option<DistortionReport>,
    /// Largest drift seen in the stage checks of the shear induction.
    pub stage_drift: f64,
    /// Source indices the map was built on (all of them for the global case).
    pub indices: Vec<usize>,
    /// Final working radius (local case only).
    pub radius: Option<f64>,
    pub split: Option<SplitCoordinates>,
}

impl ExtensionResult {
    /// The tolerance the interpolation error is held to.
    pub fn tolerance(f: &SampledMap, indices: &[usize]) -> f64 {
        let scale = indices.iter().map(|&i| norm(f.image(i))).fold(0.0, f64::max);
        1e-8 * (1.0 + scale)
    }
}

fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = from_dmatrix(&q);
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for row in q.iter_mut() {
                row[j] = -row[j];
            }
        }
    }
    if determinant(&q) < 0.0 {
        for row in q.iter_mut() {
            row[0] = -row[0];
        }
    }
    q
}

fn q_reports(
    graph: &PointCloud,
    half: usize,
    s: &Matrix,
    t: &Matrix,
) -> Result<Vec<DistortionReport>> {
    let zw: Vec<(Vec<f64>, Vec<f64>)> = graph
        .points()
        .map(|p| (mat_vec(s, &p[..half]), mat_vec(t, &p[half..])))
        .collect();
    (0..=half)
        .map(|r| {
            let images: Vec<Vec<f64>> = zw
                .iter()
                .map(|(z, w)| z[..r].iter().chain(&w[r..]).copied().collect())
                .collect();
            distortion_of(graph, &images)
        })
        .collect()
}

/// Finds `S, T ∈ SL(n')` so that every mixed projection
/// `q_r(x, y) = ((Sx)_1..(Sx)_r, (Ty)_{r+1}..(Ty)_{n'})` is bi-Lipschitz on
/// the graph cloud. The identity is tried first, then `trials` random
/// rotation pairs; the candidate with the best worst-case lower bound wins.
pub fn split_coordinates(graph: &PointCloud, seed: u64, trials: usize) -> Result<SplitCoordinates> {
    if !graph.dim().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "graph cloud must have even dimension, got {}",
            graph.dim()
        )));
    }
    let half = graph.dim() / 2;
    let id = identity(half);
    if graph.len() < 2 {
        return Ok(SplitCoordinates {
            s: UnimodularMap::identity(half),
            t: UnimodularMap::identity(half),
            q_distortions: Vec::new(),
        });
    }
    let base = q_reports(graph, half, &id, &id)?;
    for (name, rep) in [("second", &base[0]), ("first", &base[half])] {
        if rep.lower < EPSILON_MIN {
            return Err(Error::Precondition(format!(
                "{name} coordinate block of the graph is not bi-Lipschitz (lower {:e}, pair {:?})",
                rep.lower, rep.witness_lower
            )));
        }
    }
    let score = |reps: &[DistortionReport]| {
        reps.iter()
            .enumerate()
            .map(|(r, d)| (d.lower, r))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    };
    let mut best = (score(&base), id.clone(), id, base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s = random_rotation(&mut rng, half);
        let t = random_rotation(&mut rng, half);
        let reps = q_reports(graph, half, &s, &t)?;
        let sc = score(&reps);
        if sc.0 > best.0 .0 {
            best = (sc, s, t, reps);
        }
    }
    let ((lower, r), s, t, reps) = best;
    if lower < EPSILON_MIN {
        return Err(Error::SearchFailure {
            stage: format!("split (q_{r} collapses)"),
            best: s.iter().chain(&t).flatten().copied().collect(),
            epsilon: lower,
        });
    }
    Ok(SplitCoordinates {
        s: UnimodularMap::new(s)?,
        t: UnimodularMap::new(t)?,
        q_distortions: reps,
    })
}

/// Tame map sending the reduced samples into `R^l × 0`: rotate so the
/// reduction rows come first, then shear the remaining coordinates away.
fn flatten_map(cloud: &PointCloud, red: &ReductionResult) -> Result<TameMap> {
    let n = cloud.dim();
    let l = red.linear.len();
    let mut q = red.linear.clone();
    q.extend(complete_orthonormal(&red.linear, n));
    if q.len() != n {
        return Err(Error::InvalidInput("could not complete the reduction frame".into()));
    }
    if determinant(&q) < 0.0 {
        for x in q[n - 1].iter_mut() {
            *x = -*x;
        }
    }
    let rot = TameMap::from_linear(UnimodularMap::new(q)?).decomposed()?;
    let rotated = PointCloud::new_image(cloud.label(), 0, rot.eval_cloud(cloud)?)?;
    let pi = projection_to_tame(&rotated, l).map_err(|e| e.staged("flatten"))?;
    rot.then(pi)
}

/// Cyclic shift of the first `l+1` axes (`e_j ↦ e_{j+1}`, `e_l ↦ ±e_0`),
/// the sign chosen so the determinant is one.
fn shift_matrix(n: usize, l: usize) -> Matrix {
    let mut m = identity(n);
    for row in m.iter_mut().take(l + 1) {
        row[..=l].fill(0.0);
    }
    for j in 0..l {
        m[j + 1][j] = 1.0;
    }
    m[0][l] = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    m
}

fn block_map(n: usize, at: usize, block: &Matrix) -> Result<TameMap> {
    let mut m = identity(n);
    for (i, row) in block.iter().enumerate() {
        m[at + i][at..at + row.len()].copy_from_slice(row);
    }
    TameMap::from_linear(UnimodularMap::new(m)?).decomposed()
}

fn apply_all(map: &TameMap, states: &mut [Vec<f64>]) {
    for x in states.iter_mut() {
        for f in map.factors() {
            f.apply(x);
        }
    }
}

fn apply_factor(f: &Factor, states: &mut [Vec<f64>]) {
    for x in states.iter_mut() {
        f.apply(x);
    }
}

fn sampled_shear(
    states: &[Vec<f64>],
    axis: usize,
    inputs: Vec<usize>,
    values: Vec<f64>,
    sign: i8,
    stage: &str,
) -> Result<Factor> {
    let domain: Vec<Vec<f64>> = states
        .iter()
        .map(|x| inputs.iter().map(|&i| x[i]).collect())
        .collect();
    let domain = PointCloud::new(stage.to_string(), 0, domain)
        .map_err(|e| Error::Precondition(format!("{stage}: {e}")))?;
    let f = SampledLipschitzFunction::new(domain, values)?;
    Ok(Factor::Shear(ShearMap::new(axis, inputs, Offset::Sampled(f), sign)?))
}

struct Core {
    map: TameMap,
    drift: f64,
    split: SplitCoordinates,
}

/// Given samples `xs ⊂ R^{n'} × 0` and `ys ⊂ 0 × R^{n'}` (inside `R^n`,
/// `n ≥ n'+1`), builds the shear induction carrying each `xs[i]` to `ys[i]`.
fn shear_induction(
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    nprime: usize,
    seed: u64,
    trials: usize,
) -> Result<Core> {
    let n = xs.first().map_or(nprime + 1, |x| x.len());
    let nw = nprime + 1;
    let graph: Vec<Vec<f64>> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| x[..nprime].iter().chain(&y[1..nw]).copied().collect())
        .collect();
    let graph = PointCloud::new_image("graph", 0, graph)?;
    let split = split_coordinates(&graph, seed, trials)?;

    let zmap = block_map(n, 0, split.s.matrix())?;
    let wmap = block_map(n, 1, split.t.matrix())?;

    let mut cur: Vec<Vec<f64>> = xs.to_vec();
    apply_all(&zmap, &mut cur);
    let mut target: Vec<Vec<f64>> = ys.to_vec();
    apply_all(&wmap, &mut target);
    let start = cur.clone();

    let mut factors: Vec<Factor> = zmap.factors().to_vec();
    let mut drift = 0.0f64;
    for r in (1..=nprime).rev() {
        let inputs_a: Vec<usize> = (0..r).chain(r + 1..nw).collect();
        let values: Vec<f64> = target.iter().map(|w| w[r]).collect();
        let a = sampled_shear(&cur, r, inputs_a, values, 1, &format!("A_{}", r - 1))?;
        apply_factor(&a, &mut cur);

        let inputs_b: Vec<usize> = (0..r - 1).chain(r..nw).collect();
        let values: Vec<f64> = cur.iter().map(|x| x[r - 1]).collect();
        let b = sampled_shear(&cur, r - 1, inputs_b, values, -1, &format!("B_{}", r - 1))?;
        apply_factor(&b, &mut cur);
        factors.push(a);
        factors.push(b);

        // expected: (z_1..z_{r-1}, 0, f'_r, …, f'_{n'})
        let mut worst = 0.0f64;
        for ((x, z), w) in cur.iter().zip(&start).zip(&target) {
            for c in 0..n {
                let want = if c + 1 < r {
                    z[c]
                } else if c + 1 == r {
                    0.0
                } else if c < nw {
                    w[c]
                } else {
                    0.0
                };
                worst = worst.max((x[c] - want).abs());
            }
        }
        if worst > STAGE_DRIFT {
            return Err(Error::Precondition(format!(
                "stage {r}: samples drifted {worst:e} from the predicted state"
            )));
        }
        drift = drift.max(worst);
    }
    factors.extend(wmap.inverse().factors().iter().cloned());
    Ok(Core {
        map: TameMap::new(n, factors)?,
        drift,
        split,
    })
}

fn assemble(
    f: &SampledMap,
    indices: Vec<usize>,
    red_x: &ReductionResult,
    red_y: &ReductionResult,
    seed: u64,
    trials: usize,
    radius: Option<f64>,
) -> Result<ExtensionResult> {
    let n = f.source.dim();
    let l = red_x.linear.len();
    let xs = f.source.subset(&indices)?;
    let ys = PointCloud::new_image("image", 0, indices.iter().map(|&i| f.image(i).to_vec()).collect())?;

    let a = flatten_map(&xs, red_x)?;
    let shift = TameMap::from_linear(UnimodularMap::new(shift_matrix(n, l))?).decomposed()?;
    let b = flatten_map(&ys, red_y)?.then(shift)?;

    let mut xw = xs.to_vecs();
    apply_all(&a, &mut xw);
    let mut yw = ys.to_vecs();
    apply_all(&b, &mut yw);

    let core = shear_induction(&xw, &yw, l, seed, trials)?;
    let map = a.then(core.map)?.then(b.inverse())?;
    finish(f, indices, map, core.drift, radius, Some(core.split))
}

fn finish(
    f: &SampledMap,
    indices: Vec<usize>,
    map: TameMap,
    drift: f64,
    radius: Option<f64>,
    split: Option<SplitCoordinates>,
) -> Result<ExtensionResult> {
    let mut worst = (0.0f64, None);
    let mut images = Vec::with_capacity(indices.len());
    for &i in &indices {
        let y = map.eval(f.source.point(i))?;
        let e = dist(&y, f.image(i));
        if e > worst.0 || worst.1.is_none() {
            worst = (e, Some(i));
        }
        images.push(y);
    }
    let report = if indices.len() >= 2 {
        Some(distortion_of(&f.source.subset(&indices)?, &images)?)
    } else {
        None
    };
    Ok(ExtensionResult {
        isotopy_ready: map.is_isotopy_ready(),
        map,
        interpolation_error: worst.0,
        worst_index: worst.1,
        report,
        stage_drift: drift,
        indices,
        radius,
        split,
    })
}

fn check_map(f: &SampledMap) -> Result<()> {
    if f.target.dim() != f.source.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.source.dim(),
            found: f.target.dim(),
        });
    }
    if f.len() >= 2 {
        let rep = distortion_of(&f.source, &f.images())?;
        if rep.lower < EPSILON_MIN {
            return Err(Error::Precondition(format!(
                "f is not bi-Lipschitz on the samples: pair {:?} has ratio {:e}",
                rep.witness_lower, rep.lower
            )));
        }
    }
    Ok(())
}

fn stage_seed(seed: u64, stage: u64) -> u64 {
    seed.wrapping_add(stage.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Tame `F: R^n → R^n` with `F(x_i) = f(x_i)` on every sample.
pub fn extend_embedding(f: &SampledMap, k: usize, mode: Mode, seed: u64) -> Result<ExtensionResult> {
    extend_embedding_with(f, k, mode, seed, &ExtensionOptions::default())
}

pub fn extend_embedding_with(
    f: &SampledMap,
    k: usize,
    mode: Mode,
    seed: u64,
    opts: &ExtensionOptions,
) -> Result<ExtensionResult> {
    let n = f.source.dim();
    let need = match mode {
        Mode::Semialgebraic => 2 * k + 2,
        Mode::Plain => 4 * k + 2,
    };
    if n < need {
        return Err(Error::Precondition(format!(
            "ambient dimension {n} is below {need} required for k = {k} in {mode:?} mode"
        )));
    }
    check_map(f)?;
    let l = 2 * k + 1;
    let xs = f.source.clone().with_intrinsic_dim(k)?;
    let ys = PointCloud::new_image("image", k, f.images())?;
    let red_x = whitney_reduce_with(&xs, l, stage_seed(seed, 1), opts.search)
        .map_err(|e| e.staged("reduce source"))?;
    let red_y = whitney_reduce_with(&ys, l, stage_seed(seed, 2), opts.search)
        .map_err(|e| e.staged("reduce image"))?;
    assemble(
        f,
        (0..f.len()).collect(),
        &red_x,
        &red_y,
        stage_seed(seed, 3),
        opts.split_trials,
        None,
    )
}

/// Germ version: `F` is tame near the origin and interpolates `f` on the
/// samples inside the final working radius.
pub fn extend_embedding_local(
    f: &SampledMap,
    k: usize,
    schedule: Option<&[f64]>,
    seed: u64,
) -> Result<ExtensionResult> {
    let opts = ExtensionOptions {
        schedule: schedule.map(<[f64]>::to_vec),
        ..Default::default()
    };
    extend_embedding_local_with(f, k, seed, &opts)
}

pub fn extend_embedding_local_with(
    f: &SampledMap,
    k: usize,
    seed: u64,
    opts: &ExtensionOptions,
) -> Result<ExtensionResult> {
    let n = f.source.dim();
    if n < 2 * k + 1 {
        return Err(Error::Precondition(format!(
            "ambient dimension {n} is below 2k+1 = {}",
            2 * k + 1
        )));
    }
    check_map(f)?;
    let origin = f
        .source
        .origin_index(1e-12)
        .ok_or_else(|| Error::Precondition("source sample must contain the origin".into()))?;
    if norm(f.image(origin)) > 1e-12 {
        return Err(Error::Precondition("f must send the origin to the origin".into()));
    }
    let schedule = match &opts.schedule {
        Some(s) => s.clone(),
        None => crate::projection::default_schedule(&f.source),
    };
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "radius schedule must be strictly decreasing".into(),
        ));
    }
    let norms: Vec<f64> = f.source.points().map(norm).collect();
    let target = 2 * k;
    let mut last_err = None;
    for (j, &r) in schedule.iter().enumerate() {
        let members: Vec<usize> = (0..f.len()).filter(|&i| norms[i] <= r).collect();
        if members.len() < 2 {
            return finish(f, members, TameMap::identity(n), 0.0, Some(r), None);
        }
        match local_attempt(f, k, target, &members, &schedule[j..], seed, opts) {
            Ok(res) => return Ok(res),
            Err(e @ (Error::SearchFailure { .. } | Error::NonInjective { .. })) => {
                last_err = Some(e)
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::SearchFailure {
        stage: "local extension: radius schedule exhausted".into(),
        best: Vec::new(),
        epsilon: 0.0,
    }))
}

fn local_attempt(
    f: &SampledMap,
    k: usize,
    target: usize,
    members: &[usize],
    schedule: &[f64],
    seed: u64,
    opts: &ExtensionOptions,
) -> Result<ExtensionResult> {
    let n = f.source.dim();
    let xs = f.source.subset(members)?.with_intrinsic_dim(k)?;
    let red_x = germ_whitney_reduce_with(&xs, target, Some(schedule), stage_seed(seed, 1), opts.search)
        .map_err(|e| e.staged("reduce source germ"))?;
    let kept: Vec<usize> = red_x.indices.iter().map(|&i| members[i]).collect();
    if kept.len() < 2 {
        return finish(f, kept, TameMap::identity(n), 0.0, red_x.radius, None);
    }
    let ys = PointCloud::new_image("image", k, kept.iter().map(|&i| f.image(i).to_vec()).collect())?;
    let y_schedule = crate::projection::default_schedule(&ys);
    let red_y = germ_whitney_reduce_with(&ys, target, Some(&y_schedule), stage_seed(seed, 2), opts.search)
        .map_err(|e| e.staged("reduce image germ"))?;
    let kept: Vec<usize> = red_y.indices.iter().map(|&i| kept[i]).collect();
    if kept.len() < 2 {
        return finish(f, kept, TameMap::identity(n), 0.0, red_x.radius, None);
    }
    let radius = kept.iter().map(|&i| norm(f.source.point(i))).fold(0.0, f64::max);
    let radius = red_x.radius.map(|r| r.min(schedule[0]).max(radius));
    assemble(
        f,
        kept,
        &red_x,
        &red_y,
        stage_seed(seed, 3),
        opts.split_trials,
        radius,
    )
}
