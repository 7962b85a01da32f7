//! Independent checks: inner-metric ratio, Hausdorff distance, and the
//! end-to-end certificate for an extension.

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distortion_of, DistortionReport, PointCloud, SampledMap};
use crate::linalg::dist;
use crate::tame::{isotopy_eval, TameMap};

/// Neighbourhood graph of a cloud: an edge for every pair within `rho`.
#[derive(Debug, Clone)]
pub struct GeodesicGraph {
    pub nodes: PointCloud,
    pub rho: f64,
    graph: UnGraph<(), f64>,
}

impl GeodesicGraph {
    pub fn new(nodes: PointCloud, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidInput(format!("connection radius must be positive, got {rho}")));
        }
        let m = nodes.len();
        let mut graph = UnGraph::with_capacity(m, 0);
        for _ in 0..m {
            graph.add_node(());
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let d = dist(nodes.point(i), nodes.point(j));
                if d <= rho {
                    graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), d);
                }
            }
        }
        let g = GeodesicGraph { nodes, rho, graph };
        if m > 0 && g.distances_from(0).iter().any(|d| d.is_infinite()) {
            return Err(Error::Precondition(format!(
                "geodesic graph is disconnected at radius {rho}"
            )));
        }
        Ok(g)
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Shortest path lengths from `source` to every node.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        let map = dijkstra(&self.graph, NodeIndex::new(source), None, |e| *e.weight());
        let mut out = vec![f64::INFINITY; self.nodes.len()];
        for (node, d) in map {
            out[node.index()] = d;
        }
        out
    }
}

/// Three times the largest nearest-neighbour distance.
pub fn default_rho(cloud: &PointCloud) -> f64 {
    let m = cloud.len();
    let nn = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .filter(|&j| j != i)
                .map(|j| dist(cloud.point(i), cloud.point(j)))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    3.0 * nn
}

/// Largest ratio of graph distance to Euclidean distance over all pairs.
pub fn lne_ratio(cloud: &PointCloud, rho: f64) -> Result<f64> {
    if cloud.len() < 2 {
        return Ok(1.0);
    }
    let g = GeodesicGraph::new(cloud.clone(), rho)?;
    let m = cloud.len();
    let worst = (0..m)
        .into_par_iter()
        .map(|i| {
            let d = g.distances_from(i);
            ((i + 1)..m)
                .map(|j| d[j] / dist(cloud.point(i), cloud.point(j)))
                .fold(1.0, f64::max)
        })
        .reduce(|| 1.0, f64::max);
    Ok(worst)
}

/// Symmetric Hausdorff distance between two finite sets.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(directed(a, b).max(directed(b, a)))
}

fn directed(a: &PointCloud, b: &PointCloud) -> f64 {
    (0..a.len())
        .into_par_iter()
        .map(|i| {
            b.points()
                .map(|q| dist(a.point(i), q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Regular grid `[lo, hi]^n` with `per_axis` nodes on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub per_axis: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lo: -10.0,
            hi: 10.0,
            per_axis: 20,
        }
    }
}

impl GridSpec {
    pub fn node_count(&self, n: usize) -> usize {
        self.per_axis.pow(n as u32)
    }

    /// Grid node number `index`, last axis varying fastest.
    pub fn node(&self, n: usize, mut index: usize) -> Vec<f64> {
        let step = if self.per_axis > 1 {
            (self.hi - self.lo) / (self.per_axis - 1) as f64
        } else {
            0.0
        };
        let mut p = vec![0.0; n];
        for c in (0..n).rev() {
            p[c] = self.lo + step * (index % self.per_axis) as f64;
            index /= self.per_axis;
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Interpolation error is held to `interpolation·(1 + max‖f‖)`.
    pub interpolation: f64,
    pub round_trip: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            interpolation: 1e-8,
            round_trip: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub checks: Vec<Check>,
    pub distortion: Option<DistortionReport>,
    pub pass: bool,
}

impl CertificateReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Interpolation, round trip on the grid, distortion on the samples, and the
/// isotopy endpoints, in one report.
pub fn certify_extension(
    map: &TameMap,
    f: &SampledMap,
    grid: GridSpec,
    thresholds: Thresholds,
) -> Result<CertificateReport> {
    let n = map.dim();
    if f.source.dim() != n || f.target.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.source.dim(),
        });
    }
    let mut checks = Vec::new();

    let images = map.eval_cloud(&f.source)?;
    let (err, worst) = images
        .iter()
        .enumerate()
        .map(|(i, y)| (dist(y, f.image(i)), i))
        .fold((0.0, None), |acc, (e, i)| if acc.1.is_none() || e > acc.0 { (e, Some(i)) } else { acc });
    let scale = (0..f.len()).map(|i| crate::linalg::norm(f.image(i))).fold(0.0, f64::max);
    let tol = thresholds.interpolation * (1.0 + scale);
    checks.push(Check {
        name: "interpolation".into(),
        value: err,
        threshold: tol,
        pass: err <= tol,
        worst_index: worst,
    });

    let inverse = map.inverse();
    let count = grid.node_count(n);
    let (round_trip, rt_worst) = (0..count)
        .into_par_iter()
        .map(|i| {
            let p = grid.node(n, i);
            let back = inverse.eval(&map.eval(&p).expect("dimension checked")).expect("dimension checked");
            (dist(&back, &p), i)
        })
        .reduce(|| (0.0, usize::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    checks.push(Check {
        name: "round_trip".into(),
        value: round_trip,
        threshold: thresholds.round_trip,
        pass: round_trip <= thresholds.round_trip,
        worst_index: (rt_worst != usize::MAX).then_some(rt_worst),
    });

    if map.is_isotopy_ready() {
        let mut start = 0.0f64;
        let mut end = 0.0f64;
        for (i, p) in f.source.points().enumerate() {
            let y0 = isotopy_eval(map, 0.0, p)?;
            let y1 = isotopy_eval(map, 1.0, p)?;
            if y0 != p {
                start = start.max(dist(&y0, p).max(f64::MIN_POSITIVE));
            }
            if y1 != images[i] {
                end = end.max(dist(&y1, &images[i]).max(f64::MIN_POSITIVE));
            }
        }
        checks.push(Check {
            name: "isotopy_start".into(),
            value: start,
            threshold: 0.0,
            pass: start == 0.0,
            worst_index: None,
        });
        checks.push(Check {
            name: "isotopy_end".into(),
            value: end,
            threshold: 0.0,
            pass: end == 0.0,
            worst_index: None,
        });
    } else {
        checks.push(Check {
            name: "isotopy_ready".into(),
            value: 0.0,
            threshold: 1.0,
            pass: false,
            worst_index: None,
        });
    }

    let distortion = if f.len() >= 2 {
        let rep = distortion_of(&f.source, &images)?;
        checks.push(Check {
            name: "injective_on_samples".into(),
            value: rep.lower,
            threshold: 0.0,
            pass: rep.lower > 0.0,
            worst_index: None,
        });
        Some(rep)
    } else {
        None
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(CertificateReport {
        checks,
        distortion,
        pass,
    })
}
