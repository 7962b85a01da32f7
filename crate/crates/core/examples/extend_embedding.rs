//! Extend two sampled embeddings to tame homeomorphisms of the ambient space
//! and certify them on a grid.

use lipembed::verify::{certify_extension, GridSpec, Thresholds};
use lipembed::{extend_embedding, Mode, PointCloud, SampledMap};

fn report(name: &str, f: &SampledMap, k: usize) -> lipembed::Result<()> {
    let res = extend_embedding(f, k, Mode::Semialgebraic, 1)?;
    println!(
        "{name}: {} factors ({} shears), interpolation error {:.1e}",
        res.map.factors().len(),
        res.map.shear_count(),
        res.interpolation_error
    );
    let cert = certify_extension(&res.map, f, GridSpec::default(), Thresholds::default())?;
    for c in &cert.checks {
        println!("  {:<22} {:.2e} (limit {:.1e}) {}", c.name, c.value, c.threshold, if c.pass { "ok" } else { "FAILED" });
    }
    Ok(())
}

fn main() -> lipembed::Result<()> {
    let x = PointCloud::new("triangle", 0, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let y = PointCloud::new("image", 0, vec![vec![5.0, 5.0], vec![6.0, 7.0], vec![-1.0, 2.0]])?;
    report("triangle in the plane", &SampledMap::new(x, y, vec![0, 1, 2])?, 0)?;

    let ts: Vec<f64> = (0..40).map(|i| -1.0 + 2.0 * i as f64 / 39.0).collect();
    let x = PointCloud::new("parabola", 1, ts.iter().map(|&t| vec![t, t * t, 0.0, 0.0]).collect())?;
    let y = PointCloud::new("cubic", 1, ts.iter().map(|&t| vec![0.0, 0.0, t, t * t * t]).collect())?;
    report("curve pair in R^4", &SampledMap::new(x, y, (0..40).collect())?, 1)
}
