//! Germ version of the extension: the map only has to be right near the
//! origin, which lowers the dimension requirement.

use lipembed::{extend_embedding_local, PointCloud, SampledMap};

fn main() -> lipembed::Result<()> {
    let ts: Vec<f64> = (0..61).map(|i| -0.3 + 0.6 * i as f64 / 60.0).collect();
    let x = PointCloud::new("cusp", 1, ts.iter().map(|&t| vec![t * t, t * t * t, 0.0]).collect())?;
    let images = ts.iter().map(|&t| vec![t * t, 0.0, t * t * t]).collect();
    let f = SampledMap::from_images(x, images)?;

    let res = extend_embedding_local(&f, 1, None, 0)?;
    println!(
        "working radius {:.4}, {} samples inside, interpolation error {:.1e}",
        res.radius.unwrap_or(f64::NAN),
        res.indices.len(),
        res.interpolation_error
    );
    Ok(())
}
