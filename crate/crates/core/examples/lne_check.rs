//! Inner against outer distance: a segment is normally embedded, a circle
//! has ratio π/2, and a cusp has no bound at all as the sampling refines.

use lipembed::{hausdorff, lne_ratio, PointCloud};

fn circle(m: usize) -> lipembed::Result<PointCloud> {
    let pts = (0..m)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / m as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    PointCloud::new("circle", 1, pts)
}

fn main() -> lipembed::Result<()> {
    let segment = PointCloud::new("segment", 1, (0..50).map(|i| vec![i as f64 * 0.1, 0.0]).collect())?;
    println!("segment: {:.9}", lne_ratio(&segment, 0.15)?);
    println!("circle:  {:.5} (pi/2 = {:.5})", lne_ratio(&circle(360)?, 0.1)?, std::f64::consts::FRAC_PI_2);

    for m in [20, 40, 80] {
        let pts = (0..=m)
            .map(|i| {
                let t = -0.5 + i as f64 / m as f64;
                vec![t * t, t * t * t]
            })
            .collect();
        let cusp = PointCloud::new("cusp", 1, pts)?;
        println!("cusp with {} samples: {:.2}", m + 1, lne_ratio(&cusp, 2.0 / m as f64)?);
    }

    println!("hausdorff(circle_36, circle_360) = {:.4}", hausdorff(&circle(36)?, &circle(360)?)?);
    Ok(())
}
