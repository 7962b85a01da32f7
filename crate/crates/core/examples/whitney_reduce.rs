//! Reduce a sampled curve in R^6 to R^3 one direction at a time.

use lipembed::{distortion, whitney_reduce, PointCloud, SampledMap};

fn main() -> lipembed::Result<()> {
    let pts = (0..200)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / 199.0;
            (1..=6).map(|p| t.powi(p)).collect()
        })
        .collect();
    let curve = PointCloud::new("moment curve", 1, pts)?;
    let res = whitney_reduce(&curve, 3, 0)?;
    for (i, step) in res.steps.iter().enumerate() {
        println!("step {i}: R^{} with epsilon {:.4e}", step.resulting_dim, step.epsilon);
    }
    println!(
        "composite distortion [{:.4e}, {:.6}], product of epsilons {:.4e}",
        res.composite_lower,
        res.composite_upper,
        res.epsilon_product()
    );

    // the same numbers straight from the oracle
    let map = SampledMap::from_images(curve, res.final_cloud.to_vecs())?;
    let rep = distortion(&map)?;
    println!("oracle: lower {:.4e} at pair {:?}", rep.lower, rep.witness_lower);
    Ok(())
}
