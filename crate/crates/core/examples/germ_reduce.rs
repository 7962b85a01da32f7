//! The twisted cubic reaches the plane near the origin, which no global
//! projection can do.

use lipembed::{germ_whitney_reduce, whitney_reduce, PointCloud};

fn main() -> lipembed::Result<()> {
    let pts = (0..201)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / 200.0;
            vec![t, t * t, t * t * t]
        })
        .collect();
    let cubic = PointCloud::new("twisted cubic", 1, pts)?;

    let local = germ_whitney_reduce(&cubic, 2, None, 0)?;
    println!(
        "germ: R^2 within radius {:.3}, {} of {} samples kept, lower distortion {:.4e}",
        local.radius.unwrap_or(f64::NAN),
        local.indices.len(),
        cubic.len(),
        local.composite_lower
    );

    match whitney_reduce(&cubic, 2, 0) {
        Err(e) => println!("global: {e}"),
        Ok(_) => println!("global: unexpectedly succeeded"),
    }
    Ok(())
}
