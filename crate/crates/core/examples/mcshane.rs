use lipembed::{lipschitz_constant, mcshane_extend, PointCloud, SampledLipschitzFunction};

fn main() -> lipembed::Result<()> {
    let domain = PointCloud::new("corners", 0, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let values = vec![0.0, 1.0, -3.0];
    let l = lipschitz_constant(&domain, &values)?;
    let f = SampledLipschitzFunction::new(domain, values)?;
    println!("Lipschitz constant {l}");
    for q in [[0.0, 0.0], [0.5, 0.5], [2.0, -1.0], [-1.0, 3.0]] {
        println!(
            "{q:?}: extension {:+.4}  (envelopes {:+.4} .. {:+.4})",
            mcshane_extend(&f, &q)?,
            f.lower_envelope(&q),
            f.upper_envelope(&q)
        );
    }
    Ok(())
}
