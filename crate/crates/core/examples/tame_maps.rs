//! Shears, determinant-one matrices, their transvection factorization and
//! the straight-line isotopy.

use lipembed::linalg::max_entry_diff;
use lipembed::tame::{transvection_product, Offset};
use lipembed::{isotopy_eval, sl_decompose, PointCloud, SampledLipschitzFunction, ShearMap, TameMap, UnimodularMap};

fn main() -> lipembed::Result<()> {
    let u = UnimodularMap::new(vec![vec![2.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 3.0, 1.0]])?;
    let ts = sl_decompose(&u)?;
    let err = max_entry_diff(&transvection_product(3, &ts), u.matrix());
    println!("{} transvections, product error {err:.1e}", ts.len());

    // x_2 += g(x_0, x_1) with g sampled at two points
    let g = SampledLipschitzFunction::new(
        PointCloud::new("g", 0, vec![vec![0.0, 0.0], vec![1.0, 1.0]])?,
        vec![0.0, 2.0],
    )?;
    let shear = ShearMap::new(2, vec![0, 1], Offset::Sampled(g), 1)?;
    let f = TameMap::from_linear(u).then(TameMap::from_shears(3, vec![shear])?)?;

    let p = [0.5, -0.25, 1.0];
    let q = f.eval(&p)?;
    println!("F{p:?} = {q:?}, back to {:?}", f.invert(&q)?);
    for t in [0.0, 0.5, 1.0] {
        println!("F_{t}{p:?} = {:?}", isotopy_eval(&f.decomposed()?, t, &p)?);
    }
    Ok(())
}
