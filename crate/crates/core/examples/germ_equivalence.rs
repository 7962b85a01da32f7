//! Two plane curve germs whose middle branches trade places. Their contacts
//! agree, so an ambient germ of homeomorphism carries one to the other.

use lipembed::germs::{polar_round_trip, sphere_hausdorff, Axis};
use lipembed::{ambient_curve_equivalence, GermCurve, PuiseuxBranch};

fn main() -> lipembed::Result<()> {
    let zero = PuiseuxBranch::zero(Axis::PosX);
    let left = PuiseuxBranch::zero(Axis::NegX);
    let x = GermCurve::new(vec![
        zero.clone(),
        PuiseuxBranch::over_x(&[(3, 2, 0.05)])?,
        PuiseuxBranch::over_x(&[(3, 2, 0.1), (2, 1, 0.05)])?,
        left.clone(),
    ])?;
    let y = GermCurve::new(vec![
        zero,
        PuiseuxBranch::over_x(&[(3, 2, 0.05), (2, 1, 0.05)])?,
        PuiseuxBranch::over_x(&[(3, 2, 0.1)])?,
        left,
    ])?;

    let f = ambient_curve_equivalence(&x, &y)?;
    println!("{} cone(s), valid up to radius {:.4}", f.cones().len(), f.validity_radius());
    for j in 4..=12 {
        let r = 2f64.powi(-j);
        println!("  r = 2^-{j:<2} Hausdorff/r = {:.3e}", sphere_hausdorff(&f, &x, &y, r)? / r);
    }
    let radii: Vec<f64> = (4..=12).map(|j| 2f64.powi(-j)).collect();
    println!("round trip error {:.1e}", polar_round_trip(&f, &radii, 360));

    let mismatched = GermCurve::new(vec![PuiseuxBranch::over_x(&[(2, 1, 1.0)])?, PuiseuxBranch::over_x(&[(2, 1, 2.0)])?])?;
    if let Err(e) = ambient_curve_equivalence(&x, &mismatched) {
        println!("{e}");
    }
    Ok(())
}
