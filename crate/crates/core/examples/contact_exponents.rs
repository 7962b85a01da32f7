use lipembed::germs::{contact_matrix, Axis};
use lipembed::{contact_exponent, contact_exponent_numeric, match_halfbranches, GermCurve, PuiseuxBranch};

fn main() -> lipembed::Result<()> {
    let a = PuiseuxBranch::over_x(&[(3, 2, 1.0)])?;
    let b = PuiseuxBranch::over_x(&[(3, 2, 1.0), (7, 4, 1.0)])?;
    let radii: Vec<f64> = (8..=40).map(|j| 2f64.powi(-j)).collect();
    println!(
        "y = x^(3/2) against y = x^(3/2) + x^(7/4): exact {}, numeric {:.4}",
        contact_exponent(&a, &b)?,
        contact_exponent_numeric(&a, &b, &radii)?
    );

    // the same tangent, written over different axes
    let c = PuiseuxBranch::over_x(&[(1, 1, 1.0), (2, 1, 1.0)])?;
    let d = PuiseuxBranch::with_axis(&[(1, 1, 1.0), (2, 1, -1.0), (3, 1, 1.0)], Axis::PosY)?;
    println!("across charts: {}", contact_exponent(&c, &d)?);

    let x = GermCurve::new(vec![a.clone(), b.clone(), PuiseuxBranch::zero(Axis::NegY)])?;
    let y = GermCurve::new(vec![PuiseuxBranch::zero(Axis::NegY), b, a])?;
    for row in contact_matrix(&x)? {
        println!("  {}", row.iter().map(|c| format!("{c:>4}")).collect::<Vec<_>>().join(" "));
    }
    println!("matching: {:?}", match_halfbranches(&x, &y)?);
    Ok(())
}
