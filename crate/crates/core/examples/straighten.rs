//! Straighten a Puiseux graph onto the positive axis, then move one stack of
//! graphs onto another with the same contacts.

use lipembed::{stack_graphs, straighten_graph, PuiseuxBranch};

fn main() -> lipembed::Result<()> {
    // y = x^(3/2)(1 + 2x) goes to y = x^(3/2)
    let f = PuiseuxBranch::over_x(&[(3, 2, 1.0), (5, 2, 2.0)])?;
    let m = straighten_graph(&f)?;
    println!("valid up to radius {:.4}", m.validity_radius());
    for x in [0.01f64, 0.05, 0.1] {
        let p = f.point_at(x);
        let q = m.eval(p);
        println!("  {p:?} -> {q:?}, x^(3/2) = {:.6e}", q[0].powf(1.5));
    }

    let xs = [
        PuiseuxBranch::over_x(&[(3, 2, 0.2)])?,
        PuiseuxBranch::over_x(&[(3, 2, 0.1), (2, 1, 0.1)])?,
    ];
    let ys = [
        PuiseuxBranch::over_x(&[(3, 2, 0.3)])?,
        PuiseuxBranch::over_x(&[(3, 2, 0.1)])?,
    ];
    let s = stack_graphs(&xs, &ys)?;
    let x = 0.02f64;
    for (b, c) in xs.iter().zip(&ys) {
        let p = b.point_at(x);
        println!("  {p:?} -> {:?}, target curve at {:?}", s.eval(p), c.point_at(s.eval(p)[0]));
    }
    Ok(())
}
