//! Hilbert distances on the orthant and on a simplicial cone.

use randeig::cones::ConeSpec;
use randeig::hilbert::{orthant_distance_closed_form, MetricContext};
use randeig::{DMatrix, DVector};

pub fn run() -> randeig::Result<()> {
    let orthant = MetricContext::with_default_functional(ConeSpec::orthant(3)?);
    let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
    let y = DVector::from_vec(vec![2.0, 2.0, 1.0]);
    println!("M(x/y) = {:.4}", orthant.upper_ratio(&x, &y)?);
    println!("m(x/y) = {:.4}", orthant.lower_ratio(&x, &y)?);
    println!("d(x, y) = {:.6}", orthant.distance(&x, &y)?);
    println!("closed form = {:.6}", orthant_distance_closed_form(&x, &y)?);
    println!("d(x, 5x) = {}", orthant.distance(&x, &(&x * 5.0))?);

    let boundary = DVector::from_vec(vec![0.0, 1.0, 1.0]);
    println!("d(x, boundary) = {}", orthant.distance(&x, &boundary)?);

    let g = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.0, 1.0, 0.2, 0.2, 0.0, 1.0]);
    let cone = ConeSpec::simplicial(g.clone())?;
    let ctx = MetricContext::with_default_functional(cone);
    println!(
        "simplicial d(Gx, Gy) = {:.6}",
        ctx.distance(&(&g * &x), &(&g * &y))?
    );

    let m_hat = orthant.norm_comparison_estimate(4096, 7)?;
    println!("norm comparison constant on the simplex ~ {m_hat:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
