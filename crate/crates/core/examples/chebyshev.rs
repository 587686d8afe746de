//! Chebyshev toolkit: explicit polynomials, quadrature, differentiation and
//! the product/composition identities.

use spectral_kit::orthopoly::{
    cheb_compose_check, cheb_diff, cheb_inner, cheb_polys, cheb_product, ChebSeries, DensePoly,
};

fn main() -> spectral_kit::Result<()> {
    for (k, p) in cheb_polys(5).iter().enumerate() {
        println!("T{k} coefficients (highest first): {:?}", p.coeffs());
    }

    println!("<T3,T3> = {:.15} (pi/2)", cheb_inner(3, 3, 16)?);
    println!("<T0,T0> = {:.15} (pi)", cheb_inner(0, 0, 16)?);
    println!("<T2,T5> = {:.1e}", cheb_inner(2, 5, 16)?);

    // d/dx of x^5 - 2x^2 + 1 in coefficient space
    let p = DensePoly::new(vec![1.0, 0.0, 0.0, -2.0, 0.0, 1.0]);
    let dp = cheb_diff(&ChebSeries::from_dense(&p)).to_dense();
    println!("derivative (highest first): {:?}", dp.coeffs());

    println!("T2 T5 = {:?}", cheb_product(2, 5)?);
    println!("max |T3(T4(x)) - T12(x)| = {:.1e}", cheb_compose_check(3, 4, 1001));
    Ok(())
}
