//! Hasse derivatives, Q-expansions and p-multiplicity.

use keypoly::field::Field;
use keypoly::parse::parse_poly;
use keypoly::poly::p_divides_binomial;

fn main() -> keypoly::Result<()> {
    let k: Field = "monomial(2)".parse()?;
    let f = parse_poly(k, "x^4 + t*x^2 + x + t^(-1)")?;
    for s in 0..=f.degree() {
        println!("∂_{s} f = {}", f.hasse(s));
    }

    let q = parse_poly(k, "x^2 + t")?;
    let exp = f.q_expansion(&q)?;
    for (i, c) in exp.iter().enumerate() {
        println!("f_{i} = {c}");
    }

    println!("mult_p(x^4 + t) = {:?}", parse_poly(k, "x^4 + t")?.mult_p()?);
    println!("2 | C(12, 4): {}", p_divides_binomial(12, 4, 2)?);
    Ok(())
}
