//! Monomial and augmented valuations, level function and Newton polygon.

use keypoly::field::Field;
use keypoly::ordgroup::{GroupElement, Value};
use keypoly::parse::{parse_elem, parse_poly};
use keypoly::valuation::PolyValuation;

fn main() -> keypoly::Result<()> {
    let k: Field = "padic(2)".parse()?;
    let nu = PolyValuation::monomial(k, parse_elem(&k, "1")?, Value::Fin(GroupElement::from_ints(&[3])));
    let f = parse_poly(k, "x^2 - 17")?;
    println!("ν(F) = {}", nu.eval(&f));
    let lv = nu.level(&f);
    println!("ε(F) = {}, I(F) = {:?}", lv.epsilon, lv.maximizers);

    let q = nu.key();
    println!("S-set of F w.r.t. {q}: {:?}", nu.s_set(&q, &f)?);
    let np = nu.newton_polygon(&q, &f)?;
    print!("{}", np.to_tsv());

    let mu = nu.truncate(&parse_poly(k, "x - 9")?, Value::Fin(GroupElement::from_ints(&[5])))?;
    println!("μ(F) = {} after augmenting", mu.eval(&f));
    Ok(())
}
