//! Exact arithmetic in the supported valued fields.

use keypoly::field::Field;
use keypoly::parse::parse_elem;

fn main() -> keypoly::Result<()> {
    let q2: Field = "padic(2)".parse()?;
    let a = parse_elem(&q2, "17/12")?;
    println!("v_2({a}) = {}", q2.valuation(&a));

    let k: Field = "monomial(3)".parse()?;
    let b = parse_elem(&k, "t^(1/2) + 2*t^(-1)")?;
    let c = b.mul(&b).add(&k.t());
    println!("({b})^2 + t = {c}, value {}", k.valuation(&c));
    println!("1/({b}) has value {}", k.valuation(&b.inv()?));

    let r2: Field = "composite2(2)".parse()?;
    println!("v(2) over {r2} = {}", r2.value_of_p());
    Ok(())
}
