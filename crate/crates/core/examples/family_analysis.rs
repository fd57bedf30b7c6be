//! Index sets of the p-adic square-root family.

use keypoly::limitfam::{analyze, Catalog, Family, DEFAULT_HORIZON};

fn main() -> keypoly::Result<()> {
    let fam = Family::new(Catalog::PadicApprox { p: 2, radicand: 17 })?;
    let f = fam.default_candidate().expect("catalog candidate");
    for i in 1..=5 {
        println!("Q_{i} = {}  γ_{i} = {}", fam.key(i)?, fam.gamma(i)?);
    }
    let fa = analyze(&fam, &f, DEFAULT_HORIZON)?;
    println!("mode {}, d = {}, δ = {}", fa.mode.as_str(), fa.defect, fa.delta);
    println!("B = {:?}, B^ct = {:?}, B^unb = {:?}, J = {:?}", fa.sets.b, fa.sets.bct, fa.sets.bunb, fa.sets.j);
    println!("stable from index {}", fa.stable_index);
    Ok(())
}
