//! Plant a term above the cut and strip it again.

use keypoly::limitfam::{analyze, minimal_lkp, verify_minimality, Catalog, Family, Plant};

fn main() -> keypoly::Result<()> {
    let fam = Family::new(Catalog::MonomialTelescope { p: 3 })?;
    let base = fam.default_candidate().unwrap();
    let g = fam.plant(&base, &Plant { index: 1, power: 2, coeff: fam.field().t() })?;
    let fa = analyze(&fam, &g, 16)?;
    println!("G = {g}");
    println!("J = {:?}", fa.sets.j);
    println!("minimal = {}", minimal_lkp(&fam, &fa, fa.stable_index)?);
    let m = verify_minimality(&fam, &fa)?;
    for n in &m.necessity {
        println!("l = {}: cofinal {}, whole tail {}", n.ell, n.cofinal, n.for_all_tail);
    }
    println!("dropping J keeps instability: {:?}", m.j_drops_unstable);
    Ok(())
}
