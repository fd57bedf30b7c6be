//! Run the bounded and unbounded theorem pipelines on catalog instances.

use keypoly::limitfam::{analyze, vb_pipeline, vu_pipeline, Catalog, DriftMode, Family, Outcome};

fn main() -> keypoly::Result<()> {
    for c in [
        Catalog::MonomialTelescope { p: 2 },
        Catalog::Rank2Drift { p: 2, radicand: 17, mode: DriftMode::InH },
        Catalog::ArtinSchreierUnbounded { p: 3 },
    ] {
        let fam = Family::new(c)?;
        let fa = analyze(&fam, &fam.default_candidate().unwrap(), 16)?;
        let r = if fa.vb { vb_pipeline(&fam, &fa)? } else { vu_pipeline(&fam, &fa)? };
        println!("{} [{}]", fam.label(), r.kind);
        for c in &r.checks {
            let o = match &c.outcome {
                Outcome::Pass => "pass",
                Outcome::Fail => "FAIL",
                Outcome::Skipped(_) => "skip",
            };
            println!("  {:<30} {o}", c.name);
        }
    }
    Ok(())
}
