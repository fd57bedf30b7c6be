//! Invariant suite over the built-in catalog.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::cuts::{Classification, CutDescriptor, TermRule, ValueSequence};
use crate::error::Result;
use crate::field::{Elem, Field};
use crate::limitfam::{
    analyze, is_p_power, members, verify_minimality, vb_pipeline, vu_pipeline, Catalog, DriftMode, Family, Plant,
};
use crate::ordgroup::{rat, ConvexSubgroup, GroupElement, Value};
use crate::poly::{binom, p_divides_binomial, Poly};
use crate::valuation::PolyValuation;

pub const SEED: u64 = 0x6b65_7970;

/// Random element with small numerator/denominator (and a `t`-power when the field has one).
pub fn random_elem(rng: &mut impl Rng, k: Field) -> Elem {
    let num = rng.random_range(-40i64..=40);
    let den = match k {
        Field::Monomial(p) if p > 1 => 1,
        Field::Padic(p) | Field::Composite2(p) => loop {
            let d = rng.random_range(1i64..=6);
            if d % p as i64 != 0 || rng.random_bool(0.3) {
                break d;
            }
        },
        _ => rng.random_range(1i64..=6),
    };
    let c = k.from_rat(rat(num, den));
    match k {
        Field::Padic(_) => c,
        Field::Monomial(_) => c.mul(&k.t_pow(rat(rng.random_range(-6..=6), rng.random_range(1..=4))).unwrap()),
        Field::Composite2(_) => c.mul(&k.t_pow(rat(rng.random_range(-2..=2), 1)).unwrap()),
    }
}

pub fn random_poly(rng: &mut impl Rng, k: Field, deg: usize, monic: bool) -> Poly {
    let mut c: Vec<Elem> = (0..deg).map(|_| random_elem(rng, k)).collect();
    c.push(if monic { k.one() } else { loop {
        let e = random_elem(rng, k);
        if !e.is_zero() {
            break e;
        }
    } });
    Poly::from_coeffs(k, c)
}

/// Monomial valuation with random centre and value.
pub fn random_valuation(rng: &mut impl Rng, k: Field) -> PolyValuation {
    let g = match k.rank() {
        1 => GroupElement::new(vec![rat(rng.random_range(-8..=8), rng.random_range(1..=3))]),
        _ => GroupElement::from_ints(&[rng.random_range(-1..=1), rng.random_range(-4..=4)]),
    };
    PolyValuation::monomial(k, random_elem(rng, k), Value::Fin(g))
}

#[derive(Default)]
pub struct Suite {
    pub lines: Vec<String>,
    pub violations: usize,
}

impl Suite {
    fn record(&mut self, name: &str, ok: bool, detail: impl AsRef<str>) {
        if ok {
            self.lines.push(format!("ok    {name}"));
        } else {
            self.violations += 1;
            self.lines.push(format!("FAIL  {name}: {}", detail.as_ref()));
        }
    }

    pub fn ok(&self) -> bool {
        self.violations == 0
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            let _ = writeln!(s, "{l}");
        }
        let _ = writeln!(s, "{} violation(s)", self.violations);
        s
    }
}

fn cut_suite(s: &mut Suite) {
    let g = |v: &[i64]| GroupElement::from_ints(v);
    let cases: Vec<(CutDescriptor, bool)> = vec![
        (CutDescriptor::principal_plus(g(&[1])), false),
        (CutDescriptor::principal_minus(g(&[1])), true),
        (CutDescriptor::ball_plus(g(&[0, 0]), ConvexSubgroup::new(1, 2)), false),
        (CutDescriptor::ball_minus(g(&[0, 0]), ConvexSubgroup::new(1, 2)), true),
        (CutDescriptor::ball_plus(g(&[0, 0]), ConvexSubgroup::whole(2)), false),
        (
            CutDescriptor::sequence(
                ValueSequence::new(TermRule::SqrtConvergents { n: 2, rank: 1 }, "sqrt(2) convergents").unwrap(),
            ),
            true,
        ),
    ];
    for (c, vb) in &cases {
        let ball_plus = matches!(c.classify(), Classification::BallPlus { .. });
        s.record(&format!("cut {c}"), c.is_vertically_bounded() == *vb && vb != &ball_plus, "VB label mismatch");
    }
}

fn lucas_suite(s: &mut Suite) {
    let mut ok = true;
    for p in [2u64, 3, 5, 7] {
        for l in 0..=64u64 {
            for k in 0..=l {
                ok &= p_divides_binomial(l, k, p).unwrap() == binom(l, k).is_multiple_of(&BigInt::from(p));
            }
        }
    }
    s.record("lucas criterion vs binomial divisibility (l <= 64)", ok, "mismatch");
}

/// Augmentation `[ν_{x-c, k/n}; (x-c)^n - π u, λ]` with `v(π) = k`, `u` a unit and `λ > k`,
/// together with its key polynomial.
pub fn random_key_pair(rng: &mut impl Rng, k: Field) -> (PolyValuation, Poly) {
    let n = rng.random_range(1..=4u32);
    let e = loop {
        let e = rng.random_range(1..=7i64);
        if e.gcd(&(n as i64)) == 1 {
            break e;
        }
    };
    let pi = match k {
        Field::Padic(p) => k.from_int(p as i64).pow(e as u32),
        _ => k.t_pow(rat(e, 1)).unwrap(),
    };
    let unit = loop {
        let u = rng.random_range(-9i64..=9);
        if u != 0 && (!matches!(k, Field::Padic(p) if u % p as i64 == 0)) {
            break k.from_int(u);
        }
    };
    let c = random_elem(rng, k);
    let nu = PolyValuation::monomial(k, c.clone(), Value::Fin(GroupElement::new(vec![rat(e, n as i64)])));
    let phi = Poly::x_minus(k, &c).pow(n).sub(&Poly::constant(k, pi.mul(&unit)));
    let lambda = rat(e, 1) + rat(rng.random_range(1..=12), rng.random_range(1..=4));
    let mu = PolyValuation::Augmented { base: Box::new(nu), q: phi.clone(), gamma: Value::Fin(GroupElement::new(vec![lambda])) };
    (mu, phi)
}

fn level_suite(s: &mut Suite, rng: &mut ChaCha8Rng, samples: usize) {
    for k in [Field::Padic(2), Field::Padic(3), Field::Monomial(2), Field::Monomial(3), Field::Monomial(0)] {
        let p = k.char_exponent();
        let (mut ok, mut detail) = (true, String::new());
        for _ in 0..samples {
            let nu = random_valuation(rng, k);
            let (df, dg) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let f = random_poly(rng, k, df, true);
            let g = random_poly(rng, k, dg, true);
            let efg = nu.level(&f.mul(&g)).epsilon;
            if efg != nu.level(&f).epsilon.max(nu.level(&g).epsilon) {
                ok = false;
                detail = format!("f = {f}, g = {g}");
            }
        }
        s.record(&format!("level of products over {k}"), ok, detail);

        let (mut ok, mut detail) = (true, String::new());
        for _ in 0..samples {
            let (mu, phi) = random_key_pair(rng, k);
            let lv = mu.level(&phi);
            let lower = random_poly(rng, k, phi.degree() - 1, true);
            let key = phi.degree() == 1 || mu.level(&lower).epsilon < lv.epsilon;
            if !key || !lv.maximizers.iter().all(|&i| is_p_power(i, p)) {
                ok = false;
                detail = format!("{phi}: I = {:?}", lv.maximizers);
            }
        }
        s.record(&format!("maximizers of key polynomials over {k} are p-powers"), ok, detail);
    }
}

/// Built-in instances: `(name, family, candidate)`.
pub fn catalog_instances() -> Result<Vec<(String, Family, Poly)>> {
    let mut out = Vec::new();
    for c in [
        Catalog::PadicApprox { p: 2, radicand: 17 },
        Catalog::PadicApprox { p: 7, radicand: 2 },
        Catalog::MonomialTelescope { p: 2 },
        Catalog::MonomialTelescope { p: 3 },
        Catalog::Rank2Drift { p: 2, radicand: 17, mode: DriftMode::InH },
        Catalog::ArtinSchreierUnbounded { p: 2 },
        Catalog::ArtinSchreierUnbounded { p: 3 },
    ] {
        let fam = Family::new(c)?;
        let f = fam.default_candidate().expect("catalog candidate");
        out.push((fam.label(), fam, f));
    }
    let fam = Family::new(Catalog::MonomialTelescope { p: 3 })?;
    let f = fam.plant(&fam.default_candidate().unwrap(), &Plant { index: 1, power: 2, coeff: fam.field().t() })?;
    out.push(("planted t*Q_1^2 on monomial_telescope(p=3)".into(), fam, f));
    Ok(out)
}

fn family_suite(s: &mut Suite, name: &str, fam: &Family, f: &Poly, horizon: usize, rng: &mut ChaCha8Rng) {
    let fa = match analyze(fam, f, horizon) {
        Ok(fa) => fa,
        Err(e) => return s.record(name, false, e.to_string()),
    };
    let d_big = fa.relative_degree;
    let sets = &fa.sets;
    let all: BTreeSet<usize> = sets.b.union(&sets.j).copied().collect();
    let partition = sets.b.is_disjoint(&sets.j) && all == (0..=d_big).collect();
    s.record(&format!("{name}: B and J partition 0..D"), partition, format!("{sets:?}"));
    let ends = sets.b.contains(&0) && sets.bunb.contains(&0) && sets.bct.contains(&d_big) && sets.bct.contains(&fa.defect);
    s.record(&format!("{name}: 0 in B^unb, d and D in B^ct"), ends && sets.bct.is_disjoint(&sets.bunb), format!("{sets:?}"));
    let p = fam.field().char_exponent();
    s.record(&format!("{name}: d is a power of p"), is_p_power(fa.defect, p), format!("d = {}", fa.defect));
    s.record(&format!("{name}: stability ladder"), fa.ladder.all(), format!("{:?}", fa.ladder));

    // Increasing family on random polynomials; strictly increasing on F.
    let mems = members(fam, fa.horizon).unwrap();
    let mut ok = true;
    for _ in 0..8 {
        let deg = rng.random_range(1..=3);
        let g = random_poly(rng, fam.field(), deg, false);
        let vals: Vec<Value> = mems.iter().map(|m| m.nu.eval(&g)).collect();
        ok &= vals.windows(2).all(|w| w[0] <= w[1]);
    }
    ok &= fa.table.nu_f.windows(2).all(|w| w[0] < w[1]);
    s.record(&format!("{name}: increasing family"), ok, "ν_i(g) decreased");

    let pipe = if fa.vb { vb_pipeline(fam, &fa) } else { vu_pipeline(fam, &fa) };
    match pipe {
        Ok(r) => {
            for c in r.checks.iter().filter(|c| c.outcome == crate::limitfam::Outcome::Fail) {
                s.record(&format!("{name}: {}", c.name), false, &c.detail);
            }
            s.record(&format!("{name}: {} theorem checks", r.kind), r.ok(), "see failures above");
        }
        Err(e) => s.record(&format!("{name}: theorem checks"), false, e.to_string()),
    }
    match verify_minimality(fam, &fa) {
        Ok(m) => s.record(&format!("{name}: minimality"), m.ok(), format!("{m:?}")),
        Err(e) => s.record(&format!("{name}: minimality"), false, e.to_string()),
    }
}

/// Runs the suite; `extra` holds additional configuration texts to check.
pub fn run(horizon: usize, extra: &[(String, String)]) -> Suite {
    let mut s = Suite::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    cut_suite(&mut s);
    lucas_suite(&mut s);
    level_suite(&mut s, &mut rng, 100);
    match catalog_instances() {
        Ok(inst) => {
            for (name, fam, f) in inst {
                family_suite(&mut s, &name, &fam, &f, horizon, &mut rng);
            }
        }
        Err(e) => s.record("catalog construction", false, e.to_string()),
    }
    for (name, text) in extra {
        match Config::from_toml(text) {
            Ok(cfg) => family_suite(&mut s, name, &cfg.family, &cfg.f, cfg.horizon, &mut rng),
            Err(e) => s.record(name, false, e.to_string()),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pristine_suite_passes() {
        let s = run(12, &[]);
        assert!(s.ok(), "{}", s.text());
    }

    #[test]
    fn corrupted_fixture_fails() {
        let bad = "F = \"x^2 - 17\"\n[family]\nkind = \"explicit_list\"\nfield = \"padic(2)\"\n\
                   entries = [{ q = \"x - 1\", gamma = \"(3)\" }, { q = \"x - 9\", gamma = \"(2)\" }]\n";
        let s = run(4, &[("corrupted".into(), bad.into())]);
        assert!(!s.ok());
    }
}
