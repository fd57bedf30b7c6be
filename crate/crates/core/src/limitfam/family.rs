//! Catalog of increasing families of degree-`m` key polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::cuts::{CutDescriptor, TermRule, ValueSequence};
use crate::error::{param, Result};
use crate::field::{Elem, Field};
use crate::ordgroup::{int, rat, ConvexSubgroup, GroupElement, Rat, Value};
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::valuation::PolyValuation;

/// Number of members precomputed for digit-driven families.
pub const CAPACITY: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriftMode {
    InH,
    AboveH,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Catalog {
    /// `x - a_i` with `a_i` the truncations of a `p`-adic square root of `radicand`
    /// at its successive nonzero digits.
    PadicApprox { p: u64, radicand: i64 },
    /// `a_i = Σ_{j=1..i} t^(-1/p^j)` over `monomial(p)`.
    MonomialTelescope { p: u64 },
    /// The square-root approximations over `composite2(p)`, values in `{0} x Q`.
    Rank2Drift { p: u64, radicand: i64, mode: DriftMode },
    /// `a_i = Σ_{j<i} t^(p^j)` over `monomial(p)`, `γ_i = p^i`.
    ArtinSchreierUnbounded { p: u64 },
    /// Finite list of key polynomials with values; entries of degree above one
    /// augment `Monomial(0, base_gamma)`.
    ExplicitList { field: Field, entries: Vec<(Poly, GroupElement)>, base_gamma: Option<GroupElement> },
}

/// Extra term `coeff * Q_index^power` added to the candidate polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plant {
    pub index: usize,
    pub power: usize,
    pub coeff: Elem,
}

#[derive(Clone, Debug)]
pub struct Member {
    pub index: usize,
    pub q: Poly,
    pub center: Option<Elem>,
    pub gamma: GroupElement,
    pub nu: PolyValuation,
}

/// Where `v(p)` sits relative to the invariance group `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PPosition {
    InH,
    AboveH,
}

#[derive(Clone, Debug)]
pub struct Family {
    field: Field,
    catalog: Catalog,
    degree: usize,
    /// Root modulo `p^N` and positions of its nonzero digits (digit families).
    root: Option<(BigInt, Vec<usize>)>,
}

fn sqrt_mod_prime_power(n: i64, p: u64, digits: usize) -> Result<BigInt> {
    let bp = BigInt::from(p);
    let nn = BigInt::from(n);
    let modulus = num_traits::pow(bp.clone(), digits);
    if p == 2 {
        if nn.mod_floor(&BigInt::from(8)) != BigInt::one() {
            return Err(param("radicand", format!("{n} is not a square in Q_2 (need n = 1 mod 8)")));
        }
        let mut r = BigInt::one();
        for k in 3..digits + 1 {
            let m = BigInt::one() << (k + 1);
            if (&r * &r - &nn).mod_floor(&m) != BigInt::zero() {
                r += BigInt::one() << (k - 1);
            }
        }
        return Ok(r.mod_floor(&modulus));
    }
    let np = nn.mod_floor(&bp).to_u64().unwrap();
    if np == 0 {
        return Err(param("radicand", format!("{n} must be prime to {p}")));
    }
    let r0 = (1..p).find(|r| r * r % p == np).ok_or_else(|| {
        param("radicand", format!("{n} is not a square modulo {p}"))
    })?;
    let mut r = BigInt::from(r0);
    let mut prec = 1usize;
    while prec < digits {
        prec = (2 * prec).min(digits);
        let m = num_traits::pow(bp.clone(), prec);
        let two_r = (BigInt::from(2) * &r).mod_floor(&m);
        let inv = two_r.extended_gcd(&m).x.mod_floor(&m);
        r = (&r - (&r * &r - &nn) * inv).mod_floor(&m);
    }
    Ok(r.mod_floor(&modulus))
}

fn nonzero_digits(r: &BigInt, p: u64) -> Vec<usize> {
    let bp = BigInt::from(p);
    let mut out = Vec::new();
    let mut x = r.clone();
    let mut pos = 0;
    while !x.is_zero() {
        let (q, d) = x.div_mod_floor(&bp);
        if !d.is_zero() {
            out.push(pos);
        }
        x = q;
        pos += 1;
    }
    out
}

fn digit_root(p: u64, radicand: i64) -> Result<(BigInt, Vec<usize>)> {
    let mut digits = 64;
    loop {
        let r = sqrt_mod_prime_power(radicand, p, digits)?;
        let pos = nonzero_digits(&r, p);
        if pos.len() > CAPACITY + 2 {
            return Ok((r, pos));
        }
        digits *= 2;
    }
}

impl Family {
    pub fn new(catalog: Catalog) -> Result<Self> {
        let (field, degree, root) = match &catalog {
            Catalog::PadicApprox { p, radicand } => (Field::padic(*p)?, 1, Some(digit_root(*p, *radicand)?)),
            Catalog::Rank2Drift { p, radicand, mode } => {
                if *mode == DriftMode::AboveH {
                    return Err(param(
                        "mode",
                        "vAboveH is not realizable over composite2: v(p) = (0,1) lies in every \
                         nonzero convex subgroup, and a degree-one family needs an integral value \
                         group; use artin_schreier_unbounded for the v(p) > H case",
                    ));
                }
                (Field::composite2(*p)?, 1, Some(digit_root(*p, *radicand)?))
            }
            Catalog::MonomialTelescope { p } | Catalog::ArtinSchreierUnbounded { p } => {
                if *p == 0 {
                    return Err(param("p", "must be a prime"));
                }
                (Field::monomial(*p)?, 1, None)
            }
            Catalog::ExplicitList { field, entries, base_gamma } => {
                let Some((q0, _)) = entries.first() else {
                    return Err(param("entries", "explicit list is empty"));
                };
                let m = q0.degree();
                for (i, (q, g)) in entries.iter().enumerate() {
                    if !q.is_monic() || q.degree() != m || m == 0 {
                        return Err(param(&format!("entries[{i}].q"), format!("must be monic of degree {m}")));
                    }
                    if g.rank() != field.rank() {
                        return Err(param(&format!("entries[{i}].gamma"), "value of the wrong rank"));
                    }
                }
                if m > 1 && base_gamma.is_none() {
                    return Err(param("base_gamma", "required for entries of degree above one"));
                }
                (*field, m, None)
            }
        };
        let fam = Family { field, catalog, degree, root };
        fam.check_increasing()?;
        Ok(fam)
    }

    fn check_increasing(&self) -> Result<()> {
        let n = self.len().unwrap_or(CAPACITY).min(64);
        let mut prev: Option<GroupElement> = None;
        for i in 1..=n {
            let g = self.gamma(i)?;
            if let Some(p) = &prev {
                if g <= *p {
                    let key = match self.catalog {
                        Catalog::ExplicitList { .. } => format!("entries[{}].gamma", i - 1),
                        _ => "gamma".into(),
                    };
                    return Err(param(&key, format!("not above the previous value: {p} then {g}")));
                }
            }
            prev = Some(g);
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.field.rank()
    }

    /// Number of members for finite families.
    pub fn len(&self) -> Option<usize> {
        match &self.catalog {
            Catalog::ExplicitList { entries, .. } => Some(entries.len()),
            _ => None,
        }
    }

    pub fn max_index(&self) -> usize {
        self.len().unwrap_or(CAPACITY)
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    pub fn is_exact_catalog(&self) -> bool {
        !self.is_finite() && self.degree == 1
    }

    pub fn label(&self) -> String {
        match &self.catalog {
            Catalog::PadicApprox { p, radicand } => format!("padic_approx(sqrt({radicand}), p={p})"),
            Catalog::MonomialTelescope { p } => format!("monomial_telescope(p={p})"),
            Catalog::Rank2Drift { p, radicand, .. } => format!("rank2_drift(sqrt({radicand}), p={p}, vInH)"),
            Catalog::ArtinSchreierUnbounded { p } => format!("artin_schreier_unbounded(p={p})"),
            Catalog::ExplicitList { entries, .. } => format!("explicit_list(len={})", entries.len()),
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.max_index() {
            return Err(param("index", format!("member index {i} outside 1..={}", self.max_index())));
        }
        Ok(())
    }

    fn digit_positions(&self) -> &[usize] {
        &self.root.as_ref().expect("digit family").1
    }

    fn p(&self) -> u64 {
        match &self.catalog {
            Catalog::PadicApprox { p, .. }
            | Catalog::MonomialTelescope { p }
            | Catalog::Rank2Drift { p, .. }
            | Catalog::ArtinSchreierUnbounded { p } => *p,
            Catalog::ExplicitList { field, .. } => field.char_exponent(),
        }
    }

    pub fn gamma(&self, i: usize) -> Result<GroupElement> {
        self.check_index(i)?;
        let p = self.p() as i64;
        Ok(match &self.catalog {
            Catalog::PadicApprox { .. } => GroupElement::from_ints(&[self.digit_positions()[i] as i64]),
            Catalog::Rank2Drift { .. } => GroupElement::from_ints(&[0, self.digit_positions()[i] as i64]),
            Catalog::MonomialTelescope { .. } => {
                GroupElement::new(vec![-Rat::new(BigInt::one(), num_traits::pow(BigInt::from(p), i + 1))])
            }
            Catalog::ArtinSchreierUnbounded { .. } => {
                GroupElement::new(vec![Rat::from_integer(num_traits::pow(BigInt::from(p), i))])
            }
            Catalog::ExplicitList { entries, .. } => entries[i - 1].1.clone(),
        })
    }

    /// The centre `a_i` of a degree-one member.
    pub fn center(&self, i: usize) -> Result<Option<Elem>> {
        self.check_index(i)?;
        let f = self.field;
        let p = self.p();
        Ok(match &self.catalog {
            Catalog::PadicApprox { .. } | Catalog::Rank2Drift { .. } => {
                let (r, pos) = self.root.as_ref().unwrap();
                let m = num_traits::pow(BigInt::from(p), pos[i - 1] + 1);
                Some(f.from_bigint(r.mod_floor(&m)))
            }
            Catalog::MonomialTelescope { .. } => {
                let mut a = f.zero();
                for j in 1..=i {
                    let e = -Rat::new(BigInt::one(), num_traits::pow(BigInt::from(p), j));
                    a = a.add(&f.t_pow(e)?);
                }
                Some(a)
            }
            Catalog::ArtinSchreierUnbounded { .. } => {
                let mut a = f.zero();
                for j in 0..i {
                    a = a.add(&f.t_pow(Rat::from_integer(num_traits::pow(BigInt::from(p), j)))?);
                }
                Some(a)
            }
            Catalog::ExplicitList { entries, .. } => {
                let q = &entries[i - 1].0;
                (q.degree() == 1).then(|| q.coeff(0).neg())
            }
        })
    }

    pub fn key(&self, i: usize) -> Result<Poly> {
        match &self.catalog {
            Catalog::ExplicitList { entries, .. } => {
                self.check_index(i)?;
                Ok(entries[i - 1].0.clone())
            }
            _ => Ok(Poly::x_minus(self.field, &self.center(i)?.unwrap())),
        }
    }

    pub fn valuation(&self, i: usize) -> Result<PolyValuation> {
        let g = self.gamma(i)?;
        match (&self.catalog, self.center(i)?) {
            (Catalog::ExplicitList { base_gamma: Some(b), .. }, _) if self.degree > 1 => {
                let base = PolyValuation::monomial(self.field, self.field.zero(), Value::Fin(b.clone()));
                base.truncate(&self.key(i)?, Value::Fin(g))
            }
            (_, Some(a)) => Ok(PolyValuation::monomial(self.field, a, Value::Fin(g))),
            _ => Err(param("entries", "missing base valuation")),
        }
    }

    pub fn member(&self, i: usize) -> Result<Member> {
        Ok(Member {
            index: i,
            q: self.key(i)?,
            center: self.center(i)?,
            gamma: self.gamma(i)?,
            nu: self.valuation(i)?,
        })
    }

    /// The catalog's limit key polynomial candidate.
    pub fn default_candidate(&self) -> Option<Poly> {
        let f = self.field;
        let s = match &self.catalog {
            Catalog::PadicApprox { radicand, .. } | Catalog::Rank2Drift { radicand, .. } => {
                format!("x^2 - ({radicand})")
            }
            Catalog::MonomialTelescope { p } => format!("x^{p} - x - t^(-1)"),
            Catalog::ArtinSchreierUnbounded { p } => format!("x^{p} - x + t"),
            Catalog::ExplicitList { .. } => return None,
        };
        Some(parse_poly(f, &s).expect("catalog literal"))
    }

    /// Cut generated by the values `γ_i`, from closed-form catalog data.
    pub fn gamma_cut(&self) -> CutDescriptor {
        let r = self.rank();
        match &self.catalog {
            Catalog::PadicApprox { .. } | Catalog::ArtinSchreierUnbounded { .. } => {
                CutDescriptor::ball_plus(GroupElement::zero(r), ConvexSubgroup::whole(r))
            }
            Catalog::Rank2Drift { .. } => CutDescriptor::ball_plus(GroupElement::zero(r), ConvexSubgroup::new(1, r)),
            Catalog::MonomialTelescope { p } => {
                let rule = TermRule::Geometric {
                    limit: GroupElement::zero(1),
                    unit: GroupElement::from_ints(&[1]),
                    c: rat(1, *p as i64),
                    q: int(*p as i64),
                };
                CutDescriptor::sequence(ValueSequence::new(rule, format!("-1/{p}^(i+1)")).expect("valid rule"))
            }
            Catalog::ExplicitList { entries, .. } => {
                CutDescriptor::principal_plus(entries.last().expect("nonempty").1.clone())
            }
        }
    }

    pub fn invariance_group(&self) -> ConvexSubgroup {
        self.gamma_cut().invariance_group()
    }

    pub fn is_vb(&self) -> bool {
        self.gamma_cut().is_vertically_bounded()
    }

    pub fn p_position(&self) -> PPosition {
        let h = self.invariance_group();
        match self.field.value_of_p() {
            Value::Fin(g) if h.contains(&g) => PPosition::InH,
            _ => PPosition::AboveH,
        }
    }

    /// `F + coeff * Q_index^power`.
    pub fn plant(&self, f: &Poly, plant: &Plant) -> Result<Poly> {
        if plant.power == 0 || plant.power * self.degree >= f.degree() {
            return Err(param("plant.power", "must be positive and keep deg F unchanged"));
        }
        let q = self.key(plant.index)?;
        Ok(f.add(&q.pow(plant.power as u32).scale(&plant.coeff)))
    }
}

/// `ord_p(n)` for `n > 0`.
pub fn ord_p(n: usize, p: u64) -> u32 {
    if p <= 1 {
        return 0;
    }
    let mut n = n;
    let mut r = 0;
    while n > 0 && n.is_multiple_of(p as usize) {
        n /= p as usize;
        r += 1;
    }
    r
}

pub fn is_p_power(n: usize, p: u64) -> bool {
    if n == 0 {
        return false;
    }
    if p <= 1 {
        return n == 1;
    }
    let mut n = n;
    while n.is_multiple_of(p as usize) {
        n /= p as usize;
    }
    n == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt17_digits() {
        let fam = Family::new(Catalog::PadicApprox { p: 2, radicand: 17 }).unwrap();
        let (r, pos) = fam.root.clone().unwrap();
        assert_eq!(&pos[..8], &[0, 3, 5, 6, 7, 9, 10, 13]);
        let m = BigInt::one() << 200;
        assert_eq!((&r * &r - BigInt::from(17)).mod_floor(&m), BigInt::zero());
        let g: Vec<_> = (1..=5).map(|i| fam.gamma(i).unwrap()).collect();
        assert_eq!(g, [3, 5, 6, 7, 9].map(|n| GroupElement::from_ints(&[n])));
        assert_eq!(fam.center(2).unwrap().unwrap(), Field::Padic(2).from_int(9));
    }

    #[test]
    fn odd_prime_roots() {
        let r = sqrt_mod_prime_power(2, 7, 30).unwrap();
        let m = num_traits::pow(BigInt::from(7), 30);
        assert_eq!((&r * &r - BigInt::from(2)).mod_floor(&m), BigInt::zero());
        assert!(sqrt_mod_prime_power(3, 7, 5).is_err());
        assert!(sqrt_mod_prime_power(5, 2, 5).is_err());
    }

    #[test]
    fn telescope_values() {
        let fam = Family::new(Catalog::MonomialTelescope { p: 2 }).unwrap();
        assert_eq!(fam.gamma(1).unwrap(), "(-1/4)".parse().unwrap());
        let k = fam.field();
        let a2 = fam.center(2).unwrap().unwrap();
        let a3 = fam.center(3).unwrap().unwrap();
        assert_eq!(k.valuation(&a3.sub(&a2)), Value::Fin(fam.gamma(2).unwrap()));
        assert!(fam.is_vb());
    }

    #[test]
    fn vabove_h_rejected() {
        let e = Family::new(Catalog::Rank2Drift { p: 2, radicand: 17, mode: DriftMode::AboveH }).unwrap_err();
        assert!(e.to_string().contains("mode"));
    }

    #[test]
    fn explicit_list_monotonicity() {
        let k = Field::Padic(2);
        let entries = vec![
            (Poly::x(k), GroupElement::from_ints(&[2])),
            (Poly::x(k), GroupElement::from_ints(&[1])),
        ];
        assert!(Family::new(Catalog::ExplicitList { field: k, entries, base_gamma: None }).is_err());
    }

    #[test]
    fn p_powers() {
        assert!(is_p_power(4, 2) && is_p_power(1, 3) && !is_p_power(6, 2));
        assert_eq!(ord_p(12, 2), 2);
    }
}
