//! Cuts in `Q^r` given by finite descriptors.
//!
//! A cut is either a ball cut `(a+H)^+` / `(a+H)^-` (principal cuts are the
//! case `H = {0}`) or the lower closure of a strictly increasing sequence
//! whose limit behaviour is known in closed form.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ordgroup::{int, rat, ConvexSubgroup, GroupElement, Rat};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    L,
    R,
}

/// Closed-form limit behaviour of a sequence `γ_1 < γ_2 < ...`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Limit {
    /// Eventually in the coset `base + H_k` and cofinal in it: lower set `(base+H_k)^+`.
    Unbounded { base: GroupElement, k: usize },
    /// Approaches `xi` from below within `xi - H_{k-1}`, `k >= 1`: lower set `(xi+H_k)^-`.
    Below { xi: GroupElement, k: usize },
    /// Supremum of the first coordinate is `c + s*sqrt(n)`, `s > 0`, `n` not a square.
    Irrational { c: Rat, s: Rat, n: BigInt, rank: usize },
}

impl Limit {
    fn rank(&self) -> usize {
        match self {
            Limit::Unbounded { base, .. } => base.rank(),
            Limit::Below { xi, .. } => xi.rank(),
            Limit::Irrational { rank, .. } => *rank,
        }
    }

    fn affine(&self, n: i64, a: &GroupElement) -> Limit {
        match self {
            Limit::Unbounded { base, k } => Limit::Unbounded { base: a + &base.scale_int(n), k: *k },
            Limit::Below { xi, k } => Limit::Below { xi: a + &xi.scale_int(n), k: *k },
            Limit::Irrational { c, s, n: rad, rank } => Limit::Irrational {
                c: &a.coords()[0] + c * int(n),
                s: s * int(n),
                n: rad.clone(),
                rank: *rank,
            },
        }
    }
}

/// Rule producing the terms `γ_i`, `i >= 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TermRule {
    /// `base + i*step`, `step > 0`.
    Arithmetic { base: GroupElement, step: GroupElement },
    /// `limit - (c / q^i) * unit`, `unit > 0`, `c > 0`, `q > 1`.
    Geometric { limit: GroupElement, unit: GroupElement, c: Rat, q: Rat },
    /// `limit - (c / i) * unit`.
    Harmonic { limit: GroupElement, unit: GroupElement, c: Rat },
    /// Even continued-fraction convergents of `sqrt(n)` in the first coordinate.
    SqrtConvergents { n: u64, rank: usize },
    /// Explicit terms; index `i` reads entry `i-1`, the last entry repeats.
    Listed(Vec<GroupElement>),
    /// `shift + n * inner`.
    Affine { inner: Box<TermRule>, n: i64, shift: GroupElement },
}

impl TermRule {
    pub fn term(&self, i: usize) -> GroupElement {
        assert!(i >= 1, "sequence terms start at index 1");
        match self {
            TermRule::Arithmetic { base, step } => base + &step.scale_int(i as i64),
            TermRule::Geometric { limit, unit, c, q } => {
                let f = c / num_traits::pow(q.clone(), i);
                limit - &unit.scale(&f)
            }
            TermRule::Harmonic { limit, unit, c } => limit - &unit.scale(&(c / int(i as i64))),
            TermRule::SqrtConvergents { n, rank } => {
                GroupElement::unit(*rank, 1, sqrt_convergent(*n, 2 * (i - 1)))
            }
            TermRule::Listed(v) => v[(i - 1).min(v.len() - 1)].clone(),
            TermRule::Affine { inner, n, shift } => shift + &inner.term(i).scale_int(*n),
        }
    }
}

/// `k`-th continued-fraction convergent of `sqrt(n)`.
pub fn sqrt_convergent(n: u64, k: usize) -> Rat {
    let a0 = n.sqrt();
    assert!(a0 * a0 != n, "sqrt({n}) is rational");
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::from(a0), BigInt::one());
    for _ in 0..k {
        m = d * a - m;
        d = (n - m * m) / d;
        a = (a0 + m) / d;
        let p2 = BigInt::from(a) * &p1 + &p0;
        let q2 = BigInt::from(a) * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    Rat::new(p1, q1)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValueSequence {
    pub rule: TermRule,
    pub limit: Limit,
    pub label: String,
}

impl ValueSequence {
    /// Builds a sequence whose limit follows from the closed form of `rule`.
    pub fn new(rule: TermRule, label: impl Into<String>) -> Result<Self> {
        let limit = derive_limit(&rule)?;
        Ok(ValueSequence { rule, limit, label: label.into() })
    }

    /// Builds a sequence from explicit terms plus catalog-supplied limit data.
    pub fn with_limit(rule: TermRule, limit: Limit, label: impl Into<String>) -> Self {
        ValueSequence { rule, limit, label: label.into() }
    }

    pub fn term(&self, i: usize) -> GroupElement {
        self.rule.term(i)
    }

    pub fn rank(&self) -> usize {
        self.limit.rank()
    }
}

fn derive_limit(rule: &TermRule) -> Result<Limit> {
    let pos = |g: &GroupElement, what: &str| {
        if g.is_positive() {
            Ok(g.natural_val().unwrap())
        } else {
            Err(Error::Precondition(format!("{what} must be positive")))
        }
    };
    Ok(match rule {
        TermRule::Arithmetic { base, step } => {
            let k = pos(step, "step")? - 1;
            Limit::Unbounded { base: base.clone(), k }
        }
        TermRule::Geometric { limit, unit, c, q } => {
            if !c.is_positive() || *q <= Rat::one() {
                return Err(Error::Precondition("geometric rule needs c > 0, q > 1".into()));
            }
            Limit::Below { xi: limit.clone(), k: pos(unit, "unit")? }
        }
        TermRule::Harmonic { limit, unit, c } => {
            if !c.is_positive() {
                return Err(Error::Precondition("harmonic rule needs c > 0".into()));
            }
            Limit::Below { xi: limit.clone(), k: pos(unit, "unit")? }
        }
        TermRule::SqrtConvergents { n, rank } => Limit::Irrational {
            c: Rat::zero(),
            s: Rat::one(),
            n: BigInt::from(*n),
            rank: *rank,
        },
        TermRule::Listed(_) => {
            return Err(Error::Precondition("listed terms need explicit limit data".into()))
        }
        TermRule::Affine { inner, n, shift } => derive_limit(inner)?.affine(*n, shift),
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CutDescriptor {
    Ball { a: GroupElement, h: ConvexSubgroup, plus: bool },
    Sequence(ValueSequence),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Classification {
    BallPlus { a: GroupElement, h: ConvexSubgroup },
    BallMinus { a: GroupElement, h: ConvexSubgroup },
    NonBall,
}

/// Outcome of the vertical-boundedness test.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VerticalBound {
    /// `(a+H)^+`: no vertical supremum.
    Unbounded,
    /// Supremum class `xi + H` with a rational representative.
    Sup { xi: GroupElement, h: ConvexSubgroup },
    /// Supremum class realized only by the generator (irrational realizer).
    SupOfGenerator { label: String, h: ConvexSubgroup },
}

impl VerticalBound {
    pub fn is_bounded(&self) -> bool {
        !matches!(self, VerticalBound::Unbounded)
    }
}

impl CutDescriptor {
    pub fn principal_plus(a: GroupElement) -> Self {
        let r = a.rank();
        CutDescriptor::Ball { a, h: ConvexSubgroup::trivial(r), plus: true }
    }

    pub fn principal_minus(a: GroupElement) -> Self {
        let r = a.rank();
        CutDescriptor::Ball { a, h: ConvexSubgroup::trivial(r), plus: false }
    }

    pub fn ball_plus(a: GroupElement, h: ConvexSubgroup) -> Self {
        CutDescriptor::Ball { a, h, plus: true }
    }

    pub fn ball_minus(a: GroupElement, h: ConvexSubgroup) -> Self {
        CutDescriptor::Ball { a, h, plus: false }
    }

    pub fn sequence(seq: ValueSequence) -> Self {
        CutDescriptor::Sequence(seq)
    }

    pub fn rank(&self) -> usize {
        match self {
            CutDescriptor::Ball { a, .. } => a.rank(),
            CutDescriptor::Sequence(s) => s.rank(),
        }
    }

    /// Ball data `(a, H, plus)` when the cut is a ball cut.
    fn ball_form(&self) -> Option<(GroupElement, ConvexSubgroup, bool)> {
        match self {
            CutDescriptor::Ball { a, h, plus } => Some((a.clone(), *h, *plus)),
            CutDescriptor::Sequence(s) => match &s.limit {
                Limit::Unbounded { base, k } => {
                    Some((base.clone(), ConvexSubgroup::new(*k, base.rank()), true))
                }
                Limit::Below { xi, k } => Some((xi.clone(), ConvexSubgroup::new(*k, xi.rank()), false)),
                Limit::Irrational { .. } => None,
            },
        }
    }

    pub fn membership(&self, beta: &GroupElement) -> Side {
        assert_eq!(beta.rank(), self.rank(), "rank mismatch in membership");
        let lower = match self.ball_form() {
            Some((a, h, plus)) => {
                let o = beta.truncate(h.k).cmp(&a.truncate(h.k));
                o == Ordering::Less || (plus && o == Ordering::Equal)
            }
            None => match self {
                CutDescriptor::Sequence(ValueSequence {
                    limit: Limit::Irrational { c, s, n, .. },
                    ..
                }) => {
                    let z = (&beta.coords()[0] - c) / s;
                    z.is_negative() || &z * &z < Rat::from_integer(n.clone())
                }
                _ => unreachable!(),
            },
        };
        if lower {
            Side::L
        } else {
            Side::R
        }
    }

    pub fn in_lower(&self, beta: &GroupElement) -> bool {
        self.membership(beta) == Side::L
    }

    pub fn invariance_group(&self) -> ConvexSubgroup {
        match self.ball_form() {
            Some((_, h, _)) => h,
            None => ConvexSubgroup::new(1, self.rank()),
        }
    }

    pub fn classify(&self) -> Classification {
        match self.ball_form() {
            Some((a, h, true)) => Classification::BallPlus { a, h },
            Some((a, h, false)) => Classification::BallMinus { a, h },
            None => Classification::NonBall,
        }
    }

    pub fn vertical_bound(&self) -> VerticalBound {
        match self.ball_form() {
            Some((_, _, true)) => VerticalBound::Unbounded,
            Some((a, h, false)) => VerticalBound::Sup { xi: a, h },
            None => {
                let label = match self {
                    CutDescriptor::Sequence(s) => s.label.clone(),
                    _ => unreachable!(),
                };
                VerticalBound::SupOfGenerator { label, h: self.invariance_group() }
            }
        }
    }

    pub fn is_vertically_bounded(&self) -> bool {
        self.vertical_bound().is_bounded()
    }

    /// The cut `a + n*δ`, `n >= 1`.
    pub fn scale_shift(&self, n: i64, a: &GroupElement) -> Result<Self> {
        if n < 1 {
            return Err(Error::Precondition("scale factor must be at least 1".into()));
        }
        Ok(match self {
            CutDescriptor::Ball { a: b, h, plus } => {
                CutDescriptor::Ball { a: a + &b.scale_int(n), h: *h, plus: *plus }
            }
            CutDescriptor::Sequence(s) => CutDescriptor::Sequence(ValueSequence {
                rule: TermRule::Affine { inner: Box::new(s.rule.clone()), n, shift: a.clone() },
                limit: s.limit.affine(n, a),
                label: if n == 1 { format!("{a}+{}", s.label) } else { format!("{a}+{n}*{}", s.label) },
            }),
        })
    }

    /// Whether the lower set of `self` is contained in that of `other`.
    /// Decided exactly for ball cuts; `None` when a non-ball cut is involved.
    pub fn lower_subset(&self, other: &Self) -> Option<bool> {
        let (a, h, p) = self.ball_form()?;
        let (b, g, q) = other.ball_form()?;
        let m = h.k.min(g.k);
        let o = a.truncate(m).cmp(&b.truncate(m));
        if o != Ordering::Equal {
            return Some(o == Ordering::Less);
        }
        // Past the common prefix a ball cut behaves like an infinitesimal
        // -inf (minus) or +inf (plus) at coordinate k+1.
        Some(match h.k.cmp(&g.k) {
            Ordering::Equal => p <= q,
            Ordering::Less => !p,
            Ordering::Greater => q,
        })
    }

    /// Points of the lower set close to its top, for spot checks.
    pub fn sample_lower(&self) -> Vec<GroupElement> {
        let r = self.rank();
        let mut out = Vec::new();
        if let CutDescriptor::Sequence(s) = self {
            for i in 1..=40 {
                out.push(s.term(i));
            }
        }
        if let Some((a, h, plus)) = self.ball_form() {
            let big = [int(1), int(1000), int(1_000_000)];
            if plus {
                out.push(a.clone());
                if h.k < r {
                    for m in &big {
                        out.push(&a + &GroupElement::unit(r, h.k + 1, m.clone()));
                        out.push(&a - &GroupElement::unit(r, h.k + 1, m.clone()));
                    }
                }
                if h.k == 0 && r > 0 {
                    for m in &big {
                        out.push(&a + &GroupElement::unit(r, 1, m.clone()));
                    }
                }
            } else if h.k > 0 {
                for j in 0..48 {
                    let eps = rat(1, 1i64 << j.min(62));
                    let x = &a - &GroupElement::unit(r, h.k, eps);
                    if h.k < r {
                        out.push(&x + &GroupElement::unit(r, h.k + 1, int(1_000_000)));
                    }
                    out.push(x);
                }
            }
        }
        out.retain(|x| self.in_lower(x));
        out
    }

    /// Vertical-boundedness condition (b) on sampled `x` for the given `q`:
    /// some sampled `y` in the lower set has `x + q(y - x)` above it.
    pub fn vb_condition_holds(&self, x: &GroupElement, q: &Rat) -> bool {
        self.sample_lower().iter().any(|y| {
            let z = x + &(y - x).scale(q);
            !self.in_lower(&z)
        })
    }
}

impl fmt::Display for CutDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ball_form() {
            Some((a, h, plus)) => {
                let sign = if plus { "+" } else { "-" };
                if h.is_trivial() {
                    write!(f, "{a}^{sign}")
                } else {
                    write!(f, "({a}+{h})^{sign}")
                }
            }
            None => match self {
                CutDescriptor::Sequence(s) => match &s.limit {
                    Limit::Irrational { c, s: sc, n, .. } => {
                        write!(f, "nonball({c} + {sc}*sqrt({n}); {})", s.label)
                    }
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            },
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::BallPlus { a, h } => write!(f, "ball+ ({a}+{h})"),
            Classification::BallMinus { a, h } => write!(f, "ball- ({a}+{h})"),
            Classification::NonBall => write!(f, "nonball"),
        }
    }
}

/// Named cuts of rank 1 and 2 covering every classification.
pub fn catalog() -> Vec<(&'static str, CutDescriptor)> {
    let g = GroupElement::from_ints;
    let seq = |rule, label: &str| CutDescriptor::sequence(ValueSequence::new(rule, label).expect("catalog sequence"));
    vec![
        ("principal 1^+", CutDescriptor::principal_plus(g(&[1]))),
        ("principal 1^-", CutDescriptor::principal_minus(g(&[1]))),
        ("whole line (0+Γ)^+", CutDescriptor::ball_plus(g(&[0]), ConvexSubgroup::whole(1))),
        ("principal (1,2)^+", CutDescriptor::principal_plus(g(&[1, 2]))),
        ("principal (1,2)^-", CutDescriptor::principal_minus(g(&[1, 2]))),
        ("ball (0+H_1)^+", CutDescriptor::ball_plus(g(&[0, 0]), ConvexSubgroup::new(1, 2))),
        ("ball (0+H_1)^-", CutDescriptor::ball_minus(g(&[0, 0]), ConvexSubgroup::new(1, 2))),
        ("whole plane (0+Γ)^+", CutDescriptor::ball_plus(g(&[0, 0]), ConvexSubgroup::whole(2))),
        ("sqrt(2) truncations", seq(TermRule::SqrtConvergents { n: 2, rank: 1 }, "sqrt(2) convergents")),
        ("sqrt(2) truncations, rank 2", seq(TermRule::SqrtConvergents { n: 2, rank: 2 }, "sqrt(2) convergents")),
        ("(0,i)", seq(TermRule::Arithmetic { base: g(&[0, 0]), step: g(&[0, 1]) }, "(0,i)")),
        (
            "-1/2^i",
            seq(TermRule::Geometric { limit: g(&[0]), unit: g(&[1]), c: int(1), q: int(2) }, "-1/2^i"),
        ),
        (
            "(1,0) - (0,1)/i",
            seq(TermRule::Harmonic { limit: g(&[1, 0]), unit: g(&[0, 1]), c: int(1) }, "(1,0) - (0,1)/i"),
        ),
        (
            "(1,0) - (1,0)/2^i",
            seq(TermRule::Geometric { limit: g(&[1, 0]), unit: g(&[1, 0]), c: int(1), q: int(2) }, "(1,0) - (1,0)/2^i"),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn geo_half() -> CutDescriptor {
        // γ_i = -1/2^i
        let rule = TermRule::Geometric { limit: g("(0)"), unit: g("(1)"), c: int(1), q: int(2) };
        CutDescriptor::sequence(ValueSequence::new(rule, "-1/2^i").unwrap())
    }

    #[test]
    fn membership_examples() {
        let d = CutDescriptor::principal_minus(g("(1,0)"));
        assert_eq!(d.membership(&g("(0,1000000)")), Side::L);
        assert_eq!(d.membership(&g("(1,0)")), Side::R);
        let s = geo_half();
        assert_eq!(s.membership(&g("(0)")), Side::R);
        assert_eq!(s.membership(&g("(-1/1024)")), Side::L);
    }

    #[test]
    fn invariance_examples() {
        let h1 = ConvexSubgroup::new(1, 2);
        assert_eq!(CutDescriptor::ball_plus(g("(0,0)"), h1).invariance_group(), h1);
        let up = TermRule::Arithmetic { base: g("(0,0)"), step: g("(0,1)") };
        let s = CutDescriptor::sequence(ValueSequence::new(up, "(0,i)").unwrap());
        assert_eq!(s.invariance_group(), h1);
        let harm = TermRule::Harmonic { limit: g("(1)"), unit: g("(1)"), c: int(1) };
        let s = CutDescriptor::sequence(ValueSequence::new(harm, "1-1/i").unwrap());
        assert!(s.invariance_group().is_trivial());
    }

    #[test]
    fn classify_examples() {
        let harm = TermRule::Harmonic { limit: g("(1,0)"), unit: g("(0,1)"), c: int(1) };
        let s = CutDescriptor::sequence(ValueSequence::new(harm, "(1,-1/i)").unwrap());
        assert_eq!(
            s.classify(),
            Classification::BallMinus { a: g("(1,0)"), h: ConvexSubgroup::trivial(2) }
        );
        let up = TermRule::Arithmetic { base: g("(0,0)"), step: g("(0,1)") };
        let s = CutDescriptor::sequence(ValueSequence::new(up, "(0,i)").unwrap());
        assert_eq!(s.classify(), Classification::BallPlus { a: g("(0,0)"), h: ConvexSubgroup::new(1, 2) });
        let r2 = TermRule::SqrtConvergents { n: 2, rank: 1 };
        let s = CutDescriptor::sequence(ValueSequence::new(r2, "sqrt2").unwrap());
        assert_eq!(s.classify(), Classification::NonBall);
    }

    #[test]
    fn vertical_bound_examples() {
        let h1 = ConvexSubgroup::new(1, 2);
        assert!(!CutDescriptor::ball_plus(g("(2,0)"), h1).is_vertically_bounded());
        assert_eq!(
            CutDescriptor::ball_minus(g("(2,0)"), h1).vertical_bound(),
            VerticalBound::Sup { xi: g("(2,0)"), h: h1 }
        );
        assert_eq!(
            geo_half().vertical_bound(),
            VerticalBound::Sup { xi: g("(0)"), h: ConvexSubgroup::trivial(1) }
        );
    }

    #[test]
    fn scale_shift_examples() {
        let d = CutDescriptor::principal_minus(g("(0)"));
        assert_eq!(d.scale_shift(1, &g("(5/2)")).unwrap(), CutDescriptor::principal_minus(g("(5/2)")));
        let s = geo_half().scale_shift(2, &g("(0)")).unwrap();
        assert_eq!(s.classify(), geo_half().classify());
        if let CutDescriptor::Sequence(seq) = &s {
            assert_eq!(seq.term(3), g("(-1/4)"));
        }
        assert_eq!(s.invariance_group(), geo_half().invariance_group());
        assert!(geo_half().scale_shift(0, &g("(0)")).is_err());
    }

    #[test]
    fn sqrt_convergents_increase_below() {
        let mut prev = int(0);
        for k in 0..10 {
            let c = sqrt_convergent(2, 2 * k);
            assert!(c > prev && &c * &c < int(2));
            prev = c;
        }
        assert_eq!(sqrt_convergent(2, 2), rat(7, 5));
    }

    #[test]
    fn lower_subset_balls() {
        let h1 = ConvexSubgroup::new(1, 2);
        let t = ConvexSubgroup::trivial(2);
        let m0 = CutDescriptor::ball_minus(g("(0,0)"), h1);
        let p0 = CutDescriptor::ball_plus(g("(0,0)"), h1);
        let pt = CutDescriptor::principal_plus(g("(0,5)"));
        assert_eq!(m0.lower_subset(&p0), Some(true));
        assert_eq!(p0.lower_subset(&m0), Some(false));
        assert_eq!(pt.lower_subset(&p0), Some(true));
        assert_eq!(p0.lower_subset(&pt), Some(false));
        assert_eq!(m0.lower_subset(&pt), Some(true));
        assert_eq!(CutDescriptor::ball_minus(g("(0,5)"), t).lower_subset(&m0), Some(false));
    }
}
