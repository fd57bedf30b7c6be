//! Valued base fields and their elements.
//!
//! * `padic(p)`: the rationals with the `p`-adic valuation.
//! * `monomial(c)`: quotients of finite sums `Σ c_q t^q` with rational
//!   exponents over `Q` (`c = 0`) or `F_p` (`c = p`); the value is the least
//!   exponent of the numerator minus that of the denominator.
//! * `composite2(p)`: `Q(t)` with the rank-two value `(ord_t f, v_p(a))` where
//!   `f = t^k (a + t g)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ordgroup::{int, GroupElement, Rat, Value};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Field {
    Padic(u64),
    Monomial(u64),
    Composite2(u64),
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl Field {
    pub fn padic(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Field::Padic(p))
    }

    pub fn monomial(c: u64) -> Result<Self> {
        if c != 0 {
            check_prime(c)?;
        }
        Ok(Field::Monomial(c))
    }

    pub fn composite2(p: u64) -> Result<Self> {
        check_prime(p)?;
        Ok(Field::Composite2(p))
    }

    /// Characteristic of the field itself (0 or a prime).
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Monomial(c) => *c,
            _ => 0,
        }
    }

    /// Characteristic exponent of the residue field.
    pub fn char_exponent(&self) -> u64 {
        match self {
            Field::Padic(p) | Field::Composite2(p) => *p,
            Field::Monomial(0) => 1,
            Field::Monomial(p) => *p,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Field::Composite2(_) => 2,
            _ => 1,
        }
    }

    fn is_laurent(&self) -> bool {
        !matches!(self, Field::Padic(_))
    }

    pub fn zero(&self) -> Elem {
        self.from_rat(Rat::zero())
    }

    pub fn one(&self) -> Elem {
        self.from_rat(Rat::one())
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_rat(int(n))
    }

    pub fn from_bigint(&self, n: BigInt) -> Elem {
        self.from_rat(Rat::from_integer(n))
    }

    /// Rational constant; in characteristic `p` it is reduced mod `p`
    /// (denominators must be prime to `p`).
    pub fn from_rat(&self, q: Rat) -> Elem {
        if self.is_laurent() {
            Elem::L(LFrac::constant(self.characteristic(), q))
        } else {
            Elem::Q(q)
        }
    }

    /// The monomial `t^e`.
    pub fn t_pow(&self, e: Rat) -> Result<Elem> {
        match self {
            Field::Padic(_) => Err(Error::Parse("padic fields have no variable t".into())),
            Field::Composite2(_) if !e.is_integer() => {
                Err(Error::Parse(format!("composite2 needs integer exponents, got {e}")))
            }
            _ => Ok(Elem::L(LFrac::monomial(self.characteristic(), e, Rat::one()))),
        }
    }

    pub fn t(&self) -> Elem {
        self.t_pow(Rat::one()).expect("field has no variable t")
    }

    pub fn valuation(&self, x: &Elem) -> Value {
        if x.is_zero() {
            return Value::Inf;
        }
        match (self, x) {
            (Field::Padic(p), Elem::Q(q)) => {
                Value::Fin(GroupElement::new(vec![int(vp_rat(q, *p))]))
            }
            (Field::Monomial(_), Elem::L(f)) => {
                let e = f.num.min_exp() - f.den.min_exp();
                Value::Fin(GroupElement::new(vec![e]))
            }
            (Field::Composite2(p), Elem::L(f)) => {
                let (en, cn) = f.num.lowest();
                let (ed, cd) = f.den.lowest();
                let second = vp_rat(cn, *p) - vp_rat(cd, *p);
                Value::Fin(GroupElement::new(vec![en - ed, int(second)]))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    /// Value of the characteristic exponent `p` as an element of `K`.
    pub fn value_of_p(&self) -> Value {
        self.valuation(&self.from_int(self.char_exponent() as i64))
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        crate::parse::parse_elem(self, s)
    }

    pub fn zero_value(&self) -> GroupElement {
        GroupElement::zero(self.rank())
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Parse(format!("{p} is not prime")))
    }
}

/// `p`-adic order of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

pub fn vp_rat(q: &Rat, p: u64) -> i64 {
    vp_int(q.numer(), p) - vp_int(q.denom(), p)
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Padic(p) => write!(f, "padic({p})"),
            Field::Monomial(c) => write!(f, "monomial({c})"),
            Field::Composite2(p) => write!(f, "composite2({p})"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown field `{s}`"));
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let arg: u64 = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        match name.trim() {
            "padic" => Field::padic(arg),
            "monomial" => Field::monomial(arg),
            "composite2" => Field::composite2(arg),
            _ => Err(bad()),
        }
    }
}

// ---------------------------------------------------------------------------
// Coefficient arithmetic in Q (m = 0) or F_p (m = p).

fn cred(m: u64, q: Rat) -> Rat {
    if m == 0 {
        return q;
    }
    let p = BigInt::from(m);
    if q.is_integer() {
        return Rat::from_integer(q.numer().mod_floor(&p));
    }
    let d = q.denom().mod_floor(&p);
    assert!(!d.is_zero(), "denominator divisible by the characteristic");
    let inv = d.modpow(&(&p - 2u32), &p);
    Rat::from_integer((q.numer() * inv).mod_floor(&p))
}

fn cinv(m: u64, q: &Rat) -> Rat {
    cred(m, q.recip())
}

/// Sparse sum `Σ c_e t^e` with rational exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LPoly {
    terms: BTreeMap<Rat, Rat>,
}

impl LPoly {
    fn one() -> Self {
        Self::mono(Rat::zero(), Rat::one())
    }

    fn mono(e: Rat, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        LPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    fn lowest(&self) -> (&Rat, &Rat) {
        self.terms.iter().next().expect("zero has no lowest term")
    }

    fn min_exp(&self) -> Rat {
        self.lowest().0.clone()
    }

    fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().is_some_and(|(e, c)| e.is_zero() && c.is_one())
    }

    fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn add(&self, o: &Self, m: u64) -> Self {
        let mut terms = BTreeMap::new();
        let (mut a, mut b) = (self.terms.iter().peekable(), o.terms.iter().peekable());
        loop {
            let (e, c) = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => a.next().map(|(e, c)| (e.clone(), c.clone())).unwrap(),
                (None, Some(_)) => b.next().map(|(e, c)| (e.clone(), c.clone())).unwrap(),
                (Some((ea, _)), Some((eb, _))) => match ea.cmp(eb) {
                    std::cmp::Ordering::Less => a.next().map(|(e, c)| (e.clone(), c.clone())).unwrap(),
                    std::cmp::Ordering::Greater => b.next().map(|(e, c)| (e.clone(), c.clone())).unwrap(),
                    std::cmp::Ordering::Equal => {
                        let (e, x) = a.next().unwrap();
                        let (_, y) = b.next().unwrap();
                        (e.clone(), cred(m, x + y))
                    }
                },
            };
            if !c.is_zero() {
                terms.insert(e, c);
            }
        }
        LPoly { terms }
    }

    fn neg(&self, m: u64) -> Self {
        LPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), cred(m, -c))).collect() }
    }

    fn mul(&self, o: &Self, m: u64) -> Self {
        // Exponents over a common denominator, so sums are integer additions.
        let den = self.terms.keys().chain(o.terms.keys()).fold(BigInt::one(), |d, e| d.lcm(e.denom()));
        let scaled = |p: &LPoly| -> Vec<(BigInt, Rat)> {
            p.terms.iter().map(|(e, c)| (e.numer() * (&den / e.denom()), c.clone())).collect()
        };
        let (a, b) = (scaled(self), scaled(o));
        let small = |c: &Rat| if m > 0 { c.to_integer().to_u64() } else { None };
        let mut acc: HashMap<BigInt, Rat> = HashMap::with_capacity(a.len() * b.len());
        for (e1, c1) in &a {
            let s1 = small(c1);
            for (e2, c2) in &b {
                let prod = match (s1, small(c2)) {
                    (Some(x), Some(y)) => Rat::from_integer(BigInt::from((x as u128 * y as u128 % m as u128) as u64)),
                    _ => c1 * c2,
                };
                *acc.entry(e1 + e2).or_insert_with(Rat::zero) += prod;
            }
        }
        let terms = acc
            .into_iter()
            .map(|(e, c)| (e, cred(m, c)))
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Rat::new(e, den.clone()), c))
            .collect();
        LPoly { terms }
    }

    fn scale_mono(&self, e: &Rat, c: &Rat, m: u64) -> Self {
        LPoly { terms: self.terms.iter().map(|(x, y)| (x + e, cred(m, y * c))).collect() }
    }
}

/// Quotient of two sparse sums, kept with a denominator whose lowest term is `1`.
#[derive(Clone, Debug)]
pub struct LFrac {
    m: u64,
    num: LPoly,
    den: LPoly,
}

const GCD_DEGREE_CAP: i64 = 512;

impl LFrac {
    fn constant(m: u64, q: Rat) -> Self {
        Self::monomial(m, Rat::zero(), q)
    }

    fn monomial(m: u64, e: Rat, c: Rat) -> Self {
        LFrac { m, num: LPoly::mono(e, cred(m, c)), den: LPoly::one() }
    }

    pub fn numerator(&self) -> &LPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LPoly {
        &self.den
    }

    fn normalize(mut self) -> Self {
        let m = self.m;
        if self.num.is_zero() {
            self.den = LPoly::one();
            return self;
        }
        if self.den.is_one() {
            return self;
        }
        if !self.den.is_monomial() {
            self.reduce_gcd();
        }
        let (e, c) = self.den.lowest();
        let (e, ci) = (-e.clone(), cinv(m, c));
        if self.den.is_monomial() {
            self.num = self.num.scale_mono(&e, &ci, m);
            self.den = LPoly::one();
        } else {
            self.num = self.num.scale_mono(&e, &ci, m);
            self.den = self.den.scale_mono(&e, &ci, m);
        }
        self
    }

    fn reduce_gcd(&mut self) {
        let m = self.m;
        let mut n = BigInt::one();
        for e in self.num.terms.keys().chain(self.den.terms.keys()) {
            n = n.lcm(e.denom());
        }
        let to_dense = |p: &LPoly| -> Option<(Rat, Vec<Rat>)> {
            let lo = p.min_exp();
            let hi = p.terms.keys().next_back().unwrap().clone();
            let deg = ((hi - &lo) * Rat::from_integer(n.clone())).to_integer().to_i64()?;
            if deg > GCD_DEGREE_CAP {
                return None;
            }
            let mut v = vec![Rat::zero(); deg as usize + 1];
            for (e, c) in &p.terms {
                let i = ((e - &lo) * Rat::from_integer(n.clone())).to_integer().to_usize()?;
                v[i] = c.clone();
            }
            Some((lo, v))
        };
        let (Some((lo_n, a)), Some((lo_d, b))) = (to_dense(&self.num), to_dense(&self.den)) else {
            return;
        };
        let g = dense_gcd(&a, &b, m);
        if g.len() <= 1 {
            return;
        }
        let from_dense = |lo: &Rat, v: &[Rat]| -> LPoly {
            let nn = Rat::from_integer(n.clone());
            let terms = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (lo + int(i as i64) / &nn, c.clone()))
                .collect();
            LPoly { terms }
        };
        self.num = from_dense(&lo_n, &dense_divrem(&a, &g, m).0);
        self.den = from_dense(&lo_d, &dense_divrem(&b, &g, m).0);
    }
}

fn dense_trim(v: &mut Vec<Rat>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn dense_divrem(a: &[Rat], b: &[Rat], m: u64) -> (Vec<Rat>, Vec<Rat>) {
    let mut r = a.to_vec();
    dense_trim(&mut r);
    let db = b.len() - 1;
    let lc_inv = cinv(m, &b[db]);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = cred(m, r.last().unwrap() * &lc_inv);
        for (i, bi) in b.iter().enumerate() {
            r[k + i] = cred(m, &r[k + i] - &c * bi);
        }
        q[k] = c;
        dense_trim(&mut r);
    }
    (q, r)
}

fn dense_gcd(a: &[Rat], b: &[Rat], m: u64) -> Vec<Rat> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    dense_trim(&mut x);
    dense_trim(&mut y);
    while !y.is_empty() {
        let r = dense_divrem(&x, &y, m).1;
        x = y;
        y = r;
    }
    let li = cinv(m, x.last().unwrap());
    x.iter().map(|c| cred(m, c * &li)).collect()
}

// ---------------------------------------------------------------------------

/// Field element: a rational (p-adic fields) or a sparse rational function.
#[derive(Clone, Debug)]
pub enum Elem {
    Q(Rat),
    L(LFrac),
}

impl Elem {
    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Q(q) => q.is_zero(),
            Elem::L(f) => f.num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Elem::Q(q) => q.is_one(),
            Elem::L(f) => f.den == LPoly::one() && f.num == LPoly::one(),
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Elem::Q(q) => Some(q),
            Elem::L(_) => None,
        }
    }

    fn lift(&self, m: u64) -> LFrac {
        match self {
            Elem::Q(q) => LFrac::constant(m, q.clone()),
            Elem::L(f) => {
                assert_eq!(f.m, m, "mixing characteristics");
                f.clone()
            }
        }
    }

    fn pair(&self, o: &Elem) -> Option<u64> {
        match (self, o) {
            (Elem::Q(_), Elem::Q(_)) => None,
            (Elem::L(f), _) => Some(f.m),
            (_, Elem::L(g)) => Some(g.m),
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        match self.pair(o) {
            None => Elem::Q(self.as_rat().unwrap() + o.as_rat().unwrap()),
            Some(m) => {
                let (a, b) = (self.lift(m), o.lift(m));
                let f = if a.den == b.den {
                    LFrac { m, num: a.num.add(&b.num, m), den: a.den }
                } else {
                    LFrac {
                        m,
                        num: a.num.mul(&b.den, m).add(&b.num.mul(&a.den, m), m),
                        den: a.den.mul(&b.den, m),
                    }
                };
                Elem::L(f.normalize())
            }
        }
    }

    pub fn neg(&self) -> Elem {
        match self {
            Elem::Q(q) => Elem::Q(-q),
            Elem::L(f) => Elem::L(LFrac { m: f.m, num: f.num.neg(f.m), den: f.den.clone() }),
        }
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        match self.pair(o) {
            None => Elem::Q(self.as_rat().unwrap() * o.as_rat().unwrap()),
            Some(m) => {
                let (a, b) = (self.lift(m), o.lift(m));
                let f = LFrac { m, num: a.num.mul(&b.num, m), den: a.den.mul(&b.den, m) };
                Elem::L(f.normalize())
            }
        }
    }

    pub fn inv(&self) -> Result<Elem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Elem::Q(q) => Elem::Q(q.recip()),
            Elem::L(f) => Elem::L(LFrac { m: f.m, num: f.den.clone(), den: f.num.clone() }.normalize()),
        })
    }

    pub fn div(&self, o: &Elem) -> Result<Elem> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, n: u32) -> Elem {
        let mut acc = match self {
            Elem::Q(_) => Elem::Q(Rat::one()),
            Elem::L(f) => Elem::L(LFrac::constant(f.m, Rat::one())),
        };
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Multiplication by an integer, reduced in the ambient characteristic.
    pub fn mul_int(&self, n: &BigInt) -> Elem {
        match self {
            Elem::Q(q) => Elem::Q(q * Rat::from_integer(n.clone())),
            Elem::L(f) => self.mul(&Elem::L(LFrac::constant(f.m, Rat::from_integer(n.clone())))),
        }
    }
}

impl PartialEq for Elem {
    fn eq(&self, o: &Elem) -> bool {
        match self.pair(o) {
            None => self.as_rat() == o.as_rat(),
            Some(m) => {
                let (a, b) = (self.lift(m), o.lift(m));
                a.num.mul(&b.den, m) == b.num.mul(&a.den, m)
            }
        }
    }
}

impl Eq for Elem {}

fn fmt_lpoly(p: &LPoly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (i, (e, c)) in p.terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        if e.is_zero() {
            write!(f, "{a}")?;
            continue;
        }
        if !a.is_one() {
            write!(f, "{a}*")?;
        }
        if e.is_one() {
            write!(f, "t")?;
        } else if e.is_integer() && e.is_positive() {
            write!(f, "t^{e}")?;
        } else {
            write!(f, "t^({e})")?;
        }
    }
    Ok(())
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Q(q) => write!(f, "{q}"),
            Elem::L(x) => {
                if x.den == LPoly::one() {
                    fmt_lpoly(&x.num, f)
                } else {
                    write!(f, "(")?;
                    fmt_lpoly(&x.num, f)?;
                    write!(f, ")/(")?;
                    fmt_lpoly(&x.den, f)?;
                    write!(f, ")")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordgroup::rat;

    fn v(field: Field, s: &str) -> Value {
        field.valuation(&field.parse_elem(s).unwrap())
    }

    #[test]
    fn valuation_examples() {
        let g = |s: &str| Value::Fin(s.parse().unwrap());
        assert_eq!(v(Field::Padic(2), "12"), g("(2)"));
        assert_eq!(v(Field::Monomial(2), "t^(-1/4)+t^(1/2)"), g("(-1/4)"));
        assert_eq!(v(Field::Composite2(2), "(6*t^3)/(1+t)"), g("(3, 1)"));
        assert_eq!(v(Field::Padic(3), "0"), Value::Inf);
    }

    #[test]
    fn char_exponents() {
        assert_eq!(Field::Monomial(2).char_exponent(), 2);
        assert_eq!(Field::Padic(3).char_exponent(), 3);
        assert_eq!(Field::Monomial(0).char_exponent(), 1);
        assert!(Field::padic(4).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let k = Field::Padic(5);
        let s = k.from_rat(rat(1, 2)).add(&k.from_rat(rat(1, 3)));
        assert_eq!(s, k.from_rat(rat(5, 6)));
        let m = Field::Monomial(0);
        let h = m.t_pow(rat(1, 2)).unwrap();
        assert_eq!(h.mul(&h), m.t());
        let x = m.parse_elem("t^2+t").unwrap().inv().unwrap();
        assert_eq!(x.to_string(), "(t^(-1))/(1 + t)");
        assert_eq!(x.mul(&m.parse_elem("t^2+t").unwrap()), m.one());
    }

    #[test]
    fn gcd_cancels_common_factors() {
        let m = Field::Monomial(0);
        let a = m.parse_elem("(t^2 - 1)/(t - 1)").unwrap();
        assert_eq!(a.to_string(), "1 + t");
        let b = m.parse_elem("(t - t^(1/2))/(t^(1/2) - 1)").unwrap();
        assert_eq!(b, m.t_pow(rat(1, 2)).unwrap());
    }

    #[test]
    fn char_p_reduction() {
        let k = Field::Monomial(3);
        assert!(k.from_int(3).is_zero());
        let x = k.parse_elem("t + 1").unwrap();
        // Frobenius: (t+1)^3 = t^3 + 1 in characteristic 3
        assert_eq!(x.pow(3), k.parse_elem("t^3 + 1").unwrap());
        assert_eq!(k.from_rat(rat(1, 2)), k.from_int(2));
    }

    #[test]
    fn value_of_p() {
        assert_eq!(Field::Composite2(3).value_of_p(), Value::Fin("(0,1)".parse().unwrap()));
        assert_eq!(Field::Monomial(2).value_of_p(), Value::Inf);
        assert_eq!(Field::Monomial(0).value_of_p(), Value::Fin("(0)".parse().unwrap()));
    }

    #[test]
    fn field_parse_roundtrip() {
        for s in ["padic(2)", "monomial(0)", "monomial(3)", "composite2(5)"] {
            assert_eq!(s.parse::<Field>().unwrap().to_string(), s);
        }
        assert!("padic(x)".parse::<Field>().is_err());
        assert!("quux(2)".parse::<Field>().is_err());
    }
}
