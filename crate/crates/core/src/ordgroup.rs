//! Finite-rank lexicographically ordered groups `Q^r`.
//!
//! Elements compare lexicographically. The natural valuation of a nonzero
//! element is the (1-based) index of its first nonzero coordinate, and the
//! convex subgroups are exactly `H_k = {x : x_1 = .. = x_k = 0}` for `k` in
//! `0..=r`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    coords: Vec<Rat>,
}

impl GroupElement {
    pub fn new(coords: Vec<Rat>) -> Self {
        GroupElement { coords }
    }

    pub fn zero(rank: usize) -> Self {
        GroupElement { coords: vec![Rat::zero(); rank] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        GroupElement { coords: v.iter().map(|&n| int(n)).collect() }
    }

    /// Rank-`rank` element with `q` in coordinate `k` (1-based) and zeros elsewhere.
    pub fn unit(rank: usize, k: usize, q: Rat) -> Self {
        let mut g = Self::zero(rank);
        g.coords[k - 1] = q;
        g
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive())
    }

    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        Ok(self.coords.cmp(&other.coords))
    }

    /// First nonzero coordinate index (1-based); `None` stands for infinity.
    pub fn natural_val(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero()).map(|i| i + 1)
    }

    /// Projection onto the first `k` coordinates.
    pub fn truncate(&self, k: usize) -> Self {
        assert!(k <= self.rank(), "truncation length exceeds rank");
        GroupElement { coords: self.coords[..k].to_vec() }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        GroupElement { coords: self.coords.iter().map(|c| c * q).collect() }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&int(n))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        Ok(GroupElement {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Panics on rank mismatch; use [`GroupElement::compare`] for a checked variant.
impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in comparison");
        self.coords.cmp(&other.coords)
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        self.try_add(rhs).expect("rank mismatch in addition")
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        self + &(-rhs)
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement { coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: GroupElement) -> GroupElement {
        &self + &rhs
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: GroupElement) -> GroupElement {
        &self - &rhs
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        -&self
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for GroupElement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("group element `{s}` must be parenthesized")))?;
        if inner.trim().is_empty() {
            return Ok(GroupElement::zero(0));
        }
        let coords = inner.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?;
        Ok(GroupElement { coords })
    }
}

/// A group element extended by the formal symbols `-inf` and `+inf`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    NegInf,
    Fin(GroupElement),
    Inf,
}

impl Value {
    pub fn fin(&self) -> Option<&GroupElement> {
        match self {
            Value::Fin(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Value::Inf)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Fin(_))
    }

    pub fn unwrap_fin(&self) -> &GroupElement {
        self.fin().expect("expected a finite value")
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Fin(a), Value::Fin(b)) => Value::Fin(a + b),
            (Value::Inf, Value::NegInf) | (Value::NegInf, Value::Inf) => {
                panic!("inf + -inf is undefined")
            }
            (Value::Inf, _) | (_, Value::Inf) => Value::Inf,
            _ => Value::NegInf,
        }
    }

    pub fn add_fin(&self, g: &GroupElement) -> Value {
        self.add(&Value::Fin(g.clone()))
    }

    pub fn scale_int(&self, n: i64) -> Value {
        assert!(n > 0);
        match self {
            Value::Fin(g) => Value::Fin(g.scale_int(n)),
            v => v.clone(),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        use Value::*;
        match (self, other) {
            (Fin(a), Fin(b)) => a.cmp(b),
            (NegInf, NegInf) | (Inf, Inf) => Ordering::Equal,
            (NegInf, _) | (_, Inf) => Ordering::Less,
            (_, NegInf) | (Inf, _) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::NegInf => write!(f, "-inf"),
            Value::Fin(g) => write!(f, "{g}"),
            Value::Inf => write!(f, "inf"),
        }
    }
}

impl From<GroupElement> for Value {
    fn from(g: GroupElement) -> Self {
        Value::Fin(g)
    }
}

/// `H_k`: elements whose first `k` coordinates vanish.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ConvexSubgroup {
    pub k: usize,
    pub rank: usize,
}

impl ConvexSubgroup {
    pub fn new(k: usize, rank: usize) -> Self {
        assert!(k <= rank, "H_k needs k <= rank");
        ConvexSubgroup { k, rank }
    }

    pub fn whole(rank: usize) -> Self {
        Self::new(0, rank)
    }

    pub fn trivial(rank: usize) -> Self {
        Self::new(rank, rank)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.coords()[..self.k].iter().all(Zero::is_zero)
    }

    pub fn is_trivial(&self) -> bool {
        self.k == self.rank
    }

    pub fn is_whole(&self) -> bool {
        self.k == 0
    }

    /// Smallest positive element outside `H` scaled by `q`: `q * e_k`.
    pub fn step_outside(&self, q: Rat) -> Option<GroupElement> {
        (self.k > 0).then(|| GroupElement::unit(self.rank, self.k, q))
    }
}

impl fmt::Display for ConvexSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{}", self.k)
    }
}
