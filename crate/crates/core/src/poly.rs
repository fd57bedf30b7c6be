//! Dense polynomials in `x` over a base field.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    c: Vec<Elem>,
}

pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Lucas: `p | C(l, k)` iff some base-`p` digit of `k` exceeds that of `l`.
pub fn p_divides_binomial(l: u64, k: u64, p: u64) -> Result<bool> {
    if k > l {
        return Err(Error::BinomialRange { l, k });
    }
    let (mut l, mut k) = (l, k);
    while k > 0 {
        if k % p > l % p {
            return Ok(true);
        }
        k /= p;
        l /= p;
    }
    Ok(false)
}

/// `mult(g)`: least `s >= 1` with `∂_s g != 0`, and the exponent `r` with `s = p^r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mult {
    pub least_s: usize,
    pub r: u32,
}

impl Poly {
    pub fn zero(field: Field) -> Self {
        Poly { field, c: vec![] }
    }

    pub fn constant(field: Field, a: Elem) -> Self {
        Poly::from_coeffs(field, vec![a])
    }

    pub fn one(field: Field) -> Self {
        Poly::constant(field, field.one())
    }

    pub fn x(field: Field) -> Self {
        Poly::from_coeffs(field, vec![field.zero(), field.one()])
    }

    /// `x - a`.
    pub fn x_minus(field: Field, a: &Elem) -> Self {
        Poly::from_coeffs(field, vec![a.neg(), field.one()])
    }

    pub fn from_coeffs(field: Field, mut c: Vec<Elem>) -> Self {
        while c.last().is_some_and(Elem::is_zero) {
            c.pop();
        }
        Poly { field, c }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn lc(&self) -> Elem {
        self.coeff(self.degree())
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.lc().is_one()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::from_coeffs(self.field, (0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { field: self.field, c: self.c.iter().map(Elem::neg).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.field);
        }
        let mut c = vec![self.field.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(self.field, c)
    }

    pub fn scale(&self, a: &Elem) -> Poly {
        Poly::from_coeffs(self.field, self.c.iter().map(|c| c.mul(a)).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Division with remainder by a monic polynomial.
    pub fn divrem_monic(&self, q: &Poly) -> Result<(Poly, Poly)> {
        if !q.is_monic() {
            return Err(Error::NotMonic);
        }
        let dq = q.degree();
        let mut r = self.c.clone();
        if r.len() <= dq {
            return Ok((Poly::zero(self.field), self.clone()));
        }
        let mut quo = vec![self.field.zero(); r.len() - dq];
        for k in (0..r.len() - dq).rev() {
            let lead = r[k + dq].clone();
            if lead.is_zero() {
                continue;
            }
            for (i, qi) in q.c.iter().enumerate() {
                r[k + i] = r[k + i].sub(&lead.mul(qi));
            }
            quo[k] = lead;
        }
        r.truncate(dq);
        Ok((Poly::from_coeffs(self.field, quo), Poly::from_coeffs(self.field, r)))
    }

    /// Coefficients `f_i` with `deg f_i < deg Q` and `f = Σ f_i Q^i`.
    pub fn q_expansion(&self, q: &Poly) -> Result<Vec<Poly>> {
        if !q.is_monic() || q.degree() == 0 {
            return Err(Error::NotMonic);
        }
        let n = self.degree() / q.degree();
        let mut out = Vec::with_capacity(n + 1);
        let mut cur = self.clone();
        for _ in 0..=n {
            let (quo, rem) = cur.divrem_monic(q)?;
            out.push(rem);
            cur = quo;
        }
        debug_assert!(cur.is_zero());
        Ok(out)
    }

    /// Hasse–Schmidt derivative `∂_s`.
    pub fn hasse(&self, s: usize) -> Poly {
        if s >= self.c.len() {
            return Poly::zero(self.field);
        }
        let c = (s..self.c.len())
            .map(|n| self.c[n].mul_int(&binom(n as u64, s as u64)))
            .collect();
        Poly::from_coeffs(self.field, c)
    }

    pub fn eval(&self, a: &Elem) -> Elem {
        let mut acc = self.field.zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(a).add(c);
        }
        acc
    }

    /// `[(∂_l f)(a)]_{l = 0..=deg f}`.
    pub fn taylor_at(&self, a: &Elem) -> Vec<Elem> {
        (0..=self.degree()).map(|l| self.hasse(l).eval(a)).collect()
    }

    /// `f(x + a)`.
    pub fn shift(&self, a: &Elem) -> Poly {
        let xa = Poly::from_coeffs(self.field, vec![a.clone(), self.field.one()]);
        let mut acc = Poly::zero(self.field);
        for c in self.c.iter().rev() {
            acc = acc.mul(&xa).add(&Poly::constant(self.field, c.clone()));
        }
        acc
    }

    pub fn mult_p(&self) -> Result<Mult> {
        if self.is_constant() {
            return Err(Error::Constant);
        }
        let least_s = (1..=self.degree()).find(|&s| !self.hasse(s).is_zero()).expect("top derivative");
        let p = self.field.characteristic();
        let r = if p == 0 {
            0
        } else {
            let mut r = 0;
            let mut s = least_s;
            while s % p as usize == 0 {
                s /= p as usize;
                r += 1;
            }
            r
        };
        Ok(Mult { least_s, r })
    }

    /// Largest `r` with `f ∈ K[x^{p^r}]` (for `p > 1`).
    pub fn p_power_support(&self, p: u64) -> u32 {
        let mut r = 0;
        let mut step = p as usize;
        while step <= self.degree()
            && self.c.iter().enumerate().all(|(i, c)| c.is_zero() || i % step == 0)
        {
            r += 1;
            step *= p as usize;
        }
        r
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let simple = c.as_rat().is_some() || !s.contains([' ', '/']);
            let (neg, body) = match s.strip_prefix('-') {
                Some(rest) if simple => (true, rest.to_string()),
                _ => (false, s.clone()),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let body = if simple { body } else { format!("({body})") };
            match i {
                0 => write!(f, "{body}")?,
                _ => {
                    if body != "1" {
                        write!(f, "{body}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
