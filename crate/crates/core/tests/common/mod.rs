//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};

use keypoly::field::{Elem, Field};
use keypoly::ordgroup::{rat, GroupElement, Value};
use keypoly::poly::Poly;

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// Coefficients of `f(y + c)` by direct binomial expansion.
pub fn shifted(k: Field, f: &[Elem], c: &Elem) -> Vec<Elem> {
    let n = f.len();
    (0..n)
        .map(|j| {
            (j..n).fold(k.zero(), |acc, i| acc.add(&f[i].mul(&c.pow((i - j) as u32)).mul_int(&binomial(i, j))))
        })
        .collect()
}

/// Coefficients (in `y`) of the `s`-th Hasse derivative, from the coefficients in `y`.
pub fn hasse_coeffs(b: &[Elem], s: usize) -> Vec<Elem> {
    (s..b.len()).map(|j| b[j].mul_int(&binomial(j, s))).collect()
}

/// Division of a `y`-polynomial by `y^n - w`.
pub fn divrem_binomial(k: Field, g: &[Elem], n: usize, w: &Elem) -> (Vec<Elem>, Vec<Elem>) {
    let mut r = g.to_vec();
    let mut q = vec![k.zero(); g.len().saturating_sub(n).max(1)];
    for i in (n..r.len()).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        q[i - n] = c.clone();
        r[i] = k.zero();
        r[i - n] = r[i - n].add(&c.mul(w));
    }
    r.truncate(n.max(1));
    (q, r)
}

fn vmin(a: Value, b: Value) -> Value {
    a.min(b)
}

/// `min v(b_j) + j g` over the `y`-coefficients `b`.
pub fn gauss_value(k: Field, b: &[Elem], g: &GroupElement) -> Value {
    b.iter()
        .enumerate()
        .fold(Value::Inf, |acc, (j, c)| vmin(acc, k.valuation(c).add_fin(&g.scale_int(j as i64))))
}

/// A valuation described in the coordinate `y = x - c`: either `y ↦ γ`, or the augmentation of
/// `y ↦ e/n` by `φ = y^n - w` with value `λ`.
pub enum RefValuation {
    Monomial { gamma: GroupElement },
    Binomial { n: usize, w: Elem, base: GroupElement, lambda: GroupElement },
}

impl RefValuation {
    /// Value of the polynomial whose `y`-coefficients are `b`.
    pub fn value(&self, k: Field, b: &[Elem]) -> Value {
        match self {
            RefValuation::Monomial { gamma } => gauss_value(k, b, gamma),
            RefValuation::Binomial { n, w, base, lambda } => {
                let mut g = b.to_vec();
                let mut out = Value::Inf;
                let mut i = 0i64;
                while g.iter().any(|c| !c.is_zero()) {
                    let (q, r) = divrem_binomial(k, &g, *n, w);
                    out = vmin(out, gauss_value(k, &r, base).add_fin(&lambda.scale_int(i)));
                    g = q;
                    i += 1;
                }
                out
            }
        }
    }

    /// `ε` and its maximizers, from the definition.
    pub fn level(&self, k: Field, b: &[Elem]) -> (Value, Vec<usize>) {
        let nf = self.value(k, b);
        let Value::Fin(nf) = nf else { return (Value::Inf, vec![]) };
        let mut best: Option<GroupElement> = None;
        let mut arg = Vec::new();
        for s in 1..b.len() {
            let d = hasse_coeffs(b, s);
            let Value::Fin(nd) = self.value(k, &d) else { continue };
            let e = (&nf - &nd).scale(&rat(1, s as i64));
            match &best {
                Some(x) if *x > e => {}
                Some(x) if *x == e => arg.push(s),
                _ => {
                    best = Some(e);
                    arg = vec![s];
                }
            }
        }
        (best.map_or(Value::NegInf, Value::Fin), arg)
    }
}

/// `y`-coefficients of `f` around `c`.
pub fn around(f: &Poly, c: &Elem) -> Vec<Elem> {
    shifted(f.field(), f.coeffs(), c)
}

pub fn is_power_of(mut n: usize, p: u64) -> bool {
    if p == 1 {
        return n == 1;
    }
    while n.is_multiple_of(p as usize) {
        n /= p as usize;
    }
    n == 1
}
