//! Infix expressions in `t` and `x`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::ordgroup::Rat;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Var(char),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, Rat),
}

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(format!("expected `{}` at offset {}", c as char, self.pos)))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.peek();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(format!("expected a number at offset {start}")));
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        Ok(digits.parse().expect("digits"))
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat(b'-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            return Ok(Ast::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rat> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let n = self.integer()?;
            let d = if self.eat(b'/') { self.integer()? } else { BigInt::from(1) };
            self.expect(b')')?;
            if d.is_zero() {
                return Err(err("zero denominator in exponent"));
            }
            let q = Rat::new(n, d);
            return Ok(if neg { -q } else { q });
        }
        let neg = self.eat(b'-');
        let n = Rat::from_integer(self.integer()?);
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Ast::Num(self.integer()?)),
            Some(c @ (b't' | b'x')) => {
                self.pos += 1;
                Ok(Ast::Var(c as char))
            }
            Some(c) => Err(err(format!("unexpected `{}` at offset {}", c as char, self.pos))),
            None => Err(err("unexpected end of input")),
        }
    }
}

pub fn parse_ast(s: &str) -> Result<Ast> {
    let mut p = Parser { s: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(err(format!("trailing input at offset {}", p.pos)));
    }
    Ok(e)
}

fn small_exp(q: &Rat) -> Result<i64> {
    if !q.is_integer() {
        return Err(err(format!("fractional exponent {q} only allowed on t")));
    }
    q.to_integer().to_i64().filter(|n| n.abs() <= 4096).ok_or_else(|| err("exponent too large"))
}

fn eval_elem(field: &Field, a: &Ast) -> Result<Elem> {
    Ok(match a {
        Ast::Num(n) => field.from_bigint(n.clone()),
        Ast::Var('t') => field.t_pow(Rat::from_integer(1.into()))?,
        Ast::Var(c) => return Err(err(format!("variable `{c}` not allowed in a scalar"))),
        Ast::Add(l, r) => eval_elem(field, l)?.add(&eval_elem(field, r)?),
        Ast::Sub(l, r) => eval_elem(field, l)?.sub(&eval_elem(field, r)?),
        Ast::Mul(l, r) => eval_elem(field, l)?.mul(&eval_elem(field, r)?),
        Ast::Div(l, r) => eval_elem(field, l)?.div(&eval_elem(field, r)?)?,
        Ast::Neg(e) => eval_elem(field, e)?.neg(),
        Ast::Pow(b, q) if **b == Ast::Var('t') => field.t_pow(q.clone())?,
        Ast::Pow(b, q) => {
            let n = small_exp(q)?;
            let base = eval_elem(field, b)?;
            let base = if n < 0 { base.inv()? } else { base };
            base.pow(n.unsigned_abs() as u32)
        }
    })
}

fn eval_poly(field: &Field, a: &Ast) -> Result<Poly> {
    let f = *field;
    Ok(match a {
        Ast::Var('x') => Poly::x(f),
        Ast::Num(_) | Ast::Var(_) => Poly::constant(f, eval_elem(field, a)?),
        Ast::Add(l, r) => eval_poly(field, l)?.add(&eval_poly(field, r)?),
        Ast::Sub(l, r) => eval_poly(field, l)?.sub(&eval_poly(field, r)?),
        Ast::Mul(l, r) => eval_poly(field, l)?.mul(&eval_poly(field, r)?),
        Ast::Div(l, r) => {
            let d = eval_poly(field, r)?;
            if !d.is_constant() {
                return Err(err("division by a nonconstant polynomial"));
            }
            eval_poly(field, l)?.scale(&d.coeff(0).inv()?)
        }
        Ast::Neg(e) => eval_poly(field, e)?.neg(),
        Ast::Pow(b, q) if **b == Ast::Var('t') => Poly::constant(f, field.t_pow(q.clone())?),
        Ast::Pow(b, q) => {
            let n = small_exp(q)?;
            let base = eval_poly(field, b)?;
            if n >= 0 {
                base.pow(n as u32)
            } else if base.is_constant() {
                Poly::constant(f, base.coeff(0).inv()?.pow(n.unsigned_abs() as u32))
            } else {
                return Err(err("negative power of a nonconstant polynomial"));
            }
        }
    })
}

pub fn parse_elem(field: &Field, s: &str) -> Result<Elem> {
    eval_elem(field, &parse_ast(s)?)
}

pub fn parse_poly(field: Field, s: &str) -> Result<Poly> {
    eval_poly(&field, &parse_ast(s)?)
}
