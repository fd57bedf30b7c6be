//! Monomial and augmented valuations on `K[x]`, the level function, S-sets and
//! Newton polygons.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::ordgroup::{GroupElement, Rat, Value};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyValuation {
    /// `ν(Σ c_i (x-a)^i) = min v(c_i) + iγ`.
    Monomial { field: Field, center: Elem, gamma: Value },
    /// `ν(Σ f_i Q^i) = min base(f_i) + iγ`.
    Augmented { base: Box<PolyValuation>, q: Poly, gamma: Value },
}

impl PolyValuation {
    pub fn monomial(field: Field, center: Elem, gamma: Value) -> Self {
        PolyValuation::Monomial { field, center, gamma }
    }

    pub fn field(&self) -> Field {
        match self {
            PolyValuation::Monomial { field, .. } => *field,
            PolyValuation::Augmented { base, .. } => base.field(),
        }
    }

    /// The last augmentation value.
    pub fn gamma(&self) -> &Value {
        match self {
            PolyValuation::Monomial { gamma, .. } | PolyValuation::Augmented { gamma, .. } => gamma,
        }
    }

    /// The last key polynomial (`x - a` for a monomial node).
    pub fn key(&self) -> Poly {
        match self {
            PolyValuation::Monomial { field, center, .. } => Poly::x_minus(*field, center),
            PolyValuation::Augmented { q, .. } => q.clone(),
        }
    }

    fn add_term(&self, base: Value, i: usize) -> Value {
        if base.is_inf() {
            return base;
        }
        if i == 0 {
            return base;
        }
        base.add(&self.gamma().scale_int(i as i64))
    }

    pub fn eval(&self, f: &Poly) -> Value {
        match self {
            PolyValuation::Monomial { field, center, .. } => f
                .shift(center)
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| self.add_term(field.valuation(c), i))
                .min()
                .unwrap_or(Value::Inf),
            PolyValuation::Augmented { base, q, .. } => f
                .q_expansion(q)
                .expect("key polynomials are monic")
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| self.add_term(base.eval(c), i))
                .min()
                .unwrap_or(Value::Inf),
        }
    }

    /// The augmentation `[self; Q, γ]`, i.e. the truncation `ν_Q` with `ν_Q(Q) = γ`.
    pub fn truncate(&self, q: &Poly, gamma: Value) -> Result<PolyValuation> {
        if !q.is_monic() || q.degree() == 0 {
            return Err(Error::NotMonic);
        }
        let base = self.eval(q);
        if gamma <= base {
            return Err(Error::NonMonotone { base: base.to_string(), gamma: gamma.to_string() });
        }
        Ok(PolyValuation::Augmented { base: Box::new(self.clone()), q: q.clone(), gamma })
    }

    pub fn level(&self, f: &Poly) -> LevelData {
        if f.is_constant() {
            return LevelData { epsilon: Value::NegInf, maximizers: vec![] };
        }
        let nf = self.eval(f);
        let nf = match nf {
            Value::Fin(g) => g,
            _ => return LevelData { epsilon: Value::Inf, maximizers: vec![] },
        };
        let mut best: Option<(GroupElement, Vec<usize>)> = None;
        for s in 1..=f.degree() {
            let ds = f.hasse(s);
            if ds.is_zero() {
                continue;
            }
            let Value::Fin(v) = self.eval(&ds) else { continue };
            let e = (&nf - &v).scale(&Rat::new(1.into(), (s as i64).into()));
            match &mut best {
                Some((b, set)) if *b == e => set.push(s),
                Some((b, _)) if *b > e => {}
                _ => best = Some((e, vec![s])),
            }
        }
        match best {
            Some((e, set)) => LevelData { epsilon: Value::Fin(e), maximizers: set },
            None => LevelData { epsilon: Value::NegInf, maximizers: vec![] },
        }
    }

    /// Values `ν(f_i Q^i)` for the nonzero coefficients of the `Q`-expansion.
    pub fn term_values(&self, q: &Poly, f: &Poly) -> Result<Vec<(usize, Value)>> {
        let nq = self.eval(q);
        Ok(f.q_expansion(q)?
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let v = self.eval(c);
                let t = if i == 0 { v } else { v.add(&nq.scale_int(i as i64)) };
                (i, t)
            })
            .collect())
    }

    pub fn s_set(&self, q: &Poly, f: &Poly) -> Result<Vec<usize>> {
        let terms = self.term_values(q, f)?;
        let Some(min) = terms.iter().map(|(_, v)| v).min().cloned() else {
            return Ok(vec![]);
        };
        Ok(terms.into_iter().filter(|(_, v)| *v == min).map(|(i, _)| i).collect())
    }

    /// `(max S, ν(f_{Q,max S}))`.
    pub fn nu_degree(&self, q: &Poly, f: &Poly) -> Result<(usize, Value)> {
        let d = self.s_set(q, f)?.last().copied().unwrap_or(0);
        let coeff = f.q_expansion(q)?.swap_remove(d);
        Ok((d, self.eval(&coeff)))
    }

    pub fn newton_polygon(&self, q: &Poly, f: &Poly) -> Result<NewtonPolygon> {
        let exp = f.q_expansion(q)?;
        let mut cloud = Vec::new();
        for (i, c) in exp.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match self.eval(c) {
                Value::Fin(g) => cloud.push((i, g)),
                _ => return Err(Error::Precondition(format!("coefficient {i} has infinite value"))),
            }
        }
        Ok(NewtonPolygon::new(cloud))
    }

    /// Witness-based key test: every witness has level below `ε(Q)`.
    pub fn is_key_polynomial(&self, q: &Poly, witnesses: &[Poly]) -> Result<bool> {
        if let Some(w) = witnesses.iter().find(|w| w.degree() >= q.degree()) {
            return Err(Error::WitnessDegree { deg: w.degree(), deg_q: q.degree() });
        }
        let eq = self.level(q).epsilon;
        Ok(witnesses.iter().all(|w| self.level(w).epsilon < eq))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelData {
    pub epsilon: Value,
    pub maximizers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportLine {
    pub gamma: GroupElement,
    pub height: GroupElement,
    pub touching: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub cloud: Vec<(usize, GroupElement)>,
    pub hull: Vec<(usize, GroupElement)>,
}

/// Value at `i` of the segment through `a` and `b`.
fn interpolate(a: &(usize, GroupElement), b: &(usize, GroupElement), i: usize) -> GroupElement {
    let t = Rat::new(((i - a.0) as i64).into(), ((b.0 - a.0) as i64).into());
    &a.1 + &(&b.1 - &a.1).scale(&t)
}

impl NewtonPolygon {
    pub fn new(cloud: Vec<(usize, GroupElement)>) -> Self {
        let mut hull: Vec<(usize, GroupElement)> = Vec::new();
        for p in &cloud {
            while hull.len() >= 2 {
                let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
                if b.1 >= interpolate(a, p, b.0) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p.clone());
        }
        NewtonPolygon { cloud, hull }
    }

    pub fn on_hull(&self, i: usize) -> bool {
        self.hull.iter().any(|(j, _)| *j == i)
    }

    /// Slopes of consecutive hull edges.
    pub fn slopes(&self) -> Vec<GroupElement> {
        self.hull
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1).scale(&Rat::new(1.into(), ((w[1].0 - w[0].0) as i64).into())))
            .collect()
    }

    /// Line of slope `-γ` supporting the cloud from below.
    pub fn support_line(&self, gamma: &GroupElement) -> Option<SupportLine> {
        let shifted: Vec<_> =
            self.cloud.iter().map(|(i, v)| (*i, v + &gamma.scale_int(*i as i64))).collect();
        let height = shifted.iter().map(|(_, v)| v).min()?.clone();
        let touching = shifted.iter().filter(|(_, v)| *v == height).map(|(i, _)| *i).collect();
        Some(SupportLine { gamma: gamma.clone(), height, touching })
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("l\tvalue\ton_hull\n");
        for (i, v) in &self.cloud {
            let coords: Vec<String> = v.coords().iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect();
            let _ = writeln!(s, "{i}\t{}\t{}", coords.join("\t"), self.on_hull(*i));
        }
        s
    }

    /// SVG plot; higher-rank values are drawn by their first varying coordinate.
    pub fn to_svg(&self, gamma: Option<&GroupElement>) -> String {
        let k = (0..self.cloud.first().map_or(1, |p| p.1.rank()))
            .find(|&k| self.cloud.iter().any(|p| p.1.coords()[k] != self.cloud[0].1.coords()[k]))
            .unwrap_or(0);
        let y = |g: &GroupElement| -> f64 {
            let c = &g.coords()[k];
            num_traits::ToPrimitive::to_f64(c).unwrap_or(0.0)
        };
        let pts: Vec<(f64, f64)> = self.cloud.iter().map(|(i, v)| (*i as f64, y(v))).collect();
        let (xmax, ymin, ymax) = pts.iter().fold((1.0f64, 0.0f64, 1.0f64), |(a, b, c), (x, yv)| {
            (a.max(*x), b.min(*yv), c.max(*yv))
        });
        let (w, h, pad) = (400.0, 300.0, 30.0);
        let sx = |x: f64| pad + x / xmax * (w - 2.0 * pad);
        let sy = |v: f64| h - pad - (v - ymin) / (ymax - ymin).max(1e-9) * (h - 2.0 * pad);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n"
        );
        let _ = writeln!(s, "<line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\"/>", h - pad, w - pad, h - pad);
        let hull: Vec<String> =
            self.hull.iter().map(|(i, v)| format!("{:.2},{:.2}", sx(*i as f64), sy(y(v)))).collect();
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"black\"/>", hull.join(" "));
        for (x, v) in &pts {
            let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>", sx(*x), sy(*v));
        }
        if let Some(line) = gamma.and_then(|g| self.support_line(g)) {
            let slope = -y(&line.gamma);
            let at = |x: f64| y(&line.height) + slope * x;
            let _ = writeln!(
                s,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"red\" stroke-dasharray=\"4\"/>",
                sx(0.0),
                sy(at(0.0)),
                sx(xmax),
                sy(at(xmax))
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn g(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn fin(s: &str) -> Value {
        Value::Fin(g(s))
    }

    #[test]
    fn eval_examples() {
        let k = Field::Padic(2);
        let nu = PolyValuation::monomial(k, k.zero(), fin("(1)"));
        assert_eq!(nu.eval(&parse_poly(k, "x^2 + 2").unwrap()), fin("(1)"));
        assert_eq!(nu.eval(&parse_poly(k, "12").unwrap()), fin("(2)"));
        let a = k.from_int(3);
        let sup = PolyValuation::monomial(k, a.clone(), Value::Inf);
        assert_eq!(sup.eval(&Poly::x_minus(k, &a)), Value::Inf);
        assert_eq!(sup.eval(&parse_poly(k, "x - 1").unwrap()), fin("(1)"));
    }

    #[test]
    fn truncation_examples() {
        let k = Field::Padic(2);
        let nu = PolyValuation::monomial(k, k.zero(), fin("(0)"));
        let q = parse_poly(k, "x - 1").unwrap();
        let aug = nu.truncate(&q, fin("(3)")).unwrap();
        let mono = PolyValuation::monomial(k, k.one(), fin("(3)"));
        for s in ["x^2 + 1", "x^3 - 3*x + 2", "4*x - 4", "x + 7"] {
            let f = parse_poly(k, s).unwrap();
            assert_eq!(aug.eval(&f), mono.eval(&f), "{s}");
        }
        assert_eq!(aug.eval(&q), fin("(3)"));
        assert!(matches!(nu.truncate(&q, fin("(0)")), Err(Error::NonMonotone { .. })));
    }

    #[test]
    fn level_examples() {
        let k = Field::Padic(2);
        let nu = PolyValuation::monomial(k, k.zero(), fin("(5/2)"));
        let l = nu.level(&Poly::x(k));
        assert_eq!(l, LevelData { epsilon: fin("(5/2)"), maximizers: vec![1] });
        assert_eq!(nu.level(&Poly::one(k)).epsilon, Value::NegInf);
    }

    #[test]
    fn level_on_sqrt17_truncation() {
        // a = 9 approximates sqrt(17) with v(a^2 - 17) = v(64) = 6; gamma = 5.
        let k = Field::Padic(2);
        let nu = PolyValuation::monomial(k, k.from_int(9), fin("(5)"));
        let f = parse_poly(k, "x^2 - 17").unwrap();
        assert_eq!(nu.eval(&f), fin("(6)"));
        assert_eq!(nu.level(&f), LevelData { epsilon: fin("(5)"), maximizers: vec![1] });
        let q = Poly::x_minus(k, &k.from_int(9));
        assert_eq!(nu.s_set(&q, &f).unwrap(), vec![0, 1]);
        assert_eq!(nu.nu_degree(&q, &f).unwrap(), (1, fin("(1)")));
        let np = nu.newton_polygon(&q, &f).unwrap();
        assert_eq!(np.cloud, vec![(0, g("(6)")), (1, g("(1)")), (2, g("(0)"))]);
        assert_eq!(np.hull, np.cloud);
        assert_eq!(np.support_line(&g("(5)")).unwrap().touching, vec![0, 1]);
    }

    #[test]
    fn hull_drops_interior_points() {
        let np = NewtonPolygon::new(vec![(0, g("(4)")), (1, g("(3)")), (2, g("(0)")), (3, g("(1)"))]);
        assert_eq!(np.hull, vec![(0, g("(4)")), (2, g("(0)")), (3, g("(1)"))]);
        assert!(np.to_tsv().contains("1\t3/1\tfalse"));
        assert!(np.to_svg(Some(&g("(2)"))).starts_with("<svg"));
    }

    #[test]
    fn key_test_degree_guard() {
        let k = Field::Padic(2);
        let nu = PolyValuation::monomial(k, k.zero(), fin("(1)"));
        let q = Poly::x(k);
        assert!(nu.is_key_polynomial(&q, &[Poly::one(k), Poly::constant(k, k.from_int(4))]).unwrap());
        assert!(matches!(nu.is_key_polynomial(&q, std::slice::from_ref(&q)), Err(Error::WitnessDegree { .. })));
    }
}
