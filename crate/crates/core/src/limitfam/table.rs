//! Coefficient values of a candidate along the family.

use crate::error::{param, Error, Result};
use crate::ordgroup::Value;
use crate::poly::Poly;

use super::family::{Family, Member};

/// `β_{i,ℓ} = ν_i(F_{i,ℓ})` for `i = 1..=horizon`, `ℓ = 0..=D`.
#[derive(Clone, Debug)]
pub struct BetaTable {
    pub horizon: usize,
    pub relative_degree: usize,
    /// `beta[i-1][ℓ]`.
    pub beta: Vec<Vec<Value>>,
    /// `terms[i-1][ℓ] = ν_i(F_{i,ℓ} Q_i^ℓ)`.
    pub terms: Vec<Vec<Value>>,
    pub nu_f: Vec<Value>,
    pub s_sets: Vec<Vec<usize>>,
    /// First index from which row `ℓ` is provably constant (degree-one certificate).
    pub certified_from: Vec<Option<usize>>,
}

impl BetaTable {
    pub fn beta(&self, i: usize, l: usize) -> &Value {
        &self.beta[i - 1][l]
    }

    pub fn row(&self, l: usize) -> Vec<Value> {
        self.beta.iter().map(|r| r[l].clone()).collect()
    }

    /// Whether row `ℓ` takes a single value on `from..=horizon`.
    pub fn constant_on(&self, l: usize, from: usize) -> bool {
        let row = self.row(l);
        row[from - 1..].windows(2).all(|w| w[0] == w[1])
    }

    /// First `i` such that row `ℓ` is constant on `i..=horizon`.
    pub fn observed_from(&self, l: usize) -> usize {
        let row = self.row(l);
        let mut i = row.len();
        while i > 1 && row[i - 2] == row[i - 1] {
            i -= 1;
        }
        i
    }
}

/// Builds the table from the `Q_i`-expansions, together with the degree-one
/// constancy certificates `S_{ν_i,Q_i}(∂_ℓ F) = {0}`.
pub fn beta_table(fam: &Family, f: &Poly, members: &[Member], horizon: usize) -> Result<BetaTable> {
    let m = fam.degree();
    if f.degree() < m {
        return Err(param("F", format!("degree {} is below the family degree {m}", f.degree())));
    }
    let big_d = f.degree() / m;
    let mut beta = Vec::with_capacity(horizon);
    let mut terms = Vec::with_capacity(horizon);
    let mut nu_f = Vec::with_capacity(horizon);
    let mut s_sets = Vec::with_capacity(horizon);
    for mem in &members[..horizon] {
        let exp = f.q_expansion(&mem.q)?;
        let row: Vec<Value> = (0..=big_d)
            .map(|l| exp.get(l).map_or(Value::Inf, |c| mem.nu.eval(c)))
            .collect();
        let tv: Vec<Value> = row
            .iter()
            .enumerate()
            .map(|(l, b)| if l == 0 { b.clone() } else { b.add(&Value::Fin(mem.gamma.scale_int(l as i64))) })
            .collect();
        let min = tv.iter().min().cloned().unwrap_or(Value::Inf);
        s_sets.push(tv.iter().enumerate().filter(|(_, v)| **v == min).map(|(l, _)| l).collect());
        nu_f.push(mem.nu.eval(f));
        beta.push(row);
        terms.push(tv);
    }
    let mut certified_from = vec![None; big_d + 1];
    if m == 1 {
        for (l, slot) in certified_from.iter_mut().enumerate().skip(1) {
            let dl = f.hasse(l);
            *slot = if dl.is_zero() {
                Some(1)
            } else {
                members[..horizon]
                    .iter()
                    .find(|mem| mem.nu.s_set(&mem.q, &dl).map(|s| s == [0]).unwrap_or(false))
                    .map(|mem| mem.index)
            };
        }
    }
    Ok(BetaTable { horizon, relative_degree: big_d, beta, terms, nu_f, s_sets, certified_from })
}

/// `β_{i,ℓ} = v((∂_ℓ F)(a_i))` for a degree-one family.
pub fn degree_one_taylor(fam: &Family, f: &Poly, horizon: usize) -> Result<Vec<Vec<Value>>> {
    if fam.degree() != 1 {
        return Err(Error::Precondition(format!("Taylor route needs degree one, family has degree {}", fam.degree())));
    }
    let k = fam.field();
    (1..=horizon)
        .map(|i| {
            let a = fam.center(i)?.expect("degree-one member");
            Ok(f.taylor_at(&a).iter().map(|c| k.valuation(c)).collect())
        })
        .collect()
}
