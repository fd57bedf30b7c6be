//! Classification of expansion indices, defect, stable level data and the
//! minimal limit key polynomial.

use std::collections::BTreeSet;

use crate::cuts::CutDescriptor;
use crate::error::{Error, Result};
use crate::ordgroup::{ConvexSubgroup, GroupElement, Rat, Value};
use crate::poly::Poly;

use super::family::{Family, Member, PPosition};
use super::table::{beta_table, degree_one_taylor, BetaTable};

pub const DEFAULT_HORIZON: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Row constancy proved by certificates and membership decided by closed-form cuts.
    Exact,
    /// Conclusions read off the finite horizon.
    Heuristic,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Heuristic => "horizon-heuristic",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexSets {
    pub b: BTreeSet<usize>,
    pub bct: BTreeSet<usize>,
    pub bunb: BTreeSet<usize>,
    pub j: BTreeSet<usize>,
    /// Indices of `B` that are neither constant nor unbounded within the horizon.
    pub unresolved: BTreeSet<usize>,
}

/// Per-index level data of the family members.
#[derive(Clone, Debug)]
pub struct LevelRow {
    pub index: usize,
    pub gamma: GroupElement,
    pub epsilon: Value,
    pub maximizers: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Ladder {
    /// Start of the stabilized range.
    pub from: usize,
    pub maximizers_monotone: bool,
    pub tau_constant: bool,
    pub epsilon_gamma_relation: bool,
    pub degree_stable: bool,
    pub beta_d_constant: bool,
    pub s_set_is_0_d: bool,
}

impl Ladder {
    pub fn all(&self) -> bool {
        self.maximizers_monotone
            && self.tau_constant
            && self.epsilon_gamma_relation
            && self.degree_stable
            && self.beta_d_constant
            && self.s_set_is_0_d
    }
}

#[derive(Clone, Debug)]
pub struct FamilyAnalysis {
    pub label: String,
    pub f: Poly,
    pub m: usize,
    pub relative_degree: usize,
    pub horizon: usize,
    pub mode: Mode,
    pub flags: Vec<String>,
    pub table: BetaTable,
    pub gamma_cut: CutDescriptor,
    pub delta: CutDescriptor,
    pub invariance: ConvexSubgroup,
    pub vb: bool,
    pub p_position: PPosition,
    pub defect: usize,
    pub beta_d: GroupElement,
    pub s_inf: usize,
    pub levels: Vec<LevelRow>,
    pub sets: IndexSets,
    /// Exact-mode sets recomputed by the horizon heuristic.
    pub heuristic_sets: IndexSets,
    /// Stabilization index per `ℓ` (row constancy), `None` for `ℓ = 0` and `J`.
    pub row_stable_from: Vec<Option<usize>>,
    pub stable_index: usize,
    pub ladder: Ladder,
    pub n_d_big_d: Vec<BTreeSet<usize>>,
    pub minimal_lkp: Poly,
    pub gamma_min: GroupElement,
}

/// Members `1..=n`, stopping at the end of a finite family.
pub fn members(fam: &Family, n: usize) -> Result<Vec<Member>> {
    (1..=n.min(fam.max_index())).map(|i| fam.member(i)).collect()
}

fn term_in_delta(delta: &CutDescriptor, x: &GroupElement, flags: &mut Vec<String>, l: usize) -> bool {
    let direct = delta.in_lower(x);
    if let Some(sub) = CutDescriptor::principal_plus(x.clone()).lower_subset(delta) {
        if sub != direct {
            flags.push(format!("membership routes disagree at l={l}"));
        }
    }
    direct
}

/// `x` is the maximum of `δ^L`.
fn is_max_of_lower(delta: &CutDescriptor, x: &GroupElement) -> bool {
    matches!(delta, CutDescriptor::Ball { a, h, plus: true } if h.is_trivial() && a == x)
}

/// Classification using row certificates and the closed-form `δ`.
fn classify_exact(
    table: &BetaTable,
    delta: &CutDescriptor,
    gamma_min: &GroupElement,
    flags: &mut Vec<String>,
) -> IndexSets {
    let mut s = IndexSets::default();
    s.b.insert(0);
    s.bunb.insert(0);
    for l in 1..=table.relative_degree {
        let from = table.certified_from[l].expect("certified row");
        match table.beta(from, l) {
            Value::Fin(beta) => {
                let x = beta + &gamma_min.scale_int(l as i64);
                if term_in_delta(delta, &x, flags, l) {
                    s.b.insert(l);
                    if is_max_of_lower(delta, &x) {
                        s.bunb.insert(l);
                    } else {
                        s.bct.insert(l);
                    }
                } else {
                    s.j.insert(l);
                }
            }
            _ => {
                s.j.insert(l);
            }
        }
    }
    s
}

/// Classification read off the horizon: the values `ν_j(F)` stand in for `δ^L`.
fn classify_heuristic(table: &BetaTable, gamma_min: &GroupElement, tail: usize) -> IndexSets {
    let h = table.horizon;
    let finite_nu: Vec<&GroupElement> = table.nu_f.iter().filter_map(Value::fin).collect();
    let top = finite_nu.last().cloned();
    let in_l = |x: &GroupElement| top.is_some_and(|t| x <= t);
    let mut s = IndexSets::default();
    s.b.insert(0);
    s.bunb.insert(0);
    for l in 1..=table.relative_degree {
        let shift = gamma_min.scale_int(l as i64);
        if table.constant_on(l, tail) {
            match table.beta(h, l) {
                Value::Fin(beta) if in_l(&(beta + &shift)) => {
                    s.b.insert(l);
                    s.bct.insert(l);
                }
                _ => {
                    s.j.insert(l);
                }
            }
            continue;
        }
        match table.beta(h, l) {
            Value::Fin(beta) => {
                let x = beta + &shift;
                let early: Vec<_> = finite_nu.iter().take((h / 2).max(1)).collect();
                if !in_l(&x) {
                    s.j.insert(l);
                } else if early.iter().all(|v| x >= ***v) {
                    s.b.insert(l);
                    s.bunb.insert(l);
                } else {
                    s.b.insert(l);
                    s.unresolved.insert(l);
                }
            }
            _ => {
                s.j.insert(l);
            }
        }
    }
    s
}

fn all_equal<T: PartialEq>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

pub fn analyze(fam: &Family, f: &Poly, horizon: usize) -> Result<FamilyAnalysis> {
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if horizon == 0 {
        return Err(Error::Inconclusive("horizon must be positive".into()));
    }
    if horizon >= fam.max_index() && !fam.is_finite() {
        return Err(crate::error::param("horizon", format!("at most {} for this family", fam.max_index() - 1)));
    }
    let mut flags = Vec::new();
    let h = horizon.min(fam.max_index());
    if h < horizon {
        flags.push(format!("finite family: horizon truncated to {h}"));
    }
    let m = fam.degree();
    if !f.degree().is_multiple_of(m) {
        flags.push(format!("deg F = {} is not a multiple of m = {m}", f.degree()));
    }
    let tail = h / 2 + 1;
    if h + 1 - tail < 2 {
        return Err(Error::Inconclusive(format!("horizon {h} leaves fewer than two tail indices")));
    }
    let mems = members(fam, h + 1)?;
    let table = beta_table(fam, f, &mems, h)?;
    if fam.degree() == 1 {
        let tay = degree_one_taylor(fam, f, h)?;
        if tay != table.beta {
            return Err(Error::Precondition("Taylor and expansion routes disagree".into()));
        }
    }
    if !table.nu_f.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Precondition("F is stable along the family (ν_i(F) stops increasing)".into()));
    }
    let big_d = table.relative_degree;

    // Stable relative degree and the value of its coefficient.
    let degs: Vec<usize> = table.s_sets[tail - 1..].iter().map(|s| *s.last().unwrap()).collect();
    if !all_equal(&degs) {
        return Err(Error::Inconclusive(format!("relative degree not stable over the tail: {degs:?}")));
    }
    let d = degs[0];
    let bd: Vec<Value> = table.row(d)[tail - 1..].to_vec();
    if !all_equal(&bd) {
        return Err(Error::Inconclusive("coefficient value at the stable degree keeps moving".into()));
    }
    let beta_d = bd[0].fin().cloned().ok_or_else(|| Error::Precondition("coefficient at the stable degree vanishes".into()))?;

    // Level data of the members against the largest available valuation.
    let reference = &mems.last().unwrap().nu;
    let levels: Vec<LevelRow> = mems[..h]
        .iter()
        .map(|mem| {
            let lv = reference.level(&mem.q);
            LevelRow { index: mem.index, gamma: mem.gamma.clone(), epsilon: lv.epsilon, maximizers: lv.maximizers }
        })
        .collect();
    let tail_i: Vec<&Vec<usize>> = levels[tail - 1..].iter().map(|r| &r.maximizers).collect();
    if !all_equal(&tail_i) || tail_i[0].len() != 1 {
        return Err(Error::Inconclusive(format!("maximizer set not a stable singleton: {:?}", tail_i.last())));
    }
    let s_inf = tail_i[0][0];

    let gamma_cut = fam.gamma_cut();
    let delta = gamma_cut.scale_shift(d as i64, &beta_d)?;
    for (i, v) in table.nu_f.iter().enumerate() {
        if let Value::Fin(g) = v {
            if !delta.in_lower(g) {
                flags.push(format!("ν_{}(F) = {g} outside the lower set of δ", i + 1));
            }
        }
    }
    let gamma_min = mems[0].gamma.clone();

    let certified = (1..=big_d).all(|l| table.certified_from[l].is_some());
    let heuristic_sets = classify_heuristic(&table, &gamma_min, tail);
    let (mode, sets) = if fam.is_exact_catalog() {
        if !certified {
            let l = (1..=big_d).find(|l| table.certified_from[*l].is_none()).unwrap();
            return Err(Error::Inconclusive(format!("row {l} not certified constant within the horizon")));
        }
        let s = classify_exact(&table, &delta, &gamma_min, &mut flags);
        if s != heuristic_sets {
            flags.push("horizon heuristic disagrees with the exact classification".into());
        }
        (Mode::Exact, s)
    } else {
        flags.push(format!("{}: classification is horizon-heuristic", if fam.is_finite() { "finite family" } else { "no certificates" }));
        (Mode::Heuristic, heuristic_sets.clone())
    };

    let row_stable_from: Vec<Option<usize>> = (0..=big_d)
        .map(|l| {
            if !sets.bct.contains(&l) {
                None
            } else if mode == Mode::Exact {
                table.certified_from[l]
            } else {
                Some(table.observed_from(l))
            }
        })
        .collect();
    for (l, from) in row_stable_from.iter().enumerate() {
        if let Some(i) = from {
            if !table.constant_on(l, *i) {
                return Err(Error::Precondition(format!("row {l} moves after its certificate index {i}")));
            }
        }
    }

    // Index past which degree, S-set and maximizers are stable.
    let mut ladder_from = h;
    while ladder_from > 1 {
        let i = ladder_from - 1;
        let ok = table.s_sets[i - 1] == [0, d] && levels[i - 1].maximizers == [s_inf] && table.beta(i, d) == &bd[0];
        if !ok {
            break;
        }
        ladder_from = i;
    }
    let stable_index = row_stable_from.iter().flatten().copied().chain([ladder_from]).max().unwrap();
    let ladder = stability_ladder(&table, &levels, d, s_inf, stable_index);

    let n_d_big_d = (stable_index..=h)
        .map(|i| {
            let cloud: Vec<(usize, GroupElement)> = table.beta[i - 1]
                .iter()
                .enumerate()
                .filter_map(|(l, v)| v.fin().map(|g| (l, g.clone())))
                .collect();
            let np = crate::valuation::NewtonPolygon::new(cloud);
            (d..=big_d).filter(|k| np.on_hull(*k)).collect()
        })
        .collect();

    let mut fa = FamilyAnalysis {
        label: fam.label(),
        f: f.clone(),
        m,
        relative_degree: big_d,
        horizon: h,
        mode,
        flags,
        table,
        invariance: gamma_cut.invariance_group(),
        vb: gamma_cut.is_vertically_bounded(),
        gamma_cut,
        delta,
        p_position: fam.p_position(),
        defect: d,
        beta_d,
        s_inf,
        levels,
        sets,
        heuristic_sets,
        row_stable_from,
        stable_index,
        ladder,
        n_d_big_d,
        minimal_lkp: f.clone(),
        gamma_min,
    };
    fa.minimal_lkp = minimal_lkp(fam, &fa, stable_index)?;
    Ok(fa)
}

fn stability_ladder(table: &BetaTable, levels: &[LevelRow], d: usize, s: usize, from: usize) -> Ladder {
    let h = table.horizon;
    let mut maximizers_monotone = true;
    for i in 0..h {
        for j in i + 1..h {
            let (a, b) = (&levels[i].maximizers, &levels[j].maximizers);
            if let (Some(lo), Some(hi)) = (a.iter().min(), b.iter().max()) {
                maximizers_monotone &= lo >= hi;
            }
        }
    }
    let inv_s = Rat::new(1.into(), (s as i64).into());
    let tail = &levels[from - 1..];
    let tau: Vec<Option<GroupElement>> = tail
        .iter()
        .map(|r| r.epsilon.fin().map(|e| &r.gamma - &e.scale_int(s as i64)))
        .collect();
    let tau_constant = tau.iter().all(Option::is_some) && all_equal(&tau);
    let mut epsilon_gamma_relation = true;
    for a in tail {
        for b in tail {
            if let (Value::Fin(ea), Value::Fin(eb)) = (&a.epsilon, &b.epsilon) {
                epsilon_gamma_relation &= eb - ea == (&b.gamma - &a.gamma).scale(&inv_s);
            } else {
                epsilon_gamma_relation = false;
            }
        }
    }
    let degree_stable = table.s_sets[from - 1..].iter().all(|s| s.last() == Some(&d));
    let beta_d_constant = table.constant_on(d, from);
    let s_set_is_0_d = table.s_sets[from - 1..].iter().all(|s| *s == [0, d]);
    Ladder { from, maximizers_monotone, tau_constant, epsilon_gamma_relation, degree_stable, beta_d_constant, s_set_is_0_d }
}

/// `Σ_{ℓ∈B} F_{i,ℓ} Q_i^ℓ`, defined once every row has stabilized.
pub fn minimal_lkp(fam: &Family, fa: &FamilyAnalysis, i: usize) -> Result<Poly> {
    if i < fa.stable_index {
        return Err(Error::IndexTooSmall { i, need: fa.stable_index });
    }
    let q = fam.key(i)?;
    let exp = fa.f.q_expansion(&q)?;
    let mut g = Poly::zero(fam.field());
    for l in &fa.sets.b {
        if let Some(c) = exp.get(*l) {
            g = g.add(&c.mul(&q.pow(*l as u32)));
        }
    }
    if g.degree() != fa.f.degree() || !g.is_monic() {
        return Err(Error::Precondition("extracted polynomial lost the leading term".into()));
    }
    Ok(g)
}
