//! Structured (JSON) and plain-text reports, Newton polygon plots.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value as Json};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::limitfam::{
    analyze, verify_minimality, vb_pipeline, vu_pipeline, FamilyAnalysis, MinimalityReport, Mode, Outcome,
    PipelineReport,
};
use crate::ordgroup::{GroupElement, Rat, Value};

/// Everything produced by one `analyze` run.
#[derive(Debug)]
pub struct Run {
    pub analysis: FamilyAnalysis,
    pub pipeline: Option<std::result::Result<PipelineReport, String>>,
    pub minimality: Option<MinimalityReport>,
    pub polygons: Vec<Polygon>,
}

#[derive(Debug)]
pub struct Polygon {
    pub index: usize,
    pub tsv: String,
    pub svg: String,
}

impl Run {
    /// Whether every executed theorem check passed.
    pub fn ok(&self) -> bool {
        let pipe = match &self.pipeline {
            Some(Ok(p)) => p.ok(),
            Some(Err(_)) | None => true,
        };
        pipe && self.minimality.as_ref().is_none_or(|m| m.ok()) && self.analysis.ladder.all()
    }
}

pub fn run(cfg: &Config) -> Result<Run> {
    let fam = &cfg.family;
    let fa = analyze(fam, &cfg.f, cfg.horizon)?;
    let exact = fa.mode == Mode::Exact;
    let pipeline = (cfg.pipelines.theorems && exact).then(|| {
        let r = if fa.vb { vb_pipeline(fam, &fa) } else { vu_pipeline(fam, &fa) };
        match r {
            Ok(p) => Ok(Ok(p)),
            Err(Error::Inconclusive(s)) => Ok(Err(s)),
            Err(e) => Err(e),
        }
    });
    let pipeline = pipeline.transpose()?;
    let minimality = (cfg.pipelines.minimality && exact).then(|| verify_minimality(fam, &fa)).transpose()?;
    let mut idx: BTreeSet<usize> = [1, fa.stable_index, fa.horizon].into_iter().collect();
    idx.retain(|i| *i >= 1 && *i <= fa.horizon);
    let polygons = idx
        .into_iter()
        .map(|i| {
            let mem = fam.member(i)?;
            let np = mem.nu.newton_polygon(&mem.q, &fa.f).or_else(|_| {
                // Infinite coefficients are dropped from the plot.
                let cloud = fa.table.beta[i - 1]
                    .iter()
                    .enumerate()
                    .filter_map(|(l, v)| v.fin().map(|g| (l, g.clone())))
                    .collect();
                Ok::<_, Error>(crate::valuation::NewtonPolygon::new(cloud))
            })?;
            Ok(Polygon { index: i, tsv: np.to_tsv(), svg: np.to_svg(Some(&mem.gamma)) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Run { analysis: fa, pipeline, minimality, polygons })
}

pub fn rat_str(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn group_str(g: &GroupElement) -> String {
    let c: Vec<String> = g.coords().iter().map(rat_str).collect();
    format!("({})", c.join(", "))
}

pub fn value_str(v: &Value) -> String {
    match v {
        Value::Fin(g) => group_str(g),
        Value::Inf => "inf".into(),
        Value::NegInf => "-inf".into(),
    }
}

fn set_json(s: &BTreeSet<usize>) -> Json {
    Json::from(s.iter().copied().collect::<Vec<_>>())
}

fn pipeline_json(p: &PipelineReport) -> Json {
    let anchors: Map<String, Json> = p.anchors.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let checks: Vec<Json> = p
        .checks
        .iter()
        .map(|c| {
            let (outcome, reason) = match &c.outcome {
                Outcome::Pass => ("pass", None),
                Outcome::Fail => ("fail", None),
                Outcome::Skipped(r) => ("skipped", Some(r.clone())),
            };
            json!({ "name": c.name, "outcome": outcome, "detail": c.detail, "reason": reason })
        })
        .collect();
    json!({ "kind": p.kind, "anchors": anchors, "checks": checks })
}

fn minimality_json(m: &MinimalityReport) -> Json {
    let nec: Vec<Json> = m
        .necessity
        .iter()
        .map(|n| {
            json!({
                "l": n.ell,
                "sampled": n.sampled,
                "necessary_at": n.necessary_at,
                "cofinal": n.cofinal,
                "for_all_tail": n.for_all_tail,
                "term_in_delta_lower": n.term_in_delta,
            })
        })
        .collect();
    let jd: Vec<Json> = m.j_drops_unstable.iter().map(|(k, u)| json!({ "l": k, "remains_unstable": u })).collect();
    json!({
        "necessity": nec,
        "j_drops": jd,
        "telescope_identity": m.telescope_identity,
        "flags": m.flags,
        "ok": m.ok(),
    })
}

pub fn to_json(r: &Run) -> Json {
    let fa = &r.analysis;
    let t = &fa.table;
    let table: Vec<Json> = (1..=t.horizon)
        .map(|i| {
            json!({
                "index": i,
                "gamma": group_str(&fa.levels[i - 1].gamma),
                "nu_F": value_str(&t.nu_f[i - 1]),
                "S": t.s_sets[i - 1],
                "beta": t.beta[i - 1].iter().map(value_str).collect::<Vec<_>>(),
                "terms": t.terms[i - 1].iter().map(value_str).collect::<Vec<_>>(),
            })
        })
        .collect();
    let levels: Vec<Json> = fa
        .levels
        .iter()
        .map(|l| json!({ "index": l.index, "epsilon": value_str(&l.epsilon), "I": l.maximizers }))
        .collect();
    let rows: Map<String, Json> = fa
        .row_stable_from
        .iter()
        .enumerate()
        .filter_map(|(l, i)| i.map(|i| (format!("{l:03}"), json!(i))))
        .collect();
    let lad = &fa.ladder;
    let sets = |s: &crate::limitfam::IndexSets| {
        json!({
            "B": set_json(&s.b),
            "Bct": set_json(&s.bct),
            "Bunb": set_json(&s.bunb),
            "J": set_json(&s.j),
            "unresolved": set_json(&s.unresolved),
        })
    };
    let pipeline = match &r.pipeline {
        Some(Ok(p)) => pipeline_json(p),
        Some(Err(s)) => json!({ "inconclusive": s }),
        None => Json::Null,
    };
    json!({
        "family": {
            "label": fa.label,
            "m": fa.m,
            "gamma_cut": fa.gamma_cut.to_string(),
            "classification": fa.gamma_cut.classify().to_string(),
            "invariance_group": fa.invariance.to_string(),
            "vertically_bounded": fa.vb,
            "p_position": format!("{:?}", fa.p_position),
        },
        "F": fa.f.to_string(),
        "D": fa.relative_degree,
        "horizon": fa.horizon,
        "mode": fa.mode.as_str(),
        "flags": fa.flags,
        "defect": { "d": fa.defect, "method": "stable relative degree", "beta_d": group_str(&fa.beta_d) },
        "s_infinity": fa.s_inf,
        "delta": fa.delta.to_string(),
        "sets": sets(&fa.sets),
        "heuristic_sets": sets(&fa.heuristic_sets),
        "beta_table": table,
        "levels": levels,
        "stabilization": { "rows": rows, "index": fa.stable_index },
        "ladder": {
            "from": lad.from,
            "maximizers_monotone": lad.maximizers_monotone,
            "tau_constant": lad.tau_constant,
            "epsilon_gamma_relation": lad.epsilon_gamma_relation,
            "degree_stable": lad.degree_stable,
            "beta_d_constant": lad.beta_d_constant,
            "s_set_is_0_d": lad.s_set_is_0_d,
        },
        "N_dD": fa.n_d_big_d.last().map(set_json),
        "N_dD_constant": fa.n_d_big_d.windows(2).all(|w| w[0] == w[1]),
        "minimal_lkp": { "index": fa.stable_index, "G": fa.minimal_lkp.to_string() },
        "pipeline": pipeline,
        "minimality": r.minimality.as_ref().map(minimality_json),
    })
}

fn fmt_set(s: &BTreeSet<usize>) -> String {
    let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

pub fn to_text(r: &Run) -> String {
    let fa = &r.analysis;
    let mut s = String::new();
    let _ = writeln!(s, "family      {}", fa.label);
    let _ = writeln!(s, "F           {}", fa.f);
    let _ = writeln!(s, "m, D        {}, {}", fa.m, fa.relative_degree);
    let _ = writeln!(s, "horizon     {} ({})", fa.horizon, fa.mode.as_str());
    let _ = writeln!(s, "gamma cut   {} [{}]", fa.gamma_cut, if fa.vb { "VB" } else { "VU" });
    let _ = writeln!(s, "H           {}", fa.invariance);
    let _ = writeln!(s, "delta       {}", fa.delta);
    let _ = writeln!(s, "d, s_inf    {}, {}", fa.defect, fa.s_inf);
    let _ = writeln!(s, "B           {}", fmt_set(&fa.sets.b));
    let _ = writeln!(s, "B^ct        {}", fmt_set(&fa.sets.bct));
    let _ = writeln!(s, "B^unb       {}", fmt_set(&fa.sets.bunb));
    let _ = writeln!(s, "J           {}", fmt_set(&fa.sets.j));
    let _ = writeln!(s, "stable from {}", fa.stable_index);
    let _ = writeln!(s, "minimal LKP {}", fa.minimal_lkp);
    let _ = writeln!(s, "ladder      {}", if fa.ladder.all() { "ok" } else { "VIOLATED" });
    match &r.pipeline {
        Some(Ok(p)) => {
            let _ = writeln!(s, "{} checks", p.kind);
            for c in &p.checks {
                let o = match &c.outcome {
                    Outcome::Pass => "pass".to_string(),
                    Outcome::Fail => "FAIL".to_string(),
                    Outcome::Skipped(why) => format!("skip ({why})"),
                };
                let _ = writeln!(s, "  {:<30} {o}  {}", c.name, c.detail);
            }
        }
        Some(Err(why)) => {
            let _ = writeln!(s, "theorem checks inconclusive: {why}");
        }
        None => {}
    }
    if let Some(m) = &r.minimality {
        let _ = writeln!(s, "minimality  {}", if m.ok() { "ok" } else { "VIOLATED" });
        for n in &m.necessity {
            let _ = writeln!(s, "  l={}  cofinal={}  all-tail={}", n.ell, n.cofinal, n.for_all_tail);
        }
    }
    for f in &fa.flags {
        let _ = writeln!(s, "flag: {f}");
    }
    s
}

/// Writes `report.json`, `report.txt` and `polygons/` under `out`.
pub fn write(r: &Run, out: &Path, svg: bool) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    std::fs::create_dir_all(out.join("polygons")).map_err(io)?;
    let json = serde_json::to_string_pretty(&to_json(r)).expect("serializable") + "\n";
    std::fs::write(out.join("report.json"), json).map_err(io)?;
    std::fs::write(out.join("report.txt"), to_text(r)).map_err(io)?;
    for p in &r.polygons {
        std::fs::write(out.join(format!("polygons/index{:03}.tsv", p.index)), &p.tsv).map_err(io)?;
        if svg {
            std::fs::write(out.join(format!("polygons/index{:03}.svg", p.index)), &p.svg).map_err(io)?;
        }
    }
    Ok(())
}
