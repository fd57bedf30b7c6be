use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use keypoly::config::Config;
use keypoly::cuts;
use keypoly::limitfam::DEFAULT_HORIZON;
use keypoly::report;
use keypoly::{selftest, Error};

#[derive(Parser)]
#[command(name = "keypoly", version, about = "Limit key polynomial analysis over valued fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tree,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a family and a candidate polynomial from a TOML config.
    Analyze {
        config: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write SVG plots of the Newton polygons.
        #[arg(long)]
        svg: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Classify the built-in catalog of cuts.
    Cuts {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Newton polygon of the candidate with respect to one family member.
    Polygon {
        config: PathBuf,
        #[arg(long)]
        index: usize,
        /// Emit SVG instead of TSV.
        #[arg(long)]
        svg: bool,
    },
    /// Run the invariant suite over the built-in catalog.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
        /// Additional configs to check alongside the catalog.
        #[arg(long)]
        extra: Vec<PathBuf>,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Inconclusive(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn analyze(path: PathBuf, horizon: Option<usize>, out: PathBuf, svg: bool, format: Format) -> ExitCode {
    let mut cfg = match Config::load(&path) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(h) = horizon {
        cfg.horizon = h;
    }
    let run = match report::run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = report::write(&run, &out, svg) {
        return fail(&e);
    }
    match format {
        Format::Text => print!("{}", report::to_text(&run)),
        Format::Tree => println!("{}", serde_json::to_string_pretty(&report::to_json(&run)).expect("serializable")),
    }
    if !run.ok() {
        ExitCode::from(1)
    } else if matches!(run.pipeline, Some(Err(_))) {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn cuts_cmd(format: Format) -> ExitCode {
    let cat = cuts::catalog();
    match format {
        Format::Text => {
            for (name, c) in &cat {
                let vb = if c.is_vertically_bounded() { "VB" } else { "VU" };
                println!("{name:<30} {vb}  {:<28} H = {}", c.classify().to_string(), c.invariance_group());
            }
        }
        Format::Tree => {
            let rows: Vec<_> = cat
                .iter()
                .map(|(name, c)| {
                    json!({
                        "name": name,
                        "cut": c.to_string(),
                        "rank": c.rank(),
                        "classification": c.classify().to_string(),
                        "vertically_bounded": c.is_vertically_bounded(),
                        "invariance_group": c.invariance_group().to_string(),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("serializable"));
        }
    }
    ExitCode::SUCCESS
}

fn polygon(path: PathBuf, index: usize, svg: bool) -> ExitCode {
    let cfg = match Config::load(&path) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let res = cfg.family.member(index).and_then(|m| {
        let np = m.nu.newton_polygon(&m.q, &cfg.f)?;
        Ok(if svg { np.to_svg(Some(&m.gamma)) } else { np.to_tsv() })
    });
    match res {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn selftest_cmd(horizon: usize, extra: Vec<PathBuf>) -> ExitCode {
    let mut texts = Vec::new();
    for p in extra {
        match std::fs::read_to_string(&p) {
            Ok(t) => texts.push((p.display().to_string(), t)),
            Err(e) => return fail(&Error::Io(format!("{}: {e}", p.display()))),
        }
    }
    let suite = selftest::run(horizon, &texts);
    print!("{}", suite.text());
    if suite.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Analyze { config, horizon, out, svg, format } => analyze(config, horizon, out, svg, format),
        Command::Cuts { format } => cuts_cmd(format),
        Command::Polygon { config, index, svg } => polygon(config, index, svg),
        Command::Selftest { horizon, extra } => selftest_cmd(horizon, extra),
    }
}
