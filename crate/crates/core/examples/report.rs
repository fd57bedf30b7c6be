//! Build a report from inline TOML and print the JSON tree.

use keypoly::config::Config;
use keypoly::report;

const CONFIG: &str = r#"
horizon = 12
F = "x^2 - x - t^(-1)"

[family]
kind = "monomial_telescope"
p = 2
"#;

fn main() -> keypoly::Result<()> {
    let cfg = Config::from_toml(CONFIG)?;
    let run = report::run(&cfg)?;
    print!("{}", report::to_text(&run));
    let tree = report::to_json(&run);
    println!("B = {}", tree["sets"]["B"]);
    println!("polygons: {:?}", run.polygons.iter().map(|p| p.index).collect::<Vec<_>>());
    Ok(())
}
