use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn keypoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keypoly")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(name).display().to_string()
}

fn out_dir(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&p);
    p.display().to_string()
}

#[test]
fn analyze_sqrt17_writes_report() {
    let out = out_dir("cli-sqrt17");
    let o = keypoly(&["analyze", &config("configs/sqrt17.toml"), "--out", &out, "--svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("B           {0, 1, 2}"), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(&out).join("report.json")).unwrap()).unwrap();
    assert_eq!(json["sets"]["B"], serde_json::json!([0, 1, 2]));
    assert_eq!(json["sets"]["J"], serde_json::json!([]));
    assert_eq!(json["beta_table"][0]["gamma"], "(3/1)");
    let tsv = std::fs::read_to_string(Path::new(&out).join("polygons/index001.tsv")).unwrap();
    assert_eq!(tsv.lines().next(), Some("l\tvalue\ton_hull"));
    assert!(Path::new(&out).join("polygons/index020.svg").exists());
}

#[test]
fn short_horizon_is_inconclusive() {
    let o = keypoly(&["analyze", &config("configs/telescope2.toml"), "--horizon", "1", "--out", &out_dir("cli-h1")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inconclusive"));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = out_dir("cli-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        ("horizn = 3\n[family]\nkind = \"monomial_telescope\"\np = 2\n", "horizn"),
        ("[family]\nkind = \"padic_approx\"\np = 2\nradicand = 3\n", "family.radicand"),
        ("F = \"x^2 +\"\n[family]\nkind = \"padic_approx\"\np = 2\nradicand = 17\n", "`F`"),
    ];
    for (i, (text, key)) in cases.iter().enumerate() {
        let path = Path::new(&dir).join(format!("bad{i}.toml"));
        std::fs::write(&path, text).unwrap();
        let o = keypoly(&["analyze", path.to_str().unwrap(), "--out", &dir]);
        assert_eq!(o.status.code(), Some(1));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(key), "{err}");
    }
    let o = keypoly(&["analyze", &config("tests/fixtures/corrupted_gamma.toml"), "--out", &dir]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("family.entries[1].gamma"));
}

#[test]
fn selftest_exit_codes() {
    let o = keypoly(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = keypoly(&["selftest", "--horizon", "6", "--extra", &config("tests/fixtures/corrupted_gamma.toml")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn cuts_and_polygon() {
    let o = keypoly(&["cuts", "--format", "tree"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rows.as_array().unwrap().len() >= 10);

    let o = keypoly(&["polygon", &config("configs/telescope2.toml"), "--index", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let tsv = String::from_utf8(o.stdout).unwrap();
    assert!(tsv.contains("0\t-1/8\ttrue"), "{tsv}");
    assert!(tsv.contains("2\t0/1\ttrue"), "{tsv}");
    let o = keypoly(&["polygon", &config("configs/telescope2.toml"), "--index", "3", "--svg"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("<svg"));
}
