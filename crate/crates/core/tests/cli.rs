use std::f64::consts::FRAC_PI_2;
use std::process::{Command, Output};

use mzqfi::analytic::example_cat_f_max;

fn mzqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzqfi"))
        .args(args)
        .output()
        .expect("binary runs")
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    comments: Vec<String>,
}

impl Table {
    fn parse(out: &Output) -> Self {
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8(out.stdout.clone()).unwrap();
        let (comments, data): (Vec<&str>, Vec<&str>) =
            text.lines().partition(|l| l.starts_with('#'));
        let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
        Table {
            header: split(data[0]),
            rows: data[1..].iter().map(|l| split(l)).collect(),
            comments: comments.iter().map(|c| c.to_string()).collect(),
        }
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let k = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[k].parse().unwrap()).collect()
    }

    fn comment(&self, key: &str) -> String {
        let prefix = format!("# {key}: ");
        self.comments
            .iter()
            .find_map(|c| c.strip_prefix(&prefix))
            .unwrap_or_else(|| panic!("no `{key}` line"))
            .to_string()
    }
}

#[test]
fn qfi_of_coherent_and_fock() {
    let t = Table::parse(&mzqfi(&["qfi", "--a", "coherent:2i", "--b", "fock:3"]));
    assert!((t.col("f_numeric")[0] - 31.0).abs() < 31e-6);
    assert!((t.col("f_analytic")[0] - 31.0).abs() < 1e-9);
    let t = Table::parse(&mzqfi(&["qfi", "--a", "coherent:0", "--b", "fock:0"]));
    assert_eq!(t.col("f_numeric")[0], 0.0);
    let t = Table::parse(&mzqfi(&["qfi", "--a", "coherent:1", "--b", "cat+:1"]));
    assert!(t.col("rel_err")[0] < 1e-6);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| mzqfi(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["qfi", "--a", "coherent:1"]), 1);
    assert_eq!(code(&["qfi", "--a", "laser:1", "--b", "fock:1"]), 1);
    assert_eq!(code(&["heatmap", "--points", "1"]), 1);
    assert_eq!(code(&["loss-scan", "--b", "fock:2"]), 1);
    // cutoff far too small for |3>
    assert_eq!(
        code(&["qfi", "--a", "coherent:3", "--b", "fock:1", "--dim", "6"]),
        2
    );
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let args = [
            "pmc-scan",
            "--a",
            "coherent:1.5",
            "--b",
            "squeezed:0.6",
            "--scan",
            "phase-b",
            "--points",
            "40",
            "--seed",
            "9",
            "--out",
            "OUT",
        ];
        let args: Vec<&str> = args
            .iter()
            .map(|a| if *a == "OUT" { p } else { a })
            .collect();
        assert!(mzqfi(&args).status.success());
        std::fs::read(&path).unwrap()
    };
    let first = run("a.csv");
    // same flags, same bytes; only the --out path differs in the metadata
    let second = run("b.csv");
    let strip = |bytes: Vec<u8>| {
        String::from_utf8(bytes)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# args:"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(first), strip(second));
}

#[test]
fn phase_scan_footer() {
    let t = Table::parse(&mzqfi(&["pmc-scan", "--a", "coherent:2", "--b", "cat+:2"]));
    assert_eq!(t.rows.len(), 180);
    let argmax: f64 = t.comment("argmax_phi").parse().unwrap();
    assert!((argmax - FRAC_PI_2).abs() < 1e-12);
    assert_eq!(t.comment("argmax_residual"), "0.0");
    assert!(t.rows.iter().all(|r| r.last().unwrap() == "false"));

    let t = Table::parse(&mzqfi(&[
        "pmc-scan",
        "--scan",
        "lossy-phase",
        "--b",
        "cat+:1.5",
        "--loss-T",
        "0.8",
    ]));
    assert_eq!(t.comment("argmax_phi"), "0.0");
}

#[test]
fn loss_scan_rows() {
    let t = Table::parse(&mzqfi(&["loss-scan", "--b", "cat+:2", "--points", "41"]));
    let ts = t.col("T");
    let f = t.col("f_numeric");
    // T = 1 is the lossless matched value
    let last = f.len() - 1;
    assert_eq!(ts[last], 1.0);
    assert!((f[last] - example_cat_f_max(4.0, 2.0)).abs() < 1e-8 * f[last]);
    assert!(f.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    // grid row closest to the first-order crossing
    let rc: f64 = t.comment("r_critical").parse().unwrap();
    let crossing: f64 = t.comment("first_order_crossing_T").parse().unwrap();
    assert!((crossing - (1.0 - rc)).abs() <= 0.5 / 40.0 + 1e-12);
    let above = t
        .header
        .iter()
        .position(|h| h == "above_shot_noise")
        .unwrap();
    let n = t.col("N")[0];
    for (row, fv) in t.rows.iter().zip(&f) {
        assert_eq!(row[above] == "true", *fv > n);
    }
}

#[test]
fn heatmap_json() {
    let out = mzqfi(&["heatmap", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2500);
    assert_eq!(v["meta"]["command"], "heatmap");
    let diagonals = v["meta"]["summary"]["antidiagonal"].as_array().unwrap();
    assert_eq!(diagonals.len(), 98);
    for d in diagonals {
        if d["N"].as_f64().unwrap() >= 10.0 {
            assert!(d["cells_from_diagonal"].as_f64().unwrap() <= 1.0);
        }
    }
}
