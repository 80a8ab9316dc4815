//! Regression of the figure CSVs against committed golden files.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files after an intended change.

use std::path::PathBuf;
use std::process::Command;

const CELL_TOL: f64 = 1e-6;

struct Case {
    file: &'static str,
    args: &'static [&'static str],
}

const CASES: &[Case] = &[
    Case {
        file: "sweep_gauss_mu1.csv",
        args: &["sweep", "normal:0,1", "normal:1,1"],
    },
    Case {
        file: "sweep_gauss_mu5.csv",
        args: &["sweep", "normal:0,1", "normal:5,1"],
    },
    Case {
        file: "sweep_gauss_mu10.csv",
        args: &["sweep", "normal:0,1", "normal:10,1"],
    },
    Case {
        file: "entropy_gauss_mu1.csv",
        args: &["entropy-figure", "normal:0,1", "normal:1,1"],
    },
    Case {
        file: "sweep_laplace_theta1.csv",
        args: &["sweep", "laplace:0,1", "laplace:1,1"],
    },
    Case {
        file: "sweep_laplace_theta5.csv",
        args: &["sweep", "laplace:0,1", "laplace:5,1"],
    },
    Case {
        file: "sweep_laplace_theta10.csv",
        args: &["sweep", "laplace:0,1", "laplace:10,1"],
    },
];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn render(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_pfr"))
        .args(args)
        .output()
        .expect("spawn pfr");
    assert!(
        out.status.success(),
        "pfr {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8")
}

fn cell_matches(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => (x - y).abs() <= CELL_TOL,
        _ => false,
    }
}

fn compare(name: &str, got: &str, want: &str) {
    let got: Vec<&str> = got.lines().collect();
    let want: Vec<&str> = want.lines().collect();
    assert_eq!(got.len(), want.len(), "{name}: row count");
    assert_eq!(got[0], want[0], "{name}: header");
    for (row, (g, w)) in got.iter().zip(&want).enumerate().skip(1) {
        let gc: Vec<&str> = g.split(',').collect();
        let wc: Vec<&str> = w.split(',').collect();
        assert_eq!(gc.len(), wc.len(), "{name} row {row}: column count");
        for (col, (a, b)) in gc.iter().zip(&wc).enumerate() {
            assert!(cell_matches(a, b), "{name} row {row} col {col}: {a} vs golden {b}");
        }
    }
}

#[test]
fn figure_csvs_match_golden() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for case in CASES {
        let path = golden_dir().join(case.file);
        let got = render(case.args);
        if update {
            std::fs::write(&path, &got).expect("write golden");
            continue;
        }
        let want = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", path.display()));
        compare(case.file, &got, &want);
    }
}

#[test]
fn tolerance_rejects_real_drift() {
    assert!(cell_matches("1.0000001", "1.0"));
    assert!(!cell_matches("1.00001", "1.0"));
    assert!(cell_matches("inf", "inf"));
    assert!(!cell_matches("", "1.0"));
}
