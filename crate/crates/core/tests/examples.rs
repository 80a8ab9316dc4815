//! Runs every example binary that `cargo test` built alongside this target.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: &[&str] = &[
    "renyi_divergence",
    "pfr_sampling",
    "index_pmf",
    "bound_sweep",
    "campbell_cost",
    "moment_checks",
    "figure_svg",
    "deterministic_batches",
];

fn examples_dir() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?.join("examples");
    dir.is_dir().then_some(dir)
}

#[test]
fn examples_run_cleanly() {
    let Some(dir) = examples_dir() else {
        eprintln!("examples directory not found; skipping");
        return;
    };
    for name in EXAMPLES {
        let path = dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
        if !path.is_file() {
            eprintln!("{name} not built; skipping");
            continue;
        }
        let out = Command::new(&path).output().expect("spawn example");
        assert!(
            out.status.success(),
            "{name} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}
