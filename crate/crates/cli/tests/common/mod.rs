#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn model(name: &str) -> PathBuf {
    corpus().join(name)
}

/// Corpus models, sorted by file name.
pub fn models() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "orm"))
        .collect();
    out.sort();
    out
}

pub fn stem(p: &Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

pub struct Run {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orm2dlr"));
    cmd.args(args).env_remove("ORM2DLR_CEILING");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    Run {
        status: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

pub fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Models containing untranslatable constructs.
pub fn rejected(name: &str) -> bool {
    matches!(name, "ring" | "multirole")
}

/// Compare against a golden file; ORM2DLR_BLESS=1 rewrites it instead.
pub fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = corpus().join("golden").join(name);
    if std::env::var_os("ORM2DLR_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want == actual {
        Ok(())
    } else {
        Err(format!("{name} differs from golden:\n--- want\n{want}\n--- got\n{actual}"))
    }
}
