#![allow(dead_code)]

pub mod random;

use std::path::{Path, PathBuf};
use std::process::Command;

use mobplan::parse_plan;
use mobplan_core::domain::Action;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn mobplan(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_mobplan")).args(args).output().unwrap();
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// `plan` on a domain and problem from the fixtures directory.
pub fn plan_fixture(domain: &str, problem: &str, extra: &[&str]) -> Output {
    let (d, p) = (fixture(domain), fixture(problem));
    let mut args = vec!["plan", "--domain", d.to_str().unwrap(), "--problem", p.to_str().unwrap()];
    args.extend_from_slice(extra);
    mobplan(&args)
}

/// Reference plans print line ids with `I` or `1` in place of the leading
/// `l`; map those back before comparing.
pub fn canonical_line(id: &str) -> String {
    match id.strip_prefix(['I', '1']) {
        Some(rest) if id.len() == 4 && rest.starts_with("00") => format!("l{rest}"),
        _ => id.to_string(),
    }
}

fn numbers(a: &Action) -> Vec<f64> {
    match a {
        Action::Start { time, .. } | Action::Back { time, .. } => vec![*time],
        Action::Load { quantity, time, .. }
        | Action::Transport { quantity, time, .. }
        | Action::Unload { quantity, time, .. } => vec![*quantity, *time],
        Action::ResourceShortage { lack, .. } => vec![*lack],
    }
}

fn symbols(a: &Action) -> Vec<String> {
    match a {
        Action::Start { line, task, .. } => vec![canonical_line(line.as_str()), task.to_string()],
        Action::Load { vehicle, task, product, .. }
        | Action::Transport { vehicle, task, product, .. }
        | Action::Unload { vehicle, task, product, .. }
        | Action::Back { vehicle, task, product, .. } => {
            vec![vehicle.to_string(), task.to_string(), product.to_string()]
        }
        Action::ResourceShortage { task, material, .. } => vec![task.to_string(), material.to_string()],
    }
}

/// Step-by-step comparison of two plan texts: same keywords and ids in the
/// same order, every number within `tol`.
pub fn compare_plans(actual: &str, expected: &str, tol: f64) -> Result<(), String> {
    let a = parse_plan(actual).map_err(|e| format!("actual: {e}"))?;
    let e = parse_plan(expected).map_err(|e| format!("expected: {e}"))?;
    if a.steps.len() != e.steps.len() {
        return Err(format!("{} steps, expected {}", a.steps.len(), e.steps.len()));
    }
    for (x, y) in a.steps.iter().zip(&e.steps) {
        let n = y.index;
        if x.index != y.index {
            return Err(format!("step index {} where {} was expected", x.index, y.index));
        }
        if x.action.keyword() != y.action.keyword() || symbols(&x.action) != symbols(&y.action) {
            return Err(format!("step {n}: {:?} vs {:?}", x.action, y.action));
        }
        for (p, q) in numbers(&x.action).into_iter().zip(numbers(&y.action)) {
            if (p - q).abs() > tol {
                return Err(format!("step {n}: {p} vs {q}"));
            }
        }
    }
    if a.infeasible != e.infeasible {
        return Err(format!("infeasible records {:?} vs {:?}", a.infeasible, e.infeasible));
    }
    Ok(())
}
