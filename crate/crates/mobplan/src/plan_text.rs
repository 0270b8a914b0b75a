//! Plan text: one `[n] (!action args…)` line per step.
//!
//! Argument order:
//!
//! ```text
//! [1] (!start l003 0.0 t001)                      line time task
//! [3] (!load c001 t001 p001 60.0 1.2)             vehicle task product quantity time
//! [6] (!back c001 t001 p001 5.0)                  vehicle task product time
//! [11] (!ResourceShortage t003 m001 100.0)        task material lack
//! ; infeasible t001 deadline
//! ```
//!
//! `transport` and `unload` take the same arguments as `load`. Numbers are
//! written with one decimal, ties to even. Lines starting with `;` are
//! comments, except the `; infeasible` records.

use std::fmt::Write as _;

use mobplan_core::domain::{Action, InfeasibleReason, InfeasibleTaskRecord, PlanStep};
use mobplan_core::Plan;

use crate::error::IoError;
use crate::number::fmt1;

pub fn render_action(a: &Action) -> String {
    match a {
        Action::Start { line, time, task } => format!("(!start {line} {} {task})", fmt1(*time)),
        Action::Load { vehicle, task, product, quantity, time }
        | Action::Transport { vehicle, task, product, quantity, time }
        | Action::Unload { vehicle, task, product, quantity, time } => {
            format!("(!{} {vehicle} {task} {product} {} {})", a.keyword(), fmt1(*quantity), fmt1(*time))
        }
        Action::Back { vehicle, task, product, time } => format!("(!back {vehicle} {task} {product} {})", fmt1(*time)),
        Action::ResourceShortage { task, material, lack } => {
            format!("(!ResourceShortage {task} {material} {})", fmt1(*lack))
        }
    }
}

pub fn render_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for s in &plan.steps {
        let _ = writeln!(out, "[{}] {}", s.index, render_action(&s.action));
    }
    for r in &plan.infeasible {
        let _ = writeln!(out, "; infeasible {} {}", r.task_id, r.reason.as_str());
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> IoError {
    IoError::PlanSyntax { line, message: message.into() }
}

fn number(line: usize, token: &str) -> Result<f64, IoError> {
    match token.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(syntax(line, format!("`{token}` is not a number"))),
    }
}

fn parse_step(n: usize, text: &str) -> Result<PlanStep, IoError> {
    let rest = text.strip_prefix('[').ok_or_else(|| syntax(n, "expected `[index]`"))?;
    let (index, rest) = rest.split_once(']').ok_or_else(|| syntax(n, "unclosed `[`"))?;
    let index: usize = index.trim().parse().map_err(|_| syntax(n, format!("bad step index `{index}`")))?;
    let body = rest
        .trim()
        .strip_prefix("(!")
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| syntax(n, "expected `(!action …)`"))?;
    let tokens: Vec<&str> = body.split_whitespace().collect();
    let (&keyword, args) = tokens.split_first().ok_or_else(|| syntax(n, "empty action"))?;
    let arity = match keyword {
        "start" | "ResourceShortage" => 3,
        "load" | "transport" | "unload" => 5,
        "back" => 4,
        _ => return Err(IoError::UnknownAction { line: n, keyword: keyword.to_string() }),
    };
    if args.len() != arity {
        return Err(syntax(n, format!("{keyword} takes {arity} arguments, found {}", args.len())));
    }
    let action = match keyword {
        "start" => Action::Start { line: args[0].into(), time: number(n, args[1])?, task: args[2].into() },
        "ResourceShortage" => {
            Action::ResourceShortage { task: args[0].into(), material: args[1].into(), lack: number(n, args[2])? }
        }
        "back" => Action::Back {
            vehicle: args[0].into(),
            task: args[1].into(),
            product: args[2].into(),
            time: number(n, args[3])?,
        },
        _ => {
            let (vehicle, task, product) = (args[0].into(), args[1].into(), args[2].into());
            let (quantity, time) = (number(n, args[3])?, number(n, args[4])?);
            match keyword {
                "load" => Action::Load { vehicle, task, product, quantity, time },
                "transport" => Action::Transport { vehicle, task, product, quantity, time },
                _ => Action::Unload { vehicle, task, product, quantity, time },
            }
        }
    };
    Ok(PlanStep { index, action })
}

pub fn parse_plan(text: &str) -> Result<Plan, IoError> {
    let mut plan = Plan::default();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix(';') {
            let words: Vec<&str> = comment.split_whitespace().collect();
            if let ["infeasible", task, reason] = words[..] {
                let reason = InfeasibleReason::parse(reason)
                    .ok_or_else(|| syntax(n, format!("unknown infeasibility reason `{reason}`")))?;
                plan.infeasible.push(InfeasibleTaskRecord { task_id: task.into(), reason });
            }
            continue;
        }
        plan.steps.push(parse_step(n, line)?);
    }
    Ok(plan)
}
