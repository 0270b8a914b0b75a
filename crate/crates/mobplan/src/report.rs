//! Human-readable and JSON renderings of validation reports and heuristic tables.

use std::fmt::Write as _;

use mobplan_core::domain::heuristics::{gamma_task, gamma_vehicle, ranked_lines};
use mobplan_core::htn::compare_scores_desc;
use mobplan_core::validator::{ValidationReport, Verdict};
use mobplan_core::{EnterpriseEnvironment, MobilizationTask};
use serde::Serialize;

use crate::number::fmt1;

pub fn render_report(report: &ValidationReport) -> String {
    let mut out = String::new();
    let verdict = match report.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    };
    let _ = writeln!(out, "verdict: {verdict}");
    for v in &report.violations {
        match v.step {
            Some(i) => {
                let _ = writeln!(out, "[{i}] {}: {}", v.rule, v.message);
            }
            None => {
                let _ = writeln!(out, "[-] {}: {}", v.rule, v.message);
            }
        }
    }
    for t in &report.tasks {
        if t.reported_infeasible {
            let _ = writeln!(out, "{}: reported infeasible", t.task_id);
            continue;
        }
        let arrival = t.last_arrival.map_or_else(|| "none".to_string(), fmt1);
        let margin = t.margin.map_or_else(|| "none".to_string(), fmt1);
        let _ = writeln!(
            out,
            "{}: delivered {} of {}, last arrival {arrival}, deadline {}, margin {margin}",
            t.task_id,
            fmt1(t.delivered),
            fmt1(t.amount),
            fmt1(t.deadline),
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRank {
    pub task_id: String,
    pub product_id: String,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineRank {
    pub product_id: String,
    pub line_id: String,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleRank {
    pub vehicle_id: String,
    pub gamma: f64,
}

/// Efficiency ratios in the order the planner tries them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inspection {
    pub tasks: Vec<TaskRank>,
    pub lines: Vec<LineRank>,
    pub vehicles: Vec<VehicleRank>,
}

pub fn inspect(env: &EnterpriseEnvironment, tasks: &[MobilizationTask]) -> Inspection {
    let mut task_ranks: Vec<TaskRank> = tasks
        .iter()
        .map(|t| TaskRank {
            task_id: t.task_id.to_string(),
            product_id: t.product_id.to_string(),
            gamma: gamma_task(t),
        })
        .collect();
    task_ranks.sort_by(|a, b| compare_scores_desc(a.gamma, b.gamma).then_with(|| a.task_id.cmp(&b.task_id)));

    let lines = env
        .products
        .keys()
        .flat_map(|p| {
            ranked_lines(env, p).into_iter().map(move |(l, g)| LineRank {
                product_id: p.to_string(),
                line_id: l.line_id.to_string(),
                gamma: g,
            })
        })
        .collect();

    let mut vehicles: Vec<VehicleRank> = env
        .vehicles
        .values()
        .map(|v| VehicleRank { vehicle_id: v.vehicle_id.to_string(), gamma: gamma_vehicle(v) })
        .collect();
    vehicles.sort_by(|a, b| compare_scores_desc(a.gamma, b.gamma).then_with(|| a.vehicle_id.cmp(&b.vehicle_id)));

    Inspection { tasks: task_ranks, lines, vehicles }
}

pub fn render_inspection(i: &Inspection) -> String {
    let mut out = String::from("tasks (amount/deadline)\n");
    for t in &i.tasks {
        let _ = writeln!(out, "  {} {} {:.2}", t.task_id, t.product_id, t.gamma);
    }
    out.push_str("lines (rate/cost rate)\n");
    for l in &i.lines {
        let _ = writeln!(out, "  {} {} {:.2}", l.product_id, l.line_id, l.gamma);
    }
    out.push_str("vehicles (speed/trip cost)\n");
    for v in &i.vehicles {
        let _ = writeln!(out, "  {} {:.2}", v.vehicle_id, v.gamma);
    }
    out
}
