//! Line engagement and joint-finish production planning.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::heuristics::ranked_lines;
use super::model::{EnterpriseEnvironment, LinePolicy, MobilizationTask, ProductionLine};
use super::plan::{Action, InfeasibleReason, InfeasibleTaskRecord, ShortageRecord};
use super::state::{WorkerReservation, WorldState};
use crate::ids::{LineId, ProductId, TaskId};
use crate::shortage::{check_and_virtualize, DemandSet};
use crate::timeline::{ProductionSchedule, Segment};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineStart {
    pub line: LineId,
    pub start: f64,
    pub rate: f64,
}

/// Lines opened for one task, all stopping together at `finish`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Engagement {
    pub task_id: TaskId,
    pub product_id: ProductId,
    /// Engaged lines in efficiency order.
    pub lines: Vec<LineStart>,
    pub finish: f64,
}

impl Engagement {
    pub fn schedule(&self) -> ProductionSchedule {
        ProductionSchedule::new(
            self.lines
                .iter()
                .map(|l| Segment { line: l.line.clone(), start: l.start, end: self.finish, rate: l.rate })
                .collect(),
        )
    }

    pub fn label(&self) -> String {
        let mut s = String::new();
        for (i, l) in self.lines.iter().enumerate() {
            if i > 0 {
                s.push('+');
            }
            s.push_str(l.line.as_str());
        }
        s
    }
}

/// Instant `t` solving `Σ rate·max(0, t − start) = amount`.
pub fn joint_finish(starts: &[(f64, f64)], amount: f64) -> Option<f64> {
    let mut sorted: Vec<(f64, f64)> = starts.iter().copied().filter(|(_, r)| *r > 0.0).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rate = 0.0;
    let mut produced = 0.0;
    for (i, (start, r)) in sorted.iter().enumerate() {
        rate += r;
        let candidate = start + (amount - produced) / rate;
        match sorted.get(i + 1) {
            Some((next, _)) if candidate > *next => produced += rate * (next - start),
            _ => return Some(candidate),
        }
    }
    None
}

/// Engages `lines` for `task` from the state's line free times. Lines that
/// could only start after the joint finish are left out.
pub fn engage(
    task: &MobilizationTask,
    state: &WorldState,
    env: &EnterpriseEnvironment,
    lines: &[&ProductionLine],
) -> Option<Engagement> {
    let changeover = env.policy.changeover_hours;
    let starts: Vec<LineStart> = lines
        .iter()
        .filter_map(|l| {
            let cap = l.produces(&task.product_id)?;
            Some(LineStart {
                line: l.line_id.clone(),
                start: state.line_ready_at(&l.line_id, &task.product_id, changeover),
                rate: cap.rate,
            })
        })
        .collect();
    let pairs: Vec<(f64, f64)> = starts.iter().map(|l| (l.start, l.rate)).collect();
    let finish = joint_finish(&pairs, task.amount)?;
    let lines: Vec<LineStart> = starts.into_iter().filter(|l| l.start < finish - EPS).collect();
    if lines.is_empty() {
        return None;
    }
    Some(Engagement { task_id: task.task_id.clone(), product_id: task.product_id.clone(), lines, finish })
}

/// Candidate engagements for `task` under the line policy, with the score
/// used to order them (efficiency of the weakest engaged line).
pub fn engagement_options(
    task: &MobilizationTask,
    state: &WorldState,
    env: &EnterpriseEnvironment,
) -> Vec<(Engagement, f64)> {
    let ranked = ranked_lines(env, &task.product_id);
    let prefixes: Vec<usize> = match env.policy.line_policy {
        LinePolicy::AllCapable if !ranked.is_empty() => alloc::vec![ranked.len()],
        LinePolicy::AllCapable => Vec::new(),
        LinePolicy::GammaEscalation => (1..=ranked.len()).collect(),
    };
    let mut out: Vec<(Engagement, f64)> = Vec::new();
    for k in prefixes {
        let lines: Vec<&ProductionLine> = ranked[..k].iter().map(|(l, _)| *l).collect();
        let Some(e) = engage(task, state, env, &lines) else { continue };
        if out.last().is_some_and(|(prev, _)| prev.lines == e.lines) {
            continue;
        }
        out.push((e, ranked[k - 1].1));
    }
    out
}

/// Whether the engagement fits the remaining utility budgets and the worker pool.
pub fn resources_fit(engagement: &Engagement, state: &WorldState, env: &EnterpriseEnvironment) -> bool {
    let mut need = alloc::collections::BTreeMap::new();
    let mut extra = Vec::new();
    for l in &engagement.lines {
        let cap = &env.lines[&l.line].capability[&engagement.product_id];
        let hours = engagement.finish - l.start;
        for (u, draw) in &cap.utility_draw {
            *need.entry(u).or_insert(0.0) += draw * hours;
        }
        if cap.workers > 0.0 {
            extra.push(WorkerReservation {
                line: l.line.clone(),
                start: l.start,
                end: engagement.finish,
                workers: cap.workers,
            });
        }
    }
    let utilities_ok = need.iter().all(|(u, n)| {
        let left = state.utility_remaining.get(*u).copied().unwrap_or(0.0);
        *n <= left + EPS * n.max(1.0)
    });
    utilities_ok && state.peak_workers(&extra) <= env.worker_total + EPS
}

/// Debits the task's materials, reporting and virtualizing shortages.
pub fn secure_materials(
    task: &MobilizationTask,
    state: &WorldState,
    env: &EnterpriseEnvironment,
) -> (Vec<ShortageRecord>, WorldState) {
    let demand = DemandSet::for_product(&env.products[&task.product_id], task.amount);
    let (records, ledger) = check_and_virtualize(&task.task_id, &demand, &state.ledger);
    let mut next = state.clone();
    next.ledger = ledger;
    (records, next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductionOutcome {
    pub engagement: Engagement,
    /// Start actions in efficiency order.
    pub steps: Vec<Action>,
    pub shortages: Vec<ShortageRecord>,
    pub state: WorldState,
}

/// Plans the production half of a task on its own.
///
/// Under the all-capable policy every capable line is engaged; under
/// escalation the shortest efficiency-ordered prefix of lines finishing by
/// the deadline is used, or all lines when none does.
pub fn plan_production(
    task: &MobilizationTask,
    state: &WorldState,
    env: &EnterpriseEnvironment,
) -> Result<ProductionOutcome, InfeasibleTaskRecord> {
    let infeasible = |reason| InfeasibleTaskRecord { task_id: task.task_id.clone(), reason };
    let options = engagement_options(task, state, env);
    if options.is_empty() {
        return Err(infeasible(InfeasibleReason::NoCapability));
    }
    let fitting: Vec<&Engagement> = options.iter().map(|(e, _)| e).filter(|e| resources_fit(e, state, env)).collect();
    let engagement = fitting
        .iter()
        .find(|e| e.finish <= task.deadline)
        .or(fitting.last())
        .copied()
        .cloned()
        .ok_or_else(|| infeasible(InfeasibleReason::UtilityExhausted))?;

    let (shortages, mut next) = secure_materials(task, state, env);
    let mut steps = Vec::new();
    for l in &engagement.lines {
        next = next.with_line_started(env, &task.task_id, &task.product_id, &l.line, l.start, engagement.finish);
        steps.push(Action::Start { line: l.line.clone(), time: l.start, task: task.task_id.clone() });
    }
    Ok(ProductionOutcome { engagement, steps, shortages, state: next })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_finish_simultaneous_and_staggered() {
        assert_eq!(joint_finish(&[(0.0, 20.0), (0.0, 30.0)], 200.0), Some(4.0));
        let t = joint_finish(&[(0.0, 40.0), (2.5, 25.0)], 150.0).unwrap();
        assert!((t - 212.5 / 65.0).abs() < 1e-12);
        // The late line never contributes.
        assert_eq!(joint_finish(&[(0.0, 50.0), (5.0, 10.0)], 100.0), Some(2.0));
        assert_eq!(joint_finish(&[], 10.0), None);
    }
}
