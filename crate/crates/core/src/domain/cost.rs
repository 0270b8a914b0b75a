//! Reported cost of a task's plan segment.

use alloc::vec::Vec;

use super::model::{EnterpriseEnvironment, MobilizationTask};
use super::plan::{Action, PlanStep};
use super::production::joint_finish;

/// Line operating cost plus one trip cost per consignment. Operating hours
/// run from each line's start to the joint finish for the task amount.
pub fn plan_cost(task: &MobilizationTask, steps: &[PlanStep], env: &EnterpriseEnvironment) -> f64 {
    let mut starts = Vec::new();
    let mut trips = 0.0;
    for s in steps.iter().filter(|s| s.action.task() == &task.task_id) {
        match &s.action {
            Action::Start { line, time, .. } => {
                if let Some(cap) = env.lines.get(line).and_then(|l| l.produces(&task.product_id)) {
                    starts.push((*time, cap.rate, cap.cost_rate));
                }
            }
            Action::Load { vehicle, .. } => {
                trips += env.vehicles.get(vehicle).map_or(0.0, |v| v.trip_cost);
            }
            _ => {}
        }
    }
    let pairs: Vec<(f64, f64)> = starts.iter().map(|(s, r, _)| (*s, *r)).collect();
    let production = joint_finish(&pairs, task.amount)
        .map_or(0.0, |finish| starts.iter().map(|(s, _, cost)| cost * (finish - s).max(0.0)).sum());
    production + trips
}
