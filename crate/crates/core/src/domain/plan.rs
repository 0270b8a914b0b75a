//! Plan output: timestamped actions plus the shortage and infeasibility report.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ids::{LineId, MaterialId, ProductId, TaskId, VehicleId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Start {
        line: LineId,
        time: f64,
        task: TaskId,
    },
    Load {
        vehicle: VehicleId,
        task: TaskId,
        product: ProductId,
        quantity: f64,
        time: f64,
    },
    Transport {
        vehicle: VehicleId,
        task: TaskId,
        product: ProductId,
        quantity: f64,
        time: f64,
    },
    Unload {
        vehicle: VehicleId,
        task: TaskId,
        product: ProductId,
        quantity: f64,
        time: f64,
    },
    Back {
        vehicle: VehicleId,
        task: TaskId,
        product: ProductId,
        time: f64,
    },
    #[serde(rename = "ResourceShortage")]
    ResourceShortage {
        task: TaskId,
        material: MaterialId,
        lack: f64,
    },
}

impl Action {
    pub fn keyword(&self) -> &'static str {
        match self {
            Action::Start { .. } => "start",
            Action::Load { .. } => "load",
            Action::Transport { .. } => "transport",
            Action::Unload { .. } => "unload",
            Action::Back { .. } => "back",
            Action::ResourceShortage { .. } => "ResourceShortage",
        }
    }

    pub fn task(&self) -> &TaskId {
        match self {
            Action::Start { task, .. }
            | Action::Load { task, .. }
            | Action::Transport { task, .. }
            | Action::Unload { task, .. }
            | Action::Back { task, .. }
            | Action::ResourceShortage { task, .. } => task,
        }
    }

    pub fn time(&self) -> Option<f64> {
        match self {
            Action::Start { time, .. }
            | Action::Load { time, .. }
            | Action::Transport { time, .. }
            | Action::Unload { time, .. }
            | Action::Back { time, .. } => Some(*time),
            Action::ResourceShortage { .. } => None,
        }
    }

    pub fn vehicle(&self) -> Option<&VehicleId> {
        match self {
            Action::Load { vehicle, .. }
            | Action::Transport { vehicle, .. }
            | Action::Unload { vehicle, .. }
            | Action::Back { vehicle, .. } => Some(vehicle),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    /// 1-based position in generation order.
    pub index: usize,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortageRecord {
    pub task_id: TaskId,
    pub material_id: MaterialId,
    pub lack_amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfeasibleReason {
    Deadline,
    NoCapability,
    UtilityExhausted,
}

impl InfeasibleReason {
    pub fn as_str(self) -> &'static str {
        match self {
            InfeasibleReason::Deadline => "deadline",
            InfeasibleReason::NoCapability => "no-capability",
            InfeasibleReason::UtilityExhausted => "utility-exhausted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "deadline" => Some(InfeasibleReason::Deadline),
            "no-capability" => Some(InfeasibleReason::NoCapability),
            "utility-exhausted" => Some(InfeasibleReason::UtilityExhausted),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfeasibleTaskRecord {
    pub task_id: TaskId,
    pub reason: InfeasibleReason,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub infeasible: Vec<InfeasibleTaskRecord>,
}

impl Plan {
    /// Numbers `actions` from 1 in the order given.
    pub fn from_actions(actions: impl IntoIterator<Item = Action>, infeasible: Vec<InfeasibleTaskRecord>) -> Self {
        let steps = actions.into_iter().enumerate().map(|(i, action)| PlanStep { index: i + 1, action }).collect();
        Self { steps, infeasible }
    }

    pub fn shortages(&self) -> Vec<ShortageRecord> {
        self.steps
            .iter()
            .filter_map(|s| match &s.action {
                Action::ResourceShortage { task, material, lack } => {
                    Some(ShortageRecord { task_id: task.clone(), material_id: material.clone(), lack_amount: *lack })
                }
                _ => None,
            })
            .collect()
    }

    pub fn steps_for<'a>(&'a self, task: &'a TaskId) -> impl Iterator<Item = &'a PlanStep> + 'a {
        self.steps.iter().filter(move |s| s.action.task() == task)
    }

    pub fn is_infeasible(&self, task: &TaskId) -> bool {
        self.infeasible.iter().any(|r| &r.task_id == task)
    }
}
