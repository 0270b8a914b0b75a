//! Efficiency ratios used to order every choice the planner makes.

use alloc::vec::Vec;

use thiserror::Error;

use super::model::{EnterpriseEnvironment, MobilizationTask, ProductionLine, Vehicle};
use crate::htn::compare_scores_desc;
use crate::ids::{LineId, ProductId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line} cannot produce {product}")]
pub struct CapabilityError {
    pub line: LineId,
    pub product: ProductId,
}

/// Urgency of a task: amount per hour of deadline.
pub fn gamma_task(task: &MobilizationTask) -> f64 {
    task.amount / task.deadline
}

/// Output per unit cost of a line on a product.
pub fn gamma_line(line: &ProductionLine, product: &ProductId) -> Result<f64, CapabilityError> {
    line.produces(product)
        .map(|c| c.rate / c.cost_rate)
        .ok_or_else(|| CapabilityError { line: line.line_id.clone(), product: product.clone() })
}

/// Speed per unit trip cost.
pub fn gamma_vehicle(vehicle: &Vehicle) -> f64 {
    vehicle.speed / vehicle.trip_cost
}

/// Lines able to make `product`, best ratio first, ties by id.
pub fn ranked_lines<'a>(env: &'a EnterpriseEnvironment, product: &ProductId) -> Vec<(&'a ProductionLine, f64)> {
    let mut out: Vec<_> = env.lines.values().filter_map(|l| gamma_line(l, product).ok().map(|g| (l, g))).collect();
    out.sort_by(|(la, ga), (lb, gb)| compare_scores_desc(*ga, *gb).then_with(|| la.line_id.cmp(&lb.line_id)));
    out
}

/// Vehicles able to carry `product`, best ratio first, ties by id.
pub fn ranked_vehicles<'a>(env: &'a EnterpriseEnvironment, product: &ProductId) -> Vec<&'a Vehicle> {
    let mut out: Vec<_> = env.capable_vehicles(product).collect();
    out.sort_by(|a, b| {
        compare_scores_desc(gamma_vehicle(a), gamma_vehicle(b)).then_with(|| a.vehicle_id.cmp(&b.vehicle_id))
    });
    out
}
