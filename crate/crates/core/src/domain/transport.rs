//! Vehicle pool escalation.

use alloc::string::String;
use alloc::vec::Vec;

use super::heuristics::{gamma_vehicle, ranked_vehicles};
use super::model::{DeadlineCheck, EnterpriseEnvironment, MobilizationTask, Vehicle};
use super::plan::{Action, InfeasibleReason, InfeasibleTaskRecord};
use super::state::{Cargo, CargoStage, WorldState};
use crate::ids::VehicleId;
use crate::timeline::{simulate_dispatch, Dispatch, PoolMember, ProductionSchedule, TimelineError, TripSchedule};

const EPS: f64 = 1e-9;

/// Capable vehicles in efficiency order; candidate pools are its prefixes.
pub fn pool_order<'e>(task: &MobilizationTask, env: &'e EnterpriseEnvironment) -> Vec<&'e Vehicle> {
    ranked_vehicles(env, &task.product_id)
}

pub fn dispatch_pool(
    task: &MobilizationTask,
    state: &WorldState,
    env: &EnterpriseEnvironment,
    schedule: &ProductionSchedule,
    pool: &[&Vehicle],
) -> Result<Dispatch, TimelineError> {
    let members: Vec<PoolMember<'_>> =
        pool.iter().map(|v| PoolMember { vehicle: v, free_at: state.vehicle_free(&v.vehicle_id) }).collect();
    let distance = env.distance_to(&task.destination).unwrap_or(f64::INFINITY);
    simulate_dispatch(&members, schedule, task.amount, distance, &env.products[&task.product_id], &task.task_id)
}

pub fn meets_deadline(dispatch: &Dispatch, task: &MobilizationTask, check: DeadlineCheck) -> bool {
    let judged = match check {
        DeadlineCheck::Arrival => dispatch.last_arrival,
        DeadlineCheck::UnloadComplete => dispatch.last_unload_complete(),
    };
    judged <= task.deadline + EPS
}

/// Score of a pool prefix: the efficiency of its last (weakest) member.
pub fn pool_score(pool: &[&Vehicle]) -> f64 {
    pool.last().map(|v| gamma_vehicle(v)).unwrap_or(0.0)
}

pub fn pool_label(pool: &[&Vehicle]) -> String {
    let mut s = String::new();
    for (i, v) in pool.iter().enumerate() {
        if i > 0 {
            s.push('+');
        }
        s.push_str(v.vehicle_id.as_str());
    }
    s
}

/// Applies every stage of a round trip to the state.
pub fn apply_trip(state: &WorldState, trip: &TripSchedule) -> WorldState {
    let cargo = Cargo {
        task: trip.task_id.clone(),
        product: trip.product_id.clone(),
        quantity: trip.quantity,
        stage: CargoStage::Loaded,
    };
    state
        .with_loaded(&trip.vehicle_id, cargo, trip.transport_start)
        .with_stage(&trip.vehicle_id, CargoStage::InTransit, trip.unload_start)
        .with_stage(&trip.vehicle_id, CargoStage::Unloaded, trip.back_start)
        .with_returned(&trip.vehicle_id, trip.return_at)
}

pub fn trip_actions(trip: &TripSchedule) -> [Action; 4] {
    let (v, t, p, q) = (&trip.vehicle_id, &trip.task_id, &trip.product_id, trip.quantity);
    [
        Action::Load { vehicle: v.clone(), task: t.clone(), product: p.clone(), quantity: q, time: trip.load_start },
        Action::Transport {
            vehicle: v.clone(),
            task: t.clone(),
            product: p.clone(),
            quantity: q,
            time: trip.transport_start,
        },
        Action::Unload {
            vehicle: v.clone(),
            task: t.clone(),
            product: p.clone(),
            quantity: q,
            time: trip.unload_start,
        },
        Action::Back { vehicle: v.clone(), task: t.clone(), product: p.clone(), time: trip.back_start },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportOutcome {
    pub pool: Vec<VehicleId>,
    pub dispatch: Dispatch,
    pub steps: Vec<Action>,
    pub state: WorldState,
}

/// Grows the vehicle pool one efficiency-ranked vehicle at a time until the
/// simulated dispatch meets the deadline. Needs the task's production pool in
/// `state`.
pub fn plan_transport(
    task: &MobilizationTask,
    state: &WorldState,
    env: &EnterpriseEnvironment,
) -> Result<TransportOutcome, InfeasibleTaskRecord> {
    let late = InfeasibleTaskRecord { task_id: task.task_id.clone(), reason: InfeasibleReason::Deadline };
    let Some(schedule) = state.streams.get(&task.task_id) else {
        return Err(late);
    };
    let order = pool_order(task, env);
    for k in 1..=order.len() {
        let pool = &order[..k];
        let Ok(dispatch) = dispatch_pool(task, state, env, schedule, pool) else { continue };
        if !meets_deadline(&dispatch, task, env.policy.deadline_check) {
            continue;
        }
        let mut next = state.clone();
        let mut steps = Vec::new();
        for trip in &dispatch.trips {
            next = apply_trip(&next, trip);
            steps.extend(trip_actions(trip));
        }
        return Ok(TransportOutcome {
            pool: pool.iter().map(|v| v.vehicle_id.clone()).collect(),
            dispatch,
            steps,
            state: next,
        });
    }
    Err(late)
}
