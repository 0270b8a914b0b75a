//! Event arithmetic for production pools and vehicle round trips.
//!
//! A task's output is one shared pool fed by every engaged line. Vehicles
//! claim consignments by cumulative quantity: a consignment can be loaded as
//! soon as the pool has produced everything claimed up to and including it.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::model::{Product, Vehicle};
use crate::ids::{LineId, ProductId, TaskId, VehicleId};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimelineError {
    #[error("{requested} units requested but the schedule only produces {total}")]
    QuantityExceedsProduction { requested: f64, total: f64 },
    #[error("{vehicle} carries at most {capacity} of {product}, asked for {quantity}")]
    CapacityExceeded { vehicle: VehicleId, product: ProductId, quantity: f64, capacity: f64 },
    #[error("{vehicle} cannot carry {product}")]
    NotCapable { vehicle: VehicleId, product: ProductId },
    #[error("consignment quantity must be positive, got {0}")]
    NonPositiveQuantity(f64),
    #[error("vehicle pool is empty")]
    EmptyPool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub line: LineId,
    pub start: f64,
    pub end: f64,
    pub rate: f64,
}

impl Segment {
    pub fn output(&self) -> f64 {
        self.rate * (self.end - self.start)
    }
}

/// Piecewise-linear cumulative output of one task's production pool.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProductionSchedule {
    pub segments: Vec<Segment>,
    pub total: f64,
}

impl ProductionSchedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        let total = segments.iter().map(Segment::output).sum();
        Self { segments, total }
    }

    pub fn push(&mut self, segment: Segment) {
        self.total += segment.output();
        self.segments.push(segment);
    }

    /// Cumulative output at instant `t`.
    pub fn produced_by(&self, t: f64) -> f64 {
        self.segments.iter().map(|s| s.rate * (t.min(s.end) - s.start).max(0.0)).sum()
    }

    /// Earliest instant at which cumulative output reaches `quantity`.
    pub fn available_at(&self, quantity: f64) -> Result<f64, TimelineError> {
        if quantity <= 0.0 {
            return Ok(0.0);
        }
        let tol = EPS * quantity.max(1.0);
        if quantity > self.total + tol {
            return Err(TimelineError::QuantityExceedsProduction { requested: quantity, total: self.total });
        }
        let mut marks: Vec<f64> = self.segments.iter().flat_map(|s| [s.start, s.end]).collect();
        marks.sort_by(f64::total_cmp);
        marks.dedup();

        let mut cum = 0.0;
        for w in marks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let rate: f64 = self.segments.iter().filter(|s| s.start <= a && s.end >= b).map(|s| s.rate).sum();
            let next = cum + rate * (b - a);
            if rate > 0.0 && next >= quantity - tol {
                return Ok((a + (quantity - cum) / rate).clamp(a, b));
            }
            cum = next;
        }
        Ok(marks.last().copied().unwrap_or(0.0))
    }
}

/// One vehicle round trip; every field after `quantity` is an action start time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripSchedule {
    pub vehicle_id: VehicleId,
    pub task_id: TaskId,
    pub product_id: ProductId,
    pub quantity: f64,
    pub load_start: f64,
    pub transport_start: f64,
    pub unload_start: f64,
    pub back_start: f64,
    pub return_at: f64,
}

pub fn schedule_trip(
    vehicle: &Vehicle,
    product: &Product,
    task: &TaskId,
    quantity: f64,
    inventory_ready: f64,
    vehicle_free: f64,
    distance: f64,
) -> Result<TripSchedule, TimelineError> {
    if quantity <= 0.0 {
        return Err(TimelineError::NonPositiveQuantity(quantity));
    }
    let capacity = vehicle.capacity_for(&product.product_id).ok_or_else(|| TimelineError::NotCapable {
        vehicle: vehicle.vehicle_id.clone(),
        product: product.product_id.clone(),
    })?;
    if quantity > capacity + EPS {
        return Err(TimelineError::CapacityExceeded {
            vehicle: vehicle.vehicle_id.clone(),
            product: product.product_id.clone(),
            quantity,
            capacity,
        });
    }
    let drive = distance / vehicle.speed;
    let load_start = inventory_ready.max(vehicle_free);
    let transport_start = load_start + quantity / product.load_rate;
    let unload_start = transport_start + drive;
    let back_start = unload_start + quantity / product.unload_rate;
    Ok(TripSchedule {
        vehicle_id: vehicle.vehicle_id.clone(),
        task_id: task.clone(),
        product_id: product.product_id.clone(),
        quantity,
        load_start,
        transport_start,
        unload_start,
        back_start,
        return_at: back_start + drive,
    })
}

/// A vehicle offered to the dispatcher together with the instant it becomes idle.
#[derive(Debug, Clone, Copy)]
pub struct PoolMember<'a> {
    pub vehicle: &'a Vehicle,
    pub free_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dispatch {
    /// Trips in claim order.
    pub trips: Vec<TripSchedule>,
    /// Latest unload start.
    pub last_arrival: f64,
}

impl Dispatch {
    /// Latest instant at which a consignment finishes unloading.
    pub fn last_unload_complete(&self) -> f64 {
        self.trips.iter().map(|t| t.back_start).fold(0.0, f64::max)
    }
}

/// Claim-queue dispatch: the earliest idle vehicle (pool order on ties)
/// claims the next `min(capacity, remaining)` units of the pool and loads
/// them once they exist.
pub fn simulate_dispatch(
    pool: &[PoolMember<'_>],
    schedule: &ProductionSchedule,
    total: f64,
    distance: f64,
    product: &Product,
    task: &TaskId,
) -> Result<Dispatch, TimelineError> {
    if pool.is_empty() {
        return Err(TimelineError::EmptyPool);
    }
    if total <= 0.0 {
        return Err(TimelineError::NonPositiveQuantity(total));
    }
    let mut capacities = Vec::with_capacity(pool.len());
    for m in pool {
        let cap = m.vehicle.capacity_for(&product.product_id).ok_or_else(|| TimelineError::NotCapable {
            vehicle: m.vehicle.vehicle_id.clone(),
            product: product.product_id.clone(),
        })?;
        capacities.push(cap);
    }
    let mut free: Vec<f64> = pool.iter().map(|m| m.free_at).collect();
    let mut trips = Vec::new();
    let mut remaining = total;
    let mut claimed = 0.0;
    while remaining > EPS * total.max(1.0) {
        let idx =
            (0..pool.len()).min_by(|&a, &b| free[a].total_cmp(&free[b]).then(a.cmp(&b))).expect("pool is non-empty");
        let quantity = capacities[idx].min(remaining);
        claimed += quantity;
        remaining -= quantity;
        let ready = schedule.available_at(claimed)?;
        let trip = schedule_trip(pool[idx].vehicle, product, task, quantity, ready, free[idx], distance)?;
        free[idx] = trip.return_at;
        trips.push(trip);
    }
    let last_arrival = trips.iter().map(|t| t.unload_start).fold(0.0, f64::max);
    Ok(Dispatch { trips, last_arrival })
}
