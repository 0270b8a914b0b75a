//! Mutable planning state.
//!
//! States are plain values. Every effect function returns a fresh copy and
//! leaves its input untouched, so a choice point can retry from the exact
//! state it saw.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::model::EnterpriseEnvironment;
use crate::htn::{Fingerprint, Fnv64};
use crate::ids::{LineId, ProductId, TaskId, UtilityId, VehicleId};
use crate::shortage::MaterialLedger;
use crate::timeline::{ProductionSchedule, Segment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerReservation {
    pub line: LineId,
    pub start: f64,
    pub end: f64,
    pub workers: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CargoStage {
    Loaded,
    InTransit,
    Unloaded,
}

/// Consignment currently on a vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cargo {
    pub task: TaskId,
    pub product: ProductId,
    pub quantity: f64,
    pub stage: CargoStage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub ledger: MaterialLedger,
    pub utility_remaining: BTreeMap<UtilityId, f64>,
    pub worker_reservations: Vec<WorkerReservation>,
    pub line_free_at: BTreeMap<LineId, f64>,
    pub line_last_product: BTreeMap<LineId, ProductId>,
    /// For a vehicle on a trip: the instant its current stage ends.
    pub vehicle_free_at: BTreeMap<VehicleId, f64>,
    pub cargo: BTreeMap<VehicleId, Cargo>,
    /// Production pool of each task.
    pub streams: BTreeMap<TaskId, ProductionSchedule>,
    /// Quantity of each task's pool already claimed by loads.
    pub claimed: BTreeMap<TaskId, f64>,
    pub delivered: BTreeMap<TaskId, f64>,
}

impl WorldState {
    pub fn initial(env: &EnterpriseEnvironment) -> Self {
        Self {
            ledger: MaterialLedger::new(env.material_stock.clone()),
            utility_remaining: env.utility_totals.clone(),
            worker_reservations: Vec::new(),
            line_free_at: env.lines.keys().map(|l| (l.clone(), 0.0)).collect(),
            line_last_product: BTreeMap::new(),
            vehicle_free_at: env.vehicles.keys().map(|v| (v.clone(), 0.0)).collect(),
            cargo: BTreeMap::new(),
            streams: BTreeMap::new(),
            claimed: BTreeMap::new(),
            delivered: BTreeMap::new(),
        }
    }

    pub fn line_free(&self, line: &LineId) -> f64 {
        self.line_free_at.get(line).copied().unwrap_or(0.0)
    }

    pub fn vehicle_free(&self, vehicle: &VehicleId) -> f64 {
        self.vehicle_free_at.get(vehicle).copied().unwrap_or(0.0)
    }

    pub fn claimed_of(&self, task: &TaskId) -> f64 {
        self.claimed.get(task).copied().unwrap_or(0.0)
    }

    /// Earliest instant `line` can start on `product`, including changeover
    /// when it last produced something else.
    pub fn line_ready_at(&self, line: &LineId, product: &ProductId, changeover: f64) -> f64 {
        let free = self.line_free(line);
        match self.line_last_product.get(line) {
            Some(last) if last != product => free + changeover,
            _ => free,
        }
    }

    /// Largest number of workers simultaneously reserved once `extra` is added.
    pub fn peak_workers(&self, extra: &[WorkerReservation]) -> f64 {
        let all: Vec<&WorkerReservation> = self.worker_reservations.iter().chain(extra).collect();
        all.iter()
            .map(|probe| {
                all.iter().filter(|r| r.start <= probe.start && probe.start < r.end).map(|r| r.workers).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Opens `line` for `task` from `start` until `finish`.
    pub fn with_line_started(
        &self,
        env: &EnterpriseEnvironment,
        task: &TaskId,
        product: &ProductId,
        line: &LineId,
        start: f64,
        finish: f64,
    ) -> Self {
        let mut next = self.clone();
        let cap = &env.lines[line].capability[product];
        let hours = finish - start;
        for (u, draw) in &cap.utility_draw {
            *next.utility_remaining.entry(u.clone()).or_insert(0.0) -= draw * hours;
        }
        if cap.workers > 0.0 {
            next.worker_reservations.push(WorkerReservation {
                line: line.clone(),
                start,
                end: finish,
                workers: cap.workers,
            });
        }
        next.line_free_at.insert(line.clone(), finish);
        next.line_last_product.insert(line.clone(), product.clone());
        next.streams.entry(task.clone()).or_default().push(Segment {
            line: line.clone(),
            start,
            end: finish,
            rate: cap.rate,
        });
        next
    }

    pub fn with_loaded(&self, vehicle: &VehicleId, cargo: Cargo, loaded_at: f64) -> Self {
        let mut next = self.clone();
        *next.claimed.entry(cargo.task.clone()).or_insert(0.0) += cargo.quantity;
        next.vehicle_free_at.insert(vehicle.clone(), loaded_at);
        next.cargo.insert(vehicle.clone(), cargo);
        next
    }

    /// Advances a loaded vehicle's cargo to `stage`, busy until `until`.
    pub fn with_stage(&self, vehicle: &VehicleId, stage: CargoStage, until: f64) -> Self {
        let mut next = self.clone();
        if let Some(c) = next.cargo.get_mut(vehicle) {
            if stage == CargoStage::Unloaded {
                *next.delivered.entry(c.task.clone()).or_insert(0.0) += c.quantity;
            }
            c.stage = stage;
        }
        next.vehicle_free_at.insert(vehicle.clone(), until);
        next
    }

    pub fn with_returned(&self, vehicle: &VehicleId, at: f64) -> Self {
        let mut next = self.clone();
        next.cargo.remove(vehicle);
        next.vehicle_free_at.insert(vehicle.clone(), at);
        next
    }
}

fn hash_f64<H: Hasher>(x: f64, h: &mut H) {
    x.to_bits().hash(h);
}

impl Fingerprint for WorldState {
    fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::default();
        for (map, tag) in [(&self.ledger.stock, 0u8), (&self.ledger.virtualized, 1)] {
            tag.hash(&mut h);
            for (k, v) in map {
                k.hash(&mut h);
                hash_f64(*v, &mut h);
            }
        }
        self.ledger.history.len().hash(&mut h);
        for (k, v) in &self.utility_remaining {
            k.hash(&mut h);
            hash_f64(*v, &mut h);
        }
        for r in &self.worker_reservations {
            r.line.hash(&mut h);
            hash_f64(r.start, &mut h);
            hash_f64(r.end, &mut h);
            hash_f64(r.workers, &mut h);
        }
        for (k, v) in &self.line_free_at {
            k.hash(&mut h);
            hash_f64(*v, &mut h);
        }
        self.line_last_product.hash(&mut h);
        for (k, v) in &self.vehicle_free_at {
            k.hash(&mut h);
            hash_f64(*v, &mut h);
        }
        for (k, c) in &self.cargo {
            k.hash(&mut h);
            c.task.hash(&mut h);
            c.product.hash(&mut h);
            hash_f64(c.quantity, &mut h);
            c.stage.hash(&mut h);
        }
        for (k, s) in &self.streams {
            k.hash(&mut h);
            for seg in &s.segments {
                seg.line.hash(&mut h);
                hash_f64(seg.start, &mut h);
                hash_f64(seg.end, &mut h);
                hash_f64(seg.rate, &mut h);
            }
        }
        for map in [&self.claimed, &self.delivered] {
            for (k, v) in map {
                k.hash(&mut h);
                hash_f64(*v, &mut h);
            }
        }
        h.finish()
    }
}
