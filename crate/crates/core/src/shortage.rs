//! Material shortage detection.
//!
//! A task's full material demand is checked against stock before it is
//! produced. Any deficit is reported and then assumed to be supplied, so
//! planning continues as if the missing material had already arrived.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::domain::model::Product;
use crate::domain::plan::ShortageRecord;
use crate::ids::{MaterialId, TaskId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub task_id: TaskId,
    pub material_id: MaterialId,
    /// Quantity added by virtualization.
    pub credit: f64,
    pub debit: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MaterialLedger {
    pub initial: BTreeMap<MaterialId, f64>,
    pub stock: BTreeMap<MaterialId, f64>,
    /// Cumulative quantity assumed to be supplied after a shortage report.
    pub virtualized: BTreeMap<MaterialId, f64>,
    pub history: Vec<LedgerEntry>,
}

impl MaterialLedger {
    pub fn new(stock: BTreeMap<MaterialId, f64>) -> Self {
        Self { initial: stock.clone(), stock, virtualized: BTreeMap::new(), history: Vec::new() }
    }

    pub fn stock_of(&self, material: &MaterialId) -> f64 {
        self.stock.get(material).copied().unwrap_or(0.0)
    }

    /// Stock obtained by replaying `history` over `initial`.
    pub fn replay(&self) -> BTreeMap<MaterialId, f64> {
        let mut stock = self.initial.clone();
        for e in &self.history {
            *stock.entry(e.material_id.clone()).or_insert(0.0) += e.credit - e.debit;
        }
        stock
    }
}

/// Material demand of one task.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DemandSet {
    pub demands: BTreeMap<MaterialId, f64>,
}

impl DemandSet {
    /// Bill of materials scaled by the produced amount.
    pub fn for_product(product: &Product, amount: f64) -> Self {
        Self { demands: product.bom.iter().map(|(m, per_unit)| (m.clone(), per_unit * amount)).collect() }
    }
}

/// Reports every material whose demand exceeds stock, credits exactly the
/// deficit, then debits the full demand.
pub fn check_and_virtualize(
    task_id: &TaskId,
    demands: &DemandSet,
    ledger: &MaterialLedger,
) -> (Vec<ShortageRecord>, MaterialLedger) {
    let mut next = ledger.clone();
    let mut records = Vec::new();
    for (material, demand) in &demands.demands {
        if *demand <= 0.0 {
            continue;
        }
        let stock = next.stock_of(material);
        let lack = if *demand > stock { demand - stock } else { 0.0 };
        if lack > 0.0 {
            records.push(ShortageRecord { task_id: task_id.clone(), material_id: material.clone(), lack_amount: lack });
            *next.virtualized.entry(material.clone()).or_insert(0.0) += lack;
        }
        // stock + lack - demand, pinned to exactly zero when short
        let after = if lack > 0.0 { 0.0 } else { stock - demand };
        next.stock.insert(material.clone(), after);
        next.history.push(LedgerEntry {
            task_id: task_id.clone(),
            material_id: material.clone(),
            credit: lack,
            debit: *demand,
        });
    }
    (records, next)
}
