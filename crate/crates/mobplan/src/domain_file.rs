//! Enterprise description file (JSON).
//!
//! ```json
//! {
//!   "site": "a1",
//!   "utilities": { "water": 80000 },
//!   "workers": 1000,
//!   "materials": { "m001": 10000 },
//!   "products": { "p001": { "bom": { "m001": 2 }, "load_rate": 50, "unload_rate": 50 } },
//!   "lines": { "l001": { "p001": { "rate": 20, "cost_rate": 10, "draws": { "water": 50 }, "workers": 30 } } },
//!   "vehicles": { "c001": { "speed": 70, "trip_cost": 50, "capacity": { "p001": 60 } } },
//!   "routes": { "a1": { "b1": 100 } },
//!   "policy": { "lines": "all-capable", "changeover_hours": 0.5 }
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use mobplan_core::domain::model::{Capability, Product, ProductionLine, Vehicle};
use mobplan_core::{EnterpriseEnvironment, PolicyConfig};
use serde::{Deserialize, Serialize};

use crate::error::{from_json, IoError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub site: String,
    pub utilities: BTreeMap<String, f64>,
    pub workers: f64,
    pub materials: BTreeMap<String, f64>,
    pub products: BTreeMap<String, ProductEntry>,
    pub lines: BTreeMap<String, BTreeMap<String, CapabilityEntry>>,
    pub vehicles: BTreeMap<String, VehicleEntry>,
    pub routes: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    pub policy: PolicyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub bom: BTreeMap<String, f64>,
    pub load_rate: f64,
    pub unload_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapabilityEntry {
    pub rate: f64,
    pub cost_rate: f64,
    #[serde(default)]
    pub draws: BTreeMap<String, f64>,
    #[serde(default)]
    pub workers: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleEntry {
    pub speed: f64,
    pub trip_cost: f64,
    pub capacity: BTreeMap<String, f64>,
}

fn keyed<K: Ord + for<'a> From<&'a str>, V: Clone>(m: &BTreeMap<String, V>) -> BTreeMap<K, V> {
    m.iter().map(|(k, v)| (K::from(k.as_str()), v.clone())).collect()
}

impl DomainFile {
    pub fn into_environment(self) -> Result<EnterpriseEnvironment, IoError> {
        let products = self
            .products
            .iter()
            .map(|(id, p)| {
                let product = Product {
                    product_id: id.as_str().into(),
                    bom: keyed(&p.bom),
                    load_rate: p.load_rate,
                    unload_rate: p.unload_rate,
                };
                (id.as_str().into(), product)
            })
            .collect();
        let lines = self
            .lines
            .iter()
            .map(|(id, caps)| {
                let capability = caps
                    .iter()
                    .map(|(p, c)| {
                        let cap = Capability {
                            rate: c.rate,
                            cost_rate: c.cost_rate,
                            utility_draw: keyed(&c.draws),
                            workers: c.workers,
                        };
                        (p.as_str().into(), cap)
                    })
                    .collect();
                (id.as_str().into(), ProductionLine { line_id: id.as_str().into(), capability })
            })
            .collect();
        let vehicles = self
            .vehicles
            .iter()
            .map(|(id, v)| {
                let vehicle = Vehicle {
                    vehicle_id: id.as_str().into(),
                    speed: v.speed,
                    capacity: keyed(&v.capacity),
                    trip_cost: v.trip_cost,
                };
                (id.as_str().into(), vehicle)
            })
            .collect();
        let env = EnterpriseEnvironment {
            site: self.site.as_str().into(),
            utility_totals: keyed(&self.utilities),
            worker_total: self.workers,
            material_stock: keyed(&self.materials),
            products,
            lines,
            vehicles,
            routes: self.routes.iter().map(|(s, d)| (s.as_str().into(), keyed(d))).collect(),
            policy: self.policy,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn from_environment(env: &EnterpriseEnvironment) -> Self {
        Self {
            site: env.site.to_string(),
            utilities: env.utility_totals.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            workers: env.worker_total,
            materials: env.material_stock.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            products: env
                .products
                .iter()
                .map(|(k, p)| {
                    let entry = ProductEntry {
                        bom: p.bom.iter().map(|(m, q)| (m.to_string(), *q)).collect(),
                        load_rate: p.load_rate,
                        unload_rate: p.unload_rate,
                    };
                    (k.to_string(), entry)
                })
                .collect(),
            lines: env
                .lines
                .iter()
                .map(|(k, l)| {
                    let caps = l
                        .capability
                        .iter()
                        .map(|(p, c)| {
                            let entry = CapabilityEntry {
                                rate: c.rate,
                                cost_rate: c.cost_rate,
                                draws: c.utility_draw.iter().map(|(u, d)| (u.to_string(), *d)).collect(),
                                workers: c.workers,
                            };
                            (p.to_string(), entry)
                        })
                        .collect();
                    (k.to_string(), caps)
                })
                .collect(),
            vehicles: env
                .vehicles
                .iter()
                .map(|(k, v)| {
                    let entry = VehicleEntry {
                        speed: v.speed,
                        trip_cost: v.trip_cost,
                        capacity: v.capacity.iter().map(|(p, c)| (p.to_string(), *c)).collect(),
                    };
                    (k.to_string(), entry)
                })
                .collect(),
            routes: env
                .routes
                .iter()
                .map(|(s, d)| (s.to_string(), d.iter().map(|(k, v)| (k.to_string(), *v)).collect()))
                .collect(),
            policy: env.policy,
        }
    }
}

pub fn parse_domain(text: &str) -> Result<EnterpriseEnvironment, IoError> {
    from_json::<DomainFile>("domain", text)?.into_environment()
}

pub fn read_domain(path: &Path) -> Result<EnterpriseEnvironment, IoError> {
    parse_domain(&crate::read_text(path)?)
}
