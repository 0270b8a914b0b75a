#![allow(dead_code)]

pub mod random;

use std::collections::BTreeMap;

use mobplan_core::domain::model::{Capability, Product, ProductionLine, Vehicle};
use mobplan_core::{EnterpriseEnvironment, MobilizationTask, PolicyConfig};

fn map<K: From<&'static str> + Ord, V>(pairs: &[(&'static str, V)]) -> BTreeMap<K, V>
where
    V: Clone,
{
    pairs.iter().map(|(k, v)| (K::from(*k), v.clone())).collect()
}

fn cap(rate: f64, cost_rate: f64, water: f64, power: f64, steam: f64, workers: f64) -> Capability {
    Capability {
        rate,
        cost_rate,
        utility_draw: map(&[("water", water), ("electricity", power), ("steam", steam)]),
        workers,
    }
}

fn vehicle(id: &'static str, speed: f64, trip_cost: f64, capacity: &[(&'static str, f64)]) -> (&'static str, Vehicle) {
    (id, Vehicle { vehicle_id: id.into(), speed, capacity: map(capacity), trip_cost })
}

/// The worked-example enterprise with the replication vehicle costs.
pub fn reference_env() -> EnterpriseEnvironment {
    let products = [
        (
            "p001",
            Product {
                product_id: "p001".into(),
                bom: map(&[("m001", 2.0), ("m002", 3.0), ("m003", 5.0)]),
                load_rate: 50.0,
                unload_rate: 50.0,
            },
        ),
        (
            "p002",
            Product {
                product_id: "p002".into(),
                bom: map(&[("m001", 1.0), ("m002", 2.0), ("m004", 3.0)]),
                load_rate: 60.0,
                unload_rate: 50.0,
            },
        ),
        (
            "p003",
            Product {
                product_id: "p003".into(),
                bom: map(&[("m003", 5.0), ("m005", 3.0), ("m006", 1.0)]),
                load_rate: 50.0,
                unload_rate: 60.0,
            },
        ),
    ];
    let lines = [
        (
            "l001",
            ProductionLine {
                line_id: "l001".into(),
                capability: map(&[
                    ("p001", cap(20.0, 10.0, 50.0, 60.0, 60.0, 30.0)),
                    ("p002", cap(25.0, 20.0, 40.0, 30.0, 50.0, 30.0)),
                    ("p003", cap(30.0, 20.0, 20.0, 30.0, 50.0, 40.0)),
                ]),
            },
        ),
        (
            "l002",
            ProductionLine {
                line_id: "l002".into(),
                capability: map(&[("p002", cap(40.0, 50.0, 90.0, 60.0, 60.0, 30.0))]),
            },
        ),
        (
            "l003",
            ProductionLine {
                line_id: "l003".into(),
                capability: map(&[("p001", cap(30.0, 40.0, 50.0, 40.0, 40.0, 20.0))]),
            },
        ),
    ];
    let vehicles = [
        vehicle("c001", 70.0, 50.0, &[("p001", 60.0), ("p002", 60.0), ("p003", 60.0)]),
        vehicle("c002", 90.0, 90.0, &[("p001", 50.0), ("p002", 50.0), ("p003", 50.0)]),
        vehicle("c003", 70.0, 55.0, &[("p001", 60.0)]),
        vehicle("c004", 90.0, 100.0, &[("p001", 20.0)]),
        vehicle("c005", 90.0, 100.0, &[("p001", 20.0), ("p002", 60.0)]),
        vehicle("c006", 70.0, 40.0, &[("p002", 50.0)]),
        vehicle("c007", 70.0, 60.0, &[("p002", 50.0), ("p003", 60.0)]),
        vehicle("c008", 70.0, 60.0, &[("p003", 50.0)]),
    ];
    let env = EnterpriseEnvironment {
        site: "a1".into(),
        utility_totals: map(&[("water", 80000.0), ("electricity", 80000.0), ("steam", 80000.0)]),
        worker_total: 1000.0,
        material_stock: map(&[
            ("m001", 10000.0),
            ("m002", 10000.0),
            ("m003", 10000.0),
            ("m004", 10000.0),
            ("m005", 10000.0),
            ("m006", 10000.0),
        ]),
        products: map(&products),
        lines: map(&lines),
        vehicles: map(&vehicles),
        routes: BTreeMap::from([("a1".into(), map(&[("b1", 100.0), ("b2", 120.0), ("b3", 80.0)]))]),
        policy: PolicyConfig::default(),
    };
    env.validate().expect("fixture is well formed");
    env
}

/// Same enterprise with the reduced stock of the shortage example.
pub fn shortage_env() -> EnterpriseEnvironment {
    let mut env = reference_env();
    for (m, s) in env.material_stock.iter_mut() {
        *s = if m.as_str() == "m001" { 250.0 } else { 1000.0 };
    }
    env
}

pub fn task1() -> MobilizationTask {
    MobilizationTask::new("t001", 9.0, 200.0, "p001", "b1").unwrap()
}

pub fn task2() -> MobilizationTask {
    MobilizationTask::new("t002", 7.0, 100.0, "p001", "b1").unwrap()
}

pub fn task3() -> MobilizationTask {
    MobilizationTask::new("t003", 20.0, 150.0, "p002", "b1").unwrap()
}
