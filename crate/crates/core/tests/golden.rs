use serde::Deserialize;
use wfpo_core::experiments::{relaxation_sweep, GridParams, SweepSpec, SweepVariable};
use wfpo_core::pulse::ChirpedGaussian;
use wfpo_core::quantum::{SystemModel, Target};

#[derive(Deserialize)]
struct Record {
    value: f64,
    dn_pos: f64,
    dn_neg: f64,
    effect: f64,
}

#[derive(Deserialize)]
struct Golden {
    targets: std::collections::BTreeMap<String, Vec<Record>>,
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[test]
fn relaxation_sweep_matches_frozen_values() {
    let golden: Golden =
        serde_json::from_str(include_str!("golden/relaxation_gamma.json")).unwrap();
    for (name, expected) in &golden.targets {
        let target: Target = name.parse().unwrap();
        let spec = SweepSpec {
            variable: SweepVariable::Gamma,
            values: expected.iter().map(|r| r.value).collect(),
            model: SystemModel::table1(),
            pulse: ChirpedGaussian::new(1.0, 80.0, 0.0).unwrap(),
            grids: GridParams::default(),
            target,
            jobs: None,
        };
        let got = relaxation_sweep(&spec).unwrap();
        for (g, e) in got.records.iter().zip(expected) {
            assert_eq!(g.value, e.value);
            assert!(close(g.dn_pos, e.dn_pos, 1e-9), "{name} γ={}: {} vs {}", e.value, g.dn_pos, e.dn_pos);
            assert!(close(g.dn_neg, e.dn_neg, 1e-9), "{name} γ={}: {} vs {}", e.value, g.dn_neg, e.dn_neg);
            // the effect is a difference of nearly equal transfers
            let scale = e.dn_pos.abs().max(e.dn_neg.abs());
            assert!((g.effect - e.effect).abs() < 1e-9 * scale, "{name} γ={}", e.value);
        }
    }
}
