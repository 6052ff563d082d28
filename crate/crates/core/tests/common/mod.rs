#![allow(dead_code)]

use nok_core::configmv::CurveRecord;
use nok_core::exactmath::ints;
use nok_core::zariski::{EffectiveGenerator, SurfaceModel};

fn build(name: &str, basis: &[&str], gram: Vec<Vec<i64>>, curves: &[(&str, &[i64])], gens: &[&[i64]]) -> SurfaceModel {
    SurfaceModel::new(
        name,
        basis.iter().map(|s| s.to_string()).collect(),
        gram.clone(),
        curves
            .iter()
            .map(|(l, c)| CurveRecord::new(*l, c.to_vec(), &gram))
            .collect(),
        gens.iter().map(|g| EffectiveGenerator::new(None, ints(g))).collect(),
    )
    .unwrap()
}

pub fn p2() -> SurfaceModel {
    build("P2", &["L"], vec![vec![1]], &[("L", &[1])], &[&[1]])
}

pub fn f1() -> SurfaceModel {
    build(
        "F1",
        &["L", "E"],
        vec![vec![1, 0], vec![0, -1]],
        &[
            ("E", &[0, 1]),
            ("L-E", &[1, -1]),
            ("L", &[1, 0]),
            ("2L-E", &[2, -1]),
            ("3L-2E", &[3, -2]),
        ],
        &[&[0, 1], &[1, -1]],
    )
}

/// K3 with an I2 fibre, basis (O, Theta0, Theta1).
pub fn s1() -> SurfaceModel {
    build(
        "S1",
        &["O", "T0", "T1"],
        vec![vec![-2, 1, 0], vec![1, -2, 2], vec![0, 2, -2]],
        &[
            ("O", &[1, 0, 0]),
            ("T0", &[0, 1, 0]),
            ("T1", &[0, 0, 1]),
            ("F", &[0, 1, 1]),
        ],
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 1, 1]],
    )
    .with_minus2_assertion(true)
    .unwrap()
}

/// Blow-up of the plane in two points, with its three (-1)-curves.
pub fn bl2() -> SurfaceModel {
    build(
        "Bl2",
        &["L", "E1", "E2"],
        vec![vec![1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]],
        &[
            ("E1", &[0, 1, 0]),
            ("E2", &[0, 0, 1]),
            ("L-E1-E2", &[1, -1, -1]),
            ("L-E1", &[1, -1, 0]),
            ("L-E2", &[1, 0, -1]),
        ],
        &[&[0, 1, 0], &[0, 0, 1], &[1, -1, -1]],
    )
}
