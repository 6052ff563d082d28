#![allow(clippy::needless_range_loop)]

use nok_core::configmv::{mc_of, mv_of_config, mv_surface, CurveRecord, NegConfig};
use nok_core::exactmath::{is_negative_definite, RMatrix};
use proptest::prelude::*;

/// Blow-up of the plane in three points: basis (L, E1, E2, E3).
fn gram() -> Vec<Vec<i64>> {
    vec![
        vec![1, 0, 0, 0],
        vec![0, -1, 0, 0],
        vec![0, 0, -1, 0],
        vec![0, 0, 0, -1],
    ]
}

fn pool() -> Vec<CurveRecord> {
    let g = gram();
    [
        ("E1", [0, 1, 0, 0]),
        ("E2", [0, 0, 1, 0]),
        ("E3", [0, 0, 0, 1]),
        ("L-E1-E2", [1, -1, -1, 0]),
        ("L-E1-E3", [1, -1, 0, -1]),
        ("L-E2-E3", [1, 0, -1, -1]),
        ("E1-E2", [0, 1, -1, 0]),
        ("E2-E3", [0, 0, 1, -1]),
        ("L-E1-E2-E3", [1, -1, -1, -1]),
    ]
    .iter()
    .map(|(l, c)| CurveRecord::new(*l, c.to_vec(), &g))
    .collect()
}

fn pair(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Exhaustive maximum over bitmasks with a union-find component count.
fn oracle(rho: usize, curves: &[CurveRecord]) -> usize {
    let n = curves.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let g: Vec<Vec<i64>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| pair(&curves[i].class, &curves[j].class)).collect())
            .collect();
        if !is_negative_definite(&RMatrix::from_int_rows(&g).unwrap()).unwrap() {
            continue;
        }
        let k = idx.len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for a in 0..k {
            for b in 0..k {
                if a != b && g[a][b] > 0 {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut sizes = vec![0; k];
        for a in 0..k {
            let r = find(&mut parent, a);
            sizes[r] += 1;
        }
        let mc = sizes.into_iter().max().unwrap_or(0);
        let v = if k < rho - 1 { k + mc + 4 } else { k + mc + 3 };
        best = best.max(v);
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exhaustive_search_matches_oracle(mask in 0u32..512) {
        let all = pool();
        let chosen: Vec<CurveRecord> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone()).collect();
        let report = mv_surface(4, &chosen, &gram()).unwrap();
        prop_assert_eq!(report.mv_value, oracle(4, &chosen));
        prop_assert!(report.mv_value >= 3 && report.mv_value <= 9);
        prop_assert_eq!(mv_of_config(&report.witness, 4).unwrap(), report.mv_value);
        let w = NegConfig::new(report.witness.labels.clone(), report.witness.gram.clone());
        prop_assert!(w.is_ok());
        prop_assert!(mc_of(&report.witness) <= report.witness.len());
    }

    #[test]
    fn adding_curves_never_lowers_mv(mask in 0u32..512, extra in 0usize..9) {
        let all = pool();
        let chosen: Vec<CurveRecord> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone()).collect();
        let base = mv_surface(4, &chosen, &gram()).unwrap().mv_value;
        let mut more = chosen.clone();
        if !more.iter().any(|c| c.label == all[extra].label) {
            more.push(all[extra].clone());
        }
        prop_assert!(mv_surface(4, &more, &gram()).unwrap().mv_value >= base);
    }
}
