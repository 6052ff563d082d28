use nok_core::lattice::{
    embeds_root, roots_of, verify_witness, EmbeddingStatus, EmbeddingVerdict, Lattice, RootFamily,
};
use proptest::prelude::*;

/// All vectors of norm −2 in a coordinate box, by plain enumeration.
fn roots_in_box(l: &Lattice, b: i64) -> Vec<Vec<i64>> {
    let n = l.rank();
    let mut out = Vec::new();
    let mut v = vec![-b; n];
    loop {
        if l.product(&v, &v).unwrap() == -2 {
            out.push(v.clone());
        }
        let mut k = 0;
        loop {
            if k == n {
                out.sort();
                return out;
            }
            if v[k] < b {
                v[k] += 1;
                break;
            }
            v[k] = -b;
            k += 1;
        }
    }
}

#[test]
fn root_counts_of_root_systems() {
    for n in 1..=6 {
        assert_eq!(
            roots_of(&Lattice::root(RootFamily::A, n).unwrap()).unwrap().len(),
            n * (n + 1)
        );
    }
    for n in 4..=7 {
        assert_eq!(
            roots_of(&Lattice::root(RootFamily::D, n).unwrap()).unwrap().len(),
            2 * n * (n - 1)
        );
    }
}

#[test]
fn embeddings_into_sums() {
    let a2 = Lattice::root(RootFamily::A, 2).unwrap();
    for (target, status) in [
        ("U+A1", EmbeddingStatus::Yes),
        ("U", EmbeddingStatus::No),
        ("A2", EmbeddingStatus::Yes),
        ("3A1", EmbeddingStatus::No),
        ("E6", EmbeddingStatus::Yes),
    ] {
        let t = Lattice::from_name(target).unwrap();
        let v = embeds_root(&a2, &t, 4, &[2, 3, 4]).unwrap();
        assert_eq!(v.status(), status, "A2 into {target}");
        match v {
            EmbeddingVerdict::Yes { witness } => assert!(verify_witness(&a2, &t, &witness)),
            EmbeddingVerdict::No { obstruction } => assert!(obstruction.recheck(&a2, &t)),
            EmbeddingVerdict::Unknown { .. } => {}
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fincke_pohst_matches_box(a in 2i64..6, b in -2i64..=2, c in 2i64..6) {
        prop_assume!(a * c > b * b);
        let l = Lattice::new("t", vec![vec![-a, b], vec![b, -c]], vec!["x".into(), "y".into()]).unwrap();
        // reduced binary forms have all roots within a box of radius 2
        prop_assert_eq!(roots_of(&l).unwrap(), roots_in_box(&l, 3));
    }

    #[test]
    fn verdicts_carry_valid_certificates(a in 1i64..5, b in -2i64..=2, c in 1i64..5) {
        prop_assume!(a * c > b * b);
        let target = Lattice::hyperbolic_u()
            .direct_sum(&Lattice::new("m", vec![vec![-2 * a, b], vec![b, -2 * c]], vec!["p".into(), "q".into()]).unwrap());
        let a2 = Lattice::root(RootFamily::A, 2).unwrap();
        match embeds_root(&a2, &target, 3, &[2, 3]).unwrap() {
            EmbeddingVerdict::Yes { witness } => prop_assert!(verify_witness(&a2, &target, &witness)),
            EmbeddingVerdict::No { obstruction } => prop_assert!(obstruction.recheck(&a2, &target)),
            EmbeddingVerdict::Unknown { .. } => {}
        }
    }
}
