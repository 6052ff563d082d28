//! Zariski decompositions against an all-subsets brute force with its own
//! exact elimination.

#![allow(clippy::needless_range_loop)]

mod common;

use nok_core::exactmath::{int, rat, Rational};
use nok_core::zariski::{is_pseudo_effective, mu_of, nu_of, zariski_decompose, DivisorClass, SurfaceModel};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(m: &SurfaceModel, x: &[Rational], y: &[Rational]) -> Rational {
    let g = m.ns_gram();
    let mut s = Rational::zero();
    for i in 0..x.len() {
        for j in 0..y.len() {
            s += &x[i] * &y[j] * int(g[i][j]);
        }
    }
    s
}

fn class(m: &SurfaceModel, i: usize) -> Vec<Rational> {
    m.curves()[i].class.iter().map(|&x| int(x)).collect()
}

/// Gauss-Jordan on an augmented system; `None` if singular.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some(b)
}

/// Positive pivots of `-a` without row exchanges.
fn negative_definite(a: &[Vec<Rational>]) -> bool {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    for k in 0..n {
        if !m[k][k].is_positive() {
            return false;
        }
        for r in k + 1..n {
            let f = &m[r][k] / &m[k][k];
            for c in k..n {
                let v = &f * &m[k][c];
                m[r][c] -= v;
            }
        }
    }
    true
}

/// Every subset of negative curves whose orthogonal solution has positive
/// coefficients and a nef remainder.
type Candidate = (Vec<Rational>, Vec<(String, Rational)>);

fn brute_force(m: &SurfaceModel, d: &[Rational]) -> Vec<Candidate> {
    let neg: Vec<usize> = (0..m.curves().len())
        .filter(|&i| m.curves()[i].self_intersection < 0)
        .collect();
    let mut found = Vec::new();
    for mask in 0u32..(1 << neg.len()) {
        let s: Vec<usize> = (0..neg.len()).filter(|k| mask >> k & 1 == 1).map(|k| neg[k]).collect();
        let a: Vec<Vec<Rational>> = s
            .iter()
            .map(|&i| s.iter().map(|&j| pair(m, &class(m, i), &class(m, j))).collect())
            .collect();
        if !negative_definite(&a) {
            continue;
        }
        let b = s.iter().map(|&j| pair(m, d, &class(m, j))).collect();
        let Some(coef) = solve(a, b) else { continue };
        if coef.iter().any(|c| !c.is_positive()) {
            continue;
        }
        let mut p = d.to_vec();
        for (c, &i) in coef.iter().zip(&s) {
            for (x, y) in p.iter_mut().zip(class(m, i)) {
                *x -= c * y;
            }
        }
        if m.effective_generators()
            .iter()
            .any(|g| pair(m, &p, &g.class).is_negative())
        {
            continue;
        }
        found.push((
            p,
            s.iter()
                .zip(coef)
                .map(|(&i, c)| (m.curves()[i].label.clone(), c))
                .collect(),
        ));
    }
    found
}

fn random_divisor(m: &SurfaceModel, rng: &mut ChaCha8Rng) -> DivisorClass {
    let mut d = DivisorClass::zero(m.rho());
    for g in m.effective_generators() {
        let c = rat(rng.gen_range(0..8), rng.gen_range(1..4));
        d = d.add_scaled(&c, &g.class);
    }
    d
}

#[test]
fn decomposition_matches_brute_force() {
    let models = [common::p2(), common::f1(), common::s1(), common::bl2()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a41);
    let mut checked = 0;
    for round in 0..1200 {
        let m = &models[round % models.len()];
        let d = random_divisor(m, &mut rng);
        let z = zariski_decompose(m, &d).unwrap();
        z.verify(m, &d).unwrap();
        let oracle = brute_force(m, &d.coords);
        assert_eq!(oracle.len(), 1, "{} D = {d}: {oracle:?}", m.name());
        assert_eq!(z.positive.coords, oracle[0].0, "{} D = {d}", m.name());
        assert_eq!(z.negative_coeffs, oracle[0].1, "{} D = {d}", m.name());
        checked += 1;
    }
    assert_eq!(checked, 1200);
}

#[test]
fn positive_square_is_monotone_along_flags() {
    let models = [common::f1(), common::s1(), common::bl2()];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..150 {
        let m = &models[round % models.len()];
        let d = random_divisor(m, &mut rng);
        let ci = rng.gen_range(0..m.curves().len());
        let label = m.curves()[ci].label.clone();
        let Ok(mu) = mu_of(m, &d, &label) else { continue };
        let c = class(m, ci);
        let mut last: Option<Rational> = None;
        for k in 0..=8 {
            let t = &mu * rat(k, 8);
            let z = zariski_decompose(m, &d.add_scaled(&-t, &c)).unwrap();
            let vol = pair(m, &z.positive.coords, &z.positive.coords);
            assert!(!vol.is_negative());
            if let Some(prev) = &last {
                assert!(vol <= *prev);
            }
            last = Some(vol);
        }
        // just past mu the divisor leaves the cone
        let beyond = d.add_scaled(&-(&mu + rat(1, 1000)), &c);
        assert!(!is_pseudo_effective(m, &beyond).unwrap());
    }
}

#[test]
fn ample_divisors_have_no_negative_part() {
    let m = common::bl2();
    // 3L - E1 - E2 meets every listed curve positively
    let d = DivisorClass::from_ints(&[3, -1, -1]);
    for c in m.curves() {
        assert_eq!(nu_of(&m, &d, &c.label).unwrap(), int(0));
    }
    let z = zariski_decompose(&m, &d).unwrap();
    assert_eq!(z.positive, d);
    assert!(z.negative_coeffs.is_empty());
}
