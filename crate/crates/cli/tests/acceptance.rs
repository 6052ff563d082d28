//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nok::analysis::mv_for;
use nok::fixtures::bundled;
use nok::search::{flags, search_vertices, Grid, Outcome};
use nok::surface_file::parse_surface;
use nok::verify::{verify_paper, Group, Options, Row};
use nok_core::exactmath::Rational;
use nok_core::nob::{polygon, FlagSpec};
use nok_core::zariski::{zariski_decompose, DivisorClass, SurfaceModel};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn load(name: &str) -> SurfaceModel {
    parse_surface(bundled(name).expect("bundled"), name)
        .expect("fixture loads")
        .model
}

// ---- independent exact linear algebra -------------------------------------

fn dot(g: &[Vec<i64>], x: &[Q], y: &[Q]) -> Q {
    let mut s = q(0);
    for i in 0..x.len() {
        for j in 0..y.len() {
            if g[i][j] != 0 {
                s += &x[i] * &y[j] * q(g[i][j]);
            }
        }
    }
    s
}

/// Gauss-Jordan on a square system; `None` when singular.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Q::one() / &a[col][col];
        for c in 0..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
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

/// Negative definite iff every pivot of symmetric elimination is negative.
fn negative_definite(m: &[Vec<Q>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    for k in 0..n {
        if !a[k][k].is_negative() {
            return false;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    true
}

struct Oracle {
    positive: Vec<Q>,
    negative: BTreeMap<String, Q>,
}

/// All subsets of the negative curves; exactly one must yield a Zariski
/// decomposition.
fn oracle(model: &SurfaceModel, d: &[Q]) -> Result<Oracle, String> {
    let g = model.ns_gram();
    let negs: Vec<(String, Vec<Q>)> = model
        .curves()
        .iter()
        .filter(|c| c.self_intersection < 0)
        .map(|c| (c.label.clone(), c.class.iter().map(|&x| q(x)).collect()))
        .collect();
    let gens: Vec<Vec<Q>> = model.effective_generators().iter().map(|e| e.class.clone()).collect();
    let mut found = Vec::new();
    for mask in 0u32..(1 << negs.len()) {
        let s: Vec<usize> = (0..negs.len()).filter(|i| mask >> i & 1 == 1).collect();
        let gram: Vec<Vec<Q>> = s
            .iter()
            .map(|&i| s.iter().map(|&j| dot(g, &negs[i].1, &negs[j].1)).collect())
            .collect();
        if !negative_definite(&gram) {
            continue;
        }
        let rhs: Vec<Q> = s.iter().map(|&j| dot(g, d, &negs[j].1)).collect();
        let Some(a) = solve(gram, rhs) else { continue };
        if a.iter().any(|x| !x.is_positive()) {
            continue;
        }
        let mut p = d.to_vec();
        for (k, &i) in s.iter().enumerate() {
            for (pc, nc) in p.iter_mut().zip(&negs[i].1) {
                *pc -= &a[k] * nc;
            }
        }
        if gens.iter().all(|e| !dot(g, &p, e).is_negative()) {
            found.push(Oracle {
                positive: p,
                negative: s.iter().zip(a).map(|(&i, x)| (negs[i].0.clone(), x)).collect(),
            });
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one")),
        n => Err(format!("{n} subsets give a decomposition")),
    }
}

// ---- criteria --------------------------------------------------------------

struct Verdict {
    pass: bool,
    detail: String,
}

fn rows_verdict(rows: &[Row], group: Group, expected: usize) -> Verdict {
    let sel: Vec<&Row> = rows.iter().filter(|r| r.group == group).collect();
    let bad: Vec<String> = sel
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: expected `{}`, computed `{}`", r.id, r.expected, r.computed))
        .collect();
    Verdict {
        pass: bad.is_empty() && sel.len() == expected,
        detail: if bad.is_empty() {
            format!("{}/{expected} rows", sel.len())
        } else {
            bad.join("; ")
        },
    }
}

fn criterion_zariski() -> Verdict {
    let models = [load("p2"), load("f1"), load("k3_s1")];
    let mut rng = ChaCha8Rng::seed_from_u64(20_241_015);
    let mut cases = 0;
    let per_model = 400;
    for model in &models {
        let g = model.ns_gram();
        let mut span: Vec<Vec<Q>> = model.effective_generators().iter().map(|e| e.class.clone()).collect();
        span.extend(model.curves().iter().map(|c| c.class.iter().map(|&x| q(x)).collect()));
        for _ in 0..per_model {
            let den = rng.gen_range(1..=3);
            let mut d = vec![q(0); model.rho()];
            for s in &span {
                let c = Q::new(BigInt::from(rng.gen_range(0..=4)), BigInt::from(den));
                for (x, y) in d.iter_mut().zip(s) {
                    *x += &c * y;
                }
            }
            let ctx = format!(
                "{} D = {:?}",
                model.name(),
                d.iter().map(ToString::to_string).collect::<Vec<_>>()
            );
            let z = match zariski_decompose(model, &DivisorClass::new(d.clone())) {
                Ok(z) => z,
                Err(e) => return fail(format!("{ctx}: {e}")),
            };
            let mut n = vec![q(0); model.rho()];
            let mut support = Vec::new();
            for (label, a) in &z.negative_coeffs {
                let c = model.curves().iter().find(|c| c.label == *label).expect("listed");
                let cq: Vec<Q> = c.class.iter().map(|&x| q(x)).collect();
                if !dot(g, &z.positive.coords, &cq).is_zero() {
                    return fail(format!("{ctx}: P.{label} != 0"));
                }
                for (x, y) in n.iter_mut().zip(&cq) {
                    *x += a * y;
                }
                support.push(cq);
            }
            let recon: Vec<Q> = z.positive.coords.iter().zip(&n).map(|(a, b)| a + b).collect();
            if recon != d {
                return fail(format!("{ctx}: P + N != D"));
            }
            let sg: Vec<Vec<Q>> = support
                .iter()
                .map(|x| support.iter().map(|y| dot(g, x, y)).collect())
                .collect();
            if !negative_definite(&sg) {
                return fail(format!("{ctx}: support not negative definite"));
            }
            if model
                .effective_generators()
                .iter()
                .any(|e| dot(g, &z.positive.coords, &e.class).is_negative())
            {
                return fail(format!("{ctx}: P not nef"));
            }
            let o = match oracle(model, &d) {
                Ok(o) => o,
                Err(e) => return fail(format!("{ctx}: oracle: {e}")),
            };
            let core_neg: BTreeMap<String, Q> = z
                .negative_coeffs
                .iter()
                .filter(|(_, a)| !a.is_zero())
                .cloned()
                .collect();
            if o.positive != z.positive.coords || o.negative != core_neg {
                return fail(format!("{ctx}: differs from the all-subsets oracle"));
            }
            cases += 1;
        }
    }
    Verdict {
        pass: true,
        detail: format!("{cases} random divisors on P2, F1, S1"),
    }
}

fn fail(detail: String) -> Verdict {
    Verdict { pass: false, detail }
}

fn sorted(mut v: Vec<(Q, Q)>) -> Vec<(Q, Q)> {
    v.sort();
    v
}

fn pts(v: &[(i64, i64)]) -> Vec<(Q, Q)> {
    sorted(v.iter().map(|&(a, b)| (q(a), q(b))).collect())
}

/// Model, divisor, flag, sorted vertices, area.
type FixedPolygon<'a> = (&'a SurfaceModel, Vec<i64>, FlagSpec, Vec<(Q, Q)>, Q);

fn criterion_polygons(rows: &[Row]) -> Verdict {
    let rv = rows_verdict(rows, Group::Polygons, 4);
    if !rv.pass {
        return rv;
    }
    let (p2, f1, s1) = (load("p2"), load("f1"), load("k3_s1"));
    let fixed: [FixedPolygon; 3] = [
        (
            &p2,
            vec![1],
            FlagSpec::general("L"),
            pts(&[(0, 0), (0, 1), (1, 0)]),
            Q::new(1.into(), 2.into()),
        ),
        (
            &f1,
            vec![3, -1],
            FlagSpec::general("E"),
            pts(&[(0, 0), (0, 1), (2, 3), (2, 0)]),
            q(4),
        ),
        (
            &f1,
            vec![3, -1],
            FlagSpec::at("L-E", &[("E", 1)]),
            pts(&[(0, 0), (0, 2), (3, 2), (1, 0)]),
            q(4),
        ),
    ];
    for (m, d, flag, verts, area) in fixed {
        match polygon(m, &DivisorClass::from_ints(&d), &flag) {
            Ok(p) if sorted(p.vertices.clone()) == verts && p.area == area => {}
            Ok(p) => {
                return fail(format!(
                    "{} {d:?} {flag:?}: got {:?}, area {}",
                    m.name(),
                    p.vertices,
                    p.area
                ))
            }
            Err(e) => return fail(format!("{} {d:?} {flag:?}: {e}", m.name())),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7_919);
    let models = [&p2, &f1, &s1];
    let mut done = 0;
    let mut max_vertices = [0usize; 3];
    for _ in 0..20_000 {
        if done == 300 {
            break;
        }
        let which = rng.gen_range(0..models.len());
        let model = models[which];
        let d: Vec<Q> = (0..model.rho()).map(|_| q(rng.gen_range(-3..=6))).collect();
        let Ok(o) = oracle(model, &d) else { continue };
        let p2v = dot(model.ns_gram(), &o.positive, &o.positive);
        if !p2v.is_positive() {
            continue;
        }
        let fl = flags(model);
        let flag = fl[rng.gen_range(0..fl.len())].clone();
        let Ok(poly) = polygon(model, &DivisorClass::new(d.clone()), &flag) else {
            continue;
        };
        let ctx = format!("{} D = {d:?} flag {flag:?}", model.name());
        if poly.area != &p2v / q(2) {
            return fail(format!("{ctx}: area {} != P^2/2 = {}", poly.area, &p2v / q(2)));
        }
        let slopes =
            |f: &nok_core::nob::PiecewiseLinearFn| f.pieces.iter().map(|p| p.slope.clone()).collect::<Vec<_>>();
        let (a, b) = (slopes(&poly.alpha), slopes(&poly.beta));
        if a.windows(2).any(|w| w[0] > w[1]) || b.windows(2).any(|w| w[0] < w[1]) {
            return fail(format!("{ctx}: alpha slopes {a:?}, beta slopes {b:?}"));
        }
        let mv = mv_for(model).expect("mv").report.mv_value;
        let n = poly.vertices.len();
        if n > mv {
            return fail(format!("{ctx}: {n} vertices > mv = {mv}"));
        }
        // strictly convex, counterclockwise
        for i in 0..n {
            let (o0, a0, b0) = (
                &poly.vertices[i],
                &poly.vertices[(i + 1) % n],
                &poly.vertices[(i + 2) % n],
            );
            let cross = (&a0.0 - &o0.0) * (&b0.1 - &o0.1) - (&a0.1 - &o0.1) * (&b0.0 - &o0.0);
            if !cross.is_positive() {
                return fail(format!("{ctx}: vertices not strictly convex"));
            }
        }
        max_vertices[which] = max_vertices[which].max(n);
        done += 1;
    }
    if done < 300 {
        return fail(format!("only {done} usable random sweeps"));
    }
    Verdict {
        pass: true,
        detail: format!(
            "3 fixed polygons, {done} random sweeps (max vertices P2 {}, F1 {}, S1 {})",
            max_vertices[0], max_vertices[1], max_vertices[2]
        ),
    }
}

fn criterion_search() -> Verdict {
    let f1 = load("f1");
    let g = f1.ns_gram();
    let mut found = Vec::new();
    for target in 3..=5 {
        match search_vertices(&f1, target, Grid::default()) {
            Ok(Outcome::Found { hit, .. }) => {
                let dq: Vec<Q> = hit.divisor.iter().map(|&x| q(x)).collect();
                let ample = dot(g, &dq, &dq).is_positive()
                    && f1
                        .curves()
                        .iter()
                        .all(|c| dot(g, &dq, &c.class.iter().map(|&x| q(x)).collect::<Vec<_>>()).is_positive());
                let again = polygon(&f1, &DivisorClass::new(dq), &hit.flag).map(|p| p.vertices.len());
                if !ample || again != Ok(target) {
                    return fail(format!("target {target}: hit {:?} does not recheck", hit.divisor));
                }
                found.push(format!(
                    "{target}: D = {:?}, flag {}",
                    hit.divisor,
                    nok::analysis::flag_text(&hit.flag)
                ));
            }
            Ok(Outcome::Exhausted { examined }) => {
                return fail(format!("target {target}: exhausted after {examined} candidates"))
            }
            Err(e) => return fail(format!("target {target}: {e}")),
        }
    }
    Verdict {
        pass: true,
        detail: found.join("; "),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let took = start.elapsed();
    if took > limit {
        v.pass = false;
        v.detail.push_str(&format!("; took {took:.2?}, limit {limit:?}"));
    } else {
        v.detail.push_str(&format!(" ({took:.2?})"));
    }
    v
}

fn main() {
    let start = Instant::now();
    let rows = verify_paper(&Options::default());
    let verify_time = start.elapsed();

    let mut results: Vec<(u8, &str, Verdict)> = Vec::new();
    let mut c1 = rows_verdict(&rows, Group::Mv, 7);
    if verify_time > Duration::from_secs(10) {
        c1.pass = false;
    }
    c1.detail
        .push_str(&format!(", full verify-paper run {verify_time:.2?}"));
    results.push((1, "mv of the seven reference surfaces", c1));
    results.push((2, "lattice suite", rows_verdict(&rows, Group::Lattice, 6)));
    results.push((3, "Shioda-Tate ranks", rows_verdict(&rows, Group::ShiodaTate, 2)));
    results.push((
        4,
        "Zariski property suite",
        timed(Duration::from_secs(30), criterion_zariski),
    ));
    results.push((5, "Newton-Okounkov polygon suite", criterion_polygons(&rows)));
    results.push((
        6,
        "attainability search on F1",
        timed(Duration::from_secs(60), criterion_search),
    ));

    let mut all = true;
    for (n, name, v) in &results {
        all &= v.pass;
        println!(
            "{} criterion {n}: {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
