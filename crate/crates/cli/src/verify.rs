//! Reproduces every displayed number from the bundled fixtures and reports
//! expected against computed values.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nok_core::ellsurf::{height_pairing, shioda_tate_rank, NSModel};
use nok_core::exactmath::{int, Rational};
use nok_core::lattice::{embeds_root, EmbeddingVerdict, Lattice, RootFamily, DEFAULT_MODULI, DEFAULT_SEARCH_BOUND};
use nok_core::nob::{polygon, FlagSpec, Point};
use nok_core::zariski::{zariski_decompose, DivisorClass, SurfaceModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::analysis::mv_for;
use crate::fixtures::bundled;
use crate::render::{paint, point_text};
use crate::search::flags;
use crate::surface_file::{parse_surface, LoadedSurface};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Mv,
    Lattice,
    ShiodaTate,
    Polygons,
}

impl Group {
    fn of(id: &str) -> Group {
        if id.starts_with("mv(") {
            Group::Mv
        } else if id.starts_with("Shioda-Tate") {
            Group::ShiodaTate
        } else if id.starts_with("NOB") || id.starts_with("random sweeps") {
            Group::Polygons
        } else {
            Group::Lattice
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub group: Group,
    pub id: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

impl Row {
    fn new(id: impl Into<String>, expected: impl Into<String>, computed: impl Into<String>) -> Row {
        let (id, expected, computed) = (id.into(), expected.into(), computed.into());
        Row {
            group: Group::of(&id),
            id,
            pass: expected == computed,
            expected,
            computed,
        }
    }

    fn failed(id: impl Into<String>, expected: impl Into<String>, why: impl Into<String>) -> Row {
        let id = id.into();
        Row {
            group: Group::of(&id),
            id,
            expected: expected.into(),
            computed: why.into(),
            pass: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Directory whose `<name>.surface` files replace the bundled ones.
    pub fixtures: Option<PathBuf>,
    pub seed: u64,
}

pub const RANDOM_SWEEPS: usize = 60;

fn load(name: &str, dir: Option<&Path>) -> Result<LoadedSurface, String> {
    let override_path = dir.map(|d| d.join(format!("{name}.surface"))).filter(|p| p.is_file());
    let (src, origin) = match override_path {
        Some(p) => (
            std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?,
            p.display().to_string(),
        ),
        None => (
            bundled(name).ok_or_else(|| format!("no fixture `{name}`"))?.to_string(),
            format!("{name}.surface"),
        ),
    };
    parse_surface(&src, &origin).map_err(|d| {
        let msgs: Vec<String> = d.iter().map(ToString::to_string).collect();
        format!("load error: {}", msgs.join("; "))
    })
}

fn mat_text(m: &[Vec<i64>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

fn congruent(b: &[Vec<i64>], g: &[Vec<i64>]) -> Vec<Vec<i64>> {
    // Bᵀ G B, with an independent integer loop.
    let n = b.len();
    let m = b[0].len();
    let mut out = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut s = 0;
            for k in 0..n {
                for l in 0..n {
                    s += b[k][i] * g[k][l] * b[l][j];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

fn det(m: &[Vec<i64>]) -> i64 {
    // Laplace expansion; only used on tiny matrices.
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn sorted_vertices(mut v: Vec<Point>) -> String {
    v.sort();
    v.iter().map(point_text).collect::<Vec<_>>().join(", ")
}

fn pts(v: &[(i64, i64)]) -> Vec<Point> {
    v.iter().map(|&(a, b)| (int(a), int(b))).collect()
}

fn mv_rows(dir: Option<&Path>, rows: &mut Vec<Row>) {
    let cases = [
        ("mv(P2)", "p2", 3),
        ("mv(P1xP1)", "p1xp1", 4),
        ("mv(P1xE)", "p1xe", 4),
        ("mv(F1)", "f1", 5),
        ("mv(ExE), rho = 3", "exe", 4),
        ("mv(S1)", "k3_s1", 7),
        ("mv(S2) via A2 bound", "k3_s2", 7),
    ];
    for (id, file, v) in cases {
        let expected = format!("mv = {v} (certified)");
        rows.push(match load(file, dir) {
            Ok(s) => match mv_for(&s.model) {
                Ok(r) => Row::new(id, expected, r.summary()),
                Err(e) => Row::failed(id, expected, e.to_string()),
            },
            Err(e) => Row::failed(id, expected, e),
        });
    }
}

fn s1_rows(s1: Result<&LoadedSurface, &String>, rows: &mut Vec<Row>) {
    let base_id = "NS(S1) = U+A1, exact base change";
    let base_exp = "Gram [[0,1,0],[1,0,0],[0,0,-2]], det B = ±1";
    let a2_id = "A2 -> NS(S1)";
    let a2_exp = "Yes, witness Gram = [[-2,1],[1,-2]]";
    let st_id = "Shioda-Tate: rho = 3, one I2";
    let st_exp = "r = 0";
    let s1 = match s1 {
        Ok(s) => s,
        Err(e) => {
            for (id, exp) in [(base_id, base_exp), (a2_id, a2_exp), (st_id, st_exp)] {
                rows.push(Row::failed(id, exp, e.clone()));
            }
            return;
        }
    };
    let Some(ell) = &s1.elliptic else {
        for (id, exp) in [(base_id, base_exp), (a2_id, a2_exp), (st_id, st_exp)] {
            rows.push(Row::failed(id, exp, "fixture has no elliptic block"));
        }
        return;
    };
    rows.push(base_change_row(base_id, base_exp, &s1.model, &ell.ns));

    let a2 = Lattice::root(RootFamily::A, 2).expect("A2");
    rows.push(
        match embeds_root(&a2, &s1.model.lattice(), DEFAULT_SEARCH_BOUND, &DEFAULT_MODULI) {
            Ok(EmbeddingVerdict::Yes { witness }) => {
                let mut g = vec![vec![0i64; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        g[i][j] = nok_core::configmv::pair(s1.model.ns_gram(), &witness[i], &witness[j]);
                    }
                }
                Row::new(a2_id, a2_exp, format!("Yes, witness Gram = {}", mat_text(&g)))
            }
            Ok(other) => Row::failed(a2_id, a2_exp, format!("{:?}", other.status())),
            Err(e) => Row::failed(a2_id, a2_exp, e.to_string()),
        },
    );
    rows.push(match shioda_tate_rank(s1.model.rho(), &ell.spec) {
        Ok(r) => Row::new(st_id, st_exp, format!("r = {r}")),
        Err(e) => Row::failed(st_id, st_exp, e.to_string()),
    });
}

/// Recomputes the lattice Gram from the file's own curve classes of
/// `(O), F, Θ₁` through the builder's base change.
fn base_change_row(id: &str, expected: &str, model: &SurfaceModel, ns: &NSModel) -> Row {
    let geometric = ["O", "F", "Theta1_1"];
    let mut classes = Vec::new();
    for l in geometric {
        match model.curves().iter().find(|c| c.label == l) {
            Some(c) => classes.push(c.class.clone()),
            None => return Row::failed(id, expected, format!("no curve `{l}`")),
        }
    }
    let g = congruent(
        &(0..3)
            .map(|i| (0..3).map(|j| classes[j][i]).collect())
            .collect::<Vec<Vec<i64>>>(),
        model.ns_gram(),
    );
    let lattice_gram = congruent(&ns.base_change, &g);
    let d = det(&ns.base_change);
    let d_text = if d.abs() == 1 { "±1".to_string() } else { d.to_string() };
    let computed = format!("Gram {}, det B = {d_text}", mat_text(&lattice_gram));
    Row {
        group: Group::Lattice,
        id: id.into(),
        expected: expected.into(),
        pass: computed == expected,
        computed: format!("{computed} (B = {})", mat_text(&ns.base_change)),
    }
}

fn s2_rows(s2: Result<&LoadedSurface, &String>, rows: &mut Vec<Row>) {
    let h_id = "NS(S2) heights";
    let h_exp = "<P,P> = 4, <Q,Q> = 4, <P,Q> = 2";
    let g_id = "NS(S2) Gram";
    let g_exp = "[[0,1,0,0],[1,0,0,0],[0,0,-4,-2],[0,0,-2,-4]]";
    let ob_id = "A2 -> NS(S2)";
    let ob_exp = "No, mod 2 over 256 residue assignments, recheck ok";
    let st_id = "Shioda-Tate: rho = 4, no reducible fibres";
    let st_exp = "r = 2";
    let all = [(h_id, h_exp), (g_id, g_exp), (ob_id, ob_exp), (st_id, st_exp)];
    let s2 = match s2 {
        Ok(s) => s,
        Err(e) => {
            rows.extend(all.iter().map(|(id, exp)| Row::failed(*id, *exp, e.clone())));
            return;
        }
    };
    let Some(ell) = &s2.elliptic else {
        rows.extend(
            all.iter()
                .map(|(id, exp)| Row::failed(*id, *exp, "fixture has no elliptic block")),
        );
        return;
    };
    let spec = &ell.spec;
    let find = |l: &str| spec.sections.iter().find(|s| s.label == l);
    rows.push(match (find("P"), find("Q")) {
        (Some(p), Some(q)) => {
            let h = |a, b| height_pairing(a, b, spec).map_or_else(|e| e.to_string(), |v: Rational| v.to_string());
            Row::new(
                h_id,
                h_exp,
                format!("<P,P> = {}, <Q,Q> = {}, <P,Q> = {}", h(p, p), h(q, q), h(p, q)),
            )
        }
        _ => Row::failed(h_id, h_exp, "sections P and Q not found"),
    });
    rows.push(Row::new(g_id, g_exp, mat_text(s2.model.ns_gram())));

    let a2 = Lattice::root(RootFamily::A, 2).expect("A2");
    let target = s2.model.lattice();
    rows.push(match embeds_root(&a2, &target, DEFAULT_SEARCH_BOUND, &DEFAULT_MODULI) {
        Ok(EmbeddingVerdict::No { obstruction }) => Row::new(
            ob_id,
            ob_exp,
            format!(
                "No, mod {} over {} residue assignments, recheck {}",
                obstruction.modulus,
                obstruction.assignments,
                if obstruction.recheck(&a2, &target) {
                    "ok"
                } else {
                    "failed"
                }
            ),
        ),
        Ok(other) => Row::failed(ob_id, ob_exp, format!("{:?}", other.status())),
        Err(e) => Row::failed(ob_id, ob_exp, e.to_string()),
    });
    rows.push(match shioda_tate_rank(s2.model.rho(), spec) {
        Ok(r) => Row::new(st_id, st_exp, format!("r = {r}")),
        Err(e) => Row::failed(st_id, st_exp, e.to_string()),
    });
}

fn polygon_row(
    id: &str,
    model: Result<&LoadedSurface, &String>,
    d: &[i64],
    flag: FlagSpec,
    expected_vertices: &[(i64, i64)],
    expected_area: Rational,
) -> Row {
    let expected = format!("{{{}}}, area {expected_area}", sorted_vertices(pts(expected_vertices)));
    let model = match model {
        Ok(m) => &m.model,
        Err(e) => return Row::failed(id, expected, e.clone()),
    };
    match polygon(model, &DivisorClass::from_ints(d), &flag) {
        Ok(p) => Row::new(
            id,
            expected,
            format!("{{{}}}, area {}", sorted_vertices(p.vertices), p.area),
        ),
        Err(e) => Row::failed(id, expected, e.to_string()),
    }
}

/// Random `(D, flag)` sweeps on P², F₁ and S₁ checking the polygon laws.
pub fn random_sweeps(models: &[&SurfaceModel], seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < cases {
        attempts += 1;
        if attempts > 200 * cases {
            return Err(format!("only {done} usable cases after {attempts} draws"));
        }
        let model = models[rng.gen_range(0..models.len())];
        let d: Vec<i64> = (0..model.rho()).map(|_| rng.gen_range(-3..=6)).collect();
        let dq = DivisorClass::from_ints(&d);
        let Ok(z) = zariski_decompose(model, &dq) else { continue };
        let p2 = model.pair(&z.positive.coords, &z.positive.coords);
        if p2 <= int(0) {
            continue;
        }
        let fl = flags(model);
        let flag = fl[rng.gen_range(0..fl.len())].clone();
        let Ok(poly) = polygon(model, &dq, &flag) else { continue };
        let mv = mv_for(model).map_err(|e| e.to_string())?.report.mv_value;
        let ctx = format!("{} D = {d:?}, flag {flag:?}", model.name());
        if poly.area != &p2 / int(2) {
            return Err(format!("{ctx}: area {} != P^2/2 = {}", poly.area, &p2 / int(2)));
        }
        if !poly.alpha.is_convex() || !poly.beta.is_concave() {
            return Err(format!(
                "{ctx}: alpha convex {}, beta concave {}",
                poly.alpha.is_convex(),
                poly.beta.is_concave()
            ));
        }
        if poly.vertices.len() > mv {
            return Err(format!("{ctx}: {} vertices > mv = {mv}", poly.vertices.len()));
        }
        done += 1;
    }
    Ok(done)
}

pub fn verify_paper(opts: &Options) -> Vec<Row> {
    let dir = opts.fixtures.as_deref();
    let mut rows = Vec::new();
    mv_rows(dir, &mut rows);

    let u = Lattice::hyperbolic_u();
    let sig = u.signature();
    rows.push(Row::new(
        "disc(U), signature(U)",
        "disc = -1, signature (1, 1)",
        format!(
            "disc = {}, signature ({}, {})",
            u.discriminant(),
            sig.n_plus,
            sig.n_minus
        ),
    ));
    let s1 = load("k3_s1", dir);
    let s2 = load("k3_s2", dir);
    s1_rows(s1.as_ref(), &mut rows);
    s2_rows(s2.as_ref(), &mut rows);

    let p2 = load("p2", dir);
    let f1 = load("f1", dir);
    rows.push(polygon_row(
        "NOB P2, D = L, flag (L, general)",
        p2.as_ref(),
        &[1],
        FlagSpec::general("L"),
        &[(0, 0), (0, 1), (1, 0)],
        Rational::new(1.into(), 2.into()),
    ));
    rows.push(polygon_row(
        "NOB F1, D = 3L - E, flag (E, general)",
        f1.as_ref(),
        &[3, -1],
        FlagSpec::general("E"),
        &[(0, 0), (0, 1), (2, 3), (2, 0)],
        int(4),
    ));
    rows.push(polygon_row(
        "NOB F1, D = 3L - E, flag (L-E, point on E)",
        f1.as_ref(),
        &[3, -1],
        FlagSpec::at("L-E", &[("E", 1)]),
        &[(0, 0), (0, 2), (3, 2), (1, 0)],
        int(4),
    ));

    let id = format!("random sweeps, seed {}", opts.seed);
    let expected = format!("{RANDOM_SWEEPS} cases: area = P^2/2, alpha convex, beta concave, vertices <= mv");
    rows.push(match (&p2, &f1, &s1) {
        (Ok(a), Ok(b), Ok(c)) => match random_sweeps(&[&a.model, &b.model, &c.model], opts.seed, RANDOM_SWEEPS) {
            Ok(n) => Row::new(
                id,
                expected,
                format!("{n} cases: area = P^2/2, alpha convex, beta concave, vertices <= mv"),
            ),
            Err(e) => Row::failed(id, expected, e),
        },
        _ => Row::failed(id, expected, "fixtures failed to load"),
    });
    rows
}

pub fn rows_json(rows: &[Row]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| json!({"id": r.id, "expected": r.expected, "computed": r.computed, "pass": r.pass}))
            .collect(),
    )
}

pub fn rows_text(rows: &[Row], color: bool) -> String {
    let mut out = String::new();
    for r in rows {
        let status = if r.pass {
            paint("PASS", "32", color)
        } else {
            paint("FAIL", "31;1", color)
        };
        writeln!(out, "{status}  {}", r.id).unwrap();
        writeln!(out, "      expected: {}", r.expected).unwrap();
        writeln!(out, "      computed: {}", r.computed).unwrap();
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    writeln!(
        out,
        "{} rows, {} passed, {failed} failed",
        rows.len(),
        rows.len() - failed
    )
    .unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_row_passes() {
        let rows = verify_paper(&Options::default());
        let bad: Vec<&Row> = rows.iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        let count = |g| rows.iter().filter(|r| r.group == g).count();
        assert_eq!(
            [
                count(Group::Mv),
                count(Group::Lattice),
                count(Group::ShiodaTate),
                count(Group::Polygons)
            ],
            [7, 6, 2, 4]
        );
    }

    #[test]
    fn det_and_congruence() {
        assert_eq!(det(&[vec![2, 1], vec![1, 1]]), 1);
        assert_eq!(det(&[vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]), 1);
        let u = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(congruent(&[vec![1, 0], vec![1, 1]], &u), [vec![2, 1], vec![1, 0]]);
    }
}
