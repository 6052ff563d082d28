//! `.surface` files: JSON with exact integers and `"p/q"` fraction strings.
//!
//! ```json
//! {
//!   "name": "F1",
//!   "basis": ["L", "E"],
//!   "ns_gram": [[1, 0], [0, -1]],
//!   "curves": [{"label": "E", "class": [0, 1]}],
//!   "effective_generators": ["E", [1, -1]]
//! }
//! ```
//!
//! An `elliptic` block (`chi`, `fibres`, `sections`) generates the lattice and
//! curves through the Néron–Severi builder. If explicit lattice data is given
//! as well, the two must agree on every pairing of shared curve labels.

use std::collections::BTreeSet;
use std::fmt;

use nok_core::configmv::{pair, CurveRecord};
use nok_core::ellsurf::{build_ns, EllipticSurfaceSpec, FibreSpec, KodairaType, NSModel, SectionData};
use nok_core::exactmath::{int, signature_of, RMatrix, Rational};
use nok_core::lattice::Lattice;
use nok_core::zariski::{EffectiveGenerator, SurfaceModel};
use serde_json::{json, Map, Value};

use crate::render::exact_json;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// `origin:line:col` for syntax errors, `origin: json.path` otherwise.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct EllipticData {
    pub spec: EllipticSurfaceSpec,
    pub ns: NSModel,
}

#[derive(Debug, Clone)]
pub struct LoadedSurface {
    pub model: SurfaceModel,
    pub elliptic: Option<EllipticData>,
}

struct Ctx<'a> {
    origin: &'a str,
    diags: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            location: format!("{}: {}", self.origin, path),
            message: message.into(),
        });
    }

    fn int(&mut self, v: &Value, path: &str) -> Option<i64> {
        match v.as_i64() {
            Some(n) => Some(n),
            None if v.is_f64() => {
                self.push(
                    path,
                    "floating-point literals are not allowed; use an integer or \"p/q\"",
                );
                None
            }
            None => {
                self.push(path, format!("expected an integer, found {v}"));
                None
            }
        }
    }

    fn exact(&mut self, v: &Value, path: &str) -> Option<Rational> {
        if let Some(s) = v.as_str() {
            return match s.trim().parse::<Rational>() {
                Ok(q) => Some(q),
                Err(_) => {
                    self.push(path, format!("`{s}` is not a fraction p/q"));
                    None
                }
            };
        }
        self.int(v, path).map(int)
    }

    fn int_row(&mut self, v: &Value, path: &str) -> Option<Vec<i64>> {
        let Some(arr) = v.as_array() else {
            self.push(path, "expected an array of integers");
            return None;
        };
        let row: Vec<Option<i64>> = arr
            .iter()
            .enumerate()
            .map(|(i, x)| self.int(x, &format!("{path}[{i}]")))
            .collect();
        row.into_iter().collect()
    }

    fn string(&mut self, v: Option<&Value>, path: &str) -> Option<String> {
        match v {
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => {
                self.push(path, format!("expected a string, found {other}"));
                None
            }
            None => {
                self.push(path, "missing");
                None
            }
        }
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && !s.contains(':') && !s.chars().any(char::is_whitespace)
}

const TOP_KEYS: &[&str] = &[
    "name",
    "rho",
    "basis",
    "ns_gram",
    "curves",
    "effective_generators",
    "elliptic",
    "all_negative_curves_are_minus2",
];

fn parse_elliptic(ctx: &mut Ctx, v: &Value) -> Option<EllipticSurfaceSpec> {
    let Some(obj) = v.as_object() else {
        ctx.push("elliptic", "expected an object");
        return None;
    };
    for k in obj.keys() {
        if !["chi", "base_genus", "fibres", "sections", "rho"].contains(&k.as_str()) {
            ctx.push(&format!("elliptic.{k}"), "unknown field");
        }
    }
    let chi = ctx.int(obj.get("chi").unwrap_or(&Value::Null), "elliptic.chi")?;
    let mut spec = EllipticSurfaceSpec::new(chi);
    if let Some(g) = obj.get("base_genus") {
        spec.base_genus = ctx.int(g, "elliptic.base_genus").map_or(0, |g| g.max(0) as u32);
    }
    if let Some(r) = obj.get("rho") {
        spec.declared_rho = ctx.int(r, "elliptic.rho").map(|r| r.max(0) as usize);
    }
    let empty = Vec::new();
    for (i, f) in obj
        .get("fibres")
        .and_then(Value::as_array)
        .unwrap_or(&empty)
        .iter()
        .enumerate()
    {
        let path = format!("elliptic.fibres[{i}]");
        let kind = ctx.string(f.get("type"), &format!("{path}.type"))?;
        let parsed = match kind.as_str() {
            "III" => Some(KodairaType::III),
            k => k
                .strip_prefix('I')
                .and_then(|m| m.parse::<u32>().ok())
                .filter(|&m| m >= 1)
                .map(KodairaType::I),
        };
        let Some(kind_t) = parsed else {
            ctx.push(
                &format!("{path}.type"),
                format!("unsupported fibre type `{kind}` (use I<m> or III)"),
            );
            continue;
        };
        let mut fibre = FibreSpec::new(kind_t);
        fibre.identity_component_marked = f
            .get("identity_component_marked")
            .and_then(Value::as_bool)
            .unwrap_or(true);
        spec.fibres.push(fibre);
    }
    for (i, s) in obj
        .get("sections")
        .and_then(Value::as_array)
        .unwrap_or(&empty)
        .iter()
        .enumerate()
    {
        let path = format!("elliptic.sections[{i}]");
        let label = ctx.string(s.get("label"), &format!("{path}.label"))?;
        let dot_zero = ctx.int(s.get("dot_zero").unwrap_or(&json!(0)), &format!("{path}.dot_zero"))?;
        let mut section = SectionData::new(label, dot_zero);
        if let Some(dots) = s.get("dots").and_then(Value::as_object) {
            for (other, val) in dots {
                if let Some(n) = ctx.int(val, &format!("{path}.dots.{other}")) {
                    section = section.with_dot(other.clone(), n);
                }
            }
        }
        section.torsion = s.get("torsion").and_then(Value::as_bool).unwrap_or(false);
        spec.sections.push(section);
    }
    Some(spec)
}

/// Parses and validates a surface file. Every failed check yields its own
/// diagnostic.
pub fn parse_surface(src: &str, origin: &str) -> Result<LoadedSurface, Vec<Diagnostic>> {
    let mut ctx = Ctx {
        origin,
        diags: Vec::new(),
    };
    let root: Value = match serde_json::from_str(src) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![Diagnostic {
                location: format!("{origin}:{}:{}", e.line(), e.column()),
                message: format!("syntax error: {e}"),
            }])
        }
    };
    let Some(obj) = root.as_object() else {
        ctx.push("$", "expected a JSON object");
        return Err(ctx.diags);
    };
    for k in obj.keys() {
        if !TOP_KEYS.contains(&k.as_str()) {
            ctx.push(k, "unknown field");
        }
    }
    let name = ctx.string(obj.get("name"), "name").unwrap_or_default();

    let elliptic = match obj.get("elliptic") {
        None => None,
        Some(v) => match parse_elliptic(&mut ctx, v) {
            Some(spec) => match build_ns(&spec) {
                Ok(ns) => Some(EllipticData { spec, ns }),
                Err(e) => {
                    ctx.push("elliptic", e.to_string());
                    None
                }
            },
            None => None,
        },
    };
    if obj.contains_key("elliptic") && elliptic.is_none() {
        return Err(ctx.diags);
    }

    // Lattice data: explicit, or generated from the elliptic block.
    let (basis, gram, curves_v): (Vec<String>, Vec<Vec<i64>>, Vec<CurveRecord>);
    if let Some(g) = obj.get("ns_gram") {
        let Some(rows) = g.as_array() else {
            ctx.push("ns_gram", "expected an array of rows");
            return Err(ctx.diags);
        };
        let parsed: Vec<Option<Vec<i64>>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| ctx.int_row(r, &format!("ns_gram[{i}]")))
            .collect();
        let Some(gm) = parsed.into_iter().collect::<Option<Vec<_>>>() else {
            return Err(ctx.diags);
        };
        let n = gm.len();
        if n == 0 || gm.iter().any(|r| r.len() != n) {
            ctx.push("ns_gram", "must be a nonempty square matrix");
            return Err(ctx.diags);
        }
        for i in 0..n {
            for j in i + 1..n {
                if gm[i][j] != gm[j][i] {
                    ctx.push(
                        &format!("ns_gram[{i}][{j}]"),
                        format!("{} != ns_gram[{j}][{i}] = {}", gm[i][j], gm[j][i]),
                    );
                }
            }
        }
        let b: Vec<String> = match obj.get("basis") {
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .filter_map(|(i, x)| ctx.string(Some(x), &format!("basis[{i}]")))
                .collect(),
            Some(_) => {
                ctx.push("basis", "expected an array of labels");
                Vec::new()
            }
            None => (1..=n).map(|i| format!("b{i}")).collect(),
        };
        if b.len() != n {
            ctx.push("basis", format!("has {} labels, ns_gram has rank {n}", b.len()));
        }
        let mut cs = Vec::new();
        if let Some(list) = obj.get("curves") {
            let Some(list) = list.as_array() else {
                ctx.push("curves", "expected an array");
                return Err(ctx.diags);
            };
            for (i, c) in list.iter().enumerate() {
                let path = format!("curves[{i}]");
                let Some(label) = ctx.string(c.get("label"), &format!("{path}.label")) else {
                    continue;
                };
                if !valid_label(&label) {
                    ctx.push(&format!("{path}.label"), format!("invalid label `{label}`"));
                }
                let Some(class) = c.get("class").and_then(|v| ctx.int_row(v, &format!("{path}.class"))) else {
                    if c.get("class").is_none() {
                        ctx.push(&format!("{path}.class"), "missing");
                    }
                    continue;
                };
                if class.len() != n {
                    ctx.push(
                        &format!("{path}.class"),
                        format!("has length {}, expected {n}", class.len()),
                    );
                    continue;
                }
                let computed = pair(&gm, &class, &class);
                if let Some(si) = c.get("self_intersection") {
                    if let Some(si) = ctx.int(si, &format!("{path}.self_intersection")) {
                        if si != computed {
                            ctx.push(
                                &format!("{path}.self_intersection"),
                                format!("declared {si} but the class has square {computed}"),
                            );
                        }
                    }
                }
                let mut rec = CurveRecord::new(label, class, &gm);
                rec.irreducible = c.get("irreducible").and_then(Value::as_bool).unwrap_or(true);
                cs.push(rec);
            }
        }
        (basis, gram, curves_v) = (b, gm, cs);
    } else if let Some(e) = &elliptic {
        for k in ["basis", "curves"] {
            if obj.contains_key(k) {
                ctx.push(k, "only allowed together with ns_gram");
            }
        }
        let g = e.ns.lattice.gram().to_vec();
        basis = e.ns.lattice.labels().to_vec();
        curves_v =
            e.ns.curves
                .iter()
                .map(|l| CurveRecord::new(l.clone(), e.ns.class(l).expect("curve class").to_vec(), &g))
                .collect();
        gram = g;
    } else {
        ctx.push("ns_gram", "missing (required without an elliptic block)");
        return Err(ctx.diags);
    }
    let n = gram.len();

    if let Some(r) = obj.get("rho") {
        if let Some(r) = ctx.int(r, "rho") {
            if r != n as i64 {
                ctx.push("rho", format!("declared {r} but ns_gram has rank {n}"));
            }
        }
    }
    if let Ok(m) = RMatrix::from_int_rows(&gram) {
        if let Ok(sig) = signature_of(&m) {
            if sig.n_plus != 1 || sig.n_zero != 0 {
                ctx.push(
                    "ns_gram",
                    format!(
                        "signature (+{}, -{}, 0:{}) is not hyperbolic (1, rho - 1)",
                        sig.n_plus, sig.n_minus, sig.n_zero
                    ),
                );
            }
        }
    }

    let mut seen = BTreeSet::new();
    for (i, c) in curves_v.iter().enumerate() {
        if !seen.insert(c.label.clone()) {
            ctx.push(&format!("curves[{i}].label"), format!("duplicate label `{}`", c.label));
        }
        if let Some(k) = basis.iter().position(|b| *b == c.label) {
            let unit: Vec<i64> = (0..n).map(|j| i64::from(j == k)).collect();
            if c.class != unit {
                ctx.push(
                    &format!("curves[{i}]"),
                    format!("label `{}` is also basis vector {k} but has a different class", c.label),
                );
            }
        }
    }
    for (i, a) in curves_v.iter().enumerate() {
        for b in &curves_v[i + 1..] {
            let v = pair(&gram, &a.class, &b.class);
            if a.irreducible && b.irreducible && v < 0 {
                ctx.push(
                    "curves",
                    format!(
                        "distinct irreducible curves `{}` and `{}` meet negatively ({v})",
                        a.label, b.label
                    ),
                );
            }
        }
    }

    // Cross-check explicit data against the elliptic block.
    if let (Some(e), true) = (&elliptic, obj.contains_key("ns_gram")) {
        if e.ns.rho() != n {
            ctx.push(
                "ns_gram",
                format!("rank {n}, but the elliptic data gives rho = {}", e.ns.rho()),
            );
        } else {
            let lat = &e.ns.lattice;
            for (i, a) in e.ns.curves.iter().enumerate() {
                for b in &e.ns.curves[i..] {
                    let (Some(fa), Some(fb)) = (
                        curves_v.iter().find(|c| c.label == *a),
                        curves_v.iter().find(|c| c.label == *b),
                    ) else {
                        continue;
                    };
                    let file = pair(&gram, &fa.class, &fb.class);
                    let gen = lat
                        .product(e.ns.class(a).expect("curve"), e.ns.class(b).expect("curve"))
                        .expect("rank");
                    if file != gen {
                        ctx.push(
                            "ns_gram",
                            format!("{a}·{b}: file gives {file}, elliptic data gives {gen}"),
                        );
                    }
                }
            }
        }
    }

    // Effective generators.
    let mut gens = Vec::new();
    match obj.get("effective_generators") {
        None => gens.extend(
            curves_v
                .iter()
                .map(|c| EffectiveGenerator::new(Some(c.label.clone()), c.class.iter().map(|&x| int(x)).collect())),
        ),
        Some(Value::Array(list)) => {
            for (i, g) in list.iter().enumerate() {
                let path = format!("effective_generators[{i}]");
                let entry = match g {
                    Value::String(l) => {
                        let class = curves_v
                            .iter()
                            .find(|c| c.label == *l)
                            .map(|c| c.class.clone())
                            .or_else(|| {
                                basis
                                    .iter()
                                    .position(|b| b == l)
                                    .map(|k| (0..n).map(|j| i64::from(j == k)).collect())
                            });
                        match class {
                            Some(c) => Some(EffectiveGenerator::new(
                                Some(l.clone()),
                                c.into_iter().map(int).collect(),
                            )),
                            None => {
                                ctx.push(&path, format!("unknown label `{l}`"));
                                None
                            }
                        }
                    }
                    Value::Array(xs) => {
                        let parsed: Option<Vec<Rational>> = xs
                            .iter()
                            .enumerate()
                            .map(|(k, x)| ctx.exact(x, &format!("{path}[{k}]")))
                            .collect();
                        parsed.map(|c| EffectiveGenerator::new(None, c))
                    }
                    Value::Object(o) => {
                        let label = ctx.string(o.get("label"), &format!("{path}.label"));
                        let class: Option<Vec<Rational>> = match o.get("class").and_then(Value::as_array) {
                            Some(xs) => xs
                                .iter()
                                .enumerate()
                                .map(|(k, x)| ctx.exact(x, &format!("{path}.class[{k}]")))
                                .collect(),
                            None => {
                                ctx.push(&format!("{path}.class"), "missing");
                                None
                            }
                        };
                        label.zip(class).map(|(l, c)| EffectiveGenerator::new(Some(l), c))
                    }
                    other => {
                        ctx.push(
                            &path,
                            format!("expected a label, a class or {{label, class}}, found {other}"),
                        );
                        None
                    }
                };
                if let Some(e) = entry {
                    if e.class.len() != n {
                        ctx.push(&path, format!("has length {}, expected {n}", e.class.len()));
                    } else {
                        gens.push(e);
                    }
                }
            }
        }
        Some(_) => ctx.push("effective_generators", "expected an array"),
    }
    if gens.is_empty() {
        ctx.push("effective_generators", "at least one generator is required");
    }
    for (i, c) in curves_v.iter().enumerate() {
        let q: Vec<Rational> = c.class.iter().map(|&x| int(x)).collect();
        if c.self_intersection < 0 && !gens.iter().any(|g| g.class == q) {
            ctx.push(
                &format!("curves[{i}]"),
                format!("negative curve `{}` is missing from effective_generators", c.label),
            );
        }
    }

    let minus2 = match obj.get("all_negative_curves_are_minus2") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            ctx.push("all_negative_curves_are_minus2", "expected true or false");
            false
        }
    };
    if minus2 {
        for (i, c) in curves_v.iter().enumerate() {
            if c.self_intersection < 0 && c.self_intersection != -2 {
                ctx.push(
                    &format!("curves[{i}]"),
                    format!(
                        "`{}` has square {} but all negative curves are asserted to be (-2)-curves",
                        c.label, c.self_intersection
                    ),
                );
            }
        }
    }

    if !ctx.diags.is_empty() {
        return Err(ctx.diags);
    }
    let model = SurfaceModel::new(name, basis, gram, curves_v, gens)
        .and_then(|m| m.with_minus2_assertion(minus2))
        .map_err(|e| {
            vec![Diagnostic {
                location: format!("{origin}: $"),
                message: e.to_string(),
            }]
        })?;
    Ok(LoadedSurface { model, elliptic })
}

/// Explicit form of a model; `parse_surface` reads it back to an equal model.
pub fn serialize_surface(model: &SurfaceModel) -> String {
    let mut obj = Map::new();
    obj.insert("name".into(), json!(model.name()));
    obj.insert("rho".into(), json!(model.rho()));
    obj.insert("basis".into(), json!(model.basis()));
    obj.insert("ns_gram".into(), json!(model.ns_gram()));
    let curves: Vec<Value> = model
        .curves()
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "class": c.class,
                "self_intersection": c.self_intersection,
                "irreducible": c.irreducible,
            })
        })
        .collect();
    obj.insert("curves".into(), Value::Array(curves));
    let gens: Vec<Value> = model
        .effective_generators()
        .iter()
        .map(|g| {
            let class: Vec<Value> = g.class.iter().map(exact_json).collect();
            match &g.label {
                Some(l) => {
                    let by_label = model
                        .curves()
                        .iter()
                        .find(|c| c.label == *l)
                        .map(|c| c.class.iter().map(|&x| int(x)).collect::<Vec<_>>());
                    if by_label.as_ref() == Some(&g.class) {
                        json!(l)
                    } else {
                        json!({ "label": l, "class": class })
                    }
                }
                None => Value::Array(class),
            }
        })
        .collect();
    obj.insert("effective_generators".into(), Value::Array(gens));
    obj.insert(
        "all_negative_curves_are_minus2".into(),
        json!(model.all_negative_curves_are_minus2()),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
    s.push('\n');
    s
}

/// Label resolution for divisor expressions: curve labels, then basis
/// labels, then labelled generators.
pub fn resolve_label(model: &SurfaceModel, label: &str) -> Option<Vec<Rational>> {
    if let Some(c) = model.curves().iter().find(|c| c.label == label) {
        return Some(c.class.iter().map(|&x| int(x)).collect());
    }
    if let Some(k) = model.basis().iter().position(|b| b == label) {
        return Some((0..model.rho()).map(|j| int(i64::from(j == k))).collect());
    }
    model
        .effective_generators()
        .iter()
        .find(|g| g.label.as_deref() == Some(label))
        .map(|g| g.class.clone())
}

/// Lattice files: `{"name", "rank", "gram", "labels"}` with `rank` and
/// `labels` optional.
pub fn parse_lattice(src: &str, origin: &str) -> Result<Lattice, Vec<Diagnostic>> {
    let mut ctx = Ctx {
        origin,
        diags: Vec::new(),
    };
    let root: Value = serde_json::from_str(src).map_err(|e| {
        vec![Diagnostic {
            location: format!("{origin}:{}:{}", e.line(), e.column()),
            message: format!("syntax error: {e}"),
        }]
    })?;
    let name = ctx.string(root.get("name"), "name").unwrap_or_default();
    let Some(rows) = root.get("gram").and_then(Value::as_array) else {
        ctx.push("gram", "expected an array of rows");
        return Err(ctx.diags);
    };
    let gram: Option<Vec<Vec<i64>>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| ctx.int_row(r, &format!("gram[{i}]")))
        .collect();
    let Some(gram) = gram else { return Err(ctx.diags) };
    if let Some(r) = root.get("rank").and_then(|r| ctx.int(r, "rank")) {
        if r != gram.len() as i64 {
            ctx.push("rank", format!("declared {r} but gram has {} rows", gram.len()));
        }
    }
    let labels: Vec<String> = match root.get("labels").and_then(Value::as_array) {
        Some(a) => a
            .iter()
            .enumerate()
            .filter_map(|(i, x)| ctx.string(Some(x), &format!("labels[{i}]")))
            .collect(),
        None => (1..=gram.len()).map(|i| format!("v{i}")).collect(),
    };
    if !ctx.diags.is_empty() {
        return Err(ctx.diags);
    }
    Lattice::new(name, gram, labels).map_err(|e| {
        vec![Diagnostic {
            location: format!("{origin}: gram"),
            message: e.to_string(),
        }]
    })
}

pub fn serialize_lattice(l: &Lattice) -> String {
    let v = json!({"name": l.name(), "rank": l.rank(), "gram": l.gram(), "labels": l.labels()});
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}
