//! Argument parsing and subcommand dispatch.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use nok_core::ellsurf::{check_invariants, height_pairing, shioda_tate_rank};
use nok_core::exactmath::int;
use nok_core::lattice::{embeds_root, roots_of, EmbeddingVerdict, Lattice, DEFAULT_MODULI, DEFAULT_SEARCH_BOUND};
use nok_core::nob::{polygon, FlagSpec};
use nok_core::zariski::{mu_of, nu_of, zariski_decompose, SurfaceModel};
use serde_json::{json, Value};

use crate::analysis::{class_text, flag_text, mv_for, parse_divisor, parse_point, BoundSource};
use crate::expr::format_terms;
use crate::fixtures::read_source;
use crate::render::{color_enabled, exact_json, polygon_csv, polygon_json, polygon_svg, polygon_text};
use crate::search::{search_vertices, Grid, Outcome};
use crate::surface_file::{parse_lattice, parse_surface, serialize_lattice, LoadedSurface};
use crate::verify::{rows_json, rows_text, verify_paper, Options};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nok",
    version,
    about = "Exact Zariski decompositions, Newton-Okounkov polygons and Neron-Severi lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice invariants and root-lattice embeddings.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Elliptic surfaces.
    Ellsurf {
        #[command(subcommand)]
        command: EllsurfCommand,
    },
    /// Maximal vertex count mv(S) over the listed negative curves.
    Mv {
        surface: String,
        #[arg(long)]
        json: bool,
    },
    /// Zariski decomposition D = P + N.
    Zariski {
        surface: String,
        #[arg(short = 'D', value_name = "EXPR", allow_hyphen_values = true)]
        divisor: String,
        #[arg(long)]
        json: bool,
    },
    /// Coefficient of a curve in the negative part of D.
    Nu {
        surface: String,
        #[arg(short = 'D', value_name = "EXPR", allow_hyphen_values = true)]
        divisor: String,
        #[arg(long, value_name = "LABEL")]
        flag: String,
        #[arg(long)]
        json: bool,
    },
    /// Largest t with D - tC pseudo-effective.
    Mu {
        surface: String,
        #[arg(short = 'D', value_name = "EXPR", allow_hyphen_values = true)]
        divisor: String,
        #[arg(long, value_name = "LABEL")]
        flag: String,
        #[arg(long)]
        json: bool,
    },
    /// Newton-Okounkov polygon of D for the flag (C, p).
    Nob {
        surface: String,
        #[arg(short = 'D', value_name = "EXPR", allow_hyphen_values = true)]
        divisor: String,
        #[arg(long, value_name = "LABEL")]
        flag: String,
        /// `general` or `at:<label>[:mult]`.
        #[arg(long, default_value = "general")]
        point: String,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// First ample D and flag on the grid whose polygon has TARGET vertices.
    Search {
        surface: String,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = -3, allow_negative_numbers = true)]
        coeff_min: i64,
        #[arg(long, default_value_t = 6, allow_negative_numbers = true)]
        coeff_max: i64,
        #[arg(long)]
        json: bool,
    },
    /// Recomputes every reference value from the fixtures.
    VerifyPaper {
        #[arg(long)]
        json: bool,
        /// Directory of `.surface` files overriding the bundled ones.
        #[arg(long, value_name = "DIR")]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum LatticeCommand {
    /// Gram matrix, discriminant, signature and roots.
    Info {
        /// A name such as `U+A1`, a lattice file or a surface file.
        lattice: String,
        #[arg(long)]
        json: bool,
    },
    /// Decides whether a root lattice embeds into a target lattice.
    Embed {
        source: String,
        target: String,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        bound: i64,
        #[arg(long = "mod", value_delimiter = ',', default_values_t = DEFAULT_MODULI)]
        moduli: Vec<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum EllsurfCommand {
    /// Builds NS from the elliptic block of a surface file.
    Build {
        surface: String,
        #[arg(long)]
        json: bool,
    },
}

/// A failure with its exit code; the message goes to stderr.
struct Failure {
    code: i32,
    message: String,
}

fn domain(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_DOMAIN,
        message: message.into(),
    }
}

type CmdResult = Result<String, Failure>;

fn load_surface(arg: &str) -> Result<LoadedSurface, Failure> {
    let src = read_source(arg).map_err(|e| domain(format!("{arg}: {e}")))?;
    parse_surface(&src, arg).map_err(|d| {
        let lines: Vec<String> = d.iter().map(ToString::to_string).collect();
        domain(lines.join("\n"))
    })
}

fn load_lattice(arg: &str) -> Result<Lattice, Failure> {
    let path = Path::new(arg);
    if path.is_file() || crate::fixtures::bundled(arg).is_some() {
        let src = read_source(arg).map_err(|e| domain(format!("{arg}: {e}")))?;
        let is_lattice_file = serde_json::from_str::<Value>(&src)
            .ok()
            .is_some_and(|v| v.get("gram").is_some());
        if is_lattice_file {
            return parse_lattice(&src, arg)
                .map_err(|d| domain(d.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")));
        }
        let model = load_surface(arg)?.model;
        return Ok(model.lattice().with_name(format!("NS({})", model.name())));
    }
    Lattice::from_name(arg).map_err(|e| domain(e.to_string()))
}

fn json_out(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn mat_json(m: &[Vec<i64>]) -> Value {
    json!(m)
}

fn cmd_lattice_info(arg: &str, as_json: bool) -> CmdResult {
    let l = load_lattice(arg)?;
    let sig = l.signature();
    let roots = if l.is_negative_definite() {
        Some(roots_of(&l).map_err(|e| domain(e.to_string()))?.len())
    } else {
        None
    };
    if as_json {
        let mut v: Value = serde_json::from_str(&serialize_lattice(&l)).expect("own output");
        v["discriminant"] = json!(l.discriminant().to_string());
        v["signature"] = json!([sig.n_plus, sig.n_minus, sig.n_zero]);
        v["even"] = json!(l.is_even());
        v["negative_definite"] = json!(l.is_negative_definite());
        v["roots"] = json!(roots);
        return Ok(json_out(&v));
    }
    let mut o = String::new();
    writeln!(o, "{l}").unwrap();
    writeln!(o, "labels: {}", l.labels().join(", ")).unwrap();
    writeln!(o, "disc = {}", l.discriminant()).unwrap();
    writeln!(
        o,
        "signature = ({}, {}), nullity {}",
        sig.n_plus, sig.n_minus, sig.n_zero
    )
    .unwrap();
    writeln!(o, "even = {}", l.is_even()).unwrap();
    if let Some(r) = roots {
        writeln!(o, "roots = {r}").unwrap();
    }
    Ok(o)
}

fn cmd_lattice_embed(source: &str, target: &str, bound: i64, moduli: &[u64], as_json: bool) -> CmdResult {
    let s = load_lattice(source)?;
    let t = load_lattice(target)?;
    let verdict = embeds_root(&s, &t, bound, moduli).map_err(|e| domain(e.to_string()))?;
    let (v, text) = match &verdict {
        EmbeddingVerdict::Yes { witness } => (
            json!({"verdict": "yes", "witness": witness}),
            format!(
                "Yes: {} -> {} via {}\n",
                s.name(),
                t.name(),
                witness.iter().map(|w| format!("{w:?}")).collect::<Vec<_>>().join(", ")
            ),
        ),
        EmbeddingVerdict::No { obstruction } => (
            json!({
                "verdict": "no",
                "modulus": obstruction.modulus,
                "half_norm": obstruction.half_norm,
                "assignments": obstruction.assignments.to_string(),
                "recheck": obstruction.recheck(&s, &t),
            }),
            format!(
                "No: no solution mod {} ({} residue assignments{}), recheck {}\n",
                obstruction.modulus,
                obstruction.assignments,
                if obstruction.half_norm {
                    ", half-norm equations"
                } else {
                    ""
                },
                if obstruction.recheck(&s, &t) { "ok" } else { "FAILED" }
            ),
        ),
        EmbeddingVerdict::Unknown { search_bound, moduli } => (
            json!({"verdict": "unknown", "search_bound": search_bound, "moduli": moduli}),
            format!(
                "Unknown: no witness with coordinates in [-{search_bound}, {search_bound}] and no obstruction mod {}\n",
                moduli.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            ),
        ),
    };
    Ok(if as_json { json_out(&v) } else { text })
}

fn cmd_ellsurf_build(arg: &str, as_json: bool) -> CmdResult {
    let loaded = load_surface(arg)?;
    let Some(ell) = loaded.elliptic else {
        return Err(domain(format!("{arg}: no elliptic block")));
    };
    let ns = &ell.ns;
    let r = shioda_tate_rank(ns.rho(), &ell.spec).map_err(|e| domain(e.to_string()))?;
    check_invariants(ns).map_err(domain)?;
    let mut heights = Vec::new();
    let has_reducible = ell.spec.fibres.iter().any(|f| f.is_reducible());
    if !has_reducible {
        for p in &ell.spec.sections {
            for q in &ell.spec.sections {
                if p.label <= q.label {
                    let h = height_pairing(p, q, &ell.spec).map_err(|e| domain(e.to_string()))?;
                    heights.push((p.label.clone(), q.label.clone(), h));
                }
            }
        }
    }
    if as_json {
        let classes: Vec<Value> = ns
            .classes
            .iter()
            .map(|(l, c)| json!({"label": l, "class": c}))
            .collect();
        let v = json!({
            "rho": ns.rho(),
            "mordell_weil_rank": r,
            "lattice": serde_json::from_str::<Value>(&serialize_lattice(&ns.lattice)).expect("own output"),
            "discriminant": ns.lattice.discriminant().to_string(),
            "classes": classes,
            "curves": ns.curves,
            "base_change": mat_json(&ns.base_change),
            "heights": heights.iter().map(|(p, q, h)| json!({"p": p, "q": q, "height": exact_json(h)})).collect::<Vec<_>>(),
        });
        return Ok(json_out(&v));
    }
    let mut o = String::new();
    writeln!(o, "rho = {}, Mordell-Weil rank r = {r}", ns.rho()).unwrap();
    writeln!(o, "NS = {}", ns.lattice).unwrap();
    writeln!(o, "basis: {}", ns.lattice.labels().join(", ")).unwrap();
    writeln!(o, "disc = {}", ns.lattice.discriminant()).unwrap();
    for (p, q, h) in &heights {
        writeln!(o, "<{p},{q}> = {h}").unwrap();
    }
    for (l, c) in &ns.classes {
        let mark = if ns.curves.contains(l) { "curve" } else { "class" };
        writeln!(o, "{mark} {l} = {c:?}").unwrap();
    }
    writeln!(
        o,
        "base change (columns in (O), F, Theta, D_P coordinates): {:?}",
        ns.base_change
    )
    .unwrap();
    Ok(o)
}

fn cmd_mv(arg: &str, as_json: bool) -> CmdResult {
    let model = load_surface(arg)?.model;
    let r = mv_for(&model).map_err(|e| domain(e.to_string()))?;
    let bound_note = match &r.source {
        BoundSource::Generic => "2*rho + 1".to_string(),
        BoundSource::NoNegativeCurves => "no negative curves".to_string(),
        BoundSource::A2 { note } => note.clone(),
    };
    if as_json {
        let v = json!({
            "surface": model.name(),
            "mv": r.report.mv_value,
            "certified": r.report.certified,
            "upper_bound": r.report.upper_bound_used,
            "bound_source": bound_note,
            "witness": r.report.witness.labels,
            "configs_examined": r.report.configs_examined,
        });
        return Ok(json_out(&v));
    }
    let mut o = String::new();
    writeln!(o, "{}", r.summary()).unwrap();
    writeln!(o, "witness: {}", r.report.witness).unwrap();
    writeln!(o, "upper bound: {} ({bound_note})", r.report.upper_bound_used).unwrap();
    writeln!(o, "configurations examined: {}", r.report.configs_examined).unwrap();
    Ok(o)
}

fn surface_and_divisor(arg: &str, d: &str) -> Result<(SurfaceModel, nok_core::zariski::DivisorClass), Failure> {
    let model = load_surface(arg)?.model;
    let d = parse_divisor(&model, d).map_err(domain)?;
    Ok((model, d))
}

fn cmd_zariski(arg: &str, expr: &str, as_json: bool) -> CmdResult {
    let (model, d) = surface_and_divisor(arg, expr)?;
    let z = zariski_decompose(&model, &d).map_err(|e| domain(e.to_string()))?;
    z.verify(&model, &d)
        .map_err(|e| domain(format!("decomposition check failed: {e}")))?;
    let p = class_text(&model, &z.positive.coords);
    let n = format_terms(z.negative_coeffs.iter().map(|(l, c)| (c, l.as_str())));
    if as_json {
        let v = json!({
            "positive": z.positive.coords.iter().map(exact_json).collect::<Vec<_>>(),
            "positive_text": p,
            "negative": z.negative_coeffs.iter().map(|(l, c)| json!({"curve": l, "coeff": exact_json(c)})).collect::<Vec<_>>(),
            "negative_text": n,
            "p_squared": exact_json(&model.pair(&z.positive.coords, &z.positive.coords)),
        });
        return Ok(json_out(&v));
    }
    Ok(format!("P = {p}, N = {n}\n"))
}

fn cmd_nu_mu(arg: &str, expr: &str, flag: &str, as_json: bool, mu: bool) -> CmdResult {
    let (model, d) = surface_and_divisor(arg, expr)?;
    let (name, v) = if mu {
        ("mu", mu_of(&model, &d, flag))
    } else {
        ("nu", nu_of(&model, &d, flag))
    };
    let v = v.map_err(|e| domain(e.to_string()))?;
    if as_json {
        return Ok(json_out(&json!({ name: exact_json(&v), "curve": flag })));
    }
    Ok(format!("{name}_{flag}(D) = {v}\n"))
}

struct NobArgs<'a> {
    surface: &'a str,
    divisor: &'a str,
    flag: &'a str,
    point: &'a str,
    svg: Option<&'a Path>,
    csv: Option<&'a Path>,
    json: bool,
}

fn cmd_nob(a: NobArgs) -> CmdResult {
    let (model, d) = surface_and_divisor(a.surface, a.divisor)?;
    let flag = FlagSpec {
        curve: a.flag.to_string(),
        point: parse_point(a.point).map_err(domain)?,
    };
    let poly = polygon(&model, &d, &flag).map_err(|e| domain(e.to_string()))?;
    let title = format!(
        "{}: D = {}, flag {}",
        model.name(),
        class_text(&model, &d.coords),
        flag_text(&flag)
    );
    if let Some(path) = a.svg {
        std::fs::write(path, polygon_svg(&poly, &title)).map_err(|e| domain(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = a.csv {
        std::fs::write(path, polygon_csv(&poly)).map_err(|e| domain(format!("{}: {e}", path.display())))?;
    }
    if a.json {
        return Ok(json_out(&polygon_json(&poly)));
    }
    Ok(format!("{title}\n{}", polygon_text(&poly)))
}

fn cmd_search(arg: &str, target: usize, grid: Grid, as_json: bool) -> CmdResult {
    let model = load_surface(arg)?.model;
    let outcome = search_vertices(&model, target, grid).map_err(|e| domain(e.to_string()))?;
    match outcome {
        Outcome::Found { hit, examined } => {
            let dq: Vec<_> = hit.divisor.iter().map(|&x| int(x)).collect();
            let d_text = class_text(&model, &dq);
            if as_json {
                let mut v = polygon_json(&hit.polygon);
                v["found"] = json!(true);
                v["divisor"] = json!(hit.divisor);
                v["divisor_text"] = json!(d_text);
                v["flag"] = json!(flag_text(&hit.flag));
                v["examined"] = json!(examined);
                return Ok(json_out(&v));
            }
            Ok(format!(
                "found: D = {d_text}, flag {}, {} vertices ({examined} candidate{} examined)\n{}",
                flag_text(&hit.flag),
                hit.polygon.vertices.len(),
                if examined == 1 { "" } else { "s" },
                polygon_text(&hit.polygon)
            ))
        }
        Outcome::Exhausted { examined } => {
            if as_json {
                return Ok(json_out(&json!({"found": false, "examined": examined})));
            }
            Ok(format!(
                "exhausted: no polygon with {target} vertices among {examined} candidates in [{}, {}]\n",
                grid.coeff_min, grid.coeff_max
            ))
        }
    }
}

fn dispatch(cli: Cli) -> Result<(String, i32), Failure> {
    let ok = |s: String| Ok((s, EXIT_OK));
    match cli.command {
        Command::Lattice { command } => match command {
            LatticeCommand::Info { lattice, json } => ok(cmd_lattice_info(&lattice, json)?),
            LatticeCommand::Embed {
                source,
                target,
                bound,
                moduli,
                json,
            } => ok(cmd_lattice_embed(&source, &target, bound, &moduli, json)?),
        },
        Command::Ellsurf {
            command: EllsurfCommand::Build { surface, json },
        } => ok(cmd_ellsurf_build(&surface, json)?),
        Command::Mv { surface, json } => ok(cmd_mv(&surface, json)?),
        Command::Zariski { surface, divisor, json } => ok(cmd_zariski(&surface, &divisor, json)?),
        Command::Nu {
            surface,
            divisor,
            flag,
            json,
        } => ok(cmd_nu_mu(&surface, &divisor, &flag, json, false)?),
        Command::Mu {
            surface,
            divisor,
            flag,
            json,
        } => ok(cmd_nu_mu(&surface, &divisor, &flag, json, true)?),
        Command::Nob {
            surface,
            divisor,
            flag,
            point,
            svg,
            csv,
            json,
        } => ok(cmd_nob(NobArgs {
            surface: &surface,
            divisor: &divisor,
            flag: &flag,
            point: &point,
            svg: svg.as_deref(),
            csv: csv.as_deref(),
            json,
        })?),
        Command::Search {
            surface,
            target,
            coeff_min,
            coeff_max,
            json,
        } => ok(cmd_search(&surface, target, Grid { coeff_min, coeff_max }, json)?),
        Command::VerifyPaper { json, fixtures, seed } => {
            let rows = verify_paper(&Options { fixtures, seed });
            let code = if rows.iter().all(|r| r.pass) {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            };
            let text = if json {
                json_out(&rows_json(&rows))
            } else {
                rows_text(&rows, color_enabled())
            };
            Ok((text, code))
        }
    }
}

/// Runs one invocation; `args` includes the program name. Returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            let _ = out.flush();
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
