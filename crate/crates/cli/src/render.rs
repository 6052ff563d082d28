//! Output formats for polygons and exact numbers.

use std::fmt::Write as _;
use std::io::IsTerminal;

use nok_core::exactmath::{to_i64, Rational};
use nok_core::nob::{NOBPolygon, PiecewiseLinearFn};
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

/// Integers as JSON numbers, everything else as a `"p/q"` string.
pub fn exact_json(q: &Rational) -> Value {
    if q.denom().is_one() {
        if let Some(n) = to_i64(q) {
            return json!(n);
        }
    }
    json!(q.to_string())
}

pub fn point_text(p: &(Rational, Rational)) -> String {
    format!("({}, {})", p.0, p.1)
}

pub fn vertices_text(poly: &NOBPolygon) -> String {
    poly.vertices.iter().map(point_text).collect::<Vec<_>>().join(", ")
}

fn plf_json(f: &PiecewiseLinearFn) -> Value {
    let pieces: Vec<Value> = f
        .pieces
        .iter()
        .enumerate()
        .map(|(k, p)| {
            json!({
                "start": exact_json(&f.breakpoints[k]),
                "end": exact_json(&f.breakpoints[k + 1]),
                "slope": exact_json(&p.slope),
                "intercept": exact_json(&p.intercept),
            })
        })
        .collect();
    Value::Array(pieces)
}

pub fn polygon_json(poly: &NOBPolygon) -> Value {
    json!({
        "vertex_count": poly.vertices.len(),
        "vertices": poly.vertices.iter().map(|(t, s)| json!([exact_json(t), exact_json(s)])).collect::<Vec<_>>(),
        "area": exact_json(&poly.area),
        "nu": exact_json(&poly.nu),
        "mu": exact_json(&poly.mu),
        "alpha": plf_json(&poly.alpha),
        "beta": plf_json(&poly.beta),
    })
}

pub fn polygon_text(poly: &NOBPolygon) -> String {
    let mut s = String::new();
    writeln!(s, "vertices ({}): {}", poly.vertices.len(), vertices_text(poly)).unwrap();
    writeln!(s, "area = {}", poly.area).unwrap();
    writeln!(s, "nu = {}, mu = {}", poly.nu, poly.mu).unwrap();
    writeln!(s, "alpha: {}", poly.alpha).unwrap();
    writeln!(s, "beta: {}", poly.beta).unwrap();
    s
}

/// Exact vertex list; the golden format.
pub fn polygon_csv(poly: &NOBPolygon) -> String {
    let mut s = String::from("t,s\n");
    for (t, v) in &poly.vertices {
        writeln!(s, "{t},{v}").unwrap();
    }
    s
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn f(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

/// A 640×480 drawing of the polygon with labelled axes.
pub fn polygon_svg(poly: &NOBPolygon, title: &str) -> String {
    let ts: Vec<f64> = poly.vertices.iter().map(|p| f(&p.0)).collect();
    let ss: Vec<f64> = poly.vertices.iter().map(|p| f(&p.1)).collect();
    let lo = |v: &[f64]| v.iter().cloned().fold(0.0, f64::min);
    let hi = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let (t0, t1, s0, s1) = (lo(&ts), hi(&ts), lo(&ss), hi(&ss));
    let scale = ((WIDTH - 2.0 * MARGIN) / (t1 - t0).max(1e-9)).min((HEIGHT - 2.0 * MARGIN) / (s1 - s0).max(1e-9));
    let x = |t: f64| MARGIN + (t - t0) * scale;
    let y = |s: f64| HEIGHT - MARGIN - (s - s0) * scale;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="480" viewBox="0 0 640 480">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="640" height="480" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="320" y="30" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        escape(title)
    )
    .unwrap();
    // axes
    let (ax, ay) = (x(t0), y(s0));
    writeln!(
        out,
        r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{:.2}" y2="{ay:.2}" stroke="black"/>"#,
        WIDTH - MARGIN / 2.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{ax:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN / 2.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">t</text>"#,
        WIDTH - MARGIN / 2.0 + 6.0,
        ay + 4.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">s</text>"#,
        ax - 4.0,
        MARGIN / 2.0 - 8.0
    )
    .unwrap();
    let mut ticks_t: Vec<&Rational> = poly.vertices.iter().map(|p| &p.0).collect();
    ticks_t.sort();
    ticks_t.dedup();
    for t in ticks_t {
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{t}</text>"#,
            x(f(t)),
            ay + 18.0
        )
        .unwrap();
    }
    let mut ticks_s: Vec<&Rational> = poly.vertices.iter().map(|p| &p.1).collect();
    ticks_s.sort();
    ticks_s.dedup();
    for s in ticks_s {
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{s}</text>"#,
            ax - 8.0,
            y(f(s)) + 4.0
        )
        .unwrap();
    }
    let pts: Vec<String> = ts
        .iter()
        .zip(&ss)
        .map(|(t, s)| format!("{:.2},{:.2}", x(*t), y(*s)))
        .collect();
    writeln!(
        out,
        r##"<polygon points="{}" fill="#9ecae1" fill-opacity="0.6" stroke="#08519c" stroke-width="2"/>"##,
        pts.join(" ")
    )
    .unwrap();
    for (t, s) in ts.iter().zip(&ss) {
        writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#08519c"/>"##,
            x(*t),
            y(*s)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `NOK_COLOR=1` forces colour, `NOK_COLOR=0` disables it, otherwise colour
/// follows whether stdout is a terminal.
pub fn color_enabled() -> bool {
    match std::env::var("NOK_COLOR").as_deref() {
        Ok("1") => true,
        Ok("0") => false,
        _ => std::io::stdout().is_terminal(),
    }
}

pub fn paint(s: &str, ansi: &str, enabled: bool) -> String {
    if enabled {
        format!("\x1b[{ansi}m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}
