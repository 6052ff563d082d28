//! Glue between parsed inputs and the core computations.

use nok_core::configmv::{mv_surface, mv_upper_bound_via_a2, ConfigError, MvReport};
use nok_core::exactmath::Rational;
use nok_core::nob::{FlagPoint, FlagSpec};
use nok_core::zariski::{DivisorClass, SurfaceModel};
use num_traits::{Signed, Zero};

use crate::expr::DivisorExpr;
use crate::surface_file::resolve_label;

/// Where the upper bound that certifies an mv value comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundSource {
    /// `2ρ + 1`.
    Generic,
    /// No effective generator has negative square: `mv = 3` for `ρ = 1`
    /// and `4` otherwise.
    NoNegativeCurves,
    /// The A₂ obstruction for surfaces whose negative curves are (−2)-curves.
    A2 { note: String },
}

#[derive(Debug, Clone)]
pub struct MvResult {
    pub report: MvReport,
    pub source: BoundSource,
}

impl MvResult {
    pub fn summary(&self) -> String {
        let status = if self.report.certified {
            "certified"
        } else {
            "lower bound"
        };
        format!("mv = {} ({status})", self.report.mv_value)
    }
}

pub fn mv_for(model: &SurfaceModel) -> Result<MvResult, ConfigError> {
    let negatives: Vec<_> = model.negative_curves().cloned().collect();
    let report = mv_surface(model.rho(), &negatives, model.ns_gram())?;
    let no_negative_generators = model
        .effective_generators()
        .iter()
        .all(|g| !model.pair(&g.class, &g.class).is_negative());
    if negatives.is_empty() && no_negative_generators {
        let bound = if model.rho() == 1 { 3 } else { 4 };
        return Ok(MvResult {
            report: report.with_upper_bound(bound),
            source: BoundSource::NoNegativeCurves,
        });
    }
    if model.all_negative_curves_are_minus2() {
        let ub = mv_upper_bound_via_a2(&model.lattice(), true)?;
        if ub.value < report.upper_bound_used {
            return Ok(MvResult {
                report: report.with_upper_bound(ub.value),
                source: BoundSource::A2 { note: ub.note },
            });
        }
    }
    Ok(MvResult {
        report,
        source: BoundSource::Generic,
    })
}

/// Parses `src` and resolves its labels in `model`.
pub fn parse_divisor(model: &SurfaceModel, src: &str) -> Result<DivisorClass, String> {
    let expr = DivisorExpr::parse(src).map_err(|e| format!("in divisor `{src}`: {e}"))?;
    let mut d = DivisorClass::zero(model.rho());
    for (c, label) in &expr.terms {
        let Some(class) = resolve_label(model, label) else {
            let col = DivisorExpr::label_column(src, label);
            return Err(format!("in divisor `{src}`: unknown label `{label}` at column {col}"));
        };
        d = d.add_scaled(c, &class);
    }
    Ok(d)
}

/// `general` or `at:<label>[:mult]` with multiplicity defaulting to 1.
pub fn parse_point(src: &str) -> Result<FlagPoint, String> {
    if src == "general" {
        return Ok(FlagPoint::General);
    }
    let rest = src
        .strip_prefix("at:")
        .ok_or_else(|| format!("point `{src}`: expected `general` or `at:<label>[:mult]`"))?;
    let (label, mult) = match rest.split_once(':') {
        Some((l, m)) => (
            l,
            m.parse::<i64>()
                .map_err(|_| format!("point `{src}`: bad multiplicity `{m}`"))?,
        ),
        None => (rest, 1),
    };
    if label.is_empty() {
        return Err(format!("point `{src}`: missing curve label"));
    }
    Ok(FlagPoint::Explicit([(label.to_string(), mult)].into_iter().collect()))
}

pub fn flag_text(flag: &FlagSpec) -> String {
    match &flag.point {
        FlagPoint::General => format!("({}, general)", flag.curve),
        FlagPoint::Explicit(m) => {
            let at: Vec<String> = m.iter().map(|(l, k)| format!("{l}:{k}")).collect();
            format!("({}, at {})", flag.curve, at.join(","))
        }
    }
}

/// A class in the model's basis labels, such as `3·L - E`.
pub fn class_text(model: &SurfaceModel, coords: &[Rational]) -> String {
    crate::expr::format_terms(
        coords
            .iter()
            .zip(model.basis())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, l)| (c, l.as_str())),
    )
}
