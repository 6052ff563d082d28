//! Grid search for a divisor and flag whose polygon has a given number of
//! vertices.

use nok_core::configmv::pair;
use nok_core::nob::{polygon, FlagPoint, FlagSpec, NOBPolygon};
use nok_core::zariski::{is_pseudo_effective, DivisorClass, SurfaceModel};
use num_traits::Signed;
use thiserror::Error;

use crate::analysis::mv_for;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("target {target} is outside [3, mv = {mv}]")]
    TargetOutOfRange { target: usize, mv: usize },
    #[error("empty coefficient range [{min}, {max}]")]
    EmptyGrid { min: i64, max: i64 },
    #[error("{0}")]
    Model(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub coeff_min: i64,
    pub coeff_max: i64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            coeff_min: -3,
            coeff_max: 6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Hit {
    pub divisor: Vec<i64>,
    pub flag: FlagSpec,
    pub polygon: NOBPolygon,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Found { hit: Box<Hit>, examined: usize },
    Exhausted { examined: usize },
}

/// `D² > 0` and `D` positive on every listed curve and effective generator.
pub fn is_ample(model: &SurfaceModel, d: &[i64]) -> bool {
    let g = model.ns_gram();
    if pair(g, d, d) <= 0 || model.curves().iter().any(|c| pair(g, d, &c.class) <= 0) {
        return false;
    }
    let dq = DivisorClass::from_ints(d);
    model
        .effective_generators()
        .iter()
        .all(|e| model.pair(&dq.coords, &e.class).is_positive())
        && is_pseudo_effective(model, &dq).unwrap_or(false)
}

/// Every listed irreducible curve as flag curve; for each, the general
/// point, then a point on one other curve `Cᵢ` with local multiplicity
/// `1..=Cᵢ·C`.
pub fn flags(model: &SurfaceModel) -> Vec<FlagSpec> {
    let g = model.ns_gram();
    let mut out = Vec::new();
    for c in model.curves().iter().filter(|c| c.irreducible) {
        out.push(FlagSpec::general(c.label.clone()));
        for other in model.curves().iter().filter(|o| o.irreducible && o.label != c.label) {
            for m in 1..=pair(g, &other.class, &c.class) {
                out.push(FlagSpec {
                    curve: c.label.clone(),
                    point: FlagPoint::Explicit([(other.label.clone(), m)].into_iter().collect()),
                });
            }
        }
    }
    out
}

/// Integer vectors of length `rho` in `[min, max]`, first coordinate slowest.
fn grid(rho: usize, min: i64, max: i64) -> impl Iterator<Item = Vec<i64>> {
    let mut next = Some(vec![min; rho]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for k in (0..rho).rev() {
            if succ[k] < max {
                succ[k] += 1;
                next = Some(succ);
                break;
            }
            succ[k] = min;
        }
        Some(current)
    })
}

/// Returns the first `(D, flag)` in grid order whose polygon has exactly
/// `target` vertices.
pub fn search_vertices(model: &SurfaceModel, target: usize, grid_bounds: Grid) -> Result<Outcome, SearchError> {
    let mv = mv_for(model)
        .map_err(|e| SearchError::Model(e.to_string()))?
        .report
        .mv_value;
    if target < 3 || target > mv {
        return Err(SearchError::TargetOutOfRange { target, mv });
    }
    let Grid { coeff_min, coeff_max } = grid_bounds;
    if coeff_min > coeff_max {
        return Err(SearchError::EmptyGrid {
            min: coeff_min,
            max: coeff_max,
        });
    }
    let flags = flags(model);
    let mut examined = 0;
    for d in grid(model.rho(), coeff_min, coeff_max).filter(|d| is_ample(model, d)) {
        let dq = DivisorClass::from_ints(&d);
        for flag in &flags {
            examined += 1;
            let Ok(poly) = polygon(model, &dq, flag) else { continue };
            if poly.vertices.len() == target {
                return Ok(Outcome::Found {
                    hit: Box::new(Hit {
                        divisor: d,
                        flag: flag.clone(),
                        polygon: poly,
                    }),
                    examined,
                });
            }
        }
    }
    Ok(Outcome::Exhausted { examined })
}
