//! Newton–Okounkov polygons of big divisors on surfaces.
//!
//! For a flag `S ⊃ C ∋ p` write `D_t = D − tC = P_t + N_t`. The polygon is
//! `{(t, s) : ν ≤ t ≤ μ, α(t) ≤ s ≤ β(t)}` with `α(t) = (N_t·C)_p` and
//! `β(t) = α(t) + P_t·C`. On each interval where `supp N_t` is constant the
//! coefficients of `N_t` are affine in `t`, so the sweep is exact.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactmath::{int, Rational};
use crate::zariski::{mu_of, zariski_decompose, DivisorClass, SurfaceModel, ZariskiError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NobError {
    #[error(transparent)]
    Zariski(#[from] ZariskiError),
    #[error("divisor is not big (P^2 = {0} at t = nu)")]
    NotBig(Rational),
    #[error("flag curve `{curve}` enters the negative part of D_t just after t = {t}")]
    FlagInNegativePart { curve: String, t: Rational },
    #[error("flag curve `{0}` is not irreducible")]
    NotIrreducible(String),
    #[error("local multiplicity of `{label}` at p is {mult}, outside [0, {max}]")]
    BadMultiplicity { label: String, mult: i64, max: i64 },
    #[error("point data names the flag curve `{0}` itself")]
    PointOnFlagCurve(String),
    #[error("sweep piece disagrees with an independent decomposition at t = {t}")]
    Validation { t: Rational },
}

pub type Result<T, E = NobError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlagPoint {
    /// Off every other listed curve.
    General,
    /// Local intersection multiplicities `(Cᵢ·C)_p` by curve label; absent
    /// labels count as 0.
    Explicit(BTreeMap<String, i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagSpec {
    pub curve: String,
    pub point: FlagPoint,
}

impl FlagSpec {
    pub fn general(curve: impl Into<String>) -> Self {
        FlagSpec {
            curve: curve.into(),
            point: FlagPoint::General,
        }
    }

    pub fn at(curve: impl Into<String>, multiplicities: &[(&str, i64)]) -> Self {
        FlagSpec {
            curve: curve.into(),
            point: FlagPoint::Explicit(multiplicities.iter().map(|(l, m)| (l.to_string(), *m)).collect()),
        }
    }

    fn multiplicity(&self, label: &str) -> i64 {
        match &self.point {
            FlagPoint::General => 0,
            FlagPoint::Explicit(m) => m.get(label).copied().unwrap_or(0),
        }
    }
}

/// `t ↦ intercept + slope·t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Affine { slope, intercept }
    }

    /// The affine function with value `value` at `t0` and the given slope.
    pub fn through(t0: &Rational, value: &Rational, slope: &Rational) -> Self {
        Affine::new(slope.clone(), value - slope * t0)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        &self.intercept + &self.slope * t
    }

    pub fn add(&self, other: &Affine) -> Affine {
        Affine::new(&self.slope + &other.slope, &self.intercept + &other.intercept)
    }

    pub fn scale(&self, c: &Rational) -> Affine {
        Affine::new(&self.slope * c, &self.intercept * c)
    }

    pub fn zero() -> Affine {
        Affine::new(Rational::zero(), Rational::zero())
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.slope.is_zero(), self.intercept.is_zero()) {
            (true, _) => write!(f, "{}", self.intercept),
            (false, true) => write!(f, "{}*t", self.slope),
            (false, false) if self.intercept.is_negative() => {
                write!(f, "{}*t - {}", self.slope, -&self.intercept)
            }
            (false, false) => write!(f, "{}*t + {}", self.slope, self.intercept),
        }
    }
}

/// One interval of constant Zariski support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPiece {
    pub start: Rational,
    pub end: Rational,
    pub support: Vec<String>,
    /// `aᵢ(t)` for each support curve, in support order.
    pub coeffs: Vec<Affine>,
    /// Coordinates of `P_t`.
    pub positive: Vec<Affine>,
    /// `P_t·C`.
    pub flag_degree: Affine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep {
    pub nu: Rational,
    pub mu: Rational,
    pub pieces: Vec<SweepPiece>,
}

impl Sweep {
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut b = vec![self.nu.clone()];
        b.extend(self.pieces.iter().map(|p| p.end.clone()));
        b
    }
}

fn lex_negative(value: &Rational, slope: &Rational) -> bool {
    value.is_negative() || (value.is_zero() && slope.is_negative())
}

struct Germ {
    support: Vec<usize>,
    /// Coefficients and their derivatives in `t`.
    a: Vec<(Rational, Rational)>,
}

/// Zariski support of `D_{t+ε}` for infinitesimal `ε > 0`: Fujita's
/// iteration over first-order values compared lexicographically.
fn germ(model: &SurfaceModel, dt: &[Rational], c: &[Rational]) -> Result<Germ> {
    let negatives = model.negative_indices();
    let minus_c: Vec<Rational> = c.iter().map(|x| -x).collect();
    let mut support: Vec<usize> = Vec::new();
    let mut gram = crate::exactmath::RMatrix::zeros(0, 0);
    loop {
        let a0 = model.orthogonal_coefficients(&support, &gram, dt);
        let a1 = model.orthogonal_coefficients(&support, &gram, &minus_c);
        let mut p0 = DivisorClass::new(dt.to_vec());
        let mut p1 = DivisorClass::new(minus_c.clone());
        for ((x0, x1), &i) in a0.iter().zip(&a1).zip(&support) {
            let ci = model.curve_q(i);
            p0 = p0.add_scaled(&-x0, &ci);
            p1 = p1.add_scaled(&-x1, &ci);
        }
        let added: Vec<usize> = negatives
            .iter()
            .copied()
            .filter(|i| {
                let ci = model.curve_q(*i);
                !support.contains(i) && lex_negative(&model.pair(&p0.coords, &ci), &model.pair(&p1.coords, &ci))
            })
            .collect();
        if added.is_empty() {
            let mut kept = Germ {
                support: Vec::new(),
                a: Vec::new(),
            };
            for ((x0, x1), &i) in a0.into_iter().zip(a1).zip(&support) {
                if lex_negative(&x0, &x1) {
                    return Err(ZariskiError::Invariant(format!(
                        "negative coefficient on {} in the sweep",
                        model.curves()[i].label
                    ))
                    .into());
                }
                if !(x0.is_zero() && x1.is_zero()) {
                    kept.support.push(i);
                    kept.a.push((x0, x1));
                }
            }
            return Ok(kept);
        }
        support.extend(added);
        support.sort_unstable();
        gram = model.check_support(&support)?;
    }
}

/// Exact sweep of `D_t = D − tC` over `[ν, μ]`, split where the support of
/// `N_t` changes. Every piece is re-checked at its midpoint against an
/// independent decomposition.
pub fn sweep(model: &SurfaceModel, d: &DivisorClass, flag: &FlagSpec) -> Result<Sweep> {
    model.check_dim(d)?;
    let fi = model.curve_index(&flag.curve)?;
    if !model.curves()[fi].irreducible {
        return Err(NobError::NotIrreducible(flag.curve.clone()));
    }
    let c = model.curve_q(fi);
    let z0 = zariski_decompose(model, d)?;
    let vol = model.pair(&z0.positive.coords, &z0.positive.coords);
    if !vol.is_positive() {
        return Err(NobError::NotBig(vol));
    }
    let nu = z0.coeff(&flag.curve);
    let mu = mu_of(model, d, &flag.curve)?;
    let at = |t: &Rational| d.add_scaled(&-t, &c);

    let mut pieces: Vec<SweepPiece> = Vec::new();
    let mut t = nu.clone();
    while t < mu {
        let dt = at(&t);
        let g = germ(model, &dt.coords, &c)?;
        if g.support.contains(&fi) {
            return Err(NobError::FlagInNegativePart {
                curve: flag.curve.clone(),
                t,
            });
        }
        let coeffs: Vec<Affine> = g.a.iter().map(|(v, s)| Affine::through(&t, v, s)).collect();
        // P_t = D − tC − Σ aᵢ(t) Cᵢ, coordinatewise.
        let mut positive: Vec<Affine> = d
            .coords
            .iter()
            .zip(&c)
            .map(|(x, y)| Affine::new(-y, x.clone()))
            .collect();
        for (a, &i) in coeffs.iter().zip(&g.support) {
            for (p, ci) in positive.iter_mut().zip(model.curve_q(i)) {
                *p = p.add(&a.scale(&-ci));
            }
        }
        let pairing = |v: &[Rational]| {
            let slope: Vec<Rational> = positive.iter().map(|a| a.slope.clone()).collect();
            let icpt: Vec<Rational> = positive.iter().map(|a| a.intercept.clone()).collect();
            Affine::new(model.pair(&slope, v), model.pair(&icpt, v))
        };

        let mut next = mu.clone();
        let mut consider = |root: Rational| {
            if root > t && root < next {
                next = root;
            }
        };
        for j in model.negative_indices() {
            if g.support.contains(&j) {
                continue;
            }
            let f = pairing(&model.curve_q(j));
            if f.slope.is_negative() {
                consider(-&f.intercept / &f.slope);
            }
        }
        for a in &coeffs {
            if a.slope.is_negative() {
                consider(-&a.intercept / &a.slope);
            }
        }

        let mid = (&t + &next) / int(2);
        let check = zariski_decompose(model, &at(&mid))?;
        let expected_p: Vec<Rational> = positive.iter().map(|a| a.eval(&mid)).collect();
        let expected_n: Vec<(String, Rational)> = g
            .support
            .iter()
            .zip(&coeffs)
            .map(|(&i, a)| (model.curves()[i].label.clone(), a.eval(&mid)))
            .collect();
        if check.positive.coords != expected_p || check.negative_coeffs != expected_n {
            return Err(NobError::Validation { t: mid });
        }

        let piece = SweepPiece {
            start: t.clone(),
            end: next.clone(),
            support: g.support.iter().map(|&i| model.curves()[i].label.clone()).collect(),
            coeffs,
            flag_degree: pairing(&c),
            positive,
        };
        match pieces.last_mut() {
            Some(last)
                if last.support == piece.support && last.coeffs == piece.coeffs && last.positive == piece.positive =>
            {
                last.end = piece.end;
            }
            _ => pieces.push(piece),
        }
        t = next;
    }
    Ok(Sweep { nu, mu, pieces })
}

/// Continuous piecewise-linear function on `[breakpoints[0], breakpoints[m]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    pub breakpoints: Vec<Rational>,
    pub pieces: Vec<Affine>,
}

impl PiecewiseLinearFn {
    /// Builds from consecutive `(start, end, f)` intervals, merging
    /// neighbours with equal slope.
    fn from_intervals(intervals: Vec<(Rational, Rational, Affine)>) -> Self {
        let mut breakpoints = Vec::new();
        let mut pieces: Vec<Affine> = Vec::new();
        for (start, end, f) in intervals {
            if breakpoints.is_empty() {
                breakpoints.push(start);
            }
            if pieces.last().is_some_and(|p| p.slope == f.slope) {
                *breakpoints.last_mut().expect("nonempty") = end;
            } else {
                pieces.push(f);
                breakpoints.push(end);
            }
        }
        PiecewiseLinearFn { breakpoints, pieces }
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.breakpoints[0], self.breakpoints.last().expect("nonempty"))
    }

    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let (lo, hi) = self.domain();
        if t < lo || t > hi {
            return None;
        }
        let k = self.breakpoints[1..]
            .iter()
            .position(|b| t <= b)
            .expect("inside domain");
        Some(self.pieces[k].eval(t))
    }

    pub fn slopes(&self) -> Vec<&Rational> {
        self.pieces.iter().map(|p| &p.slope).collect()
    }

    pub fn is_convex(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].slope <= w[1].slope)
    }

    pub fn is_concave(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].slope >= w[1].slope)
    }

    /// Values at the breakpoints.
    pub fn nodes(&self) -> Vec<(Rational, Rational)> {
        self.breakpoints
            .iter()
            .map(|b| (b.clone(), self.eval(b).expect("breakpoint in domain")))
            .collect()
    }
}

impl fmt::Display for PiecewiseLinearFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "[{}, {}]: {}", self.breakpoints[k], self.breakpoints[k + 1], p)?;
        }
        Ok(())
    }
}

fn check_point(model: &SurfaceModel, flag: &FlagSpec) -> Result<()> {
    let FlagPoint::Explicit(map) = &flag.point else {
        return Ok(());
    };
    let c = model.curve(&flag.curve)?;
    for (label, &mult) in map {
        if *label == flag.curve {
            return Err(NobError::PointOnFlagCurve(label.clone()));
        }
        let ci = model.curve(label)?;
        let max = crate::configmv::pair(model.ns_gram(), &ci.class, &c.class);
        if mult < 0 || mult > max {
            return Err(NobError::BadMultiplicity {
                label: label.clone(),
                mult,
                max,
            });
        }
    }
    Ok(())
}

/// `α(t) = (N_t·C)_p` and `β(t) = α(t) + P_t·C`.
pub fn alpha_beta(
    model: &SurfaceModel,
    sweep: &Sweep,
    flag: &FlagSpec,
) -> Result<(PiecewiseLinearFn, PiecewiseLinearFn)> {
    check_point(model, flag)?;
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for piece in &sweep.pieces {
        let a = piece
            .support
            .iter()
            .zip(&piece.coeffs)
            .fold(Affine::zero(), |acc, (label, f)| {
                acc.add(&f.scale(&int(flag.multiplicity(label))))
            });
        let b = a.add(&piece.flag_degree);
        alpha.push((piece.start.clone(), piece.end.clone(), a));
        beta.push((piece.start.clone(), piece.end.clone(), b));
    }
    Ok((
        PiecewiseLinearFn::from_intervals(alpha),
        PiecewiseLinearFn::from_intervals(beta),
    ))
}

pub type Point = (Rational, Rational);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NOBPolygon {
    /// Extreme points, counterclockwise in the `(t, s)` plane starting at
    /// `(ν, α(ν))`.
    pub vertices: Vec<Point>,
    pub alpha: PiecewiseLinearFn,
    pub beta: PiecewiseLinearFn,
    pub nu: Rational,
    pub mu: Rational,
    pub area: Rational,
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Drops repeated and collinear points from a closed polygonal chain.
pub fn prune_collinear(mut pts: Vec<Point>) -> Vec<Point> {
    loop {
        let n = pts.len();
        if n < 3 {
            pts.dedup();
            return pts;
        }
        let drop = (0..n).find(|&i| {
            let prev = &pts[(i + n - 1) % n];
            let next = &pts[(i + 1) % n];
            pts[i] == *prev || cross(prev, &pts[i], next).is_zero()
        });
        match drop {
            Some(i) => {
                pts.remove(i);
            }
            None => return pts,
        }
    }
}

/// Shoelace area, positive for counterclockwise order.
pub fn shoelace_area(pts: &[Point]) -> Rational {
    let n = pts.len();
    let twice: Rational = (0..n)
        .map(|i| {
            let (a, b) = (&pts[i], &pts[(i + 1) % n]);
            &a.0 * &b.1 - &b.0 * &a.1
        })
        .sum();
    twice / int(2)
}

pub fn polygon(model: &SurfaceModel, d: &DivisorClass, flag: &FlagSpec) -> Result<NOBPolygon> {
    let sw = sweep(model, d, flag)?;
    let (alpha, beta) = alpha_beta(model, &sw, flag)?;
    let mut chain = alpha.nodes();
    chain.extend(beta.nodes().into_iter().rev());
    let mut vertices = prune_collinear(chain);
    let start = (sw.nu.clone(), alpha.eval(&sw.nu).expect("nu in domain"));
    if let Some(k) = vertices.iter().position(|v| *v == start) {
        vertices.rotate_left(k);
    }
    let area = shoelace_area(&vertices);
    Ok(NOBPolygon {
        vertices,
        alpha,
        beta,
        nu: sw.nu,
        mu: sw.mu,
        area,
    })
}

pub fn count_vertices(poly: &NOBPolygon) -> usize {
    poly.vertices.len()
}
