//! Zariski decomposition `D = P + N` on a surface whose effective cone is
//! spanned by finitely many listed classes, and the flag quantities
//! `ν_C(D)` and `μ_C(D)`.
//!
//! Correctness is relative to the model: the negative part is only ever
//! supported on the listed negative curves.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::configmv::{pair, CurveRecord};
use crate::exactmath::{
    cone_contains, cone_max_param, int, is_negative_definite, signature_of, solve_linear, ExactError, LinearSolution,
    ParamMax, RMatrix, Rational,
};
use crate::lattice::Lattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZariskiError {
    #[error("Gram matrix: {0}")]
    Gram(String),
    #[error("Gram matrix has signature ({n_plus}, {n_minus}, {n_zero}); expected (1, rho - 1)")]
    BadSignature {
        n_plus: usize,
        n_minus: usize,
        n_zero: usize,
    },
    #[error("{what} has dimension {found}, expected rho = {expected}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate curve label `{0}`")]
    DuplicateCurve(String),
    #[error("curve `{label}`: recorded self-intersection {recorded} but class gives {computed}")]
    SelfIntersection {
        label: String,
        recorded: i64,
        computed: i64,
    },
    #[error("negative curve `{0}` is missing from the effective generators")]
    MissingGenerator(String),
    #[error("distinct irreducible curves `{0}` and `{1}` have negative intersection {2}")]
    NegativePairing(String, String, i64),
    #[error("model asserts all negative curves are (-2)-curves but `{label}` has square {square}")]
    NotMinusTwo { label: String, square: i64 },
    #[error("the effective cone has no generators")]
    NoGenerators,
    #[error("divisor is not pseudo-effective")]
    NotPseudoEffective,
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("candidate support {0:?} is not negative definite; the model is inconsistent")]
    SupportNotNegativeDefinite(Vec<String>),
    #[error("decomposition failed its invariant check: {0}")]
    Invariant(String),
    #[error("D - tC stays pseudo-effective for all t >= 0 (C = `{0}`)")]
    UnboundedMu(String),
}

pub type Result<T, E = ZariskiError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveGenerator {
    pub label: Option<String>,
    pub class: Vec<Rational>,
}

impl EffectiveGenerator {
    pub fn new(label: Option<String>, class: Vec<Rational>) -> Self {
        EffectiveGenerator { label, class }
    }
}

/// A divisor class with rational coordinates in the Néron–Severi basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    pub coords: Vec<Rational>,
    pub label: Option<String>,
}

impl DivisorClass {
    pub fn new(coords: Vec<Rational>) -> Self {
        DivisorClass { coords, label: None }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&x| int(x)).collect())
    }

    pub fn zero(rho: usize) -> Self {
        Self::new(vec![Rational::zero(); rho])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: &Rational, other: &[Rational]) -> Self {
        Self::new(self.coords.iter().zip(other).map(|(a, b)| a + c * b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Surface data: Néron–Severi Gram matrix, listed irreducible curves and
/// generators of the effective cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    name: String,
    basis: Vec<String>,
    ns_gram: Vec<Vec<i64>>,
    curves: Vec<CurveRecord>,
    effective_generators: Vec<EffectiveGenerator>,
    all_negative_curves_are_minus2: bool,
    gram_q: RMatrix,
}

impl SurfaceModel {
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        ns_gram: Vec<Vec<i64>>,
        curves: Vec<CurveRecord>,
        effective_generators: Vec<EffectiveGenerator>,
    ) -> Result<Self> {
        let gram_q = RMatrix::from_int_rows(&ns_gram).map_err(|e| ZariskiError::Gram(e.to_string()))?;
        let sig = signature_of(&gram_q).map_err(|e| ZariskiError::Gram(e.to_string()))?;
        if sig.n_plus != 1 || sig.n_zero != 0 {
            return Err(ZariskiError::BadSignature {
                n_plus: sig.n_plus,
                n_minus: sig.n_minus,
                n_zero: sig.n_zero,
            });
        }
        let rho = ns_gram.len();
        if basis.len() != rho {
            return Err(ZariskiError::Dimension {
                what: "basis".into(),
                expected: rho,
                found: basis.len(),
            });
        }
        if effective_generators.is_empty() {
            return Err(ZariskiError::NoGenerators);
        }
        for (i, g) in effective_generators.iter().enumerate() {
            if g.class.len() != rho {
                return Err(ZariskiError::Dimension {
                    what: format!("generator {}", g.label.clone().unwrap_or_else(|| format!("#{i}"))),
                    expected: rho,
                    found: g.class.len(),
                });
            }
        }
        for (i, c) in curves.iter().enumerate() {
            if c.class.len() != rho {
                return Err(ZariskiError::Dimension {
                    what: format!("curve {}", c.label),
                    expected: rho,
                    found: c.class.len(),
                });
            }
            if curves[..i].iter().any(|o| o.label == c.label) {
                return Err(ZariskiError::DuplicateCurve(c.label.clone()));
            }
            let computed = pair(&ns_gram, &c.class, &c.class);
            if computed != c.self_intersection {
                return Err(ZariskiError::SelfIntersection {
                    label: c.label.clone(),
                    recorded: c.self_intersection,
                    computed,
                });
            }
            if c.self_intersection < 0 {
                let q: Vec<Rational> = c.class.iter().map(|&x| int(x)).collect();
                if !effective_generators.iter().any(|g| g.class == q) {
                    return Err(ZariskiError::MissingGenerator(c.label.clone()));
                }
            }
        }
        for (i, a) in curves.iter().enumerate() {
            for b in &curves[i + 1..] {
                let v = pair(&ns_gram, &a.class, &b.class);
                if a.irreducible && b.irreducible && v < 0 {
                    return Err(ZariskiError::NegativePairing(a.label.clone(), b.label.clone(), v));
                }
            }
        }
        Ok(SurfaceModel {
            name: name.into(),
            basis,
            ns_gram,
            curves,
            effective_generators,
            all_negative_curves_are_minus2: false,
            gram_q,
        })
    }

    /// Records the assertion that every negative curve on the surface is a
    /// (−2)-curve, checked against the listed ones.
    pub fn with_minus2_assertion(mut self, asserted: bool) -> Result<Self> {
        if asserted {
            if let Some(c) = self
                .curves
                .iter()
                .find(|c| c.self_intersection < 0 && c.self_intersection != -2)
            {
                return Err(ZariskiError::NotMinusTwo {
                    label: c.label.clone(),
                    square: c.self_intersection,
                });
            }
        }
        self.all_negative_curves_are_minus2 = asserted;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rho(&self) -> usize {
        self.ns_gram.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn ns_gram(&self) -> &[Vec<i64>] {
        &self.ns_gram
    }

    pub fn curves(&self) -> &[CurveRecord] {
        &self.curves
    }

    pub fn effective_generators(&self) -> &[EffectiveGenerator] {
        &self.effective_generators
    }

    pub fn all_negative_curves_are_minus2(&self) -> bool {
        self.all_negative_curves_are_minus2
    }

    pub fn curve(&self, label: &str) -> Result<&CurveRecord> {
        self.curves
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| ZariskiError::UnknownCurve(label.to_string()))
    }

    pub fn curve_index(&self, label: &str) -> Result<usize> {
        self.curves
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| ZariskiError::UnknownCurve(label.to_string()))
    }

    pub fn negative_curves(&self) -> impl Iterator<Item = &CurveRecord> {
        self.curves.iter().filter(|c| c.is_negative())
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.name.clone(), self.ns_gram.clone(), self.basis.clone()).expect("validated nondegenerate Gram")
    }

    pub fn generator_classes(&self) -> Vec<Vec<Rational>> {
        self.effective_generators.iter().map(|g| g.class.clone()).collect()
    }

    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.gram_q.bilinear(x, y).expect("dimension checked by caller")
    }

    pub(crate) fn curve_q(&self, i: usize) -> Vec<Rational> {
        self.curves[i].class.iter().map(|&x| int(x)).collect()
    }

    pub(crate) fn negative_indices(&self) -> Vec<usize> {
        (0..self.curves.len())
            .filter(|&i| self.curves[i].is_negative())
            .collect()
    }

    pub(crate) fn support_gram(&self, support: &[usize]) -> RMatrix {
        let rows: Vec<Vec<i64>> = support
            .iter()
            .map(|&i| {
                support
                    .iter()
                    .map(|&j| pair(&self.ns_gram, &self.curves[i].class, &self.curves[j].class))
                    .collect()
            })
            .collect();
        RMatrix::from_int_rows(&rows).expect("square")
    }

    pub(crate) fn check_support(&self, support: &[usize]) -> Result<RMatrix> {
        let g = self.support_gram(support);
        if is_negative_definite(&g).expect("symmetric") {
            Ok(g)
        } else {
            Err(ZariskiError::SupportNotNegativeDefinite(
                support.iter().map(|&i| self.curves[i].label.clone()).collect(),
            ))
        }
    }

    /// Coefficients `a` on `support` with `(d − Σ aᵢCᵢ)·Cⱼ = 0` for all `j`.
    pub(crate) fn orthogonal_coefficients(&self, support: &[usize], gram: &RMatrix, d: &[Rational]) -> Vec<Rational> {
        let rhs: Vec<Rational> = support.iter().map(|&j| self.pair(d, &self.curve_q(j))).collect();
        match solve_linear(gram, &rhs).expect("square system") {
            LinearSolution::Unique(a) => a,
            other => unreachable!("negative definite system has a unique solution: {other:?}"),
        }
    }

    pub(crate) fn check_dim(&self, d: &DivisorClass) -> Result<()> {
        if d.dim() != self.rho() {
            return Err(ZariskiError::Dimension {
                what: "divisor".into(),
                expected: self.rho(),
                found: d.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZariskiDecomposition {
    pub positive: DivisorClass,
    /// Strictly positive coefficients, in the model's curve order.
    pub negative_coeffs: Vec<(String, Rational)>,
}

impl ZariskiDecomposition {
    pub fn coeff(&self, label: &str) -> Rational {
        self.negative_coeffs
            .iter()
            .find(|(l, _)| l == label)
            .map_or_else(Rational::zero, |(_, a)| a.clone())
    }

    pub fn support(&self) -> Vec<&str> {
        self.negative_coeffs.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn negative_part(&self, model: &SurfaceModel) -> DivisorClass {
        let mut n = DivisorClass::zero(model.rho());
        for (label, a) in &self.negative_coeffs {
            let i = model.curve_index(label).expect("support drawn from model");
            n = n.add_scaled(a, &model.curve_q(i));
        }
        n
    }

    /// Checks reconstruction, orthogonality, negativity of the support and
    /// nefness of `P` against the effective generators.
    pub fn verify(&self, model: &SurfaceModel, d: &DivisorClass) -> std::result::Result<(), String> {
        let n = self.negative_part(model);
        let sum: Vec<Rational> = self.positive.coords.iter().zip(&n.coords).map(|(p, q)| p + q).collect();
        if sum != d.coords {
            return Err("P + N != D".into());
        }
        let mut support = Vec::new();
        for (label, a) in &self.negative_coeffs {
            if !a.is_positive() {
                return Err(format!("coefficient of {label} is {a}"));
            }
            let i = model.curve_index(label).map_err(|e| e.to_string())?;
            let v = model.pair(&self.positive.coords, &model.curve_q(i));
            if !v.is_zero() {
                return Err(format!("P.{label} = {v}"));
            }
            support.push(i);
        }
        if model.check_support(&support).is_err() {
            return Err("support is not negative definite".into());
        }
        for g in model.effective_generators() {
            let v = model.pair(&self.positive.coords, &g.class);
            if v.is_negative() {
                let name = g.label.clone().unwrap_or_else(|| format!("{:?}", g.class));
                return Err(format!("P.{name} = {v} < 0"));
            }
        }
        Ok(())
    }
}

pub fn is_pseudo_effective(model: &SurfaceModel, d: &DivisorClass) -> Result<bool> {
    model.check_dim(d)?;
    Ok(cone_contains(&model.generator_classes(), &d.coords)
        .expect("generators validated")
        .is_member())
}

/// Fujita's iteration: grow the support by every listed negative curve the
/// current positive part meets negatively, then re-solve.
pub fn zariski_decompose(model: &SurfaceModel, d: &DivisorClass) -> Result<ZariskiDecomposition> {
    if !is_pseudo_effective(model, d)? {
        return Err(ZariskiError::NotPseudoEffective);
    }
    let negatives = model.negative_indices();
    let mut support: Vec<usize> = Vec::new();
    let mut gram = RMatrix::zeros(0, 0);
    let (coeffs, positive) = loop {
        let a = model.orthogonal_coefficients(&support, &gram, &d.coords);
        let mut p = d.clone();
        for (ai, &i) in a.iter().zip(&support) {
            p = p.add_scaled(&-ai, &model.curve_q(i));
        }
        let added: Vec<usize> = negatives
            .iter()
            .copied()
            .filter(|i| !support.contains(i) && model.pair(&p.coords, &model.curve_q(*i)).is_negative())
            .collect();
        if added.is_empty() {
            break (a, p);
        }
        support.extend(added);
        support.sort_unstable();
        gram = model.check_support(&support)?;
    };
    let negative_coeffs = support
        .iter()
        .zip(coeffs)
        .filter(|(_, a)| !a.is_zero())
        .map(|(&i, a)| (model.curves()[i].label.clone(), a))
        .collect();
    let z = ZariskiDecomposition {
        positive: DivisorClass::new(positive.coords),
        negative_coeffs,
    };
    z.verify(model, d).map_err(ZariskiError::Invariant)?;
    Ok(z)
}

/// Coefficient of `C` in the negative part of `D`.
pub fn nu_of(model: &SurfaceModel, d: &DivisorClass, curve: &str) -> Result<Rational> {
    model.curve(curve)?;
    Ok(zariski_decompose(model, d)?.coeff(curve))
}

/// Largest `t` with `D − tC` pseudo-effective.
pub fn mu_of(model: &SurfaceModel, d: &DivisorClass, curve: &str) -> Result<Rational> {
    model.check_dim(d)?;
    let c = model.curve_q(model.curve_index(curve)?);
    match cone_max_param(&model.generator_classes(), &d.coords, &c) {
        Ok(ParamMax::Finite(t)) => Ok(t),
        Ok(ParamMax::Unbounded) => Err(ZariskiError::UnboundedMu(curve.to_string())),
        Err(ExactError::NotInCone) => Err(ZariskiError::NotPseudoEffective),
        Err(e) => unreachable!("dimensions validated: {e}"),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::exactmath::ints;

    fn curves(gram: &[Vec<i64>], list: &[(&str, &[i64])]) -> Vec<CurveRecord> {
        list.iter()
            .map(|(l, c)| CurveRecord::new(*l, c.to_vec(), gram))
            .collect()
    }

    fn gens(list: &[(&str, &[i64])]) -> Vec<EffectiveGenerator> {
        list.iter()
            .map(|(l, c)| EffectiveGenerator::new(Some(l.to_string()), ints(c)))
            .collect()
    }

    pub fn p2() -> SurfaceModel {
        let g = vec![vec![1]];
        SurfaceModel::new(
            "P2",
            vec!["L".into()],
            g.clone(),
            curves(&g, &[("L", &[1])]),
            gens(&[("L", &[1])]),
        )
        .unwrap()
    }

    /// Blow-up of the plane at one point, basis (L, E).
    pub fn f1() -> SurfaceModel {
        let g = vec![vec![1, 0], vec![0, -1]];
        SurfaceModel::new(
            "F1",
            vec!["L".into(), "E".into()],
            g.clone(),
            curves(
                &g,
                &[
                    ("E", &[0, 1]),
                    ("L-E", &[1, -1]),
                    ("L", &[1, 0]),
                    ("2L-E", &[2, -1]),
                    ("3L-2E", &[3, -2]),
                ],
            ),
            gens(&[("E", &[0, 1]), ("L-E", &[1, -1])]),
        )
        .unwrap()
    }

    /// Elliptic K3 with one I₂ fibre and no sections besides O, written in
    /// the curve basis (O, Theta1_0, Theta1_1).
    pub fn s1() -> SurfaceModel {
        let g = vec![vec![-2, 1, 0], vec![1, -2, 2], vec![0, 2, -2]];
        SurfaceModel::new(
            "S1",
            vec!["O".into(), "T0".into(), "T1".into()],
            g.clone(),
            curves(
                &g,
                &[
                    ("O", &[1, 0, 0]),
                    ("T0", &[0, 1, 0]),
                    ("T1", &[0, 0, 1]),
                    ("F", &[0, 1, 1]),
                ],
            ),
            gens(&[
                ("O", &[1, 0, 0]),
                ("T0", &[0, 1, 0]),
                ("T1", &[0, 0, 1]),
                ("F", &[0, 1, 1]),
            ]),
        )
        .unwrap()
        .with_minus2_assertion(true)
        .unwrap()
    }
}
