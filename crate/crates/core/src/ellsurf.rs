//! Néron–Severi lattices of elliptic surfaces built from fibration data:
//! trivial lattice, Shioda–Tate, the height pairing and
//! `NS = Triv ⊕ MWL⁻` for torsion-free Mordell–Weil groups.
//!
//! Two situations are supported: Mordell–Weil rank zero with any number of
//! `I_m`/`III` fibres, or no reducible fibres with an arbitrary list of
//! sections (where every local height correction vanishes).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactmath::{self, is_negative_definite, RMatrix, Rational, Signature};
use crate::lattice::{Lattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllSurfError {
    #[error("Euler characteristic must be nonnegative, got {0}")]
    NegativeChi(i64),
    #[error("fibre type I_0 is not singular")]
    InvalidFibre,
    #[error("Picard number {rho} is below the trivial lattice rank {trivial}")]
    RhoTooSmall { rho: usize, trivial: usize },
    #[error("declared Picard number {declared} but the data give {computed}")]
    RhoMismatch { declared: usize, computed: usize },
    #[error("local height contributions of reducible fibres are not supported")]
    ReducibleFibres,
    #[error("section `{0}` is torsion; torsion sections are not supported")]
    Torsion(String),
    #[error("sections together with reducible fibres are not supported")]
    MixedScenario,
    #[error("duplicate section label `{0}`")]
    DuplicateSection(String),
    #[error("section `{0}` has a negative intersection number")]
    NegativeIntersection(String),
    #[error("no intersection number given between sections `{0}` and `{1}`")]
    MissingPairing(String, String),
    #[error("sections `{0}` and `{1}` disagree on their intersection number")]
    AsymmetricPairing(String, String),
    #[error("section `{0}` pairs with unknown section `{1}`")]
    UnknownSection(String, String),
    #[error("sections are dependent: the height pairing matrix is not positive definite")]
    DependentSections,
    #[error("Néron–Severi lattice has signature {found:?}, expected (1, {expected_minus})")]
    BadSignature { found: Signature, expected_minus: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T, E = EllSurfError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KodairaType {
    /// `I_m`: a cycle of `m` rational curves (a nodal curve for `m = 1`).
    I(u32),
    /// Two rational curves tangent at one point.
    III,
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(m) => write!(f, "I{m}"),
            KodairaType::III => write!(f, "III"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreSpec {
    pub kind: KodairaType,
    pub identity_component_marked: bool,
}

impl FibreSpec {
    pub fn new(kind: KodairaType) -> Self {
        FibreSpec {
            kind,
            identity_component_marked: true,
        }
    }

    pub fn component_count(&self) -> usize {
        match self.kind {
            KodairaType::I(m) => m as usize,
            KodairaType::III => 2,
        }
    }

    pub fn is_reducible(&self) -> bool {
        self.component_count() > 1
    }

    /// Intersection number of components `i != j` of the fibre.
    fn component_product(&self, i: usize, j: usize) -> i64 {
        match self.kind {
            KodairaType::III | KodairaType::I(2) => 2,
            KodairaType::I(m) => {
                let m = m as usize;
                let d = i.abs_diff(j);
                if d == 1 || d == m - 1 {
                    1
                } else {
                    0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionData {
    pub label: String,
    /// `(P)·(O)`.
    pub dot_zero: i64,
    /// `(P)·(Q)` for other sections, by label.
    pub dots: BTreeMap<String, i64>,
    pub torsion: bool,
}

impl SectionData {
    pub fn new(label: impl Into<String>, dot_zero: i64) -> Self {
        SectionData {
            label: label.into(),
            dot_zero,
            dots: BTreeMap::new(),
            torsion: false,
        }
    }

    pub fn with_dot(mut self, other: impl Into<String>, value: i64) -> Self {
        self.dots.insert(other.into(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticSurfaceSpec {
    pub chi: i64,
    pub base_genus: u32,
    pub fibres: Vec<FibreSpec>,
    pub sections: Vec<SectionData>,
    pub declared_rho: Option<usize>,
}

impl EllipticSurfaceSpec {
    pub fn new(chi: i64) -> Self {
        EllipticSurfaceSpec {
            chi,
            base_genus: 0,
            fibres: Vec::new(),
            sections: Vec::new(),
            declared_rho: None,
        }
    }

    fn reducible(&self) -> impl Iterator<Item = &FibreSpec> {
        self.fibres.iter().filter(|f| f.is_reducible())
    }

    fn has_reducible_fibres(&self) -> bool {
        self.reducible().next().is_some()
    }

    /// `(P)·(Q)` from whichever side records it.
    fn section_product(&self, p: &SectionData, q: &SectionData) -> Result<i64> {
        match (p.dots.get(&q.label), q.dots.get(&p.label)) {
            (Some(a), Some(b)) if a != b => Err(EllSurfError::AsymmetricPairing(p.label.clone(), q.label.clone())),
            (Some(a), _) | (None, Some(a)) => Ok(*a),
            (None, None) => Err(EllSurfError::MissingPairing(p.label.clone(), q.label.clone())),
        }
    }
}

/// `2 + Σ (m_ν − 1)` over the reducible fibres.
pub fn trivial_lattice_rank(spec: &EllipticSurfaceSpec) -> usize {
    2 + spec.reducible().map(|f| f.component_count() - 1).sum::<usize>()
}

/// Mordell–Weil rank `r = ρ − rk Triv` from the Shioda–Tate formula.
pub fn shioda_tate_rank(rho: usize, spec: &EllipticSurfaceSpec) -> Result<usize> {
    let trivial = trivial_lattice_rank(spec);
    rho.checked_sub(trivial)
        .ok_or(EllSurfError::RhoTooSmall { rho, trivial })
}

/// Height pairing `⟨P, Q⟩` on a surface without reducible fibres:
/// `χ + (P)·(O) + (Q)·(O) − (P)·(Q)`, and `2χ + 2(P)·(O)` on the diagonal.
pub fn height_pairing(p: &SectionData, q: &SectionData, spec: &EllipticSurfaceSpec) -> Result<Rational> {
    if spec.has_reducible_fibres() {
        return Err(EllSurfError::ReducibleFibres);
    }
    let value = if p.label == q.label {
        2 * spec.chi + 2 * p.dot_zero
    } else {
        spec.chi + p.dot_zero + q.dot_zero - spec.section_product(p, q)?
    };
    Ok(exactmath::int(value))
}

/// Néron–Severi lattice of an elliptic surface together with the classes of
/// its distinguished curves.
///
/// The lattice basis is `e, F, …` where `e = (O) + (χ/2)F` when `χ` is even
/// (so the first block is literally `U`) and `e = (O)` otherwise, followed by
/// the non-identity fibre components and the Mordell–Weil basis vectors `D_P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NSModel {
    pub lattice: Lattice,
    pub chi: i64,
    /// label → coordinates in the lattice basis, in insertion order.
    pub classes: Vec<(String, Vec<i64>)>,
    /// Labels of `classes` that are irreducible curves.
    pub curves: Vec<String>,
    /// Columns are the lattice basis vectors in geometric coordinates
    /// `(O), F, Θ…, D_P…`.
    pub base_change: Vec<Vec<i64>>,
}

impl NSModel {
    pub fn rho(&self) -> usize {
        self.lattice.rank()
    }

    pub fn class(&self, label: &str) -> Option<&[i64]> {
        self.classes.iter().find(|(l, _)| l == label).map(|(_, c)| c.as_slice())
    }

    /// Gram matrix on the geometric generators `(O), F, Θ…, D_P…`.
    pub fn geometric_gram(&self) -> Vec<Vec<i64>> {
        let n = self.rho();
        let mut out = vec![vec![0; n]; n];
        let inv = self.inverse_base_change();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = self.lattice.product(&inv[i], &inv[j]).expect("rank matches");
            }
        }
        out
    }

    /// Rows: the geometric generators expressed in the lattice basis.
    fn inverse_base_change(&self) -> Vec<Vec<i64>> {
        let n = self.rho();
        let b = RMatrix::from_int_rows(&self.base_change).expect("square");
        (0..n)
            .map(|k| {
                let mut unit = vec![Rational::from_integer(BigInt::from(0)); n];
                unit[k] = exactmath::int(1);
                match exactmath::solve_linear(&b, &unit).expect("square") {
                    exactmath::LinearSolution::Unique(x) => x
                        .iter()
                        .map(|v| exactmath::to_i64(v).expect("unimodular base change"))
                        .collect(),
                    _ => unreachable!("base change is invertible"),
                }
            })
            .collect()
    }
}

/// `(P) = D_P + (O) + ((P)·(O) + χ)·F` in the lattice basis of `ns`.
pub fn section_class(p: &SectionData, spec: &EllipticSurfaceSpec, ns: &NSModel) -> Result<Vec<i64>> {
    if spec.has_reducible_fibres() {
        return Err(EllSurfError::ReducibleFibres);
    }
    let dp = ns
        .class(&format!("D_{}", p.label))
        .ok_or_else(|| EllSurfError::UnknownSection(p.label.clone(), p.label.clone()))?;
    let o = ns.class("O").expect("zero section is always present");
    let f = ns.class("F").expect("fibre class is always present");
    let k = p.dot_zero + spec.chi;
    Ok((0..ns.rho()).map(|i| dp[i] + o[i] + k * f[i]).collect())
}

fn validate(spec: &EllipticSurfaceSpec) -> Result<()> {
    if spec.chi < 0 {
        return Err(EllSurfError::NegativeChi(spec.chi));
    }
    if spec.fibres.iter().any(|f| f.component_count() == 0) {
        return Err(EllSurfError::InvalidFibre);
    }
    for (i, s) in spec.sections.iter().enumerate() {
        if s.torsion {
            return Err(EllSurfError::Torsion(s.label.clone()));
        }
        if s.label == "O" || spec.sections[..i].iter().any(|t| t.label == s.label) {
            return Err(EllSurfError::DuplicateSection(s.label.clone()));
        }
        if s.dot_zero < 0 || s.dots.values().any(|&v| v < 0) {
            return Err(EllSurfError::NegativeIntersection(s.label.clone()));
        }
        if let Some(other) = s.dots.keys().find(|k| !spec.sections.iter().any(|t| &t.label == *k)) {
            return Err(EllSurfError::UnknownSection(s.label.clone(), other.clone()));
        }
    }
    if !spec.sections.is_empty() && spec.has_reducible_fibres() {
        return Err(EllSurfError::MixedScenario);
    }
    Ok(())
}

/// Builds `NS = Triv ⊕ MWL⁻` and the classes of `(O)`, `F`, the fibre
/// components and the sections.
pub fn build_ns(spec: &EllipticSurfaceSpec) -> Result<NSModel> {
    validate(spec)?;
    let chi = spec.chi;
    let r = spec.sections.len();
    let rho = trivial_lattice_rank(spec) + r;
    if let Some(declared) = spec.declared_rho {
        let mw = shioda_tate_rank(declared, spec)?;
        if mw != r {
            return Err(EllSurfError::RhoMismatch {
                declared,
                computed: rho,
            });
        }
    }

    // Geometric generators: (O), F, Θ_{ν,1..m-1}, D_P.
    let mut geo_labels: Vec<String> = vec!["O".into(), "F".into()];
    let mut geo = vec![vec![0i64; rho]; rho];
    geo[0][0] = -chi;
    geo[0][1] = 1;
    geo[1][0] = 1;
    let mut fibre_blocks: Vec<(usize, &FibreSpec, usize)> = Vec::new();
    let mut next = 2;
    for (nu, fibre) in spec.reducible().enumerate() {
        let m = fibre.component_count();
        fibre_blocks.push((nu + 1, fibre, next));
        for i in 1..m {
            geo_labels.push(format!("Theta{}_{}", nu + 1, i));
            for j in 1..m {
                geo[next + i - 1][next + j - 1] = if i == j { -2 } else { fibre.component_product(i, j) };
            }
        }
        next += m - 1;
    }
    let mwl_start = next;
    for (a, p) in spec.sections.iter().enumerate() {
        geo_labels.push(format!("D_{}", p.label));
        for (b, q) in spec.sections.iter().enumerate() {
            geo[mwl_start + a][mwl_start + b] = -exactmath::to_i64(&height_pairing(p, q, spec)?).expect("integral");
        }
    }
    if r > 0 {
        let mwl = RMatrix::from_int_rows(
            &(0..r)
                .map(|a| geo[mwl_start + a][mwl_start..].to_vec())
                .collect::<Vec<_>>(),
        )
        .expect("square");
        if !is_negative_definite(&mwl).expect("symmetric") {
            return Err(EllSurfError::DependentSections);
        }
    }

    // Lattice basis: e = (O) + (χ/2)F for even χ, otherwise (O); the rest unchanged.
    let shift = if chi % 2 == 0 { chi / 2 } else { 0 };
    let mut base_change = vec![vec![0i64; rho]; rho];
    for (i, row) in base_change.iter_mut().enumerate() {
        row[i] = 1;
    }
    base_change[1][0] = shift;
    let mut lattice_labels = geo_labels.clone();
    lattice_labels[0] = if chi % 2 == 0 { "e".into() } else { "O".into() };
    let mut gram = vec![vec![0i64; rho]; rho];
    for i in 0..rho {
        for j in 0..rho {
            let mut s = 0;
            for a in 0..rho {
                for b in 0..rho {
                    s += base_change[a][i] * geo[a][b] * base_change[b][j];
                }
            }
            gram[i][j] = s;
        }
    }
    let name = if r == 0 { "Triv" } else { "Triv+MWL-" };
    let lattice = Lattice::new(name, gram, lattice_labels)?;

    let sig = lattice.signature();
    if sig != Signature::new(1, rho - 1, 0) {
        return Err(EllSurfError::BadSignature {
            found: sig,
            expected_minus: rho - 1,
        });
    }

    let unit = |k: usize| -> Vec<i64> { (0..rho).map(|i| i64::from(i == k)).collect() };
    let fibre_class = unit(1);
    let mut zero = unit(0);
    zero[1] = -shift;
    let mut model = NSModel {
        lattice,
        chi,
        classes: vec![("O".into(), zero.clone()), ("F".into(), fibre_class.clone())],
        curves: vec!["O".into(), "F".into()],
        base_change,
    };
    for (nu, fibre, start) in fibre_blocks {
        let m = fibre.component_count();
        let mut theta0 = fibre_class.clone();
        for i in 1..m {
            theta0[start + i - 1] -= 1;
        }
        let label0 = format!("Theta{nu}_0");
        model.classes.push((label0.clone(), theta0));
        model.curves.push(label0);
        for i in 1..m {
            let label = format!("Theta{nu}_{i}");
            model.classes.push((label.clone(), unit(start + i - 1)));
            model.curves.push(label);
        }
    }
    for (a, p) in spec.sections.iter().enumerate() {
        model.classes.push((format!("D_{}", p.label), unit(mwl_start + a)));
    }
    for p in &spec.sections {
        let class = section_class(p, spec, &model)?;
        model.classes.push((p.label.clone(), class));
        model.curves.push(p.label.clone());
    }
    debug_assert!(check_invariants(&model).is_ok());
    Ok(model)
}

/// `(O)² = −χ`, `(O)·F = 1`, `F² = 0`, and every fibre's components sum to `F`.
pub fn check_invariants(ns: &NSModel) -> std::result::Result<(), String> {
    let o = ns.class("O").ok_or("missing O")?;
    let f = ns.class("F").ok_or("missing F")?;
    let l = &ns.lattice;
    let p = |x: &[i64], y: &[i64]| l.product(x, y).map_err(|e| e.to_string());
    if p(o, o)? != -ns.chi {
        return Err(format!("(O)^2 = {} != {}", p(o, o)?, -ns.chi));
    }
    if p(o, f)? != 1 || p(f, f)? != 0 {
        return Err("fibre class pairs wrongly with O or itself".into());
    }
    let mut sums: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
    for (label, class) in &ns.classes {
        if let Some(rest) = label.strip_prefix("Theta") {
            let nu = rest.split('_').next().unwrap_or("");
            let acc = sums.entry(nu).or_insert_with(|| vec![0; ns.rho()]);
            for (a, c) in acc.iter_mut().zip(class) {
                *a += c;
            }
        }
    }
    for (nu, total) in sums {
        if total != f {
            return Err(format!("components of fibre {nu} do not sum to F"));
        }
    }
    Ok(())
}
