//! Negative-definite configurations of curves and the maximal vertex count
//! `mv` of Newton–Okounkov polygons they allow.
//!
//! For a configuration `N = C₁ + … + C_k` with negative-definite
//! intersection matrix, `mv(N) = k + mc(N) + 4` when `k < ρ − 1` and
//! `k + mc(N) + 3` when `k = ρ − 1`, where `mc(N)` is the size of the largest
//! connected component of the dual graph. `mv(S)` is the maximum over all
//! such configurations.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::exactmath::{is_negative_definite, RMatrix};
use crate::lattice::{embeds_root, EmbeddingVerdict, Lattice, RootFamily, DEFAULT_MODULI, DEFAULT_SEARCH_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("intersection matrix of {0:?} is not negative definite")]
    NotNegativeDefinite(Vec<String>),
    #[error("configuration has {k} curves but rho - 1 = {max}; the Gram cannot have signature (1, rho - 1)")]
    TooManyCurves { k: usize, max: usize },
    #[error("curve `{label}` has self-intersection {value}, not negative")]
    NotNegative { label: String, value: i64 },
    #[error("curve `{label}` is not asserted irreducible")]
    NotIrreducible { label: String },
    #[error("curve `{label}`: recorded self-intersection {recorded} but class gives {computed}")]
    SelfIntersectionMismatch {
        label: String,
        recorded: i64,
        computed: i64,
    },
    #[error("class of `{label}` has length {found}, expected {expected}")]
    Dimension {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("at most {max} negative curves can be enumerated, got {found}")]
    TooManyListed { max: usize, found: usize },
    #[error("Picard number must be at least 1")]
    ZeroRho,
    #[error("mv = {0} is below the minimum 3")]
    MvTooSmall(usize),
    #[error("inconsistent input: mv = {mv} with negative curves = {has_negative_curve}")]
    Inconsistent { mv: usize, has_negative_curve: bool },
    #[error("the A2 bound needs every negative curve to be a (-2)-curve")]
    BoundNotApplicable,
}

pub type Result<T, E = ConfigError> = std::result::Result<T, E>;

/// Maximum list size for exhaustive subset enumeration.
pub const MAX_LISTED_CURVES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    pub class: Vec<i64>,
    pub self_intersection: i64,
    pub irreducible: bool,
}

impl CurveRecord {
    /// Record with self-intersection computed from `gram`.
    pub fn new(label: impl Into<String>, class: Vec<i64>, gram: &[Vec<i64>]) -> Self {
        let self_intersection = pair(gram, &class, &class);
        CurveRecord {
            label: label.into(),
            class,
            self_intersection,
            irreducible: true,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.self_intersection < 0
    }
}

/// `x·y` for integer coordinate vectors under `gram`.
pub fn pair(gram: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    gram.iter()
        .enumerate()
        .map(|(i, row)| x[i] * row.iter().zip(y).map(|(g, b)| g * b).sum::<i64>())
        .sum()
}

/// A reduced configuration of distinct curves with negative-definite
/// intersection matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegConfig {
    pub labels: Vec<String>,
    pub gram: Vec<Vec<i64>>,
}

impl NegConfig {
    pub fn new(labels: Vec<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let m = RMatrix::from_int_rows(&gram).map_err(|_| ConfigError::NotNegativeDefinite(labels.clone()))?;
        let ok = m.rows() == labels.len() && is_negative_definite(&m).unwrap_or(false);
        if !ok {
            return Err(ConfigError::NotNegativeDefinite(labels));
        }
        Ok(NegConfig { labels, gram })
    }

    pub fn empty() -> Self {
        NegConfig {
            labels: Vec::new(),
            gram: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl fmt::Display for NegConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

/// Size of the largest connected component of the dual graph.
pub fn mc_of(config: &NegConfig) -> usize {
    let k = config.len();
    let mut seen = vec![false; k];
    let mut best = 0;
    for start in 0..k {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            size += 1;
            for w in 0..k {
                if !seen[w] && w != v && config.gram[v][w] > 0 {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

pub fn mv_of_config(config: &NegConfig, rho: usize) -> Result<usize> {
    if rho == 0 {
        return Err(ConfigError::ZeroRho);
    }
    let k = config.len();
    let max = rho - 1;
    if k > max {
        return Err(ConfigError::TooManyCurves { k, max });
    }
    let s = if k < max { 4 } else { 3 };
    Ok(k + mc_of(config) + s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvReport {
    pub mv_value: usize,
    pub witness: NegConfig,
    /// The value equals a proven upper bound, so it is `mv(S)` and not
    /// merely a lower bound from the listed curves.
    pub certified: bool,
    pub upper_bound_used: usize,
    pub configs_examined: usize,
}

impl MvReport {
    pub fn with_upper_bound(mut self, bound: usize) -> Self {
        self.upper_bound_used = bound;
        self.certified = self.mv_value == bound;
        self
    }
}

/// Upper bound `2ρ + 1` valid on every surface.
pub fn generic_upper_bound(rho: usize) -> usize {
    2 * rho + 1
}

/// Maximizes `mv(N)` over every negative-definite subset of the listed
/// negative curves (the empty configuration included).
///
/// Among maximizers the witness has the most curves, and is the
/// lexicographically least (by sorted index list) of those.
pub fn mv_surface(rho: usize, curves: &[CurveRecord], gram: &[Vec<i64>]) -> Result<MvReport> {
    if rho == 0 {
        return Err(ConfigError::ZeroRho);
    }
    if curves.len() > MAX_LISTED_CURVES {
        return Err(ConfigError::TooManyListed {
            max: MAX_LISTED_CURVES,
            found: curves.len(),
        });
    }
    for c in curves {
        if c.class.len() != gram.len() {
            return Err(ConfigError::Dimension {
                label: c.label.clone(),
                expected: gram.len(),
                found: c.class.len(),
            });
        }
        let computed = pair(gram, &c.class, &c.class);
        if computed != c.self_intersection {
            return Err(ConfigError::SelfIntersectionMismatch {
                label: c.label.clone(),
                recorded: c.self_intersection,
                computed,
            });
        }
        if !c.is_negative() {
            return Err(ConfigError::NotNegative {
                label: c.label.clone(),
                value: c.self_intersection,
            });
        }
        if !c.irreducible {
            return Err(ConfigError::NotIrreducible { label: c.label.clone() });
        }
    }

    let n = curves.len();
    let products: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| pair(gram, &curves[i].class, &curves[j].class)).collect())
        .collect();
    let config_of = |idx: &[usize]| NegConfig {
        labels: idx.iter().map(|&i| curves[i].label.clone()).collect(),
        gram: idx
            .iter()
            .map(|&i| idx.iter().map(|&j| products[i][j]).collect())
            .collect(),
    };

    struct Search<'a> {
        rho: usize,
        n: usize,
        config_of: &'a dyn Fn(&[usize]) -> NegConfig,
        best: Option<(usize, NegConfig)>,
        examined: usize,
    }

    impl Search<'_> {
        fn visit(&mut self, idx: &mut Vec<usize>) -> Result<()> {
            let config = (self.config_of)(idx);
            let m = RMatrix::from_int_rows(&config.gram).expect("square");
            if !is_negative_definite(&m).expect("symmetric") {
                return Ok(());
            }
            self.examined += 1;
            let value = mv_of_config(&config, self.rho)?;
            // preorder meets equal-size sets in lexicographic order
            if self
                .best
                .as_ref()
                .is_none_or(|(b, w)| (value, config.len()) > (*b, w.len()))
            {
                self.best = Some((value, config));
            }
            let from = idx.last().map_or(0, |&l| l + 1);
            for next in from..self.n {
                idx.push(next);
                self.visit(idx)?;
                idx.pop();
            }
            Ok(())
        }
    }

    let mut search = Search {
        rho,
        n,
        config_of: &config_of,
        best: None,
        examined: 0,
    };
    search.visit(&mut Vec::new())?;
    let (mv_value, witness) = search.best.expect("empty configuration is always admissible");
    let bound = generic_upper_bound(rho);
    Ok(MvReport {
        mv_value,
        witness,
        certified: mv_value == bound,
        upper_bound_used: bound,
        configs_examined: search.examined,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperBound {
    pub value: usize,
    /// True when the A₂ obstruction lowered the bound below `2ρ + 1`.
    pub improved: bool,
    pub note: String,
}

/// Upper bound on `mv(S)` for a surface whose negative curves are all
/// (−2)-curves. Two such curves in a negative-definite configuration can only
/// meet transversally once, spanning `A₂`; if `A₂` does not embed in `NS`
/// every configuration is disjoint (`mc ≤ 1`) and `mv(S) ≤ ρ + 3`.
pub fn mv_upper_bound_via_a2(ns: &Lattice, all_negatives_are_minus2: bool) -> Result<UpperBound> {
    if !all_negatives_are_minus2 {
        return Err(ConfigError::BoundNotApplicable);
    }
    let rho = ns.rank();
    if rho == 0 {
        return Err(ConfigError::ZeroRho);
    }
    let generic = generic_upper_bound(rho);
    let a2 = Lattice::root(RootFamily::A, 2).expect("A2 is valid");
    let verdict = embeds_root(&a2, ns, DEFAULT_SEARCH_BOUND, &DEFAULT_MODULI).expect("A2 is a root basis");
    Ok(match verdict {
        EmbeddingVerdict::No { obstruction } => {
            let value = (rho + 3).min(generic);
            UpperBound {
                value,
                improved: value < generic,
                note: format!("A2 does not embed (no solution mod {})", obstruction.modulus),
            }
        }
        EmbeddingVerdict::Yes { .. } => UpperBound {
            value: generic,
            improved: false,
            note: "A2 embeds; generic bound 2*rho+1".into(),
        },
        EmbeddingVerdict::Unknown { .. } => UpperBound {
            value: generic,
            improved: false,
            note: "bound not improved: A2 embedding undecided".into(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardConstraint {
    RhoEquals(usize),
    /// `ρ > 1` and the surface carries no negative irreducible curve.
    RhoAboveOneWithoutNegativeCurves,
    Unconstrained,
}

impl fmt::Display for PicardConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PicardConstraint::RhoEquals(r) => write!(f, "rho = {r}"),
            PicardConstraint::RhoAboveOneWithoutNegativeCurves => write!(f, "rho > 1, no negative curves"),
            PicardConstraint::Unconstrained => write!(f, "no constraint"),
        }
    }
}

/// What `mv(S)` and the presence of negative curves say about `ρ(S)`.
pub fn classify_picard(mv: usize, has_negative_curve: bool) -> Result<PicardConstraint> {
    if mv < 3 {
        return Err(ConfigError::MvTooSmall(mv));
    }
    match (mv, has_negative_curve) {
        (3, false) => Ok(PicardConstraint::RhoEquals(1)),
        (4, false) => Ok(PicardConstraint::RhoAboveOneWithoutNegativeCurves),
        (5, true) => Ok(PicardConstraint::RhoEquals(2)),
        // Without negative curves only the empty configuration exists, so mv ≤ 4;
        // with one, mv(C) ≥ 1 + 1 + 3 = 5.
        (3 | 4, true) | (5.., false) => Err(ConfigError::Inconsistent { mv, has_negative_curve }),
        _ => Ok(PicardConstraint::Unconstrained),
    }
}
