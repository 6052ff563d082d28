//! Integral lattices given by a Gram matrix, the standard root lattices and
//! the hyperbolic plane, root enumeration, and a decision procedure for
//! embedding a root lattice into a target lattice.

use std::collections::HashSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::exactmath::{self, determinant, is_negative_definite, signature_of, RMatrix, Rational, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix has {rows} rows but row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("no root lattice {family}{n}")]
    InvalidRootType { family: RootFamily, n: usize },
    #[error("lattice `{0}` is not negative definite")]
    NotNegativeDefinite(String),
    #[error("lattice `{0}` is not a root basis (negative definite with -2 diagonal)")]
    NotRootBasis(String),
    #[error("vector length {found} does not match rank {rank}")]
    Dimension { rank: usize, found: usize },
    #[error("unknown lattice name `{0}`")]
    UnknownName(String),
}

pub type Result<T, E = LatticeError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootFamily {
    A,
    D,
    E,
}

impl fmt::Display for RootFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootFamily::A => "A",
            RootFamily::D => "D",
            RootFamily::E => "E",
        })
    }
}

/// A free ℤ-module with an integral symmetric bilinear form, stored as its
/// Gram matrix in a labelled basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    name: String,
    gram: Vec<Vec<i64>>,
    labels: Vec<String>,
}

impl Lattice {
    /// A nondegenerate lattice.
    pub fn new(name: impl Into<String>, gram: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self> {
        let l = Self::degenerate(name, gram, labels)?;
        if l.discriminant().is_zero() {
            return Err(LatticeError::Degenerate);
        }
        Ok(l)
    }

    /// Same checks as [`Lattice::new`] except nondegeneracy; used to wrap
    /// intersection matrices of curve configurations.
    pub fn degenerate(name: impl Into<String>, gram: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self> {
        let n = gram.len();
        for (row, r) in gram.iter().enumerate() {
            if r.len() != n {
                return Err(LatticeError::NotSquare {
                    rows: n,
                    row,
                    len: r.len(),
                });
            }
        }
        if (0..n).any(|i| (0..i).any(|j| gram[i][j] != gram[j][i])) {
            return Err(LatticeError::NotSymmetric);
        }
        if labels.len() != n {
            return Err(LatticeError::LabelCount {
                expected: n,
                found: labels.len(),
            });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Lattice {
            name: name.into(),
            gram,
            labels,
        })
    }

    /// The rank-0 lattice, neutral for [`Lattice::direct_sum`].
    pub fn empty() -> Self {
        Lattice {
            name: "0".into(),
            gram: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// `U`: basis `e, f` with `e² = f² = 0`, `e·f = 1`.
    pub fn hyperbolic_u() -> Self {
        Lattice {
            name: "U".into(),
            gram: vec![vec![0, 1], vec![1, 0]],
            labels: vec!["e".into(), "f".into()],
        }
    }

    /// Negative-definite root lattice of a Coxeter–Dynkin diagram: diagonal
    /// −2 and +1 between adjacent nodes.
    pub fn root(family: RootFamily, n: usize) -> Result<Self> {
        let valid = match family {
            RootFamily::A => n >= 1,
            RootFamily::D => n >= 4,
            RootFamily::E => (6..=8).contains(&n),
        };
        if !valid {
            return Err(LatticeError::InvalidRootType { family, n });
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        match family {
            RootFamily::A => edges.extend((1..n).map(|i| (i - 1, i))),
            RootFamily::D => {
                edges.extend((1..n - 1).map(|i| (i - 1, i)));
                edges.push((n - 3, n - 1));
            }
            RootFamily::E => {
                edges.extend((1..n - 1).map(|i| (i - 1, i)));
                edges.push((2, n - 1));
            }
        }
        let mut gram = vec![vec![0; n]; n];
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] = -2;
        }
        for (i, j) in edges {
            gram[i][j] = 1;
            gram[j][i] = 1;
        }
        let prefix = family.to_string().to_lowercase();
        Ok(Lattice {
            name: format!("{family}{n}"),
            gram,
            labels: (1..=n).map(|i| format!("{prefix}{i}")).collect(),
        })
    }

    /// Parses names such as `U`, `A2`, `E8`, `U+A1`, `2A1` into lattices.
    pub fn from_name(spec: &str) -> Result<Self> {
        let mut out = Lattice::empty();
        for part in spec.split('+').map(str::trim) {
            let digits = part.chars().take_while(char::is_ascii_digit).count();
            let (count, rest) = part.split_at(digits);
            let count: usize = if count.is_empty() {
                1
            } else {
                count.parse().unwrap_or(0)
            };
            let unknown = || LatticeError::UnknownName(part.to_string());
            let piece = if rest == "U" {
                Lattice::hyperbolic_u()
            } else {
                let mut chars = rest.chars();
                let family = match chars.next() {
                    Some('A') => RootFamily::A,
                    Some('D') => RootFamily::D,
                    Some('E') => RootFamily::E,
                    _ => return Err(unknown()),
                };
                let n: usize = chars.as_str().parse().map_err(|_| unknown())?;
                Lattice::root(family, n)?
            };
            if count == 0 {
                return Err(unknown());
            }
            for _ in 0..count {
                out = out.direct_sum(&piece);
            }
        }
        out.name = spec.replace(' ', "");
        Ok(out)
    }

    /// Orthogonal direct sum; colliding labels of `other` get a numeric suffix.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.rank() + other.rank();
        let mut gram = vec![vec![0; n]; n];
        for (i, row) in self.gram.iter().enumerate() {
            gram[i][..self.rank()].copy_from_slice(row);
        }
        for (i, row) in other.gram.iter().enumerate() {
            gram[self.rank() + i][self.rank()..].copy_from_slice(row);
        }
        let mut labels = self.labels.clone();
        let mut used: HashSet<String> = labels.iter().cloned().collect();
        for l in &other.labels {
            let mut candidate = l.clone();
            let mut k = 2;
            while used.contains(&candidate) {
                candidate = format!("{l}_{k}");
                k += 1;
            }
            used.insert(candidate.clone());
            labels.push(candidate);
        }
        let name = match (self.rank(), other.rank()) {
            (0, _) => other.name.clone(),
            (_, 0) => self.name.clone(),
            _ => format!("{}+{}", self.name, other.name),
        };
        Lattice { name, gram, labels }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram_matrix(&self) -> RMatrix {
        RMatrix::from_int_rows(&self.gram).expect("square by construction")
    }

    pub fn product(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        for v in [x, y] {
            if v.len() != self.rank() {
                return Err(LatticeError::Dimension {
                    rank: self.rank(),
                    found: v.len(),
                });
            }
        }
        Ok(self.product_unchecked(x, y))
    }

    fn product_unchecked(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.gram.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let gy: i64 = row.iter().zip(y).map(|(g, b)| g * b).sum();
            s += x[i] * gy;
        }
        s
    }

    /// Determinant of the Gram matrix.
    pub fn discriminant(&self) -> BigInt {
        let det = determinant(&self.gram_matrix()).expect("square");
        debug_assert!(det.is_integer());
        det.to_integer()
    }

    pub fn signature(&self) -> Signature {
        signature_of(&self.gram_matrix()).expect("symmetric by construction")
    }

    /// For an integral form `x² = Σ gᵢᵢxᵢ² + 2Σ gᵢⱼxᵢxⱼ`, so evenness is
    /// exactly evenness of the diagonal.
    pub fn is_even(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, r)| r[i] % 2 == 0)
    }

    pub fn is_negative_definite(&self) -> bool {
        is_negative_definite(&self.gram_matrix()).expect("symmetric by construction")
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {}): [", self.name, self.rank())?;
        for (i, r) in self.gram.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r:?}")?;
        }
        write!(f, "]")
    }
}

/// All integer vectors `x` with `xᵀ·M·x ≤ bound` for a positive-definite `M`,
/// by Fincke–Pohst enumeration on the exact LDLᵀ decomposition of `M`.
fn short_vectors(m: &RMatrix, bound: &Rational) -> Vec<Vec<i64>> {
    let n = m.rows();
    // q[i][i] = d_i, q[i][j] (j > i) = multiplier, so that
    // xᵀMx = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)².
    let mut q = m.to_rows();
    for i in 0..n {
        for j in i + 1..n {
            let qij = q[i][j].clone();
            q[j][i] = qij.clone();
            q[i][j] = qij / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let delta = &q[k][i] * &q[i][l];
                q[k][l] -= delta;
            }
        }
    }

    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn recurse(i: usize, remaining: Rational, q: &[Vec<Rational>], x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = x.len();
        let center: Rational = (i + 1..n).map(|j| &q[i][j] * Rational::from_integer(x[j].into())).sum();
        let radius_sq = &remaining / &q[i][i];
        let c = center.to_f64().unwrap_or(0.0);
        let r = radius_sq.to_f64().unwrap_or(0.0).max(0.0).sqrt();
        let lo = (-c - r).floor() as i64 - 1;
        let hi = (-c + r).ceil() as i64 + 1;
        for v in lo..=hi {
            let shifted = Rational::from_integer(v.into()) + &center;
            let used = &q[i][i] * &shifted * &shifted;
            if used > remaining {
                continue;
            }
            x[i] = v;
            if i == 0 {
                out.push(x.clone());
            } else {
                recurse(i - 1, &remaining - &used, q, x, out);
            }
        }
        x[i] = 0;
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    recurse(n - 1, bound.clone(), &q, &mut x, &mut out);
    out.sort();
    out
}

/// Every vector of square −2 in a negative-definite lattice, sorted
/// lexicographically.
pub fn roots_of(l: &Lattice) -> Result<Vec<Vec<i64>>> {
    if !l.is_negative_definite() {
        return Err(LatticeError::NotNegativeDefinite(l.name.clone()));
    }
    let pos = l.gram_matrix().neg();
    let two = exactmath::int(2);
    Ok(short_vectors(&pos, &two)
        .into_iter()
        .filter(|x| l.product_unchecked(x, x) == -2)
        .collect())
}

/// Certificate that no embedding exists: the Gram equations have no solution
/// modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularObstruction {
    pub modulus: u64,
    /// Diagonal equations were taken on `x²/2` (target and source even),
    /// which carries one more bit of 2-adic information than `x²`.
    pub half_norm: bool,
    /// Size of the residue space `m^(rank(target)·rank(source))` that was exhausted.
    pub assignments: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingStatus {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingVerdict {
    /// Target coordinates of the images of the source basis vectors.
    Yes {
        witness: Vec<Vec<i64>>,
    },
    No {
        obstruction: ModularObstruction,
    },
    Unknown {
        search_bound: i64,
        moduli: Vec<u64>,
    },
}

impl EmbeddingVerdict {
    pub fn status(&self) -> EmbeddingStatus {
        match self {
            EmbeddingVerdict::Yes { .. } => EmbeddingStatus::Yes,
            EmbeddingVerdict::No { .. } => EmbeddingStatus::No,
            EmbeddingVerdict::Unknown { .. } => EmbeddingStatus::Unknown,
        }
    }
}

pub const DEFAULT_SEARCH_BOUND: i64 = 6;
pub const DEFAULT_MODULI: [u64; 3] = [2, 3, 4];

/// Box sizes beyond this are not searched for witnesses.
const MAX_BOX: u128 = 20_000_000;
/// Moduli whose per-vector residue space exceeds this are skipped.
const MAX_RESIDUE_VECTORS: u128 = 4_000_000;

/// True iff the witness vectors realize the source Gram under the target form.
pub fn verify_witness(source: &Lattice, target: &Lattice, witness: &[Vec<i64>]) -> bool {
    witness.len() == source.rank()
        && witness.iter().all(|v| v.len() == target.rank())
        && (0..source.rank()).all(|i| {
            (0..source.rank()).all(|j| target.product_unchecked(&witness[i], &witness[j]) == source.gram[i][j])
        })
}

fn check_root_source(source: &Lattice) -> Result<()> {
    let diag_ok = source.gram.iter().enumerate().all(|(i, r)| r[i] == -2);
    if !diag_ok || !source.is_negative_definite() {
        return Err(LatticeError::NotRootBasis(source.name.clone()));
    }
    Ok(())
}

/// Decides whether `source` (a root basis) embeds isometrically into
/// `target`, as a not necessarily primitive sublattice.
///
/// A witness search over the coordinate box `[-search_bound, search_bound]`
/// and a residue enumeration modulo each of `moduli` run independently;
/// either certificate is sound on its own.
pub fn embeds_root(source: &Lattice, target: &Lattice, search_bound: i64, moduli: &[u64]) -> Result<EmbeddingVerdict> {
    check_root_source(source)?;
    let witness = search_witness(source, target, search_bound);
    let obstruction = moduli
        .iter()
        .filter(|&&m| m >= 2)
        .find_map(|&m| modular_obstruction(source, target, m));

    match (witness, obstruction) {
        (Some(_), Some(o)) => panic!("embedding witness coexists with an obstruction mod {}", o.modulus),
        (Some(witness), None) => {
            debug_assert!(verify_witness(source, target, &witness));
            Ok(EmbeddingVerdict::Yes { witness })
        }
        (None, Some(obstruction)) => Ok(EmbeddingVerdict::No { obstruction }),
        (None, None) => Ok(EmbeddingVerdict::Unknown {
            search_bound,
            moduli: moduli.to_vec(),
        }),
    }
}

/// Lexicographically least witness tuple, with candidate vectors ordered by
/// max-norm and then lexicographically.
fn search_witness(source: &Lattice, target: &Lattice, bound: i64) -> Option<Vec<Vec<i64>>> {
    let n = target.rank();
    let r = source.rank();
    if r == 0 {
        return Some(Vec::new());
    }
    let side = (2 * bound.max(0) + 1) as u128;
    if side.checked_pow(n as u32).is_none_or(|s| s > MAX_BOX) {
        return None;
    }
    let want = source.gram[0][0];
    let mut candidates: Vec<Vec<i64>> = box_vectors(n, -bound, bound)
        .into_iter()
        .filter(|x| target.product_unchecked(x, x) == want)
        .collect();
    candidates.sort_by_key(|v| (v.iter().map(|c| c.abs()).max().unwrap_or(0), v.clone()));
    let images: Vec<Vec<i64>> = candidates
        .iter()
        .map(|v| {
            target
                .gram
                .iter()
                .map(|row| row.iter().zip(v).map(|(g, c)| g * c).sum())
                .collect()
        })
        .collect();

    fn dfs(
        depth: usize,
        chosen: &mut Vec<usize>,
        source: &Lattice,
        candidates: &[Vec<i64>],
        images: &[Vec<i64>],
    ) -> bool {
        if depth == source.rank() {
            return true;
        }
        for c in 0..candidates.len() {
            let ok = chosen.iter().enumerate().all(|(i, &p)| {
                let prod: i64 = images[p].iter().zip(&candidates[c]).map(|(a, b)| a * b).sum();
                prod == source.gram[i][depth]
            });
            if ok {
                chosen.push(c);
                if dfs(depth + 1, chosen, source, candidates, images) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    let mut chosen = Vec::new();
    if dfs(0, &mut chosen, source, &candidates, &images) {
        Some(chosen.into_iter().map(|c| candidates[c].clone()).collect())
    } else {
        None
    }
}

fn use_half_norm(source: &Lattice, target: &Lattice) -> bool {
    source.is_even() && target.is_even()
}

/// `x²/2` for an even form, `x²` otherwise, reduced mod `m`.
fn norm_residue(target: &Lattice, x: &[i64], half: bool, m: i64) -> i64 {
    let n = x.len();
    let mut s: i64 = 0;
    for i in 0..n {
        let d = if half { target.gram[i][i] / 2 } else { target.gram[i][i] };
        s = (s + d * x[i] % m * x[i]) % m;
        for j in i + 1..n {
            let g = if half { target.gram[i][j] } else { 2 * target.gram[i][j] };
            s = (s + g % m * x[i] % m * x[j]) % m;
        }
    }
    s.rem_euclid(m)
}

fn pair_residue(target: &Lattice, x: &[i64], y: &[i64], m: i64) -> i64 {
    let mut s: i64 = 0;
    for (i, row) in target.gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            s = (s + g % m * x[i] % m * y[j]) % m;
        }
    }
    s.rem_euclid(m)
}

fn source_norm_target(source: &Lattice, i: usize, half: bool, m: i64) -> i64 {
    let d = source.gram[i][i];
    (if half { d / 2 } else { d }).rem_euclid(m)
}

/// Every vector of `[lo, hi]^n`, in odometer order.
fn box_vectors(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut x = vec![lo; n];
    loop {
        out.push(x.clone());
        let mut k = 0;
        while k < n {
            x[k] += 1;
            if x[k] <= hi {
                break;
            }
            x[k] = lo;
            k += 1;
        }
        if k == n {
            return out;
        }
    }
}

fn modular_obstruction(source: &Lattice, target: &Lattice, modulus: u64) -> Option<ModularObstruction> {
    let n = target.rank();
    let r = source.rank();
    let m = modulus as i64;
    if (modulus as u128)
        .checked_pow(n as u32)
        .is_none_or(|s| s > MAX_RESIDUE_VECTORS)
    {
        return None;
    }
    let half = use_half_norm(source, target);
    let all = box_vectors(n, 0, m - 1);
    let per_slot: Vec<Vec<&Vec<i64>>> = (0..r)
        .map(|i| {
            let want = source_norm_target(source, i, half, m);
            all.iter()
                .filter(|x| norm_residue(target, x, half, m) == want)
                .collect()
        })
        .collect();

    fn solvable(
        depth: usize,
        chosen: &mut Vec<Vec<i64>>,
        per_slot: &[Vec<&Vec<i64>>],
        source: &Lattice,
        target: &Lattice,
        m: i64,
    ) -> bool {
        if depth == per_slot.len() {
            return true;
        }
        for cand in &per_slot[depth] {
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(i, prev)| pair_residue(target, prev, cand, m) == source.gram[i][depth].rem_euclid(m));
            if ok {
                chosen.push((*cand).clone());
                if solvable(depth + 1, chosen, per_slot, source, target, m) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    if solvable(0, &mut Vec::new(), &per_slot, source, target, m) {
        None
    } else {
        Some(ModularObstruction {
            modulus,
            half_norm: half,
            assignments: BigUint::from(modulus).pow((n * r) as u32),
        })
    }
}

impl ModularObstruction {
    /// Recounts solutions by walking every one of the `m^(n·r)` residue
    /// assignments in turn (no pruning). True iff none solves the system.
    pub fn recheck(&self, source: &Lattice, target: &Lattice) -> bool {
        let n = target.rank();
        let r = source.rank();
        let m = self.modulus as i64;
        let total = n * r;
        if (self.modulus as u128)
            .checked_pow(total as u32)
            .is_none_or(|s| s > 50_000_000)
        {
            return false;
        }
        let mut flat = vec![0i64; total];
        let mut visited = BigUint::zero();
        loop {
            visited += 1u32;
            let vecs: Vec<&[i64]> = flat.chunks(n).collect();
            let solves = (0..r).all(|i| {
                norm_residue(target, vecs[i], self.half_norm, m) == source_norm_target(source, i, self.half_norm, m)
                    && (i + 1..r).all(|j| pair_residue(target, vecs[i], vecs[j], m) == source.gram[i][j].rem_euclid(m))
            });
            if solves {
                return false;
            }
            let mut k = 0;
            while k < total {
                flat[k] += 1;
                if flat[k] < m {
                    break;
                }
                flat[k] = 0;
                k += 1;
            }
            if k == total {
                break;
            }
        }
        visited == self.assignments && self.half_norm == use_half_norm(source, target)
    }
}
