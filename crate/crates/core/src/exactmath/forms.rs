use num_traits::{Signed, Zero};

use super::{ExactError, RMatrix, Rational, Result};

/// Inertia of a symmetric form: counts of positive, negative and zero
/// eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn new(n_plus: usize, n_minus: usize, n_zero: usize) -> Self {
        Signature {
            n_plus,
            n_minus,
            n_zero,
        }
    }

    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }
}

/// Exact determinant by Gaussian elimination with row exchanges.
pub fn determinant(m: &RMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(ExactError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut det = Rational::from_integer(1.into());
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    Ok(det)
}

/// Sylvester's criterion: the k-th leading principal minor has sign (−1)^k.
/// A vanishing minor means the form is not definite.
pub fn is_negative_definite(g: &RMatrix) -> Result<bool> {
    g.check_symmetric()?;
    for k in 1..=g.rows() {
        let idx: Vec<usize> = (0..k).collect();
        let minor = determinant(&g.principal(&idx))?;
        let want_positive = k % 2 == 0;
        let ok = if want_positive {
            minor.is_positive()
        } else {
            minor.is_negative()
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inertia by symmetric Gaussian reduction over ℚ.
///
/// Diagonal pivots are eliminated by congruence; when every remaining
/// diagonal entry vanishes but some off-diagonal entry `a_ij` does not, row
/// and column `j` are added to `i`, which makes the new diagonal entry
/// `2·a_ij` nonzero.
pub fn signature_of(g: &RMatrix) -> Result<Signature> {
    g.check_symmetric()?;
    let mut a = g.to_rows();
    let mut active: Vec<usize> = (0..g.rows()).collect();
    let mut sig = Signature::new(0, 0, 0);

    while !active.is_empty() {
        let pivot = active.iter().position(|&i| !a[i][i].is_zero());
        let pos = match pivot {
            Some(pos) => pos,
            None => {
                let pair = active
                    .iter()
                    .enumerate()
                    .find_map(|(pi, &i)| active.iter().find(|&&j| j != i && !a[i][j].is_zero()).map(|&j| (pi, j)));
                let Some((pi, j)) = pair else {
                    sig.n_zero += active.len();
                    break;
                };
                let i = active[pi];
                let n = a.len();
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                pi
            }
        };
        let i = active.remove(pos);
        let d = a[i][i].clone();
        if d.is_positive() {
            sig.n_plus += 1;
        } else {
            sig.n_minus += 1;
        }
        for &r in &active {
            if a[r][i].is_zero() {
                continue;
            }
            let factor = &a[r][i] / &d;
            for &c in &active {
                let delta = &factor * &a[i][c];
                a[r][c] -= delta;
            }
        }
    }
    Ok(sig)
}
