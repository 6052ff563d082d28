use num_traits::{One, Signed, Zero};

use super::simplex::{self, LpOutcome};
use super::{dot, ExactError, RMatrix, Rational, Result};

/// Outcome of a cone membership query, with a certificate either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeQueryResult {
    /// Nonnegative coefficients, one per generator, reproducing the query.
    Member { coefficients: Vec<Rational> },
    /// A functional nonnegative on every generator and negative on the query.
    NotMember { functional: Vec<Rational> },
}

impl ConeQueryResult {
    pub fn is_member(&self) -> bool {
        matches!(self, ConeQueryResult::Member { .. })
    }

    /// Re-checks the certificate against the generators and the query vector.
    pub fn verify(&self, generators: &[Vec<Rational>], x: &[Rational]) -> bool {
        match self {
            ConeQueryResult::Member { coefficients } => {
                if coefficients.len() != generators.len() || coefficients.iter().any(|c| c.is_negative()) {
                    return false;
                }
                (0..x.len()).all(|k| {
                    let s: Rational = coefficients.iter().zip(generators).map(|(c, g)| c * &g[k]).sum();
                    s == x[k]
                })
            }
            ConeQueryResult::NotMember { functional } => {
                generators.iter().all(|g| !dot(functional, g).is_negative()) && dot(functional, x).is_negative()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamMax {
    Finite(Rational),
    Unbounded,
}

fn generator_matrix(generators: &[Vec<Rational>], dim: usize) -> Result<RMatrix> {
    if generators.is_empty() {
        return Err(ExactError::EmptyGenerators);
    }
    for g in generators {
        if g.len() != dim {
            return Err(ExactError::DimensionMismatch {
                expected: dim,
                found: g.len(),
            });
        }
    }
    let mut m = RMatrix::zeros(dim, generators.len());
    for (j, g) in generators.iter().enumerate() {
        for (i, x) in g.iter().enumerate() {
            m[(i, j)] = x.clone();
        }
    }
    Ok(m)
}

/// Decides `x ∈ { Σ λᵢ gᵢ : λᵢ ≥ 0 }` exactly.
pub fn cone_contains(generators: &[Vec<Rational>], x: &[Rational]) -> Result<ConeQueryResult> {
    let a = generator_matrix(generators, x.len())?;
    let zero_cost = vec![Rational::zero(); generators.len()];
    let result = match simplex::solve(&a, x, &zero_cost) {
        LpOutcome::Optimal { x: coefficients, .. } => ConeQueryResult::Member { coefficients },
        LpOutcome::Infeasible { farkas } => ConeQueryResult::NotMember { functional: farkas },
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    };
    assert!(result.verify(generators, x), "cone certificate failed re-check");
    Ok(result)
}

/// Supremum of `t` with `d − t·c` in the cone. Requires `d` in the cone.
pub fn cone_max_param(generators: &[Vec<Rational>], d: &[Rational], c: &[Rational]) -> Result<ParamMax> {
    if c.len() != d.len() {
        return Err(ExactError::DimensionMismatch {
            expected: d.len(),
            found: c.len(),
        });
    }
    if !cone_contains(generators, d)?.is_member() {
        return Err(ExactError::NotInCone);
    }
    // Σ λᵢ gᵢ + t·c = d, maximize t.
    let mut cols = generators.to_vec();
    cols.push(c.to_vec());
    let a = generator_matrix(&cols, d.len())?;
    let mut cost = vec![Rational::zero(); cols.len()];
    cost[generators.len()] = -Rational::one();
    match simplex::solve(&a, d, &cost) {
        LpOutcome::Optimal { x, .. } => Ok(ParamMax::Finite(x[generators.len()].clone())),
        LpOutcome::Unbounded => Ok(ParamMax::Unbounded),
        LpOutcome::Infeasible { .. } => unreachable!("t = 0 is feasible"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, ints, rat};

    fn gens(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|g| ints(g)).collect()
    }

    #[test]
    fn orthant_membership() {
        let g = gens(&[&[1, 0], &[0, 1]]);
        assert_eq!(
            cone_contains(&g, &ints(&[2, 3])).unwrap(),
            ConeQueryResult::Member {
                coefficients: ints(&[2, 3])
            }
        );
        let out = cone_contains(&g, &ints(&[-1, 0])).unwrap();
        assert!(!out.is_member());
        assert!(out.verify(&g, &ints(&[-1, 0])));
    }

    #[test]
    fn blowup_cone_certificate() {
        // generators E = (0,1), L-E = (1,-1); L + 2E = 3E + (L-E)
        let g = gens(&[&[0, 1], &[1, -1]]);
        assert_eq!(
            cone_contains(&g, &ints(&[1, 2])).unwrap(),
            ConeQueryResult::Member {
                coefficients: ints(&[3, 1])
            }
        );
    }

    #[test]
    fn param_max_examples() {
        let g = gens(&[&[0, 1], &[1, -1]]);
        assert_eq!(
            cone_max_param(&g, &ints(&[3, -1]), &ints(&[0, 1])).unwrap(),
            ParamMax::Finite(int(2))
        );
        assert_eq!(
            cone_max_param(&gens(&[&[1]]), &ints(&[1]), &ints(&[1])).unwrap(),
            ParamMax::Finite(int(1))
        );
        assert_eq!(
            cone_max_param(&gens(&[&[1, 0], &[0, 1]]), &ints(&[1, 1]), &ints(&[0, -1])).unwrap(),
            ParamMax::Unbounded
        );
        assert_eq!(
            cone_max_param(&g, &ints(&[3, -1]), &ints(&[2, 1])).unwrap(),
            ParamMax::Finite(rat(2, 3))
        );
    }

    #[test]
    fn param_max_requires_membership() {
        let g = gens(&[&[1, 0], &[0, 1]]);
        assert_eq!(
            cone_max_param(&g, &ints(&[-1, 0]), &ints(&[1, 0])),
            Err(ExactError::NotInCone)
        );
    }

    #[test]
    fn errors() {
        assert_eq!(cone_contains(&[], &ints(&[1])), Err(ExactError::EmptyGenerators));
        assert!(matches!(
            cone_contains(&gens(&[&[1, 0]]), &ints(&[1])),
            Err(ExactError::DimensionMismatch { .. })
        ));
    }
}
