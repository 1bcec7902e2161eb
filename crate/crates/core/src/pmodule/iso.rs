use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{hom_space, ModuleError, NaturalTransformation, PersistenceModule};
use crate::linalg::{Field, Matrix, Scalar};
use crate::par::{self, Exec};

/// Budget for exhaustive search over GF(p): `p^(hom dim)` combinations.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct IsoOptions {
    pub seed: u64,
    /// Seeded random combinations tried after the basis elements.
    pub random_budget: usize,
    pub exec: Exec,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            seed: 0,
            random_budget: 64,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum NonIsoReason {
    DimensionVectors,
    /// Every combination of the hom basis was tested.
    Exhaustive { combinations: u64 },
    /// The invertibility polynomial vanished at every sampled point.
    PolynomialVanishes { points: usize },
}

#[derive(Clone, Debug)]
pub enum IsoOutcome {
    Isomorphic(NaturalTransformation),
    NotIsomorphic(NonIsoReason),
}

impl IsoOutcome {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic(_))
    }

    pub fn witness(&self) -> Option<&NaturalTransformation> {
        match self {
            IsoOutcome::Isomorphic(w) => Some(w),
            IsoOutcome::NotIsomorphic(_) => None,
        }
    }
}

fn combination(basis: &[NaturalTransformation], coeffs: &[Scalar], e: usize) -> Matrix {
    let first = basis[0].component(e);
    let mut acc = Matrix::zeros(first.field(), first.rows(), first.cols());
    for (t, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&t.component(e).scale(c)).expect("same shapes");
        }
    }
    acc
}

fn invertible_combination(basis: &[NaturalTransformation], coeffs: &[Scalar]) -> bool {
    let dims = basis[0].source().dims();
    (0..dims.len()).all(|e| dims[e] == 0 || combination(basis, coeffs, e).is_invertible())
}

fn random_coeffs(rng: &mut ChaCha8Rng, field: Field, k: usize, spread: i64) -> Vec<Scalar> {
    (0..k)
        .map(|_| match field {
            Field::Rationals => field.from_i64(rng.gen_range(-spread..=spread)),
            Field::Prime { p } => field.from_u64(rng.gen_range(0..p as u64)),
        })
        .collect()
}

fn digits(mut index: u64, p: u64, k: usize, field: Field) -> Vec<Scalar> {
    (0..k)
        .map(|_| {
            let d = index % p;
            index /= p;
            field.from_u64(d)
        })
        .collect()
}

/// Searches `hom(m, n)` for a transformation invertible at every element.
///
/// Order: each basis element, then `random_budget` seeded combinations. If
/// none is invertible, GF(p) with `p^k <= 2^20` is searched exhaustively;
/// otherwise `(k + max dim)^2` further points are sampled from a wide range
/// before reporting that the invertibility polynomial vanishes.
pub fn is_isomorphic(
    m: &Arc<PersistenceModule>,
    n: &Arc<PersistenceModule>,
    opts: IsoOptions,
) -> Result<IsoOutcome, ModuleError> {
    m.same_base(n)?;
    if m.dims() != n.dims() {
        return Ok(IsoOutcome::NotIsomorphic(NonIsoReason::DimensionVectors));
    }
    let field = m.field();
    if m.is_zero() {
        return Ok(IsoOutcome::Isomorphic(NaturalTransformation::zero(m, n)));
    }
    let basis = hom_space(m, n)?;
    let k = basis.len();
    if k == 0 {
        return Ok(IsoOutcome::NotIsomorphic(NonIsoReason::Exhaustive {
            combinations: 1,
        }));
    }
    let found = |coeffs: Vec<Scalar>| NaturalTransformation::linear_combination(&basis, &coeffs);

    let unit = |i: usize| {
        (0..k)
            .map(|j| if i == j { field.one() } else { field.zero() })
            .collect::<Vec<_>>()
    };
    let mut candidates: Vec<Vec<Scalar>> = (0..k).map(unit).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    candidates.extend((0..opts.random_budget).map(|_| random_coeffs(&mut rng, field, k, 8)));
    if let Some((_, c)) = par::find_first(&candidates, opts.exec, |c| {
        invertible_combination(&basis, c).then(|| c.clone())
    }) {
        return Ok(IsoOutcome::Isomorphic(found(c)));
    }

    if let Field::Prime { p } = field {
        let p = p as u64;
        if let Some(total) = (p as u128).checked_pow(k as u32).filter(|&t| t <= EXHAUSTIVE_LIMIT as u128) {
            let total = total as u64;
            let hit = par::find_first_index(total, opts.exec, |idx| {
                let c = digits(idx, p, k, field);
                invertible_combination(&basis, &c).then_some(c)
            });
            return Ok(match hit {
                Some((_, c)) => IsoOutcome::Isomorphic(found(c)),
                None => IsoOutcome::NotIsomorphic(NonIsoReason::Exhaustive {
                    combinations: total,
                }),
            });
        }
    }

    let points = (k + m.max_dim()).pow(2);
    let wide: Vec<Vec<Scalar>> = (0..points)
        .map(|_| random_coeffs(&mut rng, field, k, 1 << 20))
        .collect();
    match par::find_first(&wide, opts.exec, |c| {
        invertible_combination(&basis, c).then(|| c.clone())
    }) {
        Some((_, c)) => Ok(IsoOutcome::Isomorphic(found(c))),
        None => Ok(IsoOutcome::NotIsomorphic(NonIsoReason::PolynomialVanishes {
            points,
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmodule::direct_sum;
    use crate::poset::Poset;

    #[test]
    fn module_is_isomorphic_to_itself() {
        let q = Field::Rationals;
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let m = Arc::new(
            PersistenceModule::new(p, q, vec![2, 1], vec![Matrix::from_i64(q, &[&[1, 1]])])
                .unwrap(),
        );
        let out = is_isomorphic(&m, &m, IsoOptions::default()).unwrap();
        assert!(out.witness().unwrap().is_isomorphism());
    }

    #[test]
    fn different_dimension_vectors() {
        let q = Field::Rationals;
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let a = Arc::new(PersistenceModule::indicator(p.clone(), q, &[true, true]));
        let b = Arc::new(PersistenceModule::indicator(p, q, &[true, false]));
        assert!(matches!(
            is_isomorphic(&a, &b, IsoOptions::default()).unwrap(),
            IsoOutcome::NotIsomorphic(NonIsoReason::DimensionVectors)
        ));
    }

    #[test]
    fn same_dimensions_different_modules() {
        // [1 0]: K^2 -> K versus the zero map plus... both dims (2,1)
        for field in [Field::Rationals, Field::prime(3).unwrap(), Field::prime(1_000_003).unwrap()] {
            let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
            let a = Arc::new(
                PersistenceModule::new(p.clone(), field, vec![2, 1], vec![Matrix::from_i64(field, &[&[1, 0]])])
                    .unwrap(),
            );
            let b = Arc::new(
                PersistenceModule::new(p, field, vec![2, 1], vec![Matrix::zeros(field, 1, 2)]).unwrap(),
            );
            let out = is_isomorphic(&a, &b, IsoOptions::default()).unwrap();
            assert!(!out.is_isomorphic(), "{field}");
        }
    }

    #[test]
    fn finds_non_obvious_isomorphism() {
        // I_[a,b] ⊕ I_[b] versus the module K -> K^2 with map [1; 1].
        let q = Field::Rationals;
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let long = Arc::new(PersistenceModule::indicator(p.clone(), q, &[true, true]));
        let short = Arc::new(PersistenceModule::indicator(p.clone(), q, &[false, true]));
        let sum = direct_sum(&long, &short).unwrap().module;
        let skew = Arc::new(
            PersistenceModule::new(p, q, vec![1, 2], vec![Matrix::from_i64(q, &[&[1], &[1]])])
                .unwrap(),
        );
        for exec in [Exec::Sequential, Exec::Parallel] {
            let opts = IsoOptions { exec, ..Default::default() };
            let w = is_isomorphic(&sum, &skew, opts).unwrap();
            let w = w.witness().expect("isomorphic");
            assert!(w.is_natural() && w.is_isomorphism());
        }
    }
}
