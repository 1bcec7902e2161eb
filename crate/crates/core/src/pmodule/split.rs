use std::sync::Arc;

use super::{ModuleError, NaturalTransformation, PersistenceModule};
use crate::linalg::{Matrix, Scalar};

/// Per-element subspaces of `ambient` closed under the structure maps. The
/// columns of `basis[e]` span the subspace at `e`.
#[derive(Clone, Debug)]
pub struct Submodule {
    ambient: Arc<PersistenceModule>,
    basis: Vec<Matrix>,
}

impl Submodule {
    pub fn new(ambient: Arc<PersistenceModule>, basis: Vec<Matrix>) -> Result<Self, ModuleError> {
        let p = ambient.poset();
        if basis.len() != p.len() {
            return Err(ModuleError::CountMismatch {
                expected: p.len(),
                found: basis.len(),
            });
        }
        for (e, b) in basis.iter().enumerate() {
            if b.rows() != ambient.dim(e) || b.rank() != b.cols() {
                return Err(ModuleError::NotASubmodule(p.id(e).to_string()));
            }
        }
        for (ci, &(a, b)) in p.covers().iter().enumerate() {
            let image = ambient.map(ci).mul(&basis[a])?;
            if basis[b].solve(&image)?.is_none() {
                return Err(ModuleError::NotASubmodule(p.id(a).to_string()));
            }
        }
        Ok(Submodule { ambient, basis })
    }

    /// Submodule spanned per element by arbitrary vectors; the spans are put in
    /// canonical (rref) form.
    pub fn spanned_by(
        ambient: Arc<PersistenceModule>,
        vectors: Vec<Vec<Vec<Scalar>>>,
    ) -> Result<Self, ModuleError> {
        let field = ambient.field();
        let basis = vectors
            .iter()
            .enumerate()
            .map(|(e, vs)| {
                let d = ambient.dim(e);
                let canon = Matrix::span_basis(field, d, vs);
                Matrix::from_columns(field, d, &canon)
            })
            .collect();
        Self::new(ambient, basis)
    }

    pub fn ambient(&self) -> &Arc<PersistenceModule> {
        &self.ambient
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Matrix::cols).collect()
    }

    /// The submodule as a module in its own basis.
    pub fn restrict(&self) -> Result<PersistenceModule, ModuleError> {
        let p = self.ambient.poset();
        let maps = p
            .covers()
            .iter()
            .enumerate()
            .map(|(ci, &(a, b))| {
                let image = self.ambient.map(ci).mul(&self.basis[a])?;
                self.basis[b]
                    .solve(&image)?
                    .ok_or_else(|| ModuleError::NotASubmodule(p.id(a).to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        PersistenceModule::new(
            self.ambient.poset_arc().clone(),
            self.ambient.field(),
            self.dims(),
            maps,
        )
    }
}

/// A direct summand with its inclusion into and projection from the ambient module.
#[derive(Clone, Debug)]
pub struct Summand {
    pub module: Arc<PersistenceModule>,
    pub inclusion: NaturalTransformation,
    pub projection: NaturalTransformation,
}

/// Splits `m` along two complementary submodules given by bases. Fails unless
/// both are submodules and their bases together form a basis at every element.
pub fn split_with_bases(
    m: &Arc<PersistenceModule>,
    first: Vec<Matrix>,
    second: Vec<Matrix>,
) -> Result<(Summand, Summand), ModuleError> {
    let first = Submodule::new(m.clone(), first)?;
    let second = Submodule::new(m.clone(), second)?;
    let p = m.poset();
    let field = m.field();
    let mut proj_first = Vec::with_capacity(p.len());
    let mut proj_second = Vec::with_capacity(p.len());
    for e in 0..p.len() {
        let (k, i) = (&first.basis[e], &second.basis[e]);
        let joint = Matrix::hstack(field, m.dim(e), &[k, i])?;
        let inv = joint
            .inverse()
            .ok_or_else(|| ModuleError::NotComplementary(p.id(e).to_string()))?;
        let rows_first: Vec<usize> = (0..k.cols()).collect();
        let rows_second: Vec<usize> = (k.cols()..k.cols() + i.cols()).collect();
        proj_first.push(inv.select_rows(&rows_first));
        proj_second.push(inv.select_rows(&rows_second));
    }
    let make = |sub: Submodule, proj: Vec<Matrix>| -> Result<Summand, ModuleError> {
        let module = Arc::new(sub.restrict()?);
        let inclusion =
            NaturalTransformation::new_unchecked(module.clone(), m.clone(), sub.basis.clone());
        let projection = NaturalTransformation::new_unchecked(m.clone(), module.clone(), proj);
        Ok(Summand {
            module,
            inclusion,
            projection,
        })
    };
    Ok((make(first, proj_first)?, make(second, proj_second)?))
}

/// `m = ker(f^N) ⊕ im(f^N)` for a natural endomorphism `f`.
#[derive(Clone, Debug)]
pub struct FittingSplit {
    /// The exponent `N`, the total dimension of `m` (at least 1).
    pub exponent: u64,
    pub kernel: Summand,
    pub image: Summand,
}

pub fn fitting_split(
    m: &Arc<PersistenceModule>,
    f: &NaturalTransformation,
) -> Result<FittingSplit, ModuleError> {
    if !f.is_endomorphism_of(m) {
        return Err(ModuleError::NotAnEndomorphism);
    }
    if let Some(ci) = f.naturality_failure() {
        let (a, b) = m.poset().covers()[ci];
        return Err(ModuleError::NotNatural(
            m.poset().id(a).to_string(),
            m.poset().id(b).to_string(),
        ));
    }
    let exponent = m.total_dim().max(1) as u64;
    let field = m.field();
    let fpow = f.power(exponent)?;
    let mut kernel = Vec::new();
    let mut image = Vec::new();
    for (e, g) in fpow.components().iter().enumerate() {
        let d = m.dim(e);
        let ker = Matrix::span_basis(field, d, &g.nullspace());
        kernel.push(Matrix::from_columns(field, d, &ker));
        image.push(Matrix::from_columns(field, d, &g.column_space()));
    }
    let (kernel, image) = split_with_bases(m, kernel, image)?;
    Ok(FittingSplit {
        exponent,
        kernel,
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::pmodule::{direct_sum, hom_space};
    use crate::poset::Poset;

    const Q: Field = Field::Rationals;

    fn two_intervals() -> Arc<PersistenceModule> {
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let long = Arc::new(PersistenceModule::indicator(p.clone(), Q, &[true, true]));
        let short = Arc::new(PersistenceModule::indicator(p, Q, &[false, true]));
        direct_sum(&long, &short).unwrap().module
    }

    #[test]
    fn identity_and_zero_endomorphisms() {
        let m = two_intervals();
        let id = NaturalTransformation::identity(&m);
        let s = fitting_split(&m, &id).unwrap();
        assert!(s.kernel.module.is_zero());
        assert_eq!(s.image.module.dims(), m.dims());
        let zero = NaturalTransformation::zero(&m, &m);
        let s = fitting_split(&m, &zero).unwrap();
        assert!(s.image.module.is_zero());
        assert_eq!(s.kernel.module.dims(), m.dims());
    }

    #[test]
    fn splits_along_an_idempotent() {
        let m = two_intervals();
        let end = hom_space(&m, &m).unwrap();
        assert_eq!(end.len(), 3);
        let idem = end
            .iter()
            .find(|f| f.is_idempotent() && !f.is_zero() && !f.is_identity())
            .expect("a projection onto one interval");
        let s = fitting_split(&m, idem).unwrap();
        let total: Vec<usize> = (0..2)
            .map(|e| s.kernel.module.dim(e) + s.image.module.dim(e))
            .collect();
        assert_eq!(total, m.dims());
        assert!(s.kernel.inclusion.is_natural() && s.image.inclusion.is_natural());
        assert!(s.kernel.projection.is_natural() && s.image.projection.is_natural());
        // projection ∘ inclusion = id on each summand
        assert!(s.kernel.projection.compose(&s.kernel.inclusion).unwrap().is_identity());
    }

    #[test]
    fn rejects_foreign_transformations() {
        let m = two_intervals();
        let other = Arc::new(PersistenceModule::zero(m.poset_arc().clone(), Q));
        let f = NaturalTransformation::zero(&m, &other);
        assert!(matches!(fitting_split(&m, &f), Err(ModuleError::NotAnEndomorphism)));
    }
}
