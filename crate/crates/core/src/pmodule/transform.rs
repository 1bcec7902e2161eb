use std::sync::Arc;

use super::{ModuleError, PersistenceModule};
use crate::linalg::{Matrix, Scalar};
use crate::poset::Elem;

/// A family of matrices `source(e) -> target(e)` commuting with all cover maps.
#[derive(Clone)]
pub struct NaturalTransformation {
    source: Arc<PersistenceModule>,
    target: Arc<PersistenceModule>,
    components: Vec<Matrix>,
}

impl std::fmt::Debug for NaturalTransformation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let comps: Vec<(&str, &Matrix)> = self
            .components
            .iter()
            .enumerate()
            .map(|(e, m)| (self.source.poset().id(e), m))
            .collect();
        f.debug_struct("NaturalTransformation")
            .field("components", &comps)
            .finish()
    }
}

impl PartialEq for NaturalTransformation {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
            && *self.source == *other.source
            && *self.target == *other.target
    }
}

impl NaturalTransformation {
    /// Checks shapes and naturality on every cover.
    pub fn new(
        source: Arc<PersistenceModule>,
        target: Arc<PersistenceModule>,
        components: Vec<Matrix>,
    ) -> Result<Self, ModuleError> {
        source.same_base(&target)?;
        let p = source.poset();
        if components.len() != p.len() {
            return Err(ModuleError::CountMismatch {
                expected: p.len(),
                found: components.len(),
            });
        }
        for (e, c) in components.iter().enumerate() {
            if c.field() != source.field() {
                return Err(ModuleError::FieldMismatch);
            }
            if c.shape() != (target.dim(e), source.dim(e)) {
                return Err(ModuleError::ShapeMismatch {
                    lower: p.id(e).to_string(),
                    upper: p.id(e).to_string(),
                    expected: (target.dim(e), source.dim(e)),
                    found: c.shape(),
                });
            }
        }
        let t = Self::new_unchecked(source, target, components);
        if let Some(ci) = t.naturality_failure() {
            let p = t.source.poset();
            let (a, b) = p.covers()[ci];
            return Err(ModuleError::NotNatural(
                p.id(a).to_string(),
                p.id(b).to_string(),
            ));
        }
        Ok(t)
    }

    pub(crate) fn new_unchecked(
        source: Arc<PersistenceModule>,
        target: Arc<PersistenceModule>,
        components: Vec<Matrix>,
    ) -> Self {
        NaturalTransformation {
            source,
            target,
            components,
        }
    }

    pub fn identity(m: &Arc<PersistenceModule>) -> Self {
        let comps = m
            .dims()
            .iter()
            .map(|&d| Matrix::identity(m.field(), d))
            .collect();
        Self::new_unchecked(m.clone(), m.clone(), comps)
    }

    pub fn zero(source: &Arc<PersistenceModule>, target: &Arc<PersistenceModule>) -> Self {
        let comps = (0..source.poset().len())
            .map(|e| Matrix::zeros(source.field(), target.dim(e), source.dim(e)))
            .collect();
        Self::new_unchecked(source.clone(), target.clone(), comps)
    }

    pub fn source(&self) -> &Arc<PersistenceModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PersistenceModule> {
        &self.target
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn component(&self, e: Elem) -> &Matrix {
        &self.components[e]
    }

    /// Index of the first cover where `target_map * f_a != f_b * source_map`.
    pub fn naturality_failure(&self) -> Option<usize> {
        let p = self.source.poset();
        p.covers().iter().enumerate().find_map(|(ci, &(a, b))| {
            let left = self.target.map(ci).mul(&self.components[a]).ok()?;
            let right = self.components[b].mul(self.source.map(ci)).ok()?;
            (left != right).then_some(ci)
        })
    }

    pub fn is_natural(&self) -> bool {
        self.naturality_failure().is_none()
    }

    pub fn is_endomorphism_of(&self, m: &PersistenceModule) -> bool {
        *self.source == *m && *self.target == *m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &NaturalTransformation) -> Result<Self, ModuleError> {
        if *other.target != *self.source {
            return Err(ModuleError::NotAnEndomorphism);
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_, _>>()?;
        Ok(Self::new_unchecked(
            other.source.clone(),
            self.target.clone(),
            comps,
        ))
    }

    /// Elementwise `k`-th power of an endomorphism.
    pub fn power(&self, k: u64) -> Result<Self, ModuleError> {
        let comps = self
            .components
            .iter()
            .map(|c| c.power(k))
            .collect::<Result<_, _>>()?;
        Ok(Self::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            comps,
        ))
    }

    pub fn add(&self, other: &NaturalTransformation) -> Result<Self, ModuleError> {
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(Self::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            comps,
        ))
    }

    pub fn sub(&self, other: &NaturalTransformation) -> Result<Self, ModuleError> {
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_, _>>()?;
        Ok(Self::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            comps,
        ))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::new_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.components.iter().map(|c| c.scale(s)).collect(),
        )
    }

    /// `sum_i coeffs[i] * basis[i]`; `basis` must be nonempty.
    pub fn linear_combination(basis: &[NaturalTransformation], coeffs: &[Scalar]) -> Self {
        let first = &basis[0];
        let comps = (0..first.components.len())
            .map(|e| {
                let mut acc = Matrix::zeros(
                    first.source.field(),
                    first.components[e].rows(),
                    first.components[e].cols(),
                );
                for (t, c) in basis.iter().zip(coeffs) {
                    if !c.is_zero() {
                        acc = acc.add(&t.components[e].scale(c)).expect("same shapes");
                    }
                }
                acc
            })
            .collect();
        Self::new_unchecked(first.source.clone(), first.target.clone(), comps)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Matrix::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().all(Matrix::is_identity)
    }

    /// Invertible at every element.
    pub fn is_isomorphism(&self) -> bool {
        self.components.iter().all(Matrix::is_invertible)
    }

    pub fn inverse(&self) -> Option<Self> {
        let comps = self
            .components
            .iter()
            .map(Matrix::inverse)
            .collect::<Option<Vec<_>>>()?;
        Some(Self::new_unchecked(
            self.target.clone(),
            self.source.clone(),
            comps,
        ))
    }

    pub fn is_idempotent(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.is_square() && c.mul(c).map(|sq| &sq == c).unwrap_or(false))
    }

    /// `f^N == 0` with `N` the total dimension.
    pub fn is_nilpotent(&self) -> bool {
        let n = self.source.total_dim().max(1) as u64;
        self.components
            .iter()
            .all(|c| c.power(n).map(|p| p.is_zero()).unwrap_or(false))
    }

    /// Re-targets the transformation at equal copies of its modules.
    pub fn with_modules(
        &self,
        source: Arc<PersistenceModule>,
        target: Arc<PersistenceModule>,
    ) -> Self {
        debug_assert!(*source == *self.source && *target == *self.target);
        Self::new_unchecked(source, target, self.components.clone())
    }
}

/// Basis of all natural transformations `m -> n`, from one linear system whose
/// unknowns are every component entry.
pub fn hom_space(
    m: &Arc<PersistenceModule>,
    n: &Arc<PersistenceModule>,
) -> Result<Vec<NaturalTransformation>, ModuleError> {
    m.same_base(n)?;
    let field = m.field();
    let p = m.poset();
    let mut offsets = Vec::with_capacity(p.len() + 1);
    let mut total = 0;
    for e in 0..p.len() {
        offsets.push(total);
        total += n.dim(e) * m.dim(e);
    }
    let unknown = |e: Elem, r: usize, c: usize| offsets[e] + r * m.dim(e) + c;
    let mut rows: Vec<Vec<(usize, Scalar)>> = Vec::new();
    for (ci, &(a, b)) in p.covers().iter().enumerate() {
        let mm = m.map(ci);
        let nm = n.map(ci);
        // N(α) F_a - F_b M(α) = 0, entry (i, j)
        for i in 0..n.dim(b) {
            for j in 0..m.dim(a) {
                let mut row = Vec::new();
                for k in 0..n.dim(a) {
                    let v = nm.get(i, k);
                    if !v.is_zero() {
                        row.push((unknown(a, k, j), v.clone()));
                    }
                }
                for l in 0..m.dim(b) {
                    let v = mm.get(l, j);
                    if !v.is_zero() {
                        row.push((unknown(b, i, l), -v));
                    }
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let mut system = Matrix::zeros(field, rows.len(), total);
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row {
            let cur = system.get(r, c).clone();
            system.set(r, c, &cur + &v);
        }
    }
    let basis = system.nullspace();
    Ok(basis
        .into_iter()
        .map(|v| {
            let comps = (0..p.len())
                .map(|e| {
                    Matrix::from_fn(field, n.dim(e), m.dim(e), |r, c| v[unknown(e, r, c)].clone())
                })
                .collect();
            NaturalTransformation::new_unchecked(m.clone(), n.clone(), comps)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::poset::Poset;

    const Q: Field = Field::Rationals;

    #[test]
    fn interval_on_two_chain_has_one_dimensional_endomorphisms() {
        // Oracle: on a 2-chain with identity map, naturality forces f_a = f_b,
        // so End is spanned by the identity.
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let i = Arc::new(PersistenceModule::indicator(p, Q, &[true, true]));
        let end = hom_space(&i, &i).unwrap();
        assert_eq!(end.len(), 1);
        assert!(end[0].is_identity());
    }

    #[test]
    fn hom_into_zero_is_trivial() {
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let i = Arc::new(PersistenceModule::indicator(p.clone(), Q, &[true, true]));
        let z = Arc::new(PersistenceModule::zero(p, Q));
        assert!(hom_space(&i, &z).unwrap().is_empty());
    }

    #[test]
    fn hom_counts_match_brute_force_on_a2() {
        // K^2 -[1 1]-> K. Brute force over GF(2): enumerate all (F_a, F_b) and
        // count natural ones; the count must equal 2^(hom dimension).
        let f2 = Field::prime(2).unwrap();
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let m = Arc::new(
            PersistenceModule::new(p, f2, vec![2, 1], vec![Matrix::from_i64(f2, &[&[1, 1]])])
                .unwrap(),
        );
        let basis = hom_space(&m, &m).unwrap();
        let mut natural = 0;
        for bits in 0u32..32 {
            let b = |i: u32| f2.from_i64(((bits >> i) & 1) as i64);
            let fa = Matrix::from_fn(f2, 2, 2, |r, c| b((r * 2 + c) as u32));
            let fb = Matrix::from_fn(f2, 1, 1, |_, _| b(4));
            let t = NaturalTransformation::new_unchecked(m.clone(), m.clone(), vec![fa, fb]);
            if t.is_natural() {
                natural += 1;
            }
        }
        assert_eq!(natural, 1 << basis.len());
        assert!(basis.iter().all(NaturalTransformation::is_natural));
    }
}
