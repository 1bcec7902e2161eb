//! Persistence modules over finite posets, stored on the Hasse diagram.
//!
//! A module keeps one matrix per cover relation, using the column-vector
//! convention: the map of a cover `a -> b` has shape `dims(b) x dims(a)`.
//! Composites between comparable pairs are computed lazily per source
//! element and cached.

mod iso;
mod split;
mod transform;

pub use iso::{is_isomorphic, IsoOptions, IsoOutcome, NonIsoReason, EXHAUSTIVE_LIMIT};
pub use split::{fitting_split, split_with_bases, FittingSplit, Submodule, Summand};
pub use transform::{hom_space, NaturalTransformation};

use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::linalg::{Field, LinalgError, Matrix};
use crate::par::{self, Exec};
use crate::poset::{AdjoinedBounds, Elem, Poset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("map on cover {lower}->{upper} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        lower: String,
        upper: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("expected {expected} entries, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("modules or matrices live over different fields")]
    FieldMismatch,
    #[error("modules are indexed by different posets")]
    PosetMismatch,
    #[error("non-commuting square between {lower} and {upper}: {path_a:?} vs {path_b:?}")]
    NonCommutingSquare {
        lower: String,
        upper: String,
        path_a: Vec<String>,
        path_b: Vec<String>,
    },
    #[error("{0} is not below {1}")]
    NotComparable(String, String),
    #[error("naturality fails on cover {0}->{1}")]
    NotNatural(String, String),
    #[error("transformation is not an endomorphism of the module")]
    NotAnEndomorphism,
    #[error("subspaces at {0} are not closed under the structure maps")]
    NotASubmodule(String),
    #[error("subspaces at {0} do not form a direct sum decomposition")]
    NotComplementary(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub struct PersistenceModule {
    poset: Arc<Poset>,
    field: Field,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
    composites: Vec<OnceLock<Vec<Option<Matrix>>>>,
}

impl Clone for PersistenceModule {
    fn clone(&self) -> Self {
        PersistenceModule {
            poset: self.poset.clone(),
            field: self.field,
            dims: self.dims.clone(),
            maps: self.maps.clone(),
            composites: self.composites.clone(),
        }
    }
}

impl PartialEq for PersistenceModule {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.dims == other.dims
            && self.maps == other.maps
            && (Arc::ptr_eq(&self.poset, &other.poset) || self.poset == other.poset)
    }
}

impl Eq for PersistenceModule {}

impl std::fmt::Debug for PersistenceModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = f.debug_struct("PersistenceModule");
        s.field("field", &self.field);
        let dims: Vec<(String, usize)> = self
            .dims
            .iter()
            .enumerate()
            .map(|(e, &d)| (self.poset.id(e).to_string(), d))
            .collect();
        s.field("dims", &dims);
        let maps: Vec<(String, &Matrix)> = self
            .poset
            .covers()
            .iter()
            .zip(&self.maps)
            .map(|(&(a, b), m)| (format!("{}->{}", self.poset.id(a), self.poset.id(b)), m))
            .collect();
        s.field("maps", &maps);
        s.finish()
    }
}

impl PersistenceModule {
    /// Checks matrix shapes and fields; functoriality is checked by [`Self::validate`].
    pub fn new(
        poset: Arc<Poset>,
        field: Field,
        dims: Vec<usize>,
        maps: Vec<Matrix>,
    ) -> Result<Self, ModuleError> {
        if dims.len() != poset.len() {
            return Err(ModuleError::CountMismatch {
                expected: poset.len(),
                found: dims.len(),
            });
        }
        if maps.len() != poset.covers().len() {
            return Err(ModuleError::CountMismatch {
                expected: poset.covers().len(),
                found: maps.len(),
            });
        }
        for (&(a, b), m) in poset.covers().iter().zip(&maps) {
            if m.field() != field {
                return Err(ModuleError::FieldMismatch);
            }
            if m.shape() != (dims[b], dims[a]) {
                return Err(ModuleError::ShapeMismatch {
                    lower: poset.id(a).to_string(),
                    upper: poset.id(b).to_string(),
                    expected: (dims[b], dims[a]),
                    found: m.shape(),
                });
            }
        }
        let composites = (0..poset.len()).map(|_| OnceLock::new()).collect();
        Ok(PersistenceModule {
            poset,
            field,
            dims,
            maps,
            composites,
        })
    }

    pub fn zero(poset: Arc<Poset>, field: Field) -> Self {
        let dims = vec![0; poset.len()];
        let maps = poset
            .covers()
            .iter()
            .map(|_| Matrix::zeros(field, 0, 0))
            .collect();
        Self::new(poset, field, dims, maps).expect("zero module is well formed")
    }

    /// Module with `dims[e] = 1` on `support` and identity maps inside it.
    pub fn indicator(poset: Arc<Poset>, field: Field, support: &[bool]) -> Self {
        let dims: Vec<usize> = support.iter().map(|&s| usize::from(s)).collect();
        let maps = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                if support[a] && support[b] {
                    Matrix::identity(field, 1)
                } else {
                    Matrix::zeros(field, dims[b], dims[a])
                }
            })
            .collect();
        Self::new(poset, field, dims, maps).expect("indicator module is well formed")
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn poset_arc(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The dimension vector.
    pub fn dimension_vector(&self) -> Vec<usize> {
        self.dims.clone()
    }

    pub fn dim(&self, e: Elem) -> usize {
        self.dims[e]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// Map of the cover with index `cover`.
    pub fn map(&self, cover: usize) -> &Matrix {
        &self.maps[cover]
    }

    /// Map of the cover `a -> b`, if it is one.
    pub fn cover_map(&self, a: Elem, b: Elem) -> Option<&Matrix> {
        self.poset.cover_index(a, b).map(|c| &self.maps[c])
    }

    pub(crate) fn same_base(&self, other: &PersistenceModule) -> Result<(), ModuleError> {
        if self.field != other.field {
            return Err(ModuleError::FieldMismatch);
        }
        if !Arc::ptr_eq(&self.poset, &other.poset) && self.poset != other.poset {
            return Err(ModuleError::PosetMismatch);
        }
        Ok(())
    }

    fn composites_from(&self, a: Elem) -> &[Option<Matrix>] {
        self.composites[a].get_or_init(|| {
            let p = &*self.poset;
            let mut out: Vec<Option<Matrix>> = vec![None; p.len()];
            out[a] = Some(Matrix::identity(self.field, self.dims[a]));
            for &b in p.topological_order() {
                if b == a || !p.leq(a, b) {
                    continue;
                }
                let &(c, ci) = p
                    .lower_covers(b)
                    .iter()
                    .find(|&&(c, _)| p.leq(a, c))
                    .expect("b > a has a lower cover above a");
                let below = out[c].as_ref().expect("topological order");
                out[b] = Some(self.maps[ci].mul(below).expect("shapes checked"));
            }
            out
        })
    }

    /// The structure map `M(a <= b)`; the identity when `a == b`.
    pub fn composite_map(&self, a: Elem, b: Elem) -> Result<Matrix, ModuleError> {
        self.composites_from(a)[b].clone().ok_or_else(|| {
            ModuleError::NotComparable(self.poset.id(a).to_string(), self.poset.id(b).to_string())
        })
    }

    pub(crate) fn composite_ref(&self, a: Elem, b: Elem) -> Option<&Matrix> {
        self.composites_from(a)[b].as_ref()
    }

    /// Path used for the cached composite from `a` to `b`.
    fn canonical_path(&self, a: Elem, b: Elem) -> Vec<Elem> {
        let p = &*self.poset;
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            let &(c, _) = p
                .lower_covers(cur)
                .iter()
                .find(|&&(c, _)| p.leq(a, c))
                .expect("comparable");
            path.push(c);
            cur = c;
        }
        path.reverse();
        path
    }

    /// Functoriality: for every `a <= b`, every factorisation through a lower
    /// cover of `b` agrees with the cached composite.
    pub fn validate(&self) -> Result<(), ModuleError> {
        self.validate_with(Exec::default())
    }

    pub fn validate_with(&self, exec: Exec) -> Result<(), ModuleError> {
        let p = &*self.poset;
        let elems: Vec<Elem> = (0..p.len()).collect();
        let failure = par::find_first(&elems, exec, |&a| {
            let comps = self.composites_from(a);
            for &b in p.topological_order() {
                if !p.lt(a, b) {
                    continue;
                }
                let canonical = comps[b].as_ref().expect("a < b");
                for &(c, ci) in p.lower_covers(b) {
                    if !p.leq(a, c) {
                        continue;
                    }
                    let via = self.maps[ci]
                        .mul(comps[c].as_ref().expect("a <= c"))
                        .expect("shapes checked");
                    if &via != canonical {
                        return Some((a, b, c));
                    }
                }
            }
            None
        });
        match failure {
            None => Ok(()),
            Some((_, (a, b, c))) => {
                let ids = |v: Vec<Elem>| v.into_iter().map(|e| p.id(e).to_string()).collect();
                let mut other = self.canonical_path(a, c);
                other.push(b);
                Err(ModuleError::NonCommutingSquare {
                    lower: p.id(a).to_string(),
                    upper: p.id(b).to_string(),
                    path_a: ids(self.canonical_path(a, b)),
                    path_b: ids(other),
                })
            }
        }
    }

    /// Re-expresses the module in new bases; column `j` of `bases[e]` is the
    /// `j`-th new basis vector at `e` in old coordinates.
    pub fn change_basis(&self, bases: &[Matrix]) -> Result<PersistenceModule, ModuleError> {
        let inverses: Vec<Matrix> = bases
            .iter()
            .enumerate()
            .map(|(e, b)| {
                b.inverse()
                    .filter(|_| b.rows() == self.dims[e])
                    .ok_or_else(|| ModuleError::NotComplementary(self.poset.id(e).to_string()))
            })
            .collect::<Result<_, _>>()?;
        let maps = self
            .poset
            .covers()
            .iter()
            .zip(&self.maps)
            .map(|(&(a, b), m)| inverses[b].mul(&m.mul(&bases[a])?))
            .collect::<Result<Vec<_>, _>>()?;
        PersistenceModule::new(self.poset.clone(), self.field, self.dims.clone(), maps)
    }

    /// The same module over a poset with added bounds; new elements carry zero spaces.
    pub fn with_adjoined_bounds(&self) -> (PersistenceModule, AdjoinedBounds) {
        let adj = self.poset.adjoin_bounds();
        let poset = Arc::new(adj.poset.clone());
        let mut dims = vec![0; poset.len()];
        for (old, &new) in adj.original.iter().enumerate() {
            dims[new] = self.dims[old];
        }
        let maps = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                let old_a = adj.original.iter().position(|&x| x == a);
                let old_b = adj.original.iter().position(|&x| x == b);
                match (old_a, old_b) {
                    (Some(oa), Some(ob)) => self
                        .cover_map(oa, ob)
                        .cloned()
                        .expect("old covers survive"),
                    _ => Matrix::zeros(self.field, dims[b], dims[a]),
                }
            })
            .collect();
        let m = PersistenceModule::new(poset, self.field, dims, maps).expect("shapes preserved");
        (m, adj)
    }

    /// Maps along consecutive elements of a chain.
    pub fn chain_restriction(&self, chain: &[Elem]) -> Result<Vec<Matrix>, ModuleError> {
        chain
            .windows(2)
            .map(|w| self.composite_map(w[0], w[1]))
            .collect()
    }
}

/// Direct sum with its canonical injections and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: Arc<PersistenceModule>,
    pub injections: Vec<NaturalTransformation>,
    pub projections: Vec<NaturalTransformation>,
}

/// Blockwise direct sum of modules over the same poset and field.
pub fn direct_sum_all(modules: &[Arc<PersistenceModule>]) -> Result<DirectSum, ModuleError> {
    let first = modules.first().ok_or(ModuleError::CountMismatch {
        expected: 1,
        found: 0,
    })?;
    for m in &modules[1..] {
        first.same_base(m)?;
    }
    let poset = first.poset.clone();
    let field = first.field;
    let n = poset.len();
    let dims: Vec<usize> = (0..n)
        .map(|e| modules.iter().map(|m| m.dims[e]).sum())
        .collect();
    let maps = (0..poset.covers().len())
        .map(|ci| {
            let blocks: Vec<&Matrix> = modules.iter().map(|m| &m.maps[ci]).collect();
            Matrix::block_diagonal(field, &blocks)
        })
        .collect();
    let sum = Arc::new(PersistenceModule::new(poset, field, dims.clone(), maps)?);
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    let mut offsets = vec![0usize; n];
    for m in modules {
        let inj: Vec<Matrix> = (0..n)
            .map(|e| {
                let mut x = Matrix::zeros(field, dims[e], m.dims[e]);
                for j in 0..m.dims[e] {
                    x.set(offsets[e] + j, j, field.one());
                }
                x
            })
            .collect();
        let proj: Vec<Matrix> = inj.iter().map(Matrix::transpose).collect();
        injections.push(NaturalTransformation::new_unchecked(m.clone(), sum.clone(), inj));
        projections.push(NaturalTransformation::new_unchecked(sum.clone(), m.clone(), proj));
        for e in 0..n {
            offsets[e] += m.dims[e];
        }
    }
    Ok(DirectSum {
        module: sum,
        injections,
        projections,
    })
}

pub fn direct_sum(
    m: &Arc<PersistenceModule>,
    n: &Arc<PersistenceModule>,
) -> Result<DirectSum, ModuleError> {
    direct_sum_all(&[m.clone(), n.clone()])
}
