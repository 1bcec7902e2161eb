//! Component and semi-component modules: modules whose stored basis makes
//! every structure matrix 0/1 with exactly (component) or at most
//! (semi-component) one 1 per column.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{Field, Matrix};
use crate::pmodule::{
    direct_sum, split_with_bases, ModuleError, NaturalTransformation, PersistenceModule, Summand,
};
use crate::poset::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComponentError {
    #[error("entry ({row}, {col}) of the map {lower}->{upper} is not 0 or 1")]
    NotZeroOne {
        lower: String,
        upper: String,
        row: usize,
        col: usize,
    },
    #[error("column {col} of the map {lower}->{upper} has more than one 1")]
    TooManyOnesInColumn {
        lower: String,
        upper: String,
        col: usize,
    },
    #[error("module is not a component module in its stored basis")]
    NotComponent,
    #[error("module is not a semi-component module in its stored basis")]
    NotSemiComponent,
    #[error("no generator lies below every other generator")]
    NoMinimalGenerator,
    #[error("at least two generators are required, found {0}")]
    FewerThanTwoGenerators(usize),
    #[error("constructed endomorphism is not a natural idempotent; input violates the component invariants")]
    InternalNaturalityFailure,
    #[error("basepoint {0} is not below every element with a nonzero space")]
    BadBasepoint(String),
    #[error("not a component extension: {0}")]
    NotAnExtensionShape(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ComponentKind {
    Component,
    SemiComponent,
}

/// A module together with the generator data of its stored 0/1 basis.
#[derive(Debug, Clone)]
pub struct ComponentStructure {
    module: Arc<PersistenceModule>,
    kind: ComponentKind,
    generators: Vec<(Elem, usize)>,
    flow: Vec<Vec<BTreeSet<usize>>>,
}

/// Position of the single 1 in each column, or `None` for a zero column.
fn column_targets(m: &Matrix) -> Vec<Option<usize>> {
    (0..m.cols())
        .map(|c| (0..m.rows()).find(|&r| m.get(r, c).is_one()))
        .collect()
}

pub fn classify(m: &Arc<PersistenceModule>) -> Result<ComponentStructure, ComponentError> {
    m.validate()?;
    let p = m.poset();
    let mut kind = ComponentKind::Component;
    for (ci, &(a, b)) in p.covers().iter().enumerate() {
        let mat = m.map(ci);
        for c in 0..mat.cols() {
            let mut ones = 0;
            for r in 0..mat.rows() {
                let x = mat.get(r, c);
                if x.is_one() {
                    ones += 1;
                } else if !x.is_zero() {
                    return Err(ComponentError::NotZeroOne {
                        lower: p.id(a).to_string(),
                        upper: p.id(b).to_string(),
                        row: r,
                        col: c,
                    });
                }
            }
            match ones {
                0 => kind = ComponentKind::SemiComponent,
                1 => {}
                _ => {
                    return Err(ComponentError::TooManyOnesInColumn {
                        lower: p.id(a).to_string(),
                        upper: p.id(b).to_string(),
                        col: c,
                    })
                }
            }
        }
    }

    let targets: Vec<Vec<Option<usize>>> = m.maps().iter().map(column_targets).collect();
    let mut generators = Vec::new();
    for e in 0..p.len() {
        let mut hit = vec![false; m.dim(e)];
        for &(_, ci) in p.lower_covers(e) {
            for r in targets[ci].iter().flatten() {
                hit[*r] = true;
            }
        }
        generators.extend(hit.iter().enumerate().filter(|(_, h)| !**h).map(|(k, _)| (e, k)));
    }
    generators.sort_by(|x, y| (p.id(x.0), x.1).cmp(&(p.id(y.0), y.1)));

    let mut flow: Vec<Vec<BTreeSet<usize>>> = (0..p.len()).map(|e| vec![BTreeSet::new(); m.dim(e)]).collect();
    for (g, &(e, k)) in generators.iter().enumerate() {
        flow[e][k].insert(g);
    }
    for &e in p.topological_order() {
        for &(a, ci) in p.lower_covers(e) {
            for (j, t) in targets[ci].iter().enumerate() {
                if let Some(r) = *t {
                    let incoming = flow[a][j].clone();
                    flow[e][r].extend(incoming);
                }
            }
        }
    }
    Ok(ComponentStructure {
        module: m.clone(),
        kind,
        generators,
        flow,
    })
}

impl ComponentStructure {
    pub fn module(&self) -> &Arc<PersistenceModule> {
        &self.module
    }

    pub fn kind(&self) -> ComponentKind {
        self.kind
    }

    /// Generator positions `(element, basis index)`, sorted by element id then index.
    pub fn generators(&self) -> &[(Elem, usize)] {
        &self.generators
    }

    /// Indices into [`Self::generators`] whose images equal basis vector `k` at `e`.
    pub fn generator_flow(&self, e: Elem, k: usize) -> &BTreeSet<usize> {
        &self.flow[e][k]
    }

    /// Index of the minimal generator in [`Self::generators`].
    pub fn minimal_generator_index(&self) -> Option<usize> {
        let p = self.module.poset();
        // generators are already sorted by (element id, index)
        self.generators
            .iter()
            .position(|&(e, _)| self.generators.iter().all(|&(q, _)| p.leq(e, q)))
    }

    pub fn minimal_generator(&self) -> Option<(Elem, usize)> {
        self.minimal_generator_index().map(|i| self.generators[i])
    }
}

pub fn minimal_generator(cs: &ComponentStructure) -> Option<(Elem, usize)> {
    cs.minimal_generator()
}

/// Dims at most 1, maps `[1]` between support elements, and a nonempty,
/// convex, connected support.
pub fn is_interval(m: &PersistenceModule) -> bool {
    let p = m.poset();
    if m.dims().iter().any(|&d| d > 1) {
        return false;
    }
    let support: Vec<Elem> = (0..p.len()).filter(|&e| m.dim(e) == 1).collect();
    if support.is_empty() {
        return false;
    }
    for (ci, &(a, b)) in p.covers().iter().enumerate() {
        if m.dim(a) == 1 && m.dim(b) == 1 && !m.map(ci).get(0, 0).is_one() {
            return false;
        }
    }
    for &a in &support {
        for &c in &support {
            if p.lt(a, c) && (0..p.len()).any(|b| m.dim(b) == 0 && p.leq(a, b) && p.leq(b, c)) {
                return false;
            }
        }
    }
    let mut seen = vec![false; p.len()];
    let mut stack = vec![support[0]];
    seen[support[0]] = true;
    while let Some(e) = stack.pop() {
        let nbrs = p.lower_covers(e).iter().chain(p.upper_covers(e)).map(|&(x, _)| x);
        for x in nbrs {
            if m.dim(x) == 1 && !seen[x] {
                seen[x] = true;
                stack.push(x);
            }
        }
    }
    support.iter().all(|&e| seen[e])
}

/// Interval and semi-component summands of a component module with a
/// minimal generator.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub interval: Summand,
    /// Basis at each element: `f(v_k)` for the basis vectors `v_k` whose
    /// flow avoids the minimal generator, in order of `k`.
    pub semi: Summand,
    pub idempotent: NaturalTransformation,
    pub minimal_generator: (Elem, usize),
}

impl SplitResult {
    /// Isomorphism `interval ⊕ semi -> input` assembled from the inclusions.
    pub fn sum_witness(&self) -> Result<NaturalTransformation, ComponentError> {
        let sum = direct_sum(&self.interval.module, &self.semi.module)?;
        let target = self.interval.inclusion.target().clone();
        let field = target.field();
        let comps = (0..target.poset().len())
            .map(|e| {
                Matrix::hstack(
                    field,
                    target.dim(e),
                    &[self.interval.inclusion.component(e), self.semi.inclusion.component(e)],
                )
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(ModuleError::from)?;
        Ok(NaturalTransformation::new(sum.module, target, comps)?)
    }
}

pub fn component_split(cs: &ComponentStructure) -> Result<SplitResult, ComponentError> {
    if cs.kind != ComponentKind::Component {
        return Err(ComponentError::NotComponent);
    }
    if cs.generators.len() < 2 {
        return Err(ComponentError::FewerThanTwoGenerators(cs.generators.len()));
    }
    let g1 = cs.minimal_generator_index().ok_or(ComponentError::NoMinimalGenerator)?;
    let (p1, i1) = cs.generators[g1];
    let m = &cs.module;
    let p = m.poset();
    let field = m.field();

    let mut comps = Vec::with_capacity(p.len());
    let mut kernel = Vec::with_capacity(p.len());
    let mut image = Vec::with_capacity(p.len());
    for e in 0..p.len() {
        let d = m.dim(e);
        let g1_image: Option<usize> = if p.leq(p1, e) {
            let comp = m.composite_map(p1, e)?;
            Some((0..d).find(|&r| comp.get(r, i1).is_one()).ok_or(ComponentError::NotComponent)?)
        } else {
            None
        };
        let mut f = Matrix::zeros(field, d, d);
        let mut kept = Vec::new();
        for k in 0..d {
            if cs.flow[e][k].contains(&g1) {
                continue;
            }
            f.set(k, k, field.one());
            if let Some(u) = g1_image {
                f.set(u, k, -&field.one());
            }
            kept.push(k);
        }
        let ker_cols: Vec<usize> = g1_image.into_iter().collect();
        kernel.push(Matrix::identity(field, d).select_cols(&ker_cols));
        image.push(f.select_cols(&kept));
        comps.push(f);
    }
    let idempotent = NaturalTransformation::new(m.clone(), m.clone(), comps)
        .map_err(|_| ComponentError::InternalNaturalityFailure)?;
    if !idempotent.is_idempotent() {
        return Err(ComponentError::InternalNaturalityFailure);
    }
    let (interval, semi) = split_with_bases(m, kernel, image)?;
    Ok(SplitResult {
        interval,
        semi,
        idempotent,
        minimal_generator: (p1, i1),
    })
}

/// Adds an interval coordinate in front of every space at or above
/// `basepoint` (everywhere when `None`). Each affected cover matrix gains the
/// first column `(1, 0, ..., 0)` and a first row with a 1 exactly over the
/// old zero columns.
pub fn semi_extension(
    s: &ComponentStructure,
    basepoint: Option<Elem>,
) -> Result<PersistenceModule, ComponentError> {
    let m = &s.module;
    let p = m.poset();
    let field = m.field();
    if let Some(b) = basepoint {
        if (0..p.len()).any(|q| m.dim(q) > 0 && !p.leq(b, q)) {
            return Err(ComponentError::BadBasepoint(p.id(b).to_string()));
        }
    }
    let affected = |e: Elem| basepoint.is_none_or(|b| p.leq(b, e));
    let dims: Vec<usize> = (0..p.len())
        .map(|e| m.dim(e) + usize::from(affected(e)))
        .collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(ci, &(a, b))| {
            let old = m.map(ci);
            if !affected(a) {
                return Matrix::zeros(field, dims[b], dims[a]);
            }
            let targets = column_targets(old);
            Matrix::from_fn(field, dims[b], dims[a], |r, c| match (r, c) {
                (0, 0) => field.one(),
                (_, 0) => field.zero(),
                (0, c) if targets[c - 1].is_none() => field.one(),
                (0, _) => field.zero(),
                (r, c) => old.get(r - 1, c - 1).clone(),
            })
        })
        .collect();
    Ok(PersistenceModule::new(m.poset_arc().clone(), field, dims, maps)?)
}

/// Classifies `m` and extends it; any classification failure is reported as
/// [`ComponentError::NotSemiComponent`].
pub fn extend_module(
    m: &Arc<PersistenceModule>,
    basepoint: Option<Elem>,
) -> Result<PersistenceModule, ComponentError> {
    let cs = classify(m).map_err(|e| match e {
        ComponentError::Module(err) => ComponentError::Module(err),
        _ => ComponentError::NotSemiComponent,
    })?;
    semi_extension(&cs, basepoint)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Subtract column 0 from every other column.
    Columns,
    /// Add every other row to row 0.
    Rows,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStep {
    pub lower: Elem,
    pub upper: Elem,
    pub kind: StepKind,
}

#[derive(Debug, Clone)]
pub struct ExtensionSplit {
    pub semi: Arc<PersistenceModule>,
    pub interval: Arc<PersistenceModule>,
    /// Per element, the new basis in old coordinates: `u_0 = v_0`, `u_j = v_j - v_0`.
    pub basis_change: Vec<Matrix>,
    pub steps: Vec<EliminationStep>,
    /// Isomorphism `semi ⊕ interval -> input`.
    pub witness: NaturalTransformation,
}

/// Splits a component extension into its semi-component part and the
/// interval carried by the first coordinate. Each cover matrix is first
/// column-reduced at its source and then row-reduced at its target; covers are
/// processed by pre-grade of the source, then source id, then target id.
pub fn extension_split(c: &ComponentStructure) -> Result<ExtensionSplit, ComponentError> {
    if c.kind != ComponentKind::Component {
        return Err(ComponentError::NotAnExtensionShape("not a component module".into()));
    }
    let m = &c.module;
    let p = m.poset();
    let field = m.field();
    let grading = p.pre_grading();
    let mut order: Vec<usize> = (0..p.covers().len()).collect();
    order.sort_by(|&x, &y| {
        let (a, b) = p.covers()[x];
        let (c2, d) = p.covers()[y];
        (grading.grade(a), p.id(a), p.id(b)).cmp(&(grading.grade(c2), p.id(c2), p.id(d)))
    });

    let mut maps: Vec<Matrix> = m.maps().to_vec();
    let mut steps = Vec::new();
    let minus_one = -&field.one();
    for ci in order {
        let (a, b) = p.covers()[ci];
        let mat = &mut maps[ci];
        if m.dim(a) == 0 {
            continue;
        }
        if !mat.get(0, 0).is_one() {
            return Err(ComponentError::NotAnExtensionShape(format!(
                "first coordinate at {} does not map to the first coordinate at {}",
                p.id(a),
                p.id(b)
            )));
        }
        for j in 1..m.dim(a) {
            mat.add_col_multiple(j, 0, &minus_one);
        }
        steps.push(EliminationStep {
            lower: a,
            upper: b,
            kind: StepKind::Columns,
        });
        for i in 1..m.dim(b) {
            mat.add_row_multiple(0, i, &field.one());
        }
        steps.push(EliminationStep {
            lower: a,
            upper: b,
            kind: StepKind::Rows,
        });
        let clean = (1..mat.cols()).all(|j| mat.get(0, j).is_zero())
            && (1..mat.rows()).all(|i| mat.get(i, 0).is_zero());
        if !clean {
            return Err(ComponentError::NotAnExtensionShape(format!(
                "map {}->{} is not block diagonal after elimination",
                p.id(a),
                p.id(b)
            )));
        }
    }

    let rest = |d: usize| -> Vec<usize> { (1..d).collect() };
    let semi_dims: Vec<usize> = m.dims().iter().map(|&d| d.saturating_sub(1)).collect();
    let int_dims: Vec<usize> = m.dims().iter().map(|&d| d.min(1)).collect();
    let semi_maps = p
        .covers()
        .iter()
        .zip(&maps)
        .map(|(&(a, b), mat)| {
            if m.dim(a) == 0 {
                Matrix::zeros(field, semi_dims[b], 0)
            } else {
                mat.select_rows(&rest(m.dim(b))).select_cols(&rest(m.dim(a)))
            }
        })
        .collect();
    let int_maps = p
        .covers()
        .iter()
        .zip(&maps)
        .map(|(&(a, b), mat)| {
            if m.dim(a) == 0 {
                Matrix::zeros(field, int_dims[b], 0)
            } else {
                mat.select_rows(&[0]).select_cols(&[0])
            }
        })
        .collect();
    let semi = Arc::new(PersistenceModule::new(m.poset_arc().clone(), field, semi_dims, semi_maps)?);
    let interval = Arc::new(PersistenceModule::new(m.poset_arc().clone(), field, int_dims, int_maps)?);

    let basis_change: Vec<Matrix> = m
        .dims()
        .iter()
        .map(|&d| {
            Matrix::from_fn(field, d, d, |r, c| {
                if r == c {
                    field.one()
                } else if r == 0 {
                    minus_one.clone()
                } else {
                    field.zero()
                }
            })
        })
        .collect();
    let sum = direct_sum(&semi, &interval)?;
    let comps: Vec<Matrix> = basis_change
        .iter()
        .map(|t| {
            let d = t.cols();
            let mut cols: Vec<usize> = (1..d).collect();
            cols.extend((0..d.min(1)).map(|_| 0));
            t.select_cols(&cols)
        })
        .collect();
    let witness = NaturalTransformation::new(sum.module, m.clone(), comps)?;
    Ok(ExtensionSplit {
        semi,
        interval,
        basis_change,
        steps,
        witness,
    })
}

#[derive(Debug, Clone)]
pub struct RoundTripReport {
    pub split: SplitResult,
    pub basepoint: Elem,
    pub extension: Arc<PersistenceModule>,
    /// Isomorphism `interval ⊕ semi -> input`.
    pub sum_witness: NaturalTransformation,
    /// Isomorphism `semi_extension(semi) -> input`: a basis permutation.
    pub extension_witness: NaturalTransformation,
}

/// Splits `c`, re-extends the semi-component summand from the minimal
/// generator's element, and certifies both isomorphisms back to `c`.
pub fn round_trip_extend_split(c: &ComponentStructure) -> Result<RoundTripReport, ComponentError> {
    let split = component_split(c)?;
    let (p1, _) = split.minimal_generator;
    let semi_cs = classify(&split.semi.module)?;
    let extension = Arc::new(semi_extension(&semi_cs, Some(p1))?);
    let m = &c.module;
    let p = m.poset();
    let field = m.field();
    let g1 = c.minimal_generator_index().expect("split succeeded");
    let comps = (0..p.len())
        .map(|e| {
            let d = m.dim(e);
            let u = (0..d).find(|&k| c.flow[e][k].contains(&g1));
            let mut order: Vec<usize> = u.into_iter().collect();
            order.extend((0..d).filter(|&k| Some(k) != u));
            Matrix::identity(field, d).select_cols(&order)
        })
        .collect();
    let extension_witness = NaturalTransformation::new(extension.clone(), m.clone(), comps)?;
    if !extension_witness.is_isomorphism() {
        return Err(ComponentError::InternalNaturalityFailure);
    }
    let sum_witness = split.sum_witness()?;
    Ok(RoundTripReport {
        split,
        basepoint: p1,
        extension,
        sum_witness,
        extension_witness,
    })
}

/// The interval module supported on the up-set of `e`.
pub fn principal_interval(poset: &Arc<crate::poset::Poset>, field: Field, e: Elem) -> PersistenceModule {
    let support: Vec<bool> = (0..poset.len()).map(|q| poset.leq(e, q)).collect();
    PersistenceModule::indicator(poset.clone(), field, &support)
}
