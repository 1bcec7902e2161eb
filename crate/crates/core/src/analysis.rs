//! Endomorphism algebras, Fitting-based decomposition and brute-force
//! enumeration of component modules.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::component::ComponentKind;
use crate::linalg::{Field, LinalgError, Matrix, Scalar};
use crate::par::{self, Exec};
use crate::pmodule::{
    direct_sum_all, fitting_split, hom_space, is_isomorphic, FittingSplit, IsoOptions, ModuleError,
    NaturalTransformation, PersistenceModule,
};
use crate::poset::Poset;

/// Upper bound on `p^dim` for exhaustive searches over GF(p).
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 20;
/// Default candidate budget for [`enumerate_component_modules`].
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("transformation is not idempotent")]
    NotIdempotent,
    #[error("naturality fails on cover {0}->{1}")]
    NotNatural(String, String),
    #[error("{what} basis does not span the {what} of the idempotent")]
    SpanMismatch { what: &'static str },
    #[error("search space of {needed} candidates exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("dimension vector has {found} entries for a poset of {expected} elements")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Module(#[from] ModuleError),
}

impl From<LinalgError> for AnalysisError {
    fn from(e: LinalgError) -> Self {
        AnalysisError::Module(e.into())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub seed: u64,
    /// Random End elements tried by the idempotent search.
    pub random_budget: usize,
    pub exec: Exec,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            seed: 0,
            random_budget: 64,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Indecomposable,
    /// A natural idempotent other than 0 and the identity.
    Decomposes(NaturalTransformation),
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Indecomposable => "Indecomposable",
            Verdict::Decomposes(_) => "Decomposes",
            Verdict::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EndAlgebraReport {
    pub dim: usize,
    pub basis: Vec<NaturalTransformation>,
    pub radical_dim: Option<usize>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// The algebra `End(m)` in coordinates of a fixed basis.
struct Algebra {
    field: Field,
    k: usize,
    /// `left[i]` is left multiplication by `basis[i]`.
    left: Vec<Matrix>,
    identity: Vec<Scalar>,
}

fn flatten(t: &NaturalTransformation) -> Vec<Scalar> {
    t.components()
        .iter()
        .flat_map(|c| c.entries().iter().cloned())
        .collect()
}

impl Algebra {
    fn new(m: &Arc<PersistenceModule>, basis: &[NaturalTransformation]) -> Result<Self, ModuleError> {
        let field = m.field();
        let k = basis.len();
        let flat: Vec<Vec<Scalar>> = basis.iter().map(flatten).collect();
        let n = flat.first().map_or(0, Vec::len);
        let b = Matrix::from_columns(field, n, &flat);
        let mut rhs: Vec<Vec<Scalar>> = Vec::with_capacity(k * k + 1);
        for bi in basis {
            for bj in basis {
                rhs.push(flatten(&bi.compose(bj)?));
            }
        }
        rhs.push(flatten(&NaturalTransformation::identity(m)));
        let coords = b
            .solve(&Matrix::from_columns(field, n, &rhs))?
            .expect("End is closed under composition");
        let left = (0..k)
            .map(|i| Matrix::from_fn(field, k, k, |l, j| coords.get(l, i * k + j).clone()))
            .collect();
        let identity = coords.column(k * k);
        Ok(Algebra {
            field,
            k,
            left,
            identity,
        })
    }

    fn left_mult(&self, c: &[Scalar]) -> Matrix {
        let mut acc = Matrix::zeros(self.field, self.k, self.k);
        for (l, x) in self.left.iter().zip(c) {
            if !x.is_zero() {
                acc = acc.add(&l.scale(x)).expect("square");
            }
        }
        acc
    }

    fn square(&self, c: &[Scalar]) -> Vec<Scalar> {
        self.left_mult(c).apply(c).expect("square")
    }

    fn is_idempotent(&self, c: &[Scalar]) -> bool {
        self.square(c) == c
    }

    fn is_trivial(&self, c: &[Scalar]) -> bool {
        c.iter().all(Scalar::is_zero) || c == self.identity.as_slice()
    }

    fn shifted(&self, c: &[Scalar], lambda: &Scalar) -> Vec<Scalar> {
        c.iter()
            .zip(&self.identity)
            .map(|(x, i)| x - &(lambda * i))
            .collect()
    }

    /// Neither a unit nor nilpotent: its Fitting split is proper.
    fn is_splitting(&self, c: &[Scalar]) -> bool {
        let l = self.left_mult(c);
        !l.is_invertible() && !l.power(self.k as u64).expect("square").is_zero()
    }

    /// Kernel of the trace form `(x, y) -> tr(L_x L_y)`.
    fn trace_radical(&self) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let gram = Matrix::from_fn(f, self.k, self.k, |i, j| {
            let prod = self.left[i].mul(&self.left[j]).expect("square");
            (0..self.k).fold(f.zero(), |acc, d| &acc + prod.get(d, d))
        });
        gram.nullspace()
    }
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

fn exhaustive_size(field: Field, k: usize) -> Option<u64> {
    let p = field.order()? as u128;
    p.checked_pow(k as u32)
        .filter(|&t| t <= EXHAUSTIVE_LIMIT as u128)
        .map(|t| t as u64)
}

/// Characteristic polynomial `det(xI - a)`, coefficients from the constant
/// term up, by Faddeev–LeVerrier (characteristic zero only).
fn char_poly(a: &Matrix) -> Vec<Scalar> {
    let f = a.field();
    let n = a.rows();
    let mut coeffs = vec![f.zero(); n + 1];
    coeffs[n] = f.one();
    let mut m = Matrix::zeros(f, n, n);
    for i in 1..=n {
        let mut next = a.mul(&m).expect("square");
        let id = Matrix::identity(f, n).scale(&coeffs[n + 1 - i]);
        next = next.add(&id).expect("square");
        let am = a.mul(&next).expect("square");
        let tr = (0..n).fold(f.zero(), |acc, d| &acc + am.get(d, d));
        coeffs[n - i] = -&(&tr * &f.from_i64(i as i64).inverse().expect("nonzero"));
        m = next;
    }
    coeffs
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}

/// Rational roots of a polynomial over Q, when its integer form has
/// constant and leading coefficients below `10^12`.
fn rational_roots(coeffs: &[Scalar]) -> Vec<Scalar> {
    let rats: Vec<BigRational> = coeffs
        .iter()
        .map(|c| c.as_rational().expect("rational").clone())
        .collect();
    let lcm = rats
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut ints: Vec<BigInt> = rats
        .iter()
        .map(|r| (r * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut roots = Vec::new();
    if ints.iter().all(Zero::is_zero) {
        return roots;
    }
    if ints[0].is_zero() {
        roots.push(Field::Rationals.zero());
        while ints[0].is_zero() {
            ints.remove(0);
        }
    }
    let limit = BigInt::from(1_000_000_000_000u64);
    let (a0, an) = (ints[0].abs(), ints[ints.len() - 1].abs());
    if a0 > limit || an > limit {
        return roots;
    }
    let eval = |x: &BigRational| {
        ints.iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    };
    for d in divisors(a0.to_u64().expect("bounded")) {
        for e in divisors(an.to_u64().expect("bounded")) {
            for sign in [1i64, -1] {
                let x = BigRational::new(BigInt::from(sign) * BigInt::from(d), BigInt::from(e));
                if eval(&x).is_zero() {
                    let s = Scalar::Rational(x);
                    if !roots.contains(&s) {
                        roots.push(s);
                    }
                }
            }
        }
    }
    roots
}

/// Shifts `lambda` for which `x - lambda` might split: eigenvalues of `L_x`
/// found exactly (rational roots over Q, all residues for small primes).
fn shifts(alg: &Algebra, c: &[Scalar]) -> Vec<Scalar> {
    let l = alg.left_mult(c);
    match alg.field {
        Field::Rationals => {
            let mut out = vec![alg.field.zero()];
            for r in rational_roots(&char_poly(&l)) {
                if !r.is_zero() {
                    out.push(r);
                }
            }
            out
        }
        Field::Prime { p } if p <= 4096 => (0..p as u64)
            .map(|v| alg.field.from_u64(v))
            .filter(|lam| {
                lam.is_zero()
                    || !l
                        .sub(&Matrix::identity(alg.field, alg.k).scale(lam))
                        .expect("square")
                        .is_invertible()
            })
            .collect(),
        Field::Prime { .. } => vec![alg.field.zero()],
    }
}

fn fitting_idempotent(
    m: &Arc<PersistenceModule>,
    x: &NaturalTransformation,
) -> Result<NaturalTransformation, ModuleError> {
    let s = fitting_split(m, x)?;
    s.image.inclusion.compose(&s.image.projection)
}

/// Basis elements then seeded random combinations, each with its eigenvalue
/// shifts, until one is neither a unit nor nilpotent.
fn random_search(
    m: &Arc<PersistenceModule>,
    basis: &[NaturalTransformation],
    alg: &Algebra,
    opts: AnalysisOptions,
) -> Result<Option<NaturalTransformation>, ModuleError> {
    let k = alg.k;
    let f = alg.field;
    let mut candidates: Vec<Vec<Scalar>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_budget {
        candidates.push(
            (0..k)
                .map(|_| match f {
                    Field::Rationals => f.from_i64(rng.gen_range(-8..=8)),
                    Field::Prime { p } => f.from_u64(rng.gen_range(0..p as u64)),
                })
                .collect(),
        );
    }
    let hit = par::find_first(&candidates, opts.exec, |c| {
        shifts(alg, c)
            .into_iter()
            .map(|lam| alg.shifted(c, &lam))
            .find(|y| alg.is_splitting(y))
    });
    match hit {
        None => Ok(None),
        Some((_, coeffs)) => {
            let x = NaturalTransformation::linear_combination(basis, &coeffs);
            Ok(Some(fitting_idempotent(m, &x)?))
        }
    }
}

/// Decides indecomposability from `End(m)`.
///
/// One-dimensional End is local. Over Q the Jacobson radical is the kernel of
/// the trace form, and `dim End - dim rad = 1` certifies a local algebra. Over
/// GF(p) with `p^dim <= 2^20` all elements are searched for idempotents; with
/// none found the algebra is local and its non-units form the radical.
/// Otherwise basis and random elements are tried for a proper Fitting split.
pub fn end_report(
    m: &Arc<PersistenceModule>,
    opts: AnalysisOptions,
) -> Result<EndAlgebraReport, ModuleError> {
    let basis = hom_space(m, m)?;
    let k = basis.len();
    let mut report = EndAlgebraReport {
        dim: k,
        basis,
        radical_dim: None,
        verdict: Verdict::Unknown,
        note: None,
    };
    if k == 0 {
        report.note = Some("zero module".into());
        return Ok(report);
    }
    if k == 1 {
        report.radical_dim = Some(0);
        report.verdict = Verdict::Indecomposable;
        return Ok(report);
    }
    let alg = Algebra::new(m, &report.basis)?;
    let field = m.field();

    if field == Field::Rationals {
        let rad = alg.trace_radical();
        report.radical_dim = Some(rad.len());
        if k - rad.len() == 1 {
            report.verdict = Verdict::Indecomposable;
            return Ok(report);
        }
    } else if let Some(total) = exhaustive_size(field, k) {
        let p = field.order().expect("finite");
        let hit = par::find_first_index(total, opts.exec, |idx| {
            let c = digits(idx, p, k, field);
            (!alg.is_trivial(&c) && alg.is_idempotent(&c)).then_some(c)
        });
        match hit {
            Some((_, c)) => {
                let e = NaturalTransformation::linear_combination(&report.basis, &c);
                report.verdict = Verdict::Decomposes(e);
            }
            None => {
                let chunks: Vec<u64> = (0..total).step_by(4096).collect();
                let non_units: u64 = par::map(&chunks, opts.exec, |&start| {
                    (start..(start + 4096).min(total))
                        .filter(|&i| !alg.left_mult(&digits(i, p, k, field)).is_invertible())
                        .count() as u64
                })
                .iter()
                .sum();
                let mut r = 0;
                let mut acc = 1u64;
                while acc < non_units {
                    acc *= p;
                    r += 1;
                }
                report.radical_dim = Some(r);
                report.verdict = Verdict::Indecomposable;
                if k - r > 1 {
                    report.note = Some(format!(
                        "local algebra with residue field of degree {} over GF({p})",
                        k - r
                    ));
                }
            }
        }
        return Ok(report);
    }

    match random_search(m, &report.basis, &alg, opts)? {
        Some(e) => report.verdict = Verdict::Decomposes(e),
        None => {
            report.note = Some(match report.radical_dim {
                Some(r) => format!(
                    "End modulo its radical has dimension {}; no splitting element found",
                    k - r
                ),
                None => "no splitting element found within the search budget".into(),
            })
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub summands: Vec<Arc<PersistenceModule>>,
    /// Inclusion of each summand into the input.
    pub inclusions: Vec<NaturalTransformation>,
    /// Per summand: `true` if certified indecomposable, `false` if Unknown.
    pub certified: Vec<bool>,
    /// Isomorphism from the direct sum of the summands to the input.
    pub witness: Option<NaturalTransformation>,
    pub complete: bool,
    pub seed: u64,
}

impl DecompositionResult {
    /// Summand dimension vectors, sorted.
    pub fn dimension_multiset(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.summands.iter().map(|s| s.dims().to_vec()).collect();
        v.sort();
        v
    }
}

/// Splits along Fitting idempotents until every summand is certified
/// indecomposable or the search gives up on it.
pub fn decompose(
    m: &Arc<PersistenceModule>,
    opts: AnalysisOptions,
) -> Result<DecompositionResult, ModuleError> {
    let mut summands = Vec::new();
    let mut inclusions = Vec::new();
    let mut certified = Vec::new();
    let mut stack = vec![(m.clone(), NaturalTransformation::identity(m))];
    while let Some((x, inc)) = stack.pop() {
        if x.is_zero() {
            continue;
        }
        let report = end_report(&x, opts)?;
        match report.verdict {
            Verdict::Decomposes(e) => {
                let s = fitting_split(&x, &e)?;
                // pushed in reverse so the kernel is processed first
                stack.push((s.image.module.clone(), inc.compose(&s.image.inclusion)?));
                stack.push((s.kernel.module.clone(), inc.compose(&s.kernel.inclusion)?));
            }
            v => {
                certified.push(matches!(v, Verdict::Indecomposable));
                summands.push(x);
                inclusions.push(inc);
            }
        }
    }
    let witness = if summands.is_empty() {
        None
    } else {
        let sum = direct_sum_all(&summands)?;
        let field = m.field();
        let comps = (0..m.poset().len())
            .map(|e| {
                let blocks: Vec<&Matrix> = inclusions.iter().map(|t| t.component(e)).collect();
                Matrix::hstack(field, m.dim(e), &blocks)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Some(NaturalTransformation::new(sum.module, m.clone(), comps)?)
    };
    Ok(DecompositionResult {
        complete: certified.iter().all(|&c| c),
        summands,
        inclusions,
        certified,
        witness,
        seed: opts.seed,
    })
}

/// Decomposes with `seed` and `seed + 1`; by Krull–Remak–Schmidt both runs
/// must give the same multiset of summand dimension vectors.
pub fn krs_consistent(
    m: &Arc<PersistenceModule>,
    opts: AnalysisOptions,
) -> Result<bool, ModuleError> {
    let a = decompose(m, opts)?;
    let b = decompose(
        m,
        AnalysisOptions {
            seed: opts.seed.wrapping_add(1),
            ..opts
        },
    )?;
    Ok(a.dimension_multiset() == b.dimension_multiset())
}

#[derive(Debug, Clone)]
pub struct IdempotentReport {
    pub split: FittingSplit,
    pub kernel_dims: Vec<usize>,
    pub image_dims: Vec<usize>,
}

/// Checks that `f` is a natural idempotent and, when given, that the columns
/// of `kernel[e]` and `image[e]` span `ker f` and `im f` at every element.
pub fn verify_idempotent_decomposition(
    m: &Arc<PersistenceModule>,
    f: &NaturalTransformation,
    kernel: Option<&[Matrix]>,
    image: Option<&[Matrix]>,
) -> Result<IdempotentReport, AnalysisError> {
    if !f.is_endomorphism_of(m) {
        return Err(ModuleError::NotAnEndomorphism.into());
    }
    if let Some(ci) = f.naturality_failure() {
        let (a, b) = m.poset().covers()[ci];
        return Err(AnalysisError::NotNatural(
            m.poset().id(a).into(),
            m.poset().id(b).into(),
        ));
    }
    if !f.is_idempotent() {
        return Err(AnalysisError::NotIdempotent);
    }
    let n = m.poset().len();
    for (what, given) in [("kernel", kernel), ("image", image)] {
        let Some(bases) = given else { continue };
        if bases.len() != n {
            return Err(AnalysisError::SpanMismatch { what });
        }
        for (e, b) in bases.iter().enumerate() {
            let fe = f.component(e);
            let rank_f = fe.rank();
            let expected = if what == "kernel" { m.dim(e) - rank_f } else { rank_f };
            let fb = fe.mul(b).map_err(|_| AnalysisError::SpanMismatch { what })?;
            let inside = if what == "kernel" { fb.is_zero() } else { &fb == b };
            if !inside || b.rank() != expected {
                return Err(AnalysisError::SpanMismatch { what });
            }
        }
    }
    let split = fitting_split(m, f)?;
    Ok(IdempotentReport {
        kernel_dims: split.kernel.module.dims().to_vec(),
        image_dims: split.image.module.dims().to_vec(),
        split,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    pub budget: u64,
    /// Merge permutation classes that are isomorphic as modules.
    pub refine_iso: bool,
    pub field: Field,
    pub exec: Exec,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            budget: ENUMERATION_BUDGET,
            refine_iso: false,
            field: Field::Rationals,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Candidate assignments examined.
    pub candidates: u64,
    /// Candidates that commute.
    pub functorial: u64,
    /// One module per class, ordered by canonical form.
    pub representatives: Vec<Arc<PersistenceModule>>,
}

impl Enumeration {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

/// A 0/1 map with at most one 1 per column, as the row of each column's 1.
type ColumnMap = Vec<Option<usize>>;

fn compose_maps(outer: &ColumnMap, inner: &ColumnMap) -> ColumnMap {
    inner.iter().map(|t| t.and_then(|r| outer[r])).collect()
}

fn functorial(p: &Poset, maps: &[ColumnMap], dims: &[usize]) -> bool {
    for a in 0..p.len() {
        let mut comp: Vec<Option<ColumnMap>> = vec![None; p.len()];
        comp[a] = Some((0..dims[a]).map(Some).collect());
        for &b in p.topological_order() {
            if b == a || !p.leq(a, b) {
                continue;
            }
            for &(c, ci) in p.lower_covers(b) {
                let Some(below) = comp[c].as_ref() else { continue };
                let via = compose_maps(&maps[ci], below);
                match &comp[b] {
                    None => comp[b] = Some(via),
                    Some(existing) if *existing != via => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Lexicographically least relabelling over all per-element basis permutations.
fn canonical_form(p: &Poset, maps: &[ColumnMap], dims: &[usize], perms: &[Vec<Vec<usize>>]) -> Vec<ColumnMap> {
    let n = p.len();
    let mut choice = vec![0usize; n];
    let mut best: Option<Vec<ColumnMap>> = None;
    loop {
        let sigma: Vec<&Vec<usize>> = (0..n).map(|e| &perms[dims[e]][choice[e]]).collect();
        let relabelled: Vec<ColumnMap> = p
            .covers()
            .iter()
            .zip(maps)
            .map(|(&(a, b), m)| {
                let mut out = vec![None; m.len()];
                for (j, t) in m.iter().enumerate() {
                    out[sigma[a][j]] = t.map(|r| sigma[b][r]);
                }
                out
            })
            .collect();
        if best.as_ref().is_none_or(|b| relabelled < *b) {
            best = Some(relabelled);
        }
        let mut e = 0;
        loop {
            if e == n {
                return best.expect("at least one labelling");
            }
            choice[e] += 1;
            if choice[e] < perms[dims[e]].len() {
                break;
            }
            choice[e] = 0;
            e += 1;
        }
    }
}

fn to_module(
    p: &Arc<Poset>,
    field: Field,
    dims: &[usize],
    maps: &[ColumnMap],
) -> Result<PersistenceModule, ModuleError> {
    let mats = p
        .covers()
        .iter()
        .zip(maps)
        .map(|(&(_, b), m)| {
            let mut x = Matrix::zeros(field, dims[b], m.len());
            for (j, t) in m.iter().enumerate() {
                if let Some(r) = t {
                    x.set(*r, j, field.one());
                }
            }
            x
        })
        .collect();
    PersistenceModule::new(p.clone(), field, dims.to_vec(), mats)
}

/// All component (or semi-component) modules with dimension vector `dims`, up
/// to simultaneous permutation of the basis at every element.
pub fn enumerate_component_modules(
    p: &Arc<Poset>,
    dims: &[usize],
    kind: ComponentKind,
    opts: EnumerationOptions,
) -> Result<Enumeration, AnalysisError> {
    if dims.len() != p.len() {
        return Err(AnalysisError::DimensionMismatch {
            expected: p.len(),
            found: dims.len(),
        });
    }
    let bound: u128 = p
        .covers()
        .iter()
        .map(|&(a, b)| (dims[b] as u128 + 1).saturating_pow(dims[a] as u32))
        .fold(1u128, |acc, x| acc.saturating_mul(x));
    if bound > opts.budget as u128 {
        return Err(AnalysisError::BudgetExceeded {
            needed: bound,
            budget: opts.budget,
        });
    }
    // one digit per column of every cover map
    let offset = usize::from(kind == ComponentKind::SemiComponent);
    let mut radices: Vec<u64> = Vec::new();
    for &(a, b) in p.covers() {
        for _ in 0..dims[a] {
            radices.push((dims[b] + offset) as u64);
        }
    }
    let total: u64 = radices.iter().product();
    let decode = |mut idx: u64| -> Vec<ColumnMap> {
        let mut maps = Vec::with_capacity(p.covers().len());
        let mut d = 0;
        for &(a, _) in p.covers() {
            let mut col = Vec::with_capacity(dims[a]);
            for _ in 0..dims[a] {
                let r = radices[d];
                let v = (idx % r) as usize;
                idx /= r;
                d += 1;
                col.push(match kind {
                    ComponentKind::Component => Some(v),
                    ComponentKind::SemiComponent => v.checked_sub(1),
                });
            }
            maps.push(col);
        }
        maps
    };
    let max_dim = dims.iter().copied().max().unwrap_or(0);
    let perms: Vec<Vec<Vec<usize>>> = (0..=max_dim).map(permutations).collect();
    const CHUNK: u64 = 2048;
    let starts: Vec<u64> = (0..total).step_by(CHUNK as usize).collect();
    let chunks = par::map(&starts, opts.exec, |&start| {
        (start..(start + CHUNK).min(total))
            .filter_map(|idx| {
                let maps = decode(idx);
                functorial(p, &maps, dims).then(|| canonical_form(p, &maps, dims, &perms))
            })
            .collect::<Vec<_>>()
    });
    let mut functorial_count = 0u64;
    let mut classes: BTreeMap<Vec<ColumnMap>, ()> = BTreeMap::new();
    for chunk in chunks {
        functorial_count += chunk.len() as u64;
        for c in chunk {
            classes.insert(c, ());
        }
    }
    let mut representatives: Vec<Arc<PersistenceModule>> = classes
        .keys()
        .map(|maps| to_module(p, opts.field, dims, maps).map(Arc::new))
        .collect::<Result<_, _>>()?;
    if opts.refine_iso {
        // isomorphic modules share the ranks of all structure maps and the
        // dimension of their endomorphism algebra; only compare within a bucket
        let invariants = par::map(&representatives, opts.exec, |m| -> Result<_, ModuleError> {
            let mut ranks = Vec::new();
            for a in 0..p.len() {
                for b in 0..p.len() {
                    if p.leq(a, b) {
                        ranks.push(m.composite_map(a, b)?.rank());
                    }
                }
            }
            Ok((ranks, hom_space(m, m)?.len()))
        });
        type Invariants = (Vec<usize>, usize);
        let mut kept: Vec<(Arc<PersistenceModule>, Invariants)> = Vec::new();
        for (r, inv) in representatives.into_iter().zip(invariants) {
            let inv = inv?;
            let mut duplicate = false;
            for (k, kinv) in &kept {
                if *kinv != inv {
                    continue;
                }
                let iso = is_isomorphic(
                    k,
                    &r,
                    IsoOptions {
                        exec: opts.exec,
                        ..Default::default()
                    },
                )?;
                if iso.is_isomorphic() {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                kept.push((r, inv));
            }
        }
        representatives = kept.into_iter().map(|(m, _)| m).collect();
    }
    Ok(Enumeration {
        candidates: total,
        functorial: functorial_count,
        representatives,
    })
}

/// Seeded random basis changes looking for a semi-component basis of `m`.
/// `None` only means none was found within `attempts` tries.
pub fn search_semi_component_basis(
    m: &Arc<PersistenceModule>,
    attempts: usize,
    seed: u64,
) -> Option<Vec<Matrix>> {
    let field = m.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_invertible = |d: usize| loop {
        let x = Matrix::from_fn(field, d, d, |_, _| match field {
            Field::Rationals => field.from_i64(rng.gen_range(-2..=2)),
            Field::Prime { p } => field.from_u64(rng.gen_range(0..p as u64)),
        });
        if x.is_invertible() {
            return x;
        }
    };
    for _ in 0..attempts {
        let bases: Vec<Matrix> = m.dims().iter().map(|&d| random_invertible(d)).collect();
        let changed = m.change_basis(&bases).ok()?;
        let ok = changed.maps().iter().all(|x| {
            (0..x.cols()).all(|c| {
                let col = x.column(c);
                col.iter().all(|v| v.is_zero() || v.is_one()) && col.iter().filter(|v| v.is_one()).count() <= 1
            })
        });
        if ok {
            return Some(bases);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmodule::direct_sum_all;

    const Q: Field = Field::Rationals;

    fn chain2() -> Arc<Poset> {
        Arc::new(Poset::chain(&["a", "b"]).unwrap())
    }

    #[test]
    fn rational_roots_of_small_polynomials() {
        // (x - 1)(x + 1/2) x = x^3 - x^2/2 - x/2
        let f = Q;
        let c = vec![f.zero(), f.parse("-1/2").unwrap(), f.parse("-1/2").unwrap(), f.one()];
        let mut roots: Vec<String> = rational_roots(&c).iter().map(|s| s.to_string()).collect();
        roots.sort();
        assert_eq!(roots, vec!["-1/2", "0", "1"]);
    }

    #[test]
    fn char_poly_of_a_jordan_block() {
        let j = Matrix::jordan_block(3, &Q.from_i64(2));
        // (x - 2)^3 = x^3 - 6x^2 + 12x - 8
        let c: Vec<i64> = char_poly(&j).iter().map(|s| s.to_i64().unwrap()).collect();
        assert_eq!(c, vec![-8, 12, -6, 1]);
    }

    #[test]
    fn three_intervals_give_three_summands() {
        let p = chain2();
        for field in [Q, Field::prime(3).unwrap(), Field::prime(2_147_483_647).unwrap()] {
            let parts: Vec<Arc<PersistenceModule>> = [[true, true], [true, false], [false, true]]
                .iter()
                .map(|s| Arc::new(PersistenceModule::indicator(p.clone(), field, s)))
                .collect();
            let m = direct_sum_all(&parts).unwrap().module;
            let d = decompose(&m, AnalysisOptions::default()).unwrap();
            assert_eq!(d.summands.len(), 3, "{field}");
            assert!(d.complete);
            assert!(d.witness.unwrap().is_isomorphism());
            assert!(krs_consistent(&m, AnalysisOptions::default()).unwrap());
        }
    }

    #[test]
    fn repeated_interval_needs_an_eigenvalue_shift() {
        // End of I ⊕ I is the full matrix algebra M_2(K)
        let p = chain2();
        let i = Arc::new(PersistenceModule::indicator(p, Q, &[true, true]));
        let m = direct_sum_all(&[i.clone(), i]).unwrap().module;
        let r = end_report(&m, AnalysisOptions::default()).unwrap();
        assert_eq!(r.dim, 4);
        assert_eq!(r.radical_dim, Some(0));
        assert!(matches!(r.verdict, Verdict::Decomposes(_)));
        let d = decompose(&m, AnalysisOptions::default()).unwrap();
        assert_eq!(d.dimension_multiset(), vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn radical_elements_are_nilpotent() {
        let p = chain2();
        let m = Arc::new(
            PersistenceModule::new(p, Q, vec![2, 1], vec![Matrix::from_i64(Q, &[&[1, 1]])]).unwrap(),
        );
        let basis = hom_space(&m, &m).unwrap();
        let alg = Algebra::new(&m, &basis).unwrap();
        let rad = alg.trace_radical();
        assert_eq!(rad.len(), 1);
        for c in rad {
            assert!(NaturalTransformation::linear_combination(&basis, &c).is_nilpotent());
        }
    }

    #[test]
    fn enumeration_hand_counts() {
        let p = chain2();
        let count = |dims: &[usize], kind| {
            enumerate_component_modules(&p, dims, kind, EnumerationOptions::default())
                .unwrap()
                .count()
        };
        assert_eq!(count(&[1, 1], ComponentKind::Component), 1);
        assert_eq!(count(&[1, 1], ComponentKind::SemiComponent), 2);
        assert_eq!(count(&[2, 1], ComponentKind::Component), 1);
        // [1 0] and [1 1] up to swapping, plus [0 0]
        assert_eq!(count(&[2, 1], ComponentKind::SemiComponent), 3);
    }

    #[test]
    fn enumeration_budget() {
        let p = chain2();
        let opts = EnumerationOptions {
            budget: 10,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_component_modules(&p, &[4, 4], ComponentKind::Component, opts),
            Err(AnalysisError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn identity_is_a_trivial_idempotent() {
        let p = chain2();
        let m = Arc::new(PersistenceModule::indicator(p, Q, &[true, true]));
        let r = verify_idempotent_decomposition(&m, &NaturalTransformation::identity(&m), None, None).unwrap();
        assert_eq!(r.image_dims, vec![1, 1]);
        assert_eq!(r.kernel_dims, vec![0, 0]);
        let two = NaturalTransformation::identity(&m).scale(&Q.from_i64(2));
        assert!(matches!(
            verify_idempotent_decomposition(&m, &two, None, None),
            Err(AnalysisError::NotIdempotent)
        ));
    }
}
