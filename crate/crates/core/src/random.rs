//! Seeded generators for posets, filtrations and modules, used by the
//! property suites and benches. All randomness goes through `ChaCha8Rng`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::homology::{h0, FilteredComplex};
use crate::linalg::{Field, Matrix};
use crate::pmodule::{direct_sum_all, PersistenceModule};
use crate::poset::Poset;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random poset on `n` elements `p0..`: each pair `i < j` is related with
/// probability `density`, then reduced to covers.
pub fn random_poset(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Poset {
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                reach[i][j] = true;
            }
        }
    }
    // transitive closure in index order (edges only go forward)
    for j in 0..n {
        for i in (0..j).rev() {
            if reach[i][j] {
                for k in j + 1..n {
                    if reach[j][k] {
                        reach[i][k] = true;
                    }
                }
            }
        }
    }
    let mut covers = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if reach[i][j] && !(i + 1..j).any(|k| reach[i][k] && reach[k][j]) {
                covers.push((i, j));
            }
        }
    }
    let ids = (0..n).map(|i| format!("p{i}")).collect();
    Poset::from_indices(ids, covers).expect("acyclic by construction")
}

/// Random poset with a bottom and a top; bounds are adjoined when missing.
pub fn random_bounded_poset(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Poset {
    let p = random_poset(rng, n, density);
    if p.is_bounded() {
        p
    } else {
        p.adjoin_bounds().poset
    }
}

/// Random poset whose first element is below everything else.
pub fn random_poset_with_bottom(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Poset {
    let p = random_poset(rng, n.saturating_sub(1).max(1), density);
    if p.minimal_elements().len() == 1 {
        return p;
    }
    let mut ids = vec!["p_bot".to_string()];
    ids.extend(p.ids().iter().cloned());
    let mut covers: Vec<(usize, usize)> = p.covers().iter().map(|&(a, b)| (a + 1, b + 1)).collect();
    covers.extend(p.minimal_elements().into_iter().map(|m| (0, m + 1)));
    Poset::from_indices(ids, covers).expect("bottom adjoined")
}

/// Filtered graph: vertex births uniform over the poset, each vertex pair
/// joined with probability `edge_prob` at a random common upper bound.
pub fn random_filtration(
    rng: &mut ChaCha8Rng,
    poset: &Arc<Poset>,
    vertices: usize,
    edge_prob: f64,
) -> FilteredComplex {
    let births: Vec<usize> = (0..vertices).map(|_| rng.gen_range(0..poset.len())).collect();
    filtration_with_births(rng, poset, &births, edge_prob)
}

fn filtration_with_births(
    rng: &mut ChaCha8Rng,
    poset: &Arc<Poset>,
    births: &[usize],
    edge_prob: f64,
) -> FilteredComplex {
    let n = poset.len();
    let name = |i: usize| format!("v{i}");
    let mut verts = vec![BTreeSet::new(); n];
    for (i, &b) in births.iter().enumerate() {
        verts[b].insert(name(i));
    }
    let mut edges = vec![Vec::new(); n];
    for i in 0..births.len() {
        for j in i + 1..births.len() {
            if !rng.gen_bool(edge_prob) {
                continue;
            }
            let common: Vec<usize> = (0..n)
                .filter(|&e| poset.leq(births[i], e) && poset.leq(births[j], e))
                .collect();
            if let Some(&e) = common.choose(rng) {
                edges[e].push((name(i), name(j)));
            }
        }
    }
    FilteredComplex::from_deltas(poset.clone(), verts, edges).expect("edges born after endpoints")
}

/// Permutes the basis at every element, keeping the 0/1 shape of the maps.
pub fn shuffle_basis(rng: &mut ChaCha8Rng, m: &PersistenceModule) -> PersistenceModule {
    let field = m.field();
    let bases: Vec<Matrix> = m
        .dims()
        .iter()
        .map(|&d| {
            let mut perm: Vec<usize> = (0..d).collect();
            perm.shuffle(rng);
            Matrix::from_fn(field, d, d, |r, c| if perm[c] == r { field.one() } else { field.zero() })
        })
        .collect();
    m.change_basis(&bases).expect("permutations are invertible")
}

/// Component module with at least two generators and a minimal generator,
/// dimensions at most `max_dim`, on a random poset of at most `max_elems`
/// elements. Built as H0 of a graph with a vertex born at a bottom element.
pub fn random_component_module(
    rng: &mut ChaCha8Rng,
    max_elems: usize,
    max_dim: usize,
    field: Field,
) -> Arc<PersistenceModule> {
    loop {
        let n = rng.gen_range(1..=max_elems);
        let density = rng.gen_range(0.2..0.7);
        let p = Arc::new(random_poset_with_bottom(rng, n, density));
        let bottom = p.minimal_elements()[0];
        let k = rng.gen_range(2..=max_dim.max(2));
        let mut births = vec![bottom];
        births.extend((1..k).map(|_| rng.gen_range(0..p.len())));
        let edge_prob = rng.gen_range(0.1..0.6);
        let x = filtration_with_births(rng, &p, &births, edge_prob);
        let cs = h0(&x, field).expect("filtrations give component modules");
        if cs.generators().len() < 2 || cs.module().max_dim() > max_dim {
            continue;
        }
        return Arc::new(shuffle_basis(rng, cs.module()));
    }
}

/// Quotient of a component module by the submodule spanned by the upward
/// flow of a few random basis vectors; the result is semi-component.
pub fn random_semi_component_module(
    rng: &mut ChaCha8Rng,
    max_elems: usize,
    max_dim: usize,
    field: Field,
) -> Arc<PersistenceModule> {
    let c = random_component_module(rng, max_elems, max_dim, field);
    let p = c.poset();
    let mut killed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); p.len()];
    let seeds = rng.gen_range(1..=2);
    for _ in 0..seeds {
        let e = rng.gen_range(0..p.len());
        if c.dim(e) == 0 {
            continue;
        }
        let k = rng.gen_range(0..c.dim(e));
        flow_up(&c, e, k, &mut killed);
    }
    quotient_by_basis(&c, &killed)
}

/// Adds to `killed` every basis vector that basis vector `k` at `e` maps
/// onto, for a module whose maps are 0/1 with at most one 1 per column.
pub fn flow_up(m: &PersistenceModule, e: usize, k: usize, killed: &mut [BTreeSet<usize>]) {
    let p = m.poset();
    killed[e].insert(k);
    for &a in p.topological_order() {
        if !p.leq(e, a) {
            continue;
        }
        for &(b, ci) in p.upper_covers(a) {
            let map = m.map(ci);
            let hits: Vec<usize> = killed[a]
                .iter()
                .filter_map(|&j| (0..map.rows()).find(|&r| map.get(r, j).is_one()))
                .collect();
            killed[b].extend(hits);
        }
    }
}

/// Drops the basis vectors in `killed[e]` at each `e`. The killed vectors
/// must span a submodule.
pub fn quotient_by_basis(m: &PersistenceModule, killed: &[BTreeSet<usize>]) -> Arc<PersistenceModule> {
    let p = m.poset();
    let keep: Vec<Vec<usize>> = (0..p.len())
        .map(|e| (0..m.dim(e)).filter(|i| !killed[e].contains(i)).collect())
        .collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(ci, &(a, b))| m.map(ci).select_rows(&keep[b]).select_cols(&keep[a]))
        .collect();
    let dims = keep.iter().map(Vec::len).collect();
    Arc::new(PersistenceModule::new(m.poset_arc().clone(), m.field(), dims, maps).expect("quotient by a submodule"))
}

/// Random invertible matrix with small entries.
pub fn random_invertible(rng: &mut ChaCha8Rng, field: Field, n: usize) -> Matrix {
    loop {
        let m = Matrix::from_fn(field, n, n, |_, _| field.from_i64(rng.gen_range(-2..=2)));
        if m.is_invertible() {
            return m;
        }
    }
}

/// Applies a random invertible change of basis at every element.
pub fn scramble(rng: &mut ChaCha8Rng, m: &PersistenceModule) -> PersistenceModule {
    let bases: Vec<Matrix> = m.dims().iter().map(|&d| random_invertible(rng, m.field(), d)).collect();
    m.change_basis(&bases).expect("invertible bases")
}

/// General module on `poset`: a direct sum of one to three H0 modules of
/// random filtrations, in a scrambled basis. Dimensions stay below `max_dim`
/// where possible.
pub fn random_module(
    rng: &mut ChaCha8Rng,
    poset: &Arc<Poset>,
    field: Field,
    max_dim: usize,
) -> Arc<PersistenceModule> {
    let parts = rng.gen_range(1..=3);
    let mut summands = Vec::new();
    let mut budget = max_dim.max(1);
    for _ in 0..parts {
        if budget == 0 {
            break;
        }
        let verts = rng.gen_range(1..=budget.min(3));
        budget -= verts;
        let x = random_filtration(rng, poset, verts, 0.5);
        let cs = h0(&x, field).expect("component");
        let m = cs.module().as_ref().clone();
        let m = if rng.gen_bool(0.5) {
            let c = Arc::new(m);
            let e = rng.gen_range(0..poset.len());
            let mut killed = vec![BTreeSet::new(); poset.len()];
            if c.dim(e) > 0 {
                let k = rng.gen_range(0..c.dim(e));
                flow_up(&c, e, k, &mut killed);
            }
            quotient_by_basis(&c, &killed).as_ref().clone()
        } else {
            m
        };
        summands.push(Arc::new(m));
    }
    let sum = direct_sum_all(&summands).expect("same poset");
    Arc::new(scramble(rng, &sum.module))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::{classify, ComponentKind};

    #[test]
    fn posets_are_deterministic_per_seed() {
        let a = random_poset(&mut rng(7), 8, 0.4);
        let b = random_poset(&mut rng(7), 8, 0.4);
        assert_eq!(a, b);
        assert!(random_bounded_poset(&mut rng(1), 6, 0.3).is_bounded());
        let p = random_poset_with_bottom(&mut rng(3), 6, 0.2);
        assert_eq!(p.minimal_elements().len(), 1);
    }

    #[test]
    fn generated_modules_have_the_promised_shape() {
        let mut r = rng(11);
        for _ in 0..50 {
            let m = random_component_module(&mut r, 8, 4, Field::Rationals);
            let cs = classify(&m).unwrap();
            assert_eq!(cs.kind(), ComponentKind::Component);
            assert!(cs.generators().len() >= 2);
            assert!(cs.minimal_generator().is_some());
            assert!(m.max_dim() <= 4 && m.poset().len() <= 8);
            let s = random_semi_component_module(&mut r, 8, 4, Field::Rationals);
            assert!(classify(&s).is_ok());
            let p = Arc::new(random_bounded_poset(&mut r, 5, 0.4));
            random_module(&mut r, &p, Field::Rationals, 4).validate().unwrap();
        }
    }
}
