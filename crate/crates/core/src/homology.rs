//! Zero-dimensional homology of filtered graphs over a poset, and the reverse
//! construction of a filtered graph from a component module.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::component::{classify, ComponentError, ComponentKind, ComponentStructure};
use crate::linalg::{Field, Matrix};
use crate::pmodule::PersistenceModule;
use crate::poset::{Elem, Poset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("expected {expected} levels, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("vertices at {0} are not contained in the vertices at {1}")]
    NonMonotoneVertices(String, String),
    #[error("edges at {0} are not contained in the edges at {1}")]
    NonMonotoneEdges(String, String),
    #[error("edge {{{1}, {2}}} at {0} has an endpoint missing at that level")]
    DanglingEdge(String, String, String),
    #[error("edge {{{1}, {1}}} at {0} is a loop")]
    DegenerateEdge(String, String),
    #[error(transparent)]
    Component(#[from] ComponentError),
}

pub type Edge = (String, String);

fn edge(u: &str, v: &str) -> Edge {
    if u <= v {
        (u.to_string(), v.to_string())
    } else {
        (v.to_string(), u.to_string())
    }
}

/// The 1-skeleton of a filtered complex: a graph at every poset element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    poset: Arc<Poset>,
    vertices: Vec<BTreeSet<String>>,
    edges: Vec<BTreeSet<Edge>>,
}

impl FilteredComplex {
    /// Validates monotonicity and edge endpoints. Edge endpoints are stored
    /// in sorted order.
    pub fn new(
        poset: Arc<Poset>,
        vertices: Vec<BTreeSet<String>>,
        edges: Vec<Vec<(String, String)>>,
    ) -> Result<Self, HomologyError> {
        for found in [vertices.len(), edges.len()] {
            if found != poset.len() {
                return Err(HomologyError::CountMismatch {
                    expected: poset.len(),
                    found,
                });
            }
        }
        let edges = edges
            .into_iter()
            .map(|es| es.iter().map(|(u, v)| edge(u, v)).collect())
            .collect();
        let x = FilteredComplex {
            poset,
            vertices,
            edges,
        };
        x.validate()?;
        Ok(x)
    }

    /// Builds a complex from per-element additions: each level becomes the
    /// union of the additions at and below it.
    pub fn from_deltas(
        poset: Arc<Poset>,
        vertices: Vec<BTreeSet<String>>,
        edges: Vec<Vec<(String, String)>>,
    ) -> Result<Self, HomologyError> {
        for found in [vertices.len(), edges.len()] {
            if found != poset.len() {
                return Err(HomologyError::CountMismatch {
                    expected: poset.len(),
                    found,
                });
            }
        }
        let n = poset.len();
        let mut cum_v = vec![BTreeSet::new(); n];
        let mut cum_e = vec![Vec::new(); n];
        for b in 0..n {
            for a in 0..n {
                if poset.leq(a, b) {
                    cum_v[b].extend(vertices[a].iter().cloned());
                    cum_e[b].extend(edges[a].iter().cloned());
                }
            }
        }
        Self::new(poset, cum_v, cum_e)
    }

    pub fn empty(poset: Arc<Poset>) -> Self {
        let n = poset.len();
        FilteredComplex {
            poset,
            vertices: vec![BTreeSet::new(); n],
            edges: vec![BTreeSet::new(); n],
        }
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn vertices(&self, e: Elem) -> &BTreeSet<String> {
        &self.vertices[e]
    }

    pub fn edges(&self, e: Elem) -> &BTreeSet<Edge> {
        &self.edges[e]
    }

    pub fn validate(&self) -> Result<(), HomologyError> {
        let p = &self.poset;
        for e in 0..p.len() {
            for (u, v) in &self.edges[e] {
                if u == v {
                    return Err(HomologyError::DegenerateEdge(p.id(e).into(), u.clone()));
                }
                if !self.vertices[e].contains(u) || !self.vertices[e].contains(v) {
                    return Err(HomologyError::DanglingEdge(p.id(e).into(), u.clone(), v.clone()));
                }
            }
        }
        for &(a, b) in p.covers() {
            if !self.vertices[a].is_subset(&self.vertices[b]) {
                return Err(HomologyError::NonMonotoneVertices(p.id(a).into(), p.id(b).into()));
            }
            if !self.edges[a].is_subset(&self.edges[b]) {
                return Err(HomologyError::NonMonotoneEdges(p.id(a).into(), p.id(b).into()));
            }
        }
        Ok(())
    }

    /// Each vertex at `e` mapped to the smallest vertex id of its connected component.
    pub fn components_at(&self, e: Elem) -> BTreeMap<String, String> {
        let verts: Vec<&String> = self.vertices[e].iter().collect();
        let index: BTreeMap<&str, usize> = verts.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for (u, v) in &self.edges[e] {
            uf.union(index[u.as_str()], index[v.as_str()]);
        }
        verts
            .iter()
            .enumerate()
            .map(|(i, v)| ((*v).clone(), verts[uf.find(i)].clone()))
            .collect()
    }
}

/// Disjoint sets whose root is always the smallest member, so representatives
/// follow the order of the indices.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// H0 with coefficients in `field`; the basis at each element lists the
/// components ordered by representative id.
pub fn h0(x: &FilteredComplex, field: Field) -> Result<ComponentStructure, HomologyError> {
    x.validate()?;
    let p = &x.poset;
    let labels: Vec<BTreeMap<String, String>> = (0..p.len()).map(|e| x.components_at(e)).collect();
    let reps: Vec<Vec<&String>> = labels
        .iter()
        .map(|l| l.values().collect::<BTreeSet<_>>().into_iter().collect())
        .collect();
    let dims: Vec<usize> = reps.iter().map(Vec::len).collect();
    let maps = p
        .covers()
        .iter()
        .map(|&(a, b)| {
            let mut m = Matrix::zeros(field, dims[b], dims[a]);
            for (j, r) in reps[a].iter().enumerate() {
                let target = &labels[b][*r];
                let i = reps[b].binary_search(&target).expect("representative present");
                m.set(i, j, field.one());
            }
            m
        })
        .collect();
    let m = Arc::new(
        PersistenceModule::new(p.clone(), field, dims, maps).map_err(ComponentError::from)?,
    );
    Ok(classify(&m)?)
}

/// Vertex name used by [`realize`] for generator `i`.
pub fn generator_vertex(i: usize) -> String {
    format!("g{i:04}")
}

/// A filtered graph whose H0 is isomorphic to the given component module.
/// Generator `i` contributes a vertex at every element above its position;
/// two vertices are joined wherever the generator images coincide.
pub fn realize(cs: &ComponentStructure) -> Result<FilteredComplex, HomologyError> {
    if cs.kind() != ComponentKind::Component {
        return Err(ComponentError::NotComponent.into());
    }
    let m = cs.module();
    let p = m.poset();
    let n = p.len();
    let gens = cs.generators();
    let mut vertices = vec![BTreeSet::new(); n];
    let mut edges = vec![Vec::new(); n];
    for q in 0..n {
        let mut present: Vec<(usize, usize)> = Vec::new();
        for (i, &(e, k)) in gens.iter().enumerate() {
            if !p.leq(e, q) {
                continue;
            }
            let comp = m.composite_map(e, q).map_err(ComponentError::from)?;
            let image = (0..m.dim(q))
                .find(|&r| comp.get(r, k).is_one())
                .ok_or(ComponentError::NotComponent)?;
            present.push((i, image));
        }
        for (x, &(i, im)) in present.iter().enumerate() {
            vertices[q].insert(generator_vertex(i));
            for &(j, jm) in &present[x + 1..] {
                if im == jm {
                    edges[q].push((generator_vertex(i), generator_vertex(j)));
                }
            }
        }
    }
    FilteredComplex::new(m.poset_arc().clone(), vertices, edges)
}


#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    fn set(vs: &[&str]) -> BTreeSet<String> {
        vs.iter().map(|s| s.to_string()).collect()
    }

    fn pairs(es: &[(&str, &str)]) -> Vec<(String, String)> {
        es.iter().map(|(u, v)| (u.to_string(), v.to_string())).collect()
    }

    #[test]
    fn merging_pair_gives_the_sum_map() {
        let p = Arc::new(Poset::chain(&["p", "q"]).unwrap());
        let x = FilteredComplex::new(
            p,
            vec![set(&["v1", "v2"]), set(&["v1", "v2"])],
            vec![vec![], pairs(&[("v1", "v2")])],
        )
        .unwrap();
        let cs = h0(&x, Q).unwrap();
        assert_eq!(cs.module().dims(), &[2, 1]);
        assert_eq!(cs.module().map(0), &Matrix::from_i64(Q, &[&[1, 1]]));
    }

    #[test]
    fn component_counts() {
        let p = Arc::new(Poset::chain(&["p"]).unwrap());
        let two = FilteredComplex::new(p.clone(), vec![set(&["u", "v"])], vec![vec![]]).unwrap();
        assert_eq!(h0(&two, Q).unwrap().module().dims(), &[2]);
        let tri = FilteredComplex::new(
            p,
            vec![set(&["a", "b", "c"])],
            vec![pairs(&[("a", "b"), ("b", "c"), ("c", "a")])],
        )
        .unwrap();
        let labels = tri.components_at(0);
        assert!(labels.values().all(|r| r == "a"));
    }

    #[test]
    fn validation_errors() {
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let r = FilteredComplex::new(p.clone(), vec![set(&["u"]), set(&[])], vec![vec![], vec![]]);
        assert!(matches!(r, Err(HomologyError::NonMonotoneVertices(..))));
        let r = FilteredComplex::new(p.clone(), vec![set(&["u"]), set(&["u"])], vec![vec![], pairs(&[("u", "w")])]);
        assert!(matches!(r, Err(HomologyError::DanglingEdge(..))));
        let r = FilteredComplex::new(
            p,
            vec![set(&["u", "w"]), set(&["u", "w"])],
            vec![pairs(&[("w", "u")]), vec![]],
        );
        assert!(matches!(r, Err(HomologyError::NonMonotoneEdges(..))));
    }

    #[test]
    fn deltas_accumulate() {
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        let x = FilteredComplex::from_deltas(
            p,
            vec![set(&["u"]), set(&["w"])],
            vec![vec![], pairs(&[("u", "w")])],
        )
        .unwrap();
        assert_eq!(x.vertices(1), &set(&["u", "w"]));
    }

    #[test]
    fn realize_merging_sources() {
        let p = Arc::new(Poset::new(&["a", "b", "c", "d"], &[("a", "c"), ("b", "c"), ("c", "d")]).unwrap());
        let maps = vec![
            Matrix::from_i64(Q, &[&[0], &[1]]),
            Matrix::from_i64(Q, &[&[1], &[0]]),
            Matrix::from_i64(Q, &[&[1, 1]]),
        ];
        let m = Arc::new(PersistenceModule::new(p, Q, vec![1, 1, 2, 1], maps).unwrap());
        let x = realize(&classify(&m).unwrap()).unwrap();
        assert!(x.edges(2).is_empty());
        assert_eq!(x.edges(3).len(), 1);
        assert_eq!(x.vertices(0), &set(&["g0000"]));
        let back = h0(&x, Q).unwrap();
        assert_eq!(back.module().dims(), m.dims());
    }

    #[test]
    fn empty_complex_is_zero() {
        let p = Arc::new(Poset::chain(&["a", "b"]).unwrap());
        assert!(h0(&FilteredComplex::empty(p), Q).unwrap().module().is_zero());
    }
}
