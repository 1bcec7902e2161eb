//! Finite posets stored as Hasse diagrams, with a dense reachability closure.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("duplicate element id {0:?}")]
    DuplicateId(String),
    #[error("unknown element id {0:?}")]
    UnknownId(String),
    #[error("invalid element id {0:?}: ids match [A-Za-z0-9_]+")]
    InvalidId(String),
    #[error("cover relations contain a cycle through {0:?}")]
    CycleDetected(String),
    #[error("({0}, {1}) is implied by other covers and is not a cover relation")]
    NonCoverEdge(String, String),
    #[error("cover ({0}, {1}) listed twice")]
    DuplicateCover(String, String),
    #[error("join-set of an empty subset")]
    EmptySubset,
}

/// Index of an element inside its poset.
pub type Elem = usize;

#[derive(Clone, Debug)]
pub struct Poset {
    ids: Vec<String>,
    index: HashMap<String, Elem>,
    covers: Vec<(Elem, Elem)>,
    /// per element: (lower neighbour, cover index)
    lower: Vec<Vec<(Elem, usize)>>,
    upper: Vec<Vec<(Elem, usize)>>,
    leq: Vec<Vec<bool>>,
    topo: Vec<Elem>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.covers == other.covers
    }
}

impl Eq for Poset {}

pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Poset {
    /// Builds and validates a poset from ids and (lower, upper) cover pairs.
    pub fn new<S: AsRef<str>>(ids: &[S], covers: &[(S, S)]) -> Result<Self, PosetError> {
        let ids: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if !is_valid_id(id) {
                return Err(PosetError::InvalidId(id.clone()));
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(PosetError::DuplicateId(id.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| PosetError::UnknownId(s.to_string()))
        };
        let covers = covers
            .iter()
            .map(|(a, b)| Ok((lookup(a.as_ref())?, lookup(b.as_ref())?)))
            .collect::<Result<Vec<_>, PosetError>>()?;
        Self::from_indices(ids, covers)
    }

    /// Same as [`Poset::new`] with covers given by element index.
    pub fn from_indices(ids: Vec<String>, covers: Vec<(Elem, Elem)>) -> Result<Self, PosetError> {
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(PosetError::DuplicateId(id.clone()));
            }
        }
        let mut lower = vec![Vec::new(); n];
        let mut upper = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for (ci, &(a, b)) in covers.iter().enumerate() {
            if a >= n || b >= n {
                return Err(PosetError::UnknownId(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(PosetError::CycleDetected(ids[a].clone()));
            }
            if !seen.insert((a, b)) {
                return Err(PosetError::DuplicateCover(ids[a].clone(), ids[b].clone()));
            }
            upper[a].push((b, ci));
            lower[b].push((a, ci));
        }
        // Kahn's algorithm, smallest index first.
        let mut indeg: Vec<usize> = lower.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<Elem> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(&e) = ready.iter().next() {
            ready.remove(&e);
            topo.push(e);
            for &(u, _) in &upper[e] {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    ready.insert(u);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).expect("cycle member");
            return Err(PosetError::CycleDetected(ids[stuck].clone()));
        }
        let mut leq = vec![vec![false; n]; n];
        for &e in topo.iter().rev() {
            leq[e][e] = true;
            for &(u, _) in &upper[e] {
                let (row_e, row_u) = two_rows(&mut leq, e, u);
                for (x, y) in row_e.iter_mut().zip(row_u.iter()) {
                    *x |= *y;
                }
            }
        }
        for &(a, b) in &covers {
            if upper[a].iter().any(|&(c, _)| c != b && leq[c][b]) {
                return Err(PosetError::NonCoverEdge(ids[a].clone(), ids[b].clone()));
            }
        }
        Ok(Poset {
            ids,
            index,
            covers,
            lower,
            upper,
            leq,
            topo,
        })
    }

    /// Chain `ids[0] < ids[1] < ...`.
    pub fn chain<S: AsRef<str>>(ids: &[S]) -> Result<Self, PosetError> {
        let covers: Vec<(&str, &str)> = ids
            .windows(2)
            .map(|w| (w[0].as_ref(), w[1].as_ref()))
            .collect();
        let ids: Vec<&str> = ids.iter().map(AsRef::as_ref).collect();
        Poset::new(&ids, &covers)
    }

    /// Truncated grid `prod [0, bounds[i])` with ids like `"0_2_1"`.
    /// Elements are numbered row-major (last axis fastest).
    pub fn grid(bounds: &[usize]) -> Self {
        let total: usize = bounds.iter().product();
        let strides = grid_strides(bounds);
        let mut ids = Vec::with_capacity(total);
        let mut covers = Vec::new();
        for idx in 0..total {
            let coords = grid_coords(idx, bounds);
            ids.push(
                coords
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join("_"),
            );
            for (axis, &c) in coords.iter().enumerate() {
                if c + 1 < bounds[axis] {
                    covers.push((idx, idx + strides[axis]));
                }
            }
        }
        Poset::from_indices(ids, covers).expect("grid posets are valid")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, e: Elem) -> &str {
        &self.ids[e]
    }

    pub fn index_of(&self, id: &str) -> Result<Elem, PosetError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| PosetError::UnknownId(id.to_string()))
    }

    pub fn covers(&self) -> &[(Elem, Elem)] {
        &self.covers
    }

    pub fn cover_index(&self, a: Elem, b: Elem) -> Option<usize> {
        self.upper[a].iter().find(|&&(u, _)| u == b).map(|&(_, c)| c)
    }

    /// Elements covered by `e`, with the cover index.
    pub fn lower_covers(&self, e: Elem) -> &[(Elem, usize)] {
        &self.lower[e]
    }

    pub fn upper_covers(&self, e: Elem) -> &[(Elem, usize)] {
        &self.upper[e]
    }

    /// Elements listed so that every cover goes forward.
    pub fn topological_order(&self) -> &[Elem] {
        &self.topo
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn comparable(&self, a: Elem, b: Elem) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    pub fn leq_ids(&self, a: &str, b: &str) -> Result<bool, PosetError> {
        Ok(self.leq(self.index_of(a)?, self.index_of(b)?))
    }

    fn sorted_by_id(&self, mut v: Vec<Elem>) -> Vec<Elem> {
        v.sort_by(|&a, &b| self.ids[a].cmp(&self.ids[b]));
        v
    }

    pub fn minimal_elements(&self) -> Vec<Elem> {
        self.sorted_by_id((0..self.len()).filter(|&e| self.lower[e].is_empty()).collect())
    }

    pub fn maximal_elements(&self) -> Vec<Elem> {
        self.sorted_by_id((0..self.len()).filter(|&e| self.upper[e].is_empty()).collect())
    }

    /// Number of elements in a longest chain.
    pub fn height(&self) -> usize {
        self.longest_chain_below().into_iter().max().map_or(0, |h| h + 1)
    }

    /// For each element, the number of covers on a longest chain from a minimal element to it.
    fn longest_chain_below(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.len()];
        for &e in &self.topo {
            for &(l, _) in &self.lower[e] {
                depth[e] = depth[e].max(depth[l] + 1);
            }
        }
        depth
    }

    pub fn up_set(&self, e: Elem) -> Vec<Elem> {
        (0..self.len()).filter(|&x| self.leq[e][x]).collect()
    }

    pub fn down_set(&self, e: Elem) -> Vec<Elem> {
        (0..self.len()).filter(|&x| self.leq[x][e]).collect()
    }

    pub fn is_bounded(&self) -> bool {
        self.minimal_elements().len() == 1 && self.maximal_elements().len() == 1
    }

    /// Minimal common upper bounds of `subset`, sorted by id. Empty when no
    /// common upper bound exists.
    pub fn join_set(&self, subset: &[Elem]) -> Result<Vec<Elem>, PosetError> {
        if subset.is_empty() {
            return Err(PosetError::EmptySubset);
        }
        let bounds: Vec<Elem> = (0..self.len())
            .filter(|&k| subset.iter().all(|&s| self.leq[s][k]))
            .collect();
        let minimal = bounds
            .iter()
            .copied()
            .filter(|&j| !bounds.iter().any(|&k| self.lt(k, j)))
            .collect();
        Ok(self.sorted_by_id(minimal))
    }

    /// Layered pre-grading: minimal elements get 0; layer `k` takes the ungraded
    /// elements covering layer `k-1` whose lower covers are all graded.
    pub fn pre_grading(&self) -> PreGrading {
        let n = self.len();
        let mut grade: Vec<Option<usize>> = vec![None; n];
        let mut layer: Vec<Elem> = self.minimal_elements();
        let mut k = 0;
        while !layer.is_empty() {
            for &e in &layer {
                grade[e] = Some(k);
            }
            let candidates: BTreeSet<Elem> = layer
                .iter()
                .flat_map(|&e| self.upper[e].iter().map(|&(u, _)| u))
                .filter(|&u| grade[u].is_none())
                .collect();
            // Drop candidates sitting above another ungraded element.
            layer = candidates
                .into_iter()
                .filter(|&u| self.lower[u].iter().all(|&(l, _)| grade[l].is_some()))
                .collect();
            k += 1;
        }
        PreGrading {
            grades: grade
                .into_iter()
                .map(|g| g.expect("every element is reached from a minimal one"))
                .collect(),
        }
    }

    /// All maximal chains, each from a minimal to a maximal element along covers.
    pub fn maximal_chains(&self) -> Vec<Vec<Elem>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        for m in self.minimal_elements() {
            self.extend_chains(m, &mut path, &mut out);
        }
        out
    }

    fn extend_chains(&self, e: Elem, path: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        path.push(e);
        if self.upper[e].is_empty() {
            out.push(path.clone());
        } else {
            let ups = self.sorted_by_id(self.upper[e].iter().map(|&(u, _)| u).collect());
            for u in ups {
                self.extend_chains(u, path, out);
            }
        }
        path.pop();
    }

    /// Greedy cover by maximal chains: repeatedly take the chain covering the
    /// most uncovered elements, then the longest, then the lexicographically
    /// smallest id sequence.
    pub fn maximal_chain_cover(&self) -> Vec<Vec<Elem>> {
        let chains = self.maximal_chains();
        let mut covered = vec![false; self.len()];
        let mut remaining = self.len();
        let mut cover = Vec::new();
        while remaining > 0 {
            let best = chains
                .iter()
                .max_by(|a, b| {
                    let fresh = |c: &Vec<Elem>| c.iter().filter(|&&e| !covered[e]).count();
                    fresh(a)
                        .cmp(&fresh(b))
                        .then(a.len().cmp(&b.len()))
                        .then_with(|| {
                            let ia = a.iter().map(|&e| &self.ids[e]);
                            let ib = b.iter().map(|&e| &self.ids[e]);
                            ib.cmp(ia)
                        })
                })
                .expect("a nonempty poset has a maximal chain");
            for &e in best {
                if !covered[e] {
                    covered[e] = true;
                    remaining -= 1;
                }
            }
            cover.push(best.clone());
        }
        cover
    }

    /// Adds a global minimum and/or maximum where the poset lacks one.
    pub fn adjoin_bounds(&self) -> AdjoinedBounds {
        if self.is_empty() {
            return AdjoinedBounds {
                poset: self.clone(),
                bottom: None,
                top: None,
                original: Vec::new(),
            };
        }
        let mins = self.minimal_elements();
        let maxs = self.maximal_elements();
        let fresh = |base: &str| {
            let mut name = base.to_string();
            while self.index.contains_key(&name) {
                name.push('_');
            }
            name
        };
        let need_bottom = mins.len() > 1;
        let need_top = maxs.len() > 1;
        let shift = usize::from(need_bottom);
        let mut ids = Vec::with_capacity(self.len() + 2);
        if need_bottom {
            ids.push(fresh("bottom"));
        }
        ids.extend(self.ids.iter().cloned());
        let mut covers: Vec<(Elem, Elem)> =
            self.covers.iter().map(|&(a, b)| (a + shift, b + shift)).collect();
        if need_bottom {
            covers.extend(mins.iter().map(|&m| (0, m + shift)));
        }
        let top = need_top.then(|| {
            let mut name = fresh("top");
            while ids.contains(&name) {
                name.push('_');
            }
            ids.push(name);
            let t = ids.len() - 1;
            covers.extend(maxs.iter().map(|&m| (m + shift, t)));
            t
        });
        let poset = Poset::from_indices(ids, covers).expect("adjoining bounds keeps a valid poset");
        AdjoinedBounds {
            poset,
            bottom: need_bottom.then_some(0),
            top,
            original: (0..self.len()).map(|e| e + shift).collect(),
        }
    }

    /// Product order; ids are `"{p}__{q}"`, elements numbered `p * |Q| + q`.
    pub fn product(&self, other: &Poset) -> Result<Poset, PosetError> {
        let m = other.len();
        let mut ids = Vec::with_capacity(self.len() * m);
        for p in &self.ids {
            for q in &other.ids {
                ids.push(format!("{p}__{q}"));
            }
        }
        let mut covers = Vec::new();
        for p in 0..self.len() {
            for q in 0..m {
                for &(p2, _) in &self.upper[p] {
                    covers.push((p * m + q, p2 * m + q));
                }
                for &(q2, _) in &other.upper[q] {
                    covers.push((p * m + q, p * m + q2));
                }
            }
        }
        Poset::from_indices(ids, covers)
    }
}

fn two_rows(v: &mut [Vec<bool>], a: usize, b: usize) -> (&mut Vec<bool>, &Vec<bool>) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

pub(crate) fn grid_strides(bounds: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; bounds.len()];
    for i in (0..bounds.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * bounds[i + 1];
    }
    strides
}

pub(crate) fn grid_coords(mut idx: usize, bounds: &[usize]) -> Vec<usize> {
    let mut coords = vec![0; bounds.len()];
    for i in (0..bounds.len()).rev() {
        coords[i] = idx % bounds[i];
        idx /= bounds[i];
    }
    coords
}

/// Result of [`Poset::adjoin_bounds`]: `original[e]` is the new index of old element `e`.
#[derive(Clone, Debug)]
pub struct AdjoinedBounds {
    pub poset: Poset,
    pub bottom: Option<Elem>,
    pub top: Option<Elem>,
    pub original: Vec<Elem>,
}

/// Strictly monotone map to `0..h(P)` whose fibres are antichains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreGrading {
    pub grades: Vec<usize>,
}

impl PreGrading {
    pub fn grade(&self, e: Elem) -> usize {
        self.grades[e]
    }

    /// Strict monotonicity, antichain fibres, range inside `[0, h(P)-1]`.
    pub fn is_valid_for(&self, poset: &Poset) -> bool {
        let n = poset.len();
        if self.grades.len() != n {
            return false;
        }
        let h = poset.height();
        let strict = (0..n).all(|a| {
            (0..n).all(|b| !poset.lt(a, b) || self.grades[a] < self.grades[b])
        });
        let antichains = (0..n).all(|a| {
            (0..n).all(|b| a == b || self.grades[a] != self.grades[b] || !poset.comparable(a, b))
        });
        strict && antichains && self.grades.iter().all(|&g| g < h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Poset {
        Poset::new(
            &["x", "a", "b", "y"],
            &[("x", "a"), ("x", "b"), ("a", "y"), ("b", "y")],
        )
        .unwrap()
    }

    fn ids(p: &Poset, v: &[Elem]) -> Vec<String> {
        v.iter().map(|&e| p.id(e).to_string()).collect()
    }

    #[test]
    fn validation_errors() {
        assert!(Poset::chain(&["a", "b", "c"]).is_ok());
        assert!(matches!(
            Poset::new(&["a", "b"], &[("a", "b"), ("b", "a")]),
            Err(PosetError::CycleDetected(_))
        ));
        assert_eq!(
            Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap_err(),
            PosetError::NonCoverEdge("a".into(), "c".into())
        );
        assert!(matches!(
            Poset::new(&["a", "a"], &[]),
            Err(PosetError::DuplicateId(_))
        ));
        assert!(matches!(
            Poset::new(&["a"], &[("a", "z")]),
            Err(PosetError::UnknownId(_))
        ));
        assert!(matches!(
            Poset::new(&["a-b"], &[]),
            Err(PosetError::InvalidId(_))
        ));
    }

    #[test]
    fn order_queries() {
        let d = diamond();
        assert_eq!(ids(&d, &d.minimal_elements()), ["x"]);
        assert_eq!(ids(&d, &d.maximal_elements()), ["y"]);
        assert_eq!(d.height(), 3);
        assert!(!d.leq_ids("a", "b").unwrap());
        assert!(d.leq_ids("x", "y").unwrap());
        assert!(d.leq_ids("q", "y").is_err());
        let c: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();
        assert_eq!(Poset::chain(&c).unwrap().height(), 5);
    }

    #[test]
    fn join_sets() {
        let d = diamond();
        let a = d.index_of("a").unwrap();
        let b = d.index_of("b").unwrap();
        assert_eq!(ids(&d, &d.join_set(&[a]).unwrap()), ["a"]);
        assert_eq!(ids(&d, &d.join_set(&[a, b]).unwrap()), ["y"]);
        let vee = Poset::new(&["r", "s", "t"], &[("r", "s"), ("r", "t")]).unwrap();
        assert!(vee.join_set(&[1, 2]).unwrap().is_empty());
        assert_eq!(d.join_set(&[]), Err(PosetError::EmptySubset));
        // two incomparable minimal upper bounds
        let bowtie = Poset::new(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
        )
        .unwrap();
        assert_eq!(ids(&bowtie, &bowtie.join_set(&[0, 1]).unwrap()), ["c", "d"]);
    }

    #[test]
    fn pre_gradings() {
        let c = Poset::chain(&["a", "b", "c"]).unwrap();
        assert_eq!(c.pre_grading().grades, vec![0, 1, 2]);
        let d = diamond();
        assert_eq!(d.pre_grading().grades, vec![0, 1, 1, 2]);
        // x < a < y with an extra long branch x < b1 < b2 < y
        let p = Poset::new(
            &["x", "a", "b1", "b2", "y"],
            &[("x", "a"), ("a", "y"), ("x", "b1"), ("b1", "b2"), ("b2", "y")],
        )
        .unwrap();
        let g = p.pre_grading();
        assert_eq!(g.grades, vec![0, 1, 1, 2, 3]);
        assert!(g.is_valid_for(&p));
    }

    #[test]
    fn chain_covers() {
        let c = Poset::chain(&["a", "b", "c"]).unwrap();
        assert_eq!(c.maximal_chain_cover(), vec![vec![0, 1, 2]]);
        let d = diamond();
        let cover: Vec<Vec<String>> = d.maximal_chain_cover().iter().map(|c| ids(&d, c)).collect();
        assert_eq!(cover, [["x", "a", "y"], ["x", "b", "y"]]);
        let star = Poset::new(
            &["c", "l1", "l2", "l3", "l4"],
            &[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")],
        )
        .unwrap();
        assert_eq!(star.maximal_chain_cover().len(), 4);
    }

    #[test]
    fn bounds() {
        let d = diamond();
        let adj = d.adjoin_bounds();
        assert_eq!(adj.poset, d);
        let anti = Poset::new(&["a", "b"], &[]).unwrap();
        let adj = anti.adjoin_bounds();
        assert_eq!(adj.poset.len(), 4);
        assert!(adj.poset.is_bounded());
        assert_eq!(adj.poset.height(), 3);
        // two sources into one centre then one sink: only a bottom is added
        let p = Poset::new(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("b", "c"), ("c", "d")],
        )
        .unwrap();
        let adj = p.adjoin_bounds();
        assert_eq!(adj.poset.len(), 5);
        assert!(adj.bottom.is_some() && adj.top.is_none());
        assert!(adj.poset.is_bounded());
    }

    #[test]
    fn products() {
        let c2 = Poset::chain(&["0", "1"]).unwrap();
        let sq = c2.product(&c2).unwrap();
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.covers().len(), 4);
        assert_eq!(sq.height(), 3);
        assert!(sq.is_bounded());
        let pt = Poset::new(&["p"], &[] as &[(&str, &str)]).unwrap();
        let d = diamond();
        let dp = d.product(&pt).unwrap();
        assert_eq!(dp.covers().len(), d.covers().len());
        let c3 = Poset::chain(&["0", "1", "2"]).unwrap();
        let g = c2.product(&c3).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.height(), 4);
        assert_eq!(Poset::grid(&[2, 3]).height(), 4);
    }
}
