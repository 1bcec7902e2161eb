//! Grid encodings: a module over a bounded poset as the pullback of a module
//! over a truncated grid `prod [0, l_i)` along a monotone map `pi`.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::par::{self, Exec};
use crate::pmodule::{ModuleError, PersistenceModule};
use crate::poset::{grid_coords, grid_strides, Elem, Poset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("poset has no unique minimum and maximum")]
    NotBounded,
    #[error("no common upper bound for the predecessors of grid point {0}")]
    EmptyJoinSet(String),
    #[error("pi is not monotone on grid points {0} <= {1}")]
    NotMonotone(String, String),
    #[error("grid map {0}->{1} lies in a fiber of pi but is not the identity")]
    FiberNotConstant(String, String),
    #[error("grid module disagrees with the pulled-back module at {0}")]
    PullbackMismatch(String),
    #[error("pi sends the {0} grid corner to {1}, not the {0} element")]
    CornerMismatch(&'static str, String),
    #[error("grid square at {0} along axes {1} and {2} does not commute")]
    NonCommutingSquare(String, usize, usize),
    #[error("restriction to axis {0} differs from the module along its chain")]
    AxisMismatch(usize),
    #[error("pi has {found} entries for a grid of {expected} points")]
    SizeMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Module(#[from] ModuleError),
}

#[derive(Debug, Clone)]
pub struct GridEncoding {
    pub bounds: Vec<usize>,
    /// The chain realised by each axis, from the minimum to the maximum.
    pub chains: Vec<Vec<Elem>>,
    pub grid: Arc<Poset>,
    /// `pi[y]` for each grid point `y` in the grid's row-major numbering.
    pub pi: Vec<Elem>,
    pub module: Arc<PersistenceModule>,
}

impl GridEncoding {
    pub fn axes(&self) -> usize {
        self.bounds.len()
    }

    pub fn coords(&self, y: usize) -> Vec<usize> {
        grid_coords(y, &self.bounds)
    }

    /// Grid point on axis `axis` at position `t`, all other coordinates zero.
    pub fn axis_point(&self, axis: usize, t: usize) -> usize {
        t * grid_strides(&self.bounds)[axis]
    }
}

/// Builds the encoding from a greedy maximal-chain cover. Axis points follow
/// the chains; every other grid point, in order of coordinate sum and then
/// lexicographically, is sent to the smallest-id element of the join-set of
/// its immediate predecessors' images.
pub fn build_encoding(m: &Arc<PersistenceModule>) -> Result<GridEncoding, EncodingError> {
    let p = m.poset();
    if !p.is_bounded() {
        return Err(EncodingError::NotBounded);
    }
    let chains = p.maximal_chain_cover();
    let bounds: Vec<usize> = chains.iter().map(Vec::len).collect();
    let grid = Arc::new(Poset::grid(&bounds));
    let strides = grid_strides(&bounds);
    let total = grid.len();

    let mut order: Vec<(usize, Vec<usize>, usize)> = (0..total)
        .map(|y| {
            let c = grid_coords(y, &bounds);
            (c.iter().sum(), c, y)
        })
        .collect();
    order.sort();

    let mut pi: Vec<Option<Elem>> = vec![None; total];
    for (_, coords, y) in order {
        let nonzero: Vec<usize> = (0..bounds.len()).filter(|&i| coords[i] > 0).collect();
        let image = match nonzero.as_slice() {
            [] => chains[0][0],
            [axis] => chains[*axis][coords[*axis]],
            axes => {
                let preds: Vec<Elem> = axes
                    .iter()
                    .map(|&i| pi[y - strides[i]].expect("predecessors come first"))
                    .collect();
                let joins = p.join_set(&preds).expect("nonempty subset");
                *joins
                    .iter()
                    .min_by_key(|&&j| p.id(j))
                    .ok_or_else(|| EncodingError::EmptyJoinSet(grid.id(y).to_string()))?
            }
        };
        pi[y] = Some(image);
    }
    let pi: Vec<Elem> = pi.into_iter().map(|x| x.expect("all assigned")).collect();
    let module = Arc::new(pullback(m, &grid, &pi)?);
    let enc = GridEncoding {
        bounds,
        chains,
        grid,
        pi,
        module,
    };
    validate_encoding(&enc, m)?;
    Ok(enc)
}

/// The module over `grid` with `dims(y) = m.dims(pi(y))` and cover maps the
/// composites of `m` between images.
pub fn pullback(
    m: &PersistenceModule,
    grid: &Arc<Poset>,
    pi: &[Elem],
) -> Result<PersistenceModule, EncodingError> {
    if pi.len() != grid.len() {
        return Err(EncodingError::SizeMismatch {
            expected: grid.len(),
            found: pi.len(),
        });
    }
    let dims: Vec<usize> = pi.iter().map(|&e| m.dim(e)).collect();
    let maps = grid
        .covers()
        .iter()
        .map(|&(y, z)| {
            m.composite_ref(pi[y], pi[z])
                .cloned()
                .ok_or_else(|| EncodingError::NotMonotone(grid.id(y).into(), grid.id(z).into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PersistenceModule::new(grid.clone(), m.field(), dims, maps)?)
}

/// Checks monotonicity of `pi`, the corners, agreement of the grid module
/// with the pullback, identity maps on fibers, commuting grid squares, and
/// that each axis restricts to the module along its chain.
pub fn validate_encoding(enc: &GridEncoding, m: &PersistenceModule) -> Result<(), EncodingError> {
    validate_encoding_with(enc, m, Exec::default())
}

pub fn validate_encoding_with(
    enc: &GridEncoding,
    m: &PersistenceModule,
    exec: Exec,
) -> Result<(), EncodingError> {
    let p = m.poset();
    let grid = &enc.grid;
    let gm = &enc.module;
    if enc.pi.len() != grid.len() {
        return Err(EncodingError::SizeMismatch {
            expected: grid.len(),
            found: enc.pi.len(),
        });
    }
    let covers = grid.covers();
    if let Some((_, err)) = par::find_first(covers, exec, |&(y, z)| {
        if !p.leq(enc.pi[y], enc.pi[z]) {
            Some(EncodingError::NotMonotone(grid.id(y).into(), grid.id(z).into()))
        } else {
            None
        }
    }) {
        return Err(err);
    }

    let (mins, maxs) = (p.minimal_elements(), p.maximal_elements());
    let origin = enc.pi[0];
    let top = enc.pi[grid.len() - 1];
    if mins != [origin] {
        return Err(EncodingError::CornerMismatch("minimum", p.id(origin).into()));
    }
    if maxs != [top] {
        return Err(EncodingError::CornerMismatch("maximum", p.id(top).into()));
    }

    if let Some(y) = (0..grid.len()).find(|&y| gm.dim(y) != m.dim(enc.pi[y])) {
        return Err(EncodingError::PullbackMismatch(grid.id(y).into()));
    }
    let cover_err = par::find_first(covers, exec, |&(y, z)| {
        let (a, b) = (enc.pi[y], enc.pi[z]);
        let map = gm.cover_map(y, z).expect("grid cover");
        if a == b && !map.is_identity() {
            return Some(EncodingError::FiberNotConstant(grid.id(y).into(), grid.id(z).into()));
        }
        match m.composite_ref(a, b) {
            Some(c) if c == map => None,
            _ => Some(EncodingError::PullbackMismatch(grid.id(y).into())),
        }
    });
    if let Some((_, err)) = cover_err {
        return Err(err);
    }

    let bounds = &enc.bounds;
    let strides = grid_strides(bounds);
    let points: Vec<usize> = (0..grid.len()).collect();
    let square_err = par::find_first(&points, exec, |&y| {
        let c = grid_coords(y, bounds);
        for i in 0..bounds.len() {
            for j in i + 1..bounds.len() {
                if c[i] + 1 >= bounds[i] || c[j] + 1 >= bounds[j] {
                    continue;
                }
                let (yi, yj) = (y + strides[i], y + strides[j]);
                let yij = yi + strides[j];
                let map = |a: usize, b: usize| gm.cover_map(a, b).expect("grid cover");
                let via_i = map(yi, yij).mul(map(y, yi)).expect("shapes");
                let via_j = map(yj, yij).mul(map(y, yj)).expect("shapes");
                if via_i != via_j {
                    return Some(EncodingError::NonCommutingSquare(grid.id(y).into(), i, j));
                }
            }
        }
        None
    });
    if let Some((_, err)) = square_err {
        return Err(err);
    }

    for (axis, chain) in enc.chains.iter().enumerate() {
        if axis_restriction(enc, axis)? != m.chain_restriction(chain)? {
            return Err(EncodingError::AxisMismatch(axis));
        }
    }
    Ok(())
}

/// Grid maps along axis `axis` through the origin.
pub fn axis_restriction(enc: &GridEncoding, axis: usize) -> Result<Vec<Matrix>, EncodingError> {
    (1..enc.bounds[axis])
        .map(|t| {
            let (y, z) = (enc.axis_point(axis, t - 1), enc.axis_point(axis, t));
            enc.module
                .cover_map(y, z)
                .cloned()
                .ok_or_else(|| EncodingError::PullbackMismatch(enc.grid.id(y).into()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    const Q: Field = Field::Rationals;

    fn diamond_module() -> Arc<PersistenceModule> {
        let p = Arc::new(Poset::new(&["x", "a", "b", "y"], &[("x", "a"), ("x", "b"), ("a", "y"), ("b", "y")]).unwrap());
        let maps = p
            .covers()
            .iter()
            .map(|&(a, b)| match (p.id(a), p.id(b)) {
                ("x", _) => Matrix::from_i64(Q, &[&[1], &[0]]),
                _ => Matrix::from_i64(Q, &[&[1, 1]]),
            })
            .collect();
        Arc::new(PersistenceModule::new(p, Q, vec![1, 2, 2, 1], maps).unwrap())
    }

    #[test]
    fn chain_encodes_as_itself() {
        let p = Arc::new(Poset::chain(&["a", "b", "c"]).unwrap());
        let maps = vec![Matrix::from_i64(Q, &[&[1], &[0]]), Matrix::from_i64(Q, &[&[0, 1]])];
        let m = Arc::new(PersistenceModule::new(p, Q, vec![1, 2, 1], maps).unwrap());
        let enc = build_encoding(&m).unwrap();
        assert_eq!(enc.bounds, vec![3]);
        assert_eq!(enc.pi, vec![0, 1, 2]);
        assert_eq!(enc.module.maps(), m.maps());
    }

    #[test]
    fn diamond_corner_goes_to_the_join() {
        let m = diamond_module();
        let enc = build_encoding(&m).unwrap();
        let p = m.poset();
        assert_eq!(enc.bounds, vec![3, 3]);
        let at = |i: usize, j: usize| p.id(enc.pi[i * 3 + j]);
        assert_eq!(at(1, 1), "y");
        assert_eq!(at(2, 1), "y");
        assert_eq!(at(0, 0), "x");
        assert_eq!(enc.module.dim(4), 1);
    }

    #[test]
    fn tampering_is_detected() {
        let m = diamond_module();
        let enc = build_encoding(&m).unwrap();
        let mut swapped = enc.clone();
        swapped.pi.swap(1, 2);
        assert!(matches!(
            validate_encoding(&swapped, &m),
            Err(EncodingError::NotMonotone(..))
        ));

        // (1,2) -> (2,2) lies in the fiber of y
        let mut maps = enc.module.maps().to_vec();
        let ci = enc.grid.cover_index(5, 8).unwrap();
        maps[ci] = Matrix::from_i64(Q, &[&[2]]);
        let mut tampered = enc.clone();
        tampered.module = Arc::new(
            PersistenceModule::new(enc.grid.clone(), Q, enc.module.dims().to_vec(), maps).unwrap(),
        );
        assert!(matches!(
            validate_encoding(&tampered, &m),
            Err(EncodingError::FiberNotConstant(..))
        ));
    }

    #[test]
    fn constant_pi_at_the_top() {
        let m = diamond_module();
        let grid = Arc::new(Poset::grid(&[2, 2]));
        let g = pullback(&m, &grid, &[3, 3, 3, 3]).unwrap();
        assert!(g.maps().iter().all(Matrix::is_identity));
    }

    #[test]
    fn unbounded_is_rejected() {
        let p = Arc::new(Poset::new(&["a", "b"], &[]).unwrap());
        let m = Arc::new(PersistenceModule::zero(p, Q));
        assert!(matches!(build_encoding(&m), Err(EncodingError::NotBounded)));
        let (bounded, _) = m.with_adjoined_bounds();
        assert!(build_encoding(&Arc::new(bounded)).is_ok());
    }
}
