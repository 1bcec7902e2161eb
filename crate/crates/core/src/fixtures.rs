//! Small hand-built modules used as golden cases by tests, the CLI and the
//! acceptance suite. The JSON copies under `fixtures/` are generated from
//! these builders (see [`all`]).

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::homology::FilteredComplex;
use crate::linalg::{Field, Matrix, Scalar};
use crate::pmodule::{NaturalTransformation, PersistenceModule};
use crate::poset::Poset;

const Q: Field = Field::Rationals;

/// Module from integer matrices listed in the same order as `covers`.
/// An empty matrix slice stands for the zero map.
pub fn from_integers(
    field: Field,
    ids: &[&str],
    covers: &[(&str, &str)],
    dims: &[usize],
    maps: &[&[&[i64]]],
) -> Arc<PersistenceModule> {
    let p = Arc::new(Poset::new(ids, covers).expect("fixture poset"));
    let given: Vec<Matrix> = covers
        .iter()
        .zip(maps)
        .map(|(&(a, b), rows)| {
            let (a, b) = (p.index_of(a).unwrap(), p.index_of(b).unwrap());
            if rows.is_empty() {
                Matrix::zeros(field, dims[b], dims[a])
            } else {
                Matrix::from_i64(field, rows)
            }
        })
        .collect();
    from_matrices(p, field, dims, covers, given)
}

fn from_matrices(
    p: Arc<Poset>,
    field: Field,
    dims: &[usize],
    covers: &[(&str, &str)],
    given: Vec<Matrix>,
) -> Arc<PersistenceModule> {
    let maps = p
        .covers()
        .iter()
        .map(|&(a, b)| {
            let i = covers
                .iter()
                .position(|&(x, y)| p.id(a) == x && p.id(b) == y)
                .expect("cover listed");
            given[i].clone()
        })
        .collect();
    Arc::new(PersistenceModule::new(p, field, dims.to_vec(), maps).expect("fixture module"))
}

/// Two incomparable sources merging into a plane that collapses to a line.
/// A component module with no minimal generator.
pub fn merging_sources() -> Arc<PersistenceModule> {
    from_integers(
        Q,
        &["a", "b", "c", "d"],
        &[("a", "c"), ("b", "c"), ("c", "d")],
        &[1, 1, 2, 1],
        &[&[&[0], &[1]], &[&[1], &[0]], &[&[1, 1]]],
    )
}

const SIX_IDS: [&str; 6] = ["x", "a", "b", "c", "d", "z"];
const SIX_COVERS: [(&str, &str); 6] = [
    ("x", "a"),
    ("x", "b"),
    ("a", "c"),
    ("b", "c"),
    ("c", "d"),
    ("d", "z"),
];

/// Six-element component module with minimal generator at `x`.
pub fn six_point_component() -> Arc<PersistenceModule> {
    from_integers(
        Q,
        &SIX_IDS,
        &SIX_COVERS,
        &[1, 2, 2, 3, 2, 1],
        &[
            &[&[0], &[1]],
            &[&[1], &[0]],
            &[&[0, 1], &[0, 0], &[1, 0]],
            &[&[1, 0], &[0, 1], &[0, 0]],
            &[&[1, 0, 0], &[0, 1, 1]],
            &[&[1, 1]],
        ],
    )
}

/// The full interval on the six-element poset.
pub fn six_point_interval() -> Arc<PersistenceModule> {
    from_integers(Q, &SIX_IDS, &SIX_COVERS, &[1; 6], &[&[&[1]], &[&[1]], &[&[1]], &[&[1]], &[&[1]], &[&[1]]])
}

/// Semi-component complement of the interval in [`six_point_component`].
pub fn six_point_semi() -> Arc<PersistenceModule> {
    from_integers(
        Q,
        &SIX_IDS,
        &SIX_COVERS,
        &[0, 1, 1, 2, 1, 0],
        &[&[], &[], &[&[0], &[1]], &[&[1], &[0]], &[&[1, 1]], &[]],
    )
}

/// Idempotent on [`six_point_component`] whose kernel is the interval.
/// At `c` it is the 3x3 matrix with a zero first column.
pub fn six_point_idempotent() -> NaturalTransformation {
    let m = six_point_component();
    let comps: Vec<Matrix> = m
        .poset()
        .ids()
        .iter()
        .map(|id| {
            let rows: &[&[i64]] = match id.as_str() {
                "x" | "z" => &[&[0]],
                "a" => &[&[1, 0], &[-1, 0]],
                "b" | "d" => &[&[0, -1], &[0, 1]],
                "c" => &[&[0, -1, -1], &[0, 1, 0], &[0, 0, 1]],
                _ => unreachable!(),
            };
            Matrix::from_i64(Q, rows)
        })
        .collect();
    NaturalTransformation::new(m.clone(), m, comps).expect("natural")
}

const STAR_IDS: [&str; 5] = ["x", "a", "b", "c", "y"];
const STAR_COVERS: [(&str, &str); 6] = [
    ("x", "a"),
    ("x", "b"),
    ("x", "c"),
    ("a", "y"),
    ("b", "y"),
    ("c", "y"),
];

/// Semi-component module on the bounded three-leaf star.
pub fn star_semi() -> Arc<PersistenceModule> {
    from_integers(
        Q,
        &STAR_IDS,
        &STAR_COVERS,
        &[2, 1, 1, 1, 0],
        &[&[&[1, 1]], &[&[1, 0]], &[&[0, 1]], &[], &[], &[]],
    )
}

/// Component extension of [`star_semi`] at its bottom element.
pub fn star_extension() -> Arc<PersistenceModule> {
    from_integers(
        Q,
        &STAR_IDS,
        &STAR_COVERS,
        &[3, 2, 2, 2, 1],
        &[
            &[&[1, 0, 0], &[0, 1, 1]],
            &[&[1, 0, 1], &[0, 1, 0]],
            &[&[1, 1, 0], &[0, 0, 1]],
            &[&[1, 1]],
            &[&[1, 1]],
            &[&[1, 1]],
        ],
    )
}

const LEAF_IDS: [&str; 5] = ["o", "top", "right", "bottom", "left"];
const LEAF_COVERS: [(&str, &str); 4] = [("o", "top"), ("o", "right"), ("o", "bottom"), ("o", "left")];

/// The prime used for the golden-ratio star; 5 is a square there.
pub const GOLDEN_PRIME: u32 = 11;
/// Square root of 5 modulo [`GOLDEN_PRIME`].
pub const SQRT5_MOD_11: i64 = 4;

fn golden_field() -> Field {
    Field::prime(GOLDEN_PRIME).expect("prime")
}

/// phi = (1 + sqrt 5) / 2 and psi = (sqrt 5 - 1) / 2 in GF(11).
pub fn golden_constants() -> (Scalar, Scalar) {
    let f = golden_field();
    let half = f.from_i64(2).inverse().unwrap();
    let s = f.from_i64(SQRT5_MOD_11);
    let phi = &(&f.one() + &s) * &half;
    let psi = &(&s - &f.one()) * &half;
    (phi, psi)
}

/// Semi-component module on the four-leaf star (centre below the leaves)
/// over GF(11); it splits into two summands of dimension (2,1,1,1,1).
pub fn golden_star() -> Arc<PersistenceModule> {
    from_integers(
        golden_field(),
        &LEAF_IDS,
        &LEAF_COVERS,
        &[4, 2, 2, 2, 2],
        &[
            &[&[1, 1, 0, 0], &[0, 0, 0, 1]],
            &[&[0, 0, 1, 1], &[0, 1, 0, 0]],
            &[&[0, 1, 1, 0], &[1, 0, 0, 0]],
            &[&[1, 0, 0, 1], &[0, 0, 1, 0]],
        ],
    )
}

/// Entries written with phi and psi as symbols, then scaled by 1/sqrt 5.
fn golden_matrix(rows: &[&[Sym]]) -> Matrix {
    let f = golden_field();
    let (phi, psi) = golden_constants();
    let scale = f.from_i64(SQRT5_MOD_11).inverse().unwrap();
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    Matrix::from_fn(f, r, c, |i, j| {
        let v = match rows[i][j] {
            Sym::Int(k) => f.from_i64(k),
            Sym::Phi => phi.clone(),
            Sym::NegPhi => -&phi,
            Sym::Psi => psi.clone(),
        };
        &v * &scale
    })
}

fn golden_vectors(cols: &[&[Sym]]) -> Matrix {
    let f = golden_field();
    let (phi, psi) = golden_constants();
    let cols: Vec<Vec<Scalar>> = cols
        .iter()
        .map(|c| {
            c.iter()
                .map(|s| match *s {
                    Sym::Int(k) => f.from_i64(k),
                    Sym::Phi => phi.clone(),
                    Sym::NegPhi => -&phi,
                    Sym::Psi => psi.clone(),
                })
                .collect()
        })
        .collect();
    let rows = cols.first().map_or(0, Vec::len);
    Matrix::from_columns(f, rows, &cols)
}

#[derive(Clone, Copy)]
enum Sym {
    Int(i64),
    Phi,
    NegPhi,
    Psi,
}
use Sym::{Int, NegPhi, Phi, Psi};

/// Per-element matrices of the idempotent on [`golden_star`], in element
/// order (centre, top, right, bottom, left).
pub fn golden_idempotent_components() -> Vec<Matrix> {
    let a = golden_matrix(&[
        &[Phi, Int(1), Int(1), Int(0)],
        &[Int(0), Psi, Int(-1), Int(-1)],
        &[Int(1), Int(0), Phi, Int(1)],
        &[Int(-1), Int(-1), Int(0), Psi],
    ]);
    let b = golden_matrix(&[&[Phi, Int(-1)], &[Int(-1), Psi]]);
    let c = golden_matrix(&[&[Psi, Int(1)], &[Int(1), Phi]]);
    let star = golden_star();
    star.poset()
        .ids()
        .iter()
        .map(|id| match id.as_str() {
            "o" => a.clone(),
            "top" | "right" => b.clone(),
            _ => c.clone(),
        })
        .collect()
}

/// Kernel basis columns per element, in element order.
pub fn golden_kernel_bases() -> Vec<Matrix> {
    let star = golden_star();
    star.poset()
        .ids()
        .iter()
        .map(|id| match id.as_str() {
            "o" => golden_vectors(&[&[Int(1), Int(0), NegPhi, Phi], &[Int(0), Int(1), Int(-1), Phi]]),
            "top" => golden_vectors(&[&[Int(1), Phi]]),
            "right" => golden_vectors(&[&[Psi, Int(1)]]),
            "bottom" => golden_vectors(&[&[NegPhi, Int(1)]]),
            _ => golden_vectors(&[&[Phi, Int(-1)]]),
        })
        .collect()
}

/// Image basis columns per element, in element order.
pub fn golden_image_bases() -> Vec<Matrix> {
    let star = golden_star();
    star.poset()
        .ids()
        .iter()
        .map(|id| match id.as_str() {
            "o" => golden_vectors(&[&[Phi, Int(0), Int(1), Int(-1)], &[Int(1), Psi, Int(0), Int(-1)]]),
            "top" => golden_vectors(&[&[Phi, Int(-1)]]),
            "right" => golden_vectors(&[&[Int(-1), Psi]]),
            _ => golden_vectors(&[&[Psi, Int(1)]]),
        })
        .collect()
}

pub fn golden_idempotent() -> NaturalTransformation {
    let m = golden_star();
    NaturalTransformation::new(m.clone(), m, golden_idempotent_components()).expect("natural")
}

/// Four-leaf star with centre of dimension 2m and leaves of dimension m:
/// maps `[I 0]`, `[0 I]`, `[I I]` and `[I J_m(lambda)]`.
pub fn jordan_star(m: usize, lambda: i64, field: Field) -> Arc<PersistenceModule> {
    let p = Arc::new(Poset::new(&LEAF_IDS, &LEAF_COVERS).expect("star"));
    let i = Matrix::identity(field, m);
    let z = Matrix::zeros(field, m, m);
    let j = Matrix::jordan_block(m, &field.from_i64(lambda));
    let cat = |x: &Matrix, y: &Matrix| Matrix::hstack(field, m, &[x, y]).unwrap();
    let given = vec![cat(&i, &z), cat(&z, &i), cat(&i, &j), cat(&i, &i)];
    from_matrices(p, field, &[2 * m, m, m, m, m], &LEAF_COVERS, given)
}

/// The plane projected onto a line by `[1 1]`.
pub fn a2_sum() -> Arc<PersistenceModule> {
    from_integers(Q, &["p", "q"], &[("p", "q")], &[2, 1], &[&[&[1, 1]]])
}

/// Its reflection: the line embedded along the antidiagonal.
pub fn a2_reflected() -> Arc<PersistenceModule> {
    from_integers(Q, &["q", "p"], &[("q", "p")], &[1, 2], &[&[&[-1], &[1]]])
}

/// A module on the bounded diamond.
pub fn diamond() -> Arc<PersistenceModule> {
    from_integers(
        Q,
        &["bot", "l", "r", "top"],
        &[("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")],
        &[1, 2, 1, 1],
        &[&[&[1], &[0]], &[&[1]], &[&[1, 1]], &[&[1]]],
    )
}

/// The diamond module with one map tampered so a square fails to commute.
pub fn diamond_tampered() -> serde_json::Value {
    let mut v = crate::io::module_to_json(&diamond());
    v["maps"]["r->top"] = serde_json::json!([["0"]]);
    v
}

/// Two points born at `p` that merge at `q`.
pub fn merging_pair() -> FilteredComplex {
    let p = Arc::new(Poset::chain(&["p", "q"]).unwrap());
    let verts: BTreeSet<String> = ["u", "v"].iter().map(|s| s.to_string()).collect();
    FilteredComplex::from_deltas(
        p,
        vec![verts, BTreeSet::new()],
        vec![vec![], vec![("u".to_string(), "v".to_string())]],
    )
    .expect("complex")
}

/// Every fixture by file stem, as canonical JSON.
pub fn all() -> Vec<(String, serde_json::Value)> {
    use crate::io::{complex_to_json, module_to_json, transformation_to_json};
    let mut out = vec![
        ("merging_sources".to_string(), module_to_json(&merging_sources())),
        ("six_point_component".into(), module_to_json(&six_point_component())),
        ("six_point_interval".into(), module_to_json(&six_point_interval())),
        ("six_point_semi".into(), module_to_json(&six_point_semi())),
        ("six_point_idempotent".into(), transformation_to_json(&six_point_idempotent())),
        ("star_semi".into(), module_to_json(&star_semi())),
        ("star_extension".into(), module_to_json(&star_extension())),
        ("golden_star".into(), module_to_json(&golden_star())),
        ("a2_sum".into(), module_to_json(&a2_sum())),
        ("a2_reflected".into(), module_to_json(&a2_reflected())),
        ("diamond".into(), module_to_json(&diamond())),
        ("diamond_tampered".into(), diamond_tampered()),
        ("merging_pair".into(), complex_to_json(&merging_pair())),
    ];
    let mut golden = transformation_to_json(&golden_idempotent());
    let star = golden_star();
    let ids = star.poset().ids();
    let keyed = |ms: Vec<Matrix>| -> serde_json::Value {
        ids.iter()
            .zip(ms.iter())
            .map(|(id, m)| (id.clone(), crate::io::matrix_to_json(m)))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    golden["kernel"] = keyed(golden_kernel_bases());
    golden["image"] = keyed(golden_image_bases());
    out.push(("golden_idempotent".into(), golden));
    for m in 1..=4 {
        for (name, field) in [("q", Q), ("gf5", Field::prime(5).unwrap())] {
            out.push((format!("jordan_star_m{m}_{name}"), module_to_json(&jordan_star(m, 0, field))));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::{classify, ComponentKind};

    #[test]
    fn golden_constants_square_correctly() {
        let f = golden_field();
        let (phi, psi) = golden_constants();
        assert_eq!(&phi * &phi, &phi + &f.one());
        assert_eq!(&phi - &psi, f.one());
        assert_eq!(phi.as_residue(), Some(8));
        assert_eq!(psi.as_residue(), Some(7));
    }

    #[test]
    fn golden_idempotent_is_natural_and_idempotent() {
        let f = golden_idempotent();
        assert!(f.is_idempotent());
        for (e, (k, i)) in golden_kernel_bases().iter().zip(golden_image_bases()).enumerate() {
            assert!(f.component(e).mul(k).unwrap().is_zero());
            assert_eq!(f.component(e).mul(&i).unwrap(), i);
        }
    }

    #[test]
    fn fixtures_are_what_they_claim() {
        assert_eq!(classify(&merging_sources()).unwrap().kind(), ComponentKind::Component);
        assert_eq!(classify(&six_point_component()).unwrap().kind(), ComponentKind::Component);
        assert_eq!(classify(&six_point_semi()).unwrap().kind(), ComponentKind::SemiComponent);
        assert_eq!(classify(&star_semi()).unwrap().kind(), ComponentKind::SemiComponent);
        assert_eq!(classify(&star_extension()).unwrap().kind(), ComponentKind::Component);
        assert_eq!(classify(&golden_star()).unwrap().kind(), ComponentKind::SemiComponent);
        for m in 1..=4 {
            let j = jordan_star(m, 0, Q);
            assert_eq!(classify(&j).unwrap().kind(), ComponentKind::SemiComponent);
        }
        assert!(classify(&a2_reflected()).is_err());
        assert!(six_point_idempotent().is_idempotent());
    }
}
