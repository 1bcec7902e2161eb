//! Exact zero-dimensional multiparameter persistence.
//!
//! Modules over finite posets are stored on their Hasse diagram with exact
//! matrices over Q or GF(p). On top of that sit:
//!
//! * [`component`]: component and semi-component modules, the interval split
//!   driven by a minimal generator, and semi-component extension with its
//!   elimination-based inverse.
//! * [`homology`]: zero-dimensional homology of filtered graphs and the
//!   reverse realisation of component modules.
//! * [`encoding`]: grid encodings of modules over bounded posets.
//! * [`analysis`]: endomorphism-algebra verdicts, Fitting-based
//!   decomposition, and brute-force enumeration of component modules.
//!
//! The `parallel` feature (on by default) runs the candidate searches with
//! rayon; results never depend on scheduling.

pub mod analysis;
pub mod component;
pub mod encoding;
pub mod fixtures;
pub mod homology;
pub mod io;
pub mod linalg;
pub mod par;
pub mod pmodule;
pub mod poset;
pub mod random;

pub use linalg::{Field, Matrix, Scalar};
pub use par::Exec;
pub use pmodule::{NaturalTransformation, PersistenceModule};
pub use poset::{Elem, Poset};
