//! Exact generation and evaluation of the Plücker relations and the
//! Plücker-like relations of the Grassmannian `Gr(p, n)`.
//!
//! * [`multiindex`]: index tuples, inversion counts, multinomials.
//! * [`equations`]: equation generation, canonical forms, deduplication, output.
//! * [`pvectors`]: p-vectors over exact or floating scalars, simplicity tests.
//! * [`structure`]: checks of the relations between the two systems.
//! * [`cli`]: the `plucker` command line tool.

pub mod cli;
pub mod equations;
pub mod error;
pub mod multiindex;
pub mod pvectors;
pub mod structure;

pub use equations::{
    dedupe, gen_generalized, gen_plucker, gen_plucker_like, EquationSystem, Form, Label, QuadPoly,
    QuadTerm, QuadraticEquation,
};
pub use error::{Error, Result};
pub use multiindex::{inversion_pairs, multinomial, GrassmannParams, IndexStyle, MultiIndex};
