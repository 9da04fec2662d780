//! Exact arithmetic for modular forms on `Gamma1(3)`: q-expansions over
//! `Q(sqrt(-3))`, Eisenstein series, the level-3 Hirzebruch elliptic genus,
//! and a decision procedure for triviality of divided congruences, applied to
//! f-invariant representatives of products, circle bundles and double
//! transfers of framed manifolds.

pub mod appendix;
pub mod cli;
pub mod congruence;
pub mod eisenstein;
pub mod error;
pub mod finv;
pub mod genus;
pub mod lattice;
pub mod modforms;
pub mod numtheory;
pub mod qseries;

pub use error::{Error, Result};
pub use modforms::{GradedForm, ModForm};
pub use numtheory::Rat;
pub use qseries::{QSeries, QZeta};
