//! Fixed points of iterated modular correspondences.
//!
//! Two concrete settings are implemented:
//!
//! * rotation semigroups and free groups acting on the sphere `S² = SO(3)/SO(2)`
//!   ([`rotor`], [`words`], [`sphstat`]), where every non-identity word has an
//!   antipodal pair of isolated fixed points;
//! * the Hecke correspondence `T_p` on the modular surface `PSL(2,ℤ)\ℍ`
//!   ([`hecke`]), where isolated fixed points are elliptic classes parametrized
//!   by reduced binary quadratic forms.
//!
//! In both settings the normalized fixed-point measure of the `n`-th iterate
//! tends to `2·λ`, with `λ` the invariant probability measure.
//!
//! Enumeration work is split into independent tasks. With the default
//! `parallel` feature the tasks run on the rayon pool; without it everything
//! runs on the calling thread. Results are merged in task order either way.

pub mod error;
pub mod exec;
pub mod hecke;
pub mod report;
pub mod rotor;
pub mod sphstat;
pub mod sum;
pub mod words;

pub use error::{Error, Result};
pub use exec::{Execution, RunOptions};
