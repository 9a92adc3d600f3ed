//! Monte Carlo laboratory for chordal curves built from Poisson point
//! processes of Brownian boundary-to-boundary excursions and loop-soup
//! conformal loop ensembles in the unit disk.
//!
//! The crate samples the excursion process driven by a boundary measure,
//! attaches loop-soup clusters, extracts the right envelope of the union as
//! a curve from `-i` to `i`, converts curves to Loewner driving functions by
//! unzipping, and verifies the distributional identities that connect the
//! construction to SLE and to level lines of the Gaussian free field.

pub mod cle;
pub mod envelope;
pub mod error;
pub mod excursion;
pub mod gff;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod loewner;
pub mod measure;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};
