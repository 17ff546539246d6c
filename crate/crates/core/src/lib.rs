pub mod angular;
pub mod config;
pub mod error;
pub mod exact;
pub mod greens;
pub mod observables;
pub mod pt2;
pub mod quad;
pub mod radial;
pub mod refdata;
pub mod scf0;
pub mod special;

pub use error::{Error, Result};
