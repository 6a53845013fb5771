pub mod caps;
pub mod cli;
pub mod covers;
pub mod document;
pub mod error;
pub mod group_ring;
pub mod groups;
pub mod linalg;
pub mod pattern;
pub mod poly;
pub mod random;
pub mod spectral;
pub mod stripes;
pub mod verify;

pub use error::{Error, Result};
