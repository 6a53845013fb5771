//! Enumeration caps shared by the search routines.
//!
//! The defaults can be overridden through the `L2GROWTH_CAPS` environment
//! variable, e.g. `bfs=20,order=100000,eig=2000`.

use crate::error::{Error, Result};

pub const CAPS_ENV: &str = "L2GROWTH_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Longest word explored by breadth-first searches in matrix groups.
    pub bfs: u64,
    /// Number of distinct elements a single search may visit.
    pub visited: usize,
    /// Largest finite quotient that will be enumerated.
    pub order: usize,
    /// Largest matrix handed to the dense eigensolver.
    pub eig: usize,
    /// Largest side length of an instantiated cover matrix.
    pub dense: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            bfs: 20,
            visited: 1_000_000,
            order: 100_000,
            eig: 2000,
            dense: 4096,
        }
    }
}

impl Caps {
    /// Parses a comma separated `key=value` list on top of the defaults.
    pub fn parse(spec: &str) -> Result<Caps> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("cap entry `{item}` is not key=value")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("cap value `{value}` is not an integer")))?;
            match key.trim() {
                "bfs" => caps.bfs = value,
                "visited" => caps.visited = value as usize,
                "order" => caps.order = value as usize,
                "eig" => caps.eig = value as usize,
                "dense" => caps.dense = value as usize,
                other => return Err(Error::Invalid(format!("unknown cap `{other}`"))),
            }
        }
        Ok(caps)
    }

    /// Defaults, overridden by `L2GROWTH_CAPS` when set.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::parse(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}
