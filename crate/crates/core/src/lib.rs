//! Certification toolkit for finite subgroups of classical groups over small
//! finite fields: image conditions (adequacy, tidiness, irreducibility),
//! group cohomology, local-ring lifting of invariant summands, root-datum
//! prime checks, Taylor–Wiles quotient combinatorics, and bounded-height
//! point counts.

pub mod adequacy;
pub mod cohom;
pub mod error;
pub mod ff;
pub mod fixtures;
pub mod heights;
pub mod liealg;
pub mod lift;
pub mod linalg;
pub mod matgrp;
pub mod repmod;

pub use error::{Error, Result};

/// Three-valued verdict: indeterminate outcomes (from the special-orthogonal
/// lower-bound cases) propagate instead of being coerced to false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriBool {
    True,
    False,
    Indeterminate,
}

impl TriBool {
    pub fn from_bool(b: bool) -> TriBool {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn and(self, other: TriBool) -> TriBool {
        use TriBool::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (True, True) => True,
        }
    }

    pub fn is_true(self) -> bool {
        self == TriBool::True
    }
}

impl std::fmt::Display for TriBool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TriBool::True => "TRUE",
            TriBool::False => "FALSE",
            TriBool::Indeterminate => "INDETERMINATE",
        };
        write!(f, "{s}")
    }
}

/// Execution strategy for the batch-parallel entry points. With the
/// `parallel` feature enabled (the default) `Rayon` fans work out to the
/// global thread pool; `Sequential` always runs in the calling thread and is
/// the only mode available when the feature is off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Parallelism::Rayon
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Parallelism::Sequential
    }
}

/// Order-preserving parallel map: results arrive in input order regardless of
/// the execution mode, so downstream reductions stay deterministic.
pub fn par_map<T, U, F>(par: Parallelism, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match par {
        Parallelism::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}
