//! Exact conditional inference on finite regions of the lattice.
//!
//! Two independent routes compute the same quantities: [`brute`] enumerates
//! all `q^|free|` assignments, [`transfer`] sweeps a row-major frontier across
//! the bounding rectangle. [`sample`] draws exact block samples by the chain
//! rule on top of the transfer route.

pub mod brute;
pub mod sample;
pub mod transfer;

pub use brute::{log_partition_brute, marginal_brute};
pub use sample::sample_exact;
pub use transfer::{log_partition_transfer, marginal_transfer};

use crate::config::PartialConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{graph_boundary, Region, Vertex};
use crate::system::{Spin, SpinSystem};

/// Limits on exhaustive work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of enumerated assignments (brute force, exact-min sweeps).
    pub enumeration: u64,
    /// Maximum length of a transfer message (frontier states × query assignments).
    pub transfer: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { enumeration: 1 << 26, transfer: 1 << 22 }
    }
}

impl Caps {
    pub(crate) fn check_enumeration(&self, q: usize, n: usize) -> Result<()> {
        let states = (q as f64).powi(n as i32);
        if states > self.enumeration as f64 {
            return Err(Error::CapExceeded { states, cap: self.enumeration });
        }
        Ok(())
    }
}

/// A conditional marginal query: the Gibbs distribution on `free` given
/// `context`, projected onto `query`.
#[derive(Debug, Clone)]
pub struct InferenceProblem<'a> {
    pub system: &'a SpinSystem,
    /// Row-major, duplicate-free.
    pub free: Vec<Vertex>,
    pub context: PartialConfiguration,
    /// Row-major subset of `free`.
    pub query: Vec<Vertex>,
    pub caps: Caps,
}

impl<'a> InferenceProblem<'a> {
    /// Build a problem whose context must cover `∂free`, screening off the
    /// rest of the lattice.
    pub fn new(system: &'a SpinSystem, free: &Region, context: PartialConfiguration, query: &Region) -> Result<Self> {
        let p = Self::with_free_boundary(system, free, context, query)?;
        if let Some(v) = graph_boundary(free).vertices().into_iter().find(|v| !p.context.contains(*v)) {
            return Err(Error::InvalidArgument(format!(
                "context does not cover boundary vertex {v}; use free-boundary semantics explicitly"
            )));
        }
        Ok(p)
    }

    /// Build a problem where unassigned neighbours of `free` contribute no
    /// edge factor.
    pub fn with_free_boundary(system: &'a SpinSystem, free: &Region, context: PartialConfiguration, query: &Region) -> Result<Self> {
        let free_v = free.vertices();
        if let Some(v) = free_v.iter().find(|v| context.contains(**v)) {
            return Err(Error::Overlap(*v));
        }
        for (_, s) in context.iter() {
            system.check_spin(s)?;
        }
        let query_v = query.vertices();
        if let Some(v) = query_v.iter().find(|v| !free.contains(**v)) {
            return Err(Error::InvalidArgument(format!("query vertex {v} is not free")));
        }
        Ok(InferenceProblem { system, free: free_v, context, query: query_v, caps: Caps::default() })
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }
}

/// Distribution over joint assignments of the query vertices.
///
/// Index `Σ_k s_k · q^(n-1-k)`: the first (row-major) query vertex is the
/// most significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMarginal {
    pub query: Vec<Vertex>,
    pub q: usize,
    pub probs: Vec<f64>,
}

impl JointMarginal {
    pub fn index_of(&self, spins: &[Spin]) -> usize {
        spins.iter().fold(0, |acc, &s| acc * self.q + s as usize)
    }

    pub fn prob(&self, spins: &[Spin]) -> f64 {
        self.probs[self.index_of(spins)]
    }

    /// Marginal of the `k`-th query vertex.
    pub fn single(&self, k: usize) -> Vec<f64> {
        let n = self.query.len();
        let stride = self.q.pow((n - 1 - k) as u32);
        let mut out = vec![0.0; self.q];
        for (idx, p) in self.probs.iter().enumerate() {
            out[(idx / stride) % self.q] += p;
        }
        out
    }
}

/// Running log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        LogSum { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    pub(crate) fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    pub(crate) fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Normalise log-weights into probabilities; `None` if all are `-inf`.
pub(crate) fn normalize_logs(logs: &[f64]) -> Option<Vec<f64>> {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return None;
    }
    let w: Vec<f64> = logs.iter().map(|&l| (l - m).exp()).collect();
    let z: f64 = w.iter().sum();
    Some(w.into_iter().map(|x| x / z).collect())
}
