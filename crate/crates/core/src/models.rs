//! Ferromagnetic Potts and Ising constructors.

use crate::error::{Error, Result};
use crate::system::SpinSystem;

/// `q`-state ferromagnetic Potts model: `b ≡ 1`, `A = e^β` on the diagonal, 1 elsewhere.
pub fn potts(q: usize, beta: f64) -> Result<SpinSystem> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("Potts model needs q >= 2, got {q}")));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("Potts inverse temperature must be finite and >= 0, got {beta}")));
    }
    let diag = beta.exp();
    let a = (0..q).map(|i| (0..q).map(|j| if i == j { diag } else { 1.0 }).collect()).collect();
    SpinSystem::new(vec![1.0; q], a)
}

/// Ising model with field `h` on the second spin: `b = (1, h)`, `A = [[e^β, 1], [1, e^β]]`.
pub fn ising(beta: f64, h: f64) -> Result<SpinSystem> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("Ising inverse temperature must be finite and >= 0, got {beta}")));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidArgument(format!("Ising field must be positive, got {h}")));
    }
    let e = beta.exp();
    SpinSystem::new(vec![1.0, h], vec![vec![e, 1.0], vec![1.0, e]])
}

/// Critical inverse temperature `log(1 + √q)` of the square-lattice Potts model.
pub fn critical_beta(q: usize) -> f64 {
    (1.0 + (q as f64).sqrt()).ln()
}
