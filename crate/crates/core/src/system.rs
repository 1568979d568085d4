//! Spin systems `(q, b, A)` on the square lattice and their Gibbs weights.

use crate::config::PartialConfiguration;
use crate::error::{Error, Result};

/// Spin index in `0..q`. Text formats print spins 1-based.
pub type Spin = u8;

/// Largest supported number of spin values.
pub const MAX_SPINS: usize = 64;

/// A validated `q`-spin system: field `b` and symmetric interaction matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    q: usize,
    field: Vec<f64>,
    interaction: Vec<f64>,
    log_field: Vec<f64>,
    log_interaction: Vec<f64>,
    soft_row: Option<usize>,
    strictly_positive: bool,
    monotone_eligible: bool,
}

impl SpinSystem {
    /// Validate `b` (length `q`) and `A` (`q` rows of length `q`).
    pub fn new(field: Vec<f64>, interaction: Vec<Vec<f64>>) -> Result<Self> {
        let q = field.len();
        if !(2..=MAX_SPINS).contains(&q) {
            return Err(Error::InvalidSystem(format!("q must be in 2..={MAX_SPINS}, got {q}")));
        }
        if interaction.len() != q || interaction.iter().any(|r| r.len() != q) {
            return Err(Error::InvalidSystem(format!("interaction matrix must be {q}x{q}")));
        }
        if field.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidSystem("field entries must be finite and >= 0".into()));
        }
        if field.iter().all(|&b| b == 0.0) {
            return Err(Error::InvalidSystem("field is identically zero".into()));
        }
        for (i, row) in interaction.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidSystem(format!("interaction entry A[{i}][{j}] = {a} must be finite and >= 0")));
                }
                if a != interaction[j][i] {
                    return Err(Error::InvalidSystem(format!("interaction matrix is not symmetric at ({i}, {j})")));
                }
            }
        }

        let flat: Vec<f64> = interaction.iter().flatten().copied().collect();
        let soft_row = (0..q).find(|&i| flat[i * q..(i + 1) * q].iter().all(|&a| a > 0.0));
        let strictly_positive = flat.iter().all(|&a| a > 0.0);
        // q = 2 ferromagnet: log-supermodular interaction with positive coupling.
        let monotone_eligible = q == 2 && flat[1] > 0.0 && flat[0] * flat[3] >= flat[1] * flat[2];

        Ok(SpinSystem {
            q,
            log_field: field.iter().map(|b| b.ln()).collect(),
            log_interaction: flat.iter().map(|a| a.ln()).collect(),
            field,
            interaction: flat,
            soft_row,
            strictly_positive,
            monotone_eligible,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn field(&self, s: Spin) -> f64 {
        self.field[s as usize]
    }

    pub fn interaction(&self, s: Spin, t: Spin) -> f64 {
        self.interaction[s as usize * self.q + t as usize]
    }

    pub fn log_field(&self, s: Spin) -> f64 {
        self.log_field[s as usize]
    }

    pub fn log_interaction(&self, s: Spin, t: Spin) -> f64 {
        self.log_interaction[s as usize * self.q + t as usize]
    }

    pub fn fields(&self) -> &[f64] {
        &self.field
    }

    /// Row-major `q × q` interaction matrix.
    pub fn interactions(&self) -> &[f64] {
        &self.interaction
    }

    /// Smallest row index whose entries are all positive.
    pub fn soft_row(&self) -> Option<usize> {
        self.soft_row
    }

    /// The soft-matrix constant realised by the witness row.
    pub fn soft_constant(&self) -> Option<f64> {
        self.soft_row.map(|i| self.interaction[i * self.q..(i + 1) * self.q].iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub fn strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    pub fn monotone_eligible(&self) -> bool {
        self.monotone_eligible
    }

    pub fn check_spin(&self, s: Spin) -> Result<()> {
        if (s as usize) < self.q {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("spin {s} out of range for q = {}", self.q)))
        }
    }

    /// Log Gibbs weight of `interior` with `context` held fixed.
    ///
    /// Charges `log b` for every interior vertex and `log A` once per lattice
    /// edge with at least one interior endpoint and the other endpoint
    /// assigned in either configuration. Returns `-inf` when a factor is zero.
    pub fn log_weight(&self, interior: &PartialConfiguration, context: &PartialConfiguration) -> Result<f64> {
        if let Some(v) = interior.vertices().find(|v| context.contains(*v)) {
            return Err(Error::Overlap(v));
        }
        let mut total = 0.0;
        for (v, s) in interior.iter() {
            total += self.log_field(s);
            for u in v.neighbors() {
                if let Some(t) = interior.get(u) {
                    // count interior-interior edges once, from the smaller endpoint
                    if v < u {
                        total += self.log_interaction(s, t);
                    }
                } else if let Some(t) = context.get(u) {
                    total += self.log_interaction(s, t);
                }
            }
        }
        Ok(total)
    }
}
