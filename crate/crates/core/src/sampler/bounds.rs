//! Lower bounds `p_v^i` on the conditional marginal at a mesh vertex, taken
//! over every filling of the unknown part of its frame.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{Frame, Vertex};
use crate::inference::transfer::{Site, TransferPlan};
use crate::inference::Caps;
use crate::system::{Spin, SpinSystem};

/// How the lower bounds are obtained. Any choice with `0 <= p_v^i <= μ_v^{σ⊕τ}(i)`
/// for every feasible frame filling `τ` leaves the output law unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Exhaustive minimum over all feasible fillings.
    ExactMin,
    /// Minimum over the two constant fillings; needs a monotone-eligible system.
    MonotoneExtremes,
    /// `p ≡ 0`: every call recurses.
    Trivial,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::ExactMin => "exact-min",
            Strategy::MonotoneExtremes => "monotone",
            Strategy::Trivial => "trivial",
        }
    }

    pub fn parse(s: &str) -> Option<Strategy> {
        match s {
            "exact-min" | "exact" => Some(Strategy::ExactMin),
            "monotone" | "monotone-extremes" => Some(Strategy::MonotoneExtremes),
            "trivial" => Some(Strategy::Trivial),
            _ => None,
        }
    }
}

/// Lower bounds `p^1..p^q` and the indecision mass `p^0 = 1 - Σ p^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PVector {
    pub lower: Vec<f64>,
    pub indecision: f64,
}

impl PVector {
    pub fn new(lower: Vec<f64>) -> Self {
        let indecision = 1.0 - lower.iter().sum::<f64>();
        PVector { lower, indecision }
    }

    pub fn zeros(q: usize) -> Self {
        PVector::new(vec![0.0; q])
    }

    pub fn decided_mass(&self) -> f64 {
        self.lower.iter().sum()
    }

    /// `I_1..I_q` followed by `I_0`, as `(start, end)` pairs; `I_i` is
    /// half-open, `I_0 = [1 - p^0, 1]` is closed.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.lower.len() + 1);
        let mut acc = 0.0;
        for &p in &self.lower {
            out.push((acc, acc + p));
            acc += p;
        }
        out.push((1.0 - self.indecision, 1.0));
        out
    }

    /// Spin whose interval `I_i` contains `y`, or `None` for the zone of indecision.
    pub fn decide(&self, y: f64) -> Option<Spin> {
        let mut acc = 0.0;
        for (i, &p) in self.lower.iter().enumerate() {
            acc += p;
            if y < acc {
                return Some(i as Spin);
            }
        }
        None
    }
}

/// Read access to a set of known spins.
pub trait SpinLookup {
    fn spin_at(&self, v: Vertex) -> Option<Spin>;
}

impl SpinLookup for HashMap<Vertex, Spin> {
    fn spin_at(&self, v: Vertex) -> Option<Spin> {
        self.get(&v).copied()
    }
}

impl SpinLookup for crate::config::PartialConfiguration {
    fn spin_at(&self, v: Vertex) -> Option<Spin> {
        self.get(v)
    }
}

/// The known spins of a closed `2L`-square relative to its anchor, plus the
/// position of the queried vertex. Translation invariant, so it keys caches.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct LocalPattern {
    /// Row-major over the closed square: 0 = unknown, `s + 1` = spin `s`.
    codes: Vec<u8>,
    target: u16,
}

impl LocalPattern {
    pub fn capture(frame: &Frame, v: Vertex, known: &impl SpinLookup) -> Self {
        let sq = frame.closed_square();
        let codes = sq
            .iter()
            .map(|u| if frame.contains(u) || frame.interior().contains(u) { known.spin_at(u).map_or(0, |s| s + 1) } else { 0 })
            .collect();
        let side = sq.width();
        let target = ((v.y - sq.y0) as usize * side + (v.x - sq.x0) as usize) as u16;
        LocalPattern { codes, target }
    }

    pub fn unknown_frame(&self, frame: &Frame) -> usize {
        let sq = frame.closed_square();
        sq.iter().zip(&self.codes).filter(|(u, c)| **c == 0 && frame.contains(*u)).count()
    }
}

/// Build the sweep over the closed square: target tagged, unknown interior
/// summed, known sites pinned, unknown frame sites pinned and marked for
/// branching.
fn local_plan<'s>(
    system: &'s SpinSystem,
    frame: &Frame,
    pattern: &LocalPattern,
    caps: &Caps,
) -> Result<(TransferPlan<'s>, Vec<Spin>, Vec<bool>)> {
    let sq = frame.closed_square();
    let interior = frame.interior();
    let side = sq.width();
    let code_at = |u: Vertex| pattern.codes[(u.y - sq.y0) as usize * side + (u.x - sq.x0) as usize];
    let target = Vertex::new(sq.x0 + (pattern.target as usize % side) as i64, sq.y0 + (pattern.target as usize / side) as i64);
    let plan = TransferPlan::new(system, sq, caps.transfer, |u| {
        if u == target {
            Site::Free { query: true }
        } else if interior.contains(u) {
            if code_at(u) == 0 {
                Site::Free { query: false }
            } else {
                Site::Pinned
            }
        } else if frame.contains(u) {
            Site::Pinned
        } else {
            Site::Absent
        }
    })?;
    let mut values = plan.blank_values();
    let mut branch = vec![false; plan.len()];
    for u in sq.iter() {
        let i = plan.index_of(u).expect("inside square");
        let c = code_at(u);
        if c > 0 {
            values[i] = c - 1;
        } else if frame.contains(u) {
            branch[i] = true;
        }
    }
    Ok((plan, values, branch))
}

/// Exact conditional marginal at the target given a pattern whose frame is
/// fully known.
pub(crate) fn local_marginal(system: &SpinSystem, frame: &Frame, pattern: &LocalPattern, caps: &Caps) -> Result<Vec<f64>> {
    let (plan, values, branch) = local_plan(system, frame, pattern, caps)?;
    debug_assert!(branch.iter().all(|b| !b), "frame must be complete");
    plan.sweep(&values).probabilities().ok_or(Error::Infeasible)
}

pub(crate) fn compute_bounds(
    system: &SpinSystem,
    frame: &Frame,
    pattern: &LocalPattern,
    strategy: Strategy,
    caps: &Caps,
) -> Result<PVector> {
    let q = system.q();
    match strategy {
        Strategy::Trivial => Ok(PVector::zeros(q)),
        Strategy::ExactMin => {
            caps.check_enumeration(q, pattern.unknown_frame(frame))?;
            let (plan, mut values, branch) = local_plan(system, frame, pattern, caps)?;
            let mut mins = vec![f64::INFINITY; q];
            let mut feasible = false;
            plan.for_each_branch(&mut values, &branch, |_, w| {
                let total: f64 = w.iter().sum();
                if total > 0.0 {
                    feasible = true;
                    for (m, x) in mins.iter_mut().zip(w) {
                        *m = m.min(x / total);
                    }
                }
            });
            if !feasible {
                return Err(Error::Infeasible);
            }
            Ok(PVector::new(mins))
        }
        Strategy::MonotoneExtremes => {
            if !system.monotone_eligible() {
                return Err(Error::StrategyNotSupported(strategy.name()));
            }
            let (plan, mut values, branch) = local_plan(system, frame, pattern, caps)?;
            let mut mins = vec![f64::INFINITY; q];
            let mut feasible = false;
            for fill in 0..q as Spin {
                for (i, b) in branch.iter().enumerate() {
                    if *b {
                        values[i] = fill;
                    }
                }
                if let Some(p) = plan.sweep(&values).probabilities() {
                    feasible = true;
                    for (m, x) in mins.iter_mut().zip(p) {
                        *m = m.min(x);
                    }
                }
            }
            if !feasible {
                return Err(Error::Infeasible);
            }
            Ok(PVector::new(mins))
        }
    }
}
