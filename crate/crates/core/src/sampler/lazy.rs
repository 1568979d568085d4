//! Lazy depth-first sampling of mesh vertices.
//!
//! A call on `v` draws one uniform `y`. If `y` falls below `Σ p_v^i` the spin
//! is read off the lower-bound intervals. Otherwise every unknown frame vertex
//! is sampled in order by a nested call, the exact conditional marginal at `v`
//! given the completed frame is computed, and `y` is located among the
//! residual intervals `ρ_v^i = μ_v^{σ'}(i) - p_v^i` stacked on `[Σ p, 1]`.
//! The frame spins drawn for this purpose are discarded afterwards: a call
//! adds exactly one spin to the state.
//!
//! Recursion is run on an explicit stack so that deep (supercritical) trees
//! hit the call budget rather than the thread stack.

use std::collections::HashMap;

use super::bounds::{compute_bounds, local_marginal, LocalPattern, PVector, SpinLookup, Strategy};
use super::trace::{RecursionTrace, TraceDetail};
use crate::config::PartialConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{frame_of, Frame, Vertex};
use crate::inference::Caps;
use crate::rng::UniformStream;
use crate::system::{Spin, SpinSystem};

/// Tolerance for negative residuals and for `y` landing past the last interval.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Default total-call allowance per sampling run.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// The growing known configuration of one sampling run.
#[derive(Debug, Clone)]
pub struct SamplerState {
    pub known: HashMap<Vertex, Spin>,
    pub trace: RecursionTrace,
    pub rng: UniformStream,
    /// Remaining lazy calls.
    pub budget: u64,
    journal: Vec<Vertex>,
}

impl SamplerState {
    pub fn new(rng: UniformStream, budget: u64, detail: TraceDetail) -> Self {
        SamplerState { known: HashMap::new(), trace: RecursionTrace::new(detail), rng, budget, journal: Vec::new() }
    }

    /// Seed the state with already-known spins (all on the mesh).
    pub fn with_known(mut self, known: &PartialConfiguration) -> Self {
        self.known.extend(known.iter());
        self
    }

    pub fn known_configuration(&self) -> PartialConfiguration {
        self.known.iter().map(|(v, s)| (*v, *s)).collect()
    }

    fn push(&mut self, v: Vertex, s: Spin) {
        self.known.insert(v, s);
        self.journal.push(v);
    }

    fn rewind(&mut self, mark: usize) {
        for v in self.journal.drain(mark..) {
            self.known.remove(&v);
        }
    }
}

/// Unknown frame vertices in the frame's canonical order.
pub fn frame_order(frame: &Frame, known: &impl SpinLookup) -> Vec<Vertex> {
    frame.vertices.iter().copied().filter(|&u| known.spin_at(u).is_none()).collect()
}

/// Lower bounds and conditional marginals with per-pattern memoisation.
#[derive(Debug, Clone)]
pub struct LazySampler {
    pub(crate) system: SpinSystem,
    pub(crate) mesh: i64,
    pub(crate) strategy: Strategy,
    pub(crate) caps: Caps,
    cache_limit: usize,
    bounds: HashMap<LocalPattern, PVector>,
    marginals: HashMap<LocalPattern, Vec<f64>>,
}

/// Default number of patterns kept per cache before it is flushed.
pub const DEFAULT_CACHE_LIMIT: usize = 1 << 18;

/// Pending call on the explicit stack.
struct Pending {
    v: Vertex,
    p: PVector,
    y: f64,
    frame: Frame,
    order: Vec<Vertex>,
    next: usize,
    node: usize,
    mark: usize,
}

enum Entered {
    Decided(Spin),
    Recurse(Pending),
}

impl LazySampler {
    pub fn new(system: SpinSystem, mesh: i64, strategy: Strategy) -> Result<Self> {
        if mesh < 1 {
            return Err(Error::InvalidArgument(format!("mesh parameter must be >= 1, got {mesh}")));
        }
        if strategy == Strategy::MonotoneExtremes && !system.monotone_eligible() {
            return Err(Error::StrategyNotSupported(strategy.name()));
        }
        Ok(LazySampler {
            system,
            mesh,
            strategy,
            caps: Caps::default(),
            cache_limit: DEFAULT_CACHE_LIMIT,
            bounds: HashMap::new(),
            marginals: HashMap::new(),
        })
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    /// Flush each memo table once it holds `limit` patterns (0 disables memoisation).
    pub fn with_cache_limit(mut self, limit: usize) -> Self {
        self.cache_limit = limit;
        self
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn mesh(&self) -> i64 {
        self.mesh
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Number of memoised lower-bound patterns.
    pub fn cached_patterns(&self) -> usize {
        self.bounds.len()
    }

    /// `p_v` given the known spins inside the closed square of `Γ_v`.
    pub fn lower_bounds(&mut self, v: Vertex, known: &impl SpinLookup) -> Result<PVector> {
        let frame = frame_of(v, self.mesh)?;
        if known.spin_at(v).is_some() {
            return Err(Error::InvalidArgument(format!("vertex {v} is already known")));
        }
        self.bounds_in(&frame, v, known)
    }

    fn bounds_in(&mut self, frame: &Frame, v: Vertex, known: &impl SpinLookup) -> Result<PVector> {
        let pattern = LocalPattern::capture(frame, v, known);
        if let Some(p) = self.bounds.get(&pattern) {
            return Ok(p.clone());
        }
        let p = compute_bounds(&self.system, frame, &pattern, self.strategy, &self.caps)?;
        if self.bounds.len() >= self.cache_limit {
            self.bounds.clear();
        }
        if self.cache_limit > 0 {
            self.bounds.insert(pattern, p.clone());
        }
        Ok(p)
    }

    /// Exact `μ_v` given a completely known frame and the known interior spins.
    pub fn conditional_marginal(&mut self, v: Vertex, known: &impl SpinLookup) -> Result<Vec<f64>> {
        let frame = frame_of(v, self.mesh)?;
        if let Some(u) = frame.vertices.iter().find(|&&u| known.spin_at(u).is_none()) {
            return Err(Error::InvalidArgument(format!("frame vertex {u} is unknown")));
        }
        self.marginal_in(&frame, v, known)
    }

    fn marginal_in(&mut self, frame: &Frame, v: Vertex, known: &impl SpinLookup) -> Result<Vec<f64>> {
        let pattern = LocalPattern::capture(frame, v, known);
        if let Some(m) = self.marginals.get(&pattern) {
            return Ok(m.clone());
        }
        let m = local_marginal(&self.system, frame, &pattern, &self.caps)?;
        if self.marginals.len() >= self.cache_limit {
            self.marginals.clear();
        }
        if self.cache_limit > 0 {
            self.marginals.insert(pattern, m.clone());
        }
        Ok(m)
    }

    /// Sample the spin at the unknown mesh vertex `v` and add it to the state.
    pub fn lazy(&mut self, state: &mut SamplerState, v: Vertex) -> Result<Spin> {
        self.check_target(state, v)?;
        self.run(state, v, None)
    }

    /// Finish a call whose draw `y` fell in the zone of indecision of `p`:
    /// sample the unknown frame, then place `y` among the residual intervals.
    pub fn bd_calc(&mut self, state: &mut SamplerState, v: Vertex, p: &PVector, y: f64) -> Result<Spin> {
        self.check_target(state, v)?;
        if p.lower.len() != self.system.q() {
            return Err(Error::InvalidArgument("lower-bound vector has the wrong length".into()));
        }
        if y < p.decided_mass() || y > 1.0 {
            return Err(Error::InvalidArgument(format!("y = {y} is not in the zone of indecision")));
        }
        self.run(state, v, Some((p.clone(), y)))
    }

    fn check_target(&self, state: &SamplerState, v: Vertex) -> Result<()> {
        if !crate::geometry::on_mesh(v, self.mesh) {
            return Err(Error::OffMesh(v, self.mesh));
        }
        if state.known.contains_key(&v) {
            return Err(Error::InvalidArgument(format!("vertex {v} is already known")));
        }
        Ok(())
    }

    fn abort(state: &mut SamplerState, root_mark: usize) -> Error {
        state.rewind(root_mark);
        Error::BudgetExhausted { calls: state.trace.calls, max_depth: state.trace.max_depth }
    }

    /// Open a call on `v`: charge the budget, compute `p_v`, draw `y`.
    fn enter(
        &mut self,
        state: &mut SamplerState,
        v: Vertex,
        parent: Option<usize>,
        depth: usize,
        preset: Option<(PVector, f64)>,
    ) -> Result<Entered> {
        if state.budget == 0 {
            return Err(Error::BudgetExhausted { calls: 0, max_depth: 0 });
        }
        state.budget -= 1;
        let frame = frame_of(v, self.mesh)?;
        let order = frame_order(&frame, &state.known);
        let node = state.trace.open(v, parent, depth, order.len());
        let (p, y) = match preset {
            Some(py) => py,
            None => {
                let p = self.bounds_in(&frame, v, &state.known)?;
                let y = state.rng.uniform();
                if let Some(s) = p.decide(y) {
                    state.trace.close(node, s, true);
                    return Ok(Entered::Decided(s));
                }
                (p, y)
            }
        };
        let mark = state.journal.len();
        Ok(Entered::Recurse(Pending { v, p, y, frame, order, next: 0, node, mark }))
    }

    /// Place `y` among the residual intervals once the frame is complete.
    fn finish(&mut self, state: &SamplerState, call: &Pending) -> Result<Spin> {
        let mu = self.marginal_in(&call.frame, call.v, &state.known)?;
        let mut residual = Vec::with_capacity(mu.len());
        for (i, (m, p)) in mu.iter().zip(&call.p.lower).enumerate() {
            let r = m - p;
            if r < -RESIDUAL_TOL {
                return Err(Error::NegativeResidual { spin: i, value: r });
            }
            residual.push(r.max(0.0));
        }
        let mut acc = call.p.decided_mass();
        for (i, r) in residual.iter().enumerate() {
            acc += r;
            if call.y < acc {
                return Ok(i as Spin);
            }
        }
        if call.y <= acc + RESIDUAL_TOL {
            let last = residual.iter().rposition(|&r| r > 0.0).unwrap_or(residual.len() - 1);
            return Ok(last as Spin);
        }
        Err(Error::IntervalMiss(call.y))
    }

    fn run(&mut self, state: &mut SamplerState, root: Vertex, preset: Option<(PVector, f64)>) -> Result<Spin> {
        let root_mark = state.journal.len();
        let mut stack: Vec<Pending> = Vec::new();
        let mut result = match self.enter(state, root, None, 0, preset) {
            Ok(Entered::Decided(s)) => Some(s),
            Ok(Entered::Recurse(p)) => {
                stack.push(p);
                None
            }
            Err(Error::BudgetExhausted { .. }) => return Err(Self::abort(state, root_mark)),
            Err(e) => return Err(e),
        };

        while let Some(top) = stack.last_mut() {
            if top.next < top.order.len() {
                let w = top.order[top.next];
                top.next += 1;
                let (node, depth) = (top.node, stack.len());
                match self.enter(state, w, Some(node), depth, None) {
                    Ok(Entered::Decided(s)) => state.push(w, s),
                    Ok(Entered::Recurse(p)) => stack.push(p),
                    Err(Error::BudgetExhausted { .. }) => return Err(Self::abort(state, root_mark)),
                    Err(e) => {
                        state.rewind(root_mark);
                        return Err(e);
                    }
                }
                continue;
            }
            let call = stack.pop().expect("nonempty");
            let spin = match self.finish(state, &call) {
                Ok(s) => s,
                Err(e) => {
                    state.rewind(root_mark);
                    return Err(e);
                }
            };
            state.rewind(call.mark);
            state.trace.close(call.node, spin, false);
            if stack.is_empty() {
                result = Some(spin);
            } else {
                state.push(call.v, spin);
            }
        }

        let spin = result.expect("root call resolved");
        // root spin persists: bypass the journal
        state.known.insert(root, spin);
        Ok(spin)
    }
}
