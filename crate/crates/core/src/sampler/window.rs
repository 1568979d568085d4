//! Sampling finite windows: mesh vertices lazily, cell interiors exactly.

use std::collections::BTreeSet;

use super::lazy::{LazySampler, SamplerState};
use super::trace::{RecursionTrace, TraceDetail};
use crate::config::PartialConfiguration;
use crate::error::Result;
use crate::geometry::{cell_at, on_mesh, Region, Vertex};
use crate::inference::{sample_exact, InferenceProblem};
use crate::rng::UniformStream;

#[derive(Debug, Clone)]
pub struct WindowSample {
    /// Spins on the window.
    pub config: PartialConfiguration,
    pub trace: RecursionTrace,
    /// Uniforms consumed.
    pub draws: u64,
}

/// Mesh vertices that must be sampled lazily for `window`, row-major: the
/// window's own mesh vertices and the frames of cells meeting the window.
pub fn lazy_targets(window: &Region, mesh: i64) -> (Vec<Vertex>, Vec<Vertex>) {
    let mut targets = BTreeSet::new();
    let mut anchors = BTreeSet::new();
    for v in window.vertices() {
        if on_mesh(v, mesh) {
            targets.insert(v);
        } else {
            let a = Vertex::new(v.x.div_euclid(mesh) * mesh, v.y.div_euclid(mesh) * mesh);
            if anchors.insert(a) {
                targets.extend(cell_at(a, mesh).frame);
            }
        }
    }
    (targets.into_iter().collect(), anchors.into_iter().collect())
}

impl LazySampler {
    /// Perfect sample of the window using stream `stream` of `seed`.
    pub fn sample_window(&mut self, window: &Region, seed: u64, stream: u64, budget: u64, detail: TraceDetail) -> Result<WindowSample> {
        let mut state = SamplerState::new(UniformStream::with_stream(seed, stream), budget, detail);
        let config = self.sample_window_in(&mut state, window)?;
        Ok(WindowSample { config, draws: state.rng.draws(), trace: state.trace })
    }

    /// As [`LazySampler::sample_window`], threading a caller-supplied state
    /// (so budget exhaustion leaves the partial trace readable).
    pub fn sample_window_in(&mut self, state: &mut SamplerState, window: &Region) -> Result<PartialConfiguration> {
        let mesh = self.mesh;
        let (targets, anchors) = lazy_targets(window, mesh);
        for v in targets {
            if !state.known.contains_key(&v) {
                self.lazy(state, v)?;
            }
        }
        let mut cells = PartialConfiguration::new();
        for a in anchors {
            let cell = cell_at(a, mesh);
            let context: PartialConfiguration = cell.frame.iter().map(|&u| (u, state.known[&u])).collect();
            let problem =
                InferenceProblem::new(&self.system, &Region::Rect(cell.interior), context, &Region::empty())?.with_caps(self.caps);
            cells.extend(sample_exact(&problem, &mut state.rng)?.iter());
        }
        Ok(window
            .vertices()
            .into_iter()
            .map(|v| (v, state.known.get(&v).copied().or_else(|| cells.get(v)).expect("window covered")))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::models::potts;
    use crate::sampler::Strategy;

    #[test]
    fn targets_cover_cells_meeting_the_window() {
        let (t, a) = lazy_targets(&Region::Rect(Rect::new(1, 1, 1, 1)), 2);
        assert_eq!(a, vec![Vertex::new(0, 0)]);
        assert_eq!(t.len(), 4);
        let (t, a) = lazy_targets(&Region::Rect(Rect::new(0, 0, 0, 0)), 2);
        assert!(a.is_empty());
        assert_eq!(t, vec![Vertex::new(0, 0)]);
        let (_, a) = lazy_targets(&Region::Rect(Rect::new(0, 0, 4, 4)), 4);
        assert_eq!(a, vec![Vertex::new(0, 0)]);
    }

    #[test]
    fn window_is_fully_assigned_and_reproducible() {
        let mut s = LazySampler::new(potts(2, 0.0).unwrap(), 2, Strategy::ExactMin).unwrap();
        let w = Region::Rect(Rect::new(0, 0, 1, 1));
        let a = s.sample_window(&w, 11, 0, 1000, TraceDetail::Full).unwrap();
        let b = s.sample_window(&w, 11, 0, 1000, TraceDetail::Full).unwrap();
        assert_eq!(a.config.len(), 4);
        assert_eq!(a.config, b.config);
        assert_eq!(a.trace, b.trace);
    }
}
