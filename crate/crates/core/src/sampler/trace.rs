//! Records of the recursion tree built by lazy calls.

/// One lazy call.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode {
    pub vertex: crate::geometry::Vertex,
    pub parent: Option<usize>,
    pub depth: usize,
    /// `y` landed in some `I_i`, `i >= 1`.
    pub decided_immediately: bool,
    pub spin: Option<crate::system::Spin>,
    /// Recursive calls made (always `unknown_frame` for recursing nodes).
    pub children: usize,
    /// `|Γ_v ∖ Λ|` when the call started.
    pub unknown_frame: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceDetail {
    /// Keep every node.
    #[default]
    Full,
    /// Keep only the running totals.
    Totals,
}

/// The forest of lazy calls made during one sampling run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecursionTrace {
    pub detail: TraceDetail,
    pub nodes: Vec<TraceNode>,
    pub calls: u64,
    pub recursed: u64,
    pub max_depth: usize,
    /// Calls per root call, in the order the roots were made.
    pub root_sizes: Vec<u64>,
}

impl RecursionTrace {
    pub fn new(detail: TraceDetail) -> Self {
        RecursionTrace { detail, ..Default::default() }
    }

    pub(crate) fn open(&mut self, vertex: crate::geometry::Vertex, parent: Option<usize>, depth: usize, unknown_frame: usize) -> usize {
        self.calls += 1;
        self.max_depth = self.max_depth.max(depth);
        if depth == 0 {
            self.root_sizes.push(0);
        }
        if let Some(last) = self.root_sizes.last_mut() {
            *last += 1;
        }
        if let Some(p) = parent {
            if let Some(n) = self.nodes.get_mut(p) {
                n.children += 1;
            }
        }
        if self.detail == TraceDetail::Totals {
            return usize::MAX;
        }
        self.nodes.push(TraceNode { vertex, parent, depth, decided_immediately: false, spin: None, children: 0, unknown_frame });
        self.nodes.len() - 1
    }

    pub(crate) fn close(&mut self, node: usize, spin: crate::system::Spin, immediately: bool) {
        if !immediately {
            self.recursed += 1;
        }
        if let Some(n) = self.nodes.get_mut(node) {
            n.spin = Some(spin);
            n.decided_immediately = immediately;
        }
    }

    /// Fraction of calls that landed in the zone of indecision.
    pub fn indecision_frequency(&self) -> f64 {
        if self.calls == 0 {
            0.0
        } else {
            self.recursed as f64 / self.calls as f64
        }
    }
}
