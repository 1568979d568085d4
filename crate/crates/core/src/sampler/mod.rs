//! Perfect sampling by lazy depth-first recursion on the `L`-mesh.

pub mod bounds;
pub mod lazy;
pub mod trace;
pub mod window;

pub use bounds::{PVector, SpinLookup, Strategy};
pub use lazy::{frame_order, LazySampler, SamplerState, DEFAULT_BUDGET, DEFAULT_CACHE_LIMIT, RESIDUAL_TOL};
pub use trace::{RecursionTrace, TraceDetail, TraceNode};
pub use window::{lazy_targets, WindowSample};
