//! Perfect sampling of finite windows of `q`-spin systems on the square
//! lattice.
//!
//! Mesh vertices are sampled by lazy depth-first recursion ([`sampler`]):
//! a vertex decides its spin from lower bounds on its conditional marginal
//! when it can, and otherwise recursively samples the frame of a surrounding
//! square and finishes with the exact conditional. Off-mesh vertices are
//! filled in exactly given their cell's frame. Exact inference on finite
//! regions ([`inference`]) backs every conditional, and [`verify`] holds the
//! oracles used to check the sampler's output law.

pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod inference;
pub mod models;
pub mod rng;
pub mod sampler;
pub mod system;
pub mod verify;

pub use config::PartialConfiguration;
pub use error::{Error, Result};
pub use geometry::{Frame, Rect, Region, Vertex};
pub use sampler::{LazySampler, Strategy};
pub use system::{Spin, SpinSystem};
