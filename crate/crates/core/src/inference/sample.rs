//! Exact block sampling by the chain rule.

use super::transfer::{Site, TransferPlan};
use super::InferenceProblem;
use crate::config::PartialConfiguration;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::rng::{pick, UniformStream};

/// Exact sample of the free region given the context.
///
/// Free vertices are visited in row-major order; each is drawn (one uniform)
/// from its exact conditional given the context and the vertices drawn
/// before it, with the later ones summed out.
pub fn sample_exact(problem: &InferenceProblem<'_>, rng: &mut UniformStream) -> Result<PartialConfiguration> {
    let mut out = PartialConfiguration::new();
    if problem.free.is_empty() {
        return Ok(out);
    }
    let rect = Rect::bounding(problem.free.iter().copied()).expect("nonempty").expand(1);
    let mut values = Vec::new();
    for (k, &v) in problem.free.iter().enumerate() {
        let later = &problem.free[k..];
        let plan = TransferPlan::new(problem.system, rect, problem.caps.transfer, |u| {
            if u == v {
                Site::Free { query: true }
            } else if later.binary_search(&u).is_ok() {
                Site::Free { query: false }
            } else if problem.context.contains(u) || out.contains(u) {
                Site::Pinned
            } else {
                Site::Absent
            }
        })?;
        if values.is_empty() {
            values = plan.blank_values();
            for (u, s) in problem.context.iter() {
                if let Some(i) = plan.index_of(u) {
                    values[i] = s;
                }
            }
        }
        let probs = plan.sweep(&values).probabilities().ok_or(Error::Infeasible)?;
        let s = pick(&probs, rng.uniform()) as u8;
        values[plan.index_of(v).expect("free vertex inside plan")] = s;
        out.set(v, s);
    }
    Ok(out)
}
