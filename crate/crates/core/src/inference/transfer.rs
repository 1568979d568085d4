//! Row-major frontier transfer over a rectangle.
//!
//! Sites of the rectangle are processed one at a time in row-major order.
//! The message is indexed by `(tag, frontier)`: the frontier holds the spins
//! of the last `width` processed sites (the oldest is the most significant
//! digit, the newest the least), the tag holds the spins of query sites that
//! have already left the frontier. Pinned sites occupy a single frontier
//! state, so fixed cells inside the rectangle shrink the state space.
//!
//! The same plan drives exhaustive minimisation over a subset of pinned sites
//! ([`TransferPlan::for_each_branch`]): those sites are branched on as the sweep
//! reaches them, sharing all work done before the branch point.

use super::{InferenceProblem, JointMarginal};
use crate::error::{Error, Result};
use crate::geometry::{Rect, Vertex};
use crate::system::{Spin, SpinSystem};

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Site {
    /// Outside the model: no spin, no factors.
    Absent,
    /// Spin supplied by the caller's value slice.
    Pinned,
    /// Summed over (or tagged, for query sites).
    Free { query: bool },
}

impl Site {
    fn radix(self, q: usize) -> usize {
        match self {
            Site::Free { .. } => q,
            _ => 1,
        }
    }
}

/// Result of a full sweep.
#[derive(Debug, Clone)]
pub(crate) struct Sweep {
    /// Unnormalised weights per query assignment, scaled by `exp(-log_scale)`.
    pub weights: Vec<f64>,
    pub log_scale: f64,
}

impl Sweep {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn log_partition(&self) -> f64 {
        let t = self.total();
        if t > 0.0 {
            t.ln() + self.log_scale
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn probabilities(&self) -> Option<Vec<f64>> {
        let t = self.total();
        (t > 0.0).then(|| self.weights.iter().map(|w| w / t).collect())
    }
}

/// A compiled sweep over a rectangle.
///
/// Site indices: `width` leading padding sites, the rectangle in row-major
/// order, then `width` trailing padding sites that flush the frontier.
#[derive(Debug, Clone)]
pub(crate) struct TransferPlan<'s> {
    system: &'s SpinSystem,
    rect: Rect,
    width: usize,
    sites: Vec<Site>,
    frontier_in: Vec<usize>,
    tags_in: Vec<usize>,
    max_len: usize,
}

impl<'s> TransferPlan<'s> {
    /// `kind(v)` classifies every vertex of `rect`.
    pub fn new(system: &'s SpinSystem, rect: Rect, cap: u64, mut kind: impl FnMut(Vertex) -> Site) -> Result<Self> {
        let q = system.q();
        let width = rect.width().max(1);
        let mut sites = vec![Site::Absent; width];
        sites.extend(rect.iter().map(&mut kind));
        sites.extend(std::iter::repeat_n(Site::Absent, width));

        let n = sites.len();
        let mut frontier_in = vec![1usize; n + 1];
        let mut tags_in = vec![1usize; n + 1];
        let mut max_len = 1f64;
        let (mut f, mut t) = (1f64, 1f64);
        for i in width..n {
            frontier_in[i] = f as usize;
            tags_in[i] = t as usize;
            let old = sites[i - width];
            f = f / old.radix(q) as f64 * sites[i].radix(q) as f64;
            if old == (Site::Free { query: true }) {
                t *= q as f64;
            }
            max_len = max_len.max(f * t);
            if max_len > cap as f64 {
                return Err(Error::CapExceeded { states: max_len, cap });
            }
        }
        frontier_in[n] = f as usize;
        tags_in[n] = t as usize;
        Ok(TransferPlan { system, rect, width, sites, frontier_in, tags_in, max_len: max_len as usize })
    }

    /// Site index of a vertex inside the rectangle.
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.rect.contains(v).then(|| self.width + (v.y - self.rect.y0) as usize * self.rect.width() + (v.x - self.rect.x0) as usize)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    /// A value slice sized for this plan (all zeros).
    pub fn blank_values(&self) -> Vec<Spin> {
        vec![0; self.sites.len()]
    }

    fn column(&self, i: usize) -> usize {
        i % self.width
    }

    /// Process site `i`: fold it into the frontier and retire site `i - width`.
    fn step(&self, i: usize, input: &[f64], out: &mut Vec<f64>, values: &[Spin]) {
        let sys = self.system;
        let q = sys.q();
        let w = self.width;
        let new = self.sites[i];
        let old_i = i - w;
        let old = self.sites[old_i];
        let r_new = new.radix(q);
        let r_old = old.radix(q);
        let f_in = self.frontier_in[i];
        let rest = f_in / r_old;
        let f_out = rest * r_new;
        let t_in = self.tags_in[i];
        let old_query = old == Site::Free { query: true };
        let t_out = if old_query { t_in * q } else { t_in };

        let left_i = (self.column(i) > 0 && w > 1).then_some(i - 1).filter(|&j| self.sites[j] != Site::Absent);
        let r_left = left_i.map_or(1, |j| self.sites[j].radix(q));
        let below = (old != Site::Absent).then_some(old_i);

        // factor[(s * r_old + d_old) * r_left + d_left]
        let mut factor = vec![1.0; r_new * r_old * r_left];
        if new != Site::Absent {
            let new_free = matches!(new, Site::Free { .. });
            let spin_of = |site: usize, digit: usize| -> Spin {
                match self.sites[site] {
                    Site::Free { .. } => digit as Spin,
                    _ => values[site],
                }
            };
            for s in 0..r_new {
                let sv = if new_free { s as Spin } else { values[i] };
                let base = if new_free { sys.field(sv) } else { 1.0 };
                for d_o in 0..r_old {
                    let mut f_b = base;
                    if let Some(b) = below {
                        if new_free || matches!(self.sites[b], Site::Free { .. }) {
                            f_b *= sys.interaction(sv, spin_of(b, d_o));
                        }
                    }
                    for d_l in 0..r_left {
                        let mut f = f_b;
                        if let Some(l) = left_i {
                            if new_free || matches!(self.sites[l], Site::Free { .. }) {
                                f *= sys.interaction(sv, spin_of(l, d_l));
                            }
                        }
                        factor[(s * r_old + d_o) * r_left + d_l] = f;
                    }
                }
            }
        }

        out.clear();
        out.resize(t_out * f_out, 0.0);
        for tag in 0..t_in {
            let row = &input[tag * f_in..(tag + 1) * f_in];
            for (f, &m) in row.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let d_old = f / rest;
                let rr = f % rest;
                let d_left = rr % r_left;
                let tag_out = if old_query { tag * q + d_old } else { tag };
                let base = tag_out * f_out + rr * r_new;
                for s in 0..r_new {
                    out[base + s] += m * factor[(s * r_old + d_old) * r_left + d_left];
                }
            }
        }
    }

    /// Rescale `msg` into a safe range; returns the log of the divisor applied.
    fn rescale(msg: &mut [f64]) -> f64 {
        let m = msg.iter().copied().fold(0.0, f64::max);
        if m > RESCALE_HIGH || (m > 0.0 && m < RESCALE_LOW) {
            let inv = 1.0 / m;
            msg.iter_mut().for_each(|x| *x *= inv);
            m.ln()
        } else {
            0.0
        }
    }

    /// Full sweep with every pinned site taken from `values`.
    pub fn sweep(&self, values: &[Spin]) -> Sweep {
        let mut a = Vec::with_capacity(self.max_len);
        let mut b = Vec::with_capacity(self.max_len);
        a.push(1.0);
        let mut log_scale = 0.0;
        for i in self.width..self.sites.len() {
            self.step(i, &a, &mut b, values);
            log_scale += Self::rescale(&mut b);
            std::mem::swap(&mut a, &mut b);
        }
        Sweep { weights: a, log_scale }
    }

    /// Enumerate every assignment of the `branch` sites (pinned sites whose
    /// value is overwritten during the search) and call `leaf` with the query
    /// weights of each. A prefix with no feasible completion is reported once,
    /// with empty weights, instead of once per completion.
    ///
    /// Assignments are visited in row-major odometer order.
    pub fn for_each_branch(&self, values: &mut [Spin], branch: &[bool], mut leaf: impl FnMut(&[Spin], &[f64])) {
        let n = self.sites.len();
        let mut bufs: Vec<Vec<f64>> = (0..=n).map(|_| Vec::with_capacity(self.max_len)).collect();
        bufs[self.width].push(1.0);
        self.branch_from(self.width, &mut bufs, values, branch, &mut leaf);
    }

    fn branch_from(&self, i: usize, bufs: &mut [Vec<f64>], values: &mut [Spin], branch: &[bool], leaf: &mut impl FnMut(&[Spin], &[f64])) {
        if i == self.sites.len() {
            leaf(values, &bufs[i]);
            return;
        }
        let choices = if branch[i] { self.system.q() } else { 1 };
        for c in 0..choices {
            if branch[i] {
                values[i] = c as Spin;
            }
            {
                let (head, tail) = bufs.split_at_mut(i + 1);
                self.step(i, &head[i], &mut tail[0], values);
                Self::rescale(&mut tail[0]);
                if tail[0].iter().all(|&x| x == 0.0) {
                    // every completion of this prefix is infeasible
                    leaf(values, &[]);
                    continue;
                }
            }
            self.branch_from(i + 1, bufs, values, branch, leaf);
        }
    }
}

/// Build the plan for an inference problem: the bounding rectangle of the
/// free region grown by one, so every neighbour of a free vertex is a site.
fn plan_for<'s>(problem: &InferenceProblem<'s>) -> Result<(TransferPlan<'s>, Vec<Spin>)> {
    let rect = Rect::bounding(problem.free.iter().copied()).expect("nonempty free region").expand(1);
    let free: std::collections::BTreeSet<Vertex> = problem.free.iter().copied().collect();
    let query: std::collections::BTreeSet<Vertex> = problem.query.iter().copied().collect();
    let plan = TransferPlan::new(problem.system, rect, problem.caps.transfer, |v| {
        if free.contains(&v) {
            Site::Free { query: query.contains(&v) }
        } else if problem.context.contains(v) {
            Site::Pinned
        } else {
            Site::Absent
        }
    })?;
    let mut values = plan.blank_values();
    for (v, s) in problem.context.iter() {
        if let Some(i) = plan.index_of(v) {
            values[i] = s;
        }
    }
    Ok((plan, values))
}

/// `log Z` of the free region given its context, by transfer.
pub fn log_partition_transfer(problem: &InferenceProblem<'_>) -> Result<f64> {
    if problem.free.is_empty() {
        return Ok(0.0);
    }
    let (plan, values) = plan_for(problem)?;
    Ok(plan.sweep(&values).log_partition())
}

/// Conditional distribution of the query vertices, by transfer.
pub fn marginal_transfer(problem: &InferenceProblem<'_>) -> Result<JointMarginal> {
    let q = problem.system.q();
    if problem.free.is_empty() {
        return Ok(JointMarginal { query: Vec::new(), q, probs: vec![1.0] });
    }
    let (plan, values) = plan_for(problem)?;
    let probs = plan.sweep(&values).probabilities().ok_or(Error::Infeasible)?;
    Ok(JointMarginal { query: problem.query.clone(), q, probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PartialConfiguration;
    use crate::geometry::{graph_boundary, Region};
    use crate::inference::{log_partition_brute, marginal_brute};
    use crate::models::{ising, potts};

    fn v(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y)
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn empty_region() {
        let s = potts(2, 0.5).unwrap();
        let p = InferenceProblem::with_free_boundary(&s, &Region::empty(), PartialConfiguration::new(), &Region::empty()).unwrap();
        let m = marginal_transfer(&p).unwrap();
        assert_eq!(m.probs, vec![1.0]);
        assert!(m.query.is_empty());
    }

    #[test]
    fn matches_brute_on_boundary_conditioned_square() {
        let s = ising(0.5, 1.0).unwrap();
        let free = Region::Rect(Rect::new(1, 1, 3, 3));
        let ctx: PartialConfiguration = graph_boundary(&free).vertices().into_iter().map(|u| (u, 0)).collect();
        let centre: Region = [v(2, 2)].into_iter().collect();
        let p = InferenceProblem::new(&s, &free, ctx, &centre).unwrap();
        assert_close(&marginal_transfer(&p).unwrap().probs, &marginal_brute(&p).unwrap().probs, 1e-12);
        let lz_t = log_partition_transfer(&p).unwrap();
        let lz_b = log_partition_brute(&p).unwrap();
        assert!((lz_t - lz_b).abs() < 1e-10);
    }

    #[test]
    fn fixed_cells_inside_the_rectangle() {
        let s = potts(3, 0.8).unwrap();
        let rect = Rect::new(0, 0, 3, 3);
        let pinned = v(1, 2);
        let free: Region = rect.iter().filter(|&u| u != pinned).collect();
        let mut ctx: PartialConfiguration =
            graph_boundary(&Region::Rect(rect)).vertices().into_iter().enumerate().map(|(k, u)| (u, (k % 3) as Spin)).collect();
        ctx.set(pinned, 2);
        let query: Region = [v(0, 0), v(2, 2)].into_iter().collect();
        let p = InferenceProblem::new(&s, &free, ctx, &query).unwrap();
        assert_close(&marginal_transfer(&p).unwrap().probs, &marginal_brute(&p).unwrap().probs, 1e-12);
    }

    #[test]
    fn rescaling_keeps_large_boxes_finite() {
        let s = potts(2, 3.0).unwrap();
        let free = Region::Rect(Rect::new(0, 0, 11, 11));
        let ctx: PartialConfiguration = graph_boundary(&free).vertices().into_iter().map(|u| (u, 0)).collect();
        let p = InferenceProblem::new(&s, &free, ctx, &Region::empty()).unwrap();
        let lz = log_partition_transfer(&p).unwrap();
        // all-aligned ground state alone contributes 3 per interior edge plus 3 per boundary edge
        let edges = 2.0 * 12.0 * 11.0 + 4.0 * 12.0;
        assert!(lz.is_finite() && lz >= 3.0 * edges);
    }

    #[test]
    fn transfer_cap() {
        let s = potts(3, 0.1).unwrap();
        let free = Region::Rect(Rect::new(0, 0, 19, 1));
        let p = InferenceProblem::with_free_boundary(&s, &free, PartialConfiguration::new(), &Region::empty())
            .unwrap()
            .with_caps(crate::inference::Caps { enumeration: 1 << 20, transfer: 1 << 10 });
        assert!(matches!(marginal_transfer(&p), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn branch_enumeration_visits_every_assignment() {
        let s = ising(0.4, 1.3).unwrap();
        let rect = Rect::new(0, 0, 2, 2);
        let centre = v(1, 1);
        let plan = TransferPlan::new(&s, rect, 1 << 20, |u| {
            if u == centre {
                Site::Free { query: true }
            } else if u.x == 1 || u.y == 1 {
                Site::Pinned
            } else {
                Site::Absent
            }
        })
        .unwrap();
        let mut values = plan.blank_values();
        let mut branch = vec![false; plan.len()];
        let ring = [v(1, 0), v(0, 1), v(2, 1), v(1, 2)];
        for u in ring {
            branch[plan.index_of(u).unwrap()] = true;
        }
        let mut seen = Vec::new();
        plan.for_each_branch(&mut values, &branch, |vals, w| {
            let spins: Vec<Spin> = ring.iter().map(|&u| vals[plan.index_of(u).unwrap()]).collect();
            let t: f64 = w.iter().sum();
            seen.push((spins, w[0] / t));
        });
        assert_eq!(seen.len(), 16);
        let e = 0.4f64.exp();
        for (spins, p0) in seen {
            let k = spins.iter().filter(|&&s| s == 0).count() as i32;
            let w0 = e.powi(k);
            let w1 = 1.3 * e.powi(4 - k);
            assert!((p0 - w0 / (w0 + w1)).abs() < 1e-14);
        }
    }
}
