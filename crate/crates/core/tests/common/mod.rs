#![allow(dead_code)]

use lazygibbs::geometry::{frame_of, on_mesh, Rect, Region, Vertex};
use lazygibbs::inference::{marginal_brute, marginal_transfer, InferenceProblem};
use lazygibbs::rng::UniformStream;
use lazygibbs::sampler::{LazySampler, SamplerState, TraceDetail};
use lazygibbs::{Error, PartialConfiguration, Spin, SpinSystem};

pub fn draw_below(rng: &mut UniformStream, n: usize) -> usize {
    ((rng.uniform() * n as f64) as usize).min(n - 1)
}

/// Mesh spins fixed everywhere in `[-reach, reach]²` outside the open box
/// `(-half, half)²`; the ring at `±half` then screens off the box, so the
/// lazy recursion inside it is finite and its law is computable exactly.
pub struct PinnedBox {
    pub mesh: i64,
    pub half: i64,
    pub known: PartialConfiguration,
}

impl PinnedBox {
    pub fn random(q: usize, mesh: i64, half: i64, rng: &mut UniformStream) -> Self {
        let reach = half + 3 * mesh;
        let inside = Rect::new(-half + 1, -half + 1, half - 1, half - 1);
        let known = Rect::new(-reach, -reach, reach, reach)
            .iter()
            .filter(|&v| on_mesh(v, mesh) && !inside.contains(v))
            .map(|v| (v, draw_below(rng, q) as Spin))
            .collect();
        PinnedBox { mesh, half, known }
    }

    pub fn free(&self) -> Region {
        let h = self.half - 1;
        Region::Rect(Rect::new(-h, -h, h, h))
    }

    /// Known spins on the closed box (its boundary ring and any pins inside).
    pub fn ring(&self) -> PartialConfiguration {
        let h = self.half;
        self.known.restrict(&Region::Rect(Rect::new(-h, -h, h, h)))
    }

    /// Exact joint law of `query` inside the box.
    pub fn exact(&self, system: &SpinSystem, query: &[Vertex]) -> Vec<f64> {
        let q: Region = query.iter().copied().collect();
        let free: Region = self.free().vertices().into_iter().filter(|v| !self.known.contains(*v)).collect();
        let p = InferenceProblem::new(system, &free, self.ring(), &q).unwrap();
        marginal_transfer(&p).unwrap().probs
    }
}

/// Index of `spins` in a joint marginal over `query` (first vertex most significant).
pub fn joint_index(q: usize, spins: &[Spin]) -> usize {
    spins.iter().fold(0, |acc, &s| acc * q + s as usize)
}

/// Exact `μ_v` on the frame interior of `v` given `known` (which must cover
/// the frame); brute force when `brute`, else the transfer sweep.
pub fn local_marginal(system: &SpinSystem, mesh: i64, v: Vertex, known: &PartialConfiguration, brute: bool) -> Option<Vec<f64>> {
    let frame = frame_of(v, mesh).unwrap();
    let interior = frame.interior();
    let free: Region = interior.iter().filter(|u| !known.contains(*u)).collect();
    let ctx: PartialConfiguration = known.iter().filter(|(u, _)| frame.contains(*u) || interior.contains(*u)).collect();
    let q = Region::Rect(Rect::new(v.x, v.y, v.x, v.y));
    let p = InferenceProblem::new(system, &free, ctx, &q).unwrap();
    let r = if brute { marginal_brute(&p) } else { marginal_transfer(&p) };
    match r {
        Ok(m) => Some(m.probs),
        Err(Error::Infeasible) => None,
        Err(e) => panic!("{e}"),
    }
}

/// Every assignment of `q` spins to `n` sites, in odometer order.
pub fn for_each_filling(q: usize, n: usize, mut f: impl FnMut(&[Spin])) {
    let mut t = vec![0 as Spin; n];
    loop {
        f(&t);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            t[k] += 1;
            if (t[k] as usize) < q {
                break;
            }
            t[k] = 0;
        }
    }
}

/// Largest `p_v^i - μ_v^{known⊕τ}(i)` over feasible fillings `τ` of the
/// unknown frame, with the number of fillings checked.
pub fn lower_bound_excess(sampler: &mut LazySampler, v: Vertex, known: &PartialConfiguration, brute: bool) -> (f64, usize) {
    let mesh = sampler.mesh();
    let system = sampler.system().clone();
    let p = sampler.lower_bounds(v, known).unwrap();
    let frame = frame_of(v, mesh).unwrap();
    let unknown: Vec<Vertex> = frame.vertices.iter().copied().filter(|u| !known.contains(*u)).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for_each_filling(system.q(), unknown.len(), |tau| {
        let mut full = known.clone();
        for (&u, &s) in unknown.iter().zip(tau) {
            full.set(u, s);
        }
        if let Some(mu) = local_marginal(&system, mesh, v, &full, brute) {
            checked += 1;
            for (pi, m) in p.lower.iter().zip(&mu) {
                worst = worst.max(pi - m);
            }
        }
    });
    (worst, checked)
}

/// `p^i + Σ_τ P(τ)(μ_v^{σ⊕τ}(i) - p^i)` with `P(τ)` the chain rule of exact
/// sequential conditionals in the sampler's frame order, against the exact
/// `μ_v^σ(i)`, inside a pinned box. Returns the largest gap and `Σ_τ P(τ)`.
pub fn telescoping_gap(sampler: &mut LazySampler, pb: &PinnedBox, v: Vertex) -> (f64, f64) {
    let system = sampler.system().clone();
    let q = system.q();
    let p = sampler.lower_bounds(v, &pb.known).unwrap();
    let frame = frame_of(v, pb.mesh).unwrap();
    let order = lazygibbs::sampler::frame_order(&frame, &pb.known);
    let box_free = pb.free();
    let base = pb.ring();

    // sequential conditional of w given base ⊕ prefix, over the box
    let conditional = |prefix: &PartialConfiguration, w: Vertex| -> Vec<f64> {
        let ctx = base.merge(prefix).unwrap();
        let free: Region = box_free.vertices().into_iter().filter(|u| !ctx.contains(*u)).collect();
        let p = InferenceProblem::new(&system, &free, ctx, &Region::Rect(Rect::new(w.x, w.y, w.x, w.y))).unwrap();
        marginal_transfer(&p).unwrap().probs
    };

    let mut lhs = p.lower.clone();
    let mut mass = 0.0;
    // depth-first over prefixes of τ in frame order
    fn walk(
        k: usize,
        weight: f64,
        prefix: &mut PartialConfiguration,
        order: &[Vertex],
        conditional: &dyn Fn(&PartialConfiguration, Vertex) -> Vec<f64>,
        leaf: &mut dyn FnMut(&PartialConfiguration, f64),
    ) {
        if k == order.len() {
            leaf(prefix, weight);
            return;
        }
        let c = conditional(prefix, order[k]);
        for (s, &ps) in c.iter().enumerate() {
            if ps == 0.0 {
                continue;
            }
            prefix.set(order[k], s as Spin);
            walk(k + 1, weight * ps, prefix, order, conditional, leaf);
            prefix.remove(order[k]);
        }
    }
    let mut prefix = PartialConfiguration::new();
    walk(0, 1.0, &mut prefix, &order, &conditional, &mut |tau, w| {
        let full = pb.known.merge(tau).unwrap();
        let mu = local_marginal(&system, pb.mesh, v, &full, q == 2).expect("positive weights");
        mass += w;
        for i in 0..q {
            lhs[i] += w * (mu[i] - p.lower[i]);
        }
    });
    let exact = pb.exact(&system, &[v]);
    let gap = lhs.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    (gap, mass)
}

/// Root spin counts of `n` lazy calls at `v` inside a pinned box.
pub fn root_counts(sampler: &mut LazySampler, pb: &PinnedBox, v: Vertex, n: u64, seed: u64) -> Vec<u64> {
    let mut counts = vec![0u64; sampler.system().q()];
    for i in 0..n {
        let mut st = SamplerState::new(UniformStream::with_stream(seed, i), u64::MAX, TraceDetail::Totals).with_known(&pb.known);
        counts[sampler.lazy(&mut st, v).unwrap() as usize] += 1;
    }
    counts
}

/// Upper-tail p-value of Pearson's statistic.
pub fn chi_square_p(counts: &[u64], expected: &[f64]) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let stat = lazygibbs::verify::chi_square_gof(counts, expected).unwrap();
    let dof = expected.iter().filter(|&&e| e > 0.0).count() - 1;
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

/// Random spins on a random subset of the mesh vertices in the closed
/// square of `v`'s frame (never `v` itself).
pub fn random_known(rng: &mut UniformStream, v: Vertex, mesh: i64, q: usize, rate: f64) -> PartialConfiguration {
    let mut out = PartialConfiguration::new();
    for u in frame_of(v, mesh).unwrap().closed_square().iter() {
        if u != v && on_mesh(u, mesh) && rng.uniform() < rate {
            out.set(u, draw_below(rng, q) as Spin);
        }
    }
    out
}
