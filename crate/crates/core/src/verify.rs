//! Comparators and exact oracles used to check the sampler.

use crate::config::PartialConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{graph_boundary, Rect, Region, Vertex};
use crate::inference::{marginal_transfer, Caps, InferenceProblem};
use crate::rng::UniformStream;
use crate::sampler::RecursionTrace;
use crate::system::{Spin, SpinSystem};

/// Half the L1 distance between two probability vectors.
pub fn tv_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!("distributions have different supports ({} vs {})", a.len(), b.len())));
    }
    Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Pearson statistic `Σ (obs - exp)² / exp`.
pub fn chi_square_gof(counts: &[u64], expected: &[f64]) -> Result<f64> {
    if counts.len() != expected.len() {
        return Err(Error::InvalidArgument("counts and expected differ in length".into()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::InvalidArgument("no observations".into()));
    }
    if expected.iter().any(|&e| e <= 0.0) {
        return Err(Error::InvalidArgument("expected probabilities must be positive".into()));
    }
    let n = n as f64;
    Ok(counts
        .iter()
        .zip(expected)
        .map(|(&c, &e)| {
            let ex = e * n;
            (c as f64 - ex).powi(2) / ex
        })
        .sum())
}

/// What the decay probe compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeTarget {
    /// Marginal at the centre vertex.
    Centre,
    /// Joint marginal on the `(2r+1)²` block around the centre.
    Block(i64),
}

/// Rows of `(ℓ, tv)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub rows: Vec<(usize, f64)>,
}

impl DecayTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].1 < w[0].1)
    }

    /// Least-squares slope of `log tv` against `ℓ`; `None` if any tv is zero.
    pub fn log_slope(&self) -> Option<f64> {
        if self.rows.len() < 2 || self.rows.iter().any(|r| r.1 <= 0.0) {
            return None;
        }
        let n = self.rows.len() as f64;
        let xs: Vec<f64> = self.rows.iter().map(|r| r.0 as f64).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.1.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("ell,tv\n");
        for (l, tv) in &self.rows {
            s.push_str(&format!("{l},{tv:.17e}\n"));
        }
        s
    }
}

fn constant_boundary(free: &Region, spin: Spin) -> PartialConfiguration {
    graph_boundary(free).vertices().into_iter().map(|u| (u, spin)).collect()
}

/// Exact TV between the target marginals of the `(2ℓ-1)²` box under the
/// all-first-spin and all-last-spin boundaries, for each `ℓ`.
///
/// Constant boundaries only: the result is a lower bound on the worst case
/// over boundary pairs.
pub fn wsm_probe(system: &SpinSystem, ells: &[usize], target: ProbeTarget, caps: Caps) -> Result<DecayTable> {
    let last = (system.q() - 1) as Spin;
    let mut rows = Vec::with_capacity(ells.len());
    for &ell in ells {
        if ell < 1 {
            return Err(Error::InvalidArgument("probe scales must be >= 1".into()));
        }
        let n = 2 * ell as i64 - 1;
        let free = Region::Rect(Rect::new(1, 1, n, n));
        let c = ell as i64;
        let query = match target {
            ProbeTarget::Centre => Region::Rect(Rect::new(c, c, c, c)),
            ProbeTarget::Block(r) => {
                let r = r.min(c - 1);
                Region::Rect(Rect::new(c - r, c - r, c + r, c + r))
            }
        };
        let marg = |spin| -> Result<Vec<f64>> {
            let p = InferenceProblem::new(system, &free, constant_boundary(&free, spin), &query)?.with_caps(caps);
            Ok(marginal_transfer(&p)?.probs)
        };
        rows.push((ell, tv_distance(&marg(0)?, &marg(last)?)?));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidArgument("probe scales must be strictly increasing".into()));
    }
    Ok(DecayTable { rows })
}

/// Centre `P(second spin)` on the `(2n+1)²` box under the all-first-spin
/// (`lo`) and all-second-spin (`hi`) boundaries.
pub fn bracket_bounds(system: &SpinSystem, box_half: usize, caps: Caps) -> Result<(f64, f64)> {
    if !system.monotone_eligible() {
        return Err(Error::StrategyNotSupported("bracket"));
    }
    let n = box_half as i64;
    let free = Region::Rect(Rect::new(-n, -n, n, n));
    let centre = Region::Rect(Rect::new(0, 0, 0, 0));
    let p = |spin| -> Result<f64> {
        let prob = InferenceProblem::new(system, &free, constant_boundary(&free, spin), &centre)?.with_caps(caps);
        Ok(marginal_transfer(&prob)?.probs[1])
    };
    Ok((p(0)?, p(1)?))
}

/// Aggregate run-time statistics over traces.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchingSummary {
    pub runs: usize,
    pub mean_calls: f64,
    pub max_depth: usize,
    /// `(upper bound 2^k, count)` of runs with total calls in `(2^(k-1), 2^k]`.
    pub size_histogram: Vec<(u64, u64)>,
    pub indecision_frequency: f64,
}

pub fn branching_stats(traces: &[RecursionTrace]) -> Result<BranchingSummary> {
    if traces.is_empty() {
        return Err(Error::InvalidArgument("no traces".into()));
    }
    let calls: u64 = traces.iter().map(|t| t.calls).sum();
    let recursed: u64 = traces.iter().map(|t| t.recursed).sum();
    let mut hist = std::collections::BTreeMap::new();
    for t in traces {
        *hist.entry(t.calls.max(1).next_power_of_two()).or_insert(0u64) += 1;
    }
    Ok(BranchingSummary {
        runs: traces.len(),
        mean_calls: calls as f64 / traces.len() as f64,
        max_depth: traces.iter().map(|t| t.max_depth).max().unwrap_or(0),
        size_histogram: hist.into_iter().collect(),
        indecision_frequency: if calls == 0 { 0.0 } else { recursed as f64 / calls as f64 },
    })
}

/// A random conditional-marginal instance small enough for brute force.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub system: SpinSystem,
    pub free: Region,
    pub context: PartialConfiguration,
    pub query: Region,
}

impl OracleInstance {
    pub fn problem(&self) -> Result<InferenceProblem<'_>> {
        InferenceProblem::new(&self.system, &self.free, self.context.clone(), &self.query)
    }
}

fn draw_below(rng: &mut UniformStream, n: usize) -> usize {
    ((rng.uniform() * n as f64) as usize).min(n - 1)
}

/// Square of side 1..=5 with some vertices pinned at random, random spins on
/// its outer boundary, `q ∈ {2, 3}`, `β ∈ [0, 1.5]`, `h ∈ [0.5, 2]`, and a
/// query of one or two free vertices.
pub fn random_oracle_instance(rng: &mut UniformStream) -> Result<OracleInstance> {
    let q = 2 + draw_below(rng, 2);
    let beta = 1.5 * rng.uniform();
    let system =
        if q == 2 && rng.uniform() < 0.5 { crate::models::ising(beta, 0.5 + 1.5 * rng.uniform())? } else { crate::models::potts(q, beta)? };
    let max_free = if q == 2 { 16 } else { 10 };
    let side = 1 + draw_below(rng, 5) as i64;
    let square = Rect::new(0, 0, side - 1, side - 1);
    let pin_rate = 0.5 * rng.uniform();
    let mut context = PartialConfiguration::new();
    let mut free = Vec::new();
    for v in square.iter() {
        if rng.uniform() < pin_rate {
            context.set(v, draw_below(rng, q) as Spin);
        } else {
            free.push(v);
        }
    }
    while free.len() > max_free {
        let v = free.remove(draw_below(rng, free.len()));
        context.set(v, draw_below(rng, q) as Spin);
    }
    if free.is_empty() {
        let v = Vertex::new(0, 0);
        context.remove(v);
        free.push(v);
    }
    let free: Region = free.into_iter().collect();
    for u in graph_boundary(&free).vertices() {
        if !context.contains(u) {
            context.set(u, draw_below(rng, q) as Spin);
        }
    }
    let fv = free.vertices();
    let mut query = vec![fv[draw_below(rng, fv.len())]];
    if fv.len() > 1 && rng.uniform() < 0.5 {
        let w = fv[draw_below(rng, fv.len())];
        if w != query[0] {
            query.push(w);
        }
    }
    Ok(OracleInstance { system, free, context, query: query.into_iter().collect() })
}

/// Largest entrywise gap between brute force and the transfer sweep.
pub fn oracle_gap(instance: &OracleInstance) -> Result<f64> {
    let p = instance.problem()?;
    let a = crate::inference::marginal_brute(&p)?;
    let b = marginal_transfer(&p)?;
    Ok(a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Binomial standard deviation of a count with success probability `p`.
pub fn binomial_sigma(n: u64, p: f64) -> f64 {
    (n as f64 * p * (1.0 - p)).sqrt()
}

/// Centre vertex used by the probes.
pub fn probe_centre(ell: usize) -> Vertex {
    Vertex::new(ell as i64, ell as i64)
}
