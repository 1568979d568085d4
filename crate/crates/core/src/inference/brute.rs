//! Exhaustive enumeration over all assignments of the free region.

use super::{normalize_logs, InferenceProblem, JointMarginal, LogSum};
use crate::error::{Error, Result};
use crate::system::Spin;

/// Precomputed local structure: for each free vertex, its field row, the
/// context spins among its neighbours, and its later free neighbours.
struct Local {
    ctx: Vec<Vec<Spin>>,
    later: Vec<Vec<usize>>,
    query_pos: Vec<usize>,
}

fn local(problem: &InferenceProblem<'_>) -> Local {
    let idx = |v| problem.free.binary_search(&v).ok();
    let mut ctx = Vec::with_capacity(problem.free.len());
    let mut later = Vec::with_capacity(problem.free.len());
    for (i, &v) in problem.free.iter().enumerate() {
        let mut c = Vec::new();
        let mut l = Vec::new();
        for u in v.neighbors() {
            match idx(u) {
                Some(j) if j > i => l.push(j),
                Some(_) => {}
                None => {
                    if let Some(s) = problem.context.get(u) {
                        c.push(s);
                    }
                }
            }
        }
        ctx.push(c);
        later.push(l);
    }
    let query_pos = problem.query.iter().map(|&v| idx(v).expect("query ⊆ free")).collect();
    Local { ctx, later, query_pos }
}

/// Visit every assignment with its log weight, in odometer order (last free
/// vertex fastest).
fn enumerate(problem: &InferenceProblem<'_>, mut visit: impl FnMut(&[Spin], f64)) -> Result<()> {
    let sys = problem.system;
    let q = sys.q();
    let n = problem.free.len();
    problem.caps.check_enumeration(q, n)?;
    let loc = local(problem);
    let mut spins = vec![0 as Spin; n];
    loop {
        let mut lw = 0.0;
        for i in 0..n {
            let s = spins[i];
            lw += sys.log_field(s);
            for &t in &loc.ctx[i] {
                lw += sys.log_interaction(s, t);
            }
            for &j in &loc.later[i] {
                lw += sys.log_interaction(s, spins[j]);
            }
        }
        visit(&spins, lw);

        let mut k = n;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            spins[k] += 1;
            if (spins[k] as usize) < q {
                break;
            }
            spins[k] = 0;
        }
    }
}

/// `log Z` of the free region given its context.
pub fn log_partition_brute(problem: &InferenceProblem<'_>) -> Result<f64> {
    let mut acc = LogSum::new();
    enumerate(problem, |_, lw| acc.add(lw))?;
    Ok(acc.value())
}

/// Conditional distribution of the query vertices by exhaustive enumeration.
pub fn marginal_brute(problem: &InferenceProblem<'_>) -> Result<JointMarginal> {
    let q = problem.system.q();
    let loc = local(problem);
    let bins = q.pow(problem.query.len() as u32);
    let mut acc = vec![LogSum::new(); bins];
    enumerate(problem, |spins, lw| {
        let idx = loc.query_pos.iter().fold(0, |a, &p| a * q + spins[p] as usize);
        acc[idx].add(lw);
    })?;
    let logs: Vec<f64> = acc.iter().map(LogSum::value).collect();
    let probs = normalize_logs(&logs).ok_or(Error::Infeasible)?;
    Ok(JointMarginal { query: problem.query.clone(), q, probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PartialConfiguration;
    use crate::geometry::{graph_boundary, Rect, Region, Vertex};
    use crate::inference::Caps;
    use crate::models::{ising, potts};
    use crate::system::SpinSystem;

    fn v(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y)
    }

    fn set(vs: &[Vertex]) -> Region {
        vs.iter().copied().collect()
    }

    #[test]
    fn partition_examples() {
        let s = ising(0.7, 1.0).unwrap();
        let p = InferenceProblem::with_free_boundary(&s, &set(&[v(0, 0)]), PartialConfiguration::new(), &Region::empty()).unwrap();
        assert!((log_partition_brute(&p).unwrap() - 2f64.ln()).abs() < 1e-14);

        let edge = set(&[v(0, 0), v(1, 0)]);
        let s0 = ising(0.0, 1.0).unwrap();
        let p = InferenceProblem::with_free_boundary(&s0, &edge, PartialConfiguration::new(), &Region::empty()).unwrap();
        assert!((log_partition_brute(&p).unwrap() - 4f64.ln()).abs() < 1e-14);

        let s1 = ising(1.0, 1.0).unwrap();
        let p = InferenceProblem::with_free_boundary(&s1, &edge, PartialConfiguration::new(), &Region::empty()).unwrap();
        let want = (2.0 * std::f64::consts::E + 2.0).ln();
        assert!((log_partition_brute(&p).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn single_site_closed_form() {
        let s = ising(0.5, 1.0).unwrap();
        let free = set(&[v(0, 0)]);
        let ctx: PartialConfiguration = graph_boundary(&free).vertices().into_iter().map(|u| (u, 0)).collect();
        let p = InferenceProblem::new(&s, &free, ctx, &free).unwrap();
        let m = marginal_brute(&p).unwrap();
        let e2 = 2f64.exp();
        assert!((m.probs[0] - e2 / (e2 + 1.0)).abs() < 1e-14);
        assert!((m.probs[0] - 0.880_797_1).abs() < 1e-7);
    }

    #[test]
    fn zero_coupling_factorises() {
        let s = SpinSystem::new(vec![1.0, 2.0, 3.0], vec![vec![1.0; 3]; 3]).unwrap();
        let free = Region::Rect(Rect::new(0, 0, 1, 1));
        let ctx: PartialConfiguration = graph_boundary(&free).vertices().into_iter().map(|u| (u, 2)).collect();
        let q = set(&[v(0, 0), v(1, 1)]);
        let m = marginal_brute(&InferenceProblem::new(&s, &free, ctx, &q).unwrap()).unwrap();
        let b = [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0];
        for a in 0..3u8 {
            for c in 0..3u8 {
                assert!((m.prob(&[a, c]) - b[a as usize] * b[c as usize]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cap_and_infeasible() {
        let s = potts(2, 0.3).unwrap();
        let free = Region::Rect(Rect::new(0, 0, 4, 4));
        let p = InferenceProblem::with_free_boundary(&s, &free, PartialConfiguration::new(), &Region::empty())
            .unwrap()
            .with_caps(Caps { enumeration: 1 << 10, transfer: 1 << 10 });
        assert!(matches!(log_partition_brute(&p), Err(Error::CapExceeded { .. })));

        // hard-core pair: both neighbours spin 0 forbid spin 0 at the centre; b(1) = 0
        let hard = SpinSystem::new(vec![1.0, 0.0], vec![vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let free = set(&[v(0, 0)]);
        let ctx: PartialConfiguration = [(v(1, 0), 0)].into_iter().collect();
        let p = InferenceProblem::with_free_boundary(&hard, &free, ctx, &free).unwrap();
        assert_eq!(marginal_brute(&p), Err(Error::Infeasible));
    }

    #[test]
    fn boundary_cover_required() {
        let s = potts(2, 0.3).unwrap();
        let free = set(&[v(0, 0)]);
        let r = InferenceProblem::new(&s, &free, PartialConfiguration::new(), &free);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
        let ctx: PartialConfiguration = [(v(0, 0), 0)].into_iter().collect();
        let r = InferenceProblem::with_free_boundary(&s, &free, ctx, &free);
        assert!(matches!(r, Err(Error::Overlap(_))));
    }
}
