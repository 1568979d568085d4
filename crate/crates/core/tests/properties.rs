use lazygibbs::geometry::{graph_boundary, Rect, Region, Vertex};
use lazygibbs::inference::{marginal_brute, marginal_transfer, InferenceProblem};
use lazygibbs::models::{ising, potts};
use lazygibbs::sampler::PVector;
use lazygibbs::verify::{bracket_bounds, tv_distance};
use lazygibbs::{PartialConfiguration, Spin, SpinSystem};
use proptest::prelude::*;

fn system_strategy() -> impl Strategy<Value = SpinSystem> {
    prop_oneof![
        (0.0..1.5f64, 0.5..2.0f64).prop_map(|(b, h)| ising(b, h).unwrap()),
        (2usize..=3, 0.0..1.5f64).prop_map(|(q, b)| potts(q, b).unwrap()),
        // asymmetric field and interaction
        (0.1..2.0f64, 0.1..2.0f64, 0.1..3.0f64, 0.1..3.0f64, 0.1..3.0f64).prop_map(|(b1, b2, a, c, d)| SpinSystem::new(
            vec![1.0, b1, b2],
            vec![vec![a, 1.0, c], vec![1.0, d, 0.5], vec![c, 0.5, 1.0],]
        )
        .unwrap()),
    ]
}

/// Square of side `n` with spins `fill` on its boundary ring.
fn ring_problem<'a>(s: &'a SpinSystem, n: i64, fill: &[Spin], query: &Region) -> InferenceProblem<'a> {
    let free = Region::Rect(Rect::new(0, 0, n - 1, n - 1));
    let ring = graph_boundary(&free).vertices();
    let ctx: PartialConfiguration = ring.iter().zip(fill.iter().cycle()).map(|(&v, &s)| (v, s)).collect();
    InferenceProblem::new(s, &free, ctx, query).unwrap()
}

fn config_on(rect: Rect, spins: &[Spin], q: usize) -> PartialConfiguration {
    rect.iter().zip(spins.iter().cycle()).map(|(v, &s)| (v, s % q as Spin)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_weight_is_additive(s in system_strategy(), spins in prop::collection::vec(0u8..3, 16), split in 1usize..8) {
        let q = s.q();
        let all = config_on(Rect::new(0, 0, 3, 3), &spins, q);
        let context = config_on(Rect::new(-1, -1, 4, 4), &spins[3..], q)
            .iter()
            .filter(|(v, _)| !Rect::new(0, 0, 3, 3).contains(*v))
            .collect::<PartialConfiguration>();
        let (w1, w2): (Vec<_>, Vec<_>) = all.iter().enumerate().partition(|(i, _)| *i < split);
        let w1: PartialConfiguration = w1.into_iter().map(|(_, x)| x).collect();
        let w2: PartialConfiguration = w2.into_iter().map(|(_, x)| x).collect();
        let whole = s.log_weight(&all, &context).unwrap();
        let parts = s.log_weight(&w1, &context.merge(&w2).unwrap()).unwrap() + s.log_weight(&w2, &context).unwrap();
        prop_assert!((whole - parts).abs() < 1e-9, "{whole} vs {parts}");
    }

    #[test]
    fn log_weight_invariant_under_relabelling(perm in Just([0u8, 1, 2]).prop_shuffle(), spins in prop::collection::vec(0u8..3, 4), b in prop::collection::vec(0.2..3.0f64, 3), a in prop::collection::vec(0.2..3.0f64, 6)) {
        let m = |i: usize, j: usize| { let (i, j) = (i.min(j), i.max(j)); a[[0, 1, 2, 1, 3, 4, 2, 4, 5][i * 3 + j]] };
        let rows = |p: &[u8]| -> (Vec<f64>, Vec<Vec<f64>>) {
            // system whose spin p[k] plays the role of k
            let mut inv = [0usize; 3];
            for (k, &pk) in p.iter().enumerate() { inv[pk as usize] = k; }
            ((0..3).map(|i| b[inv[i]]).collect(), (0..3).map(|i| (0..3).map(|j| m(inv[i], inv[j])).collect()).collect())
        };
        let (b0, a0) = rows(&[0, 1, 2]);
        let (b1, a1) = rows(&perm);
        let s0 = SpinSystem::new(b0, a0).unwrap();
        let s1 = SpinSystem::new(b1, a1).unwrap();
        let c0 = config_on(Rect::new(0, 0, 1, 1), &spins, 3);
        let c1: PartialConfiguration = c0.iter().map(|(v, s)| (v, perm[s as usize])).collect();
        let empty = PartialConfiguration::new();
        prop_assert!((s0.log_weight(&c0, &empty).unwrap() - s1.log_weight(&c1, &empty).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn transfer_matches_brute(s in system_strategy(), n in 1i64..=3, fill in prop::collection::vec(0u8..3, 12), qx in 0i64..3, qy in 0i64..3) {
        let query = Region::Rect(Rect::new(qx.min(n - 1), qy.min(n - 1), qx.min(n - 1), qy.min(n - 1)));
        let p = ring_problem(&s, n, &fill.iter().map(|x| x % s.q() as u8).collect::<Vec<_>>(), &query);
        let a = marginal_brute(&p).unwrap();
        let b = marginal_transfer(&p).unwrap();
        prop_assert!((a.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((b.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.probs.iter().zip(&b.probs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn far_context_is_screened_off(s in system_strategy(), fill in prop::collection::vec(0u8..3, 30)) {
        let q = s.q() as u8;
        let fill: Vec<u8> = fill.iter().map(|x| x % q).collect();
        let query = Region::Rect(Rect::new(1, 1, 1, 1));
        let p = ring_problem(&s, 3, &fill, &query);
        let base = marginal_brute(&p).unwrap();
        let mut ctx = p.context.clone();
        for (i, v) in Rect::new(-3, -3, 5, 5).iter().filter(|v| v.chebyshev(Vertex::new(1, 1)) >= 3).enumerate() {
            ctx.set(v, fill[i % fill.len()]);
        }
        let free = Region::Rect(Rect::new(0, 0, 2, 2));
        let wider = marginal_brute(&InferenceProblem::new(&s, &free, ctx, &query).unwrap()).unwrap();
        for (x, y) in base.probs.iter().zip(&wider.probs) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_is_disjoint_and_adjacent(cells in prop::collection::btree_set((-3i64..3, -3i64..3), 1..12)) {
        let region: Region = cells.into_iter().map(|(x, y)| Vertex::new(x, y)).collect();
        let b = graph_boundary(&region);
        for u in b.vertices() {
            prop_assert!(!region.contains(u));
            prop_assert!(u.neighbors().iter().any(|w| region.contains(*w)));
        }
    }

    #[test]
    fn intervals_tile(raw in prop::collection::vec(0.0..1.0f64, 2..6)) {
        let total: f64 = raw.iter().sum::<f64>() + 0.3;
        let p = PVector::new(raw.iter().map(|x| x / total).collect());
        let iv = p.intervals();
        prop_assert_eq!(iv[0].0, 0.0);
        prop_assert_eq!(iv.last().unwrap().1, 1.0);
        for w in iv.windows(2) {
            prop_assert!((w[0].1 - w[1].0).abs() < 1e-12);
        }
    }

    #[test]
    fn brackets_are_ordered(beta in 0.0..1.0f64, h in 0.5..2.0f64, n in 1usize..4) {
        let (lo, hi) = bracket_bounds(&ising(beta, h).unwrap(), n, Default::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= hi + 1e-15);
    }
}

#[test]
fn potts_two_is_ising_without_field() {
    // Potts q=2 at β equals Ising at β with h = 1.
    for &beta in &[0.0, 0.4, 1.1] {
        let a = potts(2, beta).unwrap();
        let b = ising(beta, 1.0).unwrap();
        for fill in 0..16u32 {
            let ring: Vec<Spin> = (0..4).map(|k| ((fill >> k) & 1) as Spin).collect();
            for v in Rect::new(0, 0, 2, 2).iter() {
                let q = Region::Rect(Rect::new(v.x, v.y, v.x, v.y));
                let pa = marginal_brute(&ring_problem(&a, 3, &ring, &q)).unwrap();
                let pb = marginal_brute(&ring_problem(&b, 3, &ring, &q)).unwrap();
                assert!(tv_distance(&pa.probs, &pb.probs).unwrap() < 1e-12);
            }
        }
    }
}
