//! Property tests for the module-level invariants. Models are drawn from a
//! seeded ChaCha stream; proptest supplies the seed and the sizes.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urnlab_core::conjectures::{
    check_nmp_question, farr_search, ideal_search, qcna_search, rayleigh_search, welsh_probabilities, SearchCaps,
    WelshInstance,
};
use urnlab_core::measure::{
    check_app, check_bna_grid, check_capp, check_cna, check_na, check_nc, check_slc, check_support_convex,
    check_ulc, default_alpha_grid, dominance_by_enumeration, stochastic_dominance, ChainProductSpace, FieldVector,
    FiniteMeasure, LatticeFn, NaCaps,
};
use urnlab_core::orient::{count_gmaps, count_matchings, count_orientations, BipartiteSystem, DegreeDemand, Multigraph};
use urnlab_core::rational::{int, rat, Rational};
use urnlab_core::urn::random::random_model;
use urnlab_core::urn::{
    conditional_xy_law, interval_urn_measure, occupancy_law, oracle_pushforward, Assignment, ConditioningEvent,
    IntervalSpec, OccupancySpec, ThresholdSpec, UrnModel, Windows,
};
use urnlab_core::verify::{mukl_instances, verify_mainthm_a_pair, verify_mukl, window_function, MuklVariant};
use urnlab_core::Status;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn model(seed: u64, m: usize, n: usize, iid: bool) -> UrnModel {
    random_model(&mut rng(seed), m, n, iid, 8)
}

fn occupancy_oracle(model: &UrnModel) -> FiniteMeasure {
    let (m, n) = (model.m(), model.n());
    oracle_pushforward(model, ChainProductSpace::new(vec![m + 1; n]).unwrap(), |s| {
        Assignment(s.to_vec()).occupancy(n)
    })
    .unwrap()
}

fn random_windows(r: &mut ChaCha8Rng, m: usize, urns: &[usize]) -> Windows {
    urns.iter()
        .map(|&j| {
            let lo = r.gen_range(0..=m);
            (j, (lo, r.gen_range(lo..=m)))
        })
        .collect()
}

fn random_measure(seed: u64, sizes: Vec<usize>) -> FiniteMeasure {
    let space = ChainProductSpace::new(sizes).unwrap();
    let mut r = rng(seed);
    loop {
        let w: Vec<Rational> = (0..space.num_points())
            .map(|_| if r.gen_bool(0.25) { int(0) } else { int(r.gen_range(1..=6)) })
            .collect();
        if let Ok(mu) = FiniteMeasure::from_weights(space.clone(), w) {
            return mu;
        }
    }
}

fn total(mu: &FiniteMeasure) -> Rational {
    mu.masses().iter().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dp_matches_oracle(seed in any::<u64>(), m in 1usize..=5, n in 2usize..=4, iid in any::<bool>()) {
        let model = model(seed, m, n, iid);
        let dp = occupancy_law(&model, &OccupancySpec::per_urn(&model)).unwrap();
        prop_assert_eq!(dp, occupancy_oracle(&model));
    }

    #[test]
    fn laws_are_normalized(seed in any::<u64>(), m in 1usize..=5, n in 2usize..=4) {
        let model = model(seed, m, n, false);
        let law = occupancy_law(&model, &OccupancySpec::per_urn(&model)).unwrap();
        prop_assert_eq!(total(&law), int(1));
        let thresholds: Vec<usize> = (0..n).map(|j| j % (m + 1)).collect();
        let mu = interval_urn_measure(&model, &ThresholdSpec::new(m, thresholds).unwrap().binning()).unwrap();
        prop_assert_eq!(total(&mu), int(1));
        let q = ConditioningEvent::trivial();
        let xy = conditional_xy_law(&model, &q, &[0], &(1..n).collect::<Vec<_>>()).unwrap();
        let mut sum = int(0);
        for x in 0..xy.x_values() {
            for y in 0..xy.y_values() {
                sum += xy.prob(x, y);
            }
        }
        prop_assert_eq!(sum, int(1));
    }

    /// `(k+1) Pr(B_i = k+1, Q) = Σ_l γ_li Pr^{[m]∖{l}}(B_i = k, Q)` with rows
    /// normalized to probabilities.
    #[test]
    fn ball_removal_identity(seed in any::<u64>(), m in 1usize..=5, n in 2usize..=4, wseed in any::<u64>()) {
        let model = model(seed, m, n, false).normalized();
        let mut r = rng(wseed);
        let i = r.gen_range(0..n);
        let others: Vec<usize> = (0..n).filter(|&j| j != i && r.gen_bool(0.5)).collect();
        let windows = random_windows(&mut r, m, &others);
        let joint = |mdl: &UrnModel, k: usize| -> Rational {
            if mdl.m() == 0 {
                return if k == 0 && windows.values().all(|&(lo, _)| lo == 0) { int(1) } else { int(0) };
            }
            let law = occupancy_law(mdl, &OccupancySpec::per_urn(mdl)).unwrap();
            law.prob_of(|x| x[i] == k && windows.iter().all(|(&j, &(lo, hi))| lo <= x[j] && x[j] <= hi))
        };
        for k in 0..m {
            let lhs = int((k + 1) as i64) * joint(&model, k + 1);
            let mut rhs = int(0);
            for l in 0..m {
                let rest: Vec<usize> = (0..m).filter(|&b| b != l).collect();
                rhs += model.ball_prob(l, i) * joint(&model.restrict(&rest).unwrap(), k);
            }
            prop_assert_eq!(lhs, rhs, "k = {}", k);
        }
    }

    #[test]
    fn supports_are_convex(seed in any::<u64>(), m in 1usize..=4, n in 2usize..=3, wseed in any::<u64>()) {
        let model = model(seed, m, n, false);
        let mut r = rng(wseed);
        let f: Vec<usize> = (0..n).map(|_| r.gen_range(0..=m)).collect();
        prop_assert!(check_support_convex(&window_function(&model, &f).unwrap()).unwrap().is_holds());

        let k: Vec<usize> = (2..n).collect();
        let q = match ConditioningEvent::new(&model, random_windows(&mut r, m, &k)) {
            Ok(q) if q.probability(&model).unwrap() > int(0) => q,
            _ => return Ok(()),
        };
        let xy = conditional_xy_law(&model, &q, &[0], &[1]).unwrap();
        let mut support = LatticeFn::new();
        for x in 0..xy.x_values() {
            for y in 0..xy.y_values() {
                let p = xy.prob(x, y);
                if p > int(0) {
                    support.insert(vec![x, y], p);
                }
            }
        }
        prop_assert!(check_support_convex(&support).unwrap().is_holds());
    }

    /// Tracking counts only up to the thresholds gives the same measure as the
    /// full occupancy law binned afterwards.
    #[test]
    fn caps_do_not_change_probabilities(seed in any::<u64>(), m in 1usize..=5, n in 2usize..=4, tseed in any::<u64>()) {
        let model = model(seed, m, n, false);
        let mut r = rng(tseed);
        let spec = ThresholdSpec::new(m, (0..n).map(|_| r.gen_range(0..=m)).collect()).unwrap();
        let b = spec.binning();
        let capped = interval_urn_measure(&model, &b).unwrap();
        let full = occupancy_law(&model, &OccupancySpec::per_urn(&model)).unwrap();
        let binned = full.pushforward(b.space(), |x| (0..n).map(|j| b.level(j, x[j])).collect()).unwrap();
        prop_assert_eq!(capped, binned);
    }

    #[test]
    fn correlation_implications(seed in any::<u64>(), dims in 2usize..=3) {
        let mu = random_measure(seed, vec![2; dims]);
        let caps = NaCaps::default();
        let (cna, na, nc) = (check_cna(&mu, &caps), check_na(&mu, &caps), check_nc(&mu));
        if cna.is_holds() {
            prop_assert!(na.is_holds());
        }
        if na.is_holds() {
            prop_assert!(nc.is_holds());
        }
    }

    #[test]
    fn external_fields_compose(seed in any::<u64>(), dims in 1usize..=4, fseed in any::<u64>()) {
        let mu = random_measure(seed, vec![2; dims]);
        prop_assert_eq!(&mu.external_field(&FieldVector::ones(dims)).unwrap(), &mu);
        let mut r = rng(fseed);
        let mut field = || FieldVector((0..dims).map(|_| rat(r.gen_range(1..=5), r.gen_range(1..=5))).collect());
        let (w, v) = (field(), field());
        let wv = FieldVector(w.0.iter().zip(&v.0).map(|(a, b)| a * b).collect());
        let lhs = mu.external_field(&v).unwrap().external_field(&w).unwrap();
        prop_assert_eq!(lhs, mu.external_field(&wv).unwrap());
    }

    #[test]
    fn flow_dominance_matches_enumeration(seed in any::<u64>(), shape in 0usize..4) {
        let sizes = [vec![2, 2], vec![2, 3], vec![3, 4], vec![2, 2, 3]][shape].clone();
        let mu = random_measure(seed, sizes.clone());
        // Half the time ν is μ pushed down along the first coordinate, so
        // dominance holds by construction.
        let nu = if seed % 2 == 0 {
            mu.pushforward(mu.space().clone(), |x| {
                let mut y = x.to_vec();
                y[0] = y[0].saturating_sub(1);
                y
            })
            .unwrap()
        } else {
            random_measure(seed ^ 0x9e37, sizes)
        };
        let flow = stochastic_dominance(&mu, &nu).unwrap();
        let enumerated = dominance_by_enumeration(&mu, &nu, 1 << 20).unwrap();
        prop_assert_eq!(flow.status, enumerated.status);
        if seed % 2 == 0 {
            prop_assert!(flow.is_holds());
        }
    }

    /// Coefficients of a real-rooted polynomial are ULC and hence SLC, and
    /// then every binomial split is BNA.
    #[test]
    fn slc_gives_bna(roots in proptest::collection::vec((1i64..=6, 1i64..=6), 1..=5)) {
        let mut nu = vec![int(1)];
        for (p, q) in roots {
            let r = rat(p, q);
            let mut next = vec![int(0); nu.len() + 1];
            for (i, c) in nu.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * &r;
            }
            nu = next;
        }
        let sum: Rational = nu.iter().sum();
        let nu: Vec<Rational> = nu.iter().map(|c| c / &sum).collect();
        prop_assert!(check_slc(&nu).is_holds());
        prop_assert!(check_bna_grid(&nu, &default_alpha_grid()).unwrap().is_holds());
    }

    #[test]
    fn capp_gives_ulc_ranks(seed in any::<u64>(), m in 1usize..=4, half in 1usize..=2, from_urns in any::<bool>()) {
        // Antipodal pairs need an even number of coordinates.
        let n = 2 * half;
        let mu = if from_urns {
            let model = model(seed, m, n, true);
            let t: Vec<usize> = (0..n).map(|j| 1 + j % m).collect();
            interval_urn_measure(&model, &ThresholdSpec::new(m, t).unwrap().binning()).unwrap()
        } else {
            random_measure(seed, vec![2; n])
        };
        let capp = check_capp(&mu).unwrap();
        if capp.is_holds() {
            prop_assert!(check_app(&mu).unwrap().is_holds());
            let ranks = mu.rank_sequence();
            let first = ranks.iter().position(|r| *r > int(0));
            let last = ranks.iter().rposition(|r| *r > int(0));
            let gap = match (first, last) {
                (Some(a), Some(b)) => ranks[a..=b].iter().any(|r| *r == int(0)),
                _ => true,
            };
            if !gap {
                prop_assert!(check_ulc(&ranks, n).is_holds());
            }
        }
    }

    #[test]
    fn orientations_factor_over_components(seed in any::<u64>(), v in 2usize..=6, e in 0usize..=7) {
        let mut r = rng(seed);
        let edges: Vec<(usize, usize)> = (0..e).map(|_| (r.gen_range(0..v), r.gen_range(0..v))).collect();
        let g = Multigraph::new(v, edges).unwrap();
        let degrees = g.degrees();
        let d = DegreeDemand::new(
            degrees.iter().map(|&x| r.gen_range(0..=x + 1)).collect(),
            degrees.iter().map(|&x| r.gen_range(0..=x + 1)).collect(),
        )
        .unwrap();
        let whole = count_orientations(&g, &d).unwrap();
        let product: u64 = g
            .components()
            .iter()
            .map(|c| count_orientations(&g.induced(c), &d.restrict(c)).unwrap())
            .product();
        prop_assert_eq!(whole, product);
    }

    #[test]
    fn loops_double_after_shift(seed in any::<u64>(), v in 1usize..=5, e in 0usize..=6) {
        let mut r = rng(seed);
        let edges: Vec<(usize, usize)> = (0..e).map(|_| (r.gen_range(0..v), r.gen_range(0..v))).collect();
        let x = r.gen_range(0..v);
        let a: Vec<i64> = (0..v).map(|_| r.gen_range(0..=3)).collect();
        let b: Vec<i64> = (0..v).map(|_| r.gen_range(0..=3)).collect();
        let g = Multigraph::new(v, edges.clone()).unwrap();
        let mut with_loop = edges;
        with_loop.push((x, x));
        let gl = Multigraph::new(v, with_loop).unwrap();
        let (mut a2, mut b2) = (a.clone(), b.clone());
        a2[x] -= 1;
        b2[x] -= 1;
        let lhs = count_orientations(&gl, &DegreeDemand::clamped(&a, &b).unwrap()).unwrap();
        let rhs = count_orientations(&g, &DegreeDemand::clamped(&a2, &b2).unwrap()).unwrap();
        prop_assert_eq!(lhs, 2 * rhs);
    }

    #[test]
    fn orientations_monotone_in_demands(seed in any::<u64>(), v in 1usize..=5, e in 0usize..=6) {
        let mut r = rng(seed);
        let edges: Vec<(usize, usize)> = (0..e).map(|_| (r.gen_range(0..v), r.gen_range(0..v))).collect();
        let g = Multigraph::new(v, edges).unwrap();
        let a: Vec<usize> = (0..v).map(|_| r.gen_range(0..=2)).collect();
        let b: Vec<usize> = (0..v).map(|_| r.gen_range(0..=2)).collect();
        let base = count_orientations(&g, &DegreeDemand::new(a.clone(), b.clone()).unwrap()).unwrap();
        let x = r.gen_range(0..v);
        let mut a2 = a.clone();
        a2[x] += 1;
        let mut b2 = b.clone();
        b2[x] += 1;
        prop_assert!(count_orientations(&g, &DegreeDemand::new(a2, b.clone()).unwrap()).unwrap() <= base);
        prop_assert!(count_orientations(&g, &DegreeDemand::new(a, b2).unwrap()).unwrap() <= base);
    }

    /// G-maps with windows `[0, 1]` are matchings of the bipartite graph.
    #[test]
    fn unit_gmaps_are_matchings(seed in any::<u64>(), left in 1usize..=4, right in 1usize..=4) {
        let mut r = rng(seed);
        let mut edges: Vec<(usize, usize)> = (0..left)
            .flat_map(|u| (0..right).map(move |w| (u, w)))
            .collect();
        edges.retain(|_| r.gen_bool(0.5));
        let system = BipartiteSystem::new(left, right, edges.clone(), vec![0; right], vec![1; right]).unwrap();
        let g = Multigraph::new(left + right, edges.iter().map(|&(u, w)| (u, left + w)).collect()).unwrap();
        let trim = |mut v: Vec<u64>| {
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        prop_assert_eq!(trim(count_gmaps(&system).unwrap()), trim(count_matchings(&g).unwrap()));
    }

    #[test]
    fn mukl_variants_relate(seed in any::<u64>(), m in 1usize..=4, n in 2usize..=4, iid in any::<bool>()) {
        let model = model(seed, m, n, iid);
        let (instances, _) = mukl_instances(&model).unwrap();
        for inst in &instances {
            if inst.triple_prime.is_holds() {
                prop_assert!(inst.double_prime.is_holds());
            }
            if iid {
                prop_assert_eq!(inst.prime.is_holds(), inst.double_prime.is_holds());
            }
        }
    }

    /// With point windows, the monotonicity step `a → a + e_j` on urns
    /// `0..n-1` is the ratio condition on the law of `(B_j, B_{n-1})`.
    #[test]
    fn point_windows_reduce_to_mukl(seed in any::<u64>(), m in 1usize..=4, n in 2usize..=4, wseed in any::<u64>()) {
        let model = model(seed, m, n, false);
        let mut r = rng(wseed);
        let j = r.gen_range(0..n - 1);
        let fixed: Vec<usize> = (0..n - 1).map(|_| r.gen_range(0..=m)).collect();
        let windows: Windows = (0..n - 1).filter(|&u| u != j).map(|u| (u, (fixed[u], fixed[u]))).collect();
        let Ok(q) = ConditioningEvent::new(&model, windows) else {
            return Ok(());
        };
        let mukl = verify_mukl(&model, &q, &[j], &[n - 1], MuklVariant::Prime).unwrap();
        let mut pairs = Vec::new();
        for x in 0..m {
            let mut lo = fixed.clone();
            lo[j] = x;
            let mut hi = lo.clone();
            hi[j] = x + 1;
            // A zero-probability window only gives 0/0 comparisons.
            if let Ok(v) = verify_mainthm_a_pair(&model, (&lo, &lo), (&hi, &hi)) {
                pairs.push(v);
            }
        }
        let any_violated = pairs.iter().any(|v| v.status == Status::Violated);
        prop_assert_eq!(any_violated, mukl.is_violated());
    }

    #[test]
    fn welsh_depends_on_size_only(s in 1usize..=12) {
        let inst = WelshInstance::new(s).unwrap();
        let by_size: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![0], vec![1], vec![2]],
            vec![vec![0, 1], vec![0, 2], vec![1, 2]],
        ];
        for group in by_size {
            let values: Vec<Rational> = group.iter().map(|l| welsh_probabilities(&inst, l).unwrap()).collect();
            prop_assert!(values.windows(2).all(|w| w[0] == w[1]));
        }
        let all = welsh_probabilities(&inst, &[2, 0, 1]).unwrap();
        prop_assert_eq!(all, welsh_probabilities(&inst, &[0, 1, 2]).unwrap());
    }

    /// When the subset law is CNA, the interval measures built on the same
    /// conditioning pass CNA too.
    #[test]
    fn nmp_positive_gives_interval_cna(seed in any::<u64>(), m in 1usize..=4, n in 2usize..=3, wseed in any::<u64>()) {
        let model = model(seed, m, n, true);
        let mut r = rng(wseed);
        let k: Vec<usize> = (0..n).collect();
        let Ok(q) = ConditioningEvent::new(&model, random_windows(&mut r, m, &[0])) else {
            return Ok(());
        };
        let nmp = match check_nmp_question(&model, &q, &k) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        if nmp.is_holds() {
            let cuts: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let c = r.gen_range(1..=m);
                    vec![0, c, m + 1]
                })
                .collect();
            let spec = IntervalSpec::new(m, cuts).unwrap();
            let mu = interval_urn_measure(&model, &spec.binning()).unwrap();
            prop_assert!(check_cna(&mu, &NaCaps::default()).is_holds());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn campaigns_are_seed_deterministic(seed in any::<u64>()) {
        let caps = SearchCaps { field_samples: 2, ..SearchCaps::default() };
        prop_assert_eq!(farr_search(seed, 6).unwrap(), farr_search(seed, 6).unwrap());
        prop_assert_eq!(ideal_search(seed, 6).unwrap(), ideal_search(seed, 6).unwrap());
        prop_assert_eq!(qcna_search(seed, 3, &caps).unwrap(), qcna_search(seed, 3, &caps).unwrap());
        prop_assert_eq!(rayleigh_search(seed, 2, 2).unwrap(), rayleigh_search(seed, 2, 2).unwrap());
    }
}
