//! Property-based checks of the invariants each module promises.

use approx::assert_relative_eq;
use proptest::prelude::*;

use ppsbm::bootstrap::{bootstrap_ci, BootstrapOptions};
use ppsbm::estimate::{m_step, Estimator};
use ppsbm::events::{dyads, parse_event_csv, Event, EventStream, StreamMeta};
use ppsbm::histogram::{depth_criterion, select_depth};
use ppsbm::intensity::{Intensity, IntensityFn, PairLayout};
use ppsbm::kernel::kernel_estimate;
use ppsbm::metrics::{adjusted_rand_index, l2_risk};
use ppsbm::rng;
use ppsbm::simulator::scenario1;
use ppsbm::sparse::{compute_rho, d_tilde_matrix, evaluate_j_sparse, update_beta, DyadActivity, SparseTerms};
use ppsbm::variational::{compute_stats, update_pi, VariationalState};
use ppsbm::vem::{d_matrix, evaluate_j, fit_from_init, proportion_term, run_vem, FitConfig, IntensityTerms};

fn events_strategy(n: usize, directed: bool, max_events: usize) -> impl Strategy<Value = Vec<Event>> {
    let pairs: Vec<(usize, usize)> = dyads(n, directed).collect();
    prop::collection::vec((0.0f64..1.0, 0..pairs.len()), 0..max_events).prop_map(move |raw| {
        raw.into_iter().map(|(time, k)| Event { time, sender: pairs[k].0, receiver: pairs[k].1 }).collect()
    })
}

fn tau_strategy(n: usize, groups: usize) -> impl Strategy<Value = VariationalState> {
    prop::collection::vec(0.01f64..1.0, n * groups).prop_map(move |raw| {
        let mut w = raw;
        for row in w.chunks_mut(groups) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        VariationalState::new(n, groups, w).unwrap()
    })
}

/// Adds one event on every dyad so that no dyad is silent.
fn fully_active(n: usize, directed: bool, mut events: Vec<Event>) -> EventStream {
    for (k, (i, j)) in dyads(n, directed).enumerate() {
        events.push(Event { time: (k as f64 * 0.37).fract(), sender: i, receiver: j });
    }
    EventStream::new(n, 1.0, directed, events).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn select_depth_minimizes_criterion(counts in (0u32..7).prop_flat_map(|d| prop::collection::vec(0.0f64..50.0, 1usize << d))) {
        let chosen = select_depth(&counts);
        let d_max = counts.len().trailing_zeros();
        let best = depth_criterion(&counts, chosen);
        for d in 0..=d_max {
            let v = depth_criterion(&counts, d);
            prop_assert!(best <= v);
            if d < chosen {
                prop_assert!(v > best, "coarser depth {} ties the chosen {}", d, chosen);
            }
        }
    }

    #[test]
    fn csv_round_trip(directed in any::<bool>(), events in events_strategy(6, true, 40)) {
        prop_assume!(!events.is_empty());
        let events: Vec<Event> = if directed {
            events
        } else {
            events.into_iter().map(|e| Event { sender: e.sender.min(e.receiver), receiver: e.sender.max(e.receiver), ..e }).collect()
        };
        let stream = EventStream::new(6, 1.0, directed, events).unwrap();
        let meta = StreamMeta { n: Some(6), horizon: Some(1.0), directed: Some(directed) };
        let back = parse_event_csv(&stream.to_csv(), directed, meta).unwrap();
        prop_assert_eq!(back, stream);
    }

    #[test]
    fn aggregation_conserves_counts(events in events_strategy(5, true, 60), depth in 0u32..6) {
        let stream = EventStream::new(5, 1.0, true, events).unwrap();
        let agg = stream.aggregate_counts(depth);
        prop_assert_eq!(agg.total(), stream.len() as u64);
        for (d, total) in stream.dyad_totals().into_iter().enumerate() {
            prop_assert_eq!(agg.dyad_vector(d).iter().sum::<u64>(), u64::from(total));
        }
    }

    #[test]
    fn ari_symmetric_and_bounded(pairs in prop::collection::vec((0usize..4, 0usize..4), 2..40)) {
        let (a, b): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let ab = adjusted_rand_index(&a, &b).unwrap();
        let ba = adjusted_rand_index(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab <= 1.0 + 1e-12);
        prop_assert!((adjusted_rand_index(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_linear_in_weights(
        raw in prop::collection::vec((0.0f64..1.0, 0.0f64..2.0, 0.0f64..2.0), 1..30),
        b in 0.02f64..0.5,
        c in 0.1f64..3.0,
    ) {
        let mut raw = raw;
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let times: Vec<f64> = raw.iter().map(|r| r.0).collect();
        let w1: Vec<f64> = raw.iter().map(|r| r.1).collect();
        let w2: Vec<f64> = raw.iter().map(|r| r.2).collect();
        let mix: Vec<f64> = w1.iter().zip(&w2).map(|(x, y)| x + c * y).collect();
        let (e1, e2, em) = (
            kernel_estimate(&times, &w1, 3.0, b, 1.0, 32),
            kernel_estimate(&times, &w2, 3.0, b, 1.0, 32),
            kernel_estimate(&times, &mix, 3.0, b, 1.0, 32),
        );
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let expected = e1.value(t) + c * e2.value(t);
            prop_assert!((em.value(t) - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn update_pi_maximizes_proportion_term(tau in tau_strategy(7, 3), alt in prop::collection::vec(0.01f64..1.0, 3)) {
        let pi = update_pi(&tau);
        let s: f64 = alt.iter().sum();
        let alt: Vec<f64> = alt.iter().map(|x| x / s).collect();
        prop_assert!(proportion_term(&alt, &tau) <= proportion_term(&pi, &tau) + 1e-10);
    }

    #[test]
    fn rho_is_monotone(beta in 0.01f64..0.99, a in 0.0f64..20.0, da in 0.0f64..5.0, db in 0.0f64..0.5) {
        let r = compute_rho(beta, a);
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert!(compute_rho(beta, a + da) <= r + 1e-15);
        prop_assert!(compute_rho((beta + db).min(1.0), a) >= r - 1e-15);
    }

    #[test]
    fn beta_stays_in_unit_interval(raw in prop::collection::vec((0.0f64..50.0, 0.0f64..1.0, 0.0f64..1.0), 1..10)) {
        let y: Vec<f64> = raw.iter().map(|r| r.0).collect();
        let z: Vec<f64> = raw.iter().map(|r| r.0 * r.1).collect();
        let rho: Vec<f64> = raw.iter().map(|r| r.2).collect();
        let (beta, flagged) = update_beta(&y, &z, &rho);
        for ((b, f), y) in beta.iter().zip(&flagged).zip(&y) {
            prop_assert!((0.0..=1.0).contains(b));
            prop_assert_eq!(*f, *y <= 0.0);
        }
    }

    #[test]
    fn risk_triangle_inequality(
        f in prop::collection::vec(0.0f64..20.0, 1..9),
        g in prop::collection::vec(0.0f64..20.0, 1..9),
        h in prop::collection::vec(0.0f64..20.0, 1..9),
    ) {
        let mk = |v: Vec<f64>| IntensityFn::PiecewiseConstant { horizon: 1.0, heights: v };
        let (f, g, h) = (mk(f), mk(g), mk(h));
        let fh = l2_risk(&f, &h, 1.0, 257);
        let fg = l2_risk(&f, &g, 1.0, 257);
        let gh = l2_risk(&g, &h, 1.0, 257);
        prop_assert!(fh <= fg + gh + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sparse_reduces_to_dense_without_silent_dyads(
        directed in any::<bool>(),
        extra in events_strategy(5, true, 30),
        tau in tau_strategy(5, 2),
    ) {
        let extra = if directed { extra } else {
            extra.into_iter().map(|e| Event { sender: e.sender.min(e.receiver), receiver: e.sender.max(e.receiver), ..e }).collect()
        };
        let stream = fully_active(5, directed, extra);
        let layout = PairLayout::new(2, directed);
        let stats = compute_stats(&stream, &tau, 2);
        let times: Vec<f64> = stream.events().iter().map(|e| e.time).collect();
        let alpha = m_step(&stats, &stats.dyad_mass, &times, &Estimator::Histogram { d_max: 2 }, 1.0);
        let terms = IntensityTerms::new(&stream, layout, &alpha, 1e-10);
        let pi = update_pi(&tau);
        let activity = DyadActivity::new(&stream);
        let silent = activity.silent_mass(&tau, layout);
        prop_assert!(silent.iter().all(|&z| z == 0.0));
        let ones = vec![1.0; layout.len()];
        let sparse_terms = SparseTerms { intensity: &terms, beta: &ones, rho: &ones };
        let dense_j = evaluate_j(&pi, &terms, &stats, &tau);
        let sparse_j = evaluate_j_sparse(&pi, &sparse_terms, &stats, &silent, &tau);
        prop_assert!((dense_j - sparse_j).abs() < 1e-10, "{} vs {}", dense_j, sparse_j);
        let d = d_matrix(&stream, &tau, &terms);
        let dt = d_tilde_matrix(&stream, &activity, &tau, &sparse_terms);
        for (a, b) in d.iter().zip(&dt) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn label_switching_equivariance(seed in 0u64..1000, perm_index in 0usize..2) {
        let (sim, _) = scenario1(0.3, 12, &mut rng::from_seed(seed)).unwrap();
        let perm = [[0usize, 1], [1, 0]][perm_index];
        let tau0 = VariationalState::one_hot(&ppsbm::init::perturb_labels(&sim.labels, 2, 0.3, &mut rng::from_seed(seed + 1)), 2);
        let cfg = FitConfig::default();
        let base = fit_from_init(&sim.stream, &tau0, &cfg).unwrap();
        let switched = fit_from_init(&sim.stream, &tau0.permute_columns(&perm), &cfg).unwrap();
        for q in 0..2 {
            prop_assert!((switched.pi[q] - base.pi[perm[q]]).abs() < 1e-9);
            for l in 0..2 {
                let (a, b) = (switched.alpha(q, l), base.alpha(perm[q], perm[l]));
                for k in 0..=20 {
                    let t = k as f64 / 20.0;
                    prop_assert!((a.value(t) - b.value(t)).abs() < 1e-9);
                }
            }
        }
        prop_assert!(switched.tau.max_abs_diff(&base.tau.permute_columns(&perm)) < 1e-9);
    }

    #[test]
    fn memberships_remain_valid(seed in 0u64..1000, groups in 1usize..4) {
        let (sim, _) = scenario1(0.2, 10, &mut rng::from_seed(seed)).unwrap();
        let fit = run_vem(&sim.stream, groups, &FitConfig::default(), seed).unwrap();
        for i in 0..fit.n {
            let row = fit.tau.row(i);
            prop_assert!(row.iter().all(|&t| (0.0..=1.0).contains(&t)));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert_relative_eq!(fit.pi.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn refits_are_deterministic() {
    let (sim, _) = scenario1(0.5, 16, &mut rng::from_seed(4)).unwrap();
    let cfg = FitConfig::default();
    assert_eq!(run_vem(&sim.stream, 2, &cfg, 9).unwrap(), run_vem(&sim.stream, 2, &cfg, 9).unwrap());
}

#[test]
fn bands_widen_with_level() {
    let (sim, _) = scenario1(0.5, 16, &mut rng::from_seed(5)).unwrap();
    let cfg = FitConfig::default();
    let fit = run_vem(&sim.stream, 2, &cfg, 1).unwrap();
    let width = |level: f64| {
        let opts = BootstrapOptions { replicates: 20, level, grid_points: 41, n: 16 };
        let bands = bootstrap_ci(&fit, &opts, &cfg, 3).unwrap();
        bands.bands.iter().flat_map(|b| b.upper.iter().zip(&b.lower).map(|(u, l)| u - l)).sum::<f64>()
    };
    let (narrow, wide) = (width(0.5), width(0.9));
    assert!(wide >= narrow, "{wide} < {narrow}");
}

#[test]
fn undirected_stats_pool_orientations() {
    let stream = fully_active(4, false, vec![]);
    let tau = VariationalState::uniform(4, 2);
    let stats = compute_stats(&stream, &tau, 1);
    let total_mass: f64 = stats.dyad_mass.iter().sum();
    assert_relative_eq!(total_mass, stream.num_dyads() as f64, epsilon = 1e-12);
    let total_events: f64 = (0..stats.layout.len()).map(|s| stats.total_weight(s)).sum();
    assert_relative_eq!(total_events, stream.len() as f64, epsilon = 1e-12);
}
