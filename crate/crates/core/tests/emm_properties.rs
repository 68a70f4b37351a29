mod common;

use malfare::dataset::{make_synthetic, GroupedDataset, Synthetic};
use malfare::emm::{
    emm_objective, emm_subgradient, enumerate_stump_cover, sweep_p, train_cover, train_psg,
    CoverConfig, Objective, Stump, TrainConfig,
};
use malfare::losses::{loss_value, LossKind};
use malfare::Power;
use proptest::prelude::*;
use rand::Rng;

fn fair_p() -> impl Strategy<Value = Power> {
    prop::sample::select(vec![
        Power::ONE,
        Power::Finite(2.0),
        Power::Finite(5.0),
        Power::PosInf,
    ])
}

fn convex_kind() -> impl Strategy<Value = LossKind> {
    prop::sample::select(vec![
        LossKind::Hinge,
        LossKind::LogisticCE,
        LossKind::Square,
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subgradient_inequality_holds(
        seed in 0u64..10_000,
        kind in convex_kind(),
        p in fair_p(),
        t1 in prop::collection::vec(-2.0f64..2.0, 3),
        t2 in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let data = common::random_dataset(seed, 3, 12, 3, false);
        let w = data.group_weights().to_vec();
        let f1 = emm_objective(&t1, &data, kind, p, &w).unwrap();
        let f2 = emm_objective(&t2, &data, kind, p, &w).unwrap();
        let g = emm_subgradient(&t1, &data, kind, p, &w).unwrap();
        let lin: f64 = g.iter().zip(t2.iter().zip(&t1)).map(|(gi, (b, a))| gi * (b - a)).sum();
        prop_assert!(f2 >= f1 + lin - 1e-8, "{f2} < {f1} + {lin}");
    }

    #[test]
    fn cover_search_equals_brute_force(
        seed in 0u64..10_000,
        g in 1usize..4,
        d in 1usize..4,
        discrete in prop::bool::ANY,
        p in fair_p(),
    ) {
        let data = common::random_dataset(seed, g, 200 / (g * 2), d, discrete);
        let w = data.group_weights().to_vec();
        let (stump, report) = train_cover(&data, &CoverConfig::zero_one(&data, p, 0.2, 0.1)).unwrap();
        let (best, idx, risks) = common::brute_force_stumps(&data, LossKind::ZeroOne, p, &w);
        prop_assert_eq!(report.objective, best);
        prop_assert_eq!(report.stump_index, idx);
        prop_assert_eq!(&report.group_risks, &risks);
        prop_assert_eq!(stump, common::all_stumps(&data)[idx]);
    }

    #[test]
    fn cover_contains_every_stump_behaviour(seed in 0u64..10_000, probes in prop::collection::vec((0usize..3, -4.0f64..4.0, prop::bool::ANY), 20)) {
        let data = common::random_dataset(seed, 3, 15, 3, true);
        let cover = enumerate_stump_cover(&data, 0.0).unwrap();
        for (feature, threshold, up) in probes {
            let h = Stump { feature, threshold, direction: if up { 1 } else { -1 } };
            // min over the cover of the max over groups of the root-mean-square loss gap
            let best = cover
                .stumps
                .iter()
                .map(|c| {
                    data.members()
                        .iter()
                        .map(|rows| {
                            let ms: f64 = rows
                                .iter()
                                .map(|&i| {
                                    let (x, y) = (data.row(i), data.label(i));
                                    (loss_value(LossKind::ZeroOne, y, h.predict(x))
                                        - loss_value(LossKind::ZeroOne, y, c.predict(x)))
                                    .powi(2)
                                })
                                .sum::<f64>()
                                / rows.len() as f64;
                            ms.sqrt()
                        })
                        .fold(0.0, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            prop_assert_eq!(best, 0.0);
        }
    }
}

#[test]
fn logistic_subgradient_matches_central_differences() {
    let h = 1e-6;
    let mut r = common::rng(17);
    for case in 0..60 {
        let data = common::random_dataset(case, 3, 20, 3, false);
        let theta: Vec<f64> = (0..3).map(|_| r.random_range(-1.5..1.5)).collect();
        for p in [Power::ONE, Power::Finite(2.0), Power::Finite(5.0)] {
            let obj = Objective::new(LossKind::LogisticCE, p, data.group_weights(), false).unwrap();
            let g = obj.subgradient(&theta, &data).unwrap();
            let fd: Vec<f64> = (0..3)
                .map(|j| {
                    let mut up = theta.clone();
                    let mut down = theta.clone();
                    up[j] += h;
                    down[j] -= h;
                    (obj.value(&up, &data).unwrap() - obj.value(&down, &data).unwrap()) / (2.0 * h)
                })
                .collect();
            let err = common::l2(&g.iter().zip(&fd).map(|(a, b)| a - b).collect::<Vec<_>>());
            assert!(
                err <= 1e-4 * common::l2(&fd).max(1e-2),
                "case {case} p {p}: {g:?} vs {fd:?}"
            );
        }
    }
}

fn small_config(data: &GroupedDataset, kind: LossKind, p: Power, eps: f64) -> TrainConfig {
    TrainConfig::for_dataset(data, kind, p, 1.5, eps, false).unwrap()
}

#[test]
fn identical_configs_give_identical_traces() {
    let data = common::random_dataset(4, 3, 30, 2, false);
    for p in [Power::ONE, Power::Finite(3.0), Power::PosInf] {
        let cfg = small_config(&data, LossKind::Hinge, p, 0.2);
        let a = train_psg(&data, LossKind::Hinge, &cfg).unwrap();
        let b = train_psg(&data, LossKind::Hinge, &cfg).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        assert!(a
            .trace
            .iter()
            .zip(&b.trace)
            .all(|(x, y)| x.objective.to_bits() == y.objective.to_bits()));
        assert_eq!(a.model_file(), b.model_file());
    }
}

#[test]
fn psg_gap_to_grid_oracle() {
    for (seed, eps) in [(1, 0.1), (2, 0.05)] {
        let data = make_synthetic(&Synthetic::TwoGaussians2group { per_group: 40 }, seed).unwrap();
        for p in [Power::ONE, Power::PosInf] {
            let cfg = TrainConfig::for_dataset(&data, LossKind::Hinge, p, 1.0, eps, false).unwrap();
            let out = train_psg(&data, LossKind::Hinge, &cfg).unwrap();
            let pitch = eps / (4.0 * cfg.lambda_ell * cfg.lambda_h);
            let (oracle, _) =
                common::grid_oracle_min(&data, LossKind::Hinge, p, &out.weights, 1.0, pitch);
            assert!(
                out.best_objective <= oracle + eps,
                "p {p}: {} vs {oracle}",
                out.best_objective
            );
        }
    }
}

#[test]
fn p_one_equals_pooled_erm() {
    // equal group sizes and uniform weights make the pooled sample the
    // p = 1 mixture
    let data = common::random_dataset(8, 3, 25, 2, false);
    let w = vec![1.0 / 3.0; 3];
    let mut cfg = small_config(&data, LossKind::LogisticCE, Power::ONE, 0.2);
    cfg.weights = w;
    let grouped = train_psg(&data, LossKind::LogisticCE, &cfg).unwrap();
    let pooled = data
        .pooled(&(0..data.len()).collect::<Vec<_>>(), "all")
        .unwrap();
    let mut pcfg = cfg.clone();
    pcfg.weights = vec![1.0];
    let single = train_psg(&pooled, LossKind::LogisticCE, &pcfg).unwrap();
    assert_eq!(grouped.plan, single.plan);
    assert!((grouped.best_objective - single.best_objective).abs() <= 2.0 * grouped.plan.eps_opt);
}

#[test]
fn shared_point_cloud_is_fit_below_epsilon() {
    let data = make_synthetic(&Synthetic::JointlySeparable { per_group: 50 }, 11).unwrap();
    let cfg =
        TrainConfig::for_dataset(&data, LossKind::Hinge, Power::PosInf, 3.0, 0.05, false).unwrap();
    let out = train_psg(&data, LossKind::Hinge, &cfg).unwrap();
    assert!(out.best_objective < 0.01, "{}", out.best_objective);
    assert!(out.trace.iter().any(|t| t.objective < 0.05));
}

#[test]
fn sweep_malfare_is_monotone_in_p() {
    let data = make_synthetic(
        &Synthetic::Heterogeneous {
            groups: 3,
            per_group: 40,
        },
        5,
    )
    .unwrap();
    let base =
        TrainConfig::for_dataset(&data, LossKind::Hinge, Power::ONE, 1.0, 0.2, false).unwrap();
    let grid: Vec<Power> = [1.0, 2.0, 4.0, 8.0].map(Power::Finite).to_vec();
    let rows = sweep_p(&data, None, LossKind::Hinge, &grid, &base).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].train_malfare >= w[0].train_malfare - 2.0 * w[0].eps_opt);
    }
}

#[test]
fn identical_groups_give_flat_sweep() {
    let one = common::random_dataset(3, 1, 30, 2, false);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for k in 0..3 {
        for i in 0..one.len() {
            rows.push(one.row(i).to_vec());
            labels.push(one.label(i));
            groups.push(k);
        }
    }
    let data = GroupedDataset::new(
        rows,
        labels,
        groups,
        one.feature_names().to_vec(),
        vec!["a".into(), "b".into(), "c".into()],
    )
    .unwrap();
    let base =
        TrainConfig::for_dataset(&data, LossKind::Hinge, Power::ONE, 1.0, 0.3, false).unwrap();
    let grid = [Power::ONE, Power::Finite(4.0), Power::PosInf];
    let out = sweep_p(&data, None, LossKind::Hinge, &grid, &base).unwrap();
    for row in &out {
        assert!((row.train_malfare - out[0].train_malfare).abs() < 1e-9);
        assert!(common::max_abs_diff(&row.train_risks, &out[0].train_risks) < 1e-9);
    }
}
