use malfare::aggregator::{affine_shift_mean, cas_mean, power_mean, Power, SentimentProfile};
use malfare::inequality::{atkinson_index, welfare_via_atkinson};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn p_grid() -> Vec<Power> {
    let mut grid = vec![Power::NegInf];
    grid.extend([-4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0].map(Power::Finite));
    grid.push(Power::PosInf);
    grid
}

fn fair_malfare_ps() -> Vec<Power> {
    let mut v: Vec<Power> = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0].map(Power::Finite).to_vec();
    v.push(Power::PosInf);
    v
}

/// (values, weights) with `g ∈ [1, 8]` and values in `[0, 5]`.
fn profile_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=8).prop_flat_map(|g| {
        (
            prop::collection::vec(0.0f64..5.0, g),
            prop::collection::vec(0.05f64..1.0, g),
        )
    })
}

fn pair_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..=8).prop_flat_map(|g| {
        (
            prop::collection::vec(0.0f64..5.0, g),
            prop::collection::vec(0.0f64..5.0, g),
            prop::collection::vec(0.05f64..1.0, g),
        )
    })
}

fn profile(values: &[f64], weights: &[f64]) -> SentimentProfile {
    let total: f64 = weights.iter().sum();
    SentimentProfile::new(values.to_vec(), weights.iter().map(|w| w / total).collect()).unwrap()
}

proptest! {
    #[test]
    fn nondecreasing_in_p((values, weights) in profile_strategy()) {
        let prof = profile(&values, &weights);
        let m: Vec<f64> = p_grid().into_iter().map(|p| power_mean(&prof, p)).collect();
        for w in m.windows(2) {
            prop_assert!(w[1] >= w[0] - TOL * w[0].max(1.0), "{m:?}");
        }
    }

    #[test]
    fn strictly_increasing_off_constants(
        values in prop::collection::vec(0.1f64..5.0, 2..=8),
    ) {
        let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assume!(spread > 1e-2);
        let prof = SentimentProfile::uniform(values).unwrap();
        let m: Vec<f64> = p_grid().into_iter().map(|p| power_mean(&prof, p)).collect();
        for w in m.windows(2) {
            prop_assert!(w[1] - w[0] > 1e-9 * w[0], "{m:?}");
        }
    }

    #[test]
    fn subadditive_for_fair_malfare((a, b, w) in pair_strategy()) {
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        for p in fair_malfare_ps() {
            let lhs = power_mean(&profile(&sum, &w), p);
            let rhs = power_mean(&profile(&a, &w), p) + power_mean(&profile(&b, &w), p);
            prop_assert!(lhs <= rhs + TOL * rhs.max(1.0), "p={p}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn contraction_for_fair_malfare((a, b, w) in pair_strategy()) {
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect();
        let sup = diff.iter().copied().fold(0.0, f64::max);
        for p in fair_malfare_ps() {
            let gap = (power_mean(&profile(&a, &w), p) - power_mean(&profile(&b, &w), p)).abs();
            let md = power_mean(&profile(&diff, &w), p);
            prop_assert!(gap <= md + TOL * md.max(1.0), "p={p}: {gap} > {md}");
            prop_assert!(md <= sup + TOL);
        }
    }

    #[test]
    fn convex_above_one_concave_below((a, b, w) in pair_strategy(), lam in 0.0f64..=1.0) {
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lam * x + (1.0 - lam) * y).collect();
        for p in p_grid() {
            let lhs = power_mean(&profile(&mix, &w), p);
            let rhs = lam * power_mean(&profile(&a, &w), p) + (1.0 - lam) * power_mean(&profile(&b, &w), p);
            let slack = TOL * rhs.max(1.0);
            if p >= Power::ONE {
                prop_assert!(lhs <= rhs + slack, "convexity p={p}: {lhs} > {rhs}");
            }
            if p <= Power::ONE {
                prop_assert!(lhs >= rhs - slack, "concavity p={p}: {lhs} < {rhs}");
            }
        }
    }

    #[test]
    fn symmetric_under_joint_permutation((values, weights) in profile_strategy(), shift in 0usize..8) {
        let g = values.len();
        let k = shift % g;
        let mut pv = values.clone();
        let mut pw = weights.clone();
        pv.rotate_left(k);
        pw.rotate_left(k);
        for p in p_grid() {
            let x = power_mean(&profile(&values, &weights), p);
            let y = power_mean(&profile(&pv, &pw), p);
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn homogeneous_and_unit_scale((values, weights) in profile_strategy(), alpha in 0.01f64..100.0) {
        let scaled: Vec<f64> = values.iter().map(|v| alpha * v).collect();
        let ones = vec![1.0; values.len()];
        for p in p_grid() {
            let x = alpha * power_mean(&profile(&values, &weights), p);
            let y = power_mean(&profile(&scaled, &weights), p);
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300), "p={p}: {x} vs {y}");
            prop_assert!((power_mean(&profile(&ones, &weights), p) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn independence_of_unconcerned_agents(
        a in prop::collection::vec(0.1f64..5.0, 2),
        b in prop::collection::vec(0.1f64..5.0, 2),
        c in 0.1f64..5.0,
        c2 in 0.1f64..5.0,
        w in prop::collection::vec(0.05f64..1.0, 3),
    ) {
        for p in p_grid() {
            let m = |x: &[f64], last: f64| power_mean(&profile(&[x[0], x[1], last], &w), p);
            let before = m(&a, c) - m(&b, c);
            let after = m(&a, c2) - m(&b, c2);
            let scale = m(&a, c).max(m(&b, c)).max(1.0);
            if before.abs() > 1e-9 * scale && after.abs() > 1e-9 * scale {
                prop_assert_eq!(before > 0.0, after > 0.0, "p={}", p);
            }
        }
    }

    #[test]
    fn pigou_dalton_direction((values, weights) in profile_strategy(), i in 0usize..8, j in 0usize..8, u in 0.0f64..=1.0) {
        let g = values.len();
        let (i, j) = (i % g, j % g);
        prop_assume!(i != j && values[i] != values[j]);
        let total: f64 = weights.iter().sum();
        let w: Vec<f64> = weights.iter().map(|x| x / total).collect();
        let (lo, hi) = if values[i] < values[j] { (i, j) } else { (j, i) };
        // weighted-mean-preserving transfer from `hi` to `lo` that keeps their order
        let t = u * (values[hi] - values[lo]) / (1.0 / w[lo] + 1.0 / w[hi]);
        let mut moved = values.clone();
        moved[lo] += t / w[lo];
        moved[hi] -= t / w[hi];
        for p in p_grid() {
            let before = power_mean(&profile(&values, &w), p);
            let after = power_mean(&profile(&moved, &w), p);
            let slack = 1e-12 * before.max(1.0);
            if p <= Power::ONE {
                prop_assert!(after >= before - slack, "welfare p={p}: {after} < {before}");
            }
            if p >= Power::ONE {
                prop_assert!(after <= before + slack, "malfare p={p}: {after} > {before}");
            }
        }
    }

    #[test]
    fn affine_shift_tends_to_utilitarian(values in prop::collection::vec(0.0f64..3.0, 1..=6), p in -2.0f64..4.0) {
        let prof = SentimentProfile::uniform(values).unwrap();
        let m1 = power_mean(&prof, Power::ONE);
        let gaps: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&b| (affine_shift_mean(&prof, Power::Finite(p), b).unwrap() - m1).abs())
            .collect();
        prop_assert!(gaps[1] <= gaps[0] + 1e-9 && gaps[2] <= gaps[1] + 1e-9, "{gaps:?}");
        prop_assert!(gaps[2] < 1e-2);
    }

    #[test]
    fn cas_is_signed_power((values, weights) in profile_strategy(), p in -3.0f64..3.0) {
        prop_assume!(p.abs() > 1e-3);
        prop_assume!(values.iter().all(|&v| v > 1e-3));
        let prof = profile(&values, &weights);
        let cas = cas_mean(&prof, p).unwrap();
        let want = p.signum() * power_mean(&prof, Power::Finite(p)).powf(p);
        prop_assert!((cas - want).abs() <= 1e-10 * want.abs().max(1.0), "{cas} vs {want}");
    }

    #[test]
    fn atkinson_identity((values, weights) in profile_strategy(), p in -3.0f64..=1.0) {
        let prof = profile(&values, &weights);
        let m1 = power_mean(&prof, Power::ONE);
        prop_assume!(m1 > 0.0);
        let via = welfare_via_atkinson(&prof, p).unwrap();
        let direct = power_mean(&prof, Power::Finite(p));
        prop_assert!((via - direct).abs() <= 1e-10 * m1.max(1.0));
    }

    #[test]
    fn atkinson_in_unit_range((values, weights) in profile_strategy(), eps in 0.0f64..=1.0) {
        prop_assume!(values.iter().all(|&v| v > 0.0));
        let atk = atkinson_index(&profile(&values, &weights), eps).unwrap();
        prop_assert!(!atk.extended_range);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&atk.value), "{}", atk.value);
    }
}
