mod common;

use malfare::dataset::{make_synthetic, read_csv, split, GroupedDataset, LoadOptions, Synthetic};
use malfare::losses::LossKind;
use malfare::Power;
use proptest::prelude::*;

fn reload(data: &GroupedDataset) -> GroupedDataset {
    let mut buf = Vec::new();
    data.write_csv(&mut buf).unwrap();
    let mut opts = LoadOptions::new("label", "group", "1");
    opts.one_hot = false;
    read_csv(buf.as_slice(), &opts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_round_trip_is_bitwise(seed in 0u64..10_000, g in 1usize..4, d in 1usize..4) {
        let data = common::random_dataset(seed, g, 7, d, false);
        let back = reload(&data);
        prop_assert_eq!(back.len(), data.len());
        for i in 0..data.len() {
            let a: Vec<u64> = data.row(i).iter().map(|x| x.to_bits()).collect();
            let b: Vec<u64> = back.row(i).iter().map(|x| x.to_bits()).collect();
            prop_assert_eq!(a, b);
            prop_assert_eq!(data.label(i), back.label(i));
        }
        prop_assert_eq!(back.group_names(), data.group_names());
    }

    #[test]
    fn weights_and_bias_recompute_idempotently(seed in 0u64..10_000) {
        let data = common::random_dataset(seed, 3, 9, 2, true);
        let freq = data.group_frequencies();
        let again = data.clone().with_group_weights(freq.clone()).unwrap();
        prop_assert_eq!(again.group_frequencies(), freq.clone());
        prop_assert_eq!(again.group_weights(), freq.as_slice());
        prop_assert_eq!(again.compute_class_bias(), data.compute_class_bias());
        prop_assert_eq!(again.class_bias(), data.class_bias());
    }
}

#[test]
fn categorical_columns_are_one_hot_encoded() {
    let csv = "age,color,group,label\n30,red,a,yes\n40,blue,a,no\n50,red,b,yes\n20,green,b,no\n";
    let data = read_csv(csv.as_bytes(), &LoadOptions::new("label", "group", "yes")).unwrap();
    assert_eq!(
        data.feature_names(),
        &["age", "color=blue", "color=green", "color=red"]
    );
    assert_eq!(data.row(0), &[30.0, 0.0, 0.0, 1.0]);
    assert_eq!(data.labels(), &[1.0, -1.0, 1.0, -1.0]);
    assert_eq!(data.group_weights(), &[0.5, 0.5]);
}

#[test]
fn split_halves_share_seed_and_weights() {
    let data = make_synthetic(
        &Synthetic::Heterogeneous {
            groups: 5,
            per_group: 100,
        },
        2,
    )
    .unwrap();
    let (a, b) = split(&data, 0.1, 99).unwrap();
    let (c, d) = split(&data, 0.1, 99).unwrap();
    assert_eq!(a, c);
    assert_eq!(b, d);
    assert_eq!(a.group_weights(), data.group_weights());
    assert_eq!(a.len() + b.len(), data.len());
}

#[test]
fn conflict_task_separates_utilitarian_from_egalitarian() {
    let data = make_synthetic(
        &Synthetic::Conflict1d {
            per_group: 20,
            weight_a: 0.6,
        },
        1,
    )
    .unwrap();
    let w = data.group_weights().to_vec();
    let (_, _, utilitarian) = common::brute_force_stumps(&data, LossKind::ZeroOne, Power::ONE, &w);
    assert_eq!(utilitarian, vec![0.0, 1.0]);
    let (value, _, egalitarian) =
        common::brute_force_stumps(&data, LossKind::ZeroOne, Power::PosInf, &w);
    assert_eq!(egalitarian, vec![0.5, 0.5]);
    assert_eq!(value, 0.5);
}
