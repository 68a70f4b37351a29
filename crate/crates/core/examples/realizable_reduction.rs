//! When one model can fit every group, training on the uniform mixture of
//! groups is enough for every fair malfare.

use malfare::dataset::{make_synthetic, Synthetic};
use malfare::emm::{realizable_mix_train, train_psg, TrainConfig};
use malfare::{LossKind, Power};

fn main() -> malfare::Result<()> {
    let data = make_synthetic(&Synthetic::JointlySeparable { per_group: 100 }, 2)?;
    let out = realizable_mix_train(&data, LossKind::Hinge, 0.1, 0.05, |pooled, eps, _delta| {
        let cfg = TrainConfig::for_dataset(pooled, LossKind::Hinge, Power::ONE, 4.0, eps, false)?;
        Ok(train_psg(pooled, LossKind::Hinge, &cfg)?.model)
    })?;
    println!(
        "pooled {} rows at inner tolerance {:.4}",
        out.pooled_size, out.inner_epsilon
    );
    println!("group risks {:?}", out.group_risks);
    println!(
        "max group risk {:.5}, guarantee verified: {}",
        out.max_group_risk, out.realizability_verified
    );
    Ok(())
}
