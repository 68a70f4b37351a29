//! Projected-subgradient EMM on two groups, utilitarian versus egalitarian.

use malfare::dataset::{make_synthetic, Synthetic};
use malfare::emm::{train_psg, TrainConfig};
use malfare::{LossKind, Power};

fn main() -> malfare::Result<()> {
    let data = make_synthetic(&Synthetic::TwoGaussians2group { per_group: 200 }, 4)?;
    for p in [Power::ONE, Power::Finite(4.0), Power::PosInf] {
        let mut cfg = TrainConfig::for_dataset(&data, LossKind::Hinge, p, 2.0, 0.1, false)?;
        cfg.seed = 4;
        let out = train_psg(&data, LossKind::Hinge, &cfg)?;
        let risks = out
            .model
            .group_risks(&data, LossKind::Hinge, false)?
            .per_group;
        println!(
            "p={p:<3} n={} alpha={:.2e} objective {:.4} (best at {}) risks {:?} theta {:?}",
            out.plan.n,
            out.plan.alpha,
            out.best_objective,
            out.best_iter,
            risks
                .iter()
                .map(|r| (r * 1e4).round() / 1e4)
                .collect::<Vec<_>>(),
            out.model
                .theta
                .iter()
                .map(|t| (t * 1e3).round() / 1e3)
                .collect::<Vec<_>>(),
        );
    }
    Ok(())
}
