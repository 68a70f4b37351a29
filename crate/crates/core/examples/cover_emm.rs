//! Exact 0-1 EMM over decision stumps on the conflicting-groups task.

use malfare::dataset::{make_synthetic, Synthetic};
use malfare::emm::{train_cover, CoverConfig};
use malfare::Power;

fn main() -> malfare::Result<()> {
    let data = make_synthetic(
        &Synthetic::Conflict1d {
            per_group: 20,
            weight_a: 0.6,
        },
        1,
    )?;
    for p in [Power::ONE, Power::Finite(2.0), Power::PosInf] {
        let (stump, report) = train_cover(&data, &CoverConfig::zero_one(&data, p, 0.1, 0.05))?;
        println!(
            "p={p:<3} stump x{} > {:.3} => {:+}  risks {:?}  objective {:.3}",
            stump.feature, stump.threshold, stump.direction, report.group_risks, report.objective
        );
    }
    let (_, report) = train_cover(
        &data,
        &CoverConfig::zero_one(&data, Power::PosInf, 0.1, 0.05),
    )?;
    println!(
        "cover size {} (union {}), gamma {:.4}, samples for uniform convergence {}",
        report.cover_size, report.union_cover_size, report.gamma, report.m_uc
    );
    Ok(())
}
