//! Train across a grid of `p` on five groups of varying difficulty and write
//! the per-group risks as CSV.

use malfare::dataset::{make_synthetic, split, Synthetic};
use malfare::emm::{sweep_p, write_sweep_csv, TrainConfig};
use malfare::{LossKind, Power};

fn main() -> malfare::Result<()> {
    let data = make_synthetic(
        &Synthetic::Heterogeneous {
            groups: 5,
            per_group: 200,
        },
        7,
    )?;
    let (train, test) = split(&data, 0.2, 7)?;
    let base = TrainConfig::for_dataset(&train, LossKind::Hinge, Power::ONE, 2.0, 0.2, false)?;
    let grid: Vec<Power> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0].map(Power::Finite).to_vec();
    let rows = sweep_p(&train, Some(&test), LossKind::Hinge, &grid, &base)?;
    write_sweep_csv(&rows, data.group_names(), std::io::stdout().lock())?;
    Ok(())
}
