//! Why Nash social welfare cannot be estimated: a rare positive outcome
//! makes the plug-in geometric mean zero with high probability.

use malfare::estimation::{nsw_hardness_bound, nsw_hardness_simulate};

fn main() -> malfare::Result<()> {
    for p_bias in [0.2, 0.04, 0.01] {
        let m = nsw_hardness_bound(p_bias, 0.05)?;
        let sim = nsw_hardness_simulate(p_bias, m as usize, 50_000, 1, 0.5)?;
        println!(
            "p_bias {p_bias:<5} m {m:>4}  all-zero frequency {:.4} (expected {:.4})",
            sim.all_zero_fraction, sim.expected
        );
    }
    Ok(())
}
