//! Confidence brackets for malfare from per-group loss samples.

use malfare::estimation::{
    hoeffding_epsilon, malfare_bracket, simulate_bracket_coverage, BoundMethod, Variances,
};
use malfare::Power;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> malfare::Result<()> {
    let means = [0.1, 0.3, 0.6];
    let weights = [0.5, 0.3, 0.2];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<Vec<f64>> = means
        .iter()
        .map(|&q| {
            (0..800)
                .map(|_| if rng.random_bool(q) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();

    println!(
        "hoeffding radius per group: {:.5}",
        hoeffding_epsilon(1.0, 3, 0.05, 800)?
    );
    for p in [Power::ONE, Power::Finite(2.0), Power::PosInf] {
        let h = malfare_bracket(
            &samples,
            &weights,
            p,
            BoundMethod::Hoeffding,
            0.05,
            1.0,
            None,
        )?;
        let b = malfare_bracket(
            &samples,
            &weights,
            p,
            BoundMethod::Bennett,
            0.05,
            1.0,
            Some(&Variances::Empirical),
        )?;
        println!(
            "p={p:<3} estimate {:.4}  hoeffding [{:.4}, {:.4}]  bennett [{:.4}, {:.4}]",
            h.estimate, h.lower, h.upper, b.lower, b.upper
        );
    }

    let cov = simulate_bracket_coverage(
        &[0.2, 0.5, 0.8],
        &[1.0 / 3.0; 3],
        500,
        0.1,
        &[Power::ONE, Power::PosInf],
        1000,
        9,
    )?;
    for row in &cov.rows {
        println!("coverage at p={}: {}/{}", row.p, row.covered, row.trials);
    }
    Ok(())
}
