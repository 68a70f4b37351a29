//! The Atkinson index of an income profile and the welfare it implies.

use malfare::inequality::{atkinson_index, welfare_via_atkinson};
use malfare::{power_mean, Power, SentimentProfile};

fn main() -> malfare::Result<()> {
    let incomes = SentimentProfile::uniform(vec![12.0, 18.0, 25.0, 40.0, 110.0])?;
    let mean = power_mean(&incomes, Power::ONE);
    println!("mean income {mean:.2}");
    println!(
        "{:>5} {:>9} {:>12} {:>12}",
        "eps", "ATK", "M_{1-eps}", "via ATK"
    );
    for eps in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let atk = atkinson_index(&incomes, eps)?;
        let p = 1.0 - eps;
        println!(
            "{eps:>5} {:>9.5} {:>12.5} {:>12.5}",
            atk.value,
            power_mean(&incomes, Power::Finite(p)),
            welfare_via_atkinson(&incomes, p)?
        );
    }
    Ok(())
}
