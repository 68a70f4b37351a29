//! Power means across `p` for one risk profile, and what the welfare and
//! malfare wrappers accept.

use malfare::aggregator::{cas_mean, malfare, welfare};
use malfare::{power_mean, Power, PowerSpec, SentimentProfile};

fn main() -> malfare::Result<()> {
    // per-group risks, weighted by group size
    let risks = SentimentProfile::new(vec![0.05, 0.12, 0.40], vec![0.5, 0.3, 0.2])?;

    println!("{:>6} {:>10} {:>10}", "p", "M_p", "CAS");
    for p in [
        Power::NegInf,
        Power::Finite(-1.0),
        Power::Finite(0.0),
        Power::ONE,
        Power::Finite(2.0),
        Power::Finite(8.0),
        Power::PosInf,
    ] {
        let cas = match p {
            Power::Finite(q) => format!("{:.5}", cas_mean(&risks, q)?),
            _ => "-".into(),
        };
        println!(
            "{:>6} {:>10.5} {:>10}",
            p.to_string(),
            power_mean(&risks, p),
            cas
        );
    }

    // the fair constructors refuse the wrong side of p = 1
    println!(
        "fair malfare at p=2: {:.5}",
        malfare(&risks, &PowerSpec::fair_malfare(Power::Finite(2.0))?)?
    );
    println!(
        "fair malfare at p=0.5: {}",
        PowerSpec::fair_malfare(Power::Finite(0.5)).unwrap_err()
    );

    let incomes = SentimentProfile::uniform(vec![20.0, 35.0, 90.0])?;
    println!(
        "Nash welfare of incomes: {:.3}",
        welfare(&incomes, &PowerSpec::fair_welfare(Power::Finite(0.0))?)?
    );
    Ok(())
}
