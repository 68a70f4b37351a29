//! Load a grouped CSV with a categorical column, z-score it, split it and
//! train a fair logistic model.

use malfare::dataset::{load_csv, split, LoadOptions, ZScore};
use malfare::emm::{train_psg, TrainConfig};
use malfare::{LossKind, Power};

fn main() -> malfare::Result<()> {
    let dir = std::env::temp_dir().join("malfare-csv-pipeline");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("people.csv");
    let mut text = String::from("age,hours,sector,sex,income\n");
    for i in 0..300 {
        let age = 18 + (i * 7) % 50;
        let hours = 20 + (i * 13) % 40;
        let sector = ["private", "public", "self"][i % 3];
        let sex = if i % 4 == 0 { "F" } else { "M" };
        let rich = age + hours + if sector == "self" { 15 } else { 0 } > 85;
        text.push_str(&format!(
            "{age},{hours},{sector},{sex},{}\n",
            if rich { ">50K" } else { "<=50K" }
        ));
    }
    std::fs::write(&path, text)?;

    let data = load_csv(&path, &LoadOptions::new("income", "sex", ">50K"))?;
    println!(
        "features {:?}, groups {:?}, weights {:?}",
        data.feature_names(),
        data.group_names(),
        data.group_weights()
    );
    let (mut train, mut test) = split(&data, 0.2, 1)?;
    let z = ZScore::fit(&train)?;
    z.apply(&mut train);
    z.apply(&mut test);

    let cfg = TrainConfig::for_dataset(
        &train,
        LossKind::LogisticCE,
        Power::Finite(2.0),
        1.0,
        0.2,
        false,
    )?;
    let out = train_psg(&train, LossKind::LogisticCE, &cfg)?;
    println!(
        "train risks {:?}",
        out.model
            .group_risks(&train, LossKind::LogisticCE, false)?
            .per_group
    );
    println!(
        "test risks  {:?}",
        out.model
            .group_risks(&test, LossKind::LogisticCE, false)?
            .per_group
    );
    Ok(())
}
