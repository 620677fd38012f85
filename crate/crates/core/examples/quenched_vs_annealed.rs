//! Quenched against annealed tour lengths on grid weights, the comparison
//! behind the conjectured stochastic dominance. Small scale so it runs in
//! seconds; `tsp-anneal fig1` runs the full protocol and writes CSVs.

use tsp_anneal::chain::{
    annealed_mh_sample, default_annealed_burn_in, quenched_samples, AnnealedConfig, QuenchedConfig,
};
use tsp_anneal::experiment::fig1_quenched_burn_in;
use tsp_anneal::stats::{dominance_report, ecdf};
use tsp_anneal::WeightModel;

fn main() -> tsp_anneal::Result<()> {
    let (n, levels, beta, count) = (40, 50, 10.0, 400);
    let q = QuenchedConfig {
        n,
        model: WeightModel::grid(levels),
        beta,
        burn_in: fig1_quenched_burn_in(n),
        count,
        seed: 1,
    };
    let a = AnnealedConfig {
        n,
        levels,
        beta,
        burn_in: default_annealed_burn_in(n, levels),
        thinning: 1000,
        count,
        seed: 2,
    };
    let fq = ecdf(&quenched_samples(&q)?)?;
    let fa = ecdf(&annealed_mh_sample(&a)?)?;
    for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let k = ((p * count as f64) as usize).min(count - 1);
        println!(
            "quantile {p:.2}: quenched {:.3}, annealed {:.3}",
            fq.sorted_samples()[k],
            fa.sorted_samples()[k]
        );
    }
    println!("{}", serde_json::to_string_pretty(&dominance_report(&fq, &fa, 0.01)?)?);
    Ok(())
}
