//! With three cities there is one tour, so the quenched length is Irwin-Hall
//! while the annealed law is its exponential tilt. The tilt only moves mass
//! down, so the annealed CDF sits above the Irwin-Hall CDF.

use tsp_anneal::analytic::{annealed_cdf, irwin_hall_cdf};
use tsp_anneal::chain::{quenched_samples, QuenchedConfig};
use tsp_anneal::stats::{dkw_epsilon, ecdf};
use tsp_anneal::WeightModel;

fn main() -> tsp_anneal::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "j", "IH(3)", "b = 0.5", "b = 2", "b = 10");
    for i in 0..=12 {
        let j = i as f64 / 4.0;
        println!(
            "{j:>5.2} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            irwin_hall_cdf(3, j)?,
            annealed_cdf(3, 0.5, j)?,
            annealed_cdf(3, 2.0, j)?,
            annealed_cdf(3, 10.0, j)?
        );
    }
    let cfg = QuenchedConfig {
        n: 3,
        model: WeightModel::ContinuousUniform,
        beta: 2.0,
        burn_in: 1,
        count: 50_000,
        seed: 5,
    };
    let f = ecdf(&quenched_samples(&cfg)?)?;
    println!(
        "\nquenched ECDF vs Irwin-Hall: sup distance {:.4}, DKW band {:.4}",
        f.sup_distance_to(|j| irwin_hall_cdf(3, j).unwrap()),
        dkw_epsilon(f.count(), 0.01)?
    );
    Ok(())
}
