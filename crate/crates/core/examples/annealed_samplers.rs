//! The extended (tour, grid weights) chain against the exact annealed
//! sampler. The chain moves weights one grid step at a time, so its output is
//! strongly autocorrelated; compare light and heavy thinning.

use tsp_anneal::analytic::annealed_exact_sample;
use tsp_anneal::chain::{annealed_mh_sample, default_annealed_burn_in, AnnealedConfig};
use tsp_anneal::stats::{dkw_epsilon, ecdf, ks_distance};

fn main() -> tsp_anneal::Result<()> {
    let (n, levels, beta) = (10, 200, 2.0);
    let exact = ecdf(&annealed_exact_sample(n, beta, 100_000, 1)?)?;
    for (thinning, count) in [(1_000u64, 5_000usize), (50_000, 1_000)] {
        let cfg = AnnealedConfig {
            n,
            levels,
            beta,
            burn_in: default_annealed_burn_in(n, levels),
            thinning,
            count,
            seed: 2,
        };
        let mh = ecdf(&annealed_mh_sample(&cfg)?)?;
        let mean = mh.sorted_samples().iter().sum::<f64>() / count as f64;
        println!(
            "thinning {thinning:>6}: mean {mean:.4}, KS {:.4}, band {:.4}",
            ks_distance(&mh, &exact),
            dkw_epsilon(count, 0.01)? + dkw_epsilon(exact.count(), 0.01)?
        );
    }
    Ok(())
}
