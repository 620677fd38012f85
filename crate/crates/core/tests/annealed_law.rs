//! The annealed tour-length law three ways: quadrature CDF, exact sampler and
//! the extended Markov chain.

use tsp_anneal::analytic::{annealed_cdf, annealed_exact_sample, cost_lower_bound, variance_upper_bound};
use tsp_anneal::chain::{annealed_mh_sample, default_annealed_burn_in, AnnealedConfig};
use tsp_anneal::stats::{dkw_epsilon, ecdf, ks_distance};

#[test]
fn exact_draws_match_quadrature_cdf() {
    let xs = annealed_exact_sample(10, 2.0, 100_000, 21).unwrap();
    let f = ecdf(&xs).unwrap();
    let d = f.sup_distance_to(|j| annealed_cdf(10, 2.0, j).unwrap());
    assert!(d <= dkw_epsilon(xs.len(), 0.01).unwrap(), "sup distance {d}");
}

#[test]
fn exact_draws_have_closed_form_moments() {
    let k = 200_000;
    for (n, beta) in [(10usize, 2.0), (40, 0.7)] {
        let xs = annealed_exact_sample(n, beta, k, 22).unwrap();
        let mean = xs.iter().sum::<f64>() / k as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k as f64 - 1.0);
        let target_var = variance_upper_bound(n, beta).unwrap().tight;
        assert!((mean - cost_lower_bound(n, beta).unwrap()).abs() < 3.0 * (var / k as f64).sqrt());
        // sample variance has relative standard error about sqrt(2 / k)
        assert!((var / target_var - 1.0).abs() < 4.0 * (2.0 / k as f64).sqrt(), "{var} vs {target_var}");
    }
}

#[test]
fn extended_chain_with_heavy_thinning_matches_exact_sampler() {
    let cfg = AnnealedConfig {
        n: 10,
        levels: 200,
        beta: 2.0,
        burn_in: default_annealed_burn_in(10, 200),
        thinning: 50_000,
        count: 1000,
        seed: 23,
    };
    let mh = ecdf(&annealed_mh_sample(&cfg).unwrap()).unwrap();
    let exact = ecdf(&annealed_exact_sample(10, 2.0, 100_000, 24).unwrap()).unwrap();
    let ks = ks_distance(&mh, &exact);
    let band = dkw_epsilon(1000, 0.01).unwrap() + dkw_epsilon(100_000, 0.01).unwrap();
    assert!(ks <= band, "KS {ks} vs {band}");
}
