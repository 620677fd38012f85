//! Monte Carlo over weight draws with exact tour enumeration: the expected
//! partition function and the quenched mean and variance against their
//! closed-form counterparts.

use tsp_anneal::analytic::{cost_lower_bound, expected_partition_function, variance_upper_bound};
use tsp_anneal::oracle::{mc_expected_partition, quenched_compound_stats};

fn main() -> tsp_anneal::Result<()> {
    let n = 6;
    for beta in [0.5, 2.0, 8.0] {
        let z = mc_expected_partition(n, beta, 20_000, 1)?;
        let q = quenched_compound_stats(n, beta, 5000, 2)?;
        println!("beta = {beta}");
        println!(
            "  E Z: MC {:.5e} +- {:.1e}, closed form {:.5e}; mean ln Z {:.4} <= ln E Z {:.4}",
            z.estimate,
            z.std_error,
            expected_partition_function(n, beta)?,
            z.mean_ln_z,
            z.ln_estimate
        );
        println!(
            "  quenched E J {:.4} >= {:.4}; E Var {:.4} <= {:.4}",
            q.mean,
            cost_lower_bound(n, beta)?,
            q.mean_variance,
            variance_upper_bound(n, beta)?.tight
        );
    }
    Ok(())
}
