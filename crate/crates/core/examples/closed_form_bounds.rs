//! Equilibrium bounds of the annealed model, their values along the
//! logarithmic schedule, and the mixing-time bound of the 2-opt chain.

use tsp_anneal::analytic::{bound_report, schedule_bounds, two_opt_mixing_time_bound};

fn main() -> tsp_anneal::Result<()> {
    let r = bound_report(100, 10.0)?;
    println!("{}", serde_json::to_string_pretty(&r)?);

    println!("\n{:>12} {:>8} {:>12} {:>12}", "t", "beta", "E J >=", "Var <=");
    for k in [1, 3, 6, 9, 12, 15] {
        let t = 10f64.powi(k);
        let s = schedule_bounds(100, 100.0, t)?;
        println!(
            "{t:>12.0e} {:>8.4} {:>12.4} {:>12.2}",
            s.beta, s.expected_cost_lower, s.variance_upper_tight
        );
    }

    println!("\nmixing-time bound at epsilon = 0.01:");
    for n in [5, 10, 50] {
        println!("  n = {n:>3}, t = 100: {:.3e} steps", two_opt_mixing_time_bound(n, 100.0, 0.01)?);
    }
    Ok(())
}
