//! Exact analysis of the fixed-temperature chain on a 5-city instance:
//! spectrum, bottleneck ratio, mixing time against its bounds, and the
//! drift of the expected length after a temperature step.

use tsp_anneal::analytic::two_opt_mixing_time_bound;
use tsp_anneal::oracle::{
    build_exact_chain, exact_mixing_time, relaxation_mixing_bound, spectral_report, tv_profile, DriftAnalysis,
};
use tsp_anneal::{Instance, WeightModel};

fn main() -> tsp_anneal::Result<()> {
    let inst = Instance::generate(5, WeightModel::ContinuousUniform, 11)?;
    let a = 5.0;
    for t in [2.0f64, 8.0, 64.0] {
        let beta = t.ln() / a;
        let chain = build_exact_chain(&inst, beta, true)?;
        let rep = spectral_report(&chain)?;
        let eps = 1.0 / chain.len() as f64;
        println!(
            "t = {t:>4}: gap {:.4}, bottleneck {:.4}, tau(1/12) = {}, relaxation bound {:.1}, path bound {:.2e}",
            rep.gamma,
            rep.bottleneck.unwrap_or(f64::NAN),
            exact_mixing_time(&chain, eps)?,
            relaxation_mixing_bound(&chain, &rep, eps),
            two_opt_mixing_time_bound(5, t, eps)?
        );
    }

    let chain = build_exact_chain(&inst, 1.0, true)?;
    let prof: Vec<String> = tv_profile(&chain, 8).iter().map(|d| format!("{d:.3}")).collect();
    println!("\nworst-case TV distance by step at beta = 1: {}", prof.join(" "));

    let drift = DriftAnalysis::new(&inst, a, 10, true)?;
    let series: Vec<String> = drift.drift_series(6).iter().map(|d| format!("{d:.2e}")).collect();
    println!("drift after a temperature step: {} (bound {:.3})", series.join(" "), drift.bound());
    Ok(())
}
