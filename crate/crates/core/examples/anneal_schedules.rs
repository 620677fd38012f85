//! Simulated annealing on a 40-city instance under the logarithmic, constant
//! and epoch-wise schedules.

use tsp_anneal::chain::{epoch_schedule_from_theorem, simulated_annealing, AnnealOptions, CoolingSchedule};
use tsp_anneal::rng::seeded_rng;
use tsp_anneal::{Instance, Tour, WeightModel};

fn main() -> tsp_anneal::Result<()> {
    let n = 40;
    let inst = Instance::generate(n, WeightModel::ContinuousUniform, 1)?;
    let start = Tour::random(n, &mut seeded_rng(2));
    println!("start length {:.3} (random tours average {})", inst.tour_length(&start), n as f64 / 2.0);

    let plan = epoch_schedule_from_theorem(n, n as f64, 4, 1e-12)?;
    println!("epoch lengths for c = 1e-12: {:?}", plan.epoch_lengths);
    let schedules = [
        ("log a = n", CoolingSchedule::Logarithmic { a: n as f64 }),
        ("log a = 1", CoolingSchedule::Logarithmic { a: 1.0 }),
        ("constant T = 0.05", CoolingSchedule::Constant { temperature: 0.05 }),
        ("epochs", plan.schedule),
    ];
    let opts = AnnealOptions { iterations: 2_000_000, record_every: 500_000, lazy: false };
    for (name, schedule) in &schedules {
        let trace = simulated_annealing(&inst, schedule, &opts, &start, 3)?;
        let path: Vec<String> = trace.lengths.iter().map(|j| format!("{j:.3}")).collect();
        println!(
            "{name:>18}: J along the run [{}], acceptance {:.3}",
            path.join(", "),
            trace.accepted_total as f64 / trace.iterations as f64
        );
    }
    Ok(())
}
