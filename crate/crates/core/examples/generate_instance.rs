//! Draw a random instance, evaluate a tour and a 2-opt move, and round-trip
//! the instance through JSON.

use tsp_anneal::neighborhood::{apply_move, move_count};
use tsp_anneal::rng::seeded_rng;
use tsp_anneal::{Instance, Tour, TwoOptMove, WeightModel};

fn main() -> tsp_anneal::Result<()> {
    let inst = Instance::generate(8, WeightModel::ContinuousUniform, 42)?;
    let grid = Instance::generate(8, WeightModel::grid(50), 42)?;
    println!("{} edges, first weights {:?}", inst.weights().len(), &inst.weights()[..4]);
    println!("grid weights are multiples of 1/50: {:?}", &grid.weights()[..4]);

    let tour = Tour::random(8, &mut seeded_rng(7));
    println!("tour {:?} has length {}", tour.order(), inst.tour_length(&tour));

    // reversing positions 2..=5
    let mv = TwoOptMove::new(8, 1, 5)?;
    let next = apply_move(&tour, mv);
    println!(
        "after {mv:?}: {:?}, delta {} (recomputed {})",
        next.order(),
        inst.tour_length_delta(&tour, mv)?,
        inst.tour_length(&next) - inst.tour_length(&tour)
    );
    println!("each tour has {} 2-opt neighbors", move_count(8));

    let json = inst.to_json()?;
    assert_eq!(Instance::from_json(&json)?, inst);
    println!("JSON round trip ok ({} bytes)", json.len());
    Ok(())
}
