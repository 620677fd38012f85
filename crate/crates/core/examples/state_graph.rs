//! The 2-opt state graph on canonical tours: size, degree, diameter, and a
//! CSV edge list suitable for plotting.

use tsp_anneal::neighborhood::move_count;
use tsp_anneal::StateGraph;

fn main() -> tsp_anneal::Result<()> {
    for n in 4..=7 {
        let g = StateGraph::build(n)?;
        println!(
            "n = {n}: {} tours, {}-regular: {}, symmetric: {}, diameter {}",
            g.len(),
            move_count(n),
            g.is_regular(move_count(n)),
            g.is_symmetric(),
            g.diameter()
        );
    }
    let g = StateGraph::build(5)?;
    let mut csv = Vec::new();
    g.write_edge_list(&mut csv).expect("writing to memory");
    let text = String::from_utf8(csv).expect("ASCII");
    println!("\nfirst rows of the n = 5 edge list:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
