//! Simulates both benchmark scenarios and a sparse variant, printing summary counts.

use ppsbm::rng;
use ppsbm::simulator::{scenario1, scenario2, scenario2_model, simulate_sparse};

fn main() -> ppsbm::Result<()> {
    let mut r = rng::from_seed(1);
    for phi in [0.01, 0.1, 0.5] {
        let (sim, model) = scenario1(phi, 30, &mut r)?;
        println!(
            "scenario1 phi={phi}: {} events on {} dyads (expected {:.1} per dyad)",
            sim.stream.len(),
            sim.stream.num_dyads(),
            model.mean_events_per_dyad()
        );
    }
    let (sim, _) = scenario2(50, &mut r)?;
    println!("scenario2: {} events, first rows:", sim.stream.len());
    for line in sim.stream.to_csv().lines().take(4) {
        println!("  {line}");
    }
    let model = scenario2_model();
    let beta = vec![0.5; model.layout().len()];
    let sparse = simulate_sparse(&model, &beta, 50, &mut r)?;
    let active = sparse.active.iter().filter(|a| **a).count();
    println!("sparse scenario2: {active}/{} dyads active, {} events", sparse.active.len(), sparse.stream.len());
    Ok(())
}
