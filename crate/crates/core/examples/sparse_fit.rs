//! Fits the sparse model to data where only part of the dyads can interact.

use ppsbm::rng;
use ppsbm::simulator::{scenario2_model, simulate_sparse};
use ppsbm::sparse::run_vem_sparse;
use ppsbm::vem::{run_vem, FitConfig};

fn main() -> ppsbm::Result<()> {
    let model = scenario2_model();
    let beta = vec![0.6; model.layout().len()];
    let sim = simulate_sparse(&model, &beta, 60, &mut rng::from_seed(5))?;
    let cfg = FitConfig::default();
    let sparse = run_vem_sparse(&sim.stream, 3, &cfg, 5)?;
    let state = sparse.sparse.as_ref().expect("sparse fits carry their state");
    println!("active dyads: {} of {}", state.active_dyads, sim.stream.num_dyads());
    for row in &state.beta {
        println!("beta row: {:.3?}", row);
    }
    let dense = run_vem(&sim.stream, 3, &cfg, 5)?;
    println!("dense fit mean of alpha(1,1): {:.3}", ppsbm::intensity::Intensity::cumulative(dense.alpha(0, 0), 1.0));
    println!("sparse fit mean of alpha(1,1): {:.3}", ppsbm::intensity::Intensity::cumulative(sparse.alpha(0, 0), 1.0));
    Ok(())
}
