//! Fits the model with the adaptive histogram estimator and reports clustering accuracy.

use ppsbm::intensity::Intensity;
use ppsbm::metrics::adjusted_rand_index;
use ppsbm::rng;
use ppsbm::simulator::scenario1;
use ppsbm::vem::{run_vem, FitConfig};

fn main() -> ppsbm::Result<()> {
    let (sim, _) = scenario1(0.5, 30, &mut rng::from_seed(7))?;
    let fit = run_vem(&sim.stream, 2, &FitConfig::default(), 7)?;
    println!("pi = {:?}", fit.pi);
    println!("J = {:.3} after {} iterations (converged: {})", fit.j, fit.iterations, fit.converged);
    println!("selected depths = {:?}", fit.depths().unwrap());
    for (slot, (q, l)) in fit.pairs.iter().enumerate() {
        let est = &fit.alpha[slot];
        println!("alpha({},{}) at t=0.25: {:.2}, integral {:.2}", q + 1, l + 1, est.value(0.25), est.cumulative(1.0));
    }
    println!("ARI = {:.3}", adjusted_rand_index(&fit.map_labels(), &sim.labels)?);
    Ok(())
}
