//! Parametric bootstrap bands for a fitted model, including the empty-group diagnostic.

use ppsbm::bootstrap::{bootstrap_ci, BootstrapOptions};
use ppsbm::rng;
use ppsbm::simulator::scenario1;
use ppsbm::vem::{run_vem, FitConfig};

fn main() -> ppsbm::Result<()> {
    let cfg = FitConfig::default();
    let (sim, _) = scenario1(0.5, 30, &mut rng::from_seed(2))?;
    let fit = run_vem(&sim.stream, 2, &cfg, 2)?;
    let opts = BootstrapOptions { replicates: 50, level: 0.9, grid_points: 11, n: 30 };
    let bands = bootstrap_ci(&fit, &opts, &cfg, 2)?;
    let band = bands.band(0, 0).expect("pair exists");
    println!("t      lower   estimate  upper");
    for (k, t) in bands.grid.iter().enumerate() {
        println!("{t:.2}   {:6.2}  {:6.2}    {:6.2}", band.lower[k], band.estimate[k], band.upper[k]);
    }
    println!("empty-group replicates: {}", bands.empty_group_replicates);

    let mut skewed = fit.clone();
    skewed.pi = vec![0.97, 0.03];
    let demo = bootstrap_ci(&skewed, &opts, &cfg, 2)?;
    println!("with a 3% group: {}/{} replicates had an empty group", demo.empty_group_replicates, demo.replicates);
    Ok(())
}
