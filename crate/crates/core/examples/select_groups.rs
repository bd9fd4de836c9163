//! Chooses the number of groups by ICL on the three-group benchmark.

use ppsbm::rng;
use ppsbm::selection::select_q;
use ppsbm::simulator::scenario2;
use ppsbm::vem::FitConfig;

fn main() -> ppsbm::Result<()> {
    let (sim, _) = scenario2(50, &mut rng::from_seed(11))?;
    let report = select_q(&sim.stream, 5, &FitConfig::default(), 11, false)?;
    println!("Q   ICL          J");
    for e in &report.entries {
        println!("{}   {:<12.3} {:.3}", e.groups, e.icl, e.j);
    }
    println!("chosen Q = {}", report.chosen);
    Ok(())
}
