//! Compares fitted and known-label intensity estimates against the truth.

use ppsbm::metrics::{adjusted_rand_index, l2_risk, relabel, risk_report, DEFAULT_RISK_GRID};
use ppsbm::rng;
use ppsbm::simulator::scenario2;
use ppsbm::vem::{oracle_fit, run_vem, FitConfig};

fn main() -> ppsbm::Result<()> {
    let cfg = FitConfig::default();
    let (sim, model) = scenario2(50, &mut rng::from_seed(9))?;
    let fit = run_vem(&sim.stream, 3, &cfg, 9)?;
    let oracle = oracle_fit(&sim.stream, &sim.labels, 3, &cfg)?;
    let report = risk_report(&fit.alpha, &model.alpha, fit.layout(), 1.0, DEFAULT_RISK_GRID)?;
    let labels = relabel(&fit.map_labels(), &report.permutation);
    println!("ARI = {:.3}, aligned label agreement = {}/{}", adjusted_rand_index(&fit.map_labels(), &sim.labels)?,
        labels.iter().zip(&sim.labels).filter(|(a, b)| a == b).count(), labels.len());
    println!("pair    fitted  oracle");
    for (slot, (q, l)) in model.layout().pairs().into_iter().enumerate() {
        let oracle_risk = l2_risk(&oracle.alpha[slot], &model.alpha[slot], 1.0, DEFAULT_RISK_GRID);
        println!("({},{})   {:.3}   {:.3}", q + 1, l + 1, report.risks[q][l], oracle_risk);
    }
    Ok(())
}
