//! Fits the model with the Epanechnikov kernel estimator and compares it with the truth.

use ppsbm::estimate::Estimator;
use ppsbm::metrics::{risk_report, DEFAULT_RISK_GRID};
use ppsbm::rng;
use ppsbm::simulator::scenario1;
use ppsbm::vem::{run_vem, FitConfig};

fn main() -> ppsbm::Result<()> {
    let (sim, model) = scenario1(0.5, 30, &mut rng::from_seed(3))?;
    for bandwidth in [None, Some(0.1)] {
        let cfg = FitConfig { estimator: Estimator::kernel(bandwidth), ..FitConfig::default() };
        let fit = run_vem(&sim.stream, 2, &cfg, 3)?;
        let report = risk_report(&fit.alpha, &model.alpha, fit.layout(), 1.0, DEFAULT_RISK_GRID)?;
        let used: Vec<f64> = fit
            .alpha
            .iter()
            .map(|a| match a {
                ppsbm::estimate::IntensityEstimate::Kernel(k) => k.bandwidth,
                _ => f64::NAN,
            })
            .collect();
        println!("bandwidth {bandwidth:?}: per-pair bandwidths {used:.3?}, risks {:.3?}", report.risks);
    }
    Ok(())
}
