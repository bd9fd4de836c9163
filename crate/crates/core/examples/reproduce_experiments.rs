//! Small replicated versions of the clustering and model-selection experiments.

use ppsbm::experiments::{ari_table_csv, scenario1_ari_table, scenario2_selection, DEFAULT_PHIS};
use ppsbm::vem::FitConfig;

fn main() -> ppsbm::Result<()> {
    let cfg = FitConfig::default();
    let rows = scenario1_ari_table(&DEFAULT_PHIS, 30, 10, &cfg, 1)?;
    print!("{}", ari_table_csv(&rows));
    let chosen = scenario2_selection(50, 5, 5, &cfg, 1)?;
    println!("selected Q per replicate: {chosen:?}");
    Ok(())
}
