//! Reads an event CSV with a metadata sidecar and fits a directed model.

use ppsbm::events::{parse_event_csv, StreamMeta};
use ppsbm::vem::{run_vem, FitConfig};

const CSV: &str = "time,sender,receiver
0.05,1,2
0.10,2,1
0.21,1,3
0.33,3,4
0.41,4,3
0.52,1,2
0.64,3,4
0.70,2,1
0.88,4,3
0.93,1,2
";

fn main() -> ppsbm::Result<()> {
    let meta = StreamMeta::from_json(r#"{"n": 4, "T": 1.0, "directed": true}"#)?;
    let stream = parse_event_csv(CSV, true, meta)?;
    println!("{} events among {} nodes on [0, {})", stream.len(), stream.n(), stream.horizon());
    let fit = run_vem(&stream, 2, &FitConfig::default(), 1)?;
    let labels: Vec<usize> = fit.map_labels().iter().map(|z| z + 1).collect();
    println!("groups (1-based): {labels:?}");
    println!("{}", serde_json::to_string_pretty(&fit.pi)?);
    Ok(())
}
