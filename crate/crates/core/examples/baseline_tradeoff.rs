//! Performance/synchrony trade-off without conformity: centralized,
//! pre-screening and decentralized coordination with thorough search.
//!
//! `cargo run --release --example baseline_tradeoff -- [runs]`

use nkcs_org::{run_scenario, CoordinationMode, NetworkKind, ScenarioConfig, SearchMode};

fn main() -> nkcs_org::Result<()> {
    let runs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    println!(
        "{:<28} {:>8} {:>8} {:>8} {:>8}",
        "scenario", "perf", "sync", "perf@100", "sync@100"
    );
    for mode in CoordinationMode::ALL {
        for search in SearchMode::ALL {
            let cfg = ScenarioConfig::default()
                .with_mode(mode, search)
                .with_network(NetworkKind::Line)
                .with_conformity(false)
                .with_runs(runs);
            let s = run_scenario(&cfg)?.summary;
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            println!(
                "{:<28} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
                cfg.row_label(),
                mean(&s.perf_long),
                mean(&s.sync_long),
                mean(&s.perf_short),
                mean(&s.sync_short)
            );
        }
    }
    Ok(())
}
