//! Conformity and communication networks: Cliff's delta of every
//! decentralized and centralized design against centralized thorough search
//! over a Line network, in both environments.
//!
//! `cargo run --release --example conformity_networks -- [runs]`

use nkcs_org::stats::effect_table;
use nkcs_org::{run_scenario, CoordinationMode, NetworkKind, Observable, ScenarioConfig, SearchMode};

fn main() -> nkcs_org::Result<()> {
    let runs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    for (k, c, s) in [(3, 0, 0), (2, 2, 2)] {
        let base = ScenarioConfig::default()
            .with_interdependence(k, c, s)
            .with_conformity(true)
            .with_runs(runs);
        let default = run_scenario(&base)?.summary;
        let mut results = Vec::new();
        for (mode, search) in [
            (CoordinationMode::Decentralized, SearchMode::Cursory),
            (CoordinationMode::Centralized, SearchMode::Thorough),
        ] {
            for network in NetworkKind::ALL {
                let cfg = base.clone().with_mode(mode, search).with_network(network);
                results.push((cfg.row_label(), run_scenario(&cfg)?.summary));
            }
        }
        let others: Vec<(String, &_)> = results.iter().map(|(l, s)| (l.clone(), s)).collect();
        println!("\n(K,C,S) = ({k},{c},{s})");
        print!("{:<36}", "scenario");
        for obs in Observable::ALL {
            print!(" {:>14}", obs.as_str());
        }
        println!();
        for row in effect_table(&default, &others)? {
            print!("{:<36}", row.label);
            for cell in &row.cells {
                print!(" {:>+8.2}{:<6}", cell.delta, cell.stars());
            }
            println!();
        }
    }
    Ok(())
}
