//! One-factor-at-a-time sweep over the number of units, without
//! normalization: decentralized Cycle with conformity vs centralized.
//!
//! `cargo run --release --example ofat_p -- [runs]`

use nkcs_org::sensitivity::{ofat_sweep, OfatPlan};

fn main() -> nkcs_org::Result<()> {
    let runs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let plan = OfatPlan::new("P", vec![5.0, 10.0, 15.0, 20.0]).map_scenarios(|c| c.runs = runs);
    println!(
        "{:>4} {:<14} {:>22} {:>22}",
        "P", "scenario", "perf [99% CI]", "sync [99% CI]"
    );
    for r in ofat_sweep(&plan)? {
        println!(
            "{:>4} {:<14} {:.3} [{:.3}, {:.3}]  {:.3} [{:.3}, {:.3}]",
            r.value, r.scenario, r.perf.mean, r.perf.lo, r.perf.hi, r.sync.mean, r.sync.lo, r.sync.hi
        );
    }
    Ok(())
}
