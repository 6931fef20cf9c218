//! Sobol indices: the Ishigami test function against its closed form, then
//! a small global sensitivity analysis of the simulator.
//!
//! `cargo run --release --example sobol -- [n]`

use nkcs_org::sensitivity::{sobol_indices, SobolModel, SobolPlan};
use nkcs_org::ScenarioConfig;

fn main() -> nkcs_org::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);

    let ishigami = SobolPlan::analytic(SobolModel::Ishigami, 3, 8192);
    println!("Ishigami (closed form S = 0.314, 0.442, 0; ST = 0.558, 0.442, 0.244)");
    for i in sobol_indices(&ishigami)? {
        println!(
            "  {}: S {:.3} [{:.3}, {:.3}]  ST {:.3} [{:.3}, {:.3}]",
            i.parameter, i.s, i.s_lo, i.s_hi, i.st, i.st_lo, i.st_hi
        );
    }

    let plan = SobolPlan {
        n,
        inner_runs: 5,
        base: ScenarioConfig {
            periods: 100,
            short_run: 50,
            // skip the exhaustive global-maximum scans to keep the demo quick
            normalize: false,
            ..Default::default()
        },
        ..Default::default()
    };
    println!("simulator, n = {n}, {} evaluations", plan.evaluations());
    for i in sobol_indices(&plan)? {
        println!("  {:<16} {:<12} S {:+.3}  ST {:.3}", i.parameter, i.output, i.s, i.st);
    }
    Ok(())
}
