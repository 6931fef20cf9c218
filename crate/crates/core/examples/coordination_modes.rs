//! One replication of each coordination mode, period by period, on the same
//! landscape and starting point.
//!
//! `cargo run --release --example coordination_modes`

use nkcs_org::engine::{initial_state, replication_landscape, run_period, PeriodContext};
use nkcs_org::rng::{stream_rng, Stream};
use nkcs_org::{CoordinationMode, CoordinationSpec, ScenarioConfig, SearchMode};

fn main() -> nkcs_org::Result<()> {
    let base = ScenarioConfig::default().with_conformity(false);
    let mut ls = replication_landscape(&base, 0)?;
    let gmax = ls.compute_global_max()?;
    println!("global max {gmax:.4}");
    for mode in CoordinationMode::ALL {
        for search in SearchMode::ALL {
            let cfg = base.clone().with_mode(mode, search);
            let spec = CoordinationSpec::new(mode, search);
            let ctx = PeriodContext::new(&cfg, Some(gmax))?;
            let mut state = initial_state(&cfg, 0);
            let mut rng = stream_rng(cfg.base_seed, 0, Stream::Process);
            print!(
                "{:<24} ALT={} PROP={} COMP={} |",
                format!("{mode}-{search}"),
                spec.alt,
                spec.prop,
                spec.comp
            );
            for t in 1..=cfg.periods {
                let obs = run_period(&mut state, &ls, &ctx, t, &mut rng)?;
                if [1, 10, 100, 500].contains(&t) {
                    print!(" t={t}: {:.3}/{:.3}", obs.performance, obs.synchrony);
                }
            }
            println!();
        }
    }
    Ok(())
}
