//! Correlated NKCS landscapes: build one, inspect the coupling, evaluate a
//! configuration, find the global maximum and round-trip a dump.
//!
//! `cargo run --release --example landscape`

use nkcs_org::rng::seeded;
use nkcs_org::{CouplingSpec, JointConfiguration, LandscapeSet};

fn main() -> nkcs_org::Result<()> {
    for (k, c, s) in [(3, 0, 0), (2, 2, 2)] {
        let coupling = CouplingSpec::new(5, 4, k, c, s)?;
        let deps: Vec<String> = coupling
            .dependencies(0, 0)
            .iter()
            .map(|d| format!("({},{})", d.agent, d.task))
            .collect();
        println!("(K,C,S)=({k},{c},{s}): task (0,0) depends on {}", deps.join(" "));

        let mut ls = LandscapeSet::from_seed(coupling, 0.9, 42)?;
        let cfg = JointConfiguration::random(5, 4, &mut seeded(7));
        let (max, argmax) = ls.global_maximum()?;
        ls.compute_global_max()?;
        println!(
            "  random config: Phi = {:.4} ({:.4} normalized); global max {:.4} at {:?}",
            ls.org_performance(&cfg),
            ls.org_performance(&cfg) / max,
            max,
            argmax.words()
        );
        for p in 0..5 {
            print!("  unit {p}: {:.4}", ls.unit_performance(&cfg, p));
        }
        println!();
    }

    // ρ = 1 gives every agent the same table
    let same = LandscapeSet::from_seed(CouplingSpec::new(3, 4, 1, 0, 0)?, 1.0, 1)?;
    println!("rho = 1 identical tables: {}", same.tables()[0] == same.tables()[2]);

    let ls = LandscapeSet::from_seed(CouplingSpec::new(2, 3, 1, 1, 1)?, 0.5, 3)?;
    let mut dump = Vec::new();
    ls.write_dump(&mut dump)?;
    let back = LandscapeSet::read_dump(&dump[..])?;
    println!(
        "dump: {} bytes, round-trip equal: {}",
        dump.len(),
        back.tables() == ls.tables()
    );
    Ok(())
}
