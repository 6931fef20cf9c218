//! Communication networks, memory with forgetting, conformity and synchrony.
//!
//! `cargo run --release --example networks`

use nkcs_org::organization::{conformity, share_and_receive, synchrony, AgentState};
use nkcs_org::rng::seeded;
use nkcs_org::{JointConfiguration, NetworkKind, NetworkTopology};

fn main() -> nkcs_org::Result<()> {
    let (agents, tasks, span) = (5, 4, 3);
    for kind in NetworkKind::ALL {
        let net = NetworkTopology::new(kind, agents)?;
        let links: Vec<String> = (0..agents)
            .map(|p| format!("{p}<-{:?}", net.receives_from(p)))
            .collect();
        println!("{:<6} {}", kind.as_str(), links.join(" "));
    }

    let net = NetworkTopology::new(NetworkKind::Ring, agents)?;
    let mut state: Vec<AgentState> = (0..agents).map(|p| AgentState::new(p, tasks, 0.5, 0.5, span)).collect();
    let mut rng = seeded(11);
    for t in 1..=6 {
        let cfg = JointConfiguration::random(agents, tasks, &mut rng);
        share_and_receive(&mut state, &cfg, &net, t);
        println!(
            "t={t} synchrony {:.3}  memory sizes {:?}  kappa(agent 0) {:.3}",
            synchrony(&cfg)?,
            state.iter().map(|a| a.memory.len()).collect::<Vec<_>>(),
            conformity(&state[0], &cfg)
        );
    }
    let all_same = JointConfiguration::from_words(tasks, vec![0b1010; agents]);
    println!("identical vectors: synchrony {}", synchrony(&all_same)?);
    Ok(())
}
