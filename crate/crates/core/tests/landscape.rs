mod common;

use common::{brute_force_max, gaussian_scores, ks_uniform, pearson};
use nkcs_org::rng::seeded;
use nkcs_org::{CouplingSpec, JointConfiguration, LandscapeSet};
use proptest::prelude::*;

#[test]
fn marginals_are_uniform() {
    let ls = LandscapeSet::from_seed(CouplingSpec::new(10, 16, 7, 0, 0).unwrap(), 0.9, 5).unwrap();
    let all: Vec<f64> = ls.tables().iter().flat_map(|t| t.values().iter().copied()).collect();
    assert!(all.iter().all(|&v| v > 0.0 && v < 1.0));
    let ks = ks_uniform(&all);
    assert!(ks < 0.02, "KS statistic {ks}");
}

#[test]
fn correlation_recovered_in_gaussian_space() {
    let ls = LandscapeSet::from_seed(CouplingSpec::new(3, 16, 7, 0, 0).unwrap(), 0.9, 17).unwrap();
    let (a, b, c) = (
        gaussian_scores(&ls, 0),
        gaussian_scores(&ls, 1),
        gaussian_scores(&ls, 2),
    );
    for r in [pearson(&a, &b), pearson(&a, &c), pearson(&b, &c)] {
        assert!((0.88..=0.92).contains(&r), "r = {r}");
    }
    let ls = LandscapeSet::from_seed(CouplingSpec::new(2, 16, 7, 0, 0).unwrap(), 0.0, 17).unwrap();
    let r = pearson(&gaussian_scores(&ls, 0), &gaussian_scores(&ls, 1));
    assert!(r.abs() < 0.03, "r = {r}");
}

#[test]
fn global_max_matches_brute_force() {
    for (p, n, k, c, s) in [(3, 3, 1, 1, 1), (2, 4, 2, 2, 1), (3, 3, 2, 0, 0), (4, 2, 0, 1, 2)] {
        for seed in 0..3 {
            let ls = LandscapeSet::from_seed(CouplingSpec::new(p, n, k, c, s).unwrap(), 0.5, seed).unwrap();
            let (v, arg) = ls.global_maximum().unwrap();
            let oracle = brute_force_max(&ls);
            assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
            assert!((ls.org_performance(&arg) - v).abs() < 1e-12);
        }
    }
}

#[test]
fn separable_max_is_mean_of_unit_maxima() {
    let (agents, tasks) = (4, 4);
    let ls = LandscapeSet::from_seed(CouplingSpec::new(agents, tasks, 3, 0, 0).unwrap(), 0.9, 8).unwrap();
    let mut sum = 0.0;
    for p in 0..agents {
        let mut cfg = JointConfiguration::zeros(agents, tasks);
        let best = (0..1u32 << tasks)
            .map(|w| ls.unit_performance_with(&mut cfg, p, w))
            .fold(f64::NEG_INFINITY, f64::max);
        sum += best;
    }
    let (v, _) = ls.global_maximum().unwrap();
    assert!((v - sum / agents as f64).abs() < 1e-12);
    assert!((v - brute_force_max(&ls)).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Flipping one decision only changes the tasks that read it.
    #[test]
    fn flips_are_local(
        agents in 2usize..5,
        tasks in 2usize..6,
        k in 0usize..3,
        c in 0usize..3,
        s in 0usize..2,
        seed in any::<u64>(),
        fp in 0usize..5,
        fi in 0usize..6,
    ) {
        let k = k.min(tasks - 1);
        let c = c.min(tasks);
        let s = s.min(agents - 1);
        let ls = LandscapeSet::from_seed(CouplingSpec::new(agents, tasks, k, c, s).unwrap(), 0.7, seed).unwrap();
        let (fp, fi) = (fp % agents, fi % tasks);
        let cfg = JointConfiguration::random(agents, tasks, &mut seeded(seed ^ 1));
        let mut flipped = cfg.clone();
        flipped.flip(fp, fi);
        for p in 0..agents {
            for i in 0..tasks {
                let reads = (p, i) == (fp, fi)
                    || ls.coupling().dependencies(p, i).iter().any(|d| (d.agent, d.task) == (fp, fi));
                if !reads {
                    prop_assert_eq!(ls.task_performance(&cfg, p, i), ls.task_performance(&flipped, p, i));
                }
            }
        }
    }

    #[test]
    fn dependency_counts(agents in 2usize..6, tasks in 1usize..6, k in 0usize..5, c in 0usize..5, s in 0usize..5) {
        prop_assume!(k < tasks && c <= tasks && s < agents);
        let spec = CouplingSpec::new(agents, tasks, k, c, s).unwrap();
        for p in 0..agents {
            for i in 0..tasks {
                let deps = spec.dependencies(p, i);
                prop_assert_eq!(deps.len(), k + c * s);
                prop_assert_eq!(deps.iter().filter(|d| d.agent == p).count(), k);
            }
        }
        prop_assert_eq!(spec.entries_per_task(), 1 << (1 + k + c * s));
    }
}
