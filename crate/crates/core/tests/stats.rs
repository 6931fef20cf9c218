mod common;

use common::{cliff_oracle, mwu_oracle};
use nkcs_org::rng::seeded;
use nkcs_org::stats::{cliffs_delta, mann_whitney_u, mean_ci, significance_stars};
use proptest::prelude::*;
use rand::Rng;

fn small_sample(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    // coarse values so ties are common
    (0..n).map(|_| rng.random_range(0..8) as f64 / 4.0).collect()
}

#[test]
fn agrees_with_pairwise_oracles_on_random_samples() {
    let mut rng = seeded(77);
    for _ in 0..100 {
        let n1 = rng.random_range(2..15);
        let n2 = rng.random_range(2..15);
        let a = small_sample(&mut rng, n1);
        let b = small_sample(&mut rng, n2);
        let mw = mann_whitney_u(&a, &b).unwrap();
        let (u, p) = mwu_oracle(&a, &b);
        assert!((mw.u - u).abs() < 1e-9);
        assert!((mw.u + mw.u_prime - (n1 * n2) as f64).abs() < 1e-9);
        assert!(
            (mw.p_value - p).abs() < 1e-9 || (p < 1e-300 && mw.p_value < 1e-300),
            "{} vs {p}",
            mw.p_value
        );
        let cd = cliffs_delta(&a, &b).unwrap();
        let (delta, se) = cliff_oracle(&a, &b);
        assert!((cd.delta - delta).abs() < 1e-12);
        assert!((cd.se - se).abs() < 1e-9, "{} vs {se}", cd.se);
    }
}

#[test]
fn star_thresholds() {
    assert_eq!(significance_stars(0.0005), "***");
    assert_eq!(significance_stars(0.005), "**");
    assert_eq!(significance_stars(0.03), "*");
    assert_eq!(significance_stars(0.05), "");
}

proptest! {
    #[test]
    fn rank_statistics_ignore_monotone_transforms(
        a in prop::collection::vec(-5.0f64..5.0, 1..30),
        b in prop::collection::vec(-5.0f64..5.0, 1..30),
    ) {
        let f = |v: &Vec<f64>| v.iter().map(|x| x.exp() * 3.0 + 1.0).collect::<Vec<_>>();
        let (m1, m2) = (mann_whitney_u(&a, &b).unwrap(), mann_whitney_u(&f(&a), &f(&b)).unwrap());
        prop_assert!((m1.p_value - m2.p_value).abs() < 1e-12);
        let (c1, c2) = (cliffs_delta(&a, &b).unwrap(), cliffs_delta(&f(&a), &f(&b)).unwrap());
        prop_assert!((c1.delta - c2.delta).abs() < 1e-12);
        prop_assert!((c1.delta + cliffs_delta(&b, &a).unwrap().delta).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&c1.delta));
        prop_assert!((0.0..=1.0).contains(&m1.p_value));
    }

    #[test]
    fn interval_contains_mean(xs in prop::collection::vec(-1.0f64..1.0, 1..50)) {
        let ci = mean_ci(&xs, 0.99).unwrap();
        prop_assert!(ci.lo <= ci.mean && ci.mean <= ci.hi);
        let wider = mean_ci(&xs, 0.999).unwrap();
        prop_assert!(wider.half_width() >= ci.half_width());
    }
}
