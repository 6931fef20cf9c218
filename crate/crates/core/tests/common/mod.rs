//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use nkcs_org::{JointConfiguration, LandscapeSet};
use statrs::distribution::{ContinuousCDF, Normal};

/// Maximum organizational performance by enumerating every joint configuration.
pub fn brute_force_max(ls: &LandscapeSet) -> f64 {
    let bits = ls.agents() * ls.tasks();
    (0..1u64 << bits)
        .map(|idx| ls.org_performance(&JointConfiguration::from_index(ls.agents(), ls.tasks(), idx)))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Agent `p`'s table entries mapped back through the normal quantile.
pub fn gaussian_scores(ls: &LandscapeSet, p: usize) -> Vec<f64> {
    let normal = Normal::standard();
    ls.tables()[p].values().iter().map(|&u| normal.inverse_cdf(u)).collect()
}

/// Kolmogorov-Smirnov distance to U(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

pub fn hamming_sum(words: &[u32]) -> u32 {
    let mut h = 0;
    for p in 0..words.len() {
        for q in p + 1..words.len() {
            h += (words[p] ^ words[q]).count_ones();
        }
    }
    h
}

/// Pairwise-comparison Mann-Whitney: U by counting, tie correction from
/// group sizes, two-sided p from the normal CDF.
pub fn mwu_oracle(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut u = 0.0;
    for x in a {
        for y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    for group in pooled.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        ties += t.powi(3) - t;
    }
    let sigma = (n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)))).sqrt();
    let p = if sigma == 0.0 {
        1.0
    } else {
        let z = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0) / sigma;
        2.0 * (1.0 - Normal::standard().cdf(z))
    };
    (u, p)
}

/// Dominance-matrix Cliff's delta and its consistent standard error.
pub fn cliff_oracle(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (n1, n2) = (a.len(), b.len());
    let d: Vec<Vec<f64>> = a
        .iter()
        .map(|x| {
            b.iter()
                .map(|y| {
                    if x > y {
                        1.0
                    } else if x < y {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let delta = d.iter().flatten().sum::<f64>() / (n1 * n2) as f64;
    let row: Vec<f64> = d.iter().map(|r| r.iter().sum::<f64>() / n2 as f64).collect();
    let col: Vec<f64> = (0..n2)
        .map(|j| d.iter().map(|r| r[j]).sum::<f64>() / n1 as f64)
        .collect();
    let (f1, f2) = (n1 as f64, n2 as f64);
    let num = f2 * f2 * row.iter().map(|r| (r - delta).powi(2)).sum::<f64>()
        + f1 * f1 * col.iter().map(|c| (c - delta).powi(2)).sum::<f64>()
        - d.iter().flatten().map(|v| (v - delta).powi(2)).sum::<f64>();
    let var = num / (f1 * f2 * (f1 - 1.0) * (f2 - 1.0));
    let floor = (1.0 - delta * delta) / (f1 * f2 - 1.0);
    (delta, var.max(floor).sqrt())
}
