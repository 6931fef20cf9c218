//! Nonparametric comparisons behind the effect-size tables.
//!
//! Cliff's delta standard error uses Cliff's consistent estimator built
//! from the dominance matrix `d_ij = sign(a_i - b_j)`:
//!
//! ```text
//! s^2 = [ n2^2 sum_i (d_i. - δ)^2 + n1^2 sum_j (d_.j - δ)^2 - sum_ij (d_ij - δ)^2 ]
//!       / ( n1 n2 (n1 - 1)(n2 - 1) )
//! ```
//!
//! where `d_i.` and `d_.j` are row and column means, floored at
//! `(1 - δ^2) / (n1 n2 - 1)` as Cliff recommends.

use std::cmp::Ordering;
use std::io::Write;

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::engine::{csv_err, Observable, Summary};
use crate::error::{invalid, Error, Result};
use crate::report::write_comment;

/// Mann-Whitney U statistics for sample `a` against `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// `U` of the first sample: pairs with `a > b` plus half the ties.
    pub u: f64,
    /// `U'` of the second sample, `n1 n2 - U`.
    pub u_prime: f64,
    /// Continuity- and tie-corrected normal deviate (non-negative).
    pub z: f64,
    pub p_value: f64,
}

fn check(sample: &[f64], name: &'static str) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::EmptySample(name));
    }
    if sample.iter().any(|v| v.is_nan()) {
        return Err(invalid(name, "sample contains NaN"));
    }
    Ok(())
}

/// Two-sided Mann-Whitney test with the normal approximation, tie
/// correction and continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check(a, "a")?;
    check(b, "b")?;
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // 1-based midrank of positions i..j
        let midrank = (i + j + 1) as f64 / 2.0;
        let in_a = pooled[i..j].iter().filter(|x| x.1).count();
        rank_sum_a += midrank * in_a as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let u_prime = n1 * n2 - u;
    let nf = n as f64;
    let variance = if n > 1 {
        n1 * n2 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)))
    } else {
        0.0
    };
    let (z, p_value) = if variance <= 0.0 {
        (0.0, 1.0)
    } else {
        let z = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
        let p = erfc(z / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0);
        (z, p)
    };
    Ok(MannWhitney { u, u_prime, z, p_value })
}

/// Cliff's delta of `a` relative to `b` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliffsDelta {
    pub delta: f64,
    pub se: f64,
}

/// `(#{a_i > b_j} - #{a_i < b_j}) / (n1 n2)`, computed from sorted samples.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<CliffsDelta> {
    check(a, "a")?;
    check(b, "b")?;
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let below = |sorted: &[f64], x: f64| sorted.partition_point(|v| v.total_cmp(&x) == Ordering::Less) as i64;
    let above = |sorted: &[f64], x: f64| {
        (sorted.len() - sorted.partition_point(|v| v.total_cmp(&x) != Ordering::Greater)) as i64
    };
    let n1 = a.len() as i64;
    let n2 = b.len() as i64;
    // row i: dominance of a_i over b
    let rows: Vec<i64> = a.iter().map(|&x| below(&sb, x) - above(&sb, x)).collect();
    let cols: Vec<i64> = b.iter().map(|&y| above(&sa, y) - below(&sa, y)).collect();
    let untied: i64 = a.iter().map(|&x| below(&sb, x) + above(&sb, x)).sum();
    let net: i64 = rows.iter().sum();
    let pairs = (n1 * n2) as f64;
    let delta = net as f64 / pairs;

    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let row_ss: f64 = rows.iter().map(|&r| (r as f64 / n2f - delta).powi(2)).sum();
    let col_ss: f64 = cols.iter().map(|&c| (c as f64 / n1f - delta).powi(2)).sum();
    let cell_ss = untied as f64 - pairs * delta * delta;
    let floor = if pairs > 1.0 {
        (1.0 - delta * delta) / (pairs - 1.0)
    } else {
        0.0
    };
    let var = if n1 > 1 && n2 > 1 {
        let v = (n2f * n2f * row_ss + n1f * n1f * col_ss - cell_ss) / (pairs * (n1f - 1.0) * (n2f - 1.0));
        v.max(floor)
    } else {
        floor
    };
    Ok(CliffsDelta {
        delta,
        se: var.max(0.0).sqrt(),
    })
}

/// Mean with a symmetric normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

impl MeanCi {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

/// `mean ± z_{(1+level)/2} · s / sqrt(n)` with the Bessel-corrected `s`.
/// A single observation yields a zero-width interval.
pub fn mean_ci(sample: &[f64], level: f64) -> Result<MeanCi> {
    check(sample, "sample")?;
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid("level", format!("must be in (0, 1), got {level}")));
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let half = if sample.len() > 1 {
        let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let z = Normal::standard().inverse_cdf((1.0 + level) / 2.0);
        z * var.sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(MeanCi {
        mean,
        lo: mean - half,
        hi: mean + half,
    })
}

/// One comparison against the default scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectCell {
    pub delta: f64,
    pub se: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

impl EffectCell {
    /// `*`, `**`, `***` for p below 0.05, 0.01, 0.001.
    pub fn stars(&self) -> &'static str {
        significance_stars(self.p_value)
    }
}

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Effect of `sample` relative to `default`.
pub fn effect_cell(sample: &[f64], default: &[f64]) -> Result<EffectCell> {
    let cd = cliffs_delta(sample, default)?;
    let mw = mann_whitney_u(sample, default)?;
    Ok(EffectCell {
        delta: cd.delta,
        se: cd.se,
        p_value: mw.p_value,
        n1: sample.len(),
        n2: default.len(),
    })
}

/// Effects of one scenario on the four observables, in [`Observable::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectRow {
    pub label: String,
    pub cells: [EffectCell; 4],
}

impl EffectRow {
    pub fn cell(&self, obs: Observable) -> &EffectCell {
        &self.cells[Observable::ALL.iter().position(|o| *o == obs).unwrap()]
    }
}

/// Compares every scenario in `others` with `default` on all four observables.
pub fn effect_table(default: &Summary, others: &[(String, &Summary)]) -> Result<Vec<EffectRow>> {
    others
        .iter()
        .map(|(label, s)| {
            let mut cells = Vec::with_capacity(4);
            for obs in Observable::ALL {
                cells.push(effect_cell(s.observable(obs), default.observable(obs))?);
            }
            Ok(EffectRow {
                label: label.clone(),
                cells: cells.try_into().expect("four observables"),
            })
        })
        .collect()
}

/// A summary tagged with its row (coordination design) and environment labels.
#[derive(Debug, Clone)]
pub struct LabeledSummary {
    pub row: String,
    pub environment: String,
    pub summary: Summary,
}

/// Effect table: one row per design, and for every environment four
/// observable columns, each compared with the default row of the same
/// environment.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEffectTable {
    pub environments: Vec<String>,
    /// `(row label, one cell per environment × observable)`.
    pub rows: Vec<(String, Vec<Option<EffectCell>>)>,
}

impl GridEffectTable {
    pub fn build(entries: &[LabeledSummary], default_row: &str) -> Result<Self> {
        let mut environments: Vec<String> = Vec::new();
        let mut rows: Vec<String> = Vec::new();
        for e in entries {
            if !environments.contains(&e.environment) {
                environments.push(e.environment.clone());
            }
            if !rows.contains(&e.row) {
                rows.push(e.row.clone());
            }
        }
        if !rows.iter().any(|r| r == default_row) {
            return Err(invalid("default", format!("no scenario labelled `{default_row}`")));
        }
        // default row first
        rows.sort_by_key(|r| r != default_row);
        let find = |row: &str, env: &str| entries.iter().find(|e| e.row == row && e.environment == env);
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut cells = Vec::with_capacity(environments.len() * 4);
            for env in &environments {
                let base = find(default_row, env);
                let this = find(&row, env);
                for obs in Observable::ALL {
                    cells.push(match (this, base) {
                        (Some(t), Some(b)) => Some(effect_cell(t.summary.observable(obs), b.summary.observable(obs))?),
                        _ => None,
                    });
                }
            }
            out.push((row, cells));
        }
        Ok(Self {
            environments,
            rows: out,
        })
    }

    pub fn cell(&self, row: &str, environment: &str, obs: Observable) -> Option<&EffectCell> {
        let e = self.environments.iter().position(|x| x == environment)?;
        let o = Observable::ALL.iter().position(|x| *x == obs)?;
        self.rows.iter().find(|(r, _)| r == row)?.1[e * 4 + o].as_ref()
    }

    /// Column names: `label` then `<env>_<observable>_{delta,se,p,stars}`.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["label".to_string()];
        for env in &self.environments {
            for obs in Observable::ALL {
                for part in ["delta", "se", "p", "stars"] {
                    h.push(format!("{env}_{}_{part}", obs.as_str()));
                }
            }
        }
        h
    }

    /// Writes the table; δ and SE with two decimals and an explicit sign on δ,
    /// p in scientific notation, stars as plain asterisks. Missing cells are empty.
    pub fn write_csv<W: Write>(&self, mut out: W, manifest: &str) -> Result<()> {
        write_comment(&mut out, manifest)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header()).map_err(csv_err)?;
        for (label, cells) in &self.rows {
            let mut rec = vec![label.clone()];
            for c in cells {
                match c {
                    Some(c) => {
                        rec.push(format!("{:+.2}", c.delta));
                        rec.push(format!("{:.2}", c.se));
                        rec.push(format!("{:.3e}", c.p_value));
                        rec.push(c.stars().to_string());
                    }
                    None => rec.extend(std::iter::repeat_n(String::new(), 4)),
                }
            }
            w.write_record(rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}
