//! Grid sweeps producing a CSV regime map.

use std::collections::BTreeMap;

use mwrc_core::dof_catalog::classify;
use mwrc_core::model::{sample_channels, DoFReport, NetworkConfig, Optimality};
use mwrc_core::scheme::{build_scheme, estimate_dof_slope, random_symbols, simulate_noiseless};
use rayon::prelude::*;
use serde::Deserialize;

use crate::format::{rational, sig6};
use crate::CliError;

/// Largest grid a sweep may expand to.
pub const MAX_CELLS: u64 = 1_000_000;

pub const BASE_HEADER: &str = "l,k,m_users,n,bound,achievable,regime,optimal";

/// One coordinate: a single value, an explicit list, or an inclusive range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    One(usize),
    List(Vec<usize>),
    Range { from: usize, to: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Axis::One(v) => vec![*v],
            Axis::List(v) => v.clone(),
            Axis::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    pub snr_lo: Option<f64>,
    pub snr_hi: Option<f64>,
    /// Relative noiseless decoding tolerance for the verification column.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(default)]
    seeds: Vec<u64>,
    ranges: BTreeMap<String, Axis>,
    #[serde(default)]
    options: SweepOptions,
}

/// Parsed sweep: every cluster of a cell carries the same per-user counts.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub l: Vec<usize>,
    pub k: Vec<usize>,
    /// `Some` when a single `m` axis applies to every user.
    pub m_all: Option<Vec<usize>>,
    /// Per-user axes `m1, m2, ...` otherwise.
    pub m_users: Vec<Vec<usize>>,
    pub n: Vec<usize>,
    pub seeds: Vec<u64>,
    pub options: SweepOptions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub l: usize,
    pub k: usize,
    pub users: Vec<usize>,
    pub n: usize,
}

fn axis(ranges: &BTreeMap<String, Axis>, key: &str) -> Result<Vec<usize>, CliError> {
    let v = ranges
        .get(key)
        .ok_or_else(|| CliError::usage(format!("sweep: ranges.{key} is missing")))?
        .values();
    if v.is_empty() {
        return Err(CliError::usage(format!("sweep: ranges.{key} is empty")));
    }
    Ok(v)
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec, CliError> {
    let raw: RawSweep = toml::from_str(text).map_err(|e| CliError::usage(format!("sweep: {e}")))?;
    let l = axis(&raw.ranges, "l")?;
    let k = axis(&raw.ranges, "k")?;
    let n = axis(&raw.ranges, "n")?;
    let max_k = *k.iter().max().expect("non-empty");
    let (m_all, m_users) = if raw.ranges.contains_key("m") {
        (Some(axis(&raw.ranges, "m")?), Vec::new())
    } else {
        let users = (1..=max_k)
            .map(|i| axis(&raw.ranges, &format!("m{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        (None, users)
    };
    for key in raw.ranges.keys() {
        let known = matches!(key.as_str(), "l" | "k" | "n" | "m")
            || key
                .strip_prefix('m')
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| (1..=max_k).contains(&i));
        if !known {
            return Err(CliError::usage(format!("sweep: unknown axis ranges.{key}")));
        }
    }
    if let (Some(lo), Some(hi)) = (raw.options.snr_lo, raw.options.snr_hi) {
        if !(lo > 0.0 && hi >= 100.0 * lo) {
            return Err(CliError::precondition(format!(
                "sweep: options.snr_hi ({hi}) must be at least 100 x options.snr_lo ({lo})"
            )));
        }
    }
    Ok(SweepSpec {
        l,
        k,
        m_all,
        m_users,
        n,
        seeds: raw.seeds,
        options: raw.options,
    })
}

impl SweepSpec {
    pub fn cell_count(&self) -> u64 {
        let per_k = |k: usize| -> u64 {
            match &self.m_all {
                Some(m) => m.len() as u64,
                None => self.m_users[..k]
                    .iter()
                    .map(|a| a.len() as u64)
                    .fold(1u64, u64::saturating_mul),
            }
        };
        let ks: u64 = self.k.iter().map(|&k| per_k(k)).fold(0u64, u64::saturating_add);
        (self.l.len() as u64)
            .saturating_mul(ks)
            .saturating_mul(self.n.len() as u64)
    }

    /// Cells in lexicographic order of `(l, k, m_users, n)`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut l = self.l.clone();
        let mut k = self.k.clone();
        let mut n = self.n.clone();
        for v in [&mut l, &mut k, &mut n] {
            v.sort_unstable();
            v.dedup();
        }
        let mut out = Vec::new();
        for &lv in &l {
            for &kv in &k {
                for users in self.user_tuples(kv) {
                    for &nv in &n {
                        out.push(Cell {
                            l: lv,
                            k: kv,
                            users: users.clone(),
                            n: nv,
                        });
                    }
                }
            }
        }
        out
    }

    fn user_tuples(&self, k: usize) -> Vec<Vec<usize>> {
        let sorted = |a: &Vec<usize>| {
            let mut a = a.clone();
            a.sort_unstable();
            a.dedup();
            a
        };
        if let Some(m) = &self.m_all {
            return sorted(m).into_iter().map(|v| vec![v; k]).collect();
        }
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for a in &self.m_users[..k] {
            let vals = sorted(a);
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        acc
    }

    pub fn header(&self) -> String {
        let mut h = BASE_HEADER.to_string();
        if !self.seeds.is_empty() {
            h.push_str(",noiseless_pass");
        }
        if self.slope_powers().is_some() {
            h.push_str(",median_slope");
        }
        h
    }

    fn slope_powers(&self) -> Option<(f64, f64)> {
        Some((self.options.snr_lo?, self.options.snr_hi?))
    }
}

fn optimal_word(rep: &DoFReport) -> &'static str {
    match rep.optimality {
        Optimality::Optimal => "optimal",
        Optimality::SuboptimalKnownGap => "suboptimal",
        Optimality::Unknown => "unknown",
    }
}

fn row(spec: &SweepSpec, cell: &Cell) -> Result<String, CliError> {
    let config = NetworkConfig::new(vec![cell.users.clone(); cell.l], cell.n)
        .map_err(|e| CliError::usage(format!("sweep cell: {e}")))?;
    let rep = classify(&config).map_err(|e| CliError::usage(e.to_string()))?;
    let users: Vec<String> = cell.users.iter().map(|m| m.to_string()).collect();
    let mut line = format!(
        "{},{},{},{},{},{},{},{}",
        cell.l,
        cell.k,
        users.join(";"),
        cell.n,
        rational(rep.upper_bound),
        rep.achievable.map(rational).unwrap_or_else(|| "none".into()),
        rep.regime,
        optimal_word(&rep)
    );
    let tol = spec.options.tolerance.unwrap_or(mwrc_core::scheme::NOISELESS_TOL);
    if !spec.seeds.is_empty() {
        line.push(',');
        if let Some(s) = &rep.strategy {
            let passed = spec
                .seeds
                .iter()
                .filter(|&&seed| {
                    let Ok(ch) = sample_channels(&config, seed) else { return false };
                    let Ok(sch) = build_scheme(&config, s, &ch) else { return false };
                    simulate_noiseless(&sch, &random_symbols(&sch, seed))
                        .is_ok_and(|o| o.residual <= tol)
                })
                .count();
            line.push_str(&format!("{passed}/{}", spec.seeds.len()));
        }
    }
    if let Some((lo, hi)) = spec.slope_powers() {
        line.push(',');
        if let Some(s) = &rep.strategy {
            let seeds: Vec<u64> = if spec.seeds.is_empty() { vec![0] } else { spec.seeds.clone() };
            let mut slopes: Vec<f64> = seeds
                .iter()
                .filter_map(|&seed| {
                    let ch = sample_channels(&config, seed).ok()?;
                    let sch = build_scheme(&config, s, &ch).ok()?;
                    estimate_dof_slope(&sch, &ch, lo, hi).ok()
                })
                .collect();
            if !slopes.is_empty() {
                slopes.sort_by(f64::total_cmp);
                line.push_str(&sig6(crate::median(&slopes)));
            }
        }
    }
    Ok(line)
}

/// Header plus one row per cell, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<String>, CliError> {
    let cells = spec.cell_count();
    if cells > MAX_CELLS {
        return Err(CliError::oversize(format!(
            "sweep expands to {cells} cells, more than the limit of {MAX_CELLS}"
        )));
    }
    let rows: Vec<String> = spec
        .cells()
        .par_iter()
        .map(|c| row(spec, c))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(rows.len() + 1);
    out.push(spec.header());
    out.extend(rows);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_and_order() {
        let spec = parse_sweep(
            "[ranges]\nl = 2\nk = 2\nm1 = { from = 1, to = 2 }\nm2 = [2, 1]\nn = [4]\n",
        )
        .unwrap();
        assert_eq!(spec.cell_count(), 4);
        let users: Vec<Vec<usize>> = spec.cells().into_iter().map(|c| c.users).collect();
        assert_eq!(users, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn missing_user_axis_is_rejected() {
        let err = parse_sweep("[ranges]\nl = 1\nk = 3\nm1 = 2\nm2 = 2\nn = 3\n").unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("m3"));
    }

    #[test]
    fn oversize_is_refused() {
        let spec = parse_sweep(
            "[ranges]\nl = { from = 1, to = 100 }\nk = 2\nm = { from = 1, to = 100 }\nn = { from = 1, to = 101 }\n",
        )
        .unwrap();
        assert_eq!(run_sweep(&spec).unwrap_err().code, 5);
    }
}
