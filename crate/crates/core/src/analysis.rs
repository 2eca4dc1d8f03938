//! Eigenvalue gap structure: smallest nonzero gaps, cos-bound constants and
//! the gap-scaling scan over comb spacings.

use rayon::prelude::*;

use crate::bloch::{full_spectrum, momentum, FullSpectrum};
use crate::dynamics::default_tau;
use crate::error::{Error, Result};
use crate::graph::{NecklaceSpec, PearlSpec};
use crate::numeric::ols_slope;

/// Smallest adjacent difference of the sorted values that exceeds `tau`.
pub fn min_nonzero_gap(values: &[f64], tau: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 eigenvalues, got {}", values.len())));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > tau).min_by(f64::total_cmp).ok_or(Error::FullyDegenerate { tau })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosBoundReport {
    pub n: usize,
    pub m: usize,
    /// `min |lambda_{j,n} - lambda_{k,m}| / |cos p_j - cos p_k|` over admissible pairs.
    pub c_measured: f64,
    pub pairs: usize,
}

fn check_branch(spec: &FullSpectrum, n: usize, tau: f64) -> Result<()> {
    let branches = spec.necklace().pearl().m();
    if n >= branches {
        return Err(Error::InvalidParameter(format!("branch {n} out of range (pearl has {branches})")));
    }
    for s in spec.sectors() {
        let v = &s.values;
        let below = n > 0 && v[n] - v[n - 1] <= tau;
        let above = n + 1 < branches && v[n + 1] - v[n] <= tau;
        if below || above {
            return Err(Error::BranchOverlap(n));
        }
    }
    Ok(())
}

pub fn cos_bound_constant(spec: &FullSpectrum, n: usize, m: usize, tau: f64) -> Result<CosBoundReport> {
    check_branch(spec, n, tau)?;
    check_branch(spec, m, tau)?;
    let pearls = spec.necklace().pearls();
    let cosines = (0..pearls).map(|k| momentum(k, pearls).map(f64::cos)).collect::<Result<Vec<_>>>()?;
    let (bn, bm) = (spec.branch(n), spec.branch(m));
    let mut c_measured = f64::INFINITY;
    let mut pairs = 0;
    for j in 0..pearls {
        for k in 0..pearls {
            let dc = (cosines[j] - cosines[k]).abs();
            let dl = (bn[j] - bm[k]).abs();
            if dc > tau && dl > tau {
                pairs += 1;
                c_measured = c_measured.min(dl / dc);
            }
        }
    }
    if pairs == 0 {
        return Err(Error::EmptyReport { n, m });
    }
    Ok(CosBoundReport { n, m, c_measured, pairs })
}

/// `min_{j,k} |lambda_{j,n} - lambda_{k,m}|` for two different branches.
pub fn cross_sector_min_gap(spec: &FullSpectrum, n: usize, m: usize) -> Result<f64> {
    let branches = spec.necklace().pearl().m();
    if n == m || n >= branches || m >= branches {
        return Err(Error::InvalidParameter(format!("need two distinct branches below {branches}, got ({n}, {m})")));
    }
    let (bn, bm) = (spec.branch(n), spec.branch(m));
    Ok(bn.iter().flat_map(|a| bm.iter().map(move |b| (a - b).abs())).fold(f64::INFINITY, f64::min))
}

/// `(1 / (8c)) (K / T) ln^2(K / 2)`: contribution of one pair of branches to
/// the distance from the limit, assuming overlaps of order `1/K`.
pub fn mixing_bound_curve(c: f64, k: f64, t: f64) -> Result<f64> {
    if !(c > 0.0 && k >= 3.0 && t > 0.0) {
        return Err(Error::InvalidParameter(format!("need c > 0, K >= 3, T > 0, got ({c}, {k}, {t})")));
    }
    Ok((k / t) * (k / 2.0).ln().powi(2) / (8.0 * c))
}

/// Pearl for comb spacing `d`, with `d = 0` meaning the plain cycle.
pub fn comb_or_cycle(d: usize) -> Result<PearlSpec> {
    if d == 0 {
        Ok(PearlSpec::cycle())
    } else {
        PearlSpec::comb(d)
    }
}

/// Integers from `a` to `b` spaced by a factor `sqrt(2)` (rounded, deduplicated),
/// always including both ends. Degenerate ranges (`b <= a` or `a = 0`) give `[a]`.
pub fn log_spaced(a: usize, b: usize) -> Vec<usize> {
    if a == 0 || b <= a {
        return vec![a];
    }
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let v = (a as f64 * 2f64.powf(i as f64 / 2.0)).round() as usize;
        if v >= b {
            break;
        }
        if out.last() != Some(&v) {
            out.push(v);
        }
        i += 1;
    }
    out.push(b);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapScanRecord {
    pub d: usize,
    pub k: usize,
    pub min_gap: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapScan {
    /// Sorted by `(d, K)`.
    pub records: Vec<GapScanRecord>,
    /// Least-squares slope of `ln(min_gap)` against `ln(K)`, per `d` in
    /// ascending order; `None` with fewer than two distinct `K`.
    pub slopes: Vec<(usize, Option<f64>)>,
}

pub fn gap_scan(d_list: &[usize], k_list: &[usize]) -> Result<GapScan> {
    let mut ds = d_list.to_vec();
    ds.sort_unstable();
    ds.dedup();
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let jobs: Vec<(usize, usize)> = ds.iter().flat_map(|&d| ks.iter().map(move |&k| (d, k))).collect();
    let records = jobs
        .into_par_iter()
        .map(|(d, k)| {
            let spec = full_spectrum(&NecklaceSpec::new(comb_or_cycle(d)?, k)?)?;
            let values = spec.sorted_values();
            let tau = default_tau(&values);
            Ok(GapScanRecord { d, k, min_gap: min_nonzero_gap(&values, tau)?, tau })
        })
        .collect::<Result<Vec<_>>>()?;
    let slopes = ds
        .iter()
        .map(|&d| {
            let (x, y): (Vec<f64>, Vec<f64>) = records
                .iter()
                .filter(|r| r.d == d)
                .map(|r| ((r.k as f64).ln(), r.min_gap.ln()))
                .unzip();
            (d, ols_slope(&x, &y))
        })
        .collect();
    Ok(GapScan { records, slopes })
}
