//! Walk dynamics in an eigenbasis: instantaneous and time-averaged vertex
//! distributions, the limiting distribution, total variation distance, the
//! `sum 2|<psi|phi>|^2 / (T |dl|)` convergence bound and empirical mixing times.
//!
//! Everything that depends on eigenvalue equality goes through a
//! [`DegeneracyPartition`] and eigenspace projectors, so results do not depend
//! on how a solver picked a basis inside a degenerate eigenspace.

use std::ops::Range;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bloch::FullSpectrum;
use crate::eig::EigenDecomposition;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Entries in `[-NEGATIVE_CLAMP, 0)` are roundoff and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
pub const DISTRIBUTION_SUM_TOL: f64 = 1e-9;
pub const INITIAL_NORM_TOL: f64 = 1e-12;

/// Probability vector over necklace vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(mut raw: Vec<f64>) -> Result<Self> {
        for (i, p) in raw.iter_mut().enumerate() {
            if !p.is_finite() || *p < -NEGATIVE_CLAMP {
                return Err(Error::InvalidDistribution(format!("entry {i} is {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total = compensated_sum(raw.iter().copied());
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self(raw))
    }

    pub fn delta(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(Error::InvalidParameter(format!("vertex {at} out of range for {len} vertices")));
        }
        let mut v = vec![0.0; len];
        v[at] = 1.0;
        Ok(Self(v))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.0.iter().copied())
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Unit-norm starting amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState(Array1<Complex64>);

impl InitialState {
    pub fn new(amplitudes: Array1<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > INITIAL_NORM_TOL {
            return Err(Error::InvalidParameter(format!("initial state must have unit norm, got {norm}")));
        }
        Ok(Self(amplitudes))
    }

    /// Walker localized on one vertex.
    pub fn vertex(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(Error::InvalidParameter(format!("vertex {at} out of range for {len} vertices")));
        }
        let mut v = Array1::zeros(len);
        v[at] = Complex64::new(1.0, 0.0);
        Ok(Self(v))
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Orthonormal eigenbasis of a Hamiltonian, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenbasis {
    values: Vec<f64>,
    vectors: Array2<Complex64>,
}

impl Eigenbasis {
    /// Columns of `vectors` are the eigenvectors; input is re-sorted ascending.
    pub fn new(values: Vec<f64>, vectors: Array2<Complex64>) -> Result<Self> {
        let n = values.len();
        if vectors.dim() != (n, n) {
            return Err(Error::InvalidParameter(format!(
                "expected {n}x{n} eigenvectors, got {:?}",
                vectors.dim()
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return Ok(Self { values, vectors });
        }
        let sorted_values = order.iter().map(|&i| values[i]).collect();
        let mut sorted = Array2::zeros((n, n));
        for (c, &src) in order.iter().enumerate() {
            sorted.column_mut(c).assign(&vectors.column(src));
        }
        Ok(Self { values: sorted_values, vectors: sorted })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Array2<Complex64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `<psi_k | phi>` for every eigenvector.
    pub fn overlaps(&self, phi: &InitialState) -> Result<Array1<Complex64>> {
        if phi.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "initial state has {} amplitudes, basis has dimension {}",
                phi.len(),
                self.dim()
            )));
        }
        Ok(self.vectors.t().mapv(|z| z.conj()).dot(phi.amplitudes()))
    }

    /// `1e-8 * max |lambda|` (or `1e-8` for the zero matrix).
    pub fn default_tau(&self) -> f64 {
        default_tau(&self.values)
    }
}

impl From<&FullSpectrum> for Eigenbasis {
    fn from(spec: &FullSpectrum) -> Self {
        let (entries, vectors) = spec.eigenbasis();
        Self { values: entries.iter().map(|e| e.value).collect(), vectors }
    }
}

impl From<EigenDecomposition> for Eigenbasis {
    fn from(e: EigenDecomposition) -> Self {
        Self { values: e.values, vectors: e.vectors }
    }
}

pub fn default_tau(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1e-8 * if max > 0.0 { max } else { 1.0 }
}

/// Groups of numerically equal eigenvalues, from a sorted sweep that starts a
/// new group whenever the gap to the previous value exceeds `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyPartition {
    groups: Vec<Range<usize>>,
    means: Vec<f64>,
    tau: f64,
    ambiguous: bool,
}

impl DegeneracyPartition {
    pub fn new(sorted_values: &[f64], tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("degeneracy tolerance must be positive, got {tau}")));
        }
        if sorted_values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("eigenvalues must be sorted ascending".into()));
        }
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=sorted_values.len() {
            if i == sorted_values.len() || sorted_values[i] - sorted_values[i - 1] > tau {
                groups.push(start..i);
                start = i;
            }
        }
        let means = groups
            .iter()
            .map(|g| compensated_sum(sorted_values[g.clone()].iter().copied()) / g.len() as f64)
            .collect();
        // chained merging can produce groups wider than tau
        let ambiguous = groups.iter().any(|g| sorted_values[g.end - 1] - sorted_values[g.start] > tau);
        Ok(Self { groups, means, tau, ambiguous })
    }

    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    /// Representative eigenvalue (mean) of each group.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// A group spans more than `tau`, i.e. the tolerance swallowed a real gap.
    pub fn is_ambiguous(&self) -> bool {
        self.ambiguous
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// `(1 - e^{-i x}) / (i x)` written as `e^{-i x/2} sin(x/2) / (x/2)`.
fn averaging_kernel(x: f64) -> Complex64 {
    let half = 0.5 * x;
    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
    Complex64::from_polar(sinc, -half)
}

/// Initial state resolved into eigenspace components `P_g phi`.
#[derive(Debug, Clone)]
pub struct ProjectedState {
    partition: DegeneracyPartition,
    /// `N x G`; column `g` is `P_g phi`.
    projections: Array2<Complex64>,
    /// `|P_g phi|^2`.
    weights: Vec<f64>,
}

impl ProjectedState {
    pub fn new(basis: &Eigenbasis, phi: &InitialState, tau: f64) -> Result<Self> {
        let partition = DegeneracyPartition::new(basis.values(), tau)?;
        let c = basis.overlaps(phi)?;
        let n = basis.dim();
        let g = partition.len();
        let v = basis.vectors();
        let columns: Vec<(Array1<Complex64>, f64)> = partition
            .groups()
            .par_iter()
            .map(|range| {
                let mut col = Array1::zeros(n);
                for k in range.clone() {
                    col.scaled_add(c[k], &v.column(k));
                }
                let w = compensated_sum(range.clone().map(|k| c[k].norm_sqr()));
                (col, w)
            })
            .collect();
        let mut projections = Array2::zeros((n, g));
        let mut weights = Vec::with_capacity(g);
        for (i, (col, w)) in columns.into_iter().enumerate() {
            projections.column_mut(i).assign(&col);
            weights.push(w);
        }
        Ok(Self { partition, projections, weights })
    }

    pub fn partition(&self) -> &DegeneracyPartition {
        &self.partition
    }

    /// `|P_g phi|^2` per group.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn limiting(&self) -> Result<Distribution> {
        let raw: Vec<f64> = self
            .projections
            .outer_iter()
            .map(|row| compensated_sum(row.iter().map(|z| z.norm_sqr())))
            .collect();
        Distribution::new(raw)
    }

    pub fn time_averaged(&self, t_avg: f64) -> Result<Distribution> {
        if !(t_avg > 0.0) || !t_avg.is_finite() {
            return Err(Error::InvalidParameter(format!("averaging time must be positive, got {t_avg}")));
        }
        let means = self.partition.means();
        let g = means.len();
        let mut kernel = Array2::<Complex64>::zeros((g, g));
        for a in 0..g {
            for b in a + 1..g {
                kernel[[a, b]] = averaging_kernel((means[a] - means[b]) * t_avg);
            }
        }
        let rows: Vec<_> = self.projections.outer_iter().collect();
        let raw: Vec<f64> = rows
            .par_iter()
            .map(|row| {
                let mut acc = CompensatedSum::new();
                for a in 0..g {
                    let ba = row[a];
                    acc.add(ba.norm_sqr());
                    let mut cross = Complex64::new(0.0, 0.0);
                    for b in a + 1..g {
                        cross += row[b].conj() * kernel[[a, b]];
                    }
                    acc.add(2.0 * (ba * cross).re);
                }
                acc.value()
            })
            .collect();
        Distribution::new(raw)
    }

    /// `sum_{g != h} 2 |P_g phi|^2 n_h / (T |mu_g - mu_h|)`, with `n_h` the
    /// multiplicity of group `h`; equal to the per-eigenvector pair sum.
    pub fn convergence_bound(&self, t_avg: f64) -> f64 {
        let means = self.partition.means();
        let sizes: Vec<f64> = self.partition.groups().iter().map(|r| r.len() as f64).collect();
        let per_group: Vec<f64> = (0..means.len())
            .into_par_iter()
            .map(|a| {
                let inv = compensated_sum(
                    (0..means.len()).filter(|&b| b != a).map(|b| sizes[b] / (means[a] - means[b]).abs()),
                );
                2.0 * self.weights[a] * inv
            })
            .collect();
        compensated_sum(per_group) / t_avg
    }

    /// Total variation between the time average at `t_avg` and the limit.
    pub fn distance_to_limit(&self, t_avg: f64) -> Result<f64> {
        tv_distance(&self.time_averaged(t_avg)?, &self.limiting()?)
    }
}

/// Instantaneous vertex distribution `|<x| e^{-iHt} |phi>|^2`.
pub fn probability_at_time(basis: &Eigenbasis, phi: &InitialState, t: f64) -> Result<Distribution> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    let c = basis.overlaps(phi)?;
    let evolved: Array1<Complex64> =
        c.iter().zip(basis.values()).map(|(ck, &l)| ck * Complex64::from_polar(1.0, -l * t)).collect();
    let amps = basis.vectors().dot(&evolved);
    Distribution::new(amps.iter().map(|z| z.norm_sqr()).collect())
}

/// Exact average of [`probability_at_time`] over `[0, T]`.
pub fn time_averaged(basis: &Eigenbasis, phi: &InitialState, t_avg: f64, tau: f64) -> Result<Distribution> {
    ProjectedState::new(basis, phi, tau)?.time_averaged(t_avg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitingDistribution {
    pub distribution: Distribution,
    pub partition: DegeneracyPartition,
}

/// `pi_x = sum_g |<x| P_g |phi>|^2`.
pub fn limiting_distribution(basis: &Eigenbasis, phi: &InitialState, tau: f64) -> Result<LimitingDistribution> {
    let state = ProjectedState::new(basis, phi, tau)?;
    Ok(LimitingDistribution { distribution: state.limiting()?, partition: state.partition })
}

/// `sum_x |p_x - q_x|` (not halved; range `[0, 2]`).
pub fn tv_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidParameter(format!("distribution lengths differ: {} vs {}", p.len(), q.len())));
    }
    Ok(compensated_sum(p.0.iter().zip(&q.0).map(|(a, b)| (a - b).abs())))
}

pub fn lemma43_bound(basis: &Eigenbasis, phi: &InitialState, t_avg: f64, tau: f64) -> Result<f64> {
    if !(t_avg > 0.0) {
        return Err(Error::InvalidParameter(format!("averaging time must be positive, got {t_avg}")));
    }
    Ok(ProjectedState::new(basis, phi, tau)?.convergence_bound(t_avg))
}

/// Geometric grid `t_lo * ratio^i` up to `t_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_lo: f64,
    pub t_hi: f64,
    pub ratio: f64,
}

impl TimeGrid {
    pub fn new(t_lo: f64, t_hi: f64, ratio: f64) -> Result<Self> {
        if !(t_lo > 0.0 && t_hi >= t_lo && ratio > 1.0) || !t_hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time grid needs 0 < t_lo <= t_hi and ratio > 1, got ({t_lo}, {t_hi}, {ratio})"
            )));
        }
        Ok(Self { t_lo, t_hi, ratio })
    }

    /// Default grid: from 1 to `t_hi` with ratio 1.05.
    pub fn up_to(t_hi: f64) -> Result<Self> {
        Self::new(1.0f64.min(t_hi), t_hi, 1.05)
    }

    pub fn points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        let mut i = 0i32;
        loop {
            let t = self.t_lo * self.ratio.powi(i);
            if t > self.t_hi * (1.0 + 1e-12) {
                break;
            }
            pts.push(t);
            i += 1;
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingScan {
    pub times: Vec<f64>,
    pub tv: Vec<f64>,
    /// First grid point from which every later point has `tv <= eps`.
    pub t_mix: Option<f64>,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 2], got {eps}")));
    }
    Ok(())
}

impl MixingScan {
    /// Mixing time from precomputed distances on ascending `times`.
    pub fn from_samples(times: Vec<f64>, tv: Vec<f64>, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        if times.is_empty() || times.len() != tv.len() {
            return Err(Error::InvalidParameter(format!(
                "need equally many times and distances, got {} and {}",
                times.len(),
                tv.len()
            )));
        }
        let t_mix = match tv.iter().rposition(|&d| d > eps) {
            None => Some(times[0]),
            Some(last) if last + 1 < times.len() => Some(times[last + 1]),
            Some(_) => None,
        };
        Ok(Self { times, tv, t_mix })
    }
}

/// Total variation to the limit on every grid point, and the empirical mixing time.
pub fn mixing_scan(basis: &Eigenbasis, phi: &InitialState, eps: f64, grid: &TimeGrid, tau: f64) -> Result<MixingScan> {
    check_eps(eps)?;
    let state = ProjectedState::new(basis, phi, tau)?;
    let times = grid.points();
    let tv = times.iter().map(|&t| state.distance_to_limit(t)).collect::<Result<Vec<_>>>()?;
    MixingScan::from_samples(times, tv, eps)
}

/// Smallest grid time `T` with `tv(T') <= eps` for every grid `T' >= T`.
pub fn mixing_time(basis: &Eigenbasis, phi: &InitialState, eps: f64, grid: &TimeGrid, tau: f64) -> Result<f64> {
    let scan = mixing_scan(basis, phi, eps, grid, tau)?;
    scan.t_mix.ok_or(Error::MixingNotFound { t_hi: *scan.times.last().unwrap(), tv: *scan.tv.last().unwrap() })
}
