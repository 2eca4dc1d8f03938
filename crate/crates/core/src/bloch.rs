//! Momentum-sector block diagonalization of necklace Hamiltonians.
//!
//! With the plane-wave ansatz `psi[(j, m)] = e^{i p_k j} y_m / sqrt(K)` every
//! eigenpair of the `KM x KM` necklace Hamiltonian comes from an eigenpair of
//! the `M x M` sector matrix `Y_k = P + Q_k`, where `Q_k` carries the phase of
//! the inter-pearl link between the two roots.

use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::eig::{eigh, HermitianMatrix};
use crate::error::{Error, Result};
use crate::graph::{NecklaceSpec, PearlSpec};

/// Tolerance on `|y| = 1` accepted by [`lift_eigenvector`].
const UNIT_NORM_TOL: f64 = 1e-10;

/// `2 pi k / K`.
pub fn momentum(k: usize, pearls: usize) -> Result<f64> {
    if k >= pearls {
        return Err(Error::InvalidParameter(format!("momentum index {k} out of range for K = {pearls}")));
    }
    Ok(2.0 * PI * k as f64 / pearls as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumSector {
    pub k: usize,
    pub pearls: usize,
}

impl MomentumSector {
    pub fn new(k: usize, pearls: usize) -> Result<Self> {
        momentum(k, pearls)?;
        Ok(Self { k, pearls })
    }

    pub fn momentum(&self) -> f64 {
        2.0 * PI * self.k as f64 / self.pearls as f64
    }
}

/// `Y = P + Q(p)`.
///
/// Two distinct roots get `Q[in][out] = e^{-ip}` and `Q[out][in] = e^{ip}`;
/// a single root gets `Q[root][root] = 2 cos p`.
pub fn sector_matrix(pearl: &PearlSpec, p: f64) -> HermitianMatrix {
    let mut y = pearl.adjacency().mapv(|x| Complex64::new(x, 0.0));
    let (a, b) = (pearl.root_in(), pearl.root_out());
    if pearl.single_root() {
        y[[a, a]] += Complex64::new(2.0 * p.cos(), 0.0);
    } else {
        let phase = Complex64::from_polar(1.0, p);
        y[[a, b]] += phase.conj();
        y[[b, a]] += phase;
    }
    HermitianMatrix::new(y).expect("sector matrix is Hermitian by construction")
}

/// Eigenpairs of one sector matrix, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpectrum {
    pub sector: MomentumSector,
    pub values: Vec<f64>,
    /// Column `n` is the sector vector for `values[n]`.
    pub vectors: Array2<Complex64>,
}

pub fn sector_spectrum(pearl: &PearlSpec, k: usize, pearls: usize) -> Result<SectorSpectrum> {
    let sector = MomentumSector::new(k, pearls)?;
    let eig = eigh(&sector_matrix(pearl, sector.momentum()))?;
    Ok(SectorSpectrum { sector, values: eig.values, vectors: eig.vectors })
}

/// Full necklace eigenvector from a unit sector vector.
pub fn lift_eigenvector(y: ArrayView1<Complex64>, k: usize, pearls: usize) -> Result<Array1<Complex64>> {
    let p = momentum(k, pearls)?;
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidParameter(format!("sector vector must have unit norm, got {norm}")));
    }
    let m = y.len();
    let scale = 1.0 / (pearls as f64).sqrt();
    let mut psi = Array1::zeros(pearls * m);
    for j in 0..pearls {
        let phase = Complex64::from_polar(scale, p * j as f64);
        for (mm, &ym) in y.iter().enumerate() {
            psi[j * m + mm] = phase * ym;
        }
    }
    Ok(psi)
}

/// One labeled eigenvalue of the full Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEntry {
    pub k: usize,
    pub n: usize,
    pub value: f64,
}

/// All `K * M` eigenpairs, stored per sector. Lifted eigenvectors are built on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct FullSpectrum {
    necklace: NecklaceSpec,
    sectors: Vec<SectorSpectrum>,
}

impl FullSpectrum {
    pub fn necklace(&self) -> &NecklaceSpec {
        &self.necklace
    }

    pub fn sectors(&self) -> &[SectorSpectrum] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.necklace.vertex_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries ordered by `(k, n)`.
    pub fn entries(&self) -> impl Iterator<Item = SpectralEntry> + '_ {
        self.sectors.iter().flat_map(|s| {
            s.values.iter().enumerate().map(move |(n, &value)| SpectralEntry { k: s.sector.k, n, value })
        })
    }

    /// `lambda_{k,n}` for every sector `k` and fixed branch `n`.
    pub fn branch(&self, n: usize) -> Vec<f64> {
        self.sectors.iter().map(|s| s.values[n]).collect()
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries().map(|e| e.value).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn lifted(&self, k: usize, n: usize) -> Result<Array1<Complex64>> {
        let s = self
            .sectors
            .get(k)
            .ok_or_else(|| Error::InvalidParameter(format!("sector {k} out of range")))?;
        if n >= s.values.len() {
            return Err(Error::InvalidParameter(format!("branch {n} out of range")));
        }
        lift_eigenvector(s.vectors.column(n), k, self.necklace.pearls())
    }

    /// Entries in ascending eigenvalue order (ties by `(k, n)`) with the lifted
    /// eigenvectors as columns of an `N x N` matrix.
    pub fn eigenbasis(&self) -> (Vec<SpectralEntry>, Array2<Complex64>) {
        let mut entries: Vec<SpectralEntry> = self.entries().collect();
        entries.sort_by(|a, b| a.value.total_cmp(&b.value).then((a.k, a.n).cmp(&(b.k, b.n))));
        let n = self.len();
        let columns: Vec<Array1<Complex64>> = entries
            .par_iter()
            .map(|e| self.lifted(e.k, e.n).expect("stored sector vectors are unit"))
            .collect();
        let mut vectors = Array2::zeros((n, n));
        for (c, col) in columns.into_iter().enumerate() {
            vectors.column_mut(c).assign(&col);
        }
        (entries, vectors)
    }
}

/// Diagonalizes all `K` sectors (in parallel); results are ordered by `k`.
pub fn full_spectrum(necklace: &NecklaceSpec) -> Result<FullSpectrum> {
    let pearls = necklace.pearls();
    let sectors = (0..pearls)
        .into_par_iter()
        .map(|k| sector_spectrum(necklace.pearl(), k, pearls))
        .collect::<Result<Vec<_>>>()?;
    Ok(FullSpectrum { necklace: necklace.clone(), sectors })
}

/// Eigenvalue with its sector vector in canonical pearl labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormPair {
    pub value: f64,
    pub vector: Array1<Complex64>,
}

/// (K,1)-comb sector `k`: `cos p -/+ sqrt(1 + cos^2 p)` with vectors
/// `(lambda, 1) / sqrt(1 + lambda^2)` (base first, then tooth). Ascending.
pub fn comb1_closed_form(k: usize, pearls: usize) -> Result<[ClosedFormPair; 2]> {
    let cp = momentum(k, pearls)?.cos();
    let root = (1.0 + cp * cp).sqrt();
    let pair = |lambda: f64| {
        let norm = (1.0 + lambda * lambda).sqrt();
        ClosedFormPair {
            value: lambda,
            vector: Array1::from(vec![Complex64::new(lambda / norm, 0.0), Complex64::new(1.0 / norm, 0.0)]),
        }
    };
    Ok([pair(cp - root), pair(cp + root)])
}

/// (K,2)-comb sector `k`: eigenvalues `-s, 0, s` with `s = sqrt(3 + 2 cos p)`.
///
/// Canonical labeling is vertex 0 = ring vertex carrying the tooth (`root_in`),
/// 1 = the other ring vertex (`root_out`), 2 = tooth. Relative to the labeling
/// "1 = tooth base, 2 = tooth top, 3 = other ring vertex" this is the
/// permutation `(1, 2, 3) -> (0, 2, 1)`.
pub fn comb2_closed_form(k: usize, pearls: usize) -> Result<[ClosedFormPair; 3]> {
    let p = momentum(k, pearls)?;
    let s2 = 3.0 + 2.0 * p.cos();
    let s = s2.sqrt();
    // 1 + e^{ip} = 2 e^{ip/2} cos(p/2)
    let link = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, p);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let branch = |sign: f64| {
        let scale = 1.0 / (2.0f64).sqrt() / s;
        ClosedFormPair {
            value: sign * s,
            vector: Array1::from(vec![Complex64::new(sign * s * scale, 0.0), link * scale, one * scale]),
        }
    };
    let flat = ClosedFormPair { value: 0.0, vector: Array1::from(vec![zero, -one / s, link.conj() / s]) };
    Ok([branch(-1.0), flat, branch(1.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::assemble_hamiltonian;

    fn residual(h: &Array2<f64>, psi: &Array1<Complex64>, lambda: f64) -> f64 {
        let hc = h.mapv(|x| Complex64::new(x, 0.0));
        let hp = hc.dot(psi);
        hp.iter().zip(psi.iter()).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt()
    }

    fn sector_residual(y: &HermitianMatrix, v: &Array1<Complex64>, lambda: f64) -> f64 {
        let yv = y.as_array().dot(v);
        yv.iter().zip(v.iter()).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn momenta() {
        assert_eq!(momentum(0, 8).unwrap(), 0.0);
        assert!((momentum(1, 8).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((momentum(4, 8).unwrap() - PI).abs() < 1e-15);
        assert!(matches!(momentum(8, 8), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sector_matrices() {
        let p = 0.7;
        let y = sector_matrix(&PearlSpec::comb(1).unwrap(), p);
        let a = y.as_array();
        assert!((a[[0, 0]].re - 2.0 * p.cos()).abs() < 1e-15);
        assert_eq!(a[[0, 1]], Complex64::new(1.0, 0.0));
        assert_eq!(a[[1, 1]], Complex64::new(0.0, 0.0));

        let y = sector_matrix(&PearlSpec::cycle(), p);
        assert_eq!(y.dim(), 1);
        assert!((y.as_array()[[0, 0]].re - 2.0 * p.cos()).abs() < 1e-15);

        let y = sector_matrix(&PearlSpec::comb(3).unwrap(), p);
        let a = y.as_array();
        assert!((a[[0, 2]] - Complex64::from_polar(1.0, -p)).norm() < 1e-15);
        assert!((a[[2, 0]] - Complex64::from_polar(1.0, p)).norm() < 1e-15);
    }

    #[test]
    fn comb2_zero_momentum() {
        let y = sector_matrix(&PearlSpec::comb(2).unwrap(), 0.0);
        assert_eq!(y.as_array()[[0, 1]], Complex64::new(2.0, 0.0));
        let e = eigh(&y).unwrap();
        let s5 = 5f64.sqrt();
        for (got, want) in e.values.iter().zip([-s5, 0.0, s5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sector_spectra() {
        for k in 0..7 {
            let s = sector_spectrum(&PearlSpec::cycle(), k, 7).unwrap();
            assert!((s.values[0] - 2.0 * (2.0 * PI * k as f64 / 7.0).cos()).abs() < 1e-14);
        }
        let r2 = 2f64.sqrt();
        for pearls in [3, 10, 64] {
            let s = sector_spectrum(&PearlSpec::comb(1).unwrap(), 0, pearls).unwrap();
            assert!((s.values[0] - (1.0 - r2)).abs() < 1e-13 && (s.values[1] - (1.0 + r2)).abs() < 1e-13);
        }
        let s = sector_spectrum(&PearlSpec::comb(2).unwrap(), 0, 5).unwrap();
        assert!((s.values[2] - 5f64.sqrt()).abs() < 1e-13 && s.values[1].abs() < 1e-13);
    }

    #[test]
    fn lifting() {
        let y = Array1::from(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        let psi = lift_eigenvector(y.view(), 0, 3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for j in 0..3 {
            assert!((psi[2 * j] - y[0] * s).norm() < 1e-15);
            assert!((psi[2 * j + 1] - y[1] * s).norm() < 1e-15);
        }

        let one = Array1::from(vec![Complex64::new(1.0, 0.0)]);
        let psi = lift_eigenvector(one.view(), 2, 5).unwrap();
        for j in 0..5 {
            let want = Complex64::from_polar(1.0 / 5f64.sqrt(), 2.0 * PI * 2.0 * j as f64 / 5.0);
            assert!((psi[j] - want).norm() < 1e-15);
        }

        let bad = Array1::from(vec![Complex64::new(2.0, 0.0)]);
        assert!(lift_eigenvector(bad.view(), 0, 3).is_err());
    }

    #[test]
    fn lifted_comb1_is_eigenvector() {
        let neck = NecklaceSpec::new(PearlSpec::comb(1).unwrap(), 4).unwrap();
        let h = assemble_hamiltonian(&neck).into_array();
        let s = sector_spectrum(neck.pearl(), 1, 4).unwrap();
        let psi = lift_eigenvector(s.vectors.column(1), 1, 4).unwrap();
        assert!(residual(&h, &psi, s.values[1]) <= 1e-9);
    }

    #[test]
    fn small_full_spectra() {
        let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::cycle(), 4).unwrap()).unwrap();
        let want = [-2.0, 0.0, 0.0, 2.0];
        for (g, w) in spec.sorted_values().iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
        // odd K is not bipartite: the spectrum pairs as lambda <-> -1/lambda rather than -lambda
        let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::comb(1).unwrap(), 3).unwrap()).unwrap();
        let v = spec.sorted_values();
        assert_eq!(v.len(), 6);
        for i in 0..6 {
            assert!(v.iter().any(|w| (v[i] * w + 1.0).abs() < 1e-12));
        }
        let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::comb(1).unwrap(), 4).unwrap()).unwrap();
        let v = spec.sorted_values();
        for i in 0..8 {
            assert!((v[i] + v[7 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_spectrum_exact() {
        for pearls in [3, 8, 17, 64] {
            let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::cycle(), pearls).unwrap()).unwrap();
            for e in spec.entries() {
                let want = 2.0 * (2.0 * PI * e.k as f64 / pearls as f64).cos();
                assert!((e.value - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_sectors_pair_up() {
        for d in 1..5 {
            for pearls in [5, 8, 11] {
                let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::comb(d).unwrap(), pearls).unwrap()).unwrap();
                for k in 1..pearls {
                    let a = &spec.sectors()[k];
                    let b = &spec.sectors()[pearls - k];
                    let ya = sector_matrix(&PearlSpec::comb(d).unwrap(), a.sector.momentum());
                    let yb = sector_matrix(&PearlSpec::comb(d).unwrap(), b.sector.momentum());
                    for (x, y) in ya.as_array().iter().zip(yb.as_array().iter()) {
                        assert!((x - y.conj()).norm() < 1e-14);
                    }
                    for (x, y) in a.values.iter().zip(&b.values) {
                        assert!((x - y).abs() <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn comb1_closed_forms() {
        let r2 = 2f64.sqrt();
        let [minus, plus] = comb1_closed_form(0, 9).unwrap();
        assert!((minus.value - (1.0 - r2)).abs() < 1e-15 && (plus.value - (1.0 + r2)).abs() < 1e-15);
        let [minus, plus] = comb1_closed_form(2, 8).unwrap();
        assert!((minus.value + 1.0).abs() < 1e-15 && (plus.value - 1.0).abs() < 1e-15);
        for k in 0..13 {
            let [m, p] = comb1_closed_form(k, 13).unwrap();
            assert!((m.value * p.value + 1.0).abs() < 1e-12);
            let y = sector_matrix(&PearlSpec::comb(1).unwrap(), momentum(k, 13).unwrap());
            assert!(sector_residual(&y, &m.vector, m.value) < 1e-13);
            assert!(sector_residual(&y, &p.vector, p.value) < 1e-13);
        }
    }

    #[test]
    fn comb2_closed_forms() {
        let s5 = 5f64.sqrt();
        let [m, z, p] = comb2_closed_form(0, 7).unwrap();
        assert!((m.value + s5).abs() < 1e-15 && z.value == 0.0 && (p.value - s5).abs() < 1e-15);
        let [m, _, p] = comb2_closed_form(3, 6).unwrap();
        assert!((m.value + 1.0).abs() < 1e-12 && (p.value - 1.0).abs() < 1e-12);

        let pearl = PearlSpec::comb(2).unwrap();
        for pearls in [4, 9, 16] {
            for k in 0..pearls {
                let forms = comb2_closed_form(k, pearls).unwrap();
                let y = sector_matrix(&pearl, momentum(k, pearls).unwrap());
                let s = sector_spectrum(&pearl, k, pearls).unwrap();
                for (n, f) in forms.iter().enumerate() {
                    assert!((f.value - s.values[n]).abs() < 1e-10);
                    let norm: f64 = f.vector.iter().map(|z| z.norm_sqr()).sum();
                    assert!((norm - 1.0).abs() < 1e-13);
                    assert!(sector_residual(&y, &f.vector, f.value) < 1e-13, "k={k} n={n}");
                }
            }
        }
    }
}
