//! Dense Hermitian eigensolver.
//!
//! Householder reduction to complex tridiagonal form, a diagonal unitary that
//! makes the off-diagonal real and nonnegative, then implicit QL with Wilkinson
//! shifts on the real tridiagonal matrix. Output is deterministic: eigenvalues
//! ascending, and each eigenvector is rotated so that its largest-magnitude
//! component is real and positive (lowest index wins ties).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance on `A - A^H` accepted (and symmetrized away) by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Components within this relative distance of the largest magnitude count as tied.
const PHASE_TIE_TOL: f64 = 1e-10;

const MAX_QL_ITERATIONS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(Array2<Complex64>);

impl HermitianMatrix {
    pub fn new(a: Array2<Complex64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c || r == 0 {
            return Err(Error::InvalidMatrix(format!("expected a non-empty square matrix, got {r}x{c}")));
        }
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("matrix has non-finite entries".into()));
        }
        let mut sym = a.clone();
        for i in 0..r {
            for j in 0..=i {
                let d = (a[[i, j]] - a[[j, i]].conj()).norm();
                if d > HERMITIAN_TOL {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) deviates from Hermitian symmetry by {d:e}"
                    )));
                }
                let avg = (a[[i, j]] + a[[j, i]].conj()) * 0.5;
                sym[[i, j]] = avg;
                sym[[j, i]] = avg.conj();
            }
        }
        Ok(Self(sym))
    }

    pub fn from_real(a: &Array2<f64>) -> Result<Self> {
        Self::new(a.mapv(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Eigenvalues in ascending order with unit eigenvectors as matrix columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Array2<Complex64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

pub fn eigh(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut work: Vec<Complex64> = a.as_array().iter().copied().collect();
    let mut q = identity(n);
    tridiagonalize(&mut work, &mut q, n);

    let mut diag: Vec<f64> = (0..n).map(|i| work[i * n + i].re).collect();
    let mut off = vec![0.0; n];
    let mut phase = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n.saturating_sub(1) {
        let e = work[(i + 1) * n + i];
        let mag = e.norm();
        off[i] = mag;
        phase[i + 1] = if mag > 0.0 { phase[i] * (e / mag) } else { phase[i] };
    }

    // rows of `z` are the eigenvectors of the real tridiagonal matrix
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    tridiagonal_ql(&mut diag, &mut off, &mut z)?;

    // Q D, so that eigenvectors of A are (Q D) z
    for r in 0..n {
        for i in 0..n {
            q[r * n + i] *= phase[i];
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]).then(x.cmp(&y)));

    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        let zr = &z[src];
        for r in 0..n {
            let row = &q[r * n..(r + 1) * n];
            vectors[[r, col]] = row.iter().zip(zr).map(|(qv, &zv)| qv * zv).sum::<Complex64>();
        }
    }
    for col in 0..n {
        normalize_phase(&mut vectors, col);
    }
    let values = order.iter().map(|&i| diag[i]).collect();
    Ok(EigenDecomposition { values, vectors })
}

fn identity(n: usize) -> Vec<Complex64> {
    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }
    q
}

/// In-place `A <- Q^H A Q` with `Q` a product of Householder reflectors,
/// leaving `A` tridiagonal. `q` accumulates `Q`. Both row-major `n x n`.
fn tridiagonalize(a: &mut [Complex64], q: &mut [Complex64], n: usize) {
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let len = n - lo;
        let alpha = a[lo * n + k];
        let tail: f64 = (lo + 1..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        let sign = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { Complex64::new(1.0, 0.0) };

        let mut u: Vec<Complex64> = (lo..n).map(|i| a[i * n + k]).collect();
        u[0] = alpha + sign * xnorm;
        let vnorm2 = u[0].norm_sqr() + tail;
        let scale = (2.0 / vnorm2).sqrt();
        u.iter_mut().for_each(|x| *x *= scale);

        // p = A_sub u
        let mut p = vec![zero; len];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a[(lo + i) * n + lo..(lo + i) * n + n];
            *pi = row.iter().zip(&u).map(|(x, y)| x * y).sum();
        }
        let beta: f64 = u.iter().zip(&p).map(|(x, y)| (x.conj() * y).re).sum();
        let w: Vec<Complex64> = p.iter().zip(&u).map(|(pi, ui)| pi - ui * (0.5 * beta)).collect();
        for i in 0..len {
            let (ui, wi) = (u[i], w[i]);
            let row = &mut a[(lo + i) * n + lo..(lo + i) * n + n];
            for j in 0..len {
                row[j] -= ui * w[j].conj() + wi * u[j].conj();
            }
        }

        let head = -sign * xnorm;
        a[lo * n + k] = head;
        a[k * n + lo] = head.conj();
        for i in lo + 1..n {
            a[i * n + k] = zero;
            a[k * n + i] = zero;
        }

        for r in 0..n {
            let row = &mut q[r * n + lo..r * n + n];
            let s: Complex64 = row.iter().zip(&u).map(|(x, y)| x * y).sum();
            for (x, y) in row.iter_mut().zip(&u) {
                *x -= s * y.conj();
            }
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (`diag`, `off[i]` couples
/// `i` and `i + 1`). Rotations are applied to the rows of `z`.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NumericalFailure(format!(
                    "QL iteration did not converge for eigenvalue {l} after {MAX_QL_ITERATIONS} sweeps"
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let (head, tail) = z.split_at_mut(i + 1);
                let (zi, zi1) = (&mut head[i], &mut tail[0]);
                for (x, y) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *y;
                    *y = s * *x + c * f;
                    *x = c * *x - s * f;
                }
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

fn normalize_phase(v: &mut Array2<Complex64>, col: usize) {
    let n = v.nrows();
    let max = (0..n).map(|r| v[[r, col]].norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = (0..n)
        .find(|&r| v[[r, col]].norm() >= max * (1.0 - PHASE_TIE_TOL))
        .unwrap_or(0);
    let z = v[[pivot, col]];
    let rot = z.conj() / z.norm();
    for r in 0..n {
        v[[r, col]] *= rot;
    }
    v[[pivot, col]] = Complex64::new(v[[pivot, col]].re, 0.0);
}
