//! Brute-force reference computations. Nothing here uses the momentum-sector
//! structure or an eigenbasis for time evolution, so agreement with
//! [`crate::bloch`] and [`crate::dynamics`] is an independent check.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::dynamics::{Distribution, InitialState};
use crate::eig::{eigh, EigenDecomposition, HermitianMatrix};
use crate::error::{Error, Result};
use crate::graph::SymmetricMatrix;

pub const MAX_SPECTRUM_DIM: usize = 5000;
pub const MAX_EVOLUTION_DIM: usize = 2000;
pub const MIN_QUADRATURE_STEPS: usize = 100;

const TAYLOR_TERMS: usize = 40;
const TAYLOR_TOL: f64 = 1e-18;

/// Direct diagonalization of the full Hamiltonian.
pub fn brute_spectrum(h: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if h.dim() > MAX_SPECTRUM_DIM {
        return Err(Error::InvalidParameter(format!(
            "brute-force spectrum limited to N <= {MAX_SPECTRUM_DIM}, got {}",
            h.dim()
        )));
    }
    eigh(&HermitianMatrix::from_real(h.as_array())?)
}

fn one_norm(a: &Array2<Complex64>) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `e^{-iHt}` by scaling and squaring a truncated Taylor series.
pub fn propagator(h: &SymmetricMatrix, t: f64) -> Result<Array2<Complex64>> {
    let n = h.dim();
    if n > MAX_EVOLUTION_DIM {
        return Err(Error::InvalidParameter(format!(
            "matrix-exponential evolution limited to N <= {MAX_EVOLUTION_DIM}, got {n}"
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    let a = h.as_array().mapv(|x| Complex64::new(0.0, -x * t));
    let norm = one_norm(&a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings));

    let mut result = Array2::from_diag_elem(n, Complex64::new(1.0, 0.0));
    let mut term = result.clone();
    let mut converged = false;
    for k in 1..=TAYLOR_TERMS {
        term = scaled.dot(&term).mapv(|z| z / k as f64);
        result += &term;
        if one_norm(&term) <= TAYLOR_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!("Taylor series did not converge in {TAYLOR_TERMS} terms")));
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

fn probabilities(amps: &Array1<Complex64>) -> Result<Distribution> {
    Distribution::new(amps.iter().map(|z| z.norm_sqr()).collect())
}

fn check_state(h: &SymmetricMatrix, phi: &InitialState) -> Result<()> {
    if phi.len() != h.dim() {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} amplitudes, Hamiltonian has dimension {}",
            phi.len(),
            h.dim()
        )));
    }
    Ok(())
}

/// `|e^{-iHt} phi|^2`.
pub fn evolve_matrix_exponential(h: &SymmetricMatrix, phi: &InitialState, t: f64) -> Result<Distribution> {
    check_state(h, phi)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    probabilities(&propagator(h, t)?.dot(phi.amplitudes()))
}

/// Trapezoidal average of `|e^{-iHt} phi|^2` over `steps` equal intervals of
/// `[0, T]`, stepping the state with the one-interval propagator. The error is
/// `O((T / steps)^2)`.
pub fn quadrature_time_average(h: &SymmetricMatrix, phi: &InitialState, t_avg: f64, steps: usize) -> Result<Distribution> {
    check_state(h, phi)?;
    if steps < MIN_QUADRATURE_STEPS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_QUADRATURE_STEPS} steps, got {steps}")));
    }
    if !(t_avg > 0.0) {
        return Err(Error::InvalidParameter(format!("averaging time must be positive, got {t_avg}")));
    }
    let step = propagator(h, t_avg / steps as f64)?;
    let n = h.dim();
    let mut state = phi.amplitudes().clone();
    let mut acc = vec![0.0; n];
    for i in 0..=steps {
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        for (a, z) in acc.iter_mut().zip(state.iter()) {
            *a += w * z.norm_sqr();
        }
        if i < steps {
            state = step.dot(&state);
        }
    }
    Distribution::new(acc.into_iter().map(|a| a / steps as f64).collect())
}
