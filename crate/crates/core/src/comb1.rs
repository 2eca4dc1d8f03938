//! Closed-form limiting distributions for the cycle and the (K,1)-comb.
//!
//! Pearl indices `x` (target) and `z` (start) are 0-based. On the (K,1)-comb
//! vertex `2x` is the base of pearl `x` and `2x + 1` its tooth.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dynamics::Distribution;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

const IMAG_TOL: f64 = 1e-12;
pub const HIGH_K_MIN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexType {
    Base,
    Tooth,
}

impl VertexType {
    pub fn offset(self) -> usize {
        match self {
            VertexType::Base => 0,
            VertexType::Tooth => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VertexType::Base => "base",
            VertexType::Tooth => "tooth",
        }
    }
}

impl fmt::Display for VertexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VertexType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "base" | "b" => Ok(VertexType::Base),
            "tooth" | "t" => Ok(VertexType::Tooth),
            other => Err(Error::InvalidParameter(format!("vertex type must be base or tooth, got {other:?}"))),
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("need K >= 3 pearls, got {k}")));
    }
    Ok(())
}

fn check_pearl(k: usize, x: usize) -> Result<()> {
    if x >= k {
        return Err(Error::InvalidParameter(format!("pearl index {x} out of range for K = {k}")));
    }
    Ok(())
}

/// 1 if `x = z`, or `K` even and `x`, `z` antipodal; else 0.
pub fn f_xz(k: usize, x: usize, z: usize) -> f64 {
    let d = x.abs_diff(z);
    if d == 0 || (k % 2 == 0 && d == k / 2) {
        1.0
    } else {
        0.0
    }
}

/// Limiting probability at vertex `x` of the walk on a `K`-cycle started at `z`.
pub fn cycle_limiting(k: usize, x: usize, z: usize) -> Result<f64> {
    check_k(k)?;
    check_pearl(k, x)?;
    check_pearl(k, z)?;
    let kf = k as f64;
    let tail = if k % 2 == 0 { 2.0 } else { 1.0 };
    Ok((1.0 + f_xz(k, x, z)) / kf - tail / (kf * kf))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comb1Coefficients {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f: f64,
}

impl Comb1Coefficients {
    pub fn odd(&self) -> bool {
        self.k % 2 == 1
    }
}

fn weight(k: usize, pearls: usize) -> f64 {
    let c = (2.0 * PI * k as f64 / pearls as f64).cos();
    1.0 / (2.0 * (1.0 + c * c))
}

/// `(1/K) sum_k 1 / (2 (1 + cos^2 p_k))`.
pub fn comb1_a(k: usize) -> Result<f64> {
    check_k(k)?;
    Ok((0..k).map(|q| weight(q, k)).collect::<CompensatedSum>().value() / k as f64)
}

/// `Re (1/K) sum_k e^{2 i p_k (x - z)} / (2 (1 + cos^2 p_k))`.
pub fn comb1_b(k: usize, x: usize, z: usize) -> Result<f64> {
    check_k(k)?;
    check_pearl(k, x)?;
    check_pearl(k, z)?;
    let shift = (2 * (x + k - z)) % k;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for q in 0..k {
        let phase = 2.0 * PI * ((shift * q) % k) as f64 / k as f64;
        let term = Complex64::from_polar(weight(q, k), phase);
        re.add(term.re);
        im.add(term.im);
    }
    let im = im.value() / k as f64;
    if im.abs() > IMAG_TOL {
        return Err(Error::NumericalFailure(format!("B({x}|{z}) has imaginary part {im:e}")));
    }
    Ok(re.value() / k as f64)
}

/// `3/(4K)` for odd `K`, `3/(2K)` for even `K`.
pub fn comb1_c(k: usize) -> f64 {
    let kf = k as f64;
    if k % 2 == 1 {
        3.0 / (4.0 * kf)
    } else {
        3.0 / (2.0 * kf)
    }
}

pub fn comb1_coefficients(k: usize, x: usize, z: usize) -> Result<Comb1Coefficients> {
    Ok(Comb1Coefficients { k, a: comb1_a(k)?, b: comb1_b(k, x, z)?, c: comb1_c(k), f: f_xz(k, x, z) })
}

fn limiting_from(coef: &Comb1Coefficients, same_type: bool) -> f64 {
    let kf = coef.k as f64;
    if same_type {
        (1.0 - coef.a - coef.b - coef.c + coef.f) / kf
    } else {
        let tail = if coef.odd() { 1.0 / (4.0 * kf) } else { 1.0 / (2.0 * kf) };
        (coef.a + coef.b - tail) / kf
    }
}

/// Limiting probability at (`target`, pearl `x`) for the (K,1)-comb walk
/// started at (`start`, pearl `z`).
pub fn comb1_limiting(k: usize, start: VertexType, target: VertexType, x: usize, z: usize) -> Result<f64> {
    let coef = comb1_coefficients(k, x, z)?;
    Ok(limiting_from(&coef, start == target))
}

/// Full closed-form limiting distribution over the `2K` vertices.
pub fn comb1_limiting_distribution(k: usize, start: VertexType, z: usize) -> Result<Distribution> {
    check_k(k)?;
    check_pearl(k, z)?;
    let a = comb1_a(k)?;
    let c = comb1_c(k);
    let mut out = Vec::with_capacity(2 * k);
    for x in 0..k {
        let coef = Comb1Coefficients { k, a, b: comb1_b(k, x, z)?, c, f: f_xz(k, x, z) };
        for target in [VertexType::Base, VertexType::Tooth] {
            out.push(limiting_from(&coef, start == target));
        }
    }
    Distribution::new(out)
}

/// Large-`K` approximation of the base-start distribution, with the sum for
/// `A` replaced by its integral `sqrt(2)/4` and `B` dropped away from the
/// start and antipodal pearls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comb1HighK {
    pub k: usize,
    pub generic_base: f64,
    pub generic_tooth: f64,
    pub start_base: f64,
    pub start_tooth: f64,
    /// Same values as the start pearl; present only for even `K`.
    pub opposite: Option<(f64, f64)>,
}

pub fn comb1_high_k(k: usize) -> Result<Comb1HighK> {
    if k < HIGH_K_MIN {
        return Err(Error::InvalidParameter(format!("high-K approximation needs K >= {HIGH_K_MIN}, got {k}")));
    }
    let kf = k as f64;
    let a = SQRT_2 / 4.0;
    let c = comb1_c(k);
    let tail = if k % 2 == 1 { 1.0 / (4.0 * kf) } else { 1.0 / (2.0 * kf) };
    let generic_base = (1.0 - a - c) / kf;
    let generic_tooth = (a - tail) / kf;
    let start_base = (2.0 - 2.0 * a - c) / kf;
    let start_tooth = (2.0 * a - tail) / kf;
    let opposite = (k % 2 == 0).then_some((start_base, start_tooth));
    Ok(Comb1HighK { k, generic_base, generic_tooth, start_base, start_tooth, opposite })
}
