//! Vectors in (C^2)^{⊗n}, the trigonometric R-matrix and single-leg actions.
//!
//! Basis ordering is lexicographic: component (nu_1, ..., nu_n) sits at
//! index `sum nu_i 2^{n-i}`, so 0-based leg `a` carries weight `2^{n-1-a}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::qseries;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinVector {
    pub n: usize,
    pub coeffs: Vec<C64>,
}

impl SpinVector {
    pub fn zeros(n: usize) -> Self {
        Self { n, coeffs: vec![C64::new(0.0, 0.0); 1 << n] }
    }

    pub fn basis(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        v.coeffs[index_of(bits)] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, bits: &[u8]) -> C64 {
        self.coeffs[index_of(bits)]
    }

    pub fn set(&mut self, bits: &[u8], value: C64) {
        self.coeffs[index_of(bits)] = value;
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self { n: self.n, coeffs }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// C^{⊗n}: flip every spin.
    pub fn flip_all(&self) -> Self {
        let top = self.dim() - 1;
        let mut out = Self::zeros(self.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[top - i] = *c;
        }
        out
    }

    /// True when every coefficient outside the sector with `ones` 1-spins is exactly zero.
    pub fn in_sector(&self, ones: usize) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i.count_ones() as usize == ones || *c == C64::new(0.0, 0.0))
    }
}

pub fn index_of(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b as usize & 1))
}

pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|a| ((index >> (n - 1 - a)) & 1) as u8).collect()
}

/// All bit patterns of length n with exactly `ones` ones, ascending by index.
pub fn sector(n: usize, ones: usize) -> Vec<Vec<u8>> {
    (0..1usize << n)
        .filter(|i| i.count_ones() as usize == ones)
        .map(|i| bits_of(i, n))
        .collect()
}

/// Which spin value marks the support of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportConvention {
    /// support = {i | eps_i = 1}, the weight-function convention
    Ones,
    /// support = {i | nu_i = 0}, the free-field convention
    Zeros,
}

/// A component label with its sorted support positions (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinConfig {
    pub n: usize,
    pub bits: Vec<u8>,
    pub support: Vec<usize>,
    pub convention: SupportConvention,
}

impl SpinConfig {
    pub fn new(bits: &[u8], convention: SupportConvention) -> Self {
        let mark = match convention {
            SupportConvention::Ones => 1,
            SupportConvention::Zeros => 0,
        };
        let support = bits.iter().enumerate().filter(|(_, &b)| b == mark).map(|(i, _)| i).collect();
        Self { n: bits.len(), bits: bits.to_vec(), support, convention }
    }

    pub fn ones(bits: &[u8]) -> Self {
        Self::new(bits, SupportConvention::Ones)
    }

    pub fn zeros(bits: &[u8]) -> Self {
        Self::new(bits, SupportConvention::Zeros)
    }

    /// Number of support positions.
    pub fn l(&self) -> usize {
        self.support.len()
    }

    /// (-nu) = (1-nu_1, ..., 1-nu_n), keeping the convention.
    pub fn flipped(&self) -> Self {
        let bits: Vec<u8> = self.bits.iter().map(|b| 1 - b).collect();
        Self::new(&bits, self.convention)
    }
}

/// The 4x4 R-matrix in the local basis `2 eps_i + eps_j`; columns are inputs.
pub fn r_matrix(ps: &ParameterSet, z: C64) -> Result<[[C64; 4]; 4]> {
    let q = ps.q;
    let d = 1.0 - q * q * z;
    if d.norm() < qseries::POLE_TOL {
        return Err(Error::Pole { what: "R", at: z });
    }
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let diag = q * (1.0 - z) / d;
    let mut r = [[zero; 4]; 4];
    r[0][0] = one;
    r[3][3] = one;
    r[1][1] = diag;
    r[2][2] = diag;
    r[2][1] = (1.0 - q * q) / d;
    r[1][2] = (1.0 - q * q) * z / d;
    Ok(r)
}

/// Apply a 4x4 operator on legs (i, j) by stride iteration.
pub fn apply_two_leg(m: &[[C64; 4]; 4], i: usize, j: usize, v: &SpinVector) -> SpinVector {
    let n = v.n;
    assert!(i < n && j < n && i != j, "legs must be distinct and below n");
    let bi = 1usize << (n - 1 - i);
    let bj = 1usize << (n - 1 - j);
    let mut out = SpinVector::zeros(n);
    for base in 0..v.dim() {
        if base & (bi | bj) != 0 {
            continue;
        }
        let idx = [base, base | bj, base | bi, base | bi | bj];
        let x = [v.coeffs[idx[0]], v.coeffs[idx[1]], v.coeffs[idx[2]], v.coeffs[idx[3]]];
        for (row, &target) in idx.iter().enumerate() {
            out.coeffs[target] =
                m[row][0] * x[0] + m[row][1] * x[1] + m[row][2] * x[2] + m[row][3] * x[3];
        }
    }
    out
}

/// R(z) acting on legs (i, j), identity elsewhere.
pub fn r_apply(ps: &ParameterSet, z: C64, i: usize, j: usize, v: &SpinVector) -> Result<SpinVector> {
    Ok(apply_two_leg(&r_matrix(ps, z)?, i, j, v))
}

/// rho(z) C⊗C R(z) C⊗C on legs (i, j).
pub fn rhat_apply(ps: &ParameterSet, z: C64, i: usize, j: usize, v: &SpinVector) -> Result<SpinVector> {
    let r = r_matrix(ps, z)?;
    let rho = qseries::rho(ps, z)?;
    // flipping both spins maps local index x to 3 - x
    let mut m = r;
    for (a, row) in m.iter_mut().enumerate() {
        for (b, e) in row.iter_mut().enumerate() {
            *e = rho * r[3 - a][3 - b];
        }
    }
    Ok(apply_two_leg(&m, i, j, v))
}

/// Multiply each coefficient by kappa^{nu_j}.
pub fn kappa_apply(kappa: C64, j: usize, v: &SpinVector) -> SpinVector {
    let bit = 1usize << (v.n - 1 - j);
    let mut out = v.clone();
    for (idx, c) in out.coeffs.iter_mut().enumerate() {
        if idx & bit != 0 {
            *c *= kappa;
        }
    }
    out
}
