//! Dense complex algebra for the small Hilbert spaces (K = 2, 3) used here.
//!
//! Matrices are stored row-major. Nothing in this module tries to be fast for
//! large K; the point is exact, allocation-light arithmetic on 2×2 and 3×3
//! blocks.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (k, &v) in entries.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &StateVector, v: &StateVector) -> Self {
        assert_eq!(u.dim(), v.dim());
        Self::from_fn(u.dim(), |r, c| u[r] * v[c].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[StateVector]) -> Self {
        let dim = cols.len();
        Self::from_fn(dim, |r, c| cols[c][r])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, c: usize) -> StateVector {
        StateVector::new((0..self.dim).map(|r| self[(r, c)]).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim());
        StateVector::new(
            (0..self.dim)
                .map(|r| (0..self.dim).map(|c| self[(r, c)] * v[c]).sum())
                .collect(),
        )
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-abs Hermiticity defect `‖M − M†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Max modulus over the strictly upper triangle (row < column).
    pub fn max_upper(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.dim {
            for c in (r + 1)..self.dim {
                m = m.max(self[(r, c)].norm());
            }
        }
        m
    }

    /// Matrix exponential by scaling and squaring around a degree-6 Taylor
    /// polynomial. The argument is scaled until its 1-norm is at most 1/32,
    /// which puts the truncation error near machine precision.
    pub fn expm(&self) -> Self {
        let norm = self.norm_one();
        let mut squarings = 0u32;
        if norm > 1.0 / 32.0 {
            squarings = (norm * 32.0).log2().ceil() as u32;
        }
        let a = self.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));

        // Horner: I + A(I + A/2(I + A/3(...)))
        let id = Self::identity(self.dim);
        let mut acc = id.clone();
        for k in (1..=6).rev() {
            acc = &id + &(&a * &acc).scale(C64::new(1.0 / k as f64, 0.0));
        }
        for _ in 0..squarings {
            acc = &acc * &acc;
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Amplitudes of a pure state in the computational basis. Not assumed
/// normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Self {
        assert!(!amps.is_empty(), "state vector must be non-empty");
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[k] = ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.amps.iter().map(|&a| a * s).collect())
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: C64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.amps
                .iter()
                .zip(&other.amps)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

impl Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, k: usize) -> &C64 {
        &self.amps[k]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, k: usize) -> &mut C64 {
        &mut self.amps[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = ComplexMatrix::from_rows(vec![vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(3.0, 0.0), c(0.0, -1.0)]])
            .unwrap();
        let b = a.adjoint();
        assert_eq!(b[(0, 1)], c(3.0, 0.0));
        assert_eq!(b[(1, 0)], c(0.0, -2.0));
        let p = &a * &ComplexMatrix::identity(2);
        assert_eq!(p, a);
        // (AB)† = B†A†
        let ab = &a * &b;
        assert!(ab.adjoint().max_abs_diff(&(&b.adjoint() * &a.adjoint())) < 1e-15);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = ComplexMatrix::from_rows(vec![vec![ONE, ZERO], vec![ONE]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let e = ComplexMatrix::zeros(3).expm();
        assert_eq!(e, ComplexMatrix::identity(3));
    }

    #[test]
    fn expm_diagonal_matches_scalar_exponentials() {
        let d = ComplexMatrix::diagonal(&[c(0.3, -2.0), c(-1.5, 4.0), c(2.0, 0.0)]);
        let e = d.expm();
        for k in 0..3 {
            assert!((e[(k, k)] - d[(k, k)].exp()).norm() < 1e-12 * d[(k, k)].exp().norm().max(1.0));
        }
        assert!(e.max_upper() < 1e-15);
    }

    #[test]
    fn expm_pauli_x_rotation() {
        // exp(-i a σx) = cos a I - i sin a σx
        let a = 2.7;
        let sx = ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        let e = sx.scale(c(0.0, -a)).expm();
        assert!((e[(0, 0)] - c(a.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(0, 1)] - c(0.0, -a.sin())).norm() < 1e-13);
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_slot() {
        let u = StateVector::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let v = StateVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(u.inner(&v), c(0.0, -1.0));
        assert_eq!(u.norm_sqr(), 2.0);
    }
}
