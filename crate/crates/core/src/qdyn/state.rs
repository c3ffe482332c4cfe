use nalgebra::DVector;

use super::operator::{max_abs, CMatrix, C64};
use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::tol;

/// Pure state as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn from_amplitudes(space: HilbertSpace, amplitudes: &[C64]) -> Result<Self> {
        Self::new(space, DVector::from_column_slice(amplitudes))
    }

    /// Computational basis ket with the given level on each factor.
    pub fn basis(space: &HilbertSpace, levels: &[usize]) -> Result<Self> {
        let index = space.index_of(levels)?;
        Ok(Self::basis_index(space, index))
    }

    pub fn basis_index(space: &HilbertSpace, index: usize) -> Self {
        let mut amplitudes = DVector::zeros(space.total_dim());
        amplitudes[index] = C64::new(1.0, 0.0);
        Self {
            space: space.clone(),
            amplitudes,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= tol::STATE_NORM
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "state norm {} differs from 1",
                self.norm()
            )))
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            space: self.space.clone(),
            amplitudes: &self.amplitudes * factor,
        }
    }

    /// `Σ c_k |v_k>`; all vectors must live in one space.
    pub fn combination(terms: &[(C64, &StateVector)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidState("empty combination".into()))?;
        let mut amplitudes = DVector::zeros(first.space.total_dim());
        for (c, v) in terms {
            if v.space != first.space {
                return Err(Error::DimensionMismatch {
                    expected: first.space.total_dim(),
                    found: v.space.total_dim(),
                });
            }
            amplitudes += &v.amplitudes * *c;
        }
        Ok(Self {
            space: first.space.clone(),
            amplitudes,
        })
    }

    /// `|self><self|` as a dense matrix.
    pub fn outer(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.amplitudes - &other.amplitudes).norm()
    }

    pub fn population(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub(crate) fn from_parts_unchecked(space: HilbertSpace, amplitudes: DVector<C64>) -> Self {
        Self { space, amplitudes }
    }
}

/// Mixed state. Construction through [`DensityMatrix::new`] validates the
/// physical invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(space, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape check only; used for intermediate and trace-decreasing blocks.
    pub fn from_matrix_unchecked(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self {
            space: state.space().clone(),
            matrix: state.outer(),
        }
    }

    pub fn maximally_mixed(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = max_abs(&(&self.matrix - self.matrix.adjoint()));
        if herm > tol::OPERATOR {
            return Err(Error::NotHermitian { defect: herm });
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol::DENSITY_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < -tol::DENSITY_EIGEN {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn population(&self, index: usize) -> f64 {
        self.matrix[(index, index)].re
    }

    /// `(ρ + ρ†)/2`.
    pub fn hermitized(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}
