use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use super::space::HilbertSpace;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::tol;

pub type CMatrix = DMatrix<C64>;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{iθ}`.
pub(crate) fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// A dense linear operator on a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if matrix.nrows() != d {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { space, matrix })
    }

    /// Single-subsystem operator from a square matrix.
    pub fn local(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let space = HilbertSpace::new(vec![matrix.nrows()])?;
        Self::new(space, matrix)
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn from_real_diagonal(space: &HilbertSpace, diagonal: &[f64]) -> Result<Self> {
        if diagonal.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: diagonal.len(),
            });
        }
        let d = diagonal.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in diagonal.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
    }

    /// `|ket><bra|`.
    pub fn ket_bra(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        if ket.space() != bra.space() {
            return Err(Error::DimensionMismatch {
                expected: ket.space().total_dim(),
                found: bra.space().total_dim(),
            });
        }
        Ok(Self {
            space: ket.space().clone(),
            matrix: ket.amplitudes() * bra.amplitudes().adjoint(),
        })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scaled_real(&self, factor: f64) -> Self {
        self.scaled(c(factor, 0.0))
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `‖A†A − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(d, d)))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= tol::OPERATOR
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= tol::OPERATOR
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > tol::OPERATOR {
            Err(Error::NotHermitian { defect })
        } else {
            Ok(())
        }
    }

    pub fn require_unitary(&self, tolerance: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect > tolerance {
            Err(Error::NotUnitary { defect })
        } else {
            Ok(())
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.space() != &self.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.space().total_dim(),
            });
        }
        Ok(StateVector::from_parts_unchecked(
            self.space.clone(),
            &self.matrix * state.amplitudes(),
        ))
    }

    /// `<bra|A|ket>`.
    pub fn element(&self, bra: &StateVector, ket: &StateVector) -> C64 {
        bra.amplitudes().dotc(&(&self.matrix * ket.amplitudes()))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        self * other - other * self
    }

    /// `‖A − B‖_max`.
    pub fn distance(&self, other: &Operator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Compression `P A P†` onto the states listed by basis index.
    pub fn restricted(&self, indices: &[usize]) -> CMatrix {
        CMatrix::from_fn(indices.len(), indices.len(), |r, k| {
            self.matrix[(indices[r], indices[k])]
        })
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

/// Common single-subsystem operators.
pub mod local {
    use super::*;

    fn from_rows(rows: &[[C64; 2]; 2]) -> Operator {
        Operator::local(CMatrix::from_fn(2, 2, |r, k| rows[r][k])).unwrap()
    }

    pub fn identity(levels: usize) -> Operator {
        Operator::identity(&HilbertSpace::new(vec![levels]).unwrap())
    }

    pub fn pauli_x() -> Operator {
        from_rows(&[[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]])
    }

    pub fn pauli_y() -> Operator {
        from_rows(&[[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]])
    }

    /// Standard `diag(1, −1)` in the (|0>, |1>) order.
    pub fn pauli_z() -> Operator {
        from_rows(&[[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]])
    }

    /// `|to><from|` on a `levels`-dimensional subsystem.
    pub fn transition(levels: usize, to: usize, from: usize) -> Operator {
        let mut m = CMatrix::zeros(levels, levels);
        m[(to, from)] = c(1.0, 0.0);
        Operator::local(m).unwrap()
    }

    /// Raising operator `|1><0|` of a qubit.
    pub fn sigma_plus() -> Operator {
        transition(2, 1, 0)
    }

    /// Lowering operator `|0><1|` of a qubit.
    pub fn sigma_minus() -> Operator {
        transition(2, 0, 1)
    }

    /// Number operator `Σ n|n><n|`.
    pub fn number(levels: usize) -> Operator {
        let diag: Vec<f64> = (0..levels).map(|n| n as f64).collect();
        Operator::from_real_diagonal(&HilbertSpace::new(vec![levels]).unwrap(), &diag).unwrap()
    }
}
