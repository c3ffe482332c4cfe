//! Dense complex linear algebra over factored Hilbert spaces and exact
//! propagation of piecewise-constant Hamiltonians.
//!
//! Times are in ns and angular frequencies in rad/ns throughout.

mod expm;
mod operator;
mod schedule;
mod space;
mod state;

pub use expm::{evolve_piecewise, expm_generator, propagator};
pub(crate) use expm::hermitian_exp;
pub use operator::{local, max_abs, CMatrix, Operator, C64};
pub(crate) use operator::{c, phase};
pub use schedule::{PulseSchedule, Segment};
pub use space::HilbertSpace;
pub use state::{DensityMatrix, StateVector};

use crate::error::{Error, Result};
use crate::tol;

/// Kronecker product of the factors in the listed order.
pub fn tensor(factors: &[Operator]) -> Result<Operator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidSpace("empty tensor product".into()))?;
    let mut space = first.space().clone();
    let mut matrix = first.matrix().clone();
    for f in rest {
        space = space.product(f.space());
        matrix = matrix.kronecker(f.matrix());
    }
    Operator::new(space, matrix)
}

/// Operator acting as `op` on factor `site` and as identity elsewhere.
pub fn embed(space: &HilbertSpace, site: usize, op: &Operator) -> Result<Operator> {
    let dims = space.factor_dims();
    if site >= dims.len() || op.dim() != dims[site] {
        return Err(Error::DimensionMismatch {
            expected: dims.get(site).copied().unwrap_or(0),
            found: op.dim(),
        });
    }
    let factors: Vec<Operator> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| if k == site { op.clone() } else { local::identity(d) })
        .collect();
    tensor(&factors)
}

/// Orthogonal projector `Σ |b><b|` onto the span of an orthonormal basis.
pub fn projector(basis: &[StateVector]) -> Result<Operator> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidState("empty basis".into()))?;
    let space = first.space().clone();
    let mut defect: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        if a.space() != &space {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: a.space().total_dim(),
            });
        }
        for b in &basis[i..] {
            let expected = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
            defect = defect.max((a.inner(b) - c(expected, 0.0)).norm());
        }
    }
    if defect > tol::ORTHONORMAL {
        return Err(Error::NotOrthonormal { defect });
    }
    let d = space.total_dim();
    let mut m = CMatrix::zeros(d, d);
    for b in basis {
        m += b.outer();
    }
    Operator::new(space, m)
}
