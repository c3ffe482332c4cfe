use crate::error::{Error, Result};

/// A tensor-product Hilbert space described by the number of levels kept on
/// each subsystem. Basis states are ordered with the first factor most
/// significant, matching the Kronecker product.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    factor_dims: Vec<usize>,
    total_dim: usize,
}

impl HilbertSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidSpace("no subsystems".into()));
        }
        if let Some(d) = factor_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSpace(format!(
                "every subsystem needs at least two levels, got {d}"
            )));
        }
        let total_dim = factor_dims.iter().product();
        Ok(Self {
            factor_dims,
            total_dim,
        })
    }

    /// `n` two-level subsystems.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Index of the product basis state with the given level on each factor.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.factor_dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factor_dims.len(),
                found: levels.len(),
            });
        }
        let mut index = 0;
        for (&level, &dim) in levels.iter().zip(&self.factor_dims) {
            if level >= dim {
                return Err(Error::InvalidState(format!(
                    "level {level} does not exist on a {dim}-level subsystem"
                )));
            }
            index = index * dim + level;
        }
        Ok(index)
    }

    /// Inverse of [`HilbertSpace::index_of`].
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.factor_dims.len()];
        for (slot, &dim) in levels.iter_mut().zip(&self.factor_dims).rev() {
            *slot = index % dim;
            index /= dim;
        }
        levels
    }

    /// Total excitation number of a basis state (level `n` counts as `n`).
    pub fn excitation_of(&self, index: usize) -> usize {
        self.levels_of(index).iter().sum()
    }

    /// The space of `self ⊗ other`.
    pub fn product(&self, other: &HilbertSpace) -> HilbertSpace {
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        HilbertSpace::new(dims).expect("product of valid spaces is valid")
    }
}
