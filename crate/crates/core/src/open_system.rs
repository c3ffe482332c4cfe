//! Lindblad propagation with (collective) pure dephasing and channel
//! extraction.
//!
//! Vectorization is column stacking throughout: `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`,
//! and entry `(i, j)` of a `d × d` matrix lands at position `i + d·j`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::qdyn::{c, max_abs, CMatrix, DensityMatrix, HilbertSpace, Operator, PulseSchedule, C64};
use crate::tol;

/// How the dephasing operators couple to the subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// One dissipator built from `Σ_j z_j`.
    Collective,
    /// One dissipator per subsystem, each at the full rate.
    Independent,
}

/// Conversion from the dephasing time T₂ to the rate γ_φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RateConvention {
    /// γ_φ = 1/T₂.
    #[default]
    InverseT2,
    /// γ_φ = 1/(2T₂).
    InverseTwoT2,
}

/// `z_n = 2n − 1` for the first `levels` levels: (−1, +1, +3, …).
pub fn excitation_weights(levels: usize) -> Vec<f64> {
    (0..levels).map(|n| 2.0 * n as f64 - 1.0).collect()
}

/// Noise configuration: global control error amplitude plus pure dephasing.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Relative amplitude error δ applied as `H → (1+δ)H`.
    pub delta: f64,
    /// Dephasing time in µs; `f64::INFINITY` disables dephasing.
    pub t2_us: f64,
    pub topology: Topology,
    pub rate_convention: RateConvention,
    /// Weight `z_n` of level `n`, shared by every subsystem.
    pub level_weights: Vec<f64>,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self {
            delta: 0.0,
            t2_us: f64::INFINITY,
            topology: Topology::Collective,
            rate_convention: RateConvention::InverseT2,
            level_weights: excitation_weights(3),
        }
    }

    pub fn new(delta: f64, t2_us: f64, topology: Topology) -> Result<Self> {
        let spec = Self {
            delta,
            t2_us,
            topology,
            ..Self::noiseless()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self {
            delta,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta = {}", self.delta)));
        }
        if !(self.t2_us > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "T2 must be positive or infinite, got {}",
                self.t2_us
            )));
        }
        Ok(())
    }

    /// γ_φ in 1/ns.
    pub fn gamma_phi(&self) -> f64 {
        if self.t2_us.is_infinite() {
            return 0.0;
        }
        let t2_ns = self.t2_us * 1e3;
        match self.rate_convention {
            RateConvention::InverseT2 => 1.0 / t2_ns,
            RateConvention::InverseTwoT2 => 1.0 / (2.0 * t2_ns),
        }
    }

    pub fn gce_factor(&self) -> f64 {
        1.0 + self.delta
    }
}

fn factor_weights(space: &HilbertSpace, weights: &[f64]) -> Result<()> {
    for &d in space.factor_dims() {
        if d > weights.len() {
            return Err(Error::InvalidParameter(format!(
                "no dephasing weight for level {} (only {} given)",
                weights.len(),
                weights.len()
            )));
        }
    }
    Ok(())
}

/// Diagonal of `Σ_j z_j`, where `z_j` applies the level weights on factor `j`.
fn collective_diagonal(space: &HilbertSpace, weights: &[f64]) -> Vec<f64> {
    (0..space.total_dim())
        .map(|i| space.levels_of(i).iter().map(|&n| weights[n]).sum())
        .collect()
}

fn local_diagonal(space: &HilbertSpace, site: usize, weights: &[f64]) -> Vec<f64> {
    (0..space.total_dim())
        .map(|i| weights[space.levels_of(i)[site]])
        .collect()
}

/// Collective operator `Σ_j z_j`.
pub fn collective_z(space: &HilbertSpace, weights: &[f64]) -> Result<Operator> {
    factor_weights(space, weights)?;
    Operator::from_real_diagonal(space, &collective_diagonal(space, weights))
}

/// Level weights applied on a single factor.
pub fn local_z(space: &HilbertSpace, site: usize, weights: &[f64]) -> Result<Operator> {
    factor_weights(space, weights)?;
    if site >= space.num_factors() {
        return Err(Error::DimensionMismatch {
            expected: space.num_factors(),
            found: site,
        });
    }
    Operator::from_real_diagonal(space, &local_diagonal(space, site, weights))
}

/// Diagonals of the dephasing operators selected by the topology.
fn dephasing_diagonals(space: &HilbertSpace, noise: &NoiseSpec) -> Result<Vec<Vec<f64>>> {
    factor_weights(space, &noise.level_weights)?;
    Ok(match noise.topology {
        Topology::Collective => vec![collective_diagonal(space, &noise.level_weights)],
        Topology::Independent => (0..space.num_factors())
            .map(|j| local_diagonal(space, j, &noise.level_weights))
            .collect(),
    })
}

/// The dephasing operators selected by the topology.
pub fn dephasing_operators(space: &HilbertSpace, noise: &NoiseSpec) -> Result<Vec<Operator>> {
    dephasing_diagonals(space, noise)?
        .iter()
        .map(|d| Operator::from_real_diagonal(space, d))
        .collect()
}

/// Elementwise decay rates: for diagonal `Z`,
/// `(γ/2)(2ZρZ − Z²ρ − ρZ²)_{ij} = −(γ/2)(z_i − z_j)² ρ_{ij}`.
fn decay_rates(space: &HilbertSpace, noise: &NoiseSpec) -> Result<DMatrix<f64>> {
    let d = space.total_dim();
    let gamma = noise.gamma_phi();
    let mut w = DMatrix::zeros(d, d);
    if gamma == 0.0 {
        return Ok(w);
    }
    for z in dephasing_diagonals(space, noise)? {
        for j in 0..d {
            for i in 0..d {
                let dz = z[i] - z[j];
                w[(i, j)] += 0.5 * gamma * dz * dz;
            }
        }
    }
    Ok(w)
}

/// Column-stacked `vec(m)`.
pub fn vec(m: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec(v: &DVector<C64>, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Linear map on `d × d` matrices as a `d² × d²` matrix on column-stacked
/// vectors. Used both for channels and for Lindblad generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let d2 = space.total_dim().pow(2);
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d2,
                found: matrix.nrows(),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d2 = space.total_dim().pow(2);
        Self {
            space: space.clone(),
            matrix: CMatrix::identity(d2, d2),
        }
    }

    /// `ρ ↦ UρU†`, i.e. `conj(U) ⊗ U`.
    pub fn from_unitary(u: &Operator) -> Self {
        Self::from_kraus_block(u.space(), u.matrix())
    }

    /// `ρ ↦ MρM†` for an arbitrary (possibly contracting) matrix `M`.
    pub fn from_kraus_block(space: &HilbertSpace, m: &CMatrix) -> Self {
        Self {
            space: space.clone(),
            matrix: m.conjugate().kronecker(m),
        }
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

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvec(&(&self.matrix * vec(rho)), self.dim())
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &Superoperator) -> Superoperator {
        Superoperator {
            space: self.space.clone(),
            matrix: &after.matrix * &self.matrix,
        }
    }

    pub fn distance(&self, other: &Superoperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Choi matrix `Σ_{ij} |i><j| ⊗ E(|i><j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim();
        let mut choi = CMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let col = self.matrix.column(i + d * j);
                for b in 0..d {
                    for a in 0..d {
                        choi[(i * d + a, j * d + b)] = col[a + d * b];
                    }
                }
            }
        }
        choi
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        let choi = self.choi();
        let h = (&choi + choi.adjoint()) * c(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// `‖(vec I)† S − (vec I)†‖_max`; zero for trace-preserving maps.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim();
        (0..d * d)
            .map(|col| {
                let tr: C64 = (0..d).map(|k| self.matrix[(k + d * k, col)]).sum();
                let expected = if col % (d + 1) == 0 { 1.0 } else { 0.0 };
                (tr - c(expected, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `(1/d)(vec I)† S (vec I)`: average trace kept by the map.
    pub fn mean_trace_retained(&self) -> f64 {
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.matrix[(k + d * k, i + d * i)];
            }
        }
        acc.re / d as f64
    }

    /// Rejects maps whose Choi matrix is meaningfully negative.
    pub fn require_completely_positive(&self) -> Result<f64> {
        let min = self.min_choi_eigenvalue();
        if min < -tol::CHOI_ABORT {
            Err(Error::NotCompletelyPositive {
                min_eigenvalue: min,
            })
        } else {
            Ok(min)
        }
    }
}

/// Full vectorized generator
/// `L = −i(I⊗H − Hᵀ⊗I) + Σ_Z (γ/2)(2 Zᵀ⊗Z − I⊗Z² − (Z²)ᵀ⊗I)`.
pub fn build_liouvillian(h: &Operator, noise: &NoiseSpec) -> Result<Superoperator> {
    h.require_hermitian()?;
    noise.validate()?;
    let d = h.dim();
    let id = CMatrix::identity(d, d);
    let hm = h.matrix();
    let mut l = (id.kronecker(hm) - hm.transpose().kronecker(&id)) * c(0.0, -1.0);
    let gamma = noise.gamma_phi();
    if gamma > 0.0 {
        for z in dephasing_operators(h.space(), noise)? {
            let zm = z.matrix();
            let z2 = zm * zm;
            let term = zm.transpose().kronecker(zm) * c(2.0, 0.0)
                - id.kronecker(&z2)
                - z2.transpose().kronecker(&id);
            l += term * c(0.5 * gamma, 0.0);
        }
    }
    Superoperator::new(h.space().clone(), l)
}

/// Groups basis states into the connected components of the union of the
/// schedule's Hamiltonian sparsity patterns.
fn coupled_components(schedule: &PulseSchedule) -> (Vec<Vec<usize>>, Vec<usize>) {
    let d = schedule.space().total_dim();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for seg in schedule.segments() {
        let m = seg.hamiltonian.matrix();
        for j in 0..d {
            for i in 0..j {
                if m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut label = vec![usize::MAX; d];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut comp_of = vec![0; d];
    for i in 0..d {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = components.len();
            components.push(Vec::new());
        }
        comp_of[i] = label[root];
        components[label[root]].push(i);
    }
    (components, comp_of)
}

/// Exact propagator for Lindblad dynamics with diagonal dephasing.
///
/// The Hamiltonian only couples states inside one component and the
/// dissipator acts entrywise, so every block `ρ[A, B]` for components
/// `A`, `B` evolves on its own under
/// `−i(I⊗H_A − H_Bᵀ⊗I) − diag(vec W_AB)`. Block propagators are built
/// lazily and cached.
pub struct DensityPropagator<'a> {
    schedule: &'a PulseSchedule,
    rates: DMatrix<f64>,
    components: Vec<Vec<usize>>,
    comp_of: Vec<usize>,
    cache: HashMap<(usize, usize), CMatrix>,
}

impl<'a> DensityPropagator<'a> {
    pub fn new(schedule: &'a PulseSchedule, noise: &NoiseSpec) -> Result<Self> {
        noise.validate()?;
        let rates = decay_rates(schedule.space(), noise)?;
        let (components, comp_of) = coupled_components(schedule);
        Ok(Self {
            schedule,
            rates,
            components,
            comp_of,
            cache: HashMap::new(),
        })
    }

    fn block(&mut self, a: usize, b: usize) -> &CMatrix {
        if !self.cache.contains_key(&(a, b)) {
            let rows = &self.components[a];
            let cols = &self.components[b];
            let (na, nb) = (rows.len(), cols.len());
            let n = na * nb;
            let id_a = CMatrix::identity(na, na);
            let id_b = CMatrix::identity(nb, nb);
            let mut decay = CMatrix::zeros(n, n);
            for (k, &j) in cols.iter().enumerate() {
                for (r, &i) in rows.iter().enumerate() {
                    decay[(r + na * k, r + na * k)] = c(self.rates[(i, j)], 0.0);
                }
            }
            let mut total = CMatrix::identity(n, n);
            for seg in self.schedule.segments() {
                let ha = seg.hamiltonian.restricted(rows);
                let hb = seg.hamiltonian.restricted(cols);
                let gen = (id_b.kronecker(&ha) - hb.transpose().kronecker(&id_a)) * c(0.0, -1.0)
                    - &decay;
                let step = (gen * c(seg.duration, 0.0)).exp();
                total = step * total;
            }
            self.cache.insert((a, b), total);
        }
        &self.cache[&(a, b)]
    }

    /// Image of an arbitrary `d × d` matrix under the channel.
    pub fn apply(&mut self, rho: &CMatrix) -> CMatrix {
        let d = self.schedule.space().total_dim();
        let ncomp = self.components.len();
        let mut out = CMatrix::zeros(d, d);
        let mut active = vec![false; ncomp * ncomp];
        for j in 0..d {
            for i in 0..d {
                if rho[(i, j)] != C64::new(0.0, 0.0) {
                    active[self.comp_of[i] * ncomp + self.comp_of[j]] = true;
                }
            }
        }
        for a in 0..ncomp {
            for b in 0..ncomp {
                if !active[a * ncomp + b] {
                    continue;
                }
                let rows = self.components[a].clone();
                let cols = self.components[b].clone();
                let na = rows.len();
                let mut v = DVector::zeros(na * cols.len());
                for (k, &j) in cols.iter().enumerate() {
                    for (r, &i) in rows.iter().enumerate() {
                        v[r + na * k] = rho[(i, j)];
                    }
                }
                let w = self.block(a, b) * v;
                for (k, &j) in cols.iter().enumerate() {
                    for (r, &i) in rows.iter().enumerate() {
                        out[(i, j)] = w[r + na * k];
                    }
                }
            }
        }
        out
    }
}

/// Evolve a density matrix through the schedule under the noise model's
/// dephasing. The schedule must already carry any `(1+δ)` scaling.
pub fn propagate_density(
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    noise: &NoiseSpec,
) -> Result<DensityMatrix> {
    if rho0.space() != schedule.space() {
        return Err(Error::DimensionMismatch {
            expected: schedule.space().total_dim(),
            found: rho0.space().total_dim(),
        });
    }
    rho0.validate()?;
    let mut prop = DensityPropagator::new(schedule, noise)?;
    let out = prop.apply(rho0.matrix());
    let rho = DensityMatrix::from_matrix_unchecked(schedule.space().clone(), out)?.hermitized();
    let drift = (rho.trace() - rho0.trace()).abs();
    if drift > tol::TRACE_ABORT {
        return Err(Error::TraceDrift { drift });
    }
    Ok(rho)
}

/// Full channel of the schedule: column `i + d·j` is the image of `|i><j|`.
pub fn channel_superoperator(schedule: &PulseSchedule, noise: &NoiseSpec) -> Result<Superoperator> {
    let d = schedule.space().total_dim();
    let mut prop = DensityPropagator::new(schedule, noise)?;
    let mut s = CMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for i in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(i, j)] = c(1.0, 0.0);
            let out = prop.apply(&unit);
            s.set_column(i + d * j, &vec(&out));
        }
    }
    let sup = Superoperator::new(schedule.space().clone(), s)?;
    sup.require_completely_positive()?;
    let drift = sup.trace_defect();
    if drift > tol::TRACE_ABORT {
        return Err(Error::TraceDrift { drift });
    }
    Ok(sup)
}
