//! Tensor-product index arithmetic and the dense state/operator types.
//!
//! Amplitudes are stored row-major in party order: party 0 is the most
//! significant digit of the flat index. Every operation in the crate relies on
//! this one convention.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GgmError, Result};

pub type C64 = Complex64;

/// Norm, trace and Hermiticity tolerance applied on construction.
pub const STATE_TOL: f64 = 1e-10;

/// Per-party local dimensions of a multipartite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SystemShape {
    dims: Vec<usize>,
    #[serde(skip)]
    total: usize,
}

impl SystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(GgmError::InvalidShape(format!(
                "need at least two parties, got {}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(GgmError::InvalidShape(format!(
                "local dimension {d} is below 2"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| GgmError::InvalidShape("total dimension overflows".into()))?;
        Ok(Self { dims, total })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn min_dim(&self) -> usize {
        *self.dims.iter().min().expect("shape has parties")
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Flat index -> per-party digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Per-party digits -> flat index.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&j, &d)| acc * d + j)
    }

    pub(crate) fn ensure_same(&self, other: &SystemShape) -> Result<()> {
        if self.dims != other.dims {
            return Err(GgmError::ShapeMismatch {
                expected: self.dims.clone(),
                found: other.dims.clone(),
            });
        }
        Ok(())
    }
}

/// Normalized amplitude vector over a [`SystemShape`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: SystemShape,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(shape: SystemShape, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(GgmError::InvalidArgument {
                name: "amplitudes",
                reason: format!(
                    "expected {} amplitudes, got {}",
                    shape.total_dim(),
                    amplitudes.len()
                ),
            });
        }
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(GgmError::NotNormalized(norm));
        }
        Ok(Self { shape, amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(shape: SystemShape, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(GgmError::NotNormalized(norm));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(shape, amplitudes)
    }

    /// Computational basis state given by per-party digits.
    pub fn basis(shape: SystemShape, digits: &[usize]) -> Result<Self> {
        if digits.len() != shape.party_count()
            || digits.iter().zip(shape.dims()).any(|(&j, &d)| j >= d)
        {
            return Err(GgmError::InvalidArgument {
                name: "digits",
                reason: format!("{digits:?} is not a basis label for dims {:?}", shape.dims()),
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); shape.total_dim()];
        amplitudes[shape.index_of(digits)] = C64::new(1.0, 0.0);
        Self::new(shape, amplitudes)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.shape.ensure_same(&other.shape)?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn scaled(&self, factor: C64) -> Result<PureState> {
        let amps = self.amplitudes.iter().map(|a| a * factor).collect();
        PureState::new(self.shape.clone(), amps)
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityMatrix {
            shape: self.shape.clone(),
            entries: &v * v.adjoint(),
        }
    }

    /// Max-norm distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &PureState) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: SystemShape,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(shape: SystemShape, entries: DMatrix<C64>) -> Result<Self> {
        let d = shape.total_dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(GgmError::InvalidDensityMatrix(format!(
                "expected {d}x{d}, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = max_abs(&(&entries - entries.adjoint()));
        if herm > STATE_TOL {
            return Err(GgmError::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
            return Err(GgmError::InvalidDensityMatrix(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let min_eig = hermitian_eigenvalues(&entries)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOL {
            return Err(GgmError::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { shape, entries })
    }

    pub(crate) fn from_parts_unchecked(shape: SystemShape, entries: DMatrix<C64>) -> Self {
        Self { shape, entries }
    }

    /// Σ_k w_k |ψ_k⟩⟨ψ_k|
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states.first().ok_or(GgmError::InvalidArgument {
            name: "states",
            reason: "empty mixture".into(),
        })?;
        if weights.len() != states.len() {
            return Err(GgmError::InvalidArgument {
                name: "weights",
                reason: format!("{} weights for {} states", weights.len(), states.len()),
            });
        }
        check_probability_vector(weights)?;
        let shape = first.shape().clone();
        let d = shape.total_dim();
        let mut entries = DMatrix::<C64>::zeros(d, d);
        for (&w, s) in weights.iter().zip(states) {
            shape.ensure_same(s.shape())?;
            if w == 0.0 {
                continue;
            }
            let a = s.amplitudes();
            for r in 0..d {
                let ar = a[r] * w;
                for c in 0..d {
                    entries[(r, c)] += ar * a[c].conj();
                }
            }
        }
        Self::new(shape, entries)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        self.shape.ensure_same(&other.shape)?;
        Ok(max_abs(&(&self.entries - &other.entries)))
    }
}

/// A split I:L of the parties, canonicalized so that party 0 is in `side`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    shape: SystemShape,
    side: Vec<usize>,
    rest: Vec<usize>,
}

impl Bipartition {
    /// Builds the canonical form of the split `{parties} : complement`.
    pub fn new(shape: SystemShape, parties: &[usize]) -> Result<Self> {
        let n = shape.party_count();
        let mut in_side = vec![false; n];
        for &p in parties {
            if p >= n {
                return Err(GgmError::InvalidArgument {
                    name: "parties",
                    reason: format!("party {p} out of range for {n} parties"),
                });
            }
            in_side[p] = true;
        }
        if !in_side[0] {
            in_side.iter_mut().for_each(|b| *b = !*b);
        }
        let side: Vec<usize> = (0..n).filter(|&p| in_side[p]).collect();
        let rest: Vec<usize> = (0..n).filter(|&p| !in_side[p]).collect();
        if side.is_empty() || rest.is_empty() {
            return Err(GgmError::InvalidArgument {
                name: "parties",
                reason: "both sides of a bipartition must be nonempty".into(),
            });
        }
        Ok(Self { shape, side, rest })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn side(&self) -> &[usize] {
        &self.side
    }

    pub fn rest(&self) -> &[usize] {
        &self.rest
    }

    pub fn side_dim(&self) -> usize {
        self.side.iter().map(|&p| self.shape.dims()[p]).product()
    }

    pub fn rest_dim(&self) -> usize {
        self.rest.iter().map(|&p| self.shape.dims()[p]).product()
    }

    /// (row, column) of a flat amplitude index in the matricization.
    pub fn locate(&self, index: usize) -> (usize, usize) {
        let digits = self.shape.digits(index);
        let dims = self.shape.dims();
        let fold = |parties: &[usize]| {
            parties
                .iter()
                .fold(0, |acc, &p| acc * dims[p] + digits[p])
        };
        (fold(&self.side), fold(&self.rest))
    }
}

impl Serialize for Bipartition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{{{}}}:{{{}}}", join(&self.side), join(&self.rest))
    }
}

/// All 2^(N−1) − 1 canonical bipartitions, ordered by the bitmask of the
/// parties 1..N that join party 0.
pub fn enumerate_bipartitions(shape: &SystemShape) -> Vec<Bipartition> {
    let n = shape.party_count();
    let count = (1usize << (n - 1)) - 1;
    (0..count)
        .map(|mask| {
            let parties: Vec<usize> = std::iter::once(0)
                .chain((1..n).filter(|p| mask >> (p - 1) & 1 == 1))
                .collect();
            Bipartition::new(shape.clone(), &parties).expect("mask is a proper subset")
        })
        .collect()
}

/// Reshapes a state into the dim_I × dim_L coefficient matrix of `cut`.
pub fn matricize(state: &PureState, cut: &Bipartition) -> Result<DMatrix<C64>> {
    state.shape().ensure_same(cut.shape())?;
    let mut m = DMatrix::<C64>::zeros(cut.side_dim(), cut.rest_dim());
    for (idx, &a) in state.amplitudes().iter().enumerate() {
        let (r, c) = cut.locate(idx);
        m[(r, c)] = a;
    }
    Ok(m)
}

/// Inverse of [`matricize`]: scatters the matrix back into a flat amplitude vector.
pub fn unmatricize(matrix: &DMatrix<C64>, cut: &Bipartition) -> Result<Vec<C64>> {
    if matrix.nrows() != cut.side_dim() || matrix.ncols() != cut.rest_dim() {
        return Err(GgmError::InvalidArgument {
            name: "matrix",
            reason: format!(
                "expected {}x{}, got {}x{}",
                cut.side_dim(),
                cut.rest_dim(),
                matrix.nrows(),
                matrix.ncols()
            ),
        });
    }
    Ok((0..cut.shape().total_dim())
        .map(|idx| {
            let (r, c) = cut.locate(idx);
            matrix[(r, c)]
        })
        .collect())
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn vector_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

/// Rejects weight vectors with negative entries or a sum away from 1 by more than 1e-10.
pub(crate) fn check_probability_vector(weights: &[f64]) -> Result<()> {
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) || (sum - 1.0).abs() > STATE_TOL {
        return Err(GgmError::InvalidWeights(sum));
    }
    Ok(())
}
