//! Scalar and vector fields carrying physical samples and/or Fourier coefficients.
//!
//! A field holds at least one representation; the other is computed on first
//! access and cached. Coefficients are normalized so that
//! `f(x) = Σ_k c_k exp(i ξ_k·x)`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

#[derive(Clone)]
pub struct ScalarField {
    grid: PeriodicGrid,
    samples: OnceLock<Vec<f64>>,
    coefficients: OnceLock<Vec<Complex64>>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("physical", &self.samples.get().is_some())
            .field("spectral", &self.coefficients.get().is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn from_samples(grid: &PeriodicGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: samples.len() });
        }
        Ok(Self::physical_unchecked(grid, samples))
    }

    /// Builds a field from coefficients, projecting onto the conjugate-symmetric
    /// (real-valued) subspace.
    pub fn from_coefficients(grid: &PeriodicGrid, mut coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: coefficients.len(),
            });
        }
        for i in 0..coefficients.len() {
            let j = grid.conjugate_index(i);
            if j < i {
                continue;
            }
            let sym = (coefficients[i] + coefficients[j].conj()) * 0.5;
            coefficients[i] = sym;
            coefficients[j] = sym.conj();
        }
        Ok(Self::spectral_unchecked(grid, coefficients))
    }

    /// Samples `f` at every node; `f` receives the node coordinates.
    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let samples = (0..grid.len()).map(|i| f(&grid.coordinates(i))).collect();
        Self::physical_unchecked(grid, samples)
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &PeriodicGrid, value: f64) -> Self {
        let field = Self::physical_unchecked(grid, vec![value; grid.len()]);
        let mut coefficients = vec![Complex64::default(); grid.len()];
        coefficients[0] = Complex64::new(value, 0.0);
        let _ = field.coefficients.set(coefficients);
        field
    }

    pub(crate) fn physical_unchecked(grid: &PeriodicGrid, samples: Vec<f64>) -> Self {
        let field = Self {
            grid: grid.clone(),
            samples: OnceLock::new(),
            coefficients: OnceLock::new(),
        };
        let _ = field.samples.set(samples);
        field
    }

    /// Caller guarantees conjugate symmetry.
    pub(crate) fn spectral_unchecked(grid: &PeriodicGrid, coefficients: Vec<Complex64>) -> Self {
        let field = Self {
            grid: grid.clone(),
            samples: OnceLock::new(),
            coefficients: OnceLock::new(),
        };
        let _ = field.coefficients.set(coefficients);
        field
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        self.samples.get_or_init(|| {
            let mut data = self.coefficients.get().expect("field has no representation").clone();
            self.grid.inverse(&mut data);
            data.into_iter().map(|c| c.re).collect()
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        self.coefficients.get_or_init(|| {
            let mut data: Vec<Complex64> = self
                .samples
                .get()
                .expect("field has no representation")
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect();
            self.grid.forward(&mut data);
            data
        })
    }

    /// Makes sure the coefficient representation is populated.
    pub fn to_spectral(self) -> Self {
        self.coefficients();
        self
    }

    /// Makes sure the sample representation is populated.
    pub fn to_physical(self) -> Self {
        self.samples();
        self
    }

    pub fn has_samples(&self) -> bool {
        self.samples.get().is_some()
    }

    pub fn has_coefficients(&self) -> bool {
        self.coefficients.get().is_some()
    }

    /// Largest imaginary part produced by an unsymmetrized inverse transform;
    /// measures how far the coefficients are from describing a real field.
    pub fn imaginary_residue(&self) -> f64 {
        let mut data = self.coefficients().to_vec();
        self.grid.inverse(&mut data);
        data.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn ensure_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Multiplies every coefficient by `m(flat_index)`. `m` must respect
    /// conjugate symmetry.
    pub(crate) fn apply_multiplier(&self, m: impl Fn(usize) -> Complex64) -> Self {
        let coefficients = self.coefficients().iter().enumerate().map(|(i, c)| c * m(i)).collect();
        Self::spectral_unchecked(&self.grid, coefficients)
    }

    pub(crate) fn apply_real_multiplier(&self, m: &[f64]) -> Self {
        debug_assert_eq!(m.len(), self.grid.len());
        let coefficients = self.coefficients().iter().zip(m).map(|(c, w)| c * *w).collect();
        Self::spectral_unchecked(&self.grid, coefficients)
    }

    /// `a·self + b·other`, computed in whichever representation both share.
    pub fn lincomb(&self, a: f64, other: &ScalarField, b: f64) -> Result<Self> {
        self.ensure_same_grid(other)?;
        if self.has_coefficients() && other.has_coefficients() || !(self.has_samples() && other.has_samples()) {
            let coefficients = self
                .coefficients()
                .iter()
                .zip(other.coefficients())
                .map(|(x, y)| x * a + y * b)
                .collect();
            Ok(Self::spectral_unchecked(&self.grid, coefficients))
        } else {
            let samples = self.samples().iter().zip(other.samples()).map(|(x, y)| a * x + b * y).collect();
            Ok(Self::physical_unchecked(&self.grid, samples))
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        if let Some(c) = self.coefficients.get() {
            Self::spectral_unchecked(&self.grid, c.iter().map(|x| x * a).collect())
        } else {
            Self::physical_unchecked(&self.grid, self.samples().iter().map(|x| x * a).collect())
        }
    }

    /// Pointwise product (no dealiasing).
    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let samples = self.samples().iter().zip(other.samples()).map(|(x, y)| x * y).collect();
        Ok(Self::physical_unchecked(&self.grid, samples))
    }
}

/// `d` scalar components on one grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::param("a vector field needs at least one component"))?;
        for c in &components[1..] {
            first.ensure_same_grid(c)?;
        }
        Ok(Self { components })
    }

    /// Vector field whose component count equals the grid dimension.
    pub fn velocity(components: Vec<ScalarField>) -> Result<Self> {
        let v = Self::new(components)?;
        if v.len() != v.grid().dim() {
            return Err(Error::DimensionMismatch { expected: v.grid().dim(), found: v.len() });
        }
        Ok(v)
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self { components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    /// `(f, 0, …, 0)` with `grid.dim()` components.
    pub fn first_component(f: ScalarField) -> Self {
        let grid = f.grid().clone();
        let mut components = vec![f];
        components.extend((1..grid.dim()).map(|_| ScalarField::zeros(&grid)));
        Self { components }
    }

    pub(crate) fn from_components_unchecked(components: Vec<ScalarField>) -> Self {
        Self { components }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.components[0].grid()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn ensure_compatible(&self, other: &VectorField) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        self.components[0].ensure_same_grid(&other.components[0])
    }

    pub fn lincomb(&self, a: f64, other: &VectorField, b: f64) -> Result<Self> {
        self.ensure_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| x.lincomb(a, y, b))
            .collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { components: self.components.iter().map(|c| c.scale(a)).collect() }
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { components: self.components.iter().map(f).collect() }
    }

    /// Pointwise Euclidean magnitude across components.
    pub fn magnitude_samples(&self) -> Vec<f64> {
        magnitude(&self.components)
    }
}

impl From<ScalarField> for VectorField {
    fn from(f: ScalarField) -> Self {
        Self { components: vec![f] }
    }
}

/// Something whose pointwise value is a vector of scalar components; norms
/// use the Euclidean magnitude across components.
pub trait Components {
    fn components(&self) -> &[ScalarField];

    fn grid(&self) -> &PeriodicGrid {
        self.components()[0].grid()
    }
}

impl Components for ScalarField {
    fn components(&self) -> &[ScalarField] {
        std::slice::from_ref(self)
    }
}

impl Components for VectorField {
    fn components(&self) -> &[ScalarField] {
        &self.components
    }
}

pub(crate) fn magnitude(components: &[ScalarField]) -> Vec<f64> {
    if let [single] = components {
        return single.samples().iter().map(|x| x.abs()).collect();
    }
    let mut acc = vec![0.0; components[0].grid().len()];
    for c in components {
        for (a, x) in acc.iter_mut().zip(c.samples()) {
            *a += x * x;
        }
    }
    acc.iter_mut().for_each(|a| *a = a.sqrt());
    acc
}
