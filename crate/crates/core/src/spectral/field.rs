use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real samples on a [`Grid`], stored component-major.
///
/// Scalars have one component and vectors `grid.dim()`; derivative tensors
/// produced by [`super::dk_tensor`] carry one component per multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::Shape("a field needs at least one component".into()));
        }
        if values.len() != components * grid.len() {
            return Err(Error::Shape(format!(
                "expected {} values for {} component(s) on {}^{}, got {}",
                components * grid.len(),
                components,
                grid.n(),
                grid.dim(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Field {
            grid,
            components,
            values,
        })
    }

    /// Builds a field without the finiteness scan. Callers guarantee the shape.
    pub(crate) fn from_parts(grid: Grid, components: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), components * grid.len());
        Field {
            grid,
            components,
            values,
        }
    }

    pub fn zeros(grid: Grid, components: usize) -> Self {
        Field::from_parts(grid, components, vec![0.0; components * grid.len()])
    }

    /// Scalar field sampled from `f(x)`.
    pub fn scalar_from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Field::from_parts(grid, 1, values)
    }

    /// Vector field with `grid.dim()` components sampled from `f(x)`.
    pub fn vector_from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let dim = grid.dim();
        let len = grid.len();
        let mut values = vec![0.0; dim * len];
        for i in 0..len {
            let v = f(grid.point(i));
            for c in 0..dim {
                values[c * len + i] = v[c];
            }
        }
        Field::from_parts(grid, dim, values)
    }

    /// Concatenates the components of several fields on the same grid.
    pub fn stack(fields: &[Field]) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::Shape("cannot stack zero fields".into()))?;
        let grid = first.grid;
        let mut values = Vec::new();
        let mut components = 0;
        for f in fields {
            if f.grid != grid {
                return Err(Error::Shape("stacked fields live on different grids".into()));
            }
            values.extend_from_slice(&f.values);
            components += f.components;
        }
        Ok(Field::from_parts(grid, components, values))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_scalar(&self) -> bool {
        self.components == 1
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let len = self.grid.len();
        &mut self.values[c * len..(c + 1) * len]
    }

    pub fn component_field(&self, c: usize) -> Field {
        Field::from_parts(self.grid, 1, self.component(c).to_vec())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn require_scalar(&self, what: &str) -> Result<()> {
        if self.is_scalar() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what} expects a scalar field, got {} components",
                self.components
            )))
        }
    }

    pub fn require_vector(&self, what: &str) -> Result<()> {
        if self.is_vector() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what} expects a {}-component vector field, got {}",
                self.grid.dim(),
                self.components
            )))
        }
    }

    /// Grid average of component `c`.
    pub fn mean(&self, c: usize) -> f64 {
        let comp = self.component(c);
        comp.iter().sum::<f64>() / comp.len() as f64
    }

    /// Pointwise Euclidean magnitude across components.
    pub fn magnitude(&self) -> Vec<f64> {
        let len = self.grid.len();
        (0..len)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.values[c * len + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Largest pointwise magnitude over the grid.
    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field::from_parts(
            self.grid,
            self.components,
            self.values.iter().map(|v| a * v).collect(),
        )
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Field> {
        self.same_shape(other)?;
        Ok(Field::from_parts(
            self.grid,
            self.components,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + a * y)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(-1.0, other)
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn same_shape(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Shape("fields differ in grid or component count".into()));
        }
        Ok(())
    }
}

/// Normalised Fourier coefficients `f̂(ξ) = n^{-dim} Σ_x f(x) e^{-iξ·x}` per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn from_parts(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), components * grid.len());
        Spectrum {
            grid,
            components,
            coeffs,
        }
    }

    pub fn zeros(grid: Grid, components: usize) -> Self {
        Spectrum::from_parts(grid, components, vec![Complex64::new(0.0, 0.0); components * grid.len()])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Coefficient of component `c` at integer wavevector `k`.
    pub fn at(&self, c: usize, k: [i64; 3]) -> Option<Complex64> {
        self.grid.slot_of(k).map(|slot| self.component(c)[slot])
    }

    /// Largest deviation from `f̂(−ξ) = conj f̂(ξ)` over all slots.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n() as i64;
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let comp = self.component(c);
            for (slot, &z) in comp.iter().enumerate() {
                let k = self.grid.wavevector(slot);
                let mut neg = [0i64; 3];
                for d in 0..self.grid.dim() {
                    // −(−n/2) aliases back onto −n/2
                    neg[d] = (-k[d] + n / 2).rem_euclid(n) - n / 2;
                }
                let partner = comp[self.grid.slot_of(neg).expect("representable")];
                worst = worst.max((z - partner.conj()).norm());
            }
        }
        worst
    }
}
