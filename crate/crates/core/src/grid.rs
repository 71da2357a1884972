//! Uniform grids and complex-valued sampled functions.

use num_complex::Complex64;

use crate::error::{Result, SusyError};

/// Smallest grid accepted anywhere; the widest stencil window is 9 points.
pub const MIN_POINTS: usize = 9;

/// A uniform one-dimensional grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(SusyError::Invalid("non-finite grid bounds".into()));
        }
        if x_min == x_max {
            return Err(SusyError::EmptyInterval(x_min));
        }
        if x_min > x_max {
            return Err(SusyError::ReversedBounds { x_min, x_max });
        }
        if n_points < MIN_POINTS {
            return Err(SusyError::TooFewPoints {
                min: MIN_POINTS,
                got: n_points,
            });
        }
        let spacing = (x_max - x_min) / (n_points - 1) as f64;
        Ok(Grid {
            x_min,
            x_max,
            n_points,
            spacing,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Coordinate of the `i`-th node.
    pub fn x(&self, i: usize) -> f64 {
        debug_assert!(i < self.n_points);
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Node count of a coordinate shift, if the shift is an exact multiple of
    /// the spacing (within `1e-9` relative). Used for periodicity checks.
    pub fn shift_in_nodes(&self, shift: f64) -> Option<usize> {
        let steps = shift / self.spacing;
        let rounded = steps.round();
        if rounded >= 1.0 && (steps - rounded).abs() <= 1e-9 * rounded.max(1.0) {
            Some(rounded as usize)
        } else {
            None
        }
    }
}

/// Same signature as the grid constructor, matching the operation vocabulary
/// used by the CLI and the tests.
pub fn make_grid(x_min: f64, x_max: f64, n_points: usize) -> Result<Grid> {
    Grid::new(x_min, x_max, n_points)
}

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(SusyError::LengthMismatch {
                len: values.len(),
                n: grid.n_points(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SusyError::NonFinite { index });
        }
        Ok(SampledFunction { grid, values })
    }

    /// Builds samples without the finiteness check. Used for outputs that are
    /// allowed to blow up (e.g. a deformed potential near a Wronskian zero).
    pub fn new_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.n_points());
        SampledFunction { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(SusyError::GridMismatch);
        }
        Ok(SampledFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.norm()))
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Pointwise linear combination `sum_i coeffs[i] * fs[i]`, accumulated in a
    /// fixed order so identical inputs reproduce identical bits.
    pub fn linear_combination(terms: &[(Complex64, &SampledFunction)]) -> Result<Self> {
        let grid = terms
            .first()
            .map(|(_, f)| f.grid)
            .ok_or_else(|| SusyError::Invalid("empty linear combination".into()))?;
        if terms.iter().any(|(_, f)| f.grid != grid) {
            return Err(SusyError::GridMismatch);
        }
        let n = grid.n_points();
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for (c, f) in terms {
            for (dst, &v) in values.iter_mut().zip(f.values()) {
                *dst += *c * v;
            }
        }
        Ok(SampledFunction { grid, values })
    }
}

/// Sup-norm of the difference normalized by the larger sup-norm of the inputs.
/// This is the "relative agreement" metric used across the method cross-checks.
pub fn rel_sup_diff(a: &SampledFunction, b: &SampledFunction) -> f64 {
    assert_eq!(a.grid, b.grid, "rel_sup_diff on mismatched grids");
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        return 0.0;
    }
    let diff = a
        .values
        .iter()
        .zip(&b.values)
        .fold(0.0f64, |m, (&x, &y)| m.max((x - y).norm()));
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_examples() {
        let g = make_grid(-10.0, 10.0, 2001).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        let g = make_grid(0.0, 1.0, 11).unwrap();
        assert!((g.spacing() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn grid_endpoint_consistency() {
        let g = make_grid(-7.3, 11.9, 4001).unwrap();
        assert_eq!(g.x(0), -7.3);
        assert_eq!(g.x(4000), 11.9);
        // interior nodes uniform to 1 ulp scale
        for i in 1..(g.n_points() - 1) {
            let expected = -7.3 + i as f64 * g.spacing();
            assert!((g.x(i) - expected).abs() <= f64::EPSILON * expected.abs().max(1.0));
        }
    }

    #[test]
    fn degenerate_interval_rejected() {
        let err = make_grid(5.0, 5.0, 100).unwrap_err();
        assert!(err.to_string().contains("empty interval"));
        assert!(matches!(
            make_grid(2.0, -2.0, 100),
            Err(SusyError::ReversedBounds { .. })
        ));
        assert!(matches!(
            make_grid(0.0, 1.0, 5),
            Err(SusyError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn sampled_function_rejects_nonfinite() {
        let g = make_grid(0.0, 1.0, 11).unwrap();
        let mut vals = vec![Complex64::new(1.0, 0.0); 11];
        vals[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            SampledFunction::new(g, vals),
            Err(SusyError::NonFinite { index: 3 })
        ));
    }

    #[test]
    fn shift_in_nodes_detects_exact_multiples() {
        let g = make_grid(0.0, 8.0, 4001).unwrap();
        assert_eq!(g.shift_in_nodes(2.0), Some(1000));
        assert_eq!(g.shift_in_nodes(2.0 + 1e-13), Some(1000));
        assert_eq!(g.shift_in_nodes(0.00314159), None);
    }
}
