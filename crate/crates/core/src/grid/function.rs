use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{CellSet, Grid, GridInterval};

/// Piecewise-constant function: `values[k]` is the value on cell `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::LengthMismatch { expected: grid.n_cells(), got: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at cell centers. Panics on non-finite samples.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Self {
        let values = (0..grid.n_cells()).map(|k| f(grid.center(k))).collect();
        Self::new(grid, values).expect("finite samples")
    }

    pub fn constant(grid: Grid<T>, c: T) -> Self {
        Self { grid, values: vec![c; grid.n_cells()] }
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    /// Indicator of the grid cells between the nodes nearest to `a` and `b`.
    pub fn indicator(grid: Grid<T>, a: T, b: T) -> Result<Self> {
        let iv = grid.interval_between(a, b)?;
        Ok(Self::constant(grid, T::one()).restrict(iv))
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn value(&self, k: usize) -> T {
        self.values[k]
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Value at a point of the domain (half-open cell convention).
    pub fn eval(&self, x: T) -> Result<T> {
        Ok(self.values[self.grid.cell_of(x)?])
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let values: Vec<T> = self.values.iter().map(|&v| f(v)).collect();
        Self::new(self.grid, values).expect("finite mapped samples")
    }

    pub fn try_map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `f·χ_I`.
    pub fn restrict(&self, iv: GridInterval) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| if iv.contains_cell(k) { v } else { T::zero() })
            .collect();
        Self { grid: self.grid, values }
    }

    /// `f·χ_S`.
    pub fn restrict_set(&self, set: &CellSet) -> Self {
        let mut values = vec![T::zero(); self.values.len()];
        for k in set.cells() {
            values[k] = self.values[k];
        }
        Self { grid: self.grid, values }
    }

    /// `f·χ_{complement of S}`.
    pub fn remove_set(&self, set: &CellSet) -> Self {
        let mut values = self.values.clone();
        for k in set.cells() {
            values[k] = T::zero();
        }
        Self { grid: self.grid, values }
    }

    /// `h·Σ_{k∈I} values[k]`.
    pub fn integrate(&self, iv: GridInterval) -> Result<T> {
        iv.check_within(self.values.len())?;
        let s: T = self.values[iv.lo()..iv.hi()].iter().copied().sum();
        Ok(s * self.grid.h())
    }

    pub fn integral(&self) -> T {
        self.integrate(self.grid.full()).expect("full interval")
    }

    /// Mean value on `I`, computed as the cell sum over the cell count.
    pub fn average(&self, iv: GridInterval) -> Result<T> {
        iv.check_within(self.values.len())?;
        let s: T = self.values[iv.lo()..iv.hi()].iter().copied().sum();
        Ok(s / T::count(iv.len()))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// `(∫|f|^p)^{1/p}`, optionally against a weight sampled on the same grid.
    pub fn lp_norm(&self, p: T, weight: Option<&SampledFunction<T>>) -> Result<T> {
        if !(p > T::zero()) {
            return Err(Error::InvalidParameter(format!("Lp exponent must be positive, got {p}")));
        }
        if let Some(w) = weight {
            if !self.grid.same_as(&w.grid) {
                return Err(Error::GridMismatch);
            }
        }
        let mut s = T::zero();
        for (k, &v) in self.values.iter().enumerate() {
            let w = weight.map_or(T::one(), |w| w.values[k]);
            s = s + v.abs().powf(p) * w;
        }
        Ok((s * self.grid.h()).powf(p.recip()))
    }

    /// Smallest interval containing every non-zero cell.
    pub fn support(&self) -> Option<GridInterval> {
        let lo = self.values.iter().position(|v| *v != T::zero())?;
        let hi = self.values.iter().rposition(|v| *v != T::zero())? + 1;
        GridInterval::new(lo, hi).ok()
    }

    pub fn prefix_sums(&self) -> PrefixSums<T> {
        PrefixSums::new(&self.values)
    }

    /// Exact antiderivative normalised by `A(anchor) = 0`.
    pub fn antiderivative(&self, anchor: T) -> Result<PiecewiseLinear<T>> {
        if !self.grid.contains_point(anchor) {
            return Err(Error::PointOutOfDomain(anchor.as_f64()));
        }
        let h = self.grid.h();
        let mut nodes = Vec::with_capacity(self.values.len() + 1);
        let mut acc = T::zero();
        nodes.push(acc);
        for &v in &self.values {
            acc = acc + v;
            nodes.push(acc * h);
        }
        let raw = PiecewiseLinear { grid: self.grid, nodes };
        let shift = raw.eval(anchor)?;
        let nodes = raw.nodes.iter().map(|&v| v - shift).collect();
        Ok(PiecewiseLinear { grid: self.grid, nodes })
    }
}

/// Continuous piecewise-linear function given by its node values.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear<T> {
    grid: Grid<T>,
    nodes: Vec<T>,
}

impl<T: Real> PiecewiseLinear<T> {
    pub fn from_nodes(grid: Grid<T>, nodes: Vec<T>) -> Result<Self> {
        if nodes.len() != grid.n_cells() + 1 {
            return Err(Error::LengthMismatch { expected: grid.n_cells() + 1, got: nodes.len() });
        }
        Ok(Self { grid, nodes })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, k: usize) -> T {
        self.nodes[k]
    }

    /// Value at the center of cell `k`.
    #[inline]
    pub fn at_center(&self, k: usize) -> T {
        (self.nodes[k] + self.nodes[k + 1]) * T::lit(0.5)
    }

    pub fn eval(&self, x: T) -> Result<T> {
        let k = self.grid.cell_of(x)?;
        let t = (x - self.grid.node(k)) / self.grid.h();
        Ok(self.nodes[k] + (self.nodes[k + 1] - self.nodes[k]) * t)
    }

    /// Cell-wise slope.
    pub fn derivative(&self) -> SampledFunction<T> {
        let h = self.grid.h();
        let values = self.nodes.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        SampledFunction { grid: self.grid, values }
    }
}

/// Running cell sums `S[k] = Σ_{i<k} v_i`, for O(1) interval sums.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixSums<T> {
    sums: Vec<T>,
}

impl<T: Real> PrefixSums<T> {
    pub fn new(values: &[T]) -> Self {
        let mut sums = Vec::with_capacity(values.len() + 1);
        let mut acc = T::zero();
        sums.push(acc);
        for &v in values {
            acc = acc + v;
            sums.push(acc);
        }
        Self { sums }
    }

    #[inline]
    pub fn sum(&self, iv: GridInterval) -> T {
        self.sums[iv.hi()] - self.sums[iv.lo()]
    }

    #[inline]
    pub fn average(&self, iv: GridInterval) -> T {
        self.sum(iv) / T::count(iv.len())
    }

    #[inline]
    pub fn at(&self, k: usize) -> T {
        self.sums[k]
    }

    pub fn len(&self) -> usize {
        self.sums.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.sums.len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Grid<f64> {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn integrate_examples() {
        let g = unit(8);
        assert_eq!(SampledFunction::constant(g, 1.0).integral(), 1.0);
        assert_eq!(SampledFunction::zeros(g).integral(), 0.0);
        let half = SampledFunction::indicator(g, 0.0, 0.5).unwrap();
        assert_eq!(half.integrate(g.full()).unwrap(), 0.5);
        assert_eq!(half.average(g.full()).unwrap(), 0.5);
        assert_eq!(half.average(GridInterval::new(4, 8).unwrap()).unwrap(), 0.0);
        assert!(half.integrate(GridInterval::new(4, 9).unwrap()).is_err());
    }

    #[test]
    fn constructor_checks() {
        let g = unit(4);
        assert!(matches!(
            SampledFunction::new(g, vec![0.0; 3]),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
        assert_eq!(SampledFunction::new(g, vec![0.0, f64::NAN, 0.0, 0.0]), Err(Error::NonFinite(1)));
    }

    #[test]
    fn antiderivative_examples() {
        let g = unit(16);
        let a = SampledFunction::zeros(g).antiderivative(0.3).unwrap();
        assert!(a.nodes().iter().all(|&v| v == 0.0));

        let a = SampledFunction::constant(g, 1.0).antiderivative(0.0).unwrap();
        for x in [0.0, 0.1, 0.37, 1.0] {
            assert!((a.eval(x).unwrap() - x).abs() < 1e-15);
        }

        let g = Grid::new(-1.0, 1.0, 16).unwrap();
        let sign = g.sample(f64::signum);
        let a = sign.antiderivative(0.25).unwrap();
        assert_eq!(a.eval(0.25).unwrap(), 0.0);
        assert!((a.eval(1.0).unwrap() - a.eval(-1.0).unwrap()).abs() < 1e-15);
        assert!((a.eval(0.6).unwrap() - (0.6 - 0.25)).abs() < 1e-15);
        assert_eq!(a.derivative(), sign);
    }

    #[test]
    fn support_hull() {
        let g = unit(8);
        let f = SampledFunction::new(g, vec![0., 0., 1., 0., 2., 0., 0., 0.]).unwrap();
        assert_eq!(f.support(), Some(GridInterval::new(2, 5).unwrap()));
        assert_eq!(SampledFunction::zeros(g).support(), None);
    }
}
