//! Muckenhoupt constants `[w]_{A_p}`, `[w]_{A_∞}`, the multiple `A_P⃗`
//! constant, dual weights and the product weight `ν_w⃗`.

use crate::error::{Error, Result};
use crate::grid::{sup_all, sup_field_within, Grid, GridInterval, PrefixSums, SampledFunction, SearchMode};
use crate::scalar::Real;

/// Strictly positive sampled weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight<T> {
    w: SampledFunction<T>,
}

impl<T: Real> Weight<T> {
    pub fn new(w: SampledFunction<T>) -> Result<Self> {
        if let Some((cell, &value)) = w.values().iter().enumerate().find(|(_, v)| !(**v > T::zero())) {
            return Err(Error::NonPositiveWeight { cell, value: value.as_f64() });
        }
        Ok(Self { w })
    }

    pub fn constant(grid: Grid<T>, c: T) -> Result<Self> {
        Self::new(SampledFunction::constant(grid, c))
    }

    /// `|x − x₀|^a` sampled at cell centers, with `x₀` moved to the nearest node
    /// so that no center coincides with it.
    pub fn power(grid: Grid<T>, x0: T, a: T) -> Result<Self> {
        let node = grid.node(grid.nearest_node(x0)?);
        Self::new(grid.sample(|x| (x - node).abs().powf(a)))
    }

    pub fn function(&self) -> &SampledFunction<T> {
        &self.w
    }

    pub fn values(&self) -> &[T] {
        self.w.values()
    }

    pub fn grid(&self) -> &Grid<T> {
        self.w.grid()
    }

    pub fn scale(&self, c: T) -> Result<Self> {
        Self::new(self.w.scale(c))
    }

    pub fn powf(&self, e: T) -> Result<Self> {
        Self::new(self.w.try_map(|v| v.powf(e))?)
    }

    /// `w(E)` for a union of cells.
    pub fn measure(&self, iv: GridInterval) -> Result<T> {
        self.w.integrate(iv)
    }
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("A_p exponent must be in (1, ∞), got {p}")));
    }
    Ok(())
}

/// `σ = w^{−1/(p−1)}`.
pub fn dual_weight<T: Real>(w: &Weight<T>, p: T) -> Result<Weight<T>> {
    check_p(p)?;
    w.powf(-(p - T::one()).recip())
}

/// `[w]_{A_p} = sup_Q ⟨w⟩_Q ⟨w^{−1/(p−1)}⟩_Q^{p−1}`.
pub fn ap_constant<T: Real>(w: &Weight<T>, p: T, mode: SearchMode) -> Result<T> {
    Ok(ap_constant_with_interval(w, p, mode)?.0)
}

/// [`ap_constant`] together with an interval attaining it.
pub fn ap_constant_with_interval<T: Real>(w: &Weight<T>, p: T, mode: SearchMode) -> Result<(T, GridInterval)> {
    let sigma = dual_weight(w, p)?;
    let pw = w.function().prefix_sums();
    let ps = sigma.function().prefix_sums();
    let e = p - T::one();
    Ok(sup_all(w.grid().full(), mode, |iv| pw.average(iv) * ps.average(iv).powf(e)))
}

/// `[w]_{A_∞} = sup_Q w(Q)⁻¹ ∫_Q M(wχ_Q)`, with the inner maximal function
/// taken over every subinterval of `Q`.
pub fn ainf_constant<T: Real>(w: &Weight<T>, mode: SearchMode) -> Result<T> {
    let p = w.function().prefix_sums();
    let (best, _) = sup_all(w.grid().full(), mode, |q| {
        let field = sup_field_within(q, SearchMode::Exhaustive, |iv| p.average(iv));
        let total: T = field.into_iter().sum();
        total / p.sum(q)
    });
    Ok(best)
}

/// Weights `(w₁, …, w_m)` with exponents `P⃗ = (p₁, …, p_m)` and `1/p = Σ 1/p_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<T> {
    weights: Vec<Weight<T>>,
    exponents: Vec<T>,
    p: T,
}

impl<T: Real> WeightVector<T> {
    pub fn new(weights: Vec<Weight<T>>, exponents: Vec<T>) -> Result<Self> {
        if weights.is_empty() || weights.len() != exponents.len() {
            return Err(Error::LengthMismatch { expected: weights.len().max(1), got: exponents.len() });
        }
        if let Some(bad) = exponents.iter().find(|&&pk| !(pk >= T::one() && pk.is_finite())) {
            return Err(Error::InvalidParameter(format!("exponents must lie in [1, ∞), got {bad}")));
        }
        let g = *weights[0].grid();
        if weights.iter().any(|w| !w.grid().same_as(&g)) {
            return Err(Error::GridMismatch);
        }
        let inv: T = exponents.iter().map(|pk| pk.recip()).sum();
        Ok(Self { weights, exponents, p: inv.recip() })
    }

    pub fn weights(&self) -> &[Weight<T>] {
        &self.weights
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    /// `p` with `1/p = Σ 1/p_k`.
    pub fn p(&self) -> T {
        self.p
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Replaces slot `k` by `c·w_k`.
    pub fn scale_slot(&self, k: usize, c: T) -> Result<Self> {
        let mut weights = self.weights.clone();
        weights[k] = weights[k].scale(c)?;
        Self::new(weights, self.exponents.clone())
    }

    /// `σ_k = w_k^{−1/(p_k−1)}`; `None` when `p_k = 1`.
    pub fn dual(&self, k: usize) -> Result<Option<Weight<T>>> {
        let pk = self.exponents[k];
        if pk == T::one() {
            return Ok(None);
        }
        dual_weight(&self.weights[k], pk).map(Some)
    }
}

/// `ν_w⃗ = ∏_k w_k^{p/p_k}`.
pub fn nu<T: Real>(wv: &WeightVector<T>) -> Result<Weight<T>> {
    let g = *wv.weights[0].grid();
    let mut values = vec![T::one(); g.n_cells()];
    for (w, &pk) in wv.weights.iter().zip(&wv.exponents) {
        let e = wv.p / pk;
        for (acc, &v) in values.iter_mut().zip(w.values()) {
            *acc = *acc * v.powf(e);
        }
    }
    Weight::new(SampledFunction::new(g, values)?)
}

/// Sparse table for `O(1)` range minima.
struct MinTable<T> {
    levels: Vec<Vec<T>>,
}

impl<T: Real> MinTable<T> {
    fn new(values: &[T]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().expect("non-empty");
            let next = (0..=values.len() - 2 * width).map(|i| prev[i].min(prev[i + width])).collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    fn min(&self, iv: GridInterval) -> T {
        let lvl = (usize::BITS - 1 - iv.len().leading_zeros()) as usize;
        let width = 1 << lvl;
        self.levels[lvl][iv.lo()].min(self.levels[lvl][iv.hi() - width])
    }
}

enum DualFactor<T> {
    Average { prefix: PrefixSums<T>, exponent: T },
    Infimum { table: MinTable<T>, exponent: T },
}

impl<T: Real> DualFactor<T> {
    fn eval(&self, iv: GridInterval) -> T {
        match self {
            Self::Average { prefix, exponent } => prefix.average(iv).powf(*exponent),
            Self::Infimum { table, exponent } => table.min(iv).powf(*exponent),
        }
    }
}

/// `[w⃗]_{A_P⃗} = sup_Q ⟨ν⟩_Q ∏_k ⟨σ_k⟩_Q^{p/p_k′}`, the factor for `p_k = 1`
/// being `(min_Q w_k)^{−p}`.
pub fn multi_ap_constant<T: Real>(wv: &WeightVector<T>, mode: SearchMode) -> Result<T> {
    let nu_prefix = nu(wv)?.function().prefix_sums();
    let factors = (0..wv.len())
        .map(|k| {
            let pk = wv.exponents[k];
            Ok(match wv.dual(k)? {
                Some(sigma) => DualFactor::Average {
                    prefix: sigma.function().prefix_sums(),
                    exponent: wv.p * (T::one() - pk.recip()),
                },
                None => DualFactor::Infimum { table: MinTable::new(wv.weights[k].values()), exponent: -wv.p },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (best, _) = sup_all(wv.weights[0].grid().full(), mode, |iv| {
        factors.iter().fold(nu_prefix.average(iv), |acc, f| acc * f.eval(iv))
    });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid<f64> {
        Grid::new(-1.0, 1.0, n).unwrap()
    }

    #[test]
    fn ones_give_one() {
        let g = grid(64);
        let one = Weight::constant(g, 1.0).unwrap();
        for mode in [SearchMode::Dyadic, SearchMode::Dilated, SearchMode::Exhaustive] {
            assert_eq!(ap_constant(&one, 2.0, mode).unwrap(), 1.0);
            assert_eq!(ap_constant(&one, 3.5, mode).unwrap(), 1.0);
            assert_eq!(ainf_constant(&one, mode).unwrap(), 1.0);
            let wv = WeightVector::new(vec![one.clone(), one.clone()], vec![2.0, 1.0]).unwrap();
            assert_eq!(multi_ap_constant(&wv, mode).unwrap(), 1.0);
        }
        assert_eq!(dual_weight(&one, 2.0).unwrap(), one);
    }

    #[test]
    fn dual_weight_rules() {
        let g = grid(32);
        let w = Weight::power(g, 0.0, 0.5).unwrap();
        let s = dual_weight(&w, 2.0).unwrap();
        for (a, b) in s.values().iter().zip(w.values()) {
            assert!((a * b - 1.0).abs() < 1e-15);
        }
        let back = dual_weight(&dual_weight(&w, 3.0).unwrap(), 1.5).unwrap();
        for (a, b) in back.values().iter().zip(w.values()) {
            assert!((a / b - 1.0).abs() < 1e-14);
        }
        assert!(dual_weight(&w, 1.0).is_err());
        assert!(Weight::new(SampledFunction::zeros(g)).is_err());
    }

    #[test]
    fn nu_examples() {
        let g = grid(32);
        let w = Weight::power(g, 0.1, 0.5).unwrap();
        let wv = WeightVector::new(vec![w.clone(), w.clone()], vec![2.0, 2.0]).unwrap();
        assert_eq!(wv.p(), 1.0);
        for (a, b) in nu(&wv).unwrap().values().iter().zip(w.values()) {
            assert!((a / b - 1.0).abs() < 1e-15);
        }
        let single = WeightVector::new(vec![w.clone()], vec![3.0]).unwrap();
        assert_eq!(nu(&single).unwrap(), w);
    }

    #[test]
    fn multi_collapses_to_ap() {
        let g = grid(64);
        let w = Weight::power(g, 0.2, -0.3).unwrap();
        for p in [2.0, 3.0, 1.5] {
            let wv = WeightVector::new(vec![w.clone()], vec![p]).unwrap();
            let a = multi_ap_constant(&wv, SearchMode::Dilated).unwrap();
            let b = ap_constant(&w, p, SearchMode::Dilated).unwrap();
            assert!((a / b - 1.0).abs() < 1e-14, "{p}: {a} vs {b}");
        }
    }

    #[test]
    fn min_table_is_exact() {
        let v: Vec<f64> = (0..37).map(|i| ((i * 17 % 11) as f64).sin()).collect();
        let t = MinTable::new(&v);
        for lo in 0..37 {
            for hi in lo + 1..=37 {
                let expect = v[lo..hi].iter().copied().fold(f64::INFINITY, f64::min);
                assert_eq!(t.min(GridInterval::new(lo, hi).unwrap()), expect);
            }
        }
    }

    #[test]
    fn power_weight_constants_grow_with_exponent() {
        let g = grid(128);
        let a2 = |a: f64| ap_constant(&Weight::power(g, 0.0, a).unwrap(), 2.0, SearchMode::Exhaustive).unwrap();
        assert!(a2(0.5) > 1.0);
        assert!(a2(0.9) > a2(0.5));
        let ainf = |a: f64| ainf_constant(&Weight::power(g, 0.0, a).unwrap(), SearchMode::Dyadic).unwrap();
        assert!(ainf(0.5) >= ainf(0.25));
        assert!(ainf(0.25) >= 1.0);
    }
}
