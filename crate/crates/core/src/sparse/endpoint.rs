use super::whitney::{whitney, WhitneyInterval};
use crate::error::{Error, Result};
use crate::grid::{CellSet, SampledFunction, SearchMode};
use crate::kernels::ApproxIdentity;
use crate::maximal::hl_max_field;
use crate::scalar::Real;

/// `a = a¹ + a² + a³` relative to `Ω = {M(|a|^p) > 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EndpointDecomposition<T> {
    /// `a·χ_{Ω^c}`.
    pub a1: SampledFunction<T>,
    /// `Σ_l D_{t_l} b_l`.
    pub a2: SampledFunction<T>,
    /// `Σ_l (b_l − D_{t_l} b_l)`.
    pub a3: SampledFunction<T>,
    pub omega: CellSet,
    pub intervals: Vec<WhitneyInterval>,
    /// Smoothing scale per interval, `max(|I_l|, 2h)`.
    pub scales: Vec<T>,
    /// `max_l |I_l|⁻¹ ∫_{I_l} |a|^p`.
    pub level_constant: T,
}

impl<T: Real> EndpointDecomposition<T> {
    /// `max |a − (a¹ + a² + a³)|`.
    pub fn identity_defect(&self, a: &SampledFunction<T>) -> T {
        (0..a.values().len())
            .map(|k| (a.value(k) - (self.a1.value(k) + self.a2.value(k) + self.a3.value(k))).abs())
            .fold(T::zero(), T::max)
    }
}

/// Splits `a` with the Whitney intervals (`R = 1`) of `Ω = {M(|a|^p) > 1}`
/// (exhaustive maximal function) and the one-sided smoothing `D_t`.
pub fn endpoint_decompose<T: Real>(a: &SampledFunction<T>, p: T) -> Result<EndpointDecomposition<T>> {
    if !(p >= T::one()) {
        return Err(Error::InvalidParameter(format!("endpoint exponent must be at least 1, got {p}")));
    }
    let g = *a.grid();
    let n = g.n_cells();
    let h = g.h();
    let ap = a.map(|v| v.abs().powf(p));
    let m = hl_max_field(&ap, SearchMode::Exhaustive)?;
    let omega = CellSet::from_mask(&m.iter().map(|&v| v > T::one()).collect::<Vec<_>>());
    let intervals = match whitney(&omega, n, T::one()) {
        Err(Error::BoundaryContact(_)) => return Err(Error::BoundaryContact("level set of the maximal function")),
        other => other?,
    };
    let mut a2 = vec![T::zero(); n];
    let mut b_sum = vec![T::zero(); n];
    let mut scales = Vec::with_capacity(intervals.len());
    let mut level_constant = T::zero();
    for w in &intervals {
        let iv = w.interval;
        let t = (T::count(iv.len()) * h).max(h + h);
        scales.push(t);
        level_constant = level_constant.max(ap.average(iv)?);
        let b = a.restrict(iv);
        for k in iv.cells() {
            b_sum[k] = b_sum[k] + a.value(k);
        }
        let d = ApproxIdentity::new(t, &g)?;
        // D_t b(x) vanishes unless (x, x + t] meets I.
        let lo_x = g.node(iv.lo()) - t;
        let first = g.cell_of(lo_x.max(g.x_min())).unwrap_or(0);
        for (k, slot) in a2.iter_mut().enumerate().take(iv.hi()).skip(first) {
            let x = g.center(k);
            if x + t > g.x_max() {
                return Err(Error::BoundaryContact("approximation kernel support"));
            }
            *slot = *slot + d.apply(&b, x)?;
        }
    }
    let a3: Vec<T> = b_sum.iter().zip(&a2).map(|(&b, &d)| b - d).collect();
    Ok(EndpointDecomposition {
        a1: a.remove_set(&omega),
        a2: SampledFunction::new(g, a2)?,
        a3: SampledFunction::new(g, a3)?,
        omega,
        intervals,
        scales,
        level_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn small_input_has_empty_level_set() {
        let g = Grid::<f64>::new(-4.0, 4.0, 128).unwrap();
        let a = g.sample(|x| 0.5 * (-x * x).exp());
        let dec = endpoint_decompose(&a, 1.0).unwrap();
        assert!(dec.omega.is_empty());
        assert_eq!(dec.a1, a);
        assert!(dec.a2.values().iter().all(|&v| v == 0.0));
        assert!(dec.a3.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tall_bump_identity_and_bounds() {
        let g = Grid::<f64>::new(-4.0, 4.0, 512).unwrap();
        let a = g.sample(|x| 6.0 * (-8.0 * x * x).exp() * (1.0 + 0.3 * (9.0 * x).sin()));
        let dec = endpoint_decompose(&a, 1.0).unwrap();
        assert!(!dec.omega.is_empty());
        assert!(dec.identity_defect(&a) <= 4.0 * f64::EPSILON * a.max_abs());
        assert!(dec.a1.max_abs() <= 1.0);
        let tiled = CellSet::from_intervals(dec.intervals.iter().map(|w| w.interval));
        assert_eq!(tiled, dec.omega);
        assert!(dec.level_constant.is_finite());
    }

    #[test]
    fn boundary_contact_is_reported() {
        let g = Grid::<f64>::new(0.0, 1.0, 64).unwrap();
        let a = SampledFunction::constant(g, 3.0);
        assert!(matches!(endpoint_decompose(&a, 1.0), Err(Error::BoundaryContact(_))));
    }
}
