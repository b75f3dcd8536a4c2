//! Hardy–Littlewood, `M_s`, Orlicz, sharp and grand maximal operators.

use crate::error::{Error, Result};
use crate::grid::{candidate_intervals, sup_field, sup_field_within, Grid, GridInterval, SampledFunction, SearchMode};
use crate::scalar::Real;

/// Inputs `(f₁, …, f_k)` of a multi-sublinear operator, with the node
/// integrals and support hulls needed to restrict them to a window cheaply.
#[derive(Clone, Debug)]
pub struct InputSet<T> {
    functions: Vec<SampledFunction<T>>,
    node_integrals: Vec<Vec<T>>,
    supports: Vec<Option<GridInterval>>,
    hull: Option<GridInterval>,
}

impl<T: Real> InputSet<T> {
    pub fn new(functions: Vec<SampledFunction<T>>) -> Result<Self> {
        let first = functions
            .first()
            .ok_or_else(|| Error::InvalidParameter("an operator needs at least one input".into()))?;
        let grid = *first.grid();
        if functions.iter().any(|f| !f.grid().same_as(&grid)) {
            return Err(Error::GridMismatch);
        }
        let h = grid.h();
        let node_integrals = functions
            .iter()
            .map(|f| {
                let mut acc = T::zero();
                let mut out = Vec::with_capacity(f.values().len() + 1);
                out.push(acc);
                for &v in f.values() {
                    acc = acc + v;
                    out.push(acc * h);
                }
                out
            })
            .collect();
        let supports: Vec<_> = functions.iter().map(SampledFunction::support).collect();
        let hull = supports.iter().flatten().copied().reduce(|a, b| {
            GridInterval::new(a.lo().min(b.lo()), a.hi().max(b.hi())).expect("non-empty hull")
        });
        Ok(Self { functions, node_integrals, supports, hull })
    }

    pub fn grid(&self) -> &Grid<T> {
        self.functions[0].grid()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn function(&self, slot: usize) -> &SampledFunction<T> {
        &self.functions[slot]
    }

    pub fn functions(&self) -> &[SampledFunction<T>] {
        &self.functions
    }

    pub fn support(&self, slot: usize) -> Option<GridInterval> {
        self.supports[slot]
    }

    /// Smallest interval containing the support of every input.
    pub fn hull(&self) -> Option<GridInterval> {
        self.hull
    }

    /// Antiderivative of `f_slot·χ_W` (zero left of `W`) at the center of cell `k`.
    #[inline]
    pub fn primitive_within(&self, slot: usize, window: GridInterval, k: usize) -> T {
        let n = &self.node_integrals[slot];
        if k < window.lo() {
            return T::zero();
        }
        if k >= window.hi() {
            return n[window.hi()] - n[window.lo()];
        }
        let half = self.grid().h() * T::lit(0.5);
        n[k] - n[window.lo()] + half * self.functions[slot].value(k)
    }

    /// `∏_j |f_j|` on cell `k`.
    pub fn product_abs(&self, k: usize) -> T {
        self.functions.iter().fold(T::one(), |p, f| p * f.value(k).abs())
    }

    /// Every input replaced by its absolute value.
    pub fn abs(&self) -> Result<Self> {
        Self::new(self.functions.iter().map(SampledFunction::abs).collect())
    }

    /// Whether restricting to `window` leaves every input inside `base` unchanged.
    pub fn window_is_inert(&self, window: GridInterval, base: GridInterval) -> bool {
        match self.hull.and_then(|hl| hl.intersect(&base)) {
            None => true,
            Some(active) => window.contains(&active),
        }
    }
}

/// Multi-sublinear operator evaluated at cell centers.
///
/// `eval(inputs, W, k)` is `U(f₁χ_W, …, f_kχ_W)` at the center of cell `k`.
/// Implementations must be homogeneous and sublinear in every slot.
pub trait MultiSublinear<T: Real> {
    fn arity(&self) -> usize;

    fn eval(&self, inputs: &InputSet<T>, window: GridInterval, cell: usize) -> Result<T>;

    fn eval_field(&self, inputs: &InputSet<T>, window: GridInterval, cells: GridInterval) -> Result<Vec<T>> {
        cells.cells().map(|k| self.eval(inputs, window, k)).collect()
    }
}

/// Adapts a closure into a [`MultiSublinear`] operator.
pub struct FnOperator<F> {
    arity: usize,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<T, F> MultiSublinear<T> for FnOperator<F>
where
    T: Real,
    F: Fn(&InputSet<T>, GridInterval, usize) -> Result<T>,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, inputs: &InputSet<T>, window: GridInterval, cell: usize) -> Result<T> {
        (self.f)(inputs, window, cell)
    }
}

/// `U(f)(x) = f(x)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointwiseIdentity;

impl<T: Real> MultiSublinear<T> for PointwiseIdentity {
    fn arity(&self) -> usize {
        1
    }

    fn eval(&self, inputs: &InputSet<T>, window: GridInterval, cell: usize) -> Result<T> {
        Ok(if window.contains_cell(cell) { inputs.function(0).value(cell) } else { T::zero() })
    }
}

fn check_arity<T: Real>(u: &impl MultiSublinear<T>, inputs: &InputSet<T>) -> Result<()> {
    if u.arity() != inputs.len() {
        return Err(Error::InvalidParameter(format!(
            "operator takes {} inputs, got {}",
            u.arity(),
            inputs.len()
        )));
    }
    Ok(())
}

fn budget(n: usize) -> usize {
    n.saturating_mul(n).max(n)
}

fn point_max<T: Real>(
    f: &SampledFunction<T>,
    x: T,
    mode: SearchMode,
    mut phi: impl FnMut(GridInterval) -> T,
) -> Result<T> {
    let n = f.grid().n_cells();
    let k = f.grid().cell_of(x)?;
    let cands = candidate_intervals(n, Some(k), mode, budget(n))?;
    Ok(cands.into_iter().map(&mut phi).fold(T::zero(), T::max))
}

/// `M f(x) = sup_{I ∋ x} ⟨|f|⟩_I`.
pub fn hl_max<T: Real>(f: &SampledFunction<T>, x: T, mode: SearchMode) -> Result<T> {
    let p = f.abs().prefix_sums();
    point_max(f, x, mode, |iv| p.average(iv))
}

/// `M f` at every cell.
pub fn hl_max_field<T: Real>(f: &SampledFunction<T>, mode: SearchMode) -> Result<Vec<T>> {
    let p = f.abs().prefix_sums();
    sup_field(f.grid().n_cells(), mode, |iv| p.average(iv))
}

fn check_s<T: Real>(s: T) -> Result<()> {
    if !(s > T::zero() && s <= T::one()) {
        return Err(Error::InvalidParameter(format!("M_s needs s in (0, 1], got {s}")));
    }
    Ok(())
}

/// `M_s f(x) = (M(|f|^s)(x))^{1/s}`.
pub fn m_s<T: Real>(f: &SampledFunction<T>, s: T, x: T, mode: SearchMode) -> Result<T> {
    check_s(s)?;
    let fs = f.map(|v| v.abs().powf(s));
    Ok(hl_max(&fs, x, mode)?.powf(s.recip()))
}

pub fn m_s_field<T: Real>(f: &SampledFunction<T>, s: T, mode: SearchMode) -> Result<Vec<T>> {
    check_s(s)?;
    let fs = f.map(|v| v.abs().powf(s));
    Ok(hl_max_field(&fs, mode)?.into_iter().map(|v| v.powf(s.recip())).collect())
}

/// Relative width at which the Luxemburg bisection stops.
pub const LUXEMBURG_RTOL: f64 = 1e-10;

/// Orlicz average `(1/N) Σ (|v|/λ) log^γ(e + |v|/λ)` over raw values.
pub fn orlicz_average<T: Real>(values: &[T], lambda: T, gamma: T) -> T {
    let e = T::one().exp();
    let s: T = values
        .iter()
        .map(|&v| {
            let r = v.abs() / lambda;
            if r == T::zero() {
                T::zero()
            } else {
                r * (e + r).ln().powf(gamma)
            }
        })
        .sum();
    s / T::count(values.len())
}

/// Luxemburg norm of raw cell values: the least `λ` with Orlicz average `≤ 1`.
///
/// Returns the upper end of the final bisection bracket, so the constraint holds there.
pub fn luxemburg_values<T: Real>(values: &[T], gamma: T) -> Result<T> {
    if !(gamma >= T::zero()) {
        return Err(Error::InvalidParameter(format!("Orlicz exponent must be non-negative, got {gamma}")));
    }
    if values.is_empty() {
        return Ok(T::zero());
    }
    let sum: T = values.iter().map(|v| v.abs()).sum();
    let avg = sum / T::count(values.len());
    if avg == T::zero() || gamma == T::zero() {
        return Ok(avg);
    }
    let max = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let e = T::one().exp();
    // At λ = avg the average is ≥ 1; at λ = avg·log^γ(e + max/avg) it is ≤ 1.
    let mut lo = avg;
    let mut hi = avg * (e + max / avg).ln().powf(gamma);
    let tol = T::lit(LUXEMBURG_RTOL);
    while hi - lo > tol * hi {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if orlicz_average(values, mid, gamma) <= T::one() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `‖f‖_{L(log L)^γ, Q}`.
pub fn luxemburg<T: Real>(f: &SampledFunction<T>, q: GridInterval, gamma: T) -> Result<T> {
    q.check_within(f.grid().n_cells())?;
    luxemburg_values(&f.values()[q.lo()..q.hi()], gamma)
}

/// `M_{L(log L)^γ} f(x) = sup_{Q ∋ x} ‖f‖_{L(log L)^γ, Q}`.
pub fn m_orlicz<T: Real>(f: &SampledFunction<T>, gamma: T, x: T, mode: SearchMode) -> Result<T> {
    let mut err = None;
    let v = point_max(f, x, mode, |iv| {
        luxemburg(f, iv, gamma).unwrap_or_else(|e| {
            err = Some(e);
            T::zero()
        })
    })?;
    err.map_or(Ok(v), Err)
}

pub fn m_orlicz_field<T: Real>(f: &SampledFunction<T>, gamma: T, mode: SearchMode) -> Result<Vec<T>> {
    if gamma == T::zero() {
        return hl_max_field(f, mode);
    }
    luxemburg_values(&[T::one()], gamma)?;
    sup_field(f.grid().n_cells(), mode, |iv| {
        luxemburg_values(&f.values()[iv.lo()..iv.hi()], gamma).expect("validated exponent")
    })
}

fn check_sharp_s<T: Real>(s: T) -> Result<()> {
    if !(s > T::zero() && s < T::lit(0.5)) {
        return Err(Error::InvalidParameter(format!("sharp maximal level needs s in (0, 1/2), got {s}")));
    }
    Ok(())
}

/// Oscillation of raw values: `inf_c inf{t > 0 : #{|v − c| > t} < s·N}`.
///
/// At least `r = N − ⌈sN⌉ + 1` values must lie within `t` of `c`, so the
/// optimum is half the narrowest window of `r` consecutive sorted values.
pub fn oscillation_values<T: Real>(values: &[T], s: T) -> Result<T> {
    check_sharp_s(s)?;
    let n = values.len();
    if n == 0 {
        return Ok(T::zero());
    }
    let allowed = (s * T::count(n)).ceil().to_usize().unwrap_or(n).max(1) - 1;
    let r = n - allowed.min(n - 1);
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let best = (0..=n - r).map(|i| v[i + r - 1] - v[i]).fold(T::infinity(), T::min);
    Ok(best * T::lit(0.5))
}

pub fn oscillation<T: Real>(f: &SampledFunction<T>, q: GridInterval, s: T) -> Result<T> {
    q.check_within(f.grid().n_cells())?;
    oscillation_values(&f.values()[q.lo()..q.hi()], s)
}

/// `M^♯_{0,s} f(x)`: the largest oscillation over intervals containing `x`.
pub fn sharp_max<T: Real>(f: &SampledFunction<T>, s: T, x: T, mode: SearchMode) -> Result<T> {
    check_sharp_s(s)?;
    point_max(f, x, mode, |iv| oscillation(f, iv, s).expect("validated level"))
}

pub fn sharp_max_field<T: Real>(f: &SampledFunction<T>, s: T, mode: SearchMode) -> Result<Vec<T>> {
    check_sharp_s(s)?;
    sup_field(f.grid().n_cells(), mode, |iv| oscillation(f, iv, s).expect("validated level"))
}

/// Shared state for grand maximal evaluations: `U(F·χ_base)` on every cell.
pub struct GrandMaxContext<'a, T: Real, U: MultiSublinear<T>> {
    u: &'a U,
    inputs: &'a InputSet<T>,
    kappa: u32,
    base: GridInterval,
    full: Vec<T>,
}

impl<'a, T: Real, U: MultiSublinear<T>> GrandMaxContext<'a, T, U> {
    /// Evaluates `U(F·χ_base)` at the cells of `cells` (the region the maximal function is needed on).
    pub fn new(u: &'a U, inputs: &'a InputSet<T>, kappa: u32, base: GridInterval, cells: GridInterval) -> Result<Self> {
        check_arity(u, inputs)?;
        if kappa == 0 {
            return Err(Error::InvalidParameter("grand maximal dilation exponent must be at least 1".into()));
        }
        let n = inputs.grid().n_cells();
        base.check_within(n)?;
        cells.check_within(n)?;
        let mut full = vec![T::zero(); n];
        let vals = u.eval_field(inputs, base, cells)?;
        full[cells.lo()..cells.hi()].copy_from_slice(&vals);
        Ok(Self { u, inputs, kappa, base, full })
    }

    /// `U(F·χ_base)` at cell `k` (only cells passed to [`GrandMaxContext::new`] are filled).
    pub fn full_value(&self, k: usize) -> T {
        self.full[k]
    }

    pub fn full_values(&self) -> &[T] {
        &self.full
    }

    /// `‖U(F·χ_base) − U(F·χ_{P^κ ∩ base})‖_{L^∞(P)}`.
    pub fn local_gap(&self, p: GridInterval) -> Result<T> {
        let n = self.inputs.grid().n_cells();
        let window = match p.dilate_pow3(self.kappa, n).intersect(&self.base) {
            Some(w) => w,
            None => return Ok(p.cells().map(|k| self.full[k].abs()).fold(T::zero(), T::max)),
        };
        if self.inputs.window_is_inert(window, self.base) {
            return Ok(T::zero());
        }
        let mut best = T::zero();
        for k in p.cells() {
            let v = self.u.eval(self.inputs, window, k)?;
            best = best.max((self.full[k] - v).abs());
        }
        Ok(best)
    }

    /// Grand maximal function on `node`, the supremum taken over search intervals `P ⊆ node`.
    pub fn field_within(&self, node: GridInterval, mode: SearchMode) -> Result<Vec<T>> {
        let mut err = None;
        let field = sup_field_within(node, mode, |p| match self.local_gap(p) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                T::zero()
            }
        });
        err.map_or(Ok(field), Err)
    }
}

/// `M_U^κ(F)(x) = sup_{Q ∋ x} ‖U(F) − U(F·χ_{3^κ Q})‖_{L^∞(Q)}` at the cell of `x`.
pub fn grand_max<T: Real, U: MultiSublinear<T>>(
    u: &U,
    inputs: &InputSet<T>,
    kappa: u32,
    x: T,
    mode: SearchMode,
) -> Result<T> {
    let g = inputs.grid();
    let n = g.n_cells();
    let k = g.cell_of(x)?;
    let ctx = GrandMaxContext::new(u, inputs, kappa, g.full(), g.full())?;
    let mut best = T::zero();
    for p in candidate_intervals(n, Some(k), mode, budget(n))? {
        best = best.max(ctx.local_gap(p)?);
    }
    Ok(best)
}

/// [`grand_max`] at every cell.
pub fn grand_max_field<T: Real, U: MultiSublinear<T>>(
    u: &U,
    inputs: &InputSet<T>,
    kappa: u32,
    mode: SearchMode,
) -> Result<Vec<T>> {
    let g = inputs.grid();
    let ctx = GrandMaxContext::new(u, inputs, kappa, g.full(), g.full())?;
    ctx.field_within(g.full(), mode)
}
