//! Commutator kernels, the second-order remainder `P₂`, recentering and the
//! one-sided approximation to the identity.

use crate::error::{Error, Result};
use crate::grid::{sup_all, Grid, GridInterval, PiecewiseLinear, SampledFunction, SearchMode};
use crate::maximal::{InputSet, MultiSublinear};
use crate::scalar::Real;

/// A pair `(A′, A)` with `A` the exact antiderivative of the sampled `A′`.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzData<T> {
    aprime: SampledFunction<T>,
    a: PiecewiseLinear<T>,
    bmo_norm: T,
}

impl<T: Real> LipschitzData<T> {
    /// Builds `A` anchored at `x_min`; the BMO seminorm uses the default search set.
    pub fn new(aprime: SampledFunction<T>) -> Self {
        Self::with_search(aprime, SearchMode::default())
    }

    pub fn with_search(aprime: SampledFunction<T>, mode: SearchMode) -> Self {
        let a = aprime.antiderivative(aprime.grid().x_min()).expect("anchor in domain");
        let bmo_norm = bmo_seminorm(&aprime, mode);
        Self { aprime, a, bmo_norm }
    }

    /// `A′` rescaled so that its BMO seminorm is one (unchanged if constant).
    pub fn normalized(aprime: SampledFunction<T>, mode: SearchMode) -> Self {
        let raw = bmo_seminorm(&aprime, mode);
        if raw > T::zero() {
            let scaled = aprime.scale(raw.recip());
            let mut out = Self::with_search(scaled, mode);
            out.bmo_norm = bmo_seminorm(&out.aprime, mode);
            out
        } else {
            Self::with_search(aprime, mode)
        }
    }

    pub fn aprime(&self) -> &SampledFunction<T> {
        &self.aprime
    }

    pub fn antiderivative(&self) -> &PiecewiseLinear<T> {
        &self.a
    }

    pub fn bmo_norm(&self) -> T {
        self.bmo_norm
    }

    pub fn grid(&self) -> &Grid<T> {
        self.aprime.grid()
    }

    /// `A(x)`.
    pub fn eval(&self, x: T) -> Result<T> {
        self.a.eval(x)
    }

    /// `P₂(A; x, y) = A(x) − A(y) − A′(y)(x − y)`, with `A′(y)` the value on the cell of `y`.
    pub fn p2(&self, x: T, y: T) -> Result<T> {
        let ax = self.a.eval(x)?;
        let ay = self.a.eval(y)?;
        let slope = self.aprime.eval(y)?;
        Ok(ax - ay - slope * (x - y))
    }

    /// `P₂` between the centers of cells `kx` and `ky`.
    #[inline]
    pub fn p2_cells(&self, kx: usize, ky: usize) -> T {
        let g = self.aprime.grid();
        let d = (T::count(kx) - T::count(ky)) * g.h();
        self.a.at_center(kx) - self.a.at_center(ky) - self.aprime.value(ky) * d
    }

    /// `A_I(y) = A(y) − ⟨A′⟩_I·y`.
    pub fn recenter(&self, iv: GridInterval) -> Result<Self> {
        let mean = self.aprime.average(iv)?;
        let g = *self.aprime.grid();
        let nodes = self
            .a
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, &v)| v - mean * g.node(k))
            .collect();
        Ok(Self {
            aprime: self.aprime.map(|v| v - mean),
            a: PiecewiseLinear::from_nodes(g, nodes)?,
            bmo_norm: self.bmo_norm,
        })
    }
}

/// `sup_I ⟨|f − ⟨f⟩_I|⟩_I` over the search set.
pub fn bmo_seminorm<T: Real>(f: &SampledFunction<T>, mode: SearchMode) -> T {
    let prefix = f.prefix_sums();
    let vals = f.values();
    let (best, _) = sup_all(f.grid().full(), mode, |iv| {
        let mean = prefix.average(iv);
        let dev: T = vals[iv.lo()..iv.hi()].iter().map(|&v| (v - mean).abs()).sum();
        dev / T::count(iv.len())
    });
    best.max(T::zero())
}

fn check_arity<T>(m: usize, y: &[T]) -> Result<()> {
    if m == 0 || y.len() != m + 1 {
        return Err(Error::InvalidParameter(format!(
            "kernel of order m = {m} takes m + 1 points, got {}",
            y.len()
        )));
    }
    Ok(())
}

#[inline]
fn open_between<T: Real>(v: T, a: T, b: T) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    lo < v && v < hi
}

/// Sign and power part `(−1)^{m·e(y−x)} (x − y)^{−(m+1)}` of the kernel.
#[inline]
fn signed_power<T: Real>(m: usize, x: T, y_last: T) -> T {
    let d = x - y_last;
    let mag = d.powi(-(m as i32 + 1));
    if y_last >= x && m % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// Multilinear kernel of the `(m+1)`-th commutator,
/// `K(x; y) = (−1)^{m·e(y_{m+1}−x)} (x − y_{m+1})^{−(m+1)} ∏_j χ_{(x∧y_{m+1}, x∨y_{m+1})}(y_j)`.
pub fn kernel_k<T: Real>(m: usize, x: T, y: &[T]) -> Result<T> {
    check_arity(m, y)?;
    let last = y[m];
    if x == last {
        return Err(Error::Singular(x.as_f64()));
    }
    if !y[..m].iter().all(|&yj| open_between(yj, x, last)) {
        return Ok(T::zero());
    }
    Ok(signed_power(m, x, last))
}

/// `K_A(x; y) = K(x; y)·P₂(A; x, y_{m+1})/(x − y_{m+1})`.
pub fn kernel_ka<T: Real>(a: &LipschitzData<T>, m: usize, x: T, y: &[T]) -> Result<T> {
    let k = kernel_k(m, x, y)?;
    if k == T::zero() {
        return Ok(T::zero());
    }
    Ok(k * a.p2(x, y[m])? / (x - y[m]))
}

/// The even bump `φ(u) = exp(1 − 1/(1 − u²))` on `|u| < 1`, zero elsewhere; `φ(0) = 1`.
#[inline]
pub fn bump<T: Real>(u: T) -> T {
    let one = T::one();
    let q = one - u * u;
    if q <= T::zero() {
        return T::zero();
    }
    (one - q.recip()).exp()
}

/// `D_t h(x) = ∫ k_t(x, y) h(y) dy` with `k_t(x, y) = t⁻¹φ′((x − y)/t)·χ_{(x,∞)}(y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxIdentity<T> {
    t: T,
}

impl<T: Real> ApproxIdentity<T> {
    /// Rejects scales below two cells.
    pub fn new(t: T, grid: &Grid<T>) -> Result<Self> {
        let h = grid.h();
        if !(t >= h + h) {
            return Err(Error::ScaleUnresolved { t: t.as_f64(), h: h.as_f64() });
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Kernel mass on `(a, b)`: `∫_a^b k_t(x, y) dy` for the point `x`.
    #[inline]
    fn mass(&self, x: T, a: T, b: T) -> T {
        if b <= x {
            return T::zero();
        }
        let a = a.max(x);
        bump((x - a) / self.t) - bump((x - b) / self.t)
    }

    /// Exact quadrature for piecewise-constant `h`; `(x, x + t]` must lie in the domain.
    pub fn apply(&self, hfun: &SampledFunction<T>, x: T) -> Result<T> {
        let g = hfun.grid();
        if !(x >= g.x_min() && x + self.t <= g.x_max()) {
            return Err(Error::PointOutOfDomain(x.as_f64()));
        }
        let first = g.cell_of(x)?;
        let mut acc = T::zero();
        for k in first..g.n_cells() {
            let a = g.node(k);
            if a >= x + self.t {
                break;
            }
            let v = hfun.value(k);
            if v != T::zero() {
                acc = acc + v * self.mass(x, a, g.node(k + 1));
            }
        }
        Ok(acc)
    }

    /// `D_t h` at every cell center for which the kernel support stays in the domain.
    pub fn apply_field(&self, hfun: &SampledFunction<T>) -> Result<Vec<T>> {
        let g = hfun.grid();
        (0..g.n_cells()).map(|k| self.apply(hfun, g.center(k))).collect()
    }
}

/// `K^j_{A,t}(x; y) = ∫ K_A(x; y₁,…,z,…,y_{m+1}) k_t(z, y_j) dz` with `z` in slot `j` (0-based).
///
/// `K_A` depends on slot `j` only through the indicator `χ_{(x∧y_{m+1}, x∨y_{m+1})}(z)`,
/// so the `z`-integral is the kernel mass of `k_t(·, y_j)` on that interval.
pub fn smoothed_kernel_kaj<T: Real>(
    a: &LipschitzData<T>,
    m: usize,
    t: T,
    j: usize,
    x: T,
    y: &[T],
) -> Result<T> {
    check_arity(m, y)?;
    if j >= m {
        return Err(Error::InvalidParameter(format!("slot {j} is not one of the first {m}")));
    }
    ApproxIdentity::new(t, a.grid())?;
    let last = y[m];
    if x == last {
        return Err(Error::Singular(x.as_f64()));
    }
    let others = y[..m].iter().enumerate().all(|(i, &yi)| i == j || open_between(yi, x, last));
    if !others {
        return Ok(T::zero());
    }
    let (lo, hi) = if x < last { (x, last) } else { (last, x) };
    let yj = y[j];
    let lo = lo.max(yj - t);
    let hi = hi.min(yj);
    if lo >= hi {
        return Ok(T::zero());
    }
    let mass = bump((hi - yj) / t) - bump((lo - yj) / t);
    Ok(signed_power(m, x, last) * a.p2(x, last)? / (x - last) * mass)
}

/// Principal-value cell sum at the center of `kx`, the cell of `x` excluded.
///
/// `prim(j, k)` is `A_j` at the center of cell `k`; `f` is read on `cells`.
fn pv_sum<T: Real>(
    m: usize,
    kx: usize,
    h: T,
    prim: impl Fn(usize, usize) -> T,
    f: &[T],
    cells: std::ops::Range<usize>,
    remainder: Option<&LipschitzData<T>>,
) -> T {
    let mut ax = [T::zero(); 8];
    let mut ax_vec = Vec::new();
    let ax: &mut [T] = if m <= 8 {
        &mut ax[..m]
    } else {
        ax_vec.resize(m, T::zero());
        &mut ax_vec
    };
    for (j, slot) in ax.iter_mut().enumerate() {
        *slot = prim(j, kx);
    }
    let power = m as i32 + 1;
    let xk = T::count(kx);
    let mut acc = T::zero();
    for k in cells {
        let fk = f[k];
        if k == kx || fk == T::zero() {
            continue;
        }
        let d = (xk - T::count(k)) * h;
        let mut num = fk;
        for (j, &axj) in ax.iter().enumerate() {
            num = num * (axj - prim(j, k));
        }
        let mut term = num / d.powi(power);
        if let Some(a) = remainder {
            term = term * a.p2_cells(kx, k) / d;
        }
        acc = acc + term;
    }
    acc * h
}

fn check_commutator_inputs<T: Real>(a_list: &[LipschitzData<T>], f: &SampledFunction<T>) -> Result<()> {
    if a_list.is_empty() {
        return Err(Error::InvalidParameter("commutator needs at least one A_j".into()));
    }
    if a_list.iter().any(|a| !a.grid().same_as(f.grid())) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `C_{m+1}(a₁,…,a_m; f)(x) = p.v. ∫ ∏_j (A_j(x) − A_j(y))/(x − y)^{m+1}·f(y) dy`, `x` snapped to its cell center.
pub fn commutator<T: Real>(a_list: &[LipschitzData<T>], f: &SampledFunction<T>, x: T) -> Result<T> {
    check_commutator_inputs(a_list, f)?;
    let g = f.grid();
    let kx = g.cell_of(x)?;
    let range = f.support().map_or(0..0, |s| s.cells());
    let v = pv_sum(a_list.len(), kx, g.h(), |j, k| a_list[j].a.at_center(k), f.values(), range, None);
    finite(v, "commutator")
}

/// `C_{m+1,A}(a₁,…,a_m; f)(x) = p.v. ∫ P₂(A; x, y) ∏_j (A_j(x) − A_j(y))/(x − y)^{m+2}·f(y) dy`.
pub fn commutator_a<T: Real>(
    a: &LipschitzData<T>,
    a_list: &[LipschitzData<T>],
    f: &SampledFunction<T>,
    x: T,
) -> Result<T> {
    check_commutator_inputs(a_list, f)?;
    if !a.grid().same_as(f.grid()) {
        return Err(Error::GridMismatch);
    }
    let g = f.grid();
    let kx = g.cell_of(x)?;
    let range = f.support().map_or(0..0, |s| s.cells());
    let v = pv_sum(a_list.len(), kx, g.h(), |j, k| a_list[j].a.at_center(k), f.values(), range, Some(a));
    finite(v, "commutator_A")
}

fn finite<T: Real>(v: T, what: &'static str) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteAccumulation(what))
    }
}

/// The commutator as a multi-sublinear evaluator over inputs `(a₁, …, a_m, f)`.
///
/// Restricting the inputs to a window `W` changes both `f` and every `A_j`,
/// since `A_j` is the antiderivative of `a_j χ_W`.
#[derive(Clone, Debug)]
pub struct CommutatorOperator<T> {
    m: usize,
    remainder: Option<LipschitzData<T>>,
}

impl<T: Real> CommutatorOperator<T> {
    /// `C_{m+1}`.
    pub fn plain(m: usize) -> Self {
        Self { m, remainder: None }
    }

    /// `C_{m+1,A}`.
    pub fn with_remainder(m: usize, a: LipschitzData<T>) -> Self {
        Self { m, remainder: Some(a) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn remainder(&self) -> Option<&LipschitzData<T>> {
        self.remainder.as_ref()
    }
}

impl<T: Real> MultiSublinear<T> for CommutatorOperator<T> {
    fn arity(&self) -> usize {
        self.m + 1
    }

    fn eval(&self, inputs: &InputSet<T>, window: GridInterval, cell: usize) -> Result<T> {
        let f_slot = self.m;
        let cells = match inputs.support(f_slot).and_then(|s| s.intersect(&window)) {
            Some(iv) => iv.cells(),
            None => return Ok(T::zero()),
        };
        let h = inputs.grid().h();
        let v = pv_sum(
            self.m,
            cell,
            h,
            |j, k| inputs.primitive_within(j, window, k),
            inputs.function(f_slot).values(),
            cells,
            self.remainder.as_ref(),
        );
        finite(v, "commutator evaluator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Grid<f64> {
        Grid::new(lo, hi, n).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_k(1, 0.0, &[0.5, 1.0]).unwrap(), -1.0);
        assert_eq!(kernel_k(1, 0.0, &[2.0, 1.0]).unwrap(), 0.0);
        assert_eq!(kernel_k(2, 0.0, &[-0.5, -0.5, -1.0]).unwrap(), 1.0);
        assert!(matches!(kernel_k(1, 1.0, &[0.5, 1.0]), Err(Error::Singular(_))));
        assert!(kernel_k(2, 0.0, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn p2_and_kernel_ka_quadratic() {
        let g = grid(-2.0, 2.0, 64);
        let a = LipschitzData::new(g.sample(|x| 2.0 * x));
        // A′(0) is the cell value 2·(h/2), so the quadratic identity holds to O(h).
        assert!((a.p2(1.0, 0.0).unwrap() - 1.0).abs() <= 1.01 * g.h());
        assert!((a.p2(0.0, 1.0 - g.h() / 2.0).unwrap() - (1.0 - g.h() / 2.0).powi(2)).abs() <= g.h() * g.h());
        assert!((kernel_ka(&a, 1, 0.0, &[0.5, 1.0]).unwrap() - 1.0).abs() <= 1.01 * g.h());
        assert_eq!(kernel_ka(&a, 1, 0.0, &[1.5, 1.0]).unwrap(), 0.0);
        let affine = LipschitzData::new(SampledFunction::constant(g, 3.0));
        assert!(affine.p2(1.3, -0.4).unwrap().abs() < 1e-13);
        assert_eq!(affine.bmo_norm(), 0.0);
    }

    #[test]
    fn recenter_removes_mean() {
        let g = grid(-1.0, 1.0, 32);
        let a = LipschitzData::new(g.sample(|x| (3.0 * x).sin() + x));
        let iv = GridInterval::new(4, 20).unwrap();
        let r = a.recenter(iv).unwrap();
        assert!(r.aprime().average(iv).unwrap().abs() < 1e-15);
        for (x, y) in [(0.3, -0.7), (-0.9, 0.1), (0.55, 0.56)] {
            assert!((a.p2(x, y).unwrap() - r.p2(x, y).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
        assert_eq!(bump(0.5), bump(-0.5));
        assert!((bump(0.5) - (1.0f64 - 1.0 / 0.75).exp()).abs() < 1e-16);
    }

    #[test]
    fn approx_identity_examples() {
        let g = grid(0.0, 4.0, 256);
        let d = ApproxIdentity::new(0.5, &g).unwrap();
        let one = SampledFunction::constant(g, 1.0);
        assert!((d.apply(&one, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let left = SampledFunction::indicator(g, 0.0, 1.0).unwrap();
        assert_eq!(d.apply(&left, 1.0).unwrap(), 0.0);
        let near = SampledFunction::indicator(g, 1.0, 1.25).unwrap();
        let expect = bump(0.0) - bump(-0.5);
        assert!((d.apply(&near, 1.0).unwrap() - expect).abs() < 1e-14);
        assert!(d.apply(&one, 3.8).is_err());
        assert!(ApproxIdentity::new(0.02, &g).is_err());
    }

    #[test]
    fn commutator_ln3() {
        let g = grid(-4.0, 4.0, 1024);
        let a1 = LipschitzData::new(SampledFunction::constant(g, 1.0));
        let f = SampledFunction::indicator(g, -1.0, 1.0).unwrap();
        let v = commutator(&[a1], &f, 2.0).unwrap();
        assert!((v - 3f64.ln()).abs() < 2.0 * g.h(), "{v}");
    }

    #[test]
    fn commutator_a_collapses_to_length() {
        let g = grid(-2.0, 2.0, 1024);
        let a = LipschitzData::new(g.sample(|x| 2.0 * x));
        let a1 = LipschitzData::new(SampledFunction::constant(g, 1.0));
        let f = SampledFunction::indicator(g, -1.0, 1.0).unwrap();
        let v = commutator_a(&a, &[a1], &f, 2.0).unwrap();
        assert!((v - 2.0).abs() < 4.0 * g.h(), "{v}");
    }

    #[test]
    fn vanishing_inputs() {
        let g = grid(-2.0, 2.0, 128);
        let a = LipschitzData::new(g.sample(|x| x.cos()));
        let a1 = LipschitzData::new(g.sample(|x| x.sin()));
        let zero = LipschitzData::new(SampledFunction::zeros(g));
        let f = g.sample(|x| (-x * x).exp());
        assert_eq!(commutator(&[a1.clone(), zero.clone()], &f, 0.3).unwrap(), 0.0);
        assert_eq!(commutator_a(&a, std::slice::from_ref(&a1), &SampledFunction::zeros(g), 0.3).unwrap(), 0.0);
        let affine = LipschitzData::new(SampledFunction::constant(g, -2.0));
        assert!(commutator_a(&affine, &[a1], &f, 0.3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn smoothed_kernel_matches_far_from_slot() {
        let g = grid(-4.0, 4.0, 512);
        let a = LipschitzData::new(g.sample(|x| x.sin()));
        let t = 0.1;
        // |y_{m+1} − y_j| > t and |x − y_j| ≥ 2t: the smoothing cannot see the indicator edge.
        let y = [0.8, 1.7];
        let exact = kernel_ka(&a, 1, 0.0, &y).unwrap();
        let smooth = smoothed_kernel_kaj(&a, 1, t, 0, 0.0, &y).unwrap();
        assert!((exact - smooth).abs() <= 1e-14 * exact.abs().max(1.0));
        assert!(smoothed_kernel_kaj(&a, 1, t, 1, 0.0, &y).is_err());
    }
}
