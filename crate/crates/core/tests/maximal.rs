use calclab_core::grid::candidate_intervals;
use calclab_core::kernels::commutator_a;
use calclab_core::maximal::{grand_max, hl_max_field, m_orlicz_field, sharp_max, sharp_max_field};
use calclab_core::{CommutatorOperator, Grid, InputSet, LipschitzData, SampledFunction, SearchMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [SearchMode; 3] = [SearchMode::Dyadic, SearchMode::Dilated, SearchMode::Exhaustive];

fn random_function(rng: &mut ChaCha8Rng, g: Grid) -> SampledFunction {
    let vals = (0..g.n_cells())
        .map(|_| if rng.gen_bool(0.3) { rng.gen_range(-4.0..4.0) } else { 0.0 })
        .collect();
    SampledFunction::new(g, vals).unwrap()
}

fn assert_nested(fields: &[Vec<f64>], what: &str) {
    for pair in fields.windows(2) {
        for (k, (a, b)) in pair[0].iter().zip(&pair[1]).enumerate() {
            assert!(a <= b, "{what} decreased at cell {k}: {a} > {b}");
        }
    }
}

#[test]
fn larger_search_sets_never_decrease() {
    let g = Grid::new(-1.0, 1.0, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let f = random_function(&mut rng, g);
        let hl: Vec<_> = MODES.iter().map(|&m| hl_max_field(&f, m).unwrap()).collect();
        let orl: Vec<_> = MODES.iter().map(|&m| m_orlicz_field(&f, 1.0, m).unwrap()).collect();
        let sharp: Vec<_> = MODES.iter().map(|&m| sharp_max_field(&f, 0.1, m).unwrap()).collect();
        assert_nested(&hl, "hl_max");
        assert_nested(&orl, "m_orlicz");
        assert_nested(&sharp, "sharp_max");
        for i in 0..MODES.len() {
            for k in 0..g.n_cells() {
                assert!(orl[i][k] >= hl[i][k] * (1.0 - 1e-9), "m_orlicz below hl_max at cell {k}");
                assert!(sharp[i][k] <= hl[i][k] / 0.1 + 1e-12, "sharp_max above hl_max/s at cell {k}");
            }
        }
    }
}

/// Oscillation of a 0/1 sample: `1/2` once the minority reaches `s·N`, else `0`.
fn indicator_oscillation(ones: usize, len: usize, s: f64) -> f64 {
    if (ones.min(len - ones) as f64) < s * len as f64 {
        0.0
    } else {
        0.5
    }
}

#[test]
fn sharp_max_of_indicator_matches_interval_scan() {
    let g = Grid::new(-4.0, 4.0, 128).unwrap();
    let f = SampledFunction::indicator(g, 0.0, 1.0).unwrap();
    let s = 0.3;
    let k = g.cell_of(0.5).unwrap();
    let mut best: f64 = 0.0;
    for lo in 0..=k {
        for hi in k + 1..=g.n_cells() {
            let ones = (lo..hi).filter(|&c| f.value(c) == 1.0).count();
            best = best.max(indicator_oscillation(ones, hi - lo, s));
        }
    }
    let got = sharp_max(&f, s, 0.5, SearchMode::Exhaustive).unwrap();
    assert_eq!(got, best);
    assert!(got > 0.0 && got <= 1.0);
}

fn bump(c: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| if (x - c).abs() < w { (1.0 - ((x - c) / w).powi(2)).powi(2) } else { 0.0 }
}

/// `sup_{Q ∋ x} sup_{ξ ∈ Q} |C(a; f)(ξ) − C(a χ_W; f χ_W)(ξ)|` with `W = 3^κ Q`.
fn brute_grand_max(a: &LipschitzData, a1: &SampledFunction, f: &SampledFunction, kappa: u32, k: usize, mode: SearchMode) -> f64 {
    let g = f.grid();
    let n = g.n_cells();
    let full_a = [LipschitzData::new(a1.clone())];
    let mut best: f64 = 0.0;
    for q in candidate_intervals(n, Some(k), mode, n * n).unwrap() {
        let w = q.dilate_pow3(kappa, n);
        let local_a = [LipschitzData::new(a1.restrict(w))];
        let local_f = f.restrict(w);
        for xi in q.cells() {
            let x = g.center(xi);
            let full = commutator_a(a, &full_a, f, x).unwrap();
            let local = commutator_a(a, &local_a, &local_f, x).unwrap();
            best = best.max((full - local).abs());
        }
    }
    best
}

#[test]
fn grand_max_matches_double_loop() {
    let g = Grid::new(-4.0, 4.0, 256).unwrap();
    let a = LipschitzData::new(g.sample(|x| (1.5 * x).cos() * bump(0.0, 3.5)(x)));
    let a1 = g.sample(|x| (2.0 * x).sin() * bump(0.3, 2.5)(x));
    let f = g.sample(|x| bump(-0.4, 1.2)(x) + 0.5 * bump(1.1, 0.6)(x));
    let u = CommutatorOperator::with_remainder(1, a.clone());
    let inputs = InputSet::new(vec![a1.clone(), f.clone()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut peak: f64 = 0.0;
    for mode in [SearchMode::Dyadic, SearchMode::Dilated] {
        for _ in 0..10 {
            let k = rng.gen_range(0..g.n_cells());
            let got = grand_max(&u, &inputs, 1, g.center(k), mode).unwrap();
            let want = brute_grand_max(&a, &a1, &f, 1, k, mode);
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "{mode} cell {k}: {got} vs {want}");
            peak = peak.max(want);
        }
    }
    assert!(peak > 0.0);
}
