use approx::assert_relative_eq;
use calclab_core::weights::{ainf_constant, ap_constant, multi_ap_constant};
use calclab_core::{Grid, SampledFunction, SearchMode, Weight, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_weight(rng: &mut ChaCha8Rng, g: Grid) -> Weight {
    let vals = (0..g.n_cells()).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
    Weight::new(SampledFunction::new(g, vals).unwrap()).unwrap()
}

#[test]
fn constants_are_at_least_one() {
    let g = Grid::new(-1.0, 1.0, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let w1 = random_weight(&mut rng, g);
        let w2 = random_weight(&mut rng, g);
        for mode in [SearchMode::Dyadic, SearchMode::Exhaustive] {
            assert!(ap_constant(&w1, 2.0, mode).unwrap() >= 1.0 - 1e-12);
            assert!(ap_constant(&w1, 3.0, mode).unwrap() >= 1.0 - 1e-12);
            assert!(ainf_constant(&w1, mode).unwrap() >= 1.0 - 1e-12);
            let wv = WeightVector::new(vec![w1.clone(), w2.clone()], vec![2.0, 1.5]).unwrap();
            assert!(multi_ap_constant(&wv, mode).unwrap() >= 1.0 - 1e-12);
        }
    }
}

#[test]
fn scaling_leaves_constants_unchanged() {
    let g = Grid::new(-1.0, 1.0, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let w1 = random_weight(&mut rng, g);
    let w2 = random_weight(&mut rng, g);
    let mode = SearchMode::Dilated;
    for c in [1e-3, 0.7, 42.0] {
        let scaled = w1.scale(c).unwrap();
        assert_relative_eq!(ap_constant(&scaled, 2.0, mode).unwrap(), ap_constant(&w1, 2.0, mode).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(ainf_constant(&scaled, mode).unwrap(), ainf_constant(&w1, mode).unwrap(), max_relative = 1e-12);
        let wv = WeightVector::new(vec![w1.clone(), w2.clone()], vec![3.0, 1.0]).unwrap();
        let base = multi_ap_constant(&wv, mode).unwrap();
        for k in 0..2 {
            assert_relative_eq!(multi_ap_constant(&wv.scale_slot(k, c).unwrap(), mode).unwrap(), base, max_relative = 1e-12);
        }
    }
}

#[test]
fn multi_ap_matches_exhaustive_scan() {
    let g = Grid::new(-1.0, 1.0, 256).unwrap();
    let w = Weight::power(g, 0.0, 0.5).unwrap();
    let wv = WeightVector::new(vec![w.clone(), w.clone()], vec![2.0, 2.0]).unwrap();
    // p = 1, ν = w and σ₁ = σ₂ = 1/w, so the constant is sup ⟨w⟩⟨1/w⟩.
    let v = w.values();
    let mut best: f64 = 0.0;
    for lo in 0..v.len() {
        let (mut sw, mut si) = (0.0, 0.0);
        for (len, &x) in v[lo..].iter().enumerate() {
            sw += x;
            si += x.recip();
            let n = (len + 1) as f64;
            best = best.max(sw / n * si / n);
        }
    }
    let got = multi_ap_constant(&wv, SearchMode::Exhaustive).unwrap();
    assert!(got.is_finite() && got >= 1.0);
    assert_relative_eq!(got, best, max_relative = 1e-12);
    assert!(multi_ap_constant(&wv, SearchMode::Dyadic).unwrap() <= got);
}

#[test]
fn ainf_grows_with_power() {
    let g = Grid::new(-1.0, 1.0, 128).unwrap();
    let low = ainf_constant(&Weight::power(g, 0.0, 0.25).unwrap(), SearchMode::Dilated).unwrap();
    let high = ainf_constant(&Weight::power(g, 0.0, 0.5).unwrap(), SearchMode::Dilated).unwrap();
    assert!(low >= 1.0 && low <= high);
}
