mod common;

use std::path::Path;
use std::sync::OnceLock;

use phrasebound::lasso::{fit_lasso, lambda_grid, predict, select_lambda, Gram, SolverOptions};
use phrasebound::prosody::{boundary_measures, measure_regions};
use phrasebound::stimuli::{generate_garden_path, parse_garden_path_tsv, ConditionedStimulus};
use phrasebound::textgrid::{extract_pauses, match_tokens};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn garden_path() -> &'static [ConditionedStimulus] {
    static GP: OnceLock<Vec<ConditionedStimulus>> = OnceLock::new();
    GP.get_or_init(|| {
        let tsv = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/garden_path_items.tsv")).unwrap();
        generate_garden_path(&parse_garden_path_tsv(&tsv).unwrap()).unwrap()
    })
}

fn design(n: usize, p: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let y = x.iter().map(|r| 2.0 * r[0] - r[1] + 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
    (x, y)
}

fn l1(beta: &[f64]) -> f64 {
    beta.iter().map(|b| b.abs()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l1_norm_shrinks_with_lambda(seed in 0u64..1000, p in 2usize..8, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (x, y) = design(80, p, seed);
        let g = Gram::new(&x, &y).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let lm = g.lambda_max();
        let opts = SolverOptions::default();
        let small = g.solve(lo * lm, None, opts).unwrap();
        let large = g.solve(hi * lm, None, opts).unwrap();
        prop_assert!(l1(&small.beta) >= l1(&large.beta) - 1e-6, "{} < {}", l1(&small.beta), l1(&large.beta));
    }

    #[test]
    fn duplicated_column_splits_or_drops(seed in 0u64..1000) {
        let (mut x, y) = design(120, 4, seed);
        for row in &mut x {
            row.push(row[0]);
        }
        let g = Gram::new(&x, &y).unwrap();
        // Near the top of the path only one copy may enter.
        let fit = g.solve(0.9 * g.lambda_max(), None, SolverOptions::default()).unwrap();
        let active = [fit.beta[0], fit.beta[4]].iter().filter(|b| b.abs() > 1e-9).count();
        prop_assert!(active <= 1 || (fit.beta[0] - fit.beta[4]).abs() < 1e-6, "{:?}", fit.beta);
    }

    #[test]
    fn pause_measure_agrees_with_pause_list(idx in 0usize..180, seed in 0u64..3, mask in any::<u32>(), threshold in 0.0f64..0.2) {
        let s = &garden_path()[idx];
        let a = common::speak(s, seed, &|i| if mask >> (i % 32) & 1 == 1 { 0.05 + 0.01 * (i % 7) as f64 } else { 0.0 });
        let ta = match_tokens(s, &a, threshold).unwrap();
        let pauses = extract_pauses(&a, threshold);
        for pos in 0..s.words().len() - 1 {
            let m = boundary_measures(s, &ta, pos, seed).unwrap();
            let listed = pauses.iter().any(|p| p.after_word == pos);
            prop_assert_eq!(m.pause_dur > 0.0, listed, "pos {}", pos);
            prop_assert!((m.pre_word_dur_per_syll * f64::from(m.syllables) - m.pre_word_dur).abs() <= 1e-9);
        }
    }

    #[test]
    fn matched_pairs_increase(idx in 0usize..180, seed in 0u64..3, mask in any::<u32>()) {
        let s = &garden_path()[idx];
        let a = common::speak(s, seed, &|i| if mask >> (i % 32) & 1 == 1 { 0.2 } else { 0.0 });
        let ta = match_tokens(s, &a, 0.01).unwrap();
        prop_assert_eq!(ta.pairs.len(), s.words().len());
        for w in ta.pairs.windows(2) {
            prop_assert!(w[0].0 < w[1].0 && w[0].1.start < w[1].1.start);
        }
    }

    #[test]
    fn regions_plus_pauses_cover_speech(idx in 0usize..180, seed in 0u64..3, mask in any::<u32>()) {
        let s = &garden_path()[idx];
        let a = common::speak(s, seed, &|i| if mask >> (i % 32) & 1 == 1 { 0.003 + 0.1 * (i % 3) as f64 } else { 0.0 });
        let ta = match_tokens(s, &a, 0.01).unwrap();
        let r = measure_regions(s, &ta, seed).unwrap();
        let span = ta.pairs.last().unwrap().1.end - ta.pairs[0].1.start;
        prop_assert!((r.total() - span).abs() <= 1e-6, "{} vs {}", r.total(), span);
    }
}

#[test]
fn duplicated_column_does_not_hurt_test_error() {
    let opts = SolverOptions::default();
    let mut worse = 0;
    for seed in 0..20 {
        let (x, y) = design(200, 5, seed);
        let dup: Vec<Vec<f64>> = x.iter().map(|r| r.iter().copied().chain([r[0]]).collect()).collect();
        let (train, test) = (0..160, 160..200);
        let mse = |x: &[Vec<f64>]| {
            let (xt, yt) = (&x[train.clone()], &y[train.clone()]);
            let grid = lambda_grid(Gram::new(xt, yt).unwrap().lambda_max(), 50, 1e-4);
            let cv = select_lambda(xt, yt, &grid, 5, 13, true, opts).unwrap();
            let fit = fit_lasso(xt, yt, cv.lambda_min, opts).unwrap();
            let pred = predict(&fit, &x[test.clone()]);
            pred.iter().zip(&y[test.clone()]).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / 40.0
        };
        let (base, with_dup) = (mse(&x), mse(&dup));
        if with_dup > base * 1.02 + 1e-9 {
            worse += 1;
        }
    }
    assert_eq!(worse, 0);
}
