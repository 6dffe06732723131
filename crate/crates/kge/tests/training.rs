use bcg_core::facts::Dataset;
use bcg_core::logic::Symbols;
use bcg_kge::{loss_and_grad, train, EmbeddingModel, Example, Gradient, ModelKind, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

fn vocab(entities: usize, relations: usize) -> Symbols {
    let mut s = Symbols::new();
    for r in 0..relations {
        s.intern_predicate(&format!("r{r}"), 2).unwrap();
    }
    for e in 0..entities {
        s.intern_constant(&format!("e{e}"));
    }
    s
}

/// Central differences on the loss alone, compared with the analytic gradient.
fn max_relative_error(kind: ModelKind, seed: u64, l2: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.random_range(1..=8);
    let mut model = EmbeddingModel::new(kind, dim, &vocab(6, 3), seed);
    let examples: Vec<Example> = (0..12)
        .map(|i| Example {
            s: rng.random_range(0..6),
            r: rng.random_range(0..3),
            o: rng.random_range(0..6),
            label: (i % 2) as f64,
        })
        .collect();
    let mut grad = Gradient::zeros_like(&model);
    loss_and_grad(&model, &examples, l2, &mut grad);
    let mut scratch = Gradient::zeros_like(&model);
    let h = 1e-6;
    let parts = if kind == ModelKind::ComplEx { vec![0, 1, 2, 3] } else { vec![0, 2] };
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let part = parts[rng.random_range(0..parts.len())];
        let idx = rng.random_range(0..model.params()[part].len());
        let orig = model.params()[part][idx];
        model.params_mut()[part][idx] = orig + h;
        let up = loss_and_grad(&model, &examples, l2, &mut scratch);
        model.params_mut()[part][idx] = orig - h;
        let down = loss_and_grad(&model, &examples, l2, &mut scratch);
        model.params_mut()[part][idx] = orig;
        let numeric = (up - down) / (2.0 * h);
        let analytic = grad.parts[part][idx];
        let scale = analytic.abs().max(numeric.abs());
        if scale > 1e-7 {
            worst = worst.max((analytic - numeric).abs() / scale);
        } else {
            worst = worst.max((analytic - numeric).abs());
        }
    }
    worst
}

#[test]
fn gradients_match_finite_differences() {
    for seed in 0..10 {
        assert!(max_relative_error(ModelKind::ComplEx, seed, 0.0) < 1e-4, "seed {seed}");
        assert!(max_relative_error(ModelKind::DistMult, seed, 0.0) < 1e-4, "seed {seed}");
        assert!(max_relative_error(ModelKind::ComplEx, seed, 0.05) < 1e-4, "seed {seed}");
    }
}

fn countries_s1() -> (Symbols, Dataset) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/countries/s1");
    let mut symbols = Symbols::new();
    let data = Dataset::load_dir(&dir, &mut symbols).unwrap();
    (symbols, data)
}

#[test]
fn loss_decreases_and_is_reproducible() {
    let (symbols, data) = countries_s1();
    let cfg = TrainConfig {
        epochs: 10,
        seed: 5,
        ..TrainConfig::default()
    };
    let run = || {
        let mut m = EmbeddingModel::new(cfg.kind, cfg.dim, &symbols, cfg.seed);
        let losses = train(&mut m, &data.train, &cfg).unwrap();
        (m, losses)
    };
    let (m1, l1) = run();
    let (m2, l2) = run();
    assert!(l1.last().unwrap() < l1.first().unwrap());
    assert_eq!(l1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), l2.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    assert_eq!(m1, m2);
    assert!(m1.is_finite());
}

#[test]
fn diverging_training_is_reported() {
    let (symbols, data) = countries_s1();
    let cfg = TrainConfig {
        dim: 4,
        epochs: 50,
        lr: 1e300,
        ..TrainConfig::default()
    };
    let mut m = EmbeddingModel::new(cfg.kind, cfg.dim, &symbols, 0);
    let err = train(&mut m, &data.train, &cfg).unwrap_err();
    assert!(matches!(err, bcg_kge::TrainError::NonFinite { .. }), "{err}");
}
