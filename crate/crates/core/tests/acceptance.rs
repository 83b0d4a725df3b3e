//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! with its tolerance and wall time, then fails if the criterion is not met.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use common::reference::{CLAS_ROWS, CONSISTENCY_ROWS};
use common::{
    brute_percentiles, brute_window, eigen_cca, embeddings, gaussian, gram_cka,
    monotonicity_statistics, naive_retrieval_mismatches, random_orthogonal, simweighted_frequencies,
};
use nalgebra::DMatrix;
use rand::Rng;
use xlign_core::alignloss::{align_loss, align_loss_grad, evaluate_alignment, optimize_embeddings, TripleBatch};
use xlign_core::embedio::{Language, RetrievalConfig, SamplerKind, TripleIndex};
use xlign_core::infotheory::{conditional_entropy, uncertainty_reduction, EntropyConfig};
use xlign_core::repsim::{linear_cka, svcca, PairedRepresentations, SvccaOptions};
use xlign_core::retrieval::{directional_accuracy, Direction, PercentilePool};
use xlign_core::rng::stream;
use xlign_core::saliency::rank_inverse;
use xlign_core::scores::{clas, consistency, consistency_with, PairAccuracies, StdDivisor};
use xlign_core::synthgen::{generate, synthetic_index, LengthDistribution, PlantedModel};

/// Runs `check`, prints the verdict line and panics on failure or overrun.
fn criterion(name: &str, tolerance: &str, budget: Option<Duration>, check: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let over = budget.filter(|b| elapsed > *b);
    let (verdict, detail) = match (&outcome, over) {
        (Ok(d), None) => ("PASS", d.clone()),
        (Ok(d), Some(b)) => ("FAIL", format!("{d}; runtime over budget {b:?}")),
        (Err(e), _) => ("FAIL", e.clone()),
    };
    let budget_txt = budget.map_or(String::new(), |b| format!(", budget {b:?}"));
    println!("[{verdict}] {name} | tolerance {tolerance}{budget_txt} | {elapsed:.2?} | {detail}");
    assert_eq!(verdict, "PASS", "{name}: {detail}");
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn clas_reproduction() {
    criterion("CLAS reproduction (24 rows)", "±0.05", Some(Duration::from_secs(1)), || {
        let mut worst: f64 = 0.0;
        let mut failures = Vec::new();
        for (block, model, acc, expected) in CLAS_ROWS {
            let got = clas(&PairAccuracies::new(*acc).map_err(|e| e.to_string())?).clas;
            let err = (got - expected).abs();
            worst = worst.max(err);
            if err > 0.05 {
                failures.push(format!("{block}/{model}: {got:.4} vs {expected}"));
            }
        }
        ensure(CLAS_ROWS.len() == 24, || format!("expected 24 rows, have {}", CLAS_ROWS.len()))?;
        ensure(failures.is_empty(), || failures.join("; "))?;
        Ok(format!("24/24 rows, worst |err| {worst:.4}"))
    });
}

#[test]
fn consistency_reproduction() {
    criterion(
        "Consistency reproduction (sample std, 84 rows)",
        "±0.001",
        Some(Duration::from_secs(1)),
        || {
            let mut failing = Vec::new();
            let mut explained_by_population = 0;
            for (task, train, model, s, expected) in CONSISTENCY_ROWS {
                let got = consistency(s[0], s[1], s[2]).map_err(|e| e.to_string())?;
                if (got - expected).abs() > 0.001 {
                    let pop = consistency_with(*s, StdDivisor::Population).map_err(|e| e.to_string())?;
                    explained_by_population += usize::from((pop - expected).abs() <= 0.001);
                    failing.push(format!("{task}/{train}/{model}: {got:.4} vs {expected}"));
                }
            }
            let passed = CONSISTENCY_ROWS.len() - failing.len();
            ensure(failing.is_empty(), || {
                let tasks: HashSet<&str> = failing.iter().map(|f| f.split('/').next().unwrap()).collect();
                let mut tasks: Vec<&str> = tasks.into_iter().collect();
                tasks.sort_unstable();
                format!(
                    "{passed}/{} rows; {} rows off (tasks {tasks:?}), {explained_by_population} of them \
                     reproduce with the population divisor; first: {}",
                    CONSISTENCY_ROWS.len(),
                    failing.len(),
                    failing[..failing.len().min(3)].join("; ")
                )
            })?;
            Ok(format!("{passed}/{} rows", CONSISTENCY_ROWS.len()))
        },
    );
}

fn cka_of(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64, String> {
    PairedRepresentations::new(x.clone(), y.clone())
        .and_then(|p| linear_cka(&p))
        .map_err(|e| e.to_string())
}

#[test]
fn cka_suite() {
    criterion("CKA suite", "≤1e-10", Some(Duration::from_secs(5)), || {
        let mut worst_self: f64 = 0.0;
        let mut worst_inv: f64 = 0.0;
        let mut worst_gram: f64 = 0.0;
        for seed in 0..100 {
            let x = gaussian(50, 8, 2 * seed);
            let y = gaussian(50, 8, 2 * seed + 1);
            let base = cka_of(&x, &y)?;
            worst_self = worst_self.max((cka_of(&x, &x)? - 1.0).abs());
            worst_inv = worst_inv.max((cka_of(&(&x * 3.7), &y)? - base).abs());
            worst_inv = worst_inv.max((cka_of(&(&x * random_orthogonal(8, seed)), &y)? - base).abs());
            worst_gram = worst_gram.max((base - gram_cka(&x, &y)).abs());
        }
        let worst = worst_self.max(worst_inv).max(worst_gram);
        ensure(worst <= 1e-10, || {
            format!("self {worst_self:e}, invariance {worst_inv:e}, gram {worst_gram:e}")
        })?;
        Ok(format!(
            "self {worst_self:.1e}, invariance {worst_inv:.1e}, feature vs gram {worst_gram:.1e} over 100 instances"
        ))
    });
}

#[test]
fn svcca_oracle() {
    criterion("SVCCA oracle and invertible-map invariance", "≤1e-8", None, || {
        let full = SvccaOptions { variance_threshold: 1.0, k_cap: None };
        let run = |x: &DMatrix<f64>, y: &DMatrix<f64>| {
            PairedRepresentations::new(x.clone(), y.clone())
                .and_then(|p| svcca(&p, &full))
                .map(|r| r.value)
                .map_err(|e| e.to_string())
        };
        let mut worst_oracle: f64 = 0.0;
        let mut worst_map: f64 = 0.0;
        for seed in 0..50 {
            let x = gaussian(20, 4, 3 * seed);
            let y = &x * gaussian(4, 4, 3 * seed + 1) * 0.3 + gaussian(20, 4, 3 * seed + 2);
            let rho = eigen_cca(&x, &y);
            let oracle = rho.iter().sum::<f64>() / rho.len() as f64;
            let value = run(&x, &y)?;
            worst_oracle = worst_oracle.max((value - oracle).abs());
            let a = gaussian(4, 4, 1000 + seed) + DMatrix::identity(4, 4) * 2.0;
            let b = gaussian(4, 4, 2000 + seed) + DMatrix::identity(4, 4) * 2.0;
            worst_map = worst_map.max((run(&(&x * a), &(&y * b))? - value).abs());
        }
        ensure(worst_oracle <= 1e-8 && worst_map <= 1e-8, || {
            format!("oracle {worst_oracle:e}, invariance {worst_map:e}")
        })?;
        Ok(format!("oracle {worst_oracle:.1e}, invariance {worst_map:.1e} over 50 instances of 20x4"))
    });
}

fn correlated(n: usize, d: usize, seed: u64) -> (TripleIndex, [DMatrix<f64>; 3]) {
    let index = synthetic_index(n, &LengthDistribution::default(), 2, seed).unwrap();
    let base = gaussian(n, d, seed);
    let mats = [1u64, 2, 3].map(|k| &base + gaussian(n, d, seed * 10 + k) * 0.8);
    (index, mats)
}

fn pos(l: Language) -> usize {
    Language::ALL.iter().position(|&x| x == l).unwrap()
}

#[test]
fn retrieval_oracle_chance_and_determinism() {
    criterion(
        "Retrieval oracle, one-hot, chance, thread determinism",
        "exact; chance |acc - 1/11| ≤ 0.02",
        Some(Duration::from_secs(30)),
        || {
            let (index, mats) = correlated(200, 12, 4);
            for sampler in [SamplerKind::Percentile, SamplerKind::SimWeighted] {
                let cfg = RetrievalConfig { sampler, seed: 3, ..RetrievalConfig::default() };
                for dir in Direction::CLAS_ORDER {
                    let src = embeddings(dir.source, 0, &mats[pos(dir.source)]);
                    let tgt = embeddings(dir.target, 0, &mats[pos(dir.target)]);
                    let res = directional_accuracy(&src, &tgt, dir, &cfg, &index, None).map_err(|e| e.to_string())?;
                    let bad = naive_retrieval_mismatches(&src, &tgt, &index, &cfg, &res);
                    ensure(bad == 0, || format!("{dir} {sampler:?}: {bad} disagreements with oracle"))?;
                }
            }

            let eye = DMatrix::<f64>::identity(100, 100);
            let idx100 = synthetic_index(100, &LengthDistribution::default(), 2, 1).unwrap();
            for dir in Direction::CLAS_ORDER {
                let r = directional_accuracy(
                    &embeddings(dir.source, 0, &eye),
                    &embeddings(dir.target, 0, &eye),
                    dir,
                    &RetrievalConfig::default(),
                    &idx100,
                    None,
                )
                .map_err(|e| e.to_string())?;
                ensure(r.accuracy == 1.0, || format!("one-hot {dir}: {}", r.accuracy))?;
            }

            let big = synthetic_index(2000, &LengthDistribution::default(), 2, 6).unwrap();
            let dir = Direction::CLAS_ORDER[0];
            let chance = directional_accuracy(
                &embeddings(dir.source, 0, &gaussian(2000, 64, 61)),
                &embeddings(dir.target, 0, &gaussian(2000, 64, 62)),
                dir,
                &RetrievalConfig::default(),
                &big,
                None,
            )
            .map_err(|e| e.to_string())?
            .accuracy;
            ensure((chance - 1.0 / 11.0).abs() <= 0.02, || format!("chance accuracy {chance}"))?;

            let run = |threads: usize| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                pool.install(|| {
                    Direction::CLAS_ORDER
                        .iter()
                        .map(|&dir| {
                            let cfg = RetrievalConfig { sampler: SamplerKind::SimWeighted, ..RetrievalConfig::default() };
                            let src = embeddings(dir.source, 0, &mats[pos(dir.source)]);
                            let tgt = embeddings(dir.target, 0, &mats[pos(dir.target)]);
                            directional_accuracy(&src, &tgt, dir, &cfg, &index, None).unwrap()
                        })
                        .collect::<Vec<_>>()
                })
            };
            ensure(run(1) == run(8), || "outputs differ between 1 and 8 threads".into())?;
            Ok(format!("oracle exact on n=200 (12 runs), one-hot 1.0, chance {chance:.4}, 1 vs 8 threads identical"))
        },
    );
}

#[test]
fn negative_sampler_contracts() {
    criterion("Negative-sampler contracts", "exact windows; p < 0.01", None, || {
        let lengths = LengthDistribution::Bimodal { short: (3, 8), long: (60, 90), p_short: 0.7 };
        let index = synthetic_index(300, &lengths, 1, 8).unwrap();
        let cfg = RetrievalConfig { percentile_window: 1.0, ..RetrievalConfig::default() };
        let mut checked = 0;
        for dir in Direction::CLAS_ORDER {
            let pool = PercentilePool::new(&index, dir).map_err(|e| e.to_string())?;
            let src = brute_percentiles(&index.lengths(dir.source));
            let tgt = brute_percentiles(&index.lengths(dir.target));
            for q in 0..index.len() {
                let (w, got) = pool.eligible(q, &cfg).map_err(|e| e.to_string())?;
                let (bw, expected) = brute_window(&src, &tgt, q, &cfg).ok_or("brute force found no window")?;
                let got: HashSet<usize> = got.into_iter().collect();
                ensure(w == bw && got == expected, || format!("{dir} q={q}: width {w} vs {bw}"))?;
                let mut rng = xlign_core::retrieval::query_rng(cfg.seed, dir, 0, q);
                let negs: HashSet<usize> =
                    pool.sample_uniform(q, &cfg, &mut rng).map_err(|e| e.to_string())?.into_iter().collect();
                ensure(negs.len() == cfg.num_negatives && negs.is_subset(&expected), || {
                    format!("{dir} q={q}: invalid negatives")
                })?;
                checked += 1;
            }
        }
        let freq = simweighted_frequencies(1000);
        let (z, t) = monotonicity_statistics(&freq);
        ensure(freq[0] == 0 && z > 2.326 && t > 2.326, || {
            format!("monotonicity not significant: z {z:.2}, rank t {t:.2}")
        })?;
        Ok(format!("{checked} windows match brute force; 1000 draws: tercile z {z:.1}, rank t {t:.1}"))
    });
}

#[test]
fn entropy_estimator() {
    criterion(
        "Entropy estimator",
        "H(X|Z) within 2%; ΔH ordering",
        Some(Duration::from_secs(60)),
        || {
            let (d, sigma) = (4usize, 0.1f64);
            let z = gaussian(5000, d, 1);
            let x = &z * gaussian(d, d, 2) + gaussian(5000, d, 3) * sigma;
            let h = conditional_entropy(&x, &z, &EntropyConfig::default()).map_err(|e| e.to_string())?;
            let truth = d as f64 / 2.0 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma * sigma).ln();
            let rel = ((h - truth) / truth).abs();
            ensure(rel < 0.02, || format!("H(X|Z) {h:.4} vs {truth:.4} (rel {rel:.4})"))?;

            let cfg = EntropyConfig::default();
            let fixtures = [(0.9, 0.1, 0.1), (0.5, 0.5, 0.2), (0.1, 0.9, 0.1), (0.7, 0.0, 0.5), (0.3, 0.3, 1.0)];
            let mut layers = 0;
            for (k, &(w_en, w_hi, sigma)) in fixtures.iter().enumerate() {
                let model = PlantedModel { n: 2000, d: 8, w_en, w_hi, sigma, num_layers: 2, ..PlantedModel::default() };
                let c = generate(&model, 20 + k as u64).map_err(|e| e.to_string())?;
                for r in uncertainty_reduction(&c.cm, &c.en, &c.hi, &c.index, &cfg).map_err(|e| e.to_string())? {
                    if k == 0 {
                        ensure(r.delta_en > r.delta_hi, || format!("0.9/0.1: ΔH_en {} ≤ ΔH_hi {}", r.delta_en, r.delta_hi))?;
                    }
                    ensure(r.delta_joint >= r.delta_en.max(r.delta_hi), || {
                        format!("{w_en}/{w_hi}/{sigma} layer {}: joint {} < max", r.layer, r.delta_joint)
                    })?;
                    layers += 1;
                }
            }
            Ok(format!("H(X|Z) {h:.5} vs {truth:.5} (rel err {rel:.2e}); ordering holds on {layers} planted layers"))
        },
    );
}

#[test]
fn alignment_objective() {
    criterion(
        "Alignment objective gradient and demo",
        "FD rel < 1e-4; loss < 0.01, six directions > 0.99, CLAS > 95",
        Some(Duration::from_secs(60)),
        || {
            let h = 1e-5;
            let mut worst: f64 = 0.0;
            for seed in 0..20 {
                let mut rng = stream(&[0xfd, seed]);
                let mats: Vec<DMatrix<f64>> =
                    (0..3).map(|_| DMatrix::from_fn(8, 16, |_, _| rng.random_range(-1.0..1.0))).collect();
                let batch = TripleBatch::new(&mats[0], &mats[1], &mats[2]).map_err(|e| e.to_string())?;
                let g = align_loss_grad(&batch);
                for (k, gm) in [&g.e, &g.h, &g.c].into_iter().enumerate() {
                    for i in 0..8 {
                        for t in 0..16 {
                            let shifted = |delta: f64| {
                                let mut m = mats.clone();
                                m[k][(i, t)] += delta;
                                align_loss(&TripleBatch::new(&m[0], &m[1], &m[2]).unwrap())
                            };
                            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
                            let rel = (fd - gm[(i, t)]).abs() / fd.abs().max(gm[(i, t)].abs()).max(1e-6);
                            worst = worst.max(rel);
                        }
                    }
                }
            }
            ensure(worst < 1e-4, || format!("finite-difference rel err {worst:e}"))?;

            let index = synthetic_index(200, &LengthDistribution::default(), 2, 7).map_err(|e| e.to_string())?;
            let run = optimize_embeddings(&index, 32, 500, 0.5, 7).map_err(|e| e.to_string())?;
            let eval = evaluate_alignment(&run.batch, &index, 10, 7).map_err(|e| e.to_string())?;
            let loss = run.final_loss();
            ensure(loss < 0.01, || format!("final loss {loss}"))?;
            ensure(eval.directions.len() == 6 && eval.min_accuracy() > 0.99, || {
                format!("min direction accuracy {}", eval.min_accuracy())
            })?;
            ensure(eval.clas.clas > 95.0, || format!("CLAS {}", eval.clas.clas))?;
            Ok(format!(
                "FD worst {worst:.1e}; demo loss {loss:.2e}, min accuracy {:.3}, CLAS {:.2}",
                eval.min_accuracy(),
                eval.clas.clas
            ))
        },
    );
}

#[test]
fn rank_inverse_contract() {
    criterion("Rank-inverse saliency", "exact", None, || {
        let cases: [(&[f64], &[f64]); 3] = [
            (&[0.5, 0.2, 0.9], &[0.5, 1.0 / 3.0, 1.0]),
            (&[-0.9, 0.5], &[1.0, 0.5]),
            (&[0.4, 0.4], &[1.0, 0.5]),
        ];
        for (scores, expected) in cases {
            let got = rank_inverse(scores).map_err(|e| e.to_string())?;
            ensure(got == expected, || format!("{scores:?} -> {got:?}"))?;
        }
        let mut sentences = 0;
        for seed in 0..200u64 {
            let mut rng = stream(&[0x51, seed]);
            let len = rng.random_range(1..40);
            let scores: Vec<f64> = (0..len).map(|_| rng.random_range(-5.0..5.0)).collect();
            let base = rank_inverse(&scores).map_err(|e| e.to_string())?;
            ensure(base.iter().filter(|&&r| r == 1.0).count() == 1, || format!("seed {seed}: top count"))?;
            ensure(base.iter().all(|&r| r > 0.0 && r <= 1.0), || format!("seed {seed}: range"))?;
            for c in [-4.0, -1.0, 0.5, 8.0, 1024.0] {
                let scaled: Vec<f64> = scores.iter().map(|s| s * c).collect();
                ensure(rank_inverse(&scaled).map_err(|e| e.to_string())? == base, || {
                    format!("seed {seed}: not invariant to scale {c}")
                })?;
            }
            sentences += 1;
        }
        Ok(format!("definitional examples exact; {sentences} random sentences scale-invariant with one top token"))
    });
}
