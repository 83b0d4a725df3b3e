use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use xlign_core::alignloss::{evaluate_alignment, optimize_embeddings};
use xlign_core::embedio::{
    load_triple_index, EmbeddingStore, Language, LayerEmbeddings, LayerSelection, Pooling,
    RetrievalConfig, SamplerKind, TripleIndex,
};
use xlign_core::infotheory::{uncertainty_reduction, ConditioningSet, EntropyConfig};
use xlign_core::repsim::{similarity_curve, SimilarityMetric, SvccaOptions};
use xlign_core::report::{emit_tsne_input, run, RunConfig};
use xlign_core::retrieval::{layer_curve_with_outcomes, write_outcomes_csv_file, Direction};
use xlign_core::saliency::{language_saliency, read_attributions};
use xlign_core::scores::{clas_with, consistency_with, PairAccuracies, StdDivisor};
use xlign_core::synthgen::{generate, synthetic_index, LengthDistribution, PlantedModel};

#[derive(Parser)]
#[command(name = "xlign", version, about = "Cross-lingual alignment analysis for EN/HI/code-mixed embeddings")]
struct Cli {
    /// Run seed (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file or directory, depending on the subcommand
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel sections (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Directory of .xeb files with sidecar manifests
    #[arg(long)]
    embeddings: PathBuf,

    /// Triple manifest (default: <embeddings>/triples.json)
    #[arg(long)]
    triples: Option<PathBuf>,

    #[arg(long, default_value = "cls")]
    pooling: Pooling,

    /// Layers: all, 12, 0,6,12 or 0-12
    #[arg(long, alias = "layer", default_value = "all")]
    layers: LayerSelection,
}

impl InputArgs {
    fn store_and_index(&self) -> Result<(EmbeddingStore, TripleIndex)> {
        let triples = self
            .triples
            .clone()
            .unwrap_or_else(|| self.embeddings.join("triples.json"));
        let index = load_triple_index(&triples)?;
        let store = EmbeddingStore::scan(&self.embeddings)?;
        Ok((store, index))
    }

    fn load(&self, store: &EmbeddingStore, lang: Language) -> Result<Vec<LayerEmbeddings>> {
        Ok(store.load_layers(lang, self.pooling, &self.layers)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Length-matched parallel sentence retrieval accuracy per layer
    Retrieve {
        #[command(flatten)]
        input: InputArgs,
        /// Source language (with --tgt); default runs all six directions
        #[arg(long, requires = "tgt")]
        src: Option<Language>,
        #[arg(long, requires = "src")]
        tgt: Option<Language>,
        #[arg(long, default_value_t = 10)]
        negatives: usize,
        /// Half-width of the length-percentile window
        #[arg(long, default_value_t = 5.0)]
        window: f64,
        #[arg(long, default_value = "percentile")]
        sampler: SamplerKind,
        /// Layer used for similarity-weighted sampling (default: last)
        #[arg(long)]
        similarity_layer: Option<u32>,
        /// Directory for per-query outcome CSVs
        #[arg(long)]
        outcomes: Option<PathBuf>,
    },
    /// Linear CKA or SVCCA curve across layers for one language pair
    Repsim {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "cka")]
        metric: SimilarityMetric,
        /// Language pair as a:b
        #[arg(long, default_value = "en:cm")]
        pair: String,
        #[arg(long, default_value_t = 0.99)]
        variance_threshold: f64,
        #[arg(long)]
        k_cap: Option<usize>,
    },
    /// Gaussian uncertainty reduction of CM given EN, HI or both
    Entropy {
        #[command(flatten)]
        input: InputArgs,
        /// Comma list drawn from en, hi, joint
        #[arg(long, default_value = "en,hi,joint", value_delimiter = ',')]
        condition: Vec<ConditioningSet>,
        #[arg(long, default_value_t = 1.0)]
        ridge_lambda: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps_scale: f64,
        /// Project all three languages onto a shared PCA basis of this size
        #[arg(long)]
        pca_dim: Option<usize>,
    },
    /// Language-wise mean rank-inverse saliency from an attribution TSV
    Saliency {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// CLAS breakdown from six directional accuracies
    Clas {
        /// EN→CM, CM→EN, EN→HI, HI→EN, HI→CM, CM→HI in percent
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        acc: Vec<f64>,
        #[arg(long, default_value = "population")]
        divisor: StdDivisorArg,
    },
    /// Mean minus standard deviation of three macro-F1 scores
    Consistency {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        scores: Vec<f64>,
        #[arg(long, default_value = "sample")]
        divisor: StdDivisorArg,
    },
    /// Optimize free embeddings under the alignment loss and evaluate retrieval
    AlignDemo {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        #[arg(long, default_value_t = 10)]
        negatives: usize,
    },
    /// Run every analysis enabled in a JSON config and write a report
    Report {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a sampled embedding matrix with language labels for external t-SNE
    TsneExport {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        sample_size: usize,
    },
    /// Generate planted synthetic embeddings and a triple manifest
    Synth {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        dim: usize,
        #[arg(long, default_value_t = 0.9)]
        w_en: f64,
        #[arg(long, default_value_t = 0.1)]
        w_hi: f64,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        /// Number of layers to generate (0..layers)
        #[arg(long, default_value_t = 1)]
        layers: u32,
        /// Layers whose CM vectors mix EN and HI
        #[arg(long, default_value = "all")]
        aligned: LayerSelection,
        #[arg(long, default_value_t = 5)]
        min_len: u32,
        #[arg(long, default_value_t = 40)]
        max_len: u32,
        #[arg(long, default_value = "cls")]
        pooling: Pooling,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum StdDivisorArg {
    Population,
    Sample,
}

impl From<StdDivisorArg> for StdDivisor {
    fn from(d: StdDivisorArg) -> Self {
        match d {
            StdDivisorArg::Population => StdDivisor::Population,
            StdDivisorArg::Sample => StdDivisor::Sample,
        }
    }
}

/// Write to `out` when given, otherwise to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn parse_pair(s: &str) -> Result<(Language, Language)> {
    let (a, b) = s
        .split_once(':')
        .with_context(|| format!("pair {s:?} must look like en:hi"))?;
    let (a, b): (Language, Language) = (a.parse()?, b.parse()?);
    if a == b {
        bail!("pair {s:?} names the same language twice");
    }
    Ok((a, b))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        anyhow::ensure!(t >= 1, "--threads must be >= 1");
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();

    match cli.command {
        Command::Retrieve { input, src, tgt, negatives, window, sampler, similarity_layer, outcomes } => {
            let cfg = RetrievalConfig {
                num_negatives: negatives,
                percentile_window: window,
                sampler,
                seed,
                similarity_layer,
            };
            cfg.validate()?;
            let dirs = match (src, tgt) {
                (Some(s), Some(t)) => vec![Direction::new(s, t)?],
                _ => Direction::CLAS_ORDER.to_vec(),
            };
            let (store, index) = input.store_and_index()?;
            let mut curves = Vec::new();
            for dir in dirs {
                let s = input.load(&store, dir.source)?;
                let t = input.load(&store, dir.target)?;
                let (curve, results) = layer_curve_with_outcomes(&s, &t, dir, &cfg, &index)?;
                if let Some(dir_out) = &outcomes {
                    fs::create_dir_all(dir_out)?;
                    for r in &results {
                        let name = format!("{}_{}_layer{:02}.csv", dir.source, dir.target, r.layer);
                        write_outcomes_csv_file(&r.outcomes, &dir_out.join(name))?;
                    }
                }
                curves.push(curve);
            }
            let doc = json!({ "seed": seed, "config": cfg, "curves": curves });
            emit(out, &serde_json::to_string_pretty(&doc)?)
        }

        Command::Repsim { input, metric, pair, variance_threshold, k_cap } => {
            let (a, b) = parse_pair(&pair)?;
            let (store, index) = input.store_and_index()?;
            let opts = SvccaOptions { variance_threshold, k_cap };
            let points = similarity_curve(metric, &input.load(&store, a)?, &input.load(&store, b)?, &index, &opts)?;
            let csv = to_csv(
                &["layer", "value"],
                points.iter().map(|p| vec![p.layer.to_string(), p.value.to_string()]),
            )?;
            emit(out, &csv)
        }

        Command::Entropy { input, condition, ridge_lambda, eps_scale, pca_dim } => {
            let cfg = EntropyConfig { ridge_lambda, cov_epsilon_scale: eps_scale, pca_dim };
            let (store, index) = input.store_and_index()?;
            let rows = uncertainty_reduction(
                &input.load(&store, Language::Cm)?,
                &input.load(&store, Language::En)?,
                &input.load(&store, Language::Hi)?,
                &index,
                &cfg,
            )?;
            let csv = to_csv(
                &["layer", "condition", "delta_h"],
                rows.iter().flat_map(|u| {
                    condition
                        .iter()
                        .map(|c| vec![u.layer.to_string(), c.label().to_string(), u.delta(c).to_string()])
                }),
            )?;
            emit(out, &csv)
        }

        Command::Saliency { input } => {
            let summary = language_saliency(&read_attributions(&input)?);
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            emit(out, &serde_json::to_string_pretty(&summary)?)
        }

        Command::Clas { acc, divisor } => {
            let acc = PairAccuracies::from_slice(&acc)?;
            let b = clas_with(&acc, divisor.into());
            emit(out, &serde_json::to_string_pretty(&json!({ "accuracies": acc, "breakdown": b }))?)
        }

        Command::Consistency { scores, divisor } => {
            let s: [f64; 3] = scores.as_slice().try_into().context("expected three scores")?;
            let c = consistency_with(s, divisor.into())?;
            emit(out, &serde_json::to_string_pretty(&json!({ "scores": s, "consistency": c }))?)
        }

        Command::AlignDemo { n, dim, steps, lr, negatives } => {
            let index = synthetic_index(n, &LengthDistribution::default(), 2, seed)?;
            let result = optimize_embeddings(&index, dim, steps, lr, seed)?;
            if let Some(p) = out {
                result.write_csv_file(p)?;
            }
            let eval = evaluate_alignment(&result.batch, &index, negatives, seed)?;
            let last = result.trajectory.last().expect("non-empty");
            let doc = json!({
                "seed": seed,
                "n": n,
                "dim": dim,
                "steps": steps,
                "initial_loss": result.trajectory[0].loss,
                "final_loss": last.loss,
                "final_cosines": last.cosines,
                "retrieval": eval.directions,
                "clas": eval.clas,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(())
        }

        Command::Report { config } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.output_dir = o.to_path_buf();
            }
            match run(&cfg) {
                Ok(report) => {
                    eprintln!(
                        "report written to {}",
                        cfg.output_dir.join(xlign_core::report::REPORT_FILE).display()
                    );
                    println!("{}", serde_json::to_string(&json!({ "status": report.status, "files": report.files }))?);
                    Ok(())
                }
                Err(e) => Err(anyhow::Error::new(e).context("report is partial")),
            }
        }

        Command::TsneExport { input, sample_size } => {
            let (store, index) = input.store_and_index()?;
            let sets = Language::ALL
                .iter()
                .map(|&l| input.load(&store, l)?.pop().context("no layers loaded"))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&LayerEmbeddings> = sets.iter().collect();
            let mut buf = Vec::new();
            emit_tsne_input(&refs, &index, sample_size, seed, &mut buf)?;
            emit(out, std::str::from_utf8(&buf)?)
        }

        Command::Synth { n, dim, w_en, w_hi, sigma, layers, aligned, min_len, max_len, pooling } => {
            let dir = out.context("synth needs --out <dir>")?;
            let model = PlantedModel {
                n,
                d: dim,
                w_en,
                w_hi,
                sigma,
                num_layers: layers,
                aligned_layers: aligned,
                lengths: LengthDistribution::Uniform { min: min_len, max: max_len },
                pooling,
                ..PlantedModel::default()
            };
            generate(&model, seed)?.write_to(dir)?;
            eprintln!("wrote {n} triples x {layers} layers to {}", dir.display());
            Ok(())
        }
    }
}
