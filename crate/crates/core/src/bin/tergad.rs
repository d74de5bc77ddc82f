use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tergad::embed::{embed_texts, read_embeddings, write_embeddings, zscore_columns};
use tergad::error::{Error, Result};
use tergad::features::{profiles_to_csv, ProfileConfig};
use tergad::metrics::{aggregate_seeds, evaluate, parse_scores_csv, pr_curve, roc_curve, table_csv};
use tergad::model::{load_checkpoint, save_checkpoint, score, scores_to_csv, train, Hyperparams};
use tergad::narrate::{corpus_from_tsv, corpus_to_tsv, render_corpus, ContentFlag, Style};
use tergad::perturb::inject;
use tergad::pipeline::{
    format_table, load_base, model_inputs, profile_dataset, run_ablation, run_pipeline,
    ProviderConfig, RunConfig, Variant,
};
use tergad::{load_dataset, plot, save_dataset, Dataset};

/// Text-enhanced graph anomaly detection.
#[derive(Parser)]
#[command(name = "tergad", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Run a single seed (overrides the config's seed list).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Embedding service endpoint; falls back to TERGAD_EMBED_ENDPOINT.
    #[arg(long, global = true)]
    endpoint: Option<String>,
    /// -v info, -vv debug, -vvv trace.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Also render ROC and PR curves as SVG.
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DatasetArg {
    /// Dataset manifest (TOML).
    #[arg(short, long)]
    dataset: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Narrative,
    Profile,
}

#[derive(Subcommand)]
enum Command {
    /// Structural profile of every node.
    Profile(DatasetArg),
    /// Render one narrative per node.
    Narrate {
        #[command(flatten)]
        data: DatasetArg,
        #[arg(long, value_enum)]
        style: Option<StyleArg>,
        /// Shuffle sentence order with this seed.
        #[arg(long)]
        shuffle_seed: Option<u64>,
        /// Content to leave out: deg, tc, kcore, cen, tophub.
        #[arg(long, value_delimiter = ',')]
        without: Vec<String>,
    },
    /// Embed a narratives file (node_id<TAB>text per line).
    Embed {
        #[arg(short, long)]
        narratives: PathBuf,
        /// Use the remote service with this dimension instead of the
        /// configured provider.
        #[arg(long)]
        remote_dim: Option<usize>,
        /// Write z-scored instead of raw vectors.
        #[arg(long)]
        standardize: bool,
        /// Output file name (.csv or binary otherwise).
        #[arg(long, default_value = "embeddings.csv")]
        file: String,
    },
    /// Inject anomalies and write the labelled dataset plus a report.
    Inject {
        /// Dataset manifest; the configured synthetic graph when omitted.
        #[arg(short, long)]
        dataset: Option<PathBuf>,
        #[arg(long, conflicts_with = "ratio")]
        count: Option<usize>,
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Train a model and save a checkpoint.
    Train {
        #[command(flatten)]
        data: DatasetArg,
        /// Raw embeddings; omit for the attribute-only model.
        #[arg(short, long)]
        embeddings: Option<PathBuf>,
    },
    /// Score nodes with a trained checkpoint.
    Score {
        #[command(flatten)]
        data: DatasetArg,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(short, long)]
        embeddings: Option<PathBuf>,
    },
    /// Metrics for one or more labelled score files (one per seed).
    Evaluate {
        #[arg(required = true)]
        scores: Vec<PathBuf>,
    },
    /// Full run for every configured seed.
    Pipeline {
        /// Variant to run (overrides the config).
        #[arg(long)]
        variant: Option<String>,
    },
    /// Paired comparison of several variants on shared injected data.
    Ablate {
        #[arg(long, value_delimiter = ',', required = true)]
        variants: Vec<String>,
    },
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn out_dir(cli: &Cli, cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cli.output.clone().unwrap_or_else(|| cfg.output_dir.clone());
    fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    Ok(dir)
}

fn first_seed(cfg: &RunConfig) -> u64 {
    cfg.seeds[0]
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.output {
        cfg.output_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seeds = vec![s];
    }
    cfg.plot |= cli.plot;
    Ok(cfg)
}

/// Standardized embeddings for `ds`, if a file is given.
fn semantic(path: Option<&Path>, ds: &Dataset) -> Result<Option<ndarray::Array2<f64>>> {
    let Some(path) = path else { return Ok(None) };
    let m = read_embeddings(path)?;
    if m.nrows() != ds.n() {
        return Err(Error::RowCountMismatch {
            what: format!("embeddings in {}", path.display()),
            expected: ds.n(),
            found: m.nrows(),
        });
    }
    zscore_columns(&m).map(Some)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let seed = first_seed(&cfg);
    match &cli.command {
        Command::Profile(d) => {
            let ds = load_dataset(&d.dataset)?;
            let (profiles, summary) = profile_dataset(&ds, seed, &cfg.profile);
            let dir = out_dir(cli, &cfg)?;
            write(&dir.join("profiles.csv"), profiles_to_csv(&profiles))?;
            write(
                &dir.join("summary.json"),
                serde_json::to_string_pretty(&summary).expect("serializes"),
            )?;
            println!("{} nodes profiled into {}", profiles.len(), dir.display());
        }
        Command::Narrate {
            data,
            style,
            shuffle_seed,
            without,
        } => {
            let ds = load_dataset(&data.dataset)?;
            let mut ncfg = cfg.narration.clone();
            if let Some(s) = style {
                ncfg.style = match s {
                    StyleArg::Narrative => Style::Narrative,
                    StyleArg::Profile => Style::Profile,
                };
            }
            if shuffle_seed.is_some() {
                ncfg.shuffle_seed = *shuffle_seed;
            }
            for w in without {
                let flag = ContentFlag::parse(w)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown content flag {w:?}")))?;
                ncfg = ncfg.without(flag);
            }
            let (profiles, summary) = profile_dataset(
                &ds,
                seed,
                &ProfileConfig {
                    hub_top_h: ncfg.hub_top_h,
                    ..cfg.profile.clone()
                },
            );
            let corpus = render_corpus(&profiles, &summary, &ncfg)?;
            let dir = out_dir(cli, &cfg)?;
            write(&dir.join("narratives.tsv"), corpus_to_tsv(&corpus))?;
            println!("{} narratives written to {}", corpus.len(), dir.display());
        }
        Command::Embed {
            narratives,
            remote_dim,
            standardize,
            file,
        } => {
            let text = fs::read_to_string(narratives).map_err(|e| Error::Io {
                path: narratives.clone(),
                source: e,
            })?;
            let corpus = corpus_from_tsv(&text)?;
            let provider_cfg = match remote_dim {
                Some(dim) => ProviderConfig::Remote {
                    endpoint: None,
                    dim: *dim,
                    batch_size: tergad::embed::DEFAULT_BATCH_SIZE,
                    max_in_flight: 4,
                },
                None => cfg.provider.clone(),
            };
            let provider = provider_cfg.build(cli.endpoint.as_deref())?;
            let texts: Vec<&str> = corpus.iter().map(|(_, t)| t.as_str()).collect();
            let m = embed_texts(&texts, provider.as_ref())?;
            let values = if *standardize {
                zscore_columns(&m.values)?
            } else {
                m.values
            };
            let dir = out_dir(cli, &cfg)?;
            let path = dir.join(file);
            write_embeddings(&path, &values)?;
            println!(
                "{} x {} embeddings from {} written to {}",
                values.nrows(),
                values.ncols(),
                m.provenance,
                path.display()
            );
        }
        Command::Inject {
            dataset,
            count,
            ratio,
        } => {
            let mut c = cfg.clone();
            if dataset.is_some() {
                c.dataset = dataset.clone();
            }
            if count.is_some() || ratio.is_some() {
                c.injection.anomaly_count = *count;
                c.injection.anomaly_ratio = *ratio;
            }
            c.injection.seed = cli.seed.unwrap_or(c.injection.seed);
            let (base, comm) = load_base(&c)?;
            let (ds, report) = inject(&base, &comm, &c.injection)?;
            let dir = out_dir(cli, &cfg)?;
            let manifest = save_dataset(&ds, &dir.join("dataset"))?;
            write(&dir.join("injection_report.json"), report.to_json())?;
            println!(
                "{} anomalies injected; labelled dataset at {} (sha256 {})",
                report.anomalous_nodes.len(),
                manifest.display(),
                ds.content_hash()
            );
        }
        Command::Train { data, embeddings } => {
            let ds = load_dataset(&data.dataset)?;
            let z = semantic(embeddings.as_deref(), &ds)?;
            let (profiles, _) = profile_dataset(&ds, seed, &cfg.profile);
            let inputs = model_inputs(&ds, z.as_ref(), &profiles)?;
            let hyper = Hyperparams {
                seed,
                semantic_branch: z.is_some(),
                ..cfg.model.clone()
            };
            let out = train(&inputs, &hyper)?;
            let dir = out_dir(cli, &cfg)?;
            save_checkpoint(&out.params, &dir.join("model.ckpt"))?;
            let mut hist = String::from("epoch,total,structural,attribute\n");
            for (i, l) in out.history.iter().enumerate() {
                hist.push_str(&format!("{i},{},{},{}\n", l.total, l.structural, l.attribute));
            }
            write(&dir.join("loss_history.csv"), hist)?;
            println!(
                "trained {} parameters for {} epochs; final loss {:.6}",
                out.params.parameter_count(),
                out.history.len(),
                out.history.last().map_or(f64::NAN, |l| l.total)
            );
        }
        Command::Score {
            data,
            checkpoint,
            embeddings,
        } => {
            let ds = load_dataset(&data.dataset)?;
            let params = load_checkpoint(checkpoint)?;
            let z = semantic(embeddings.as_deref(), &ds)?;
            let (profiles, _) = profile_dataset(&ds, seed, &cfg.profile);
            let inputs = model_inputs(&ds, z.as_ref(), &profiles)?;
            let hyper = Hyperparams {
                fusion: params.fusion,
                layers: params.layers,
                semantic_branch: z.is_some(),
                ..cfg.model.clone()
            };
            let s = score(&params, &inputs, &hyper, hyper.alpha)?;
            let dir = out_dir(cli, &cfg)?;
            let path = dir.join("scores.csv");
            write(&path, scores_to_csv(&s, &ds.original_ids, ds.labels.as_deref()))?;
            println!("scores written to {}", path.display());
        }
        Command::Evaluate { scores } => {
            let mut per_seed = Vec::new();
            let mut roc = Vec::new();
            let mut pr = Vec::new();
            for (i, p) in scores.iter().enumerate() {
                let text = fs::read_to_string(p).map_err(|e| Error::Io {
                    path: p.clone(),
                    source: e,
                })?;
                let t = parse_scores_csv(&text, p)?;
                let labels = t.labels.ok_or_else(|| {
                    Error::InvalidArgument(format!("{} has no label column", p.display()))
                })?;
                per_seed.push(evaluate(&t.scores, &labels, i as u64)?);
                if cfg.plot {
                    let name = p.display().to_string();
                    roc.push((name.clone(), roc_curve(&t.scores, &labels)?));
                    pr.push((name, pr_curve(&t.scores, &labels)?));
                }
            }
            let report = aggregate_seeds(&per_seed)?;
            let dir = out_dir(cli, &cfg)?;
            write(&dir.join("metrics.json"), report.to_json())?;
            write(
                &dir.join("table.csv"),
                table_csv(&[("scores".into(), "input".into(), report.clone())]),
            )?;
            if cfg.plot {
                write(&dir.join("roc.svg"), plot::roc_svg("ROC", &roc))?;
                write(&dir.join("pr.svg"), plot::pr_svg("Precision-recall", &pr))?;
            }
            println!(
                "ROC-AUC {:.4} (var {:.2e})  PR-AUC {:.4} (var {:.2e})  Recall@K {:.4}",
                report.roc_auc.mean,
                report.roc_auc.variance,
                report.pr_auc.mean,
                report.pr_auc.variance,
                report.recall_at_k.mean
            );
        }
        Command::Pipeline { variant } => {
            let mut c = cfg.clone();
            if let Some(v) = variant {
                c.variant = v.parse()?;
            }
            let res = run_pipeline(&c, cli.endpoint.as_deref())?;
            print!("{}", format_table(std::slice::from_ref(&res)));
            println!("run directory: {}", res.dir.display());
        }
        Command::Ablate { variants } => {
            let vs: Vec<Variant> = variants.iter().map(|v| v.parse()).collect::<Result<_>>()?;
            let res = run_ablation(&cfg, &vs, cli.endpoint.as_deref())?;
            print!("{}", format_table(&res.rows));
            println!("table: {}", cfg.output_dir.join("ablation.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
