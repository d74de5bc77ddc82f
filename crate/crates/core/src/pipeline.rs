//! End-to-end runs: inject, profile, narrate, embed, standardize, train,
//! score, evaluate. Also the paired variant harness.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::{load_dataset, Dataset};
use crate::embed::{
    embed_corpus, zscore_columns, zscore_standardize, EmbeddingProvider, HashEmbedder,
    PrecomputedEmbeddings, RemoteEmbedder, DEFAULT_BATCH_SIZE, DEFAULT_DIM,
};
use crate::error::{Error, Result, Stage, StageContext};
use crate::features::{
    build_profiles, communities, profile_feature_matrix, GraphSummary, ProfileConfig,
    StructProfile,
};
use crate::metrics::{aggregate_seeds, evaluate, pr_curve, roc_curve, table_csv, MetricReport, SeedMetrics};
use crate::model::{score, scores_to_csv, train, AnomalyScores, Fusion, Hyperparams, ModelInputs};
use crate::narrate::{corpus_to_tsv, render_corpus, ContentFlag, NarrationConfig, NodeNarrative, Style};
use crate::perturb::{inject, InjectionConfig, InjectionReport};
use crate::synth::{sbm, SbmConfig};
use crate::{plot, rng};

/// Model/narration configuration under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Full,
    /// Structural features concatenated onto the attributes, no narration
    /// and no semantic branch.
    WithoutPrompt,
    /// Gate replaced by concatenation plus a linear map.
    WithoutGate,
    Fusion(Fusion),
    /// One content flag switched off.
    PromptAblation(ContentFlag),
    Shuffled,
    ProfileStyle,
    TwoLayer,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Full => f.write_str("full"),
            Variant::WithoutPrompt => f.write_str("w/o-prompt"),
            Variant::WithoutGate => f.write_str("w/o-gate"),
            Variant::Fusion(s) => write!(f, "fusion:{s}"),
            Variant::PromptAblation(c) => write!(f, "prompt-ablation:{}", c.short_name()),
            Variant::Shuffled => f.write_str("shuffled"),
            Variant::ProfileStyle => f.write_str("profile-style"),
            Variant::TwoLayer => f.write_str("two-layer"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = match s {
            "full" => Variant::Full,
            "w/o-prompt" | "wo-prompt" => Variant::WithoutPrompt,
            "w/o-gate" | "wo-gate" => Variant::WithoutGate,
            "shuffled" => Variant::Shuffled,
            "profile-style" => Variant::ProfileStyle,
            "two-layer" => Variant::TwoLayer,
            _ => {
                if let Some(rest) = s.strip_prefix("fusion:") {
                    Variant::Fusion(rest.parse()?)
                } else if let Some(rest) = s.strip_prefix("prompt-ablation:") {
                    Variant::PromptAblation(ContentFlag::parse(rest).ok_or_else(|| {
                        Error::Config(format!("unknown prompt flag {rest:?}"))
                    })?)
                } else {
                    return Err(Error::Config(format!("unknown variant {s:?}")));
                }
            }
        };
        Ok(v)
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Variant {
    pub fn uses_narration(self) -> bool {
        self != Variant::WithoutPrompt
    }

    /// Directory-safe name.
    pub fn slug(self) -> String {
        self.to_string().replace('/', "").replace(':', "-")
    }

    /// Narration and model settings this variant runs with.
    pub fn apply(
        self,
        narration: &NarrationConfig,
        hyper: &Hyperparams,
        seed: u64,
    ) -> (NarrationConfig, Hyperparams) {
        let mut n = narration.clone();
        let mut h = hyper.clone();
        match self {
            Variant::Full => {}
            Variant::WithoutPrompt => h.semantic_branch = false,
            Variant::WithoutGate => h.fusion = Fusion::Concat,
            Variant::Fusion(f) => h.fusion = f,
            Variant::PromptAblation(flag) => n = n.without(flag),
            Variant::Shuffled => n.shuffle_seed = Some(seed),
            Variant::ProfileStyle => n.style = Style::Profile,
            Variant::TwoLayer => h.layers = 2,
        }
        (n, h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProviderConfig {
    LocalHash {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
    Remote {
        /// Falls back to the endpoint environment variable when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        endpoint: Option<String>,
        dim: usize,
        #[serde(default = "default_batch")]
        batch_size: usize,
        #[serde(default = "default_in_flight")]
        max_in_flight: usize,
    },
    Precomputed {
        path: PathBuf,
    },
}

fn default_dim() -> usize {
    DEFAULT_DIM
}

fn default_batch() -> usize {
    DEFAULT_BATCH_SIZE
}

fn default_in_flight() -> usize {
    4
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig::LocalHash {
            dim: DEFAULT_DIM,
            seed: 0,
        }
    }
}

impl ProviderConfig {
    /// Builds the provider. `endpoint` overrides the configured endpoint of
    /// a remote provider.
    pub fn build(&self, endpoint: Option<&str>) -> Result<Box<dyn EmbeddingProvider>> {
        Ok(match self {
            ProviderConfig::LocalHash { dim, seed } => Box::new(HashEmbedder::new(*dim, *seed)),
            ProviderConfig::Remote {
                endpoint: configured,
                dim,
                batch_size,
                max_in_flight,
            } => {
                let url = RemoteEmbedder::resolve_endpoint(endpoint.or(configured.as_deref()))
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "remote provider needs an endpoint (flag, config, or {})",
                            crate::embed::ENDPOINT_ENV
                        ))
                    })?;
                let mut r = RemoteEmbedder::new(url, *dim);
                r.batch_size = *batch_size;
                r.max_in_flight = *max_in_flight;
                Box::new(r)
            }
            ProviderConfig::Precomputed { path } => Box::new(PrecomputedEmbeddings::load(path)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Dataset manifest. When absent the synthetic block-model graph
    /// described by `synthetic` is used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    pub synthetic: SbmConfig,
    /// Inject anomalies; when false the dataset must carry labels.
    pub inject: bool,
    pub injection: InjectionConfig,
    pub profile: ProfileConfig,
    pub narration: NarrationConfig,
    pub provider: ProviderConfig,
    pub model: Hyperparams,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub variant: Variant,
    /// Render ROC and PR curves as SVG.
    pub plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            synthetic: SbmConfig::default(),
            inject: true,
            injection: InjectionConfig::default(),
            profile: ProfileConfig::default(),
            narration: NarrationConfig::default(),
            provider: ProviderConfig::default(),
            model: Hyperparams::default(),
            seeds: vec![0, 1, 2, 3],
            output_dir: PathBuf::from("runs/latest"),
            variant: Variant::Full,
            plot: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; relative dataset and embedding paths are resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(d) = &cfg.dataset {
            if d.is_relative() {
                cfg.dataset = Some(base.join(d));
            }
        }
        if let ProviderConfig::Precomputed { path: p } = &mut cfg.provider {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        if let Some(d) = &self.dataset {
            if !d.exists() {
                return Err(Error::Config(format!("dataset manifest {} not found", d.display())));
            }
        }
        if let ProviderConfig::Precomputed { path } = &self.provider {
            if !path.exists() {
                return Err(Error::Config(format!("embedding file {} not found", path.display())));
            }
        }
        self.injection.validate()?;
        self.narration.validate()?;
        self.model.validate()
    }
}

/// Unperturbed input dataset and the community partition used by injection.
///
/// Synthetic graphs use their planted blocks; loaded datasets use label
/// propagation on the unperturbed graph.
pub fn load_base(cfg: &RunConfig) -> Result<(Dataset, Vec<usize>)> {
    match &cfg.dataset {
        Some(path) => {
            let ds = load_dataset(path)?;
            let comm = communities(&ds.graph, 0);
            if comm.iter().all(|&c| c == 0) && cfg.inject {
                log::warn!("label propagation found a single community; no edges can be added by injection");
            }
            Ok((ds, comm))
        }
        None => sbm(&cfg.synthetic),
    }
}

/// Seed of the injection for run seed `s`.
pub fn injection_seed(cfg: &RunConfig, s: u64) -> u64 {
    rng::derive_seed(cfg.injection.seed, s, "injection")
}

/// Everything for one seed that does not depend on the variant.
#[derive(Debug, Clone)]
pub struct PreparedSeed {
    pub seed: u64,
    pub dataset: Dataset,
    pub report: Option<InjectionReport>,
    pub content_hash: String,
    pub profiles: Vec<StructProfile>,
    pub summary: GraphSummary,
    pub profile_seconds: f64,
}

/// Injects (if enabled) and profiles the graph the detector will score.
pub fn prepare_seed(cfg: &RunConfig, base: &Dataset, comm: &[usize], s: u64) -> Result<PreparedSeed> {
    let (dataset, report) = if cfg.inject {
        let icfg = InjectionConfig {
            seed: injection_seed(cfg, s),
            ..cfg.injection.clone()
        };
        let (d, r) = inject(base, comm, &icfg).stage(Stage::Inject)?;
        (d, Some(r))
    } else {
        if base.labels.is_none() {
            return Err(Error::Config("injection disabled but dataset has no labels".into()))
                .stage(Stage::Inject);
        }
        (base.clone(), None)
    };
    let t = Instant::now();
    let (profiles, summary) = profile_dataset(&dataset, s, &cfg.profile);
    Ok(PreparedSeed {
        seed: s,
        content_hash: dataset.content_hash(),
        dataset,
        report,
        profiles,
        summary,
        profile_seconds: t.elapsed().as_secs_f64(),
    })
}

/// Profiles with node ids set to the dataset's original ids.
pub fn profile_dataset(
    ds: &Dataset,
    seed: u64,
    cfg: &ProfileConfig,
) -> (Vec<StructProfile>, GraphSummary) {
    let (mut profiles, summary) = build_profiles(&ds.graph, seed, cfg);
    for (p, &id) in profiles.iter_mut().zip(&ds.original_ids) {
        p.node_id = id;
    }
    (profiles, summary)
}

/// Attribute input with z-scored structural columns appended.
pub fn structural_attribute_input(ds: &Dataset, profiles: &[StructProfile]) -> Result<Array2<f64>> {
    let s = zscore_columns(&profile_feature_matrix(profiles))?;
    concatenate(Axis(1), &[ds.attributes.view(), s.view()]).map_err(|e| Error::Shape(e.to_string()))
}

/// Model inputs for a dataset. With `semantic` embeddings (already
/// standardized) both branches are fed; without, the attribute branch gets
/// the attributes plus z-scored structural columns.
pub fn model_inputs(
    ds: &Dataset,
    semantic: Option<&Array2<f64>>,
    profiles: &[StructProfile],
) -> Result<ModelInputs> {
    match semantic {
        Some(z) => ModelInputs::new(&ds.graph, ds.attributes.view(), Some(z.view()), ds.attributes.view()),
        None => {
            let x_in = structural_attribute_input(ds, profiles)?;
            ModelInputs::new(&ds.graph, x_in.view(), None, ds.attributes.view())
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Profiling plus narration.
    pub generation_seconds: f64,
    /// Embedding plus standardization.
    pub embedding_seconds: f64,
    pub training_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub narratives: Option<Vec<NodeNarrative>>,
    pub scores: AnomalyScores,
    pub metrics: SeedMetrics,
    pub timing: Timing,
    pub final_loss: f64,
}

/// Narrate, embed, train, score, and evaluate one prepared seed.
pub fn run_seed(
    cfg: &RunConfig,
    variant: Variant,
    prepared: &PreparedSeed,
    provider: Option<&dyn EmbeddingProvider>,
) -> Result<SeedRun> {
    let s = prepared.seed;
    let ds = &prepared.dataset;
    let (ncfg, mut hyper) = variant.apply(&cfg.narration, &cfg.model, s);
    hyper.seed = s;
    let mut timing = Timing {
        generation_seconds: prepared.profile_seconds,
        ..Default::default()
    };

    let (inputs, narratives) = if variant.uses_narration() {
        let t = Instant::now();
        let corpus = render_corpus(&prepared.profiles, &prepared.summary, &ncfg).stage(Stage::Narrate)?;
        timing.generation_seconds += t.elapsed().as_secs_f64();

        let t = Instant::now();
        let provider = provider
            .ok_or_else(|| Error::Config("no embedding provider".into()))
            .stage(Stage::Embed)?;
        let raw = embed_corpus(&corpus, provider).stage(Stage::Embed)?;
        let z = zscore_standardize(&raw).stage(Stage::Standardize)?;
        timing.embedding_seconds = t.elapsed().as_secs_f64();
        let inputs = model_inputs(ds, Some(&z.values), &prepared.profiles).stage(Stage::Train)?;
        (inputs, Some(corpus))
    } else {
        let inputs = model_inputs(ds, None, &prepared.profiles).stage(Stage::Standardize)?;
        (inputs, None)
    };

    let t = Instant::now();
    let trained = train(&inputs, &hyper).stage(Stage::Train)?;
    timing.training_seconds = t.elapsed().as_secs_f64();
    let final_loss = trained.history.last().map_or(f64::NAN, |l| l.total);
    let scores = score(&trained.params, &inputs, &hyper, hyper.alpha).stage(Stage::Score)?;
    let labels = ds
        .labels
        .as_deref()
        .ok_or_else(|| Error::invalid("dataset has no labels"))
        .stage(Stage::Evaluate)?;
    let metrics = evaluate(scores.scores.as_slice().expect("contiguous"), labels, s)
        .stage(Stage::Evaluate)?;
    log::info!(
        "[{variant}] seed {s}: roc_auc {:.4} pr_auc {:.4} recall@k {:.4}",
        metrics.roc_auc,
        metrics.pr_auc,
        metrics.recall_at_k
    );
    Ok(SeedRun {
        seed: s,
        narratives,
        scores,
        metrics,
        timing,
        final_loss,
    })
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub variant: Variant,
    pub dir: PathBuf,
    pub seeds: Vec<SeedRun>,
    pub report: MetricReport,
    pub content_hashes: Vec<String>,
}

#[derive(Serialize)]
struct TimingFile<'a> {
    per_seed: Vec<(u64, Timing)>,
    total: Timing,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Runs one variant over prepared seeds and writes its directory.
fn run_variant(
    cfg: &RunConfig,
    variant: Variant,
    prepared: &[PreparedSeed],
    provider: Option<&dyn EmbeddingProvider>,
    dir: &Path,
    dataset_name: &str,
) -> Result<RunResult> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)).stage(Stage::Output)?;
    let mut runs = Vec::with_capacity(prepared.len());
    for p in prepared {
        let run = run_seed(cfg, variant, p, provider)?;
        let csv = scores_to_csv(&run.scores, &p.dataset.original_ids, p.dataset.labels.as_deref());
        write(&dir.join(format!("scores_seed{}.csv", p.seed)), csv).stage(Stage::Output)?;
        if let Some(corpus) = &run.narratives {
            write(&dir.join(format!("narratives_seed{}.tsv", p.seed)), corpus_to_tsv(corpus))
                .stage(Stage::Output)?;
        }
        runs.push(run);
    }
    let per_seed: Vec<SeedMetrics> = runs.iter().map(|r| r.metrics).collect();
    let report = aggregate_seeds(&per_seed).stage(Stage::Evaluate)?;
    write(&dir.join("metrics.json"), report.to_json()).stage(Stage::Output)?;
    write(
        &dir.join("table.csv"),
        table_csv(&[(variant.to_string(), dataset_name.to_string(), report.clone())]),
    )
    .stage(Stage::Output)?;

    let mut total = Timing::default();
    for r in &runs {
        total.generation_seconds += r.timing.generation_seconds;
        total.embedding_seconds += r.timing.embedding_seconds;
        total.training_seconds += r.timing.training_seconds;
    }
    let timing = TimingFile {
        per_seed: runs.iter().map(|r| (r.seed, r.timing)).collect(),
        total,
        note: (!variant.uses_narration()).then_some("embedding stage skipped"),
    };
    write(
        &dir.join("timing.json"),
        serde_json::to_string_pretty(&timing).expect("serializes"),
    )
    .stage(Stage::Output)?;

    let content_hashes: Vec<String> = prepared.iter().map(|p| p.content_hash.clone()).collect();
    let hashes: Vec<(u64, &str)> = prepared.iter().map(|p| (p.seed, p.content_hash.as_str())).collect();
    write(
        &dir.join("dataset_hashes.json"),
        serde_json::to_string_pretty(&hashes).expect("serializes"),
    )
    .stage(Stage::Output)?;

    let resolved = RunConfig {
        variant,
        output_dir: dir.to_path_buf(),
        ..cfg.clone()
    };
    write(&dir.join("resolved_config.toml"), resolved.to_toml()).stage(Stage::Output)?;

    if cfg.plot {
        write_plots(dir, &runs, prepared).stage(Stage::Output)?;
    }

    Ok(RunResult {
        variant,
        dir: dir.to_path_buf(),
        seeds: runs,
        report,
        content_hashes,
    })
}

fn write_plots(dir: &Path, runs: &[SeedRun], prepared: &[PreparedSeed]) -> Result<()> {
    let mut roc = Vec::new();
    let mut pr = Vec::new();
    for (r, p) in runs.iter().zip(prepared) {
        let labels = p.dataset.labels.as_deref().expect("evaluated");
        let s = r.scores.scores.as_slice().expect("contiguous");
        roc.push((format!("seed {}", r.seed), roc_curve(s, labels)?));
        pr.push((format!("seed {}", r.seed), pr_curve(s, labels)?));
    }
    write(&dir.join("roc.svg"), plot::roc_svg("ROC", &roc))?;
    write(&dir.join("pr.svg"), plot::pr_svg("Precision-recall", &pr))
}

fn write_injection_reports(dir: &Path, prepared: &[PreparedSeed]) -> Result<()> {
    for p in prepared {
        if let Some(r) = &p.report {
            write(&dir.join(format!("injection_seed{}.json", p.seed)), r.to_json())?;
        }
    }
    Ok(())
}

/// Runs `cfg.variant` for every seed and writes scores, metrics, timing,
/// and the resolved config to `cfg.output_dir`.
pub fn run_pipeline(cfg: &RunConfig, endpoint: Option<&str>) -> Result<RunResult> {
    cfg.validate()?;
    let (base, comm) = load_base(cfg).stage(Stage::Load)?;
    let provider = if cfg.variant.uses_narration() {
        Some(cfg.provider.build(endpoint).stage(Stage::Embed)?)
    } else {
        None
    };
    let prepared = cfg
        .seeds
        .iter()
        .map(|&s| prepare_seed(cfg, &base, &comm, s))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| Error::io(&cfg.output_dir, e))
        .stage(Stage::Output)?;
    write_injection_reports(&cfg.output_dir, &prepared).stage(Stage::Output)?;
    run_variant(
        cfg,
        cfg.variant,
        &prepared,
        provider.as_deref(),
        &cfg.output_dir,
        &base.name,
    )
}

#[derive(Debug, Clone)]
pub struct AblationResult {
    pub rows: Vec<RunResult>,
    /// Per-seed content hash of the shared perturbed dataset.
    pub content_hashes: Vec<String>,
    pub table: String,
}

/// Runs each variant on the same perturbed datasets. Each variant gets a
/// subdirectory of `cfg.output_dir`; the comparison table is written to
/// `ablation.csv`.
pub fn run_ablation(cfg: &RunConfig, variants: &[Variant], endpoint: Option<&str>) -> Result<AblationResult> {
    cfg.validate()?;
    if variants.is_empty() {
        return Err(Error::Config("no variants given".into()));
    }
    let (base, comm) = load_base(cfg).stage(Stage::Load)?;
    let provider = if variants.iter().any(|v| v.uses_narration()) {
        Some(cfg.provider.build(endpoint).stage(Stage::Embed)?)
    } else {
        None
    };
    let prepared = cfg
        .seeds
        .iter()
        .map(|&s| prepare_seed(cfg, &base, &comm, s))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| Error::io(&cfg.output_dir, e))
        .stage(Stage::Output)?;
    write_injection_reports(&cfg.output_dir, &prepared).stage(Stage::Output)?;
    let name = base.name.clone();
    let mut rows = Vec::with_capacity(variants.len());
    for &v in variants {
        let dir = cfg.output_dir.join(v.slug());
        rows.push(run_variant(cfg, v, &prepared, provider.as_deref(), &dir, &name)?);
    }
    let table = table_csv(
        &rows
            .iter()
            .map(|r| (r.variant.to_string(), name.clone(), r.report.clone()))
            .collect::<Vec<_>>(),
    );
    write(&cfg.output_dir.join("ablation.csv"), &table).stage(Stage::Output)?;
    Ok(AblationResult {
        rows,
        content_hashes: prepared.into_iter().map(|p| p.content_hash).collect(),
        table,
    })
}

/// Human-readable `variant  roc ± var  pr ± var  recall ± var` lines.
pub fn format_table(rows: &[RunResult]) -> String {
    let mut out = format!(
        "{:<28} {:>18} {:>18} {:>18}\n",
        "variant", "ROC-AUC", "PR-AUC", "Recall@K"
    );
    for r in rows {
        let cell = |s: crate::metrics::Summary| format!("{:.4} ± {:.4}", s.mean, s.variance);
        out.push_str(&format!(
            "{:<28} {:>18} {:>18} {:>18}\n",
            r.variant.to_string(),
            cell(r.report.roc_auc),
            cell(r.report.pr_auc),
            cell(r.report.recall_at_k)
        ));
    }
    out
}
