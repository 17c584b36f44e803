//! `affrank` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 infeasible everywhere (no configuration has enough history).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affrank::bench::{
    grid_search, ndcg_at_k, read_ranking, read_report, read_truth, select_config, write_ranking, write_report,
    GridConfig, RankedList, DEFAULT_K,
};
use affrank::features::{assemble_detailed, read_matrix, write_matrix, AifContext, FeatureMatrix, FeatureSetSpec, MatrixSidecar, DEFAULT_AIF_WINDOW};
use affrank::ingest::{
    read_snapshot, sample_corpus, write_snapshot, BfsDirection, GraphFiles, IngestSchema, RawGraph, SampleParams,
    SnapshotManifest,
};
use affrank::models::{backward_eliminate, gbdt_fit, group_labels, load_model, save_model, GbdtConfig, MixedConfig, Model};
use affrank::relevance::{build_panel, read_panel, write_panel, PaperFilter, PanelOptions, RelevancePanel};
use affrank::similarity::{build_profiles, related_conferences, write_related_report, RelatedOptions, SimilarityBasis};
use affrank::{AffiliationId, ConferenceId};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "affrank", version, about = "Rank affiliations by their expected relevance at a conference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load dump tables, sample the corpus around target conferences and
    /// write a snapshot directory.
    Ingest(IngestArgs),
    /// Build the (conference, affiliation, year) relevance panel.
    Panel(PanelArgs),
    /// List the conferences most similar to a target.
    Similar(SimilarArgs),
    /// Assemble a feature matrix for one target year.
    Features(FeaturesArgs),
    /// Fit a model and save it as JSON.
    Train(TrainArgs),
    /// Rank affiliations with a saved model.
    Predict(PredictArgs),
    /// NDCG@k of a ranking against the true relevance.
    Evaluate(EvaluateArgs),
    /// Backtest every cell of a grid configuration.
    #[command(visible_alias = "grid")]
    Backtest(GridArgs),
    /// Pick the configuration to submit from a backtest report.
    Select(SelectArgs),
}

#[derive(Debug, clap::Args)]
struct IngestArgs {
    #[arg(long)]
    papers: PathBuf,
    #[arg(long)]
    links: PathBuf,
    #[arg(long)]
    refs: PathBuf,
    #[arg(long)]
    keywords: PathBuf,
    /// One paper id per line, marking full research papers.
    #[arg(long)]
    flags: Option<PathBuf>,
    /// `mag`, `interchange`, or a JSON schema file.
    #[arg(long, default_value = "mag")]
    schema: String,
    /// Target conferences, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    conferences: Vec<String>,
    /// Seed paper years, e.g. 2011-2015.
    #[arg(long, default_value = "2011-2015", value_parser = parse_years)]
    seed_years: (i32, i32),
    #[arg(long, default_value_t = 2000)]
    author_floor: i32,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Direction::Out)]
    direction: Direction,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Filter {
    All,
    Full,
}

#[derive(Debug, clap::Args)]
struct PanelArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    conferences: Vec<String>,
    /// Inclusive year range, e.g. 2000-2015.
    #[arg(long, value_parser = parse_years)]
    years: (i32, i32),
    #[arg(long, value_enum, default_value_t = Filter::All)]
    filter: Filter,
    /// Keep only this many affiliations, by total relevance.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct SimilarArgs {
    /// Snapshot directory whose authors and keywords form the profiles.
    #[arg(long)]
    panel_corpus: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value = "authors")]
    basis: SimilarityBasis,
    /// Restrict profiles to papers of these years.
    #[arg(long, value_parser = parse_years)]
    years: Option<(i32, i32)>,
    #[arg(long, default_value_t = 0)]
    min_profile: usize,
}

#[derive(Debug, clap::Args)]
struct FeaturesArgs {
    #[arg(long)]
    panel: PathBuf,
    /// Feature set JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    target_year: i32,
    /// Main conference; defaults to the panel's first.
    #[arg(long)]
    conference: Option<String>,
    /// Related conferences whose rows are appended, comma separated.
    #[arg(long, value_delimiter = ',')]
    related: Vec<String>,
    /// Snapshot for author impact features.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Gbdt,
    Mixed,
    Prob,
}

#[derive(Debug, clap::Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    model_family: Family,
    /// Hyperparameters JSON; defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training matrices with targets (gbdt, mixed), stacked in order.
    #[arg(long, value_delimiter = ',')]
    features: Vec<PathBuf>,
    /// Panel for the probabilities model.
    #[arg(long)]
    panel: Option<PathBuf>,
    #[arg(long)]
    conference: Option<String>,
    /// Year the probabilities model predicts; counts come from the years before.
    #[arg(long)]
    year: Option<i32>,
    #[arg(long)]
    model_out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct PredictArgs {
    #[arg(long)]
    model_in: PathBuf,
    /// Matrix whose rows are ranked; required except for prob models.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Panel supplying last year's relevance for tie-breaks.
    #[arg(long)]
    panel: Option<PathBuf>,
    #[arg(long)]
    conference: Option<String>,
    #[arg(long)]
    year: Option<i32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct EvaluateArgs {
    #[arg(long)]
    predicted: PathBuf,
    /// `affiliation, relevance` TSV.
    #[arg(long, required_unless_present = "panel")]
    truth: Option<PathBuf>,
    /// Read the truth from a panel slice instead (needs --conference, --year).
    #[arg(long, requires_all = ["conference", "year"])]
    panel: Option<PathBuf>,
    #[arg(long)]
    conference: Option<String>,
    #[arg(long)]
    year: Option<i32>,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
}

#[derive(Debug, clap::Args)]
struct GridArgs {
    #[arg(long)]
    grid_config: PathBuf,
    #[arg(long)]
    panel: PathBuf,
    /// Snapshot for author impact features.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Cells evaluated concurrently; all cores when absent.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    report_out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct SelectArgs {
    #[arg(long)]
    report: PathBuf,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<affrank::Error> for Failure {
    fn from(e: affrank::Error) -> Self {
        use affrank::Error as E;
        let code = match e {
            E::InvalidParameter(_) => 1,
            E::InsufficientHistory(_) => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn parse_years(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| format!("expected FIRST-LAST, got `{s}`"))?;
    let a: i32 = a.trim().parse().map_err(|_| format!("bad year `{a}`"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad year `{b}`"))?;
    if a > b {
        return Err(format!("empty year range {a}-{b}"));
    }
    Ok((a, b))
}

fn read_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn conf_ids(names: &[String]) -> Vec<ConferenceId> {
    names.iter().map(|c| ConferenceId::new(c.as_str())).collect()
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn ingest(a: IngestArgs) -> CliResult {
    let schema = match a.schema.as_str() {
        "mag" => IngestSchema::default(),
        "interchange" => IngestSchema::interchange(),
        path => read_config(Path::new(path))?,
    };
    let files = GraphFiles {
        papers: a.papers,
        authorships: a.links,
        citations: a.refs,
        keywords: a.keywords,
        full_research_flags: a.flags,
    };
    let (raw, skipped) = RawGraph::load(&files, &schema)?;
    let mut params = SampleParams::new(conf_ids(&a.conferences));
    params.seed_years = a.seed_years;
    params.author_floor_year = a.author_floor;
    params.bfs_depth = a.depth;
    params.direction = match a.direction {
        Direction::Out => BfsDirection::Out,
        Direction::In => BfsDirection::In,
        Direction::Both => BfsDirection::Both,
    };
    let snapshot = sample_corpus(&raw, &params)?;
    let mut manifest = SnapshotManifest::describe(&snapshot);
    manifest.params = Some(params);
    manifest.skipped = skipped;
    write_snapshot(&a.out, &snapshot, &manifest)?;
    print_json(&manifest);
    Ok(())
}

fn panel(a: PanelArgs) -> CliResult {
    let (snapshot, _) = read_snapshot(&a.snapshot)?;
    let filter = match a.filter {
        Filter::All => PaperFilter::AllPapers,
        Filter::Full => PaperFilter::FullResearchOnly,
    };
    let options = PanelOptions { affiliation_cap: a.cap };
    let panel = build_panel(&snapshot, &conf_ids(&a.conferences), a.years.0..=a.years.1, filter, &options)?;
    write_panel(&a.out, &panel)?;
    eprintln!(
        "{} conferences x {} affiliations x {} years",
        panel.conferences().len(),
        panel.affiliations().len(),
        panel.n_years()
    );
    Ok(())
}

fn similar(a: SimilarArgs) -> CliResult {
    let (snapshot, _) = read_snapshot(&a.panel_corpus)?;
    let years = match a.years {
        Some((lo, hi)) => lo..=hi,
        None => {
            let ys = snapshot.papers().iter().map(|p| p.year);
            ys.clone().min().unwrap_or(0)..=ys.max().unwrap_or(0)
        }
    };
    let profiles = build_profiles(&snapshot, years);
    let target = ConferenceId::new(a.target.as_str());
    let opts = RelatedOptions { min_profile_size: a.min_profile };
    let neighbors = related_conferences(&target, &profiles, a.k, a.basis, opts)?;
    write_related_report(std::io::stdout().lock(), &target, a.basis, &neighbors)
        .map_err(|e| Failure { code: 2, message: e.to_string() })
}

fn aif_context(snapshot: Option<&Path>) -> CliResult<Option<AifContext>> {
    Ok(match snapshot {
        Some(dir) => Some(AifContext::from_snapshot(&read_snapshot(dir)?.0, DEFAULT_AIF_WINDOW)),
        None => None,
    })
}

fn main_conference(panel: &RelevancePanel, name: Option<&str>) -> ConferenceId {
    name.map(ConferenceId::new).unwrap_or_else(|| panel.conferences()[0].clone())
}

fn features(a: FeaturesArgs) -> CliResult {
    let panel = read_panel(&a.panel)?;
    let spec: FeatureSetSpec = read_config(&a.spec)?;
    spec.validate()?;
    let main = main_conference(&panel, a.conference.as_deref());
    let mut conferences = vec![main.clone()];
    conferences.extend(conf_ids(&a.related).into_iter().filter(|c| *c != main));
    let aif = aif_context(a.snapshot.as_deref())?;
    let (matrix, imputation) = assemble_detailed(&panel, &spec, &conferences, a.target_year, aif.as_ref())?;
    let sidecar = MatrixSidecar {
        spec,
        target_year: a.target_year,
        conferences,
        columns: matrix.columns().to_vec(),
        imputation,
    };
    write_matrix(&a.out, &matrix, Some(&sidecar))?;
    eprintln!("{} rows x {} columns", matrix.n_rows(), matrix.n_cols());
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MixedTrainConfig {
    #[serde(flatten)]
    config: MixedConfig,
    /// Backward-elimination level; no elimination when absent.
    level: Option<f64>,
}

fn stacked(paths: &[PathBuf]) -> CliResult<FeatureMatrix> {
    if paths.is_empty() {
        return Err(Failure::usage("--features is required for this model family"));
    }
    let parts = paths.iter().map(|p| read_matrix(p)).collect::<affrank::Result<Vec<_>>>()?;
    Ok(FeatureMatrix::vstack(&parts)?)
}

fn train(a: TrainArgs) -> CliResult {
    let model = match a.model_family {
        Family::Gbdt => {
            let cfg: GbdtConfig = match &a.config {
                Some(p) => read_config(p)?,
                None => GbdtConfig::default(),
            };
            Model::Gbdt(gbdt_fit(&stacked(&a.features)?, &cfg)?)
        }
        Family::Mixed => {
            let cfg: MixedTrainConfig = match &a.config {
                Some(p) => read_config(p)?,
                None => MixedTrainConfig::default(),
            };
            let x = stacked(&a.features)?;
            let groups = group_labels(&x);
            let level = cfg.level.unwrap_or(1.0);
            Model::Mixed(backward_eliminate(&x, &groups, &cfg.config, level)?)
        }
        Family::Prob => {
            let dir = a.panel.as_ref().ok_or_else(|| Failure::usage("prob needs --panel"))?;
            let year = a.year.ok_or_else(|| Failure::usage("prob needs --year"))?;
            let panel = read_panel(dir)?;
            let conf = main_conference(&panel, a.conference.as_deref());
            Model::Prob(affrank::bench::baseline_model(&panel, &conf, year)?)
        }
    };
    save_model(&a.model_out, &model)?;
    eprintln!("saved {}", a.model_out.display());
    Ok(())
}

fn predict(a: PredictArgs) -> CliResult {
    let model = load_model(&a.model_in)?;
    let matrix = a.features.as_deref().map(read_matrix).transpose()?;
    let scores: Vec<(AffiliationId, f64)> = match (&model, &matrix) {
        (Model::Prob(m), Some(x)) => x.keys().iter().map(|k| (k.affiliation.clone(), m.score(&k.affiliation))).collect(),
        (Model::Prob(m), None) => m.ranking(),
        (Model::Gbdt(m), Some(x)) => x.keys().iter().map(|k| k.affiliation.clone()).zip(m.predict(x)?).collect(),
        (Model::Mixed(m), Some(x)) => x.keys().iter().map(|k| k.affiliation.clone()).zip(m.predict(x)?).collect(),
        (_, None) => return Err(Failure::usage("--features is required for this model family")),
    };
    let key = matrix.as_ref().and_then(|x| x.keys().first().cloned());
    if let (Some(x), Some(k)) = (&matrix, &key) {
        if x.keys().iter().any(|r| r.conference != k.conference || r.year != k.year) {
            return Err(Failure::usage("the matrix must hold a single conference and year; assemble it without --related"));
        }
    }
    let conference = a
        .conference
        .map(ConferenceId::new)
        .or_else(|| key.as_ref().map(|k| k.conference.clone()))
        .unwrap_or_else(|| "unknown".into());
    let year = a.year.or(key.map(|k| k.year)).unwrap_or(0);
    let recent = match &a.panel {
        Some(dir) => {
            let panel = read_panel(dir)?;
            let c = panel
                .conference_index(&conference)
                .ok_or_else(|| affrank::Error::UnknownConference(conference.clone()))?;
            panel.year_slice(c, year - 1).unwrap_or_default()
        }
        None => BTreeMap::new(),
    };
    let list = RankedList::rank(conference, year, scores, &recent)?;
    write_ranking(&a.out, &list)?;
    eprintln!("ranked {} affiliations", list.len());
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> CliResult {
    let (conference, year, truth) = match (&a.truth, &a.panel) {
        (_, Some(dir)) => {
            let panel = read_panel(dir)?;
            let conf = ConferenceId::new(a.conference.clone().expect("clap requires it"));
            let year = a.year.expect("clap requires it");
            let c = panel
                .conference_index(&conf)
                .ok_or_else(|| affrank::Error::UnknownConference(conf.clone()))?;
            let truth = panel
                .year_slice(c, year)
                .ok_or_else(|| Failure::usage(format!("year {year} outside the panel")))?;
            (conf, year, truth)
        }
        (Some(path), None) => (
            a.conference.clone().map(ConferenceId::new).unwrap_or_else(|| "unknown".into()),
            a.year.unwrap_or(0),
            read_truth(path)?,
        ),
        (None, None) => unreachable!("clap requires --truth or --panel"),
    };
    let ranking = read_ranking(&a.predicted, conference, year)?;
    print_json(&ndcg_at_k(&ranking, &truth, a.k)?);
    Ok(())
}

fn backtest(a: GridArgs) -> CliResult {
    if let Some(jobs) = a.jobs {
        if jobs == 0 {
            return Err(Failure::usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    let grid: GridConfig = read_config(&a.grid_config)?;
    let panel = read_panel(&a.panel)?;
    let aif = aif_context(a.snapshot.as_deref())?;
    let report = grid_search(&panel, &grid, aif.as_ref())?;
    write_report(&a.report_out, &report)?;
    let feasible = report.cells.iter().filter(|c| c.outcome.ndcg().is_some()).count();
    eprintln!("{feasible} of {} cells feasible", report.cells.len());
    for c in &report.cells {
        let ndcg = c.outcome.ndcg().map_or("infeasible".to_string(), |v| format!("{v:.4}"));
        println!("{}\t{}\t{}\t{ndcg}", c.feature_set, c.related_count, c.year);
    }
    for b in &report.baseline {
        let ndcg = b.outcome.ndcg().map_or("infeasible".to_string(), |v| format!("{v:.4}"));
        println!("baseline\t-\t{}\t{ndcg}", b.year);
    }
    if feasible == 0 {
        return Err(Failure {
            code: 3,
            message: "no cell had enough history to evaluate".into(),
        });
    }
    Ok(())
}

fn select(a: SelectArgs) -> CliResult {
    let report = read_report(&a.report)?;
    print_json(&select_config(&report)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Panel(a) => panel(a),
        Command::Similar(a) => similar(a),
        Command::Features(a) => features(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Backtest(a) => backtest(a),
        Command::Select(a) => select(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
