use std::fs::File;
use std::io::{BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use shadowlayout_core::record::{find_duplicates, read_corpus, read_corpus_lines, validate_elements, AnnotationRecord, CorpusError, HeatmapRecord};
use shadowlayout_core::{
    compute_heatmap, CorpusIndex64, ElementCategory, ExtractorConfig, HeatmapMode, SlideLayout64, DEFAULT_DESCRIPTOR_G,
    DEFAULT_HEATMAP_G, DEFAULT_K,
};
use shadowlayout_extract::ExtractError;
use shadowlayout_service::{AppState, ServiceConfig, ServiceError};

#[derive(Parser)]
#[command(name = "shadowlayout", version, about = "Slide layout retrieval and shadow guidance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract distinct slides from a directory of decoded video frames.
    Extract(ExtractArgs),
    /// Check a corpus annotation file and summarize it.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Print the corpus heatmap for one mode as JSON.
    Heatmap {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: HeatmapMode,
        #[arg(long, default_value_t = DEFAULT_HEATMAP_G, value_parser = positive)]
        g: usize,
        /// Print mean coverage instead of max-normalized cells.
        #[arg(long)]
        raw: bool,
    },
    /// Rank corpus slides against a draft layout.
    Query {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        draft: PathBuf,
        #[arg(short = 'k', long = "k", default_value_t = DEFAULT_K, value_parser = positive)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_DESCRIPTOR_G, value_parser = positive)]
        g: usize,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Bits a frame must differ from the current slide to start a transition.
    #[arg(long, default_value_t = 10)]
    threshold: u32,
    /// Stable frames required before a slide is captured.
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Bits within which a slide counts as already extracted.
    #[arg(long, default_value_t = 4)]
    dedup: u32,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    bind: Option<SocketAddr>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    images: Option<PathBuf>,
    #[arg(long)]
    descriptor_g: Option<usize>,
    #[arg(long)]
    heatmap_g: Option<usize>,
    #[arg(long)]
    default_k: Option<usize>,
    #[arg(long)]
    cors_allow_origin: Option<String>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_mode(s: &str) -> Result<HeatmapMode, String> {
    s.parse().map_err(|e: shadowlayout_core::heatmap::UnknownMode| e.to_string())
}

/// Exit 1 for domain failures, 2 for usage or environment failures.
enum Failure {
    Domain(String),
    Env(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Env(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Env(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(args) => extract(args),
        Command::Validate { corpus } => validate(&corpus),
        Command::Heatmap { corpus, mode, g, raw } => heatmap(&corpus, mode, g, raw),
        Command::Query { corpus, draft, k, g } => query(&corpus, &draft, k, g),
        Command::Serve(args) => serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn extract(args: ExtractArgs) -> CmdResult {
    let config = ExtractorConfig {
        transition_threshold: args.threshold,
        stability_window: args.window,
        dedup_threshold: args.dedup,
    };
    config.validate().map_err(|e| Failure::Env(e.to_string()))?;
    let slides = shadowlayout_extract::extract_slides(&args.frames, &args.out, config).map_err(|e| match e {
        ExtractError::Image { .. } | ExtractError::Frame { .. } => Failure::Domain(e.to_string()),
        _ => Failure::Env(e.to_string()),
    })?;
    println!("extracted {} slides", slides.len());
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Env(format!("{}: {e}", path.display())))
}

fn load_corpus(path: &Path) -> Result<Vec<SlideLayout64>, Failure> {
    read_corpus(open(path)?).map_err(|e| match e {
        CorpusError::Io(e) => Failure::Env(format!("{}: {e}", path.display())),
        other => Failure::Domain(format!("{}: {other}", path.display())),
    })
}

fn validate(path: &Path) -> CmdResult {
    let lines = read_corpus_lines::<f64, _>(open(path)?).map_err(|e| Failure::Env(format!("{}: {e}", path.display())))?;
    let mut out = std::io::stdout().lock();
    let mut problems = 0;
    for line in &lines {
        if let Err(e) = &line.result {
            problems += 1;
            let _ = writeln!(out, "line {}: {e}", line.line);
        }
    }
    for dup in find_duplicates(&lines) {
        problems += 1;
        let _ = writeln!(
            out,
            "line {}: duplicate id {:?} (first seen on line {})",
            dup.line, dup.id, dup.first_line
        );
    }
    let valid: Vec<_> = lines.iter().filter_map(|l| l.result.as_ref().ok()).collect();
    let count = |c: ElementCategory| valid.iter().map(|l| l.count_of(c)).sum::<usize>();
    let _ = writeln!(
        out,
        "{} slides, {} title, {} text, {} figure",
        valid.len(),
        count(ElementCategory::Title),
        count(ElementCategory::Text),
        count(ElementCategory::Figure)
    );
    if problems > 0 {
        return Err(Failure::Domain(format!("{problems} invalid record(s) in {}", path.display())));
    }
    Ok(())
}

fn heatmap(corpus: &Path, mode: HeatmapMode, g: usize, raw: bool) -> CmdResult {
    let corpus = load_corpus(corpus)?;
    let grid = compute_heatmap(&corpus, mode, g).map_err(|e| Failure::Domain(e.to_string()))?;
    let record = if raw {
        HeatmapRecord::raw(&grid)
    } else {
        HeatmapRecord::normalized(&grid)
    };
    println!("{}", serde_json::to_string(&record).expect("heatmap record serializes"));
    Ok(())
}

fn query(corpus: &Path, draft: &Path, k: usize, g: usize) -> CmdResult {
    let corpus = load_corpus(corpus)?;
    let text = std::fs::read_to_string(draft).map_err(|e| Failure::Env(format!("{}: {e}", draft.display())))?;
    let raw: AnnotationRecord =
        serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("{}: {e}", draft.display())))?;
    let elements = validate_elements(&raw.elements).map_err(|e| Failure::Domain(format!("{}: {e}", draft.display())))?;
    let index = CorpusIndex64::build(&corpus, g).map_err(|e| Failure::Domain(e.to_string()))?.index;
    let result = index
        .query(&SlideLayout64::draft(elements), k)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    for (rank, hit) in result.hits.iter().enumerate() {
        let _ = writeln!(out, "{} {} {:.6}", rank + 1, hit.id, hit.score);
    }
    Ok(())
}

fn serve_config(args: ServeArgs) -> Result<ServiceConfig, ServiceError> {
    let mut cfg = match (&args.config, &args.corpus) {
        (Some(path), _) => ServiceConfig::load(path)?,
        (None, Some(corpus)) => ServiceConfig::new(corpus),
        (None, None) => return Err(ServiceError::Config("pass --config or --corpus".into())),
    };
    if let Some(v) = args.bind {
        cfg.bind = v;
    }
    if let Some(v) = args.corpus {
        cfg.corpus = v;
    }
    if let Some(v) = args.images {
        cfg.images = Some(v);
    }
    if let Some(v) = args.descriptor_g {
        cfg.descriptor_g = v;
    }
    if let Some(v) = args.heatmap_g {
        cfg.heatmap_g = v;
    }
    if let Some(v) = args.default_k {
        cfg.default_k = v;
    }
    if let Some(v) = args.cors_allow_origin {
        cfg.cors_allow_origin = Some(v);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn serve(args: ServeArgs) -> CmdResult {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let env = |e: ServiceError| Failure::Env(e.to_string());
    let config = serve_config(args).map_err(env)?;
    let state = Arc::new(AppState::load(config).map_err(env)?);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Env(e.to_string()))?;
    runtime.block_on(async move {
        let listener = shadowlayout_service::bind(&state).await.map_err(env)?;
        let addr = listener.local_addr().map_err(|e| Failure::Env(e.to_string()))?;
        let snapshot = state.snapshot();
        eprintln!(
            "serving {} slides (revision {}) on http://{addr}",
            snapshot.index.len(),
            snapshot.revision()
        );
        drop(snapshot);
        shadowlayout_service::serve(listener, state, shadowlayout_service::shutdown_signal())
            .await
            .map_err(env)
    })
}
