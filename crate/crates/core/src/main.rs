use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use switchcode::analysis::{self, ModelChoice};
use switchcode::counts::{train, CountStore, Mode};
use switchcode::manifest::{sha256_bytes, sha256_hex, write_atomic, RunManifest};
use switchcode::markov::Smoothing;
use switchcode::repeats::max_repeat_length;
use switchcode::sources::SourceSpec;
use switchcode::switch::ModelConfig;
use switchcode::text::collapse_to_27;

/// Universal-coding toolkit: switch-distribution and LZ code lengths,
/// compression-rate and mutual-information tables, power-law exponents.
#[derive(Parser)]
#[command(name = "switchcode", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compression rates at doubling prefix lengths (CSV: n,model,bits,rate_bpc)
    Rate(RunArgs),
    /// Pointwise mutual information between block halves (CSV: n,model,mi_bits)
    Mi(RunArgs),
    /// Fit c·n^gamma to the mutual-information series (CSV: model,c,gamma,...)
    Gamma(GammaArgs),
    /// Longest substring occurring at least twice
    Depth {
        #[arg(long)]
        input: PathBuf,
        /// Collapse the corpus to the 27-symbol letters-plus-space alphabet
        #[arg(long)]
        filter27: bool,
    },
    /// Generate a seeded synthetic corpus
    Gen(GenArgs),
    /// LZ78 parse of a whole file
    Lz {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 256)]
        d: u16,
        #[arg(long)]
        filter27: bool,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModelArg {
    Plain,
    Fixed,
    Preadapted,
    Lz,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SmoothingArg {
    /// Blend in the next lower order (default)
    LowerOrder,
    /// Additive 1/2 (Krichevsky-Trofimov)
    Kt,
    /// Additive 1
    Laplace,
}

impl SmoothingArg {
    fn to_smoothing(self) -> Smoothing {
        match self {
            SmoothingArg::LowerOrder => Smoothing::LowerOrder,
            SmoothingArg::Kt => Smoothing::Additive(0.5),
            SmoothingArg::Laplace => Smoothing::Additive(1.0),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Corpus to compress, read as raw bytes
    #[arg(long)]
    input: PathBuf,
    /// Training corpus (required for fixed and preadapted)
    #[arg(long)]
    train: Option<PathBuf>,
    /// Cache file for trained counts; created if absent, reused if the
    /// training corpus and depth still match
    #[arg(long)]
    train_cache: Option<PathBuf>,
    /// Transition-weight exponent
    #[arg(long, default_value_t = 1.001)]
    alpha: f64,
    /// Order cap, or `auto` to use the input's repeat depth
    #[arg(long, default_value = "7")]
    depth: String,
    /// Largest block length (default: the whole input)
    #[arg(long)]
    max_n: Option<usize>,
    /// Collapse the corpus to the 27-symbol letters-plus-space alphabet
    #[arg(long)]
    filter27: bool,
    #[arg(long, value_enum, default_value_t = SmoothingArg::LowerOrder)]
    smoothing: SmoothingArg,
    /// Output CSV (default: <command>_<model>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the per-order probability mass after the run (stderr)
    #[arg(long)]
    order_mass: bool,
}

#[derive(Args)]
struct GammaArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Fit only block lengths LO:HI (default: all n >= 8 with positive MI)
    #[arg(long)]
    fit_range: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "iid")]
    kind: String,
    #[arg(long, default_value_t = 256)]
    d: u16,
    /// Symbol probabilities for iid, e.g. `0.5,0.25,0.25` (default uniform)
    #[arg(long)]
    probs: Option<String>,
    /// Transition rows for markov, e.g. `0.9,0.1;0.2,0.8`
    #[arg(long)]
    transition: Option<String>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Rate(args) => run_series(args, SeriesKind::Rate, None),
        Cmd::Mi(args) => run_series(args, SeriesKind::Mi, None),
        Cmd::Gamma(args) => {
            let range = args.fit_range.as_deref().map(parse_range).transpose()?;
            run_series(args.run, SeriesKind::Gamma, range.map(Some).unwrap_or(None))
        }
        Cmd::Depth { input, filter27 } => {
            let bytes = read_corpus(&input, filter27)?;
            let r = max_repeat_length(&bytes);
            println!("depth: {}", r.depth);
            println!("witness_offset: {}", r.offset);
            Ok(())
        }
        Cmd::Gen(args) => run_gen(args),
        Cmd::Lz { input, d, filter27 } => {
            let bytes = read_corpus(&input, filter27)?;
            let parse = switchcode::lz::parse(&bytes, if filter27 { 27 } else { d })?;
            println!("phrases: {}", parse.phrases.len());
            println!("bits: {}", parse.code_bits);
            println!("rate_bpc: {}", parse.code_bits / bytes.len() as f64);
            Ok(())
        }
    }
}

enum SeriesKind {
    Rate,
    Mi,
    Gamma,
}

impl SeriesKind {
    fn name(&self) -> &'static str {
        match self {
            SeriesKind::Rate => "rate",
            SeriesKind::Mi => "mi",
            SeriesKind::Gamma => "gamma",
        }
    }
}

fn read_corpus(path: &Path, filter27: bool) -> Result<Vec<u8>, Box<dyn std::error::Error>> {
    let raw = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(if filter27 { collapse_to_27(&raw) } else { raw })
}

fn run_series(
    args: RunArgs,
    kind: SeriesKind,
    fit_range: Option<(usize, usize)>,
) -> Result<(), Box<dyn std::error::Error>> {
    let input = read_corpus(&args.input, args.filter27)?;
    if input.is_empty() {
        return Err("input corpus is empty".into());
    }
    let d: u16 = if args.filter27 { 27 } else { 256 };
    let max_n = args.max_n.unwrap_or(input.len());
    let depth_setting = if args.depth == "auto" {
        max_repeat_length(&input).depth
    } else {
        args.depth
            .parse::<usize>()
            .map_err(|_| format!("--depth must be a number or `auto`, got {}", args.depth))?
    };

    let mut manifest = RunManifest::new(kind.name());
    manifest.set("model", model_label(args.model));
    manifest.set("d", d);
    manifest.set("alpha", args.alpha);
    manifest.set("depth", depth_setting);
    manifest.set("depth_arg", &args.depth);
    manifest.set("smoothing", args.smoothing.to_smoothing().label());
    manifest.set("max_n", max_n);
    manifest.set("filter27", args.filter27);
    manifest.set_file("input", &args.input)?;

    let (model, training) = build_model(&args, d, depth_setting, &mut manifest)?;

    let source_id = args.input.display().to_string();
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}_{}.csv", kind.name(), model.label())));

    let csv = match kind {
        SeriesKind::Rate => {
            let series =
                analysis::code_length_series(&model, training.as_ref(), &input, max_n, &source_id)?;
            if let Some((n, bits)) = series.points.last() {
                println!("n = {n}: {} bpc", bits / *n as f64);
            }
            series.to_csv()
        }
        SeriesKind::Mi => {
            let series = analysis::mi_series(&model, training.as_ref(), &input, max_n, &source_id)?;
            if let Some((n, mi)) = series.points.last() {
                println!("n = {n}: {mi} bits");
            }
            series.to_csv()
        }
        SeriesKind::Gamma => {
            let series = analysis::mi_series(&model, training.as_ref(), &input, max_n, &source_id)?;
            let fit = analysis::fit_power_law(&series.points, fit_range)?;
            manifest.set(
                "fit_range",
                fit_range
                    .map(|(a, b)| format!("{a}:{b}"))
                    .unwrap_or_else(|| "default".into()),
            );
            manifest.set("points_fitted", fit.points_fitted);
            println!("gamma = {}", fit.gamma);
            println!("c = {}", fit.c);
            fit.to_csv(model.label())
        }
    };

    if args.order_mass {
        if let ModelChoice::Switch(cfg) = &model {
            report_order_mass(cfg, training.as_ref(), &input, max_n)?;
        }
    }

    manifest.set("out", out.display());
    write_atomic(&out, csv.as_bytes())?;
    let mpath = manifest.write_beside(&out)?;
    eprintln!("wrote {} and {}", out.display(), mpath.display());
    Ok(())
}

fn model_label(m: ModelArg) -> &'static str {
    match m {
        ModelArg::Plain => "plain",
        ModelArg::Fixed => "fixed",
        ModelArg::Preadapted => "preadapted",
        ModelArg::Lz => "lz",
    }
}

type BuiltModel = (ModelChoice, Option<Arc<CountStore>>);

fn build_model(
    args: &RunArgs,
    d: u16,
    depth: usize,
    manifest: &mut RunManifest,
) -> Result<BuiltModel, Box<dyn std::error::Error>> {
    if args.model == ModelArg::Lz {
        return Ok((ModelChoice::Lz { d }, None));
    }
    let mode = match args.model {
        ModelArg::Plain => Mode::Plain,
        ModelArg::Fixed => Mode::Fixed,
        ModelArg::Preadapted => Mode::Preadapted,
        ModelArg::Lz => unreachable!(),
    };
    let mut cfg = ModelConfig::new(d, args.alpha, depth, mode);
    cfg.smoothing = args.smoothing.to_smoothing();
    cfg.validate()?;
    let training = match mode {
        Mode::Plain => None,
        Mode::Fixed | Mode::Preadapted => {
            let path = args
                .train
                .as_ref()
                .ok_or_else(|| format!("--train is required for the {} model", mode.label()))?;
            manifest.set_file("train", path)?;
            let raw = std::fs::read(path)?;
            let corpus = if args.filter27 {
                collapse_to_27(&raw)
            } else {
                raw
            };
            let store = load_or_train(&corpus, depth, mode, args.train_cache.as_deref())?;
            Some(Arc::new(store))
        }
    };
    Ok((ModelChoice::Switch(cfg), training))
}

fn load_or_train(
    corpus: &[u8],
    depth: usize,
    mode: Mode,
    cache: Option<&Path>,
) -> Result<CountStore, Box<dyn std::error::Error>> {
    let tag = sha256_bytes(corpus);
    if let Some(path) = cache {
        if path.exists() {
            match CountStore::read_cache(path, &tag) {
                Ok(store) if store.depth_cap() == depth && store.mode() == mode => {
                    eprintln!("reusing trained counts from {}", path.display());
                    return Ok(store);
                }
                Ok(_) => eprintln!("cache {} is stale, retraining", path.display()),
                Err(e) => eprintln!("cache {} unusable ({e}), retraining", path.display()),
            }
        }
    }
    let store = train(corpus, depth, mode)?;
    if let Some(path) = cache {
        store.write_cache(path, &tag)?;
        eprintln!("cached trained counts at {}", path.display());
    }
    Ok(store)
}

fn report_order_mass(
    cfg: &ModelConfig,
    training: Option<&Arc<CountStore>>,
    input: &[u8],
    max_n: usize,
) -> Result<(), Box<dyn std::error::Error>> {
    use switchcode::switch::SwitchState;
    let mut state = match cfg.mode {
        Mode::Plain => SwitchState::new(cfg)?,
        _ => SwitchState::with_trained(cfg, training.ok_or("missing training store")?)?,
    };
    let top = max_n.min(input.len());
    for &b in &input[..top] {
        state.step(b)?;
    }
    let fractions = state.order_mass_fractions()?;
    for (idx, frac) in fractions.iter().enumerate() {
        if idx + 1 == fractions.len() {
            eprintln!("order >{}: {frac:.6}", cfg.s);
        } else {
            eprintln!("order {}: {frac:.6}", idx as isize - 1);
        }
    }
    Ok(())
}

fn run_gen(args: GenArgs) -> Result<(), Box<dyn std::error::Error>> {
    let spec = match args.kind.as_str() {
        "iid" => match &args.probs {
            Some(p) => SourceSpec::iid(parse_probs(p)?, args.seed)?,
            None => SourceSpec::iid_uniform(args.d, args.seed)?,
        },
        "markov" => {
            let t = args
                .transition
                .as_ref()
                .ok_or("--transition is required for markov sources")?;
            SourceSpec::markov(parse_transition(t)?, args.seed)?
        }
        other => return Err(format!("unknown source kind {other}").into()),
    };
    let data = spec.generate(args.n);
    write_atomic(&args.out, &data)?;
    let mut manifest = RunManifest::new("gen");
    manifest.set("kind", &args.kind);
    manifest.set("d", spec.d);
    manifest.set("n", args.n);
    manifest.set("seed", args.seed);
    manifest.set("entropy_rate_bits", spec.entropy_rate());
    manifest.set("out", args.out.display());
    manifest.set("out.sha256", sha256_hex(&data));
    let mpath = manifest.write_beside(&args.out)?;
    println!(
        "generated {} symbols (entropy rate {} bits)",
        args.n,
        spec.entropy_rate()
    );
    eprintln!("wrote {} and {}", args.out.display(), mpath.display());
    Ok(())
}

fn parse_probs(s: &str) -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(Into::into))
        .collect()
}

fn parse_transition(s: &str) -> Result<Vec<Vec<f64>>, Box<dyn std::error::Error>> {
    s.split(';').map(|row| parse_probs(row)).collect()
}

fn parse_range(s: &str) -> Result<(usize, usize), Box<dyn std::error::Error>> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or("--fit-range must look like LO:HI")?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}
