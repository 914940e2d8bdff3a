use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swseg::experiment::{model_summary, write_oracle_csv};
use swseg::graph::{cut_at, partition_labelmap, save_hierarchy, IndexedHierarchy};
use swseg::io::{render_saliency, HierarchyCache, RunConfig};
use swseg::pixel::{import_labels, load_image, save_labels};
use swseg::select::CutValue;
use swseg::stochastic::{
    apply_chain, cut_probabilities, monte_carlo_cut_frequency, HierarchySpec, MarkerModel,
};
use swseg::synthetic::{bundled_hierarchy, write_disk_dataset};
use swseg::{Error, Experiment, ImageCase, PipelineOptions, Result};

#[derive(Parser)]
#[command(
    name = "swseg",
    version,
    about = "Stochastic watershed hierarchies and hierarchy/cut selection"
)]
struct Cli {
    /// Seed for random splits and Monte Carlo runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory for cached hierarchies.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one image with a hierarchy and a cut.
    Segment(SegmentArgs),
    /// Select the best (hierarchy, cut) on the training split.
    Train(ConfigArgs),
    /// Best (hierarchy, cut) of each image on its own.
    Oracle(OracleArgs),
    /// Train, then compare the model with the per-image oracle on the test split.
    Evaluate(ConfigArgs),
    /// Render the saliency map of a hierarchy.
    Saliency(SaliencyArgs),
    /// Compare closed-form cut probabilities with Monte Carlo frequencies.
    McCheck(McCheckArgs),
    /// Write a synthetic noisy-disk dataset and a matching config.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ImageArgs {
    image: PathBuf,
    /// Hierarchy chain, e.g. `svol|ssurf|grad`.
    #[arg(long, default_value = "grad")]
    spec: String,
    /// Fine partition to use instead of the watershed basins.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    gradient_radius: u32,
}

#[derive(Args)]
struct SegmentArgs {
    #[command(flatten)]
    input: ImageArgs,
    /// `k:N` regions, `t:x` normalized threshold, or a raw altitude.
    #[arg(long)]
    cut: String,
    /// Output label map (16-bit PNG).
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long)]
    saliency: Option<PathBuf>,
    /// Also save the hierarchy in the binary format.
    #[arg(long)]
    hierarchy: Option<PathBuf>,
}

#[derive(Args)]
struct SaliencyArgs {
    #[command(flatten)]
    input: ImageArgs,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Every image of the manifest instead of the test split.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct McCheckArgs {
    /// Single operator, e.g. `svol@uniform(10)`.
    #[arg(long, default_value = "ssurf@poisson(10)")]
    model: String,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Use the gradient hierarchy of this image instead of the bundled one.
    #[arg(long)]
    image: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 12)]
    images: usize,
    #[arg(long, default_value_t = 80)]
    size: usize,
    /// Also write pairwise judgments for whdr scoring.
    #[arg(long)]
    judgments: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Segment(a) => segment(cli, a),
        Command::Saliency(a) => saliency(cli, a),
        Command::Train(a) => train(cli, a),
        Command::Oracle(a) => oracle(cli, a),
        Command::Evaluate(a) => evaluate(cli, a),
        Command::McCheck(a) => mc_check(cli, a),
        Command::Synth(a) => synth(cli, a),
    }
}

fn build(cli: &Cli, a: &ImageArgs) -> Result<(ImageCase, HierarchySpec, IndexedHierarchy)> {
    let spec: HierarchySpec = a.spec.parse()?;
    let image = load_image(&a.image)?;
    let labels = match &a.labels {
        Some(p) => Some(import_labels(p, Some((image.width(), image.height())))?),
        None => None,
    };
    let options = PipelineOptions {
        gradient_radius: a.gradient_radius,
        ..PipelineOptions::default()
    };
    let id = a
        .image
        .file_stem()
        .map_or_else(|| "image".into(), |s| s.to_string_lossy().into_owned());
    let case = ImageCase::prepare(id, image, labels, None, &options)?;
    let h = match &cli.cache_dir {
        Some(dir) if !spec.is_base() => {
            HierarchyCache::new(dir)
                .get_or_build(&case, &spec, || apply_chain(case.base(), &spec))?
        }
        _ => apply_chain(case.base(), &spec)?,
    };
    Ok((case, spec, h))
}

fn segment(cli: &Cli, a: &SegmentArgs) -> Result<()> {
    let (case, spec, h) = build(cli, &a.input)?;
    let partition = match a.cut.trim().parse::<f64>() {
        Ok(lambda) => cut_at(&h, lambda)?,
        Err(_) => a.cut.parse::<CutValue>()?.cut(&h, spec.is_base())?,
    };
    let seg = partition_labelmap(&partition, case.fine())?;
    save_labels(&seg, &a.out)?;
    if let Some(p) = &a.saliency {
        render_saliency(&h, case.fine())?.save_png(p)?;
    }
    if let Some(p) = &a.hierarchy {
        save_hierarchy(&h, p)?;
    }
    println!(
        "{}: {} fine regions, {} regions after cut {} of {}",
        case.id(),
        case.fine().n_regions(),
        seg.n_regions(),
        a.cut,
        spec.canonical()
    );
    Ok(())
}

fn saliency(cli: &Cli, a: &SaliencyArgs) -> Result<()> {
    let (case, spec, h) = build(cli, &a.input)?;
    let scale = render_saliency(&h, case.fine())?.save_png(&a.out)?;
    println!(
        "{}: saliency of {} written, scale {scale}",
        case.id(),
        spec.canonical()
    );
    Ok(())
}

fn experiment(cli: &Cli, path: &Path) -> Result<Experiment> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    if cli.workers.is_none() {
        if let Some(n) = cfg.workers {
            // Ignore the error if a pool already exists.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    Experiment::new(cfg)
}

fn create_output(exp: &Experiment) -> Result<&Path> {
    let dir = exp.config().output_dir.as_path();
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    Ok(dir)
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn train(cli: &Cli, a: &ConfigArgs) -> Result<()> {
    let exp = experiment(cli, &a.config)?;
    let model = exp.train()?;
    let dir = create_output(&exp)?;
    let summary = model_summary(&model);
    write_file(&dir.join("model.txt"), summary.as_bytes())?;
    print!("{summary}");
    Ok(())
}

fn oracle(cli: &Cli, a: &OracleArgs) -> Result<()> {
    let exp = experiment(cli, &a.config.config)?;
    let ids: Vec<String> = if a.all {
        exp.dataset().ids().map(str::to_string).collect()
    } else {
        exp.test_ids().to_vec()
    };
    let rows = exp.oracles(&ids)?;
    let dir = create_output(&exp)?;
    let mut buf = Vec::new();
    write_oracle_csv(&rows, &mut buf)?;
    write_file(&dir.join("oracle.csv"), &buf)?;
    for (id, sel) in &rows {
        println!(
            "{id}: {} at {} (score {})",
            sel.spec.canonical(),
            sel.cut,
            sel.score
        );
    }
    Ok(())
}

fn evaluate(cli: &Cli, a: &ConfigArgs) -> Result<()> {
    let exp = experiment(cli, &a.config)?;
    let result = exp.evaluate()?;
    let dir = create_output(&exp)?;
    write_file(&dir.join("results.csv"), result.to_csv_string()?.as_bytes())?;
    write_file(
        &dir.join("model.txt"),
        model_summary(&result.model).as_bytes(),
    )?;
    println!(
        "model {} at {}: mu(error) {} sigma(error) {} over {} test images",
        result.model.spec.canonical(),
        result.model.cut,
        result.mean_error,
        result.std_error,
        result.images.len()
    );
    Ok(())
}

fn mc_check(cli: &Cli, a: &McCheckArgs) -> Result<()> {
    let spec: HierarchySpec = format!("{}|grad", a.model).parse()?;
    let model: MarkerModel = match spec.ops() {
        [op] => *op,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "`{}` must be a single operator",
                a.model
            )))
        }
    };
    let h = match &a.image {
        Some(p) => {
            let img = load_image(p)?;
            ImageCase::prepare("mc", img, None, None, &PipelineOptions::default())?
                .base()
                .clone()
        }
        None => bundled_hierarchy(),
    };
    let p = cut_probabilities(&h, &model)?;
    let f = monte_carlo_cut_frequency(&h, &model, a.trials, cli.seed.unwrap_or(0))?;
    let mut max_dev = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for (&p, &f) in p.iter().zip(&f) {
        let band = 4.0 * (p * (1.0 - p) / a.trials as f64).sqrt() + 1e-3;
        max_dev = max_dev.max((p - f).abs());
        worst_ratio = worst_ratio.max((p - f).abs() / band);
    }
    println!("model {model}, {} edges, {} trials", p.len(), a.trials);
    println!("max |P - freq| = {max_dev}");
    println!("worst deviation / band = {worst_ratio}");
    println!(
        "within band: {}",
        if worst_ratio <= 1.0 { "yes" } else { "no" }
    );
    Ok(())
}

fn synth(cli: &Cli, a: &SynthArgs) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let ds = write_disk_dataset(&a.out, a.images, a.size, seed, a.judgments)?;
    let mut cfg = RunConfig::new("manifest.json");
    cfg.seed = seed;
    cfg.output_dir = PathBuf::from("results");
    let path = a.out.join("config.toml");
    write_file(&path, cfg.to_toml().as_bytes())?;
    println!(
        "{} images written; manifest {}; config {}",
        ds.scenes.len(),
        ds.manifest.display(),
        path.display()
    );
    Ok(())
}
