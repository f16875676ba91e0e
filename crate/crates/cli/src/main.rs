use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use extremaldep::bootstrap::Significance;
use extremaldep::classifier::{ClassifierConfig, TailSize};
use extremaldep::pipeline::heatmap::{load_meta, render_heatmap, SectorMeta};
use extremaldep::pipeline::matrix::{run_matrix, MatrixFile, RunConfig};
use extremaldep::pipeline::pair::{classify_pair, estimate_asset};
use extremaldep::pipeline::prepare_returns;
use extremaldep::pipeline::prices::{load_prices, ReturnSeries, PRICE_HEADER};
use extremaldep::polar::BivariateObservation;
use extremaldep::stream::StreamKey;
use extremaldep::synth::{gen_class_sample, AngularLaw, ClassSpec};
use extremaldep::tail::hill_alpha_series;
use extremaldep::threshold::{select_threshold, KCap, ThresholdConfig};

const THREADS_VAR: &str = "EXTREMALDEP_THREADS";

#[derive(Parser)]
#[command(name = "extremaldep", version, about = "Classify extremal dependence between heavy-tailed series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one pair of assets, each given as a single-asset price file.
    ClassifyPair(PairArgs),
    /// Classify every pair in a price file and write matrix.json, matrix.csv and heatmap.svg.
    ClassifyMatrix(MatrixArgs),
    /// Report the selected tail size and Hill estimate per asset.
    Threshold(ThresholdArgs),
    /// Generate a bivariate sample with a known dependence class as x,y CSV.
    Simulate(SimulateArgs),
    /// Draw the heatmap of an existing matrix.json.
    Render(RenderArgs),
}

#[derive(Args)]
struct TailFlags {
    /// Smallest tail size scanned by the threshold rule.
    #[arg(long, default_value_t = 10)]
    kmin: usize,
    /// Largest tail size scanned, or `auto` for half the sample.
    #[arg(long, default_value = "auto")]
    kmax: KMax,
    /// Tail size cap as `base,span`, or `none`.
    #[arg(long, default_value = "80,40")]
    cap: Cap,
}

impl TailFlags {
    fn config(&self) -> ThresholdConfig {
        ThresholdConfig {
            k_min: self.kmin,
            k_max: self.kmax.0,
            cap: self.cap.0,
        }
    }
}

#[derive(Args)]
struct ClassifyFlags {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weight of the fit penalty in the cone search.
    #[arg(long, default_value_t = 4.0)]
    lambda: f64,
    /// Bootstrap resamples per repetition.
    #[arg(long = "B", default_value_t = 200)]
    resamples: usize,
    /// Repetitions of the test cascade.
    #[arg(long, default_value_t = 50)]
    reps: usize,
    /// Cone width that sends a pair straight to the independence test, or `none`.
    #[arg(long, default_value = "0.85")]
    precheck: Precheck,
    /// Run both tests at level 0.025 instead of the 0.05 defaults.
    #[arg(long)]
    bonferroni: bool,
    /// Phase of the every-other-day subsampling (0 or 1).
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[command(flatten)]
    tail: TailFlags,
}

impl ClassifyFlags {
    fn run_config(&self) -> RunConfig {
        let threshold = self.tail.config();
        RunConfig {
            asset_threshold: threshold,
            classifier: ClassifierConfig {
                tail_size: TailSize::Rule(threshold),
                lambda: self.lambda,
                precheck_width: self.precheck.0,
                repetitions: self.reps,
                resamples: self.resamples,
                significance: if self.bonferroni {
                    Significance::Bonferroni
                } else {
                    Significance::Standard
                },
                seed: self.seed,
                ..ClassifierConfig::default()
            },
        }
    }
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: ClassifyFlags,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    flags: ClassifyFlags,
}

#[derive(Args)]
struct ThresholdArgs {
    /// A price file, or an `x,y` sample whose radii x + y are used.
    #[arg(long)]
    input: PathBuf,
    /// Subsampling phase for price files.
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[command(flatten)]
    tail: TailFlags,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Full,
    Strong,
    Weak,
    Indep,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Uniform,
    Beta22,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    class: ClassArg,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    n: usize,
    /// Angle of the full-dependence ray.
    #[arg(long, default_value_t = 0.5)]
    theta0: f64,
    /// Angular support `a,b` of the strong class.
    #[arg(long, default_value = "0.3,0.7")]
    interval: Interval,
    /// Angular law of the weak class.
    #[arg(long, value_enum, default_value = "uniform")]
    law: LawArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// `asset_id,market,sector` file.
    #[arg(long)]
    meta: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy)]
struct KMax(Option<usize>);

impl FromStr for KMax {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self(None)),
            _ => s.parse().map(|k| Self(Some(k))).map_err(|_| format!("expected `auto` or an integer, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy)]
struct Cap(Option<KCap>);

impl FromStr for Cap {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "none" {
            return Ok(Self(None));
        }
        let (base, span) = s.split_once(',').ok_or("expected `base,span` or `none`")?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("bad cap value `{v}`"));
        Ok(Self(Some(KCap {
            base: parse(base)?,
            span: parse(span)?,
        })))
    }
}

#[derive(Clone, Copy)]
struct Precheck(Option<f64>);

impl FromStr for Precheck {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Self(None)),
            _ => s.parse().map(|w| Self(Some(w))).map_err(|_| format!("expected a width or `none`, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy)]
struct Interval(f64, f64);

impl FromStr for Interval {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad interval end `{v}`"));
        Ok(Self(parse(a)?, parse(b)?))
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::ClassifyPair(args) => classify_pair_cmd(args),
        Command::ClassifyMatrix(args) => classify_matrix_cmd(args),
        Command::Threshold(args) => threshold_cmd(args),
        Command::Simulate(args) => simulate_cmd(args),
        Command::Render(args) => render_cmd(args),
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("starting worker pool")
}

fn returns_from(path: &Path, offset: usize) -> Result<Vec<ReturnSeries>> {
    let table = load_prices(path).with_context(|| format!("reading {}", path.display()))?;
    if table.dropped_rows > 0 {
        eprintln!(
            "warning: {}: dropped {} rows with missing or non-positive prices",
            path.display(),
            table.dropped_rows
        );
    }
    Ok(prepare_returns(&table, offset)?)
}

fn single_asset(path: &Path, offset: usize) -> Result<ReturnSeries> {
    let mut series = returns_from(path, offset)?;
    match series.len() {
        1 => Ok(series.remove(0)),
        0 => bail!("{} holds no prices", path.display()),
        n => bail!("{} holds {n} assets, expected one", path.display()),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn classify_pair_cmd(args: PairArgs) -> Result<()> {
    let cfg = args.flags.run_config();
    let a = single_asset(&args.a, args.flags.offset)?;
    let b = single_asset(&args.b, args.flags.offset)?;
    if a.asset_id == b.asset_id {
        bail!("both files hold asset {}", a.asset_id);
    }
    let ea = estimate_asset(&a, &cfg.asset_threshold);
    let eb = estimate_asset(&b, &cfg.asset_threshold);
    let result = classify_pair((&a, &ea), (&b, &eb), &cfg.classifier);
    let mut json = serde_json::to_string_pretty(&result)?;
    json.push('\n');
    write_output(args.out.as_deref(), &json)
}

fn classify_matrix_cmd(args: MatrixArgs) -> Result<()> {
    let cfg = args.flags.run_config();
    let returns = returns_from(&args.input, args.flags.offset)?;
    let matrix = run_matrix(&returns, &cfg)?;
    let file = matrix.to_file();
    let meta: Vec<SectorMeta> = returns
        .iter()
        .map(|r| SectorMeta {
            asset_id: r.asset_id.clone(),
            market: r.market.clone(),
            sector: r.sector.clone(),
        })
        .collect();
    let svg = render_heatmap(&file, &meta)?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (name, text) in [
        ("matrix.json", file.to_json()),
        ("matrix.csv", file.to_csv()),
        ("heatmap.svg", svg),
    ] {
        let path = args.out.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let unclassified = file
        .pairs
        .iter()
        .filter(|p| p.weights.is_none())
        .count();
    eprintln!(
        "{} assets, {} pairs, {} unclassified, written to {}",
        file.assets.len(),
        file.pairs.len(),
        unclassified,
        args.out.display()
    );
    Ok(())
}

fn threshold_cmd(args: ThresholdArgs) -> Result<()> {
    let cfg = args.tail.config();
    let header = first_line(&args.input)?;
    let series: Vec<(String, Vec<f64>)> = if header == PRICE_HEADER.join(",") {
        returns_from(&args.input, args.offset)?
            .into_iter()
            .map(|r| {
                let v = r.values();
                (r.asset_id, v)
            })
            .collect()
    } else if header == "x,y" {
        let radii = read_xy(&args.input)?.iter().map(|o| o.x + o.y).collect();
        vec![("sample".to_string(), radii)]
    } else {
        bail!(
            "{}: expected a `{}` or an `x,y` header",
            args.input.display(),
            PRICE_HEADER.join(",")
        );
    };

    let mut out = String::from("asset_id,n,k_star,k_used,ks_distance,alpha_hat\n");
    for (id, values) in series {
        let line = select_threshold(&values, &cfg).and_then(|sel| {
            let tail = hill_alpha_series(&values, sel.k_used)?;
            Ok(format!(
                "{id},{},{},{},{},{}\n",
                values.len(),
                sel.k_star,
                sel.k_used,
                sel.ks_distance_at_star,
                tail.alpha_hat
            ))
        });
        match line {
            Ok(l) => out.push_str(&l),
            Err(e) => {
                eprintln!("warning: {id}: {e}");
                out.push_str(&format!("{id},{},,,,\n", values.len()));
            }
        }
    }
    write_output(None, &out)
}

fn first_line(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(","))
}

fn read_xy(path: &Path) -> Result<Vec<BivariateObservation>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    rdr.records()
        .map(|row| {
            let row = row?;
            let line = row.position().map_or(0, |p| p.line());
            let num = |i: usize| -> Result<f64> {
                row.get(i)
                    .and_then(|v| v.parse().ok())
                    .with_context(|| format!("{}:{line}: bad number", path.display()))
            };
            Ok(BivariateObservation::new(num(0)?, num(1)?)?)
        })
        .collect()
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let spec = match args.class {
        ClassArg::Full => ClassSpec::full(args.alpha, args.theta0),
        ClassArg::Strong => ClassSpec::strong(args.alpha, args.interval.0, args.interval.1),
        ClassArg::Weak => ClassSpec::Weak {
            alpha: args.alpha,
            law: match args.law {
                LawArg::Uniform => AngularLaw::Uniform,
                LawArg::Beta22 => AngularLaw::Beta22,
            },
        },
        ClassArg::Indep => ClassSpec::independence(args.alpha),
    };
    let sample = gen_class_sample(&spec, args.n, StreamKey::new(args.seed))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y"])?;
    for o in &sample {
        w.write_record([o.x.to_string(), o.y.to_string()])?;
    }
    let bytes = w.into_inner().context("flushing csv")?;
    write_output(args.out.as_deref(), &String::from_utf8(bytes)?)
}

fn render_cmd(args: RenderArgs) -> Result<()> {
    let text = fs::read_to_string(&args.matrix).with_context(|| format!("reading {}", args.matrix.display()))?;
    let file = MatrixFile::from_json(&text).with_context(|| format!("parsing {}", args.matrix.display()))?;
    let meta = load_meta(&args.meta).with_context(|| format!("reading {}", args.meta.display()))?;
    let svg = render_heatmap(&file, &meta)?;
    fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))
}
